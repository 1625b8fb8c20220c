from .polytope import PolytopeSpec, SolveReport, Status
from .qp import Feasibility, feasible, project_least_squares, project_weighted
from .lp import bound_slack, maximize_linear
from .kl import bregman_project, maximal_support, project_kl
from .world import project_world

__all__ = [
    "PolytopeSpec", "SolveReport", "Status", "Feasibility",
    "feasible", "project_least_squares", "project_weighted", "maximize_linear", "bound_slack",
    "bregman_project", "maximal_support", "project_kl", "project_world",
]
