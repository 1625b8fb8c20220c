"""Belief updates for probabilistic argumentation under linear atomic constraints."""
from .config import Config
from .constraints import (ConstraintSet, LinearAtomicConstraint, Relation, generate_coherence,
                          generate_dual_average, implied_by, normalize, parse_constraints, render,
                          satisfied_by_distribution, satisfied_by_labelling)
from .errors import (DomainError, EpiUpdateError, ParseError, PreconditionError, ResourceError,
                     SolverError, SupportError)
from .model import (BAF, Argument, ProbabilityFunction, ProbabilityLabelling, atomically_equivalent,
                    canonical_lift, marginal, to_labelling)
from .update import (BOT, AtomicUpdateOutcome, als_distance, labelling_update, naive_ls_update,
                     two_stage_ls_update, worldwise_kl_update, worldwise_ls_update)

__version__ = "0.1.0"

__all__ = [
    "Config", "ConstraintSet", "LinearAtomicConstraint", "Relation", "generate_coherence",
    "generate_dual_average", "implied_by", "normalize", "parse_constraints", "render",
    "satisfied_by_distribution", "satisfied_by_labelling",
    "DomainError", "EpiUpdateError", "ParseError", "PreconditionError", "ResourceError",
    "SolverError", "SupportError",
    "BAF", "Argument", "ProbabilityFunction", "ProbabilityLabelling", "atomically_equivalent",
    "canonical_lift", "marginal", "to_labelling",
    "BOT", "AtomicUpdateOutcome", "als_distance", "labelling_update", "naive_ls_update",
    "two_stage_ls_update", "worldwise_kl_update", "worldwise_ls_update",
]
