import importlib
from pathlib import Path

import numpy as np
import pytest

from epiupdate import BAF, ProbabilityFunction, _pykernels

DATA = Path(__file__).resolve().parents[1] / "src" / "epiupdate" / "data"


def kernel_backends():
    mods = [_pykernels]
    try:
        mods.append(importlib.import_module("epiupdate._ckernels"))
    except ImportError:
        pass
    return mods


@pytest.fixture(params=kernel_backends(), ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param


@pytest.fixture
def ab():
    """Two arguments, B attacks A."""
    return BAF.of(["A", "B"], [("B", "A")])


@pytest.fixture
def prior(ab):
    """World probabilities 0.1, 0.2, 0.3, 0.4 over {}, {A}, {B}, {A,B}; marginals 0.6 / 0.7."""
    return ProbabilityFunction(ab, [0.1, 0.2, 0.3, 0.4])


@pytest.fixture
def twin(ab):
    """Same marginals as ``prior`` with a different joint."""
    return ProbabilityFunction(ab, [0.3, 0.0, 0.1, 0.6])


@pytest.fixture
def fee_files():
    return {
        "baf": DATA / "fee_dialogue_baf.json",
        "initial": DATA / "fee_dialogue_initial.json",
        "observations": DATA / "fee_dialogue_observations.txt",
        "verbatim": DATA / "fee_dialogue_verbatim.txt",
        "scenario": DATA / "fee_dialogue.json",
    }


def close(a, b, tol):
    return np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=0, atol=tol)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
