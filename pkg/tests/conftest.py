from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from omegarb import oracle
from omegarb.omega_maps import FiniteSemigroup, OmegaMultiMap

settings.register_profile("omegarb", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("omegarb")

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def z2():
    return FiniteSemigroup.cyclic(2)


def random_map(rng, S, target, sources, lo=-2, hi=2):
    shape = (S.size,) * len(sources) + (target,) + tuple(sources)
    return OmegaMultiMap(S, np.array(rng.integers(lo, hi + 1, size=shape).tolist(), dtype=object))


def random_endo(rng, S, d, arity, lo=-2, hi=2):
    return random_map(rng, S, d, (d,) * arity, lo, hi)


@pytest.fixture
def k_example():
    return oracle.k_example()


@pytest.fixture
def fixtures_dir():
    return FIXTURES
