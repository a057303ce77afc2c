"""Shared fixtures: sampled side-triple batches reused across test modules."""

import numpy as np
import pytest

from curvtri import Geometry, SamplerConfig
from curvtri.oracle import sample_sides

ALL_GEOMETRIES = tuple(Geometry)

# one line per shipping criterion, filled in by test_acceptance.py and
# echoed after the test summary (fd capture would swallow plain prints)
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def sides_10k():
    """10^4 valid side triples per geometry, seed 42, stream 0."""
    cfg = SamplerConfig(seed=42, count=10_000)
    return {kind: sample_sides(kind, cfg, 0, 10_000) for kind in ALL_GEOMETRIES}


@pytest.fixture(scope="session")
def sides_100k():
    """10^5 valid side triples per geometry, seed 42, stream 0."""
    cfg = SamplerConfig(seed=42, count=100_000)
    return {kind: sample_sides(kind, cfg, 0, 100_000) for kind in ALL_GEOMETRIES}


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240815)
