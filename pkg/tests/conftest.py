"""Shared fixtures for the cqbl test-suite."""

import os
import sys

import numpy as np
import pytest

# Add the src directory to the Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

SPECS_DIR = os.path.join(os.path.dirname(__file__), "..", "specs")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def spec_path():
    def _path(name: str) -> str:
        return os.path.join(SPECS_DIR, f"{name}.json")

    return _path


@pytest.fixture(scope="session")
def noiseless_envelope():
    """Envelope of the noiseless bit, whose boundary is R_B + R_C = ln 2."""
    from cqbl.broadcast.catalog import noiseless_bit
    from cqbl.broadcast.region import compute_envelope

    return compute_envelope(
        noiseless_bit().channel,
        t_grid=np.linspace(0.0, np.log(2.0), 9),
        mu_grid=[0.0, 0.25, 0.5, 1.0, 2.0, 4.0],
    )
