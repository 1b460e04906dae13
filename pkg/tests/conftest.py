import numpy as np
import pytest

from ksat_cavity import ModelParams, kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed tests measure compute only."""
    offsets = np.array([0, 1], dtype=np.int64)
    signs = np.ones((1, 2))
    zvals = np.zeros((1, 1))
    kernels.cavity_fields(offsets, signs, zvals, -0.5)
    sites = np.zeros((1, 2), dtype=np.int64)
    kernels.violation_counts(2, sites, signs)
    kernels.gibbs_sums(2, sites, signs, 1.0)


@pytest.fixture
def inside_region_params():
    """A point where both the pure-state and contraction predicates hold."""
    return ModelParams(p=3, alpha=0.05, beta=1.0, seed=42)
