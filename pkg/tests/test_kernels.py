"""Cross-backend agreement: the numba kernels and the numpy fallback
implement the same functions, so their outputs must coincide (exactly
for integer counts, to rounding for float accumulations)."""

import math

import numpy as np
import pytest

from ksat_cavity import ModelParams, kernels, population_step, rng_stream, sample_instance
from ksat_cavity.cavity import make_population

numba_backend = pytest.importorskip("ksat_cavity.kernels.numba_backend")
from ksat_cavity.kernels import numpy_backend  # noqa: E402


def _random_cavity_inputs(seed, n_units=3000, p=3, rate=0.8):
    rng = rng_stream(seed, 100)
    r_counts = rng.poisson(rate, n_units)
    offsets = np.zeros(n_units + 1, dtype=np.int64)
    np.cumsum(r_counts, out=offsets[1:])
    total = int(offsets[-1])
    signs = (rng.integers(0, 2, size=(total, p)) * 2 - 1).astype(np.float64)
    zvals = rng.uniform(-1, 1, size=(total, p - 1))
    return offsets, signs, zvals


class TestCavityFieldsAgreement:
    @pytest.mark.parametrize("p", [2, 3, 4])
    def test_backends_agree(self, p):
        offsets, signs, zvals = _random_cavity_inputs(p, p=p)
        em1 = math.expm1(-1.3)
        a_nb, b_nb = numba_backend.cavity_fields(offsets, signs, zvals, em1)
        a_np, b_np = numpy_backend.cavity_fields(offsets, signs, zvals, em1)
        np.testing.assert_allclose(a_nb, a_np, atol=1e-13)
        np.testing.assert_allclose(b_nb, b_np, atol=1e-13)

    def test_empty_input(self):
        offsets = np.zeros(11, dtype=np.int64)
        signs = np.zeros((0, 3))
        zvals = np.zeros((0, 2))
        for backend in (numba_backend, numpy_backend):
            a, b = backend.cavity_fields(offsets, signs, zvals, -0.5)
            np.testing.assert_array_equal(a, np.zeros(10))
            np.testing.assert_array_equal(b, np.zeros(10))


class TestEnumerationAgreement:
    def _instances(self):
        params = ModelParams(p=3, alpha=1.5, beta=1.0)
        for i in range(8):
            yield sample_instance(params, 9, rng_stream(50, i))

    def test_violation_counts_identical(self):
        for instance in self._instances():
            c_nb = numba_backend.violation_counts(
                instance.n_sites, instance.sites, instance.signs
            )
            c_np = numpy_backend.violation_counts(
                instance.n_sites, instance.sites, instance.signs
            )
            np.testing.assert_array_equal(c_nb, c_np)
            assert c_nb.sum() == 2**instance.n_sites

    def test_duplicate_site_clause(self):
        """A clause demanding both signs of one spin is never violated."""
        sites = np.array([[0, 0, 1]], dtype=np.int64)
        signs = np.array([[1.0, -1.0, 1.0]])
        for backend in (numba_backend, numpy_backend):
            counts = backend.violation_counts(3, sites, signs)
            assert counts[0] == 8 and counts[1] == 0

    def test_consistent_duplicate_site_clause(self):
        """Duplicates with equal signs act as a shorter clause."""
        sites = np.array([[0, 0, 1]], dtype=np.int64)
        signs = np.array([[1.0, 1.0, 1.0]])
        for backend in (numba_backend, numpy_backend):
            counts = backend.violation_counts(3, sites, signs)
            # violated iff spins 0 and 1 are both +1: 2 of 8 configurations
            assert counts[1] == 2

    def test_gibbs_sums_agree(self):
        for instance in self._instances():
            z_nb, s1_nb, s2_nb = numba_backend.gibbs_sums(
                instance.n_sites, instance.sites, instance.signs, 1.0
            )
            z_np, s1_np, s2_np = numpy_backend.gibbs_sums(
                instance.n_sites, instance.sites, instance.signs, 1.0
            )
            assert z_nb == pytest.approx(z_np, rel=1e-12)
            np.testing.assert_allclose(s1_nb, s1_np, atol=1e-9)
            np.testing.assert_allclose(s2_nb, s2_np, atol=1e-9)


class TestThreadCountInvariance:
    def test_population_step_bit_identical(self):
        """Parallel member loop writes disjoint slots: any thread count
        must give the same bits."""
        if kernels.BACKEND != "numba":
            pytest.skip("thread capping only affects the numba backend")
        import numba

        params = ModelParams(p=3, alpha=0.3, beta=1.0)
        pop = make_population(30_000, "uniform", rng=rng_stream(60, 1))
        results = []
        available = numba.config.NUMBA_NUM_THREADS
        for n_threads in sorted({1, min(2, available), available}):
            kernels.set_threads(n_threads)
            results.append(population_step(pop, params, rng_stream(60, 2)).members)
        kernels.set_threads(available)
        for other in results[1:]:
            np.testing.assert_array_equal(results[0], other)


class TestBackendSelection:
    def test_get_backend_rejects_unknown(self):
        with pytest.raises(ValueError):
            kernels.get_backend("fortran")

    def test_env_flag_honored(self):
        import os
        import subprocess
        import sys

        env = dict(os.environ, KSAT_CAVITY_BACKEND="numpy")
        out = subprocess.run(
            [sys.executable, "-c",
             "from ksat_cavity import kernels; print(kernels.BACKEND)"],
            env=env, capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() == "numpy"

    def test_set_threads_validates(self):
        with pytest.raises(ValueError):
            kernels.set_threads(0)
        kernels.set_threads(None)
