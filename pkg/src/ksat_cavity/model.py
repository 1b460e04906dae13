"""Model parameters, the clause energy function, and seeded sampling.

The clause function on [-1,1]^p is

    theta(sigma_1, ..., sigma_p) = log(1 + (e^{-beta} - 1) prod_i (1 + J_i sigma_i)/2),

which lies in [-beta, 0] and reduces on {-1,1}^p to the two-branch form:
0 when some factor kills the product, -beta when every slot matches its
sign.  All randomness flows through explicit numpy Generators derived
from a master seed and an integer label path, so any draw sequence can
be reproduced from (seed, label) alone.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SIGMA_CLAMP_EPS",
    "ModelParams",
    "Estimate",
    "mean_estimate",
    "rng_stream",
    "sample_clause_signs",
    "sample_poisson",
    "theta_eval",
    "theta_batch",
]

# Population members are ratios that can overshoot [-1,1] by rounding;
# anything beyond this slack is treated as a caller bug.
SIGMA_CLAMP_EPS = 1e-12

_MAX_SEED = 2**64


@dataclass(frozen=True)
class ModelParams:
    """The (p, alpha, beta) triple plus the master RNG seed.

    p is the clause arity, alpha the connectivity (clauses per site scale
    with alpha*N), beta the inverse temperature.
    """

    p: int
    alpha: float
    beta: float
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or self.p < 2:
            raise ValueError(f"p must be an integer >= 2, got {self.p!r}")
        if not math.isfinite(self.alpha) or self.alpha < 0:
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha!r}")
        if not math.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta!r}")
        if not 0 <= int(self.seed) < _MAX_SEED:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed!r}")


@dataclass(frozen=True)
class Estimate:
    """A Monte Carlo scalar: mean, standard error, and sample count."""

    value: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not math.isfinite(self.value) or not math.isfinite(self.std_error):
            raise ValueError("estimate must be finite")
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")

    def to_dict(self):
        return {
            "value": self.value,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
        }


def mean_estimate(samples):
    """Plain iid mean with std_error = sample sd / sqrt(n)."""
    samples = np.asarray(samples, dtype=np.float64)
    n = samples.size
    if n < 1:
        raise ValueError("need at least one sample")
    se = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Estimate(float(samples.mean()), se, n)


def rng_stream(seed, *label):
    """Deterministic stream keyed by (seed, integer label path).

    Identical (seed, label) always yields the identical draw sequence;
    distinct labels give statistically independent streams, so parallel
    and serial runs can produce the same results.
    """
    return np.random.default_rng(
        np.random.SeedSequence(int(seed), spawn_key=tuple(int(x) for x in label))
    )


def sample_clause_signs(p, rng):
    """p independent signs, each +-1 with probability 1/2, as float64."""
    if p < 2:
        raise ValueError(f"p must be >= 2, got {p}")
    return (rng.integers(0, 2, size=p) * 2 - 1).astype(np.float64)


def sample_poisson(mean, rng):
    if not math.isfinite(mean) or mean < 0:
        raise ValueError(f"Poisson mean must be finite and >= 0, got {mean!r}")
    return int(rng.poisson(mean))


def _validated_sigma(sigma):
    sigma = np.asarray(sigma, dtype=np.float64)
    if np.any(np.abs(sigma) > 1.0 + SIGMA_CLAMP_EPS):
        raise ValueError("sigma entries must lie in [-1, 1]")
    return np.clip(sigma, -1.0, 1.0)


def theta_eval(signs, sigma, beta):
    """Clause energy log(1 + (e^{-beta}-1) prod (1+J_i sigma_i)/2).

    Evaluated through log1p so the near-violated regime (product close
    to 1, large beta) does not cancel.  A product of exactly 1 returns
    -beta, matching the two-branch form on {-1,1}^p bit for bit.
    """
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta!r}")
    signs = np.asarray(signs, dtype=np.float64)
    sigma = _validated_sigma(sigma)
    if signs.shape != sigma.shape:
        raise ValueError(f"shape mismatch: signs {signs.shape} vs sigma {sigma.shape}")
    prod = float(np.prod((1.0 + signs * sigma) * 0.5))
    if prod == 1.0:
        return -float(beta)
    return float(math.log1p(math.expm1(-beta) * prod))


def theta_batch(signs, sigma, beta):
    """Row-wise ``theta_eval`` for (n, p) sign and sigma arrays."""
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta!r}")
    signs = np.asarray(signs, dtype=np.float64)
    sigma = _validated_sigma(sigma)
    prod = np.prod((1.0 + signs * sigma) * 0.5, axis=1)
    return np.where(prod == 1.0, -float(beta), np.log1p(np.expm1(-beta) * prod))
