"""Monte Carlo evaluation of the replica-symmetric free-energy functional.

For a measure zeta represented by a population, the functional is

    log 2 + E log Av_eps exp sum_{k <= pi(p alpha)} theta_k(z_{1,k},...,z_{p-1,k}, eps)
          - (p-1) alpha E theta(z_1,...,z_p),

with all z drawn iid from zeta.  The two-point average over eps is taken
exactly (log-add-exp of the two accumulated fields), never sampled; the
Poisson count, clause signs, and z draws are refreshed independently per
trial.  The two stochastic terms use disjoint streams, so their errors
add in quadrature.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import Estimate, mean_estimate, theta_batch

__all__ = ["RsBreakdown", "rs_eval"]

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class RsBreakdown:
    """The three terms of the functional plus their combined total."""

    log2_term: float
    cavity_term: Estimate
    correction_term: Estimate
    total: Estimate

    def to_dict(self):
        return {
            "log2_term": self.log2_term,
            "cavity_term": self.cavity_term.to_dict(),
            "correction_term": self.correction_term.to_dict(),
            "total": self.total.to_dict(),
        }


def rs_eval(pop, params, n_mc, rng):
    """Estimate the functional on a population with n_mc trials per term.

    Per-trial cavity values lie in [-beta * r_trial, 0] and correction
    summands in [-beta, 0]; alpha = 0 or beta = 0 make both terms exactly
    zero, so the total degenerates to log 2 with zero error.
    """
    if n_mc < 100:
        raise ValueError(f"n_mc must be >= 100, got {n_mc}")
    members = pop.members
    size = members.shape[0]
    rng_cavity, rng_correction = rng.spawn(2)

    r_counts = rng_cavity.poisson(params.alpha * params.p, size=n_mc)
    offsets = np.zeros(n_mc + 1, dtype=np.int64)
    np.cumsum(r_counts, out=offsets[1:])
    total = int(offsets[-1])
    signs = (rng_cavity.integers(0, 2, size=(total, params.p)) * 2 - 1).astype(np.float64)
    z_idx = rng_cavity.integers(0, size, size=(total, params.p - 1))
    a_plus, a_minus = kernels.cavity_fields(
        offsets, signs, members[z_idx], math.expm1(-params.beta)
    )
    cavity_vals = np.logaddexp(a_plus, a_minus) - LOG2
    cavity = mean_estimate(cavity_vals)

    corr_signs = (rng_correction.integers(0, 2, size=(n_mc, params.p)) * 2 - 1).astype(
        np.float64
    )
    corr_z = members[rng_correction.integers(0, size, size=(n_mc, params.p))]
    scale = (params.p - 1) * params.alpha
    corr_vals = scale * theta_batch(corr_signs, corr_z, params.beta)
    correction = mean_estimate(corr_vals)

    total_value = LOG2 + cavity.value - correction.value
    total_se = math.hypot(cavity.std_error, correction.std_error)
    return RsBreakdown(
        log2_term=LOG2,
        cavity_term=cavity,
        correction_term=correction,
        total=Estimate(total_value, total_se, n_mc),
    )
