"""Parameter-region predicates and empirical verifiers.

Three left-hand sides, each compared to 1:

    lhs_13 = min(4 beta, 1) (p-1) p alpha          (pure-state region)
    lhs_14 = (1/2)(e^beta - 1)(p-1) p alpha        (contraction region)
    lhs_15 = (p-1) p alpha beta exp(2 beta + alpha p (e^{2 beta} - 1))

plus the small-connectivity predicate (p-1) p alpha < 1.  The scan
confirms numerically that whenever lhs_13 < 1, at least one of the two
fallback predicates holds.  The Lipschitz and contraction verifiers
check the bound underlying lhs_14: the cavity map moves by at most
(1/2)(e^beta - 1) per unit of total input movement, and one coupled
population update shrinks Wasserstein distance by at most lhs_14 in
expectation.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .metrics import wasserstein_1d

__all__ = [
    "RATIO_TOLERANCE",
    "RegionReport",
    "LipschitzResult",
    "ContractionResult",
    "region_check",
    "default_scan_grid",
    "inclusion_scan",
    "lipschitz_test",
    "contraction_test",
]

# Distinguishes rounding from logic errors in the ratio tests.
RATIO_TOLERANCE = 1e-9

_LOG_LHS_CAP = math.log(1e300)


@dataclass(frozen=True)
class RegionReport:
    p: int
    alpha: float
    beta: float
    lhs_13: float
    pass_13: bool
    lhs_14: float
    pass_14: bool
    lhs_15: float
    pass_15: bool
    pass_small_alpha: bool

    def to_dict(self):
        return {
            "p": self.p,
            "alpha": self.alpha,
            "beta": self.beta,
            "lhs_13": self.lhs_13,
            "pass_13": self.pass_13,
            "lhs_14": self.lhs_14,
            "pass_14": self.pass_14,
            "lhs_15": self.lhs_15,
            "pass_15": self.pass_15,
            "pass_small_alpha": self.pass_small_alpha,
        }


def _lhs_15(p, alpha, beta):
    """(p-1) p alpha beta exp(2 beta + alpha p (e^{2 beta} - 1)), log-space.

    The exponent grows like e^{2 beta}; evaluating the logarithm first
    and capping keeps the reported value finite.
    """
    base = (p - 1) * p * alpha * beta
    if base == 0.0:
        return 0.0
    log_lhs = math.log(base) + 2.0 * beta + alpha * p * math.expm1(2.0 * beta)
    return math.exp(min(log_lhs, _LOG_LHS_CAP))


def region_check(params):
    """Evaluate all region left-hand sides for one parameter point."""
    p, alpha, beta = params.p, params.alpha, params.beta
    pp_alpha = (p - 1) * p * alpha
    lhs_13 = min(4.0 * beta, 1.0) * pp_alpha
    lhs_14 = 0.5 * math.expm1(beta) * pp_alpha
    lhs_15 = _lhs_15(p, alpha, beta)
    return RegionReport(
        p=p,
        alpha=alpha,
        beta=beta,
        lhs_13=lhs_13,
        pass_13=lhs_13 < 1.0,
        lhs_14=lhs_14,
        pass_14=lhs_14 < 1.0,
        lhs_15=lhs_15,
        pass_15=lhs_15 < 1.0,
        pass_small_alpha=pp_alpha < 1.0,
    )


def default_scan_grid():
    p_values = (2, 3, 4, 5, 6)
    alphas = np.logspace(-3.0, 1.0, 81)
    betas = np.arange(0.01, 4.0 + 1e-12, 0.01)
    return p_values, alphas, betas


def inclusion_scan(p_values=None, alphas=None, betas=None):
    """Wherever lhs_13 < 1, assert (p-1) p alpha < 1 or lhs_15 < 1.

    Returns the list of counterexample points (expected empty).
    """
    if p_values is None or alphas is None or betas is None:
        dp, da, db = default_scan_grid()
        p_values = p_values if p_values is not None else dp
        alphas = alphas if alphas is not None else da
        betas = betas if betas is not None else db
    alphas = np.asarray(alphas, dtype=np.float64)
    betas = np.asarray(betas, dtype=np.float64)
    violations = []
    for p in p_values:
        pp_alpha = (p - 1) * p * alphas[:, None]
        lhs_13 = np.minimum(4.0 * betas[None, :], 1.0) * pp_alpha
        in_region = lhs_13 < 1.0
        small_alpha = np.broadcast_to(pp_alpha < 1.0, in_region.shape)
        # log of lhs_15; -inf where the prefactor vanishes
        with np.errstate(divide="ignore"):
            log_15 = (
                np.log(pp_alpha * betas[None, :])
                + 2.0 * betas[None, :]
                + alphas[:, None] * p * np.expm1(2.0 * betas[None, :])
            )
        ok = small_alpha | (log_15 < 0.0)
        bad = in_region & ~ok
        for ia, ib in zip(*np.nonzero(bad)):
            violations.append(
                {
                    "p": int(p),
                    "alpha": float(alphas[ia]),
                    "beta": float(betas[ib]),
                    "lhs_13": float(lhs_13[ia, ib]),
                    "log_lhs_15": float(log_15[ia, ib]),
                }
            )
    return violations


@dataclass(frozen=True)
class LipschitzResult:
    max_ratio: float
    violations: int
    n_trials: int
    n_skipped: int

    def to_dict(self):
        return {
            "max_ratio": self.max_ratio,
            "violations": self.violations,
            "n_trials": self.n_trials,
            "n_skipped": self.n_skipped,
        }


def _map_outputs(offsets, signs, zvals, beta):
    a_plus, a_minus = kernels.cavity_fields(offsets, signs, zvals, math.expm1(-beta))
    return np.tanh(0.5 * (a_plus - a_minus))


def lipschitz_test(params, r_max, n_trials, rng):
    """Ratio of map movement to (1/2)(e^beta - 1) * total input movement.

    Per trial: one clause count r in [1, r_max], shared signs, and two
    independent uniform input arrays.  Trials with identical inputs are
    skipped (0/0).  The bound holds for every input, so any ratio above
    1 + RATIO_TOLERANCE counts as a violation.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    r_counts = rng.integers(1, r_max + 1, size=n_trials)
    offsets = np.zeros(n_trials + 1, dtype=np.int64)
    np.cumsum(r_counts, out=offsets[1:])
    total = int(offsets[-1])
    signs = (rng.integers(0, 2, size=(total, params.p)) * 2 - 1).astype(np.float64)
    sig_a = rng.uniform(-1.0, 1.0, size=(total, params.p - 1))
    sig_b = rng.uniform(-1.0, 1.0, size=(total, params.p - 1))
    out_a = _map_outputs(offsets, signs, sig_a, params.beta)
    out_b = _map_outputs(offsets, signs, sig_b, params.beta)
    trial = np.repeat(np.arange(n_trials), r_counts)
    movement = np.bincount(
        trial, weights=np.abs(sig_a - sig_b).sum(axis=1), minlength=n_trials
    )
    denom = 0.5 * math.expm1(params.beta) * movement
    keep = denom > 0.0
    if params.beta == 0.0:
        # numerator is identically 0; report ratio 0 over all trials
        return LipschitzResult(0.0, 0, n_trials, int((~keep).sum()))
    ratios = np.abs(out_a - out_b)[keep] / denom[keep]
    n_skipped = int((~keep).sum())
    if ratios.size == 0:
        return LipschitzResult(0.0, 0, n_trials, n_skipped)
    max_ratio = float(ratios.max())
    violations = int((ratios > 1.0 + RATIO_TOLERANCE).sum())
    return LipschitzResult(max_ratio, violations, n_trials, n_skipped)


@dataclass(frozen=True)
class ContractionResult:
    """Wasserstein ratios per coupled pair plus the paired-movement ratio.

    ``ratios`` holds W(T(P), T(Q)) / W(P, Q); ``coupled_ratios`` holds
    mean_i |T(P)_i - T(Q)_i| / W(P, Q), the direct empirical form of the
    coupling inequality (it upper-bounds the W ratio).  Both means must
    sit below bound + slack.
    """

    ratios: list
    coupled_ratios: list
    mean_ratio: float
    mean_coupled_ratio: float
    bound: float
    slack: float
    n_skipped: int

    @property
    def within_bound(self):
        return (
            self.mean_ratio <= self.bound + self.slack
            and self.mean_coupled_ratio <= self.bound + self.slack
        )

    def to_dict(self):
        return {
            "ratios": self.ratios,
            "coupled_ratios": self.coupled_ratios,
            "mean_ratio": self.mean_ratio,
            "mean_coupled_ratio": self.mean_coupled_ratio,
            "bound": self.bound,
            "slack": self.slack,
            "within_bound": self.within_bound,
            "n_skipped": self.n_skipped,
        }


def _coupled_step(members_a, members_b, params, rng):
    """One population update applied to both inputs with shared randomness.

    Both populations are sorted first, so the shared index draws sample
    pairs from the monotone coupling -- the optimal 1-D coupling.  The
    Poisson counts, signs, and indices are identical across the two
    updates; only the member values differ.
    """
    size = members_a.shape[0]
    sorted_a = np.sort(members_a)
    sorted_b = np.sort(members_b)
    r_counts = rng.poisson(params.alpha * params.p, size=size)
    offsets = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(r_counts, out=offsets[1:])
    total = int(offsets[-1])
    signs = (rng.integers(0, 2, size=(total, params.p)) * 2 - 1).astype(np.float64)
    z_idx = rng.integers(0, size, size=(total, params.p - 1))
    out_a = _map_outputs(offsets, signs, sorted_a[z_idx], params.beta)
    out_b = _map_outputs(offsets, signs, sorted_b[z_idx], params.beta)
    return out_a, out_b


def contraction_test(params, size, n_pairs, rng, pair_kind="delta"):
    """Per-pair Wasserstein ratio W(T(P), T(Q)) / W(P, Q) under coupling.

    pair_kind 'delta' starts every pair from the point masses at +1 and
    -1 (maximal distance 2); 'uniform' draws two fresh uniform
    populations; 'identical' feeds the same population to both sides.
    Pairs with negligible initial distance are skipped (0/0), so
    'identical' pairs only exercise the skip path.
    The mean ratio is compared against lhs_14 plus sampling slack
    5 / sqrt(size); per-pair ratios may exceed the bound on unlucky
    draws, so only the mean is constrained.
    """
    if size < 2:
        raise ValueError("population size must be >= 2")
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    report = region_check(params)
    ratios = []
    coupled_ratios = []
    n_skipped = 0
    for _ in range(n_pairs):
        pair_rng = rng.spawn(1)[0]
        if pair_kind == "delta":
            members_a = np.ones(size)
            members_b = -np.ones(size)
        elif pair_kind == "uniform":
            members_a = pair_rng.uniform(-1.0, 1.0, size=size)
            members_b = pair_rng.uniform(-1.0, 1.0, size=size)
        elif pair_kind == "identical":
            members_a = pair_rng.uniform(-1.0, 1.0, size=size)
            members_b = members_a.copy()
        else:
            raise ValueError(f"unknown pair_kind {pair_kind!r}")
        dist_before = wasserstein_1d(members_a, members_b).value
        if dist_before < 10.0 * np.finfo(np.float64).eps:
            n_skipped += 1
            continue
        out_a, out_b = _coupled_step(members_a, members_b, params, pair_rng)
        dist_after = wasserstein_1d(out_a, out_b).value
        ratios.append(dist_after / dist_before)
        coupled_ratios.append(float(np.mean(np.abs(out_a - out_b))) / dist_before)
    mean_ratio = float(np.mean(ratios)) if ratios else 0.0
    mean_coupled = float(np.mean(coupled_ratios)) if coupled_ratios else 0.0
    return ContractionResult(
        ratios=[float(r) for r in ratios],
        coupled_ratios=coupled_ratios,
        mean_ratio=mean_ratio,
        mean_coupled_ratio=mean_coupled,
        bound=report.lhs_14,
        slack=5.0 / math.sqrt(size),
        n_skipped=n_skipped,
    )
