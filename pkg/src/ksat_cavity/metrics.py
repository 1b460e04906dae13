"""One-dimensional Wasserstein distance and population summaries.

For equal-size empirical measures on the line, sorting both samples and
averaging |a_(i) - b_(i)| gives the exact W1 distance: the sorted
(monotone) matching is the optimal coupling in one dimension.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["DistanceResult", "Summary", "QUANTILE_LEVELS", "wasserstein_1d", "summarize"]

QUANTILE_LEVELS = (1, 5, 25, 50, 75, 95, 99)


@dataclass(frozen=True)
class DistanceResult:
    value: float
    n_a: int
    n_b: int


@dataclass(frozen=True)
class Summary:
    mean: float
    sd: float
    quantiles: dict

    def to_dict(self):
        return {
            "mean": self.mean,
            "sd": self.sd,
            "quantiles": {str(q): v for q, v in self.quantiles.items()},
        }


def _members(pop):
    members = getattr(pop, "members", pop)
    return np.asarray(members, dtype=np.float64)


def wasserstein_1d(a, b):
    """Exact W1 between two equal-size empirical measures.

    Accepts Populations or plain arrays.  Unequal sizes are rejected:
    population dynamics always produces size-M generations, and the
    equal-size sorted matching is the exact optimal coupling.
    """
    ma = _members(a)
    mb = _members(b)
    if ma.size == 0 or mb.size == 0:
        raise ValueError("populations must be nonempty")
    if ma.size != mb.size:
        raise ValueError(f"size mismatch: {ma.size} vs {mb.size}")
    value = float(np.mean(np.abs(np.sort(ma) - np.sort(mb))))
    return DistanceResult(value, ma.size, mb.size)


def summarize(pop):
    """Mean, sample sd, and linearly interpolated quantiles."""
    members = _members(pop)
    if members.size == 0:
        raise ValueError("population must be nonempty")
    sd = float(members.std(ddof=1)) if members.size > 1 else 0.0
    levels = np.asarray(QUANTILE_LEVELS, dtype=np.float64) / 100.0
    qvals = np.quantile(members, levels)
    return Summary(
        mean=float(members.mean()),
        sd=sd,
        quantiles={q: float(v) for q, v in zip(QUANTILE_LEVELS, qvals)},
    )
