"""Vectorized numpy implementations of the hot kernels.

Same call signatures as ``numba_backend``; selected by the
``KSAT_CAVITY_BACKEND`` environment variable.
"""

import numpy as np

__all__ = ["cavity_fields", "violation_counts", "gibbs_sums"]

_CHUNK = 1 << 16


def cavity_fields(offsets, signs, zvals, em1):
    """Accumulate the two-branch cavity fields A(+1), A(-1) per unit.

    Each row k of ``signs`` (shape (C, p)) and ``zvals`` (shape (C, p-1))
    is one clause; rows [offsets[i], offsets[i+1]) belong to unit i.  The
    clause term is log1p(em1 * prod_j (1 + J_j z_j)/2 * (1 +- J_p)/2) with
    em1 = exp(-beta) - 1.

    Returns (a_plus, a_minus), each of shape (n_units,).
    """
    n_units = offsets.shape[0] - 1
    if signs.shape[0] == 0:
        zero = np.zeros(n_units)
        return zero, zero.copy()
    prod = np.prod((1.0 + signs[:, :-1] * zvals) * 0.5, axis=1)
    w_plus = (1.0 + signs[:, -1]) * 0.5
    w_minus = (1.0 - signs[:, -1]) * 0.5
    term_plus = np.log1p(em1 * prod * w_plus)
    term_minus = np.log1p(em1 * prod * w_minus)
    unit = np.repeat(np.arange(n_units), np.diff(offsets))
    a_plus = np.bincount(unit, weights=term_plus, minlength=n_units)
    a_minus = np.bincount(unit, weights=term_minus, minlength=n_units)
    return a_plus, a_minus


def _violations_per_config(n_sites, sites, signs):
    """Number of violated clauses for every configuration in {-1,1}^n.

    Configurations are encoded as integers; bit b set means spin b is +1.
    A clause is violated iff every slot matches its sign, so each clause
    selects the subcube (config & mask) == pattern.  Clauses demanding two
    different spins at a duplicated site are never violated.
    """
    n_conf = 1 << n_sites
    configs = np.arange(n_conf, dtype=np.uint64)
    viol = np.zeros(n_conf, dtype=np.int32)
    for k in range(sites.shape[0]):
        required = {}
        consistent = True
        for j in range(sites.shape[1]):
            s = int(sites[k, j])
            bit = 1 if signs[k, j] > 0 else 0
            if required.setdefault(s, bit) != bit:
                consistent = False
                break
        if not consistent:
            continue
        mask = np.uint64(0)
        pattern = np.uint64(0)
        for s, bit in required.items():
            mask |= np.uint64(1 << s)
            pattern |= np.uint64(bit << s)
        viol[(configs & mask) == pattern] += 1
    return viol


def violation_counts(n_sites, sites, signs):
    """Histogram counts[v] = #configs with exactly v violated clauses."""
    viol = _violations_per_config(n_sites, sites, signs)
    return np.bincount(viol, minlength=sites.shape[0] + 1).astype(np.int64)


def gibbs_sums(n_sites, sites, signs, beta):
    """Unnormalized Gibbs sums Z, sum_sigma w*sigma_i, sum_sigma w*sigma_i*sigma_j.

    w(sigma) = exp(-beta * violations(sigma)).  The diagonal of the pair
    matrix is set to Z (sigma_i^2 = 1 identically).
    """
    viol = _violations_per_config(n_sites, sites, signs)
    w = np.exp(-beta * viol.astype(np.float64))
    z = 0.0
    s1 = np.zeros(n_sites)
    s2 = np.zeros((n_sites, n_sites))
    bit_id = np.arange(n_sites, dtype=np.uint64)
    n_conf = 1 << n_sites
    for start in range(0, n_conf, _CHUNK):
        stop = min(start + _CHUNK, n_conf)
        configs = np.arange(start, stop, dtype=np.uint64)
        spins = (((configs[:, None] >> bit_id) & np.uint64(1)) * 2.0 - 1.0)
        wc = w[start:stop]
        z += wc.sum()
        s1 += spins.T @ wc
        s2 += spins.T @ (spins * wc[:, None])
    np.fill_diagonal(s2, z)
    return z, s1, s2
