"""Numba-compiled implementations of the hot kernels.

Same call signatures as ``numpy_backend``.  ``cavity_fields`` runs the
unit loop in parallel; every unit writes only its own output slot, so the
result is bit-identical for any thread count.  The enumeration kernels
walk {-1,1}^n in Gray-code order, re-evaluating only the clauses that
touch the flipped spin.
"""

import math

import numpy as np
from numba import njit, prange

__all__ = ["cavity_fields", "violation_counts", "gibbs_sums"]


@njit(cache=True, parallel=True)
def cavity_fields(offsets, signs, zvals, em1):
    n_units = offsets.shape[0] - 1
    pm1 = zvals.shape[1]
    a_plus = np.zeros(n_units)
    a_minus = np.zeros(n_units)
    for i in prange(n_units):
        ap = 0.0
        am = 0.0
        for k in range(offsets[i], offsets[i + 1]):
            prod = 1.0
            for j in range(pm1):
                prod *= (1.0 + signs[k, j] * zvals[k, j]) * 0.5
            eps_sign = signs[k, pm1]
            ap += math.log1p(em1 * prod * (1.0 + eps_sign) * 0.5)
            am += math.log1p(em1 * prod * (1.0 - eps_sign) * 0.5)
        a_plus[i] = ap
        a_minus[i] = am
    return a_plus, a_minus


@njit(cache=True)
def _site_adjacency(n_sites, sites, signs):
    """Flatten clause slots into per-site lists (counting sort by site)."""
    m, p = sites.shape
    ptr = np.zeros(n_sites + 1, np.int64)
    for k in range(m):
        for j in range(p):
            ptr[sites[k, j] + 1] += 1
    for s in range(n_sites):
        ptr[s + 1] += ptr[s]
    adj_clause = np.empty(m * p, np.int64)
    adj_sign = np.empty(m * p, np.float64)
    fill = ptr[:-1].copy()
    for k in range(m):
        for j in range(p):
            s = sites[k, j]
            adj_clause[fill[s]] = k
            adj_sign[fill[s]] = signs[k, j]
            fill[s] += 1
    return ptr, adj_clause, adj_sign


@njit(cache=True)
def _initial_matches(sites, signs):
    """Per-clause count of slots matching the all-minus configuration."""
    m, p = sites.shape
    nmatch = np.zeros(m, np.int64)
    for k in range(m):
        for j in range(p):
            if signs[k, j] < 0.0:
                nmatch[k] += 1
    return nmatch


@njit(cache=True)
def violation_counts(n_sites, sites, signs):
    m, p = sites.shape
    ptr, adj_clause, adj_sign = _site_adjacency(n_sites, sites, signs)
    nmatch = _initial_matches(sites, signs)
    nviol = 0
    for k in range(m):
        if nmatch[k] == p:
            nviol += 1
    counts = np.zeros(m + 1, np.int64)
    counts[nviol] += 1
    sigma = np.full(n_sites, -1.0)
    n_conf = np.int64(1) << n_sites
    for t in range(1, n_conf):
        s = 0
        tt = t
        while tt & 1 == 0:
            tt >>= 1
            s += 1
        new = -sigma[s]
        sigma[s] = new
        for a in range(ptr[s], ptr[s + 1]):
            k = adj_clause[a]
            if adj_sign[a] == new:
                nmatch[k] += 1
                if nmatch[k] == p:
                    nviol += 1
            else:
                if nmatch[k] == p:
                    nviol -= 1
                nmatch[k] -= 1
        counts[nviol] += 1
    return counts


@njit(cache=True)
def gibbs_sums(n_sites, sites, signs, beta):
    m, p = sites.shape
    ptr, adj_clause, adj_sign = _site_adjacency(n_sites, sites, signs)
    nmatch = _initial_matches(sites, signs)
    nviol = 0
    for k in range(m):
        if nmatch[k] == p:
            nviol += 1
    wtable = np.empty(m + 1)
    for v in range(m + 1):
        wtable[v] = math.exp(-beta * v)
    sigma = np.full(n_sites, -1.0)
    z = 0.0
    s1 = np.zeros(n_sites)
    s2 = np.zeros((n_sites, n_sites))
    w = wtable[nviol]
    z += w
    for i in range(n_sites):
        s1[i] += w * sigma[i]
        for j in range(i + 1, n_sites):
            s2[i, j] += w * sigma[i] * sigma[j]
    n_conf = np.int64(1) << n_sites
    for t in range(1, n_conf):
        s = 0
        tt = t
        while tt & 1 == 0:
            tt >>= 1
            s += 1
        new = -sigma[s]
        sigma[s] = new
        for a in range(ptr[s], ptr[s + 1]):
            k = adj_clause[a]
            if adj_sign[a] == new:
                nmatch[k] += 1
                if nmatch[k] == p:
                    nviol += 1
            else:
                if nmatch[k] == p:
                    nviol -= 1
                nmatch[k] -= 1
        w = wtable[nviol]
        z += w
        for i in range(n_sites):
            s1[i] += w * sigma[i]
            for j in range(i + 1, n_sites):
                s2[i, j] += w * sigma[i] * sigma[j]
    for i in range(n_sites):
        s2[i, i] = z
        for j in range(i + 1, n_sites):
            s2[j, i] = s2[i, j]
    return z, s1, s2
