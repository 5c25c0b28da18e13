"""Inner loops of the inference engine.

Each kernel has a numba implementation and a numpy implementation with the
same signature and the same summation order, so both paths produce identical
tables. The public names dispatch on ``_accel.JIT_ENABLED``.
"""

import numpy as np

from ._accel import JIT_ENABLED, njit


@njit(cache=True)
def _scatter_joint_jit(eth, out, probs, n_eth, n_out):
    table = np.zeros((n_eth, n_out))
    for i in range(probs.shape[0]):
        table[eth[i], out[i]] += probs[i]
    return table


def _scatter_joint_np(eth, out, probs, n_eth, n_out):
    table = np.zeros(n_eth * n_out)
    np.add.at(table, eth * n_out + out, probs)
    return table.reshape(n_eth, n_out)


@njit(cache=True)
def _smear_jit(mass, cols, kernel, n_out):
    n_eth, n_src = mass.shape
    table = np.zeros((n_eth, n_out))
    width = kernel.shape[0]
    for s in range(n_src):
        c0 = cols[s]
        for e in range(n_eth):
            m = mass[e, s]
            if m == 0.0:
                continue
            for k in range(width):
                table[e, c0 + k] += m * kernel[k]
    return table


def _smear_np(mass, cols, kernel, n_out):
    n_eth, n_src = mass.shape
    table = np.zeros((n_eth, n_out))
    width = kernel.shape[0]
    for s in range(n_src):
        c0 = cols[s]
        table[:, c0:c0 + width] += mass[:, s:s + 1] * kernel
    return table


@njit(cache=True)
def _count_cells_jit(eth, out, n_eth, n_out):
    counts = np.zeros((n_eth, n_out), dtype=np.int64)
    for i in range(eth.shape[0]):
        counts[eth[i], out[i]] += 1
    return counts


def _count_cells_np(eth, out, n_eth, n_out):
    flat = np.bincount(eth * n_out + out, minlength=n_eth * n_out)
    return flat.reshape(n_eth, n_out).astype(np.int64)


@njit(cache=True)
def _categorical_draws_jit(u, group, cdf):
    n = u.shape[0]
    k = cdf.shape[1]
    res = np.empty(n, dtype=np.int64)
    for i in range(n):
        row = cdf[group[i]]
        lo = 0
        hi = k
        # first index with row[idx] > u[i]
        while lo < hi:
            mid = (lo + hi) // 2
            if row[mid] <= u[i]:
                lo = mid + 1
            else:
                hi = mid
        res[i] = lo if lo < k else k - 1
    return res


def _categorical_draws_np(u, group, cdf):
    res = np.empty(u.shape[0], dtype=np.int64)
    k = cdf.shape[1]
    for g in range(cdf.shape[0]):
        sel = group == g
        res[sel] = np.searchsorted(cdf[g], u[sel], side="right")
    np.minimum(res, k - 1, out=res)
    return res


def scatter_joint(eth, out, probs, n_eth, n_out):
    """Accumulate atom probabilities into a dense (n_eth, n_out) table."""
    eth = np.ascontiguousarray(eth, dtype=np.int64)
    out = np.ascontiguousarray(out, dtype=np.int64)
    probs = np.ascontiguousarray(probs, dtype=np.float64)
    fn = _scatter_joint_jit if JIT_ENABLED else _scatter_joint_np
    return fn(eth, out, probs, int(n_eth), int(n_out))


def smear(mass, cols, kernel, n_out):
    """Spread each source column of ``mass`` over ``kernel`` starting at ``cols[s]``."""
    mass = np.ascontiguousarray(mass, dtype=np.float64)
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    fn = _smear_jit if JIT_ENABLED else _smear_np
    return fn(mass, cols, kernel, int(n_out))


def count_cells(eth, out, n_eth, n_out):
    eth = np.ascontiguousarray(eth, dtype=np.int64)
    out = np.ascontiguousarray(out, dtype=np.int64)
    fn = _count_cells_jit if JIT_ENABLED else _count_cells_np
    return fn(eth, out, int(n_eth), int(n_out))


def categorical_draws(u, group, cdf):
    """Inverse-CDF categorical draws; row ``group[i]`` of ``cdf`` is used for ``u[i]``."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    group = np.ascontiguousarray(group, dtype=np.int64)
    cdf = np.ascontiguousarray(cdf, dtype=np.float64)
    fn = _categorical_draws_jit if JIT_ENABLED else _categorical_draws_np
    return fn(u, group, cdf)


IMPLEMENTATIONS = {
    "scatter_joint": (_scatter_joint_jit, _scatter_joint_np),
    "smear": (_smear_jit, _smear_np),
    "count_cells": (_count_cells_jit, _count_cells_np),
    "categorical_draws": (_categorical_draws_jit, _categorical_draws_np),
}
