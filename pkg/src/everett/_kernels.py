"""Hot numeric loops: count-class enumeration, log class measures, branch tables.

Every kernel exists twice, a numba ``@njit`` loop and a vectorised numpy
version. The public names at the bottom of this module point at one or the
other depending on whether numba imports and on the ``EVERETT_DISABLE_NUMBA``
environment variable (any value other than ``""``/``"0"`` disables it). Both
paths are importable directly (``*_jit`` / ``*_np``) so the test-suite can
check them against each other and ``benchmarks/bench_kernels.py`` can time
them.
"""
from __future__ import annotations

import math
import os

import numpy as np
from scipy.special import gammaln

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("EVERETT_DISABLE_NUMBA", "") in ("", "0")


def _optional_njit(func):
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def n_compositions(n: int, m: int) -> int:
    """Number of count classes (n_1, ..., n_m) with sum n."""
    return math.comb(n + m - 1, m - 1)


# --------------------------------------------------------------------------
# compositions of n into m nonnegative parts, lexicographic in (n_1..n_{m-1})
# --------------------------------------------------------------------------

@_optional_njit
def compositions_jit(n, m):
    k = 1
    for i in range(1, m):
        k = k * (n + i) // i
    out = np.zeros((k, m), dtype=np.int64)
    c = np.zeros(m, dtype=np.int64)
    c[m - 1] = n
    for row in range(k):
        out[row, :] = c
        if m == 1:
            break
        if c[m - 1] > 0:
            c[m - 2] += 1
            c[m - 1] -= 1
            continue
        j = m - 2
        while j >= 0 and c[j] == 0:
            j -= 1
        if j <= 0:
            break
        v = c[j]
        c[j] = 0
        c[j - 1] += 1
        c[m - 1] = v - 1
    return out


def compositions_np(n: int, m: int) -> np.ndarray:
    cache: dict[tuple[int, int], np.ndarray] = {}

    def build(rem: int, parts: int) -> np.ndarray:
        key = (rem, parts)
        if key in cache:
            return cache[key]
        if parts == 1:
            arr = np.array([[rem]], dtype=np.int64)
        elif parts == 2:
            first = np.arange(rem + 1, dtype=np.int64)
            arr = np.column_stack([first, rem - first])
        else:
            blocks = []
            for k in range(rem + 1):
                tail = build(rem - k, parts - 1)
                head = np.full((tail.shape[0], 1), k, dtype=np.int64)
                blocks.append(np.hstack([head, tail]))
            arr = np.vstack(blocks)
        cache[key] = arr
        return arr

    return build(n, m).copy()


# --------------------------------------------------------------------------
# log of N!/prod(n_i!) * prod p_i^{n_i}, row by row, with 0 * log 0 = 0
# --------------------------------------------------------------------------

@_optional_njit
def log_class_measures_jit(counts, log_p):
    k, m = counts.shape
    top = 0
    for r in range(k):
        total = 0
        for i in range(m):
            total += counts[r, i]
        top = max(top, total)
    lgf = np.empty(top + 1, dtype=np.float64)
    for j in range(top + 1):
        lgf[j] = math.lgamma(j + 1.0)
    out = np.empty(k, dtype=np.float64)
    for r in range(k):
        total = 0
        acc = 0.0
        for i in range(m):
            ni = counts[r, i]
            total += ni
            if ni > 0:
                acc += ni * log_p[i] - lgf[ni]
        out[r] = acc + lgf[total]
    return out


def log_class_measures_np(counts: np.ndarray, log_p: np.ndarray) -> np.ndarray:
    counts = np.asarray(counts, dtype=np.int64)
    top = int(counts.sum(axis=1).max()) if counts.size else 0
    lgf = gammaln(np.arange(1, top + 2, dtype=np.float64))
    with np.errstate(invalid="ignore"):
        weighted = np.where(counts > 0, counts * log_p, 0.0)
    return lgf[counts.sum(axis=1)] - lgf[counts].sum(axis=1) + weighted.sum(axis=1)


# --------------------------------------------------------------------------
# exact branch tables: all m**n records in itertools.product order
# --------------------------------------------------------------------------

@_optional_njit
def branch_registers_jit(n, m):
    total = m ** n
    out = np.zeros((total, n), dtype=np.int64)
    c = np.zeros(n, dtype=np.int64)
    for row in range(total):
        out[row, :] = c
        j = n - 1
        while j >= 0:
            c[j] += 1
            if c[j] < m:
                break
            c[j] = 0
            j -= 1
    return out


def branch_registers_np(n: int, m: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((m,) * n, dtype=np.int64).reshape(n, -1).T.copy()


@_optional_njit
def branch_amplitudes_jit(coeffs, registers):
    b, n = registers.shape
    out = np.empty(b, dtype=np.complex128)
    for r in range(b):
        amp = 1.0 + 0.0j
        for j in range(n):
            amp = amp * coeffs[registers[r, j]]
        out[r] = amp
    return out


def branch_amplitudes_np(coeffs: np.ndarray, registers: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    out = np.ones(registers.shape[0], dtype=np.complex128)
    for j in range(registers.shape[1]):
        out = out * coeffs[registers[:, j]]
    return out


@_optional_njit
def register_counts_jit(registers, m):
    b, n = registers.shape
    out = np.zeros((b, m), dtype=np.int64)
    for r in range(b):
        for j in range(n):
            out[r, registers[r, j]] += 1
    return out


def register_counts_np(registers: np.ndarray, m: int) -> np.ndarray:
    return (registers[:, :, None] == np.arange(m)).sum(axis=1).astype(np.int64)


if USE_NUMBA:
    compositions = compositions_jit
    log_class_measures = log_class_measures_jit
    branch_registers = branch_registers_jit
    branch_amplitudes = branch_amplitudes_jit
    register_counts = register_counts_jit
else:
    compositions = compositions_np
    log_class_measures = log_class_measures_np
    branch_registers = branch_registers_np
    branch_amplitudes = branch_amplitudes_np
    register_counts = register_counts_np


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
