"""Independent dense-state reference implementations.

Deliberately written with a different structure from the library paths
(no bit packing, no word tricks): per-basis monomial evaluation, dense
axis-permutation reshapes, dense uint8 elimination.  These are the
oracles the fast implementations are checked against.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def ref_signs(n: int, edges) -> np.ndarray:
    """+-1 amplitudes (times 2^(n/2)) by direct monomial evaluation."""
    signs = np.ones(1 << n, dtype=np.int64)
    for x in range(1 << n):
        parity = 0
        for e in edges:
            if all(x >> v & 1 for v in e):
                parity ^= 1
        if parity:
            signs[x] = -1
    return signs


def ref_purity(n: int, edges, a_mask: int) -> Fraction:
    """Exact subsystem purity via a dense reduced density matrix."""
    signs = ref_signs(n, edges)
    psi = signs.reshape([2] * n)
    # axis j of the reshape is qubit n-1-j (numpy reshape is big-endian)
    a_axes = [n - 1 - q for q in range(n) if a_mask >> q & 1]
    b_axes = [n - 1 - q for q in range(n) if not a_mask >> q & 1]
    d_a = 1 << len(a_axes)
    mat = np.transpose(psi, a_axes + b_axes).reshape(d_a, -1)
    scaled_rho = mat @ mat.T  # 2^n * rho_A, integer entries
    return Fraction(int(np.sum(scaled_rho.astype(object) ** 2)), 1 << (2 * n))


def ref_gf2_rank(dense) -> int:
    """Dense column-sweep elimination over GF(2)."""
    m = (np.array(dense, dtype=np.uint8) % 2).copy()
    if m.size == 0:
        return 0
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if m[i, c]:
                pivot = i
                break
        if pivot is None:
            continue
        m[[r, pivot]] = m[[pivot, r]]
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] ^= m[r]
        r += 1
        if r == rows:
            break
    return r


def ref_subsets(universe):
    """Every subset of an edge list, as tuples, in mask order."""
    for mask in range(1 << len(universe)):
        yield tuple(e for j, e in enumerate(universe) if mask >> j & 1)


def ref_ensemble_moments(n: int, universe, a_mask: int, p: Fraction):
    """Exact (mean, variance) of purity over all subsets of the universe."""
    mean = Fraction(0)
    second = Fraction(0)
    u = len(universe)
    for edges in ref_subsets(universe):
        w = p ** len(edges) * (1 - p) ** (u - len(edges))
        pur = ref_purity(n, edges, a_mask)
        mean += w * pur
        second += w * pur * pur
    return mean, second - mean * mean
