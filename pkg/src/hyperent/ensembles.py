"""Random-hypergraph ensembles: sampling, exhaustive enumeration, moments.

An ensemble is a universe of candidate edges plus an independent
inclusion probability p per edge (default 1/2).  Exhaustive enumeration
visits every subset of the universe once; Monte Carlo draws subsets
from the documented counter-based stream so runs are reproducible for
a fixed (seed, worker count) and trivially parallel: worker w owns a
contiguous slice of the sample range and the child stream w.

Exhaustive moments are exact: purity numerators are integers
accumulated over the common denominator 2^(2N), subset weights are
exact rationals, and floats appear only in entropy (log) values.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import gf2
from .hypergraph import Bipartition, Edge, Hypergraph, all_k_edges, scatter_table
from .rng import CounterRng, child_seed, stream_block, threshold_u64

DEFAULT_ENUMERATION_CAP_BITS = 26
_MC_CHUNK = 4096


class Family(enum.Enum):
    CZ = "cz"
    CCZ = "ccz"
    CCZ_HALF = "ccz-half"
    K_UNIFORM = "k-uniform"


class Scope(enum.Enum):
    ALL_EDGES = "all"
    CROSS_ONLY = "cross"


class Method(enum.Enum):
    RANK = "rank"
    STATE_VECTOR = "statevector"


class EnumerationCapError(ValueError):
    """Requested exhaustive enumeration exceeds the subset cap."""


@dataclass(frozen=True)
class EnsembleSpec:
    """Which gates may fire, where, and with what probability."""

    n_qubits: int
    family: Family
    k: int | None = None
    edge_probability: Fraction = Fraction(1, 2)
    scope: Scope = Scope.CROSS_ONLY

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        p = Fraction(self.edge_probability)
        object.__setattr__(self, "edge_probability", p)
        if not 0 <= p <= 1:
            raise ValueError(f"edge probability {p} out of [0, 1]")
        if self.family is Family.K_UNIFORM:
            if self.k is None or not 1 <= self.k <= self.n_qubits:
                raise ValueError("k-uniform family needs 1 <= k <= n")
        elif self.k is not None and self.k != self.edge_arity:
            raise ValueError(f"family {self.family.value} fixes edge arity, got k={self.k}")

    @property
    def edge_arity(self) -> int:
        if self.family is Family.CZ:
            return 2
        if self.family in (Family.CCZ, Family.CCZ_HALF):
            return 3
        return self.k


@dataclass(frozen=True)
class MomentEstimate:
    """Mean/variance of a per-state quantity, exact or sampled.

    Exhaustive results carry exact rationals and zero standard errors;
    Monte Carlo results use the unbiased sample variance and a
    normal-approximation std error for the variance (a rough figure:
    purity distributions are markedly skewed).
    """

    mean: Fraction | float
    second_moment: Fraction | float
    variance: Fraction | float
    std_error_mean: float
    std_error_variance: float
    samples: int
    exact: bool

    @property
    def mean_float(self) -> float:
        return float(self.mean)

    @property
    def variance_float(self) -> float:
        return float(self.variance)


@dataclass(frozen=True)
class EntropyStats:
    """Per-state entropy statistics next to the purity statistics.

    ``entropy.mean`` averages -log2(P) per state; that is not the same
    number as -log2 of the average purity, so both are reported.
    """

    entropy: MomentEstimate
    purity: MomentEstimate

    @property
    def minus_log2_mean_purity(self) -> float:
        return -math.log2(float(self.purity.mean))


def edge_universe(spec: EnsembleSpec, part: Bipartition | None = None) -> list[Edge]:
    """Candidate edges of the ensemble, in lexicographic order."""
    n = spec.n_qubits
    if part is not None and part.n_qubits != n:
        raise ValueError("bipartition size does not match the ensemble")
    if spec.family is Family.CCZ_HALF:
        if part is None:
            raise ValueError("the restricted 3-edge family needs a bipartition")
        if part.n_b < 2:
            raise ValueError("the restricted 3-edge family needs >= 2 complement qubits")
        edges = []
        for i in part.a_indices:
            b = part.b_indices
            for x in range(len(b)):
                for y in range(x + 1, len(b)):
                    edges.append(tuple(sorted((i, b[x], b[y]))))
        return sorted(edges)
    universe = all_k_edges(n, spec.edge_arity)
    if spec.scope is Scope.ALL_EDGES:
        return universe
    if part is None:
        raise ValueError("cross-only scope needs a bipartition")
    a = part.a_mask
    return [e for e in universe if any(a >> v & 1 for v in e) and not all(a >> v & 1 for v in e)]


def sample_hypergraph(spec: EnsembleSpec, part: Bipartition | None, rng: CounterRng) -> Hypergraph:
    """One random hypergraph: each universe edge kept independently with prob p.

    Consumes exactly len(edge_universe(spec, part)) draws, in universe order.
    """
    universe = edge_universe(spec, part)
    keep = rng.bernoulli(spec.edge_probability, len(universe))
    return Hypergraph(spec.n_qubits, frozenset(e for e, b in zip(universe, keep) if b))


def subset_weight(spec: EnsembleSpec, present: int, absent: int) -> Fraction:
    p = spec.edge_probability
    return p**present * (1 - p) ** absent


def enumerate_ensemble(
    spec: EnsembleSpec,
    part: Bipartition | None = None,
    cap_bits: int = DEFAULT_ENUMERATION_CAP_BITS,
):
    """Yield every (hypergraph, weight) of the ensemble exactly once.

    Weights sum to exactly 1.  Subset i of the universe maps edge j to
    bit j of i, so the visiting order is reproducible.
    """
    universe = edge_universe(spec, part)
    u = len(universe)
    if u > cap_bits:
        raise EnumerationCapError(f"universe of {u} edges exceeds the 2^{cap_bits}-subset cap")
    for mask in range(1 << u):
        edges = frozenset(universe[j] for j in range(u) if mask >> j & 1)
        c = mask.bit_count()
        yield Hypergraph(spec.n_qubits, edges), subset_weight(spec, c, u - c)


def _resolve_method(spec: EnsembleSpec, method: Method | None) -> Method:
    if method is None:
        return Method.RANK if spec.edge_arity == 2 else Method.STATE_VECTOR
    if method is Method.RANK and spec.edge_arity != 2:
        raise ValueError("the rank method applies only to 2-edge families")
    return method


def _cross_edge_layout(universe: list[Edge], part: Bipartition):
    """(edge index, matrix row, matrix col) for each cut-crossing 2-edge."""
    row_of = {v: i for i, v in enumerate(part.a_indices)}
    col_of = {v: j for j, v in enumerate(part.b_indices)}
    layout = []
    for idx, (u, v) in enumerate(universe):
        if u in row_of and v in col_of:
            layout.append((idx, row_of[u], col_of[v]))
        elif v in row_of and u in col_of:
            layout.append((idx, row_of[v], col_of[u]))
    return layout


def _masks_to_cut_words(
    bits: np.ndarray, layout, n_rows: int, n_cols: int
) -> np.ndarray:
    """Scatter per-edge bits (batch, universe) into packed cut matrices."""
    batch = bits.shape[0]
    words = np.zeros((batch, n_rows, (n_cols + 63) >> 6), dtype=np.uint64)
    for idx, r, c in layout:
        words[:, r, c >> 6] |= bits[:, idx].astype(np.uint64) << np.uint64(c & 63)
    return words


def _exact_sum(arr: np.ndarray) -> int:
    return int(arr.astype(object).sum()) if arr.size else 0


class _StateVectorKernel:
    """Vectorized exact purity numerators for batches of universe subsets.

    Precomputes, per basis state, the word of universe edges firing on
    it; a subset's sign bit at x is then popcount(mask & fire[x]) mod 2.
    Limited to universes of <= 62 edges, which the enumeration cap
    already guarantees.
    """

    def __init__(self, universe: list[Edge], n: int, part: Bipartition):
        if len(universe) > 62:
            raise ValueError("state-vector subset kernel limited to 62 universe edges")
        self.part = part if part.n_a <= part.n_b else part.complement()
        self.n = n
        d = 1 << n
        x = np.arange(d, dtype=np.int64)
        fire = np.zeros(d, dtype=np.uint64)
        for j, e in enumerate(universe):
            m = 0
            for v in e:
                m |= 1 << v
            fire |= ((x & m) == m).astype(np.uint64) << np.uint64(j)
        row_scatter = scatter_table(self.part.a_mask, n)
        col_scatter = scatter_table(self.part.b_mask, n)
        order = (row_scatter[:, np.newaxis] | col_scatter[np.newaxis, :]).ravel()
        self.fire_ab = fire[order]
        self.d_a = self.part.d_a
        self.d_b = self.part.d_b
        self.pad_bytes = (((self.d_b + 63) >> 6) << 3)

    def batch_size(self) -> int:
        per_sample = max(self.d_a * self.d_b, self.d_a * self.d_a * (self.pad_bytes >> 3))
        return max(1, (1 << 21) // per_sample)

    def numerators(self, masks: np.ndarray) -> np.ndarray:
        """Exact 2^(2N) * purity for each subset mask, as int64."""
        bits = (np.bitwise_count(masks[:, np.newaxis] & self.fire_ab[np.newaxis, :]) & 1).astype(
            np.uint8
        )
        b = bits.reshape(-1, self.d_a, self.d_b)
        packed8 = np.zeros((b.shape[0], self.d_a, self.pad_bytes), dtype=np.uint8)
        packed8[:, :, : (self.d_b + 7) >> 3] = np.packbits(b, axis=2, bitorder="little")
        rows = packed8.reshape(b.shape[0], self.d_a, -1).view(np.uint64)
        xor = rows[:, :, np.newaxis, :] ^ rows[:, np.newaxis, :, :]
        h = np.bitwise_count(xor).sum(axis=3, dtype=np.int64)
        diff = self.d_b - 2 * h
        return np.sum(diff * diff, axis=(1, 2), dtype=np.int64)


def _exhaustive_groups(spec: EnsembleSpec, part: Bipartition, method: Method, cap_bits: int):
    """Per edge-count groups of exact integer statistics over all subsets.

    Returns (u, groups) where groups maps edge count c to a dict with
    the subset count and the integer sums needed by the moment and
    entropy reducers.
    """
    universe = edge_universe(spec, part)
    u = len(universe)
    if u > cap_bits:
        raise EnumerationCapError(f"universe of {u} edges exceeds the 2^{cap_bits}-subset cap")
    n = spec.n_qubits
    groups: dict[int, dict] = {
        c: {"count": 0, "num": 0, "num_sq": 0, "rank": {}, "s2": 0.0, "s2_sq": 0.0}
        for c in range(u + 1)
    }
    total = 1 << u
    if method is Method.RANK:
        layout = _cross_edge_layout(universe, part)
        chunk = max(1, (1 << 22) // max(1, part.n_a * ((part.n_b + 63) >> 6) * 8))
    else:
        kernel = _StateVectorKernel(universe, n, part)
        chunk = kernel.batch_size()
    for lo in range(0, total, chunk):
        hi = min(total, lo + chunk)
        masks = np.arange(lo, hi, dtype=np.uint64)
        counts = np.bitwise_count(masks).astype(np.int64)
        if method is Method.RANK:
            bits = ((masks[:, np.newaxis] >> np.arange(u, dtype=np.uint64)) & 1).astype(np.uint8)
            words = _masks_to_cut_words(bits, layout, part.n_a, part.n_b)
            ranks = gf2.batch_rank(words, part.n_b)
            for c in np.unique(counts):
                sel = counts == c
                g = groups[int(c)]
                g["count"] += int(sel.sum())
                vals, cnts = np.unique(ranks[sel], return_counts=True)
                for r, k in zip(vals.tolist(), cnts.tolist()):
                    g["rank"][r] = g["rank"].get(r, 0) + k
        else:
            nums = kernel.numerators(masks)
            s2 = 2 * n - np.log2(nums)
            for c in np.unique(counts):
                sel = counts == c
                g = groups[int(c)]
                g["count"] += int(sel.sum())
                g["num"] += _exact_sum(nums[sel])
                g["num_sq"] += _exact_sum(nums[sel].astype(object) ** 2)
                g["s2"] += float(np.sum(s2[sel]))
                g["s2_sq"] += float(np.sum(s2[sel] ** 2))
    return u, groups


def exact_moments(
    spec: EnsembleSpec,
    part: Bipartition,
    method: Method | None = None,
    cap_bits: int = DEFAULT_ENUMERATION_CAP_BITS,
) -> MomentEstimate:
    """Exact purity mean and variance by full enumeration of the ensemble."""
    meth = _resolve_method(spec, method)
    u, groups = _exhaustive_groups(spec, part, meth, cap_bits)
    n = spec.n_qubits
    mean = Fraction(0)
    second = Fraction(0)
    for c, g in groups.items():
        if g["count"] == 0:
            continue
        w = subset_weight(spec, c, u - c)
        if meth is Method.RANK:
            for r, k in g["rank"].items():
                mean += w * k * Fraction(1, 1 << r)
                second += w * k * Fraction(1, 1 << (2 * r))
        else:
            mean += w * Fraction(g["num"], 1 << (2 * n))
            second += w * Fraction(g["num_sq"], 1 << (4 * n))
    variance = second - mean * mean
    assert variance >= 0
    return MomentEstimate(mean, second, variance, 0.0, 0.0, 1 << u, True)


def _population_estimate(mean, second) -> tuple:
    variance = second - mean * mean
    return mean, second, variance


def _mc_estimate(n: int, total: float, total_sq: float) -> MomentEstimate:
    mean = total / n
    second = total_sq / n
    variance = max(0.0, (second - mean * mean) * (n / (n - 1)))
    std_error_mean = math.sqrt(variance / n)
    std_error_variance = variance * math.sqrt(2.0 / (n - 1))
    return MomentEstimate(mean, second, variance, std_error_mean, std_error_variance, n, False)


def _worker_chunks(samples: int, workers: int) -> list[int]:
    base, extra = divmod(samples, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _stream_worker(args) -> tuple[int, float, float, float, float]:
    """Per-worker sampling: returns (n, sum P, sum P^2, sum S2, sum S2^2)."""
    spec, part, count, wseed, method = args
    universe = edge_universe(spec, part)
    u = len(universe)
    n = spec.n_qubits
    thr = threshold_u64(spec.edge_probability)
    always = thr >= 1 << 64
    if method is Method.RANK:
        layout = _cross_edge_layout(universe, part)
    else:
        oriented = part if part.n_a <= part.n_b else part.complement()
        d_a, d_b = oriented.d_a, oriented.d_b
        a_scatter = scatter_table(oriented.a_mask, n)
        b_scatter = scatter_table(oriented.b_mask, n)
        u_stack = np.zeros((u, d_a), dtype=np.float32)
        v_stack = np.zeros((u, d_b), dtype=np.float32)
        for j, e in enumerate(universe):
            ma = mb = 0
            for v in e:
                ma |= (1 << v) & oriented.a_mask
                mb |= (1 << v) & oriented.b_mask
            u_stack[j] = (a_scatter & ma) == ma
            v_stack[j] = (b_scatter & mb) == mb
        pad = ((d_b + 63) >> 6) << 3
    sums = [0, 0.0, 0.0, 0.0, 0.0]
    done = 0
    while done < count:
        take = min(_MC_CHUNK, count - done)
        draws = stream_block(wseed, done * u, take * u).reshape(take, u)
        bits = np.ones((take, u), dtype=bool) if always else draws < np.uint64(thr)
        if method is Method.RANK:
            words = _masks_to_cut_words(bits.astype(np.uint8), layout, part.n_a, part.n_b)
            ranks = gf2.batch_rank(words, part.n_b)
            p = np.ldexp(1.0, -ranks)
            s2 = ranks.astype(np.float64)
        else:
            nums = np.empty(take, dtype=np.int64)
            weights = bits.astype(np.float32)
            for i in range(take):
                counts = (u_stack * weights[i][:, np.newaxis]).T @ v_stack
                parity = counts.astype(np.int64) & 1
                packed8 = np.zeros((d_a, pad), dtype=np.uint8)
                packed8[:, : (d_b + 7) >> 3] = np.packbits(
                    parity.astype(np.uint8), axis=1, bitorder="little"
                )
                rows = packed8.view(np.uint64)
                xor = rows[:, np.newaxis, :] ^ rows[np.newaxis, :, :]
                h = np.bitwise_count(xor).sum(axis=2, dtype=np.int64)
                diff = d_b - 2 * h
                nums[i] = np.sum(diff * diff, dtype=np.int64)
            p = nums.astype(np.float64) * math.ldexp(1.0, -2 * n)
            s2 = 2 * n - np.log2(nums)
        sums[0] += take
        sums[1] += float(np.sum(p))
        sums[2] += float(np.sum(p * p))
        sums[3] += float(np.sum(s2))
        sums[4] += float(np.sum(s2 * s2))
        done += take
    return tuple(sums)


def _run_sampling(spec, part, samples, seed, method, workers):
    if workers < 1:
        raise ValueError("workers must be >= 1")
    args = [
        (spec, part, count, child_seed(seed, w), method)
        for w, count in enumerate(_worker_chunks(samples, workers))
        if count
    ]
    if len(args) <= 1 or workers == 1:
        results = [_stream_worker(a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_stream_worker, args))
    merged = [0, 0.0, 0.0, 0.0, 0.0]
    for r in results:
        for i in range(5):
            merged[i] += r[i]
    return merged


def mc_moments(
    spec: EnsembleSpec,
    part: Bipartition,
    samples: int,
    seed: int,
    method: Method | None = None,
    workers: int = 1,
) -> MomentEstimate:
    """Monte Carlo purity moments; deterministic for fixed (seed, workers)."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    meth = _resolve_method(spec, method)
    n, p_sum, p2_sum, _, _ = _run_sampling(spec, part, samples, seed, meth, workers)
    return _mc_estimate(n, p_sum, p2_sum)


def entropy_stats(
    spec: EnsembleSpec,
    part: Bipartition,
    samples: int | None = None,
    seed: int = 0,
    method: Method | None = None,
    workers: int = 1,
    cap_bits: int = DEFAULT_ENUMERATION_CAP_BITS,
) -> EntropyStats:
    """Entropy statistics (per-state -log2 P) beside the purity statistics.

    ``samples=None`` enumerates exhaustively; rank-method entropies are
    integers, so their exhaustive mean and variance are exact rationals.
    """
    meth = _resolve_method(spec, method)
    if samples is None:
        u, groups = _exhaustive_groups(spec, part, meth, cap_bits)
        n = spec.n_qubits
        p_mean = Fraction(0)
        p_second = Fraction(0)
        s_mean = Fraction(0) if meth is Method.RANK else 0.0
        s_second = Fraction(0) if meth is Method.RANK else 0.0
        for c, g in groups.items():
            if g["count"] == 0:
                continue
            w = subset_weight(spec, c, u - c)
            if meth is Method.RANK:
                for r, k in g["rank"].items():
                    p_mean += w * k * Fraction(1, 1 << r)
                    p_second += w * k * Fraction(1, 1 << (2 * r))
                    s_mean += w * k * r
                    s_second += w * k * r * r
            else:
                p_mean += w * Fraction(g["num"], 1 << (2 * n))
                p_second += w * Fraction(g["num_sq"], 1 << (4 * n))
                s_mean += float(w) * g["s2"]
                s_second += float(w) * g["s2_sq"]
        size = 1 << u
        purity = MomentEstimate(
            p_mean, p_second, p_second - p_mean * p_mean, 0.0, 0.0, size, True
        )
        s_var = s_second - s_mean * s_mean
        entropy = MomentEstimate(s_mean, s_second, s_var, 0.0, 0.0, size, True)
        return EntropyStats(entropy, purity)
    if samples < 2:
        raise ValueError("need at least 2 samples")
    n, p_sum, p2_sum, s_sum, s2_sum = _run_sampling(spec, part, samples, seed, meth, workers)
    return EntropyStats(_mc_estimate(n, s_sum, s2_sum), _mc_estimate(n, p_sum, p2_sum))
