"""Bit-packed GF(2) matrices: rank, random sampling, rank-defect statistics.

Rows are packed 64 columns per machine word so elimination works by
word-level XOR.  ``batch_rank`` eliminates a whole stack of matrices at
once with vectorized conditional swaps, which is what makes rank
workloads of 10^5-10^6 random matrices cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .rng import CounterRng


def _n_words(cols: int) -> int:
    return (cols + 63) >> 6


@dataclass(frozen=True)
class Gf2Matrix:
    """Binary matrix; bit j of row i sits at row_words[i, j>>6], position j&63."""

    rows: int
    cols: int
    row_words: np.ndarray

    def __post_init__(self):
        shape = (self.rows, _n_words(self.cols))
        if self.row_words.dtype != np.uint64 or self.row_words.shape != shape:
            raise ValueError(f"row_words must be uint64 of shape {shape}")
        tail = self.cols & 63
        if tail and self.rows:
            if np.any(self.row_words[:, -1] >> np.uint64(tail)):
                raise ValueError("bits beyond cols must be zero")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Gf2Matrix":
        return cls(rows, cols, np.zeros((rows, _n_words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        words = np.zeros((n, _n_words(n)), dtype=np.uint64)
        for i in range(n):
            words[i, i >> 6] = np.uint64(1) << np.uint64(i & 63)
        return cls(n, n, words)

    @classmethod
    def from_dense(cls, dense) -> "Gf2Matrix":
        arr = np.asarray(dense, dtype=np.uint8) & 1
        rows, cols = arr.shape
        padded = np.zeros((rows, _n_words(cols) * 64), dtype=np.uint8)
        padded[:, :cols] = arr
        packed = np.packbits(padded, axis=1, bitorder="little")
        return cls(rows, cols, packed.view(np.uint64).reshape(rows, _n_words(cols)).copy())

    @classmethod
    def from_row_ints(cls, row_ints, cols: int) -> "Gf2Matrix":
        """Rows given as Python ints, bit j = column j."""
        rows = len(row_ints)
        words = np.zeros((rows, _n_words(cols)), dtype=np.uint64)
        for i, r in enumerate(row_ints):
            if r >> cols:
                raise ValueError(f"row {i} has bits beyond {cols} columns")
            for w in range(_n_words(cols)):
                words[i, w] = (r >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
        return cls(rows, cols, words)

    def get(self, i: int, j: int) -> int:
        return int(self.row_words[i, j >> 6] >> np.uint64(j & 63) & np.uint64(1))

    def to_dense(self) -> np.ndarray:
        bits = np.unpackbits(self.row_words.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.cols]

    def transpose(self) -> "Gf2Matrix":
        return Gf2Matrix.from_dense(self.to_dense().T)


def rank(m: Gf2Matrix) -> int:
    """GF(2) rank by Gaussian elimination on a scratch copy."""
    ranks = batch_rank(m.row_words[np.newaxis, :, :], m.cols)
    return int(ranks[0])


def batch_rank(words: np.ndarray, cols: int) -> np.ndarray:
    """Ranks of a stack of packed matrices, shape (batch, rows, words).

    One pass over the columns; per column the pivot search, conditional
    swap and XOR elimination run across the whole batch at once.  Input
    is not modified.
    """
    if words.ndim != 3:
        raise ValueError("expected (batch, rows, words) uint64")
    work = words.astype(np.uint64, copy=True)
    batch, n_rows, _ = work.shape
    if batch == 0 or n_rows == 0 or cols == 0:
        return np.zeros(batch, dtype=np.int64)
    ranks = np.zeros(batch, dtype=np.int64)
    row_ids = np.arange(n_rows)
    batch_ids = np.arange(batch)
    for col in range(cols):
        w, b = divmod(col, 64)
        bit = np.uint64(1) << np.uint64(b)
        has = (work[:, :, w] & bit) != 0
        avail = has & (row_ids[np.newaxis, :] >= ranks[:, np.newaxis])
        piv = np.argmax(avail, axis=1)
        found = avail[batch_ids, piv]
        cur = np.minimum(ranks, n_rows - 1)
        piv = np.where(found, piv, cur)
        piv_rows = work[batch_ids, piv, :].copy()
        cur_rows = work[batch_ids, cur, :].copy()
        work[batch_ids, piv, :] = cur_rows
        work[batch_ids, cur, :] = piv_rows
        elim = ((work[:, :, w] & bit) != 0) & (row_ids[np.newaxis, :] > cur[:, np.newaxis])
        elim &= found[:, np.newaxis]
        work ^= np.where(elim[:, :, np.newaxis], piv_rows[:, np.newaxis, :], np.uint64(0))
        ranks += found
        if ranks.min() == n_rows:
            break
    return ranks


def random_matrix(rows: int, cols: int, rng: CounterRng) -> Gf2Matrix:
    """Uniform random matrix: iid fair bits in every entry.

    Consumes rows * ceil(cols/64) draws, row-major; within each word the
    low bit is column 64w, and bits past the last column are dropped.
    """
    n_w = _n_words(cols)
    words = rng.take(rows * n_w).reshape(rows, n_w)
    tail = cols & 63
    if tail:
        words[:, -1] &= np.uint64((1 << tail) - 1)
    return Gf2Matrix(rows, cols, words)


def _random_square_words(n: int, count: int, rng: CounterRng) -> np.ndarray:
    """(count, n, words) packed stack of uniform n x n matrices; same draw layout
    as count consecutive random_matrix(n, n, rng) calls."""
    n_w = _n_words(n)
    words = rng.take(count * n * n_w).reshape(count, n, n_w)
    tail = n & 63
    if tail:
        words[:, :, -1] &= np.uint64((1 << tail) - 1)
    return words


@dataclass
class RankHistogram:
    """Histogram over rank defect s = n - rank of sampled n x n matrices."""

    n: int
    counts: dict[int, int] = field(default_factory=dict)
    samples: int = 0

    def add(self, defect: int, count: int = 1) -> None:
        if not 0 <= defect <= self.n:
            raise ValueError(f"defect {defect} out of [0, {self.n}]")
        self.counts[defect] = self.counts.get(defect, 0) + count
        self.samples += count

    def merge(self, other: "RankHistogram") -> "RankHistogram":
        if other.n != self.n:
            raise ValueError("histogram size mismatch")
        out = RankHistogram(self.n, dict(self.counts), self.samples)
        for s, c in other.counts.items():
            out.counts[s] = out.counts.get(s, 0) + c
        out.samples += other.samples
        return out

    def frequency(self, defect: int) -> float:
        return self.counts.get(defect, 0) / self.samples

    def frequency_exact(self, defect: int) -> Fraction:
        return Fraction(self.counts.get(defect, 0), self.samples)

    def to_csv_rows(self) -> list[dict]:
        """Rows with columns s, count, frequency, closed_form_Qs."""
        from .formulas import rank_defect_probability

        rows = []
        for s in sorted(self.counts):
            rows.append(
                {
                    "s": s,
                    "count": self.counts[s],
                    "frequency": self.frequency(s),
                    "closed_form_Qs": rank_defect_probability(s),
                }
            )
        return rows


_BATCH_TARGET_WORDS = 1 << 21


def empirical_rank_distribution(n: int, samples: int, rng: CounterRng) -> RankHistogram:
    """Sample iid uniform n x n matrices and histogram the rank defect."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    hist = RankHistogram(n)
    chunk = max(1, _BATCH_TARGET_WORDS // (n * _n_words(n)))
    done = 0
    while done < samples:
        take = min(chunk, samples - done)
        words = _random_square_words(n, take, rng)
        defects = n - batch_rank(words, n)
        values, counts = np.unique(defects, return_counts=True)
        for s, c in zip(values.tolist(), counts.tolist()):
            hist.add(s, c)
        done += take
    return hist
