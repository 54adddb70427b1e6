"""Counting valid encodings.

Two independent routes:

* :func:`count_bruteforce` walks every one of the ``2**(A*B)`` bit matrices,
  builds the joint offsets exactly as :mod:`starlattice.validity` does
  (vectorised over a chunk of encodings) and checks every crossbar.
* :func:`count_dp` is a column transfer count.  Two neighbouring columns are
  compatible iff, between each pair of consecutive crossbar rows joining them,
  their signed bit sums agree.  Column states are grouped by that segment-sum
  signature, so each step costs O(2**A).

Counts are Python ints throughout.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterator

import numpy as np

from .model import LatticeEncoding, LatticeError
from .validity import has_crossbar

BRUTE_FORCE_LIMIT = 28
DP_ROW_LIMIT = 24
_CHUNK = 1 << 18

BRUTE_FORCE = "brute-force"
DYNAMIC_PROGRAM = "dynamic-program"


class SizeLimitExceeded(LatticeError):
    pass


class DimensionMismatch(LatticeError):
    pass


@dataclass(frozen=True)
class CountRecord:
    rows_a: int
    cols_b: int
    valid_count: int
    method: str

    @property
    def total_count(self) -> int:
        return 1 << (self.rows_a * self.cols_b)

    def to_tsv(self) -> str:
        return f"{self.rows_a}\t{self.cols_b}\t{self.valid_count}\t{self.method}"


def _check_dims(rows_a: int, cols_b: int) -> None:
    if rows_a < 1 or cols_b < 1:
        raise LatticeError(f"dimensions must be >= 1, got {rows_a} x {cols_b}")


def _default_threads() -> int:
    return os.cpu_count() or 1


# -- brute force ------------------------------------------------------------


def _unpack(start: int, stop: int, rows_a: int, cols_b: int) -> np.ndarray:
    """Bit matrices for encoding indices [start, stop); bit (r, c) is index bit r*B + c."""
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(rows_a * cols_b, dtype=np.int64)
    bits = (idx[:, None] >> shifts) & 1
    return bits.reshape(-1, rows_a, cols_b).astype(np.int8)


def _valid_mask(bits: np.ndarray) -> np.ndarray:
    """Per-encoding verdict for a stack of shape (N, A, B)."""
    n, rows_a, cols_b = bits.shape
    signs = (2 * bits - 1).astype(np.int16)
    top = np.zeros((n, cols_b), dtype=np.int16)
    for j in range(1, cols_b):
        if has_crossbar(0, j - 1):
            top[:, j] = top[:, j - 1]
        else:
            top[:, j] = top[:, j - 1] + signs[:, 0, j - 1] - signs[:, 0, j]
    alpha = np.empty((n, rows_a + 1, cols_b), dtype=np.int16)
    alpha[:, 0] = top
    alpha[:, 1:] = top[:, None, :] + np.cumsum(signs, axis=1)
    ok = np.ones(n, dtype=bool)
    for c in range(cols_b - 1):
        rows = [r for r in range(rows_a + 1) if has_crossbar(r, c)]
        ok &= np.all(alpha[:, rows, c + 1] == alpha[:, rows, c], axis=1)
    return ok


def _count_range(start: int, stop: int, rows_a: int, cols_b: int) -> int:
    total = 0
    for lo in range(start, stop, _CHUNK):
        hi = min(lo + _CHUNK, stop)
        total += int(_valid_mask(_unpack(lo, hi, rows_a, cols_b)).sum())
    return total


def count_bruteforce(
    rows_a: int, cols_b: int, *, limit: int = BRUTE_FORCE_LIMIT, threads: int | None = None
) -> CountRecord:
    _check_dims(rows_a, cols_b)
    if rows_a * cols_b > limit:
        raise SizeLimitExceeded(
            f"brute force over {rows_a}x{cols_b} = 2^{rows_a * cols_b} encodings exceeds "
            f"the 2^{limit} guard; use the dynamic program"
        )
    n_total = 1 << (rows_a * cols_b)
    threads = threads or _default_threads()
    n_parts = max(1, min(threads, n_total // _CHUNK))
    bounds = [n_total * i // n_parts for i in range(n_parts + 1)]
    if n_parts == 1:
        valid = _count_range(0, n_total, rows_a, cols_b)
    else:
        with ThreadPoolExecutor(max_workers=n_parts) as pool:
            parts = pool.map(
                lambda i: _count_range(bounds[i], bounds[i + 1], rows_a, cols_b),
                range(n_parts),
            )
            valid = sum(parts)
    return CountRecord(rows_a, cols_b, valid, BRUTE_FORCE)


def enumerate_valid(rows_a: int, cols_b: int) -> Iterator[LatticeEncoding]:
    """Yield every valid encoding; a test utility, capped at A*B <= 20."""
    _check_dims(rows_a, cols_b)
    if rows_a * cols_b > 20:
        raise SizeLimitExceeded("listing is only offered for A*B <= 20")
    n_total = 1 << (rows_a * cols_b)
    for lo in range(0, n_total, _CHUNK):
        bits = _unpack(lo, min(lo + _CHUNK, n_total), rows_a, cols_b)
        for b in bits[_valid_mask(bits)]:
            yield LatticeEncoding.from_array(b)


# -- transfer count ---------------------------------------------------------


def _signature_ids(rows_a: int, parity: int) -> tuple[np.ndarray, int]:
    """Class id of every column state under the segment-sum signature.

    ``parity`` selects the crossbar rows (r with r + parity even).  States
    are integers whose bit r is the link in row r.
    """
    rows = [r for r in range(rows_a + 1) if has_crossbar(r, parity)]
    states = np.arange(1 << rows_a, dtype=np.int64)
    signs = 2 * ((states[:, None] >> np.arange(rows_a)) & 1) - 1
    if len(rows) < 2:
        return np.zeros(len(states), dtype=np.int64), 1
    segs = np.stack([signs[:, r0:r1].sum(axis=1) for r0, r1 in zip(rows, rows[1:])], axis=1)
    _, ids = np.unique(segs, axis=0, return_inverse=True)
    ids = ids.reshape(-1)
    return ids.astype(np.int64), int(ids.max()) + 1


def _group_sum(values: np.ndarray, keys: np.ndarray, n_keys: int) -> np.ndarray:
    """Exact per-key sums of an object array of Python ints."""
    out = np.zeros(n_keys, dtype=object)
    if len(values) == 0:
        return out
    order = np.argsort(keys, kind="stable")
    k_sorted = keys[order]
    starts = np.flatnonzero(np.r_[True, k_sorted[1:] != k_sorted[:-1]])
    sums = np.add.reduceat(values[order], starts)
    out[k_sorted[starts]] = sums
    return out


def count_dp(rows_a: int, cols_b: int, *, threads: int | None = None) -> CountRecord:
    """Exact count by column transfer over segment-sum signatures.

    ``threads`` is accepted for interface symmetry; the grouped transfer is
    already O(2**A) per column and runs in a single thread.
    """
    _check_dims(rows_a, cols_b)
    if rows_a > DP_ROW_LIMIT:
        raise SizeLimitExceeded(f"rows_a={rows_a} exceeds the DP limit of {DP_ROW_LIMIT}")
    if cols_b == 1:
        return CountRecord(rows_a, cols_b, 1 << rows_a, DYNAMIC_PROGRAM)

    ids = [None, None]
    n_ids = [0, 0]
    for p in (0, 1):
        ids[p], n_ids[p] = _signature_ids(rows_a, p)
    # multiplicity of each (class under parity p, class under parity 1-p) pair
    pairs = []
    for p in (0, 1):
        q = 1 - p
        key = ids[p] * n_ids[q] + ids[q]
        uniq, mult = np.unique(key, return_counts=True)
        pairs.append((uniq // n_ids[q], uniq % n_ids[q], mult.astype(object)))
    class_size = [np.bincount(ids[p], minlength=n_ids[p]).astype(object) for p in (0, 1)]

    # v[i]: number of valid partial lattices whose last column lies in class i
    # of the parity used by the next crossbar set.
    v = class_size[0].copy()
    for k in range(1, cols_b - 1):
        p = (k - 1) % 2  # parity of the transition into column k
        src, dst, mult = pairs[p]
        v = _group_sum(mult * v[src], dst, n_ids[1 - p])
    p_last = (cols_b - 2) % 2
    total = int(np.sum(class_size[p_last] * v)) if len(v) else 0
    return CountRecord(rows_a, cols_b, total, DYNAMIC_PROGRAM)


def count(rows_a: int, cols_b: int, method: str = "dp", **kw) -> CountRecord:
    if method in ("dp", DYNAMIC_PROGRAM):
        return count_dp(rows_a, cols_b, **kw)
    if method in ("brute", BRUTE_FORCE):
        return count_bruteforce(rows_a, cols_b, **kw)
    raise ValueError(f"unknown counting method {method!r}")


# -- closed forms -------------------------------------------------------------


@dataclass(frozen=True)
class Probability:
    exact: Fraction

    @property
    def value(self) -> float:
        return float(self.exact)

    @property
    def percent(self) -> float:
        return float(self.exact * 100)

    def __str__(self) -> str:
        return f"{self.value:.6g} ({self.percent:.6g} %)"


def valid_probability(rows_a: int, cols_b: int, count: CountRecord | int | float) -> Probability:
    """Chance that a uniformly random A x B encoding is valid.

    ``count`` may be a :class:`CountRecord` (dimensions are checked) or a
    bare count, e.g. an extrapolated float.
    """
    _check_dims(rows_a, cols_b)
    if isinstance(count, CountRecord):
        if (count.rows_a, count.cols_b) != (rows_a, cols_b):
            raise DimensionMismatch(
                f"count is for {count.rows_a}x{count.cols_b}, asked about {rows_a}x{cols_b}"
            )
        n = Fraction(count.valid_count)
    elif isinstance(count, float):
        n = Fraction(Decimal(repr(count)))
    else:
        n = Fraction(count)
    return Probability(n / (1 << (rows_a * cols_b)))


def count_arrowhead(rows_a: int, cols_b: int) -> int:
    """Valid states of a double-arrowhead lattice: one shared angle per column."""
    _check_dims(rows_a, cols_b)
    return 1 << cols_b


def dof_at_singularity(cells_n: int, cells_m: int) -> int:
    _check_dims(cells_n, cells_m)
    return cells_n * (cells_m + 1)


def programming_elements(cells_n: int, cells_m: int) -> tuple[int, int]:
    """(vertical linkage count, actuator count) for an N x M cell lattice."""
    _check_dims(cells_n, cells_m)
    linkages = 2 * cells_n * (cells_m + 1)
    return linkages, linkages // 2
