"""Symbolic joint offsets and the frustration check for a slope encoding.

Every joint's horizontal position is an exact pair ``(lam, alpha)`` meaning
``lam * L + alpha * a`` with ``a = s2 * cos(theta)``.  A crossbar of length L
joins columns ``c`` and ``c + 1`` at joint row ``r`` whenever ``r + c`` is
even.  An encoding is valid when every crossbar spans exactly ``(1, 0)``;
since the test never evaluates ``a`` it holds for every compression angle at
once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import GeometryParams, JointGrid, LatticeEncoding, SymbolicOffset


def has_crossbar(row: int, left_col: int) -> bool:
    """True when a crossbar joins ``left_col`` and ``left_col + 1`` at joint ``row``."""
    return (row + left_col) % 2 == 0


def crossbar_rows(rows_a: int, left_col: int) -> list[int]:
    return [r for r in range(rows_a + 1) if has_crossbar(r, left_col)]


def alpha_offsets(bits: np.ndarray) -> np.ndarray:
    """Integer ``alpha`` part of the joint grid for a 0/1 array of shape (A, B).

    The ``lam`` part is simply the column index.
    """
    bits = np.asarray(bits, dtype=np.int64)
    rows_a, cols_b = bits.shape
    signs = 2 * bits - 1
    top = np.zeros(cols_b, dtype=np.int64)
    for j in range(1, cols_b):
        if has_crossbar(0, j - 1):
            top[j] = top[j - 1]
        else:
            # crossbar sits one joint down: walk down the left link, across,
            # then back up the right link
            top[j] = top[j - 1] + signs[0, j - 1] - signs[0, j]
    alpha = np.empty((rows_a + 1, cols_b), dtype=np.int64)
    alpha[0] = top
    alpha[1:] = top + np.cumsum(signs, axis=0)
    return alpha


def compute_joint_offsets(enc: LatticeEncoding) -> JointGrid:
    alpha = alpha_offsets(enc.to_array())
    offsets = tuple(
        tuple(SymbolicOffset(c, int(alpha[r, c])) for c in range(enc.cols_b))
        for r in range(enc.rows_a + 1)
    )
    return JointGrid(offsets)


@dataclass(frozen=True)
class ValidityReport:
    is_valid: bool
    violations: tuple[tuple[int, int], ...]
    joint_grid: JointGrid


def crossbar_violations(grid: JointGrid) -> list[tuple[int, int]]:
    n_rows, cols_b = grid.shape
    bad = []
    for r in range(n_rows):
        for c in range(cols_b - 1):
            if has_crossbar(r, c) and grid[r, c + 1] - grid[r, c] != (1, 0):
                bad.append((r, c))
    return bad


def check_validity(enc: LatticeEncoding) -> ValidityReport:
    grid = compute_joint_offsets(enc)
    bad = crossbar_violations(grid)
    return ValidityReport(not bad, tuple(bad), grid)


def is_valid(enc: LatticeEncoding) -> bool:
    return check_validity(enc).is_valid


def numeric_offsets(grid: JointGrid, geom: GeometryParams, theta: float) -> np.ndarray:
    """Joint x-positions in mm at joint angle ``theta``."""
    if not 0 < theta < math.pi:
        raise ValueError(f"theta must lie in (0, pi), got {theta}")
    a = geom.s2 * math.cos(theta)
    return grid.lam_array() * geom.crossbar_l + grid.alpha_array() * a
