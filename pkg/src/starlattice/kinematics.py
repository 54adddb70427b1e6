"""Rigid-link compression geometry, lattice footprints and Poisson's ratio.

Also hosts the tiling classifier: given the translation-vector magnitudes
``l1(theta)`` and ``l2(theta)`` of a unit cell it looks at the logarithmic
derivatives ``g11 = l1'/l1`` and ``g22 = l2'/l2``.  Where their product (the
determinant of the diagonal G matrix) vanishes, a nonzero trace means the
tiling switches between auxetic and non-auxetic behaviour.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import GeometryParams, LatticeEncoding, LatticeError
from .validity import check_validity, numeric_offsets


class OverCompressed(LatticeError):
    pass


class GeometricInterference(LatticeError):
    pass


class InvalidEncoding(LatticeError):
    pass


class DegenerateInterval(LatticeError):
    pass


class NonSmoothTiling(LatticeError):
    pass


class Bias(enum.Enum):
    """Which side of the singular angle a joint starts on."""

    BELOW = "below"  # theta < pi/2
    ABOVE = "above"  # theta > pi/2


@dataclass(frozen=True)
class CellState:
    theta: float
    offset_a: float
    width_l1: float
    height_l2: float


def link_offset(s2: float, theta: float) -> float:
    return s2 * math.cos(theta)


def compressed_cell(geom: GeometryParams, bias: Bias = Bias.BELOW) -> CellState:
    l2 = 2 * geom.s2 - geom.compression_c
    if l2 <= 0:
        raise OverCompressed(f"compression {geom.compression_c} leaves no cell height")
    ratio = l2 / (2 * geom.s2)
    if ratio > 1:
        raise OverCompressed(f"negative compression {geom.compression_c} stretches the links")
    theta = math.asin(ratio)
    if Bias(bias) is Bias.ABOVE:
        theta = math.pi - theta
    a = link_offset(geom.s2, theta)
    if ratio == 1.0:
        a = 0.0  # cos(pi/2) is not exactly zero in floating point
    l1 = 2 * geom.s1 + 2 * a
    if l1 <= 0:
        raise GeometricInterference(f"compressed cell width {l1:.6g} mm is not positive")
    return CellState(theta, a, l1, l2)


def theta_for_compression(geom: GeometryParams, bias: Bias = Bias.BELOW) -> float:
    return compressed_cell(geom, bias).theta


def compression_for_theta(s2: float, theta: float) -> float:
    """Inverse of :func:`compressed_cell`: per-cell compression giving ``theta``."""
    return 2 * s2 - 2 * s2 * math.sin(theta)


def lattice_footprint(enc: LatticeEncoding, geom: GeometryParams, theta: float) -> np.ndarray:
    """Joint coordinates, shape (A+1, B, 2), in mm.

    x comes from the symbolic offsets; y starts at 0 on the top edge and drops
    by ``s2*sin(theta)`` per link (screen convention: y grows downward is left
    to the renderer).
    """
    report = check_validity(enc)
    if not report.is_valid:
        raise InvalidEncoding(f"encoding has {len(report.violations)} crossbar violation(s)")
    x = numeric_offsets(report.joint_grid, geom, theta)
    step = geom.s2 * math.sin(theta)
    y = -step * np.arange(enc.rows_a + 1, dtype=float)[:, None] * np.ones((1, enc.cols_b))
    return np.stack([x, y], axis=-1)


def bounding_box(points: np.ndarray) -> tuple[float, float]:
    """(width, height) of a footprint."""
    xs = points[..., 0]
    ys = points[..., 1]
    return float(xs.max() - xs.min()), float(ys.max() - ys.min())


def global_poisson(
    enc: LatticeEncoding, geom: GeometryParams, theta0: float, theta1: float
) -> float:
    """Bounding-box Poisson's ratio between two joint angles.

    Both angles must be on the same side of pi/2 for the number to describe
    one compression branch.
    """
    if theta0 == theta1:
        raise DegenerateInterval("theta0 and theta1 coincide")
    for t in (theta0, theta1):
        if not 0 < t < math.pi:
            raise ValueError(f"theta must lie in (0, pi), got {t}")
    w0, h0 = bounding_box(lattice_footprint(enc, geom, theta0))
    w1, h1 = bounding_box(lattice_footprint(enc, geom, theta1))
    axial = (h1 - h0) / h0
    if axial == 0:
        raise DegenerateInterval("no axial strain between the two angles")
    lateral = (w1 - w0) / w0
    return -lateral / axial


def alternating_pattern(rows_a: int, cols_b: int, phases) -> LatticeEncoding:
    """Every column alternates 1/0 down the rows; ``phases[c]`` picks the start."""
    bits = [[(r + phases[c]) % 2 for c in range(cols_b)] for r in range(rows_a)]
    return LatticeEncoding(tuple(tuple(row) for row in bits))


def uniform_pattern(rows_a: int, cols_b: int, auxetic: bool) -> LatticeEncoding:
    """Uniform honeycomb: all cells re-entrant (auxetic) or all convex.

    The labels refer to compression on the theta < pi/2 branch; flipping all
    bits (or switching branch) swaps them.
    """
    if auxetic:
        phases = [(c + 1) % 2 for c in range(cols_b)]
    else:
        phases = [c % 2 for c in range(cols_b)]
    return alternating_pattern(rows_a, cols_b, phases)


# -- tiling classifier --------------------------------------------------------


class TransitionKind(enum.Enum):
    ALWAYS_AUXETIC = "always-auxetic"
    ALWAYS_NON_AUXETIC = "always-non-auxetic"
    ALWAYS_ZERO_STRAIN = "always-zero-strain"
    SWITCHES = "switches"


@dataclass(frozen=True)
class TilingFunctions:
    l1: Callable[[float], float]
    l2: Callable[[float], float]
    domain: tuple[float, float] = (0.0, math.pi)


@dataclass(frozen=True)
class TransitionClassification:
    kind: TransitionKind
    theta_star: float | None = None

    def __str__(self) -> str:
        if self.kind is TransitionKind.SWITCHES:
            return f"switches at theta* = {self.theta_star:.9f} rad"
        return self.kind.value


def honeycomb_tiling(s1: float, s2: float) -> TilingFunctions:
    """Re-entrant honeycomb cell; with s1 < s2 the domain stops where l1 reaches 0."""
    hi = math.pi if s1 >= s2 else math.acos(-s1 / s2)
    return TilingFunctions(
        lambda t: 2 * s1 + 2 * s2 * math.cos(t),
        lambda t: 2 * s2 * math.sin(t),
        (0.0, hi),
    )


def rotating_squares_tiling(s: float) -> TilingFunctions:
    f = lambda t: s * (math.cos(t) + math.sin(t))  # noqa: E731
    return TilingFunctions(f, f, (0.0, math.pi / 2))


DERIV_STEP = 1e-6
ROOT_TOL = 1e-9
_SMOOTH_RTOL = 1e-3
_ZERO_TOL = 1e-7


def _deriv(f, t: float, h: float) -> float:
    return (f(t + h) - f(t - h)) / (2 * h)


def log_derivative(f, t: float, h: float = DERIV_STEP, check: bool = True) -> float:
    """``f'(t)/f(t)`` by central differences, cross-checked at ``h/2``."""
    d1 = _deriv(f, t, h)
    if check:
        d2 = _deriv(f, t, h / 2)
        scale = max(abs(d1), abs(d2), 1e-6 * abs(f(t)), 1e-12)
        if abs(d1 - d2) > _SMOOTH_RTOL * scale:
            raise NonSmoothTiling(f"derivative estimates disagree at theta={t:.9f}")
    val = f(t)
    if val <= 0:
        raise GeometricInterference(f"tiling length {val:.6g} is not positive at theta={t:.6g}")
    return d1 / val


def g_entries(tiling: TilingFunctions, t: float, h: float = DERIV_STEP) -> tuple[float, float]:
    return log_derivative(tiling.l1, t, h), log_derivative(tiling.l2, t, h)


def _bisect(f, lo: float, hi: float, tol: float = ROOT_TOL) -> float:
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def classify_transition(
    tiling: TilingFunctions, domain: tuple[float, float] | None = None, samples: int = 2001
) -> TransitionClassification:
    """Classify a tiling over an open angle interval.

    Zeros of det(G) are located as sign changes of g11 or g22 (a double root of
    the product, as in the rotating squares, only touches zero).  At such a
    zero a nonzero trace marks a switch.  With no switch the sign of
    g11*g22 elsewhere decides: positive means both lengths shrink together
    (auxetic).
    """
    lo, hi = domain or tiling.domain
    margin = 1e-4 * (hi - lo)
    grid = np.linspace(lo + margin, hi - margin, samples)
    g = np.array([g_entries(tiling, t) for t in grid])

    scale = max(float(np.abs(g).max()), 1e-300)
    if float(np.abs(g).max()) < _ZERO_TOL:
        return TransitionClassification(TransitionKind.ALWAYS_ZERO_STRAIN)

    roots = []
    for k in (0, 1):
        col = g[:, k]
        f = (lambda t, k=k: g_entries(tiling, t)[k])
        for i in range(samples - 1):
            if col[i] == 0:
                roots.append(float(grid[i]))
            elif col[i] * col[i + 1] < 0:
                roots.append(_bisect(f, float(grid[i]), float(grid[i + 1])))
    for t_star in sorted(roots):
        g11, g22 = g_entries(tiling, t_star)
        if abs(g11 + g22) > 1e-6 * scale:
            return TransitionClassification(TransitionKind.SWITCHES, t_star)

    det = g[:, 0] * g[:, 1]
    if float(np.abs(det).max()) < _ZERO_TOL * scale:
        return TransitionClassification(TransitionKind.ALWAYS_ZERO_STRAIN)
    # sign of the dominant part of the trajectory
    if float(det[det > 0].sum()) >= float(-det[det < 0].sum()):
        return TransitionClassification(TransitionKind.ALWAYS_AUXETIC)
    return TransitionClassification(TransitionKind.ALWAYS_NON_AUXETIC)
