"""Shape compiler: profiles to edges, edges to flat-backed lattices, glyphs and
height maps to stacks of layer encodings.

Positions along an edge are tracked in units of the link offset ``a``: the
joint below a positive link sits one unit to the right of the joint above.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import numpy as np

from .kinematics import Bias, GeometricInterference, compressed_cell, compression_for_theta
from .model import EdgeProfile, GeometryParams, HeightMap, LatticeEncoding, LatticeError
from .validity import alpha_offsets, check_validity, has_crossbar


class SlopeUnachievable(LatticeError):
    pass


class SpanExceeded(LatticeError):
    pass


class NotSingleValued(LatticeError):
    pass


class GenerationDiverged(LatticeError):
    pass


class InvalidIntermediate(LatticeError):
    """The generator produced an inconsistent column: always a bug."""


class UnknownGlyph(LatticeError):
    pass


class HeightStepError(LatticeError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "height steps larger than one unit: "
            + ", ".join(f"layer {s} rows {r}-{r + 1}" for r, s in self.violations)
        )


class Mode(enum.Enum):
    MINIMIZE_SPREAD = "spread"
    MINIMIZE_MEAN = "mean"


# -- profiles -----------------------------------------------------------------


@dataclass(frozen=True)
class ProfilePolyline:
    """Ordered (x, y) samples, y strictly monotone."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(pts) < 2:
            raise LatticeError("a profile needs at least two points")
        dy = np.diff([p[1] for p in pts])
        if not (np.all(dy > 0) or np.all(dy < 0)):
            raise NotSingleValued("profile y values must be strictly monotone")
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_function(cls, f, y0: float, y1: float, n: int) -> "ProfilePolyline":
        ys = np.linspace(y0, y1, n)
        return cls(tuple((float(f(y)), float(y)) for y in ys))

    @property
    def xs(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def ys(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    def resample(self, slices: int) -> tuple[np.ndarray, np.ndarray]:
        """x at ``slices + 1`` uniformly spaced y values from first to last point."""
        ys, xs = self.ys, self.xs
        if ys[0] > ys[-1]:
            ys, xs = ys[::-1], xs[::-1]
            grid = np.linspace(ys[-1], ys[0], slices + 1)
            return np.interp(grid, ys, xs), grid
        grid = np.linspace(ys[0], ys[-1], slices + 1)
        return np.interp(grid, ys, xs), grid

    @property
    def segment_count(self) -> int:
        return len(self.points) - 1

    def segment_lengths(self) -> np.ndarray:
        return np.hypot(np.diff(self.xs), np.diff(self.ys))

    def segment_angles(self) -> np.ndarray:
        """Slope angle of each segment in (0, pi); pi/2 is vertical."""
        return np.arctan2(np.abs(np.diff(self.ys)), np.diff(self.xs))


def parse_profile(text: str) -> ProfilePolyline:
    pts = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.replace(",", " ").split()
        if len(tok) != 2:
            raise LatticeError(f"profile line must hold 'x y': {line!r}")
        pts.append((float(tok[0]), float(tok[1])))
    return ProfilePolyline(tuple(pts))


def track_edge(targets: Sequence[float]) -> EdgeProfile:
    """Greedy edge follower.

    ``targets[i]`` is the desired offset (in a-units, relative to the top
    joint) of the joint below link ``i``.  A running position starts at 0;
    each link steps +1 unless the running position already exceeds the
    target, in which case it steps -1.
    """
    pos = 0.0
    slopes = []
    for t in targets:
        if pos > t:
            slopes.append(-1)
            pos -= 1
        else:
            slopes.append(1)
            pos += 1
    return EdgeProfile(tuple(slopes))


_ROUND = 1e-9


def approximate_profile(
    profile: ProfilePolyline,
    rows_a: int,
    geom: GeometryParams,
    compression_c: float | None = None,
) -> tuple[EdgeProfile, float]:
    """Approximate a profile by ``rows_a`` signed links.

    Without ``compression_c`` the compression is chosen from the steepest
    slice: the link angle is set so one link's horizontal offset over its
    height equals that slice's slope, and the profile is matched up to a
    uniform scale.  With ``compression_c`` the profile is read in mm at that
    compression and must fit inside the reach of the edge.
    """
    if rows_a < 1:
        raise LatticeError("rows_a must be >= 1")
    xs, ys = profile.resample(rows_a)
    dx = np.diff(xs)
    dy = np.abs(np.diff(ys))
    rel = xs[1:] - xs[0]

    if compression_c is None:
        max_slope = float(np.max(np.abs(dx) / dy))
        if max_slope == 0:
            # a straight vertical profile is met at any compression
            c = geom.compression_c
            unit = 1.0
        else:
            theta = math.atan2(1.0, max_slope)  # cot(theta) = max slope
            a = geom.s2 * math.cos(theta)
            if 2 * geom.s1 - 2 * a <= 0:
                raise SlopeUnachievable(
                    f"slope {max_slope:.4g} needs a = {a:.4g} mm, beyond the interference "
                    f"limit a < s1 = {geom.s1} mm"
                )
            c = compression_for_theta(geom.s2, theta)
            if not 0 <= c < 2 * geom.s2:
                raise SlopeUnachievable(f"slope {max_slope:.4g} needs compression {c:.4g} mm")
            unit = float(np.max(np.abs(dx)))
        targets = rel / unit
    else:
        g = GeometryParams(geom.s1, geom.s2, geom.crossbar_l, compression_c)
        try:
            cell = compressed_cell(g, Bias.BELOW)
        except GeometricInterference as exc:
            raise SlopeUnachievable(str(exc)) from exc
        a = cell.offset_a
        c = compression_c
        span = float(xs.max() - xs.min())
        if span > rows_a * a + _ROUND:
            raise SpanExceeded(
                f"profile spans {span:.4g} mm but {rows_a} links reach at most {rows_a * a:.4g} mm"
            )
        if a == 0:
            if span > 0:
                raise SlopeUnachievable("an uncompressed lattice cannot express a sloped profile")
            targets = np.zeros(rows_a)
        else:
            if float(np.max(np.abs(dx))) > a + _ROUND:
                raise SlopeUnachievable(
                    f"a slice moves {float(np.max(np.abs(dx))):.4g} mm but one link moves {a:.4g} mm"
                )
            targets = rel / a
    targets = np.round(targets / _ROUND) * _ROUND
    return track_edge(targets), float(c)


def edge_polyline(edge: EdgeProfile, geom: GeometryParams, bias: Bias = Bias.BELOW) -> ProfilePolyline:
    """The staircase an edge traces at ``geom.compression_c``: one point per joint, in mm."""
    cell = compressed_cell(geom, bias)
    alpha = _column_alpha(edge.bits)
    step = geom.s2 * math.sin(cell.theta)
    return ProfilePolyline(tuple((float(al * cell.offset_a), float(i * step)) for i, al in enumerate(alpha)))


# -- flat-back generation -----------------------------------------------------


@dataclass(frozen=True)
class GenerationResult:
    lattice: LatticeEncoding
    layer_count: int
    mode: Mode


def is_flat_back(bits: Sequence[int]) -> bool:
    """A column whose links strictly alternate (either phase) gives a straight edge."""
    return all(bits[i] != bits[i + 1] for i in range(len(bits) - 1))


def _column_alpha(bits: Sequence[int], top: int = 0) -> np.ndarray:
    signs = 2 * np.asarray(bits, dtype=np.int64) - 1
    return np.concatenate([[top], top + np.cumsum(signs)])


def _target(alpha: np.ndarray, mode: Mode) -> float:
    if mode is Mode.MINIMIZE_SPREAD:
        return 0.5 * (float(alpha.max()) + float(alpha.min()))
    return float(alpha.mean())


def next_column(bits: Sequence[int], alpha: np.ndarray, left_col: int, mode: Mode) -> list[int]:
    """Bits of the column to the right of ``bits`` (whose joints sit at ``alpha``).

    Joints on the crossbar rows keep their offsets.  Between two consecutive
    crossbars a pair of equal links is a shear cell and is copied; a mixed
    pair points its middle joint toward the target offset.  The links above
    the first and below the last crossbar point their free ends toward the
    target too.  Ties go to the positive-first choice.
    """
    n = len(bits)
    mid = _target(alpha, mode)
    rows = [r for r in range(n + 1) if has_crossbar(r, left_col)]
    new = [None] * n
    for r0, r1 in zip(rows, rows[1:]):
        if bits[r0] == bits[r0 + 1]:
            new[r0] = new[r0 + 1] = bits[r0]
        elif alpha[r0] > mid:
            new[r0], new[r0 + 1] = 0, 1
        else:
            new[r0], new[r0 + 1] = 1, 0
    first, last = rows[0], rows[-1]
    if first == 1:
        # free top link: its upper joint sits at alpha[1] - s
        new[0] = 1 if alpha[1] > mid else 0
    if last == n - 1:
        # free bottom link: its lower joint sits at alpha[n-1] + s
        new[n - 1] = 0 if alpha[n - 1] > mid else 1
    if any(b is None for b in new):
        raise InvalidIntermediate(f"column {left_col + 1} left links unassigned: {new}")
    return new


def max_columns_for(edge: EdgeProfile) -> int:
    alpha = _column_alpha(edge.bits)
    span = int(alpha.max() - alpha.min())
    return 4 * span + len(edge)


def generate_lattice(
    edge: EdgeProfile, mode: Mode = Mode.MINIMIZE_SPREAD, max_columns: int | None = None
) -> GenerationResult:
    """Grow columns from ``edge`` until one is flat; ``layer_count`` counts all columns."""
    mode = Mode(mode)
    limit = max_columns if max_columns is not None else max_columns_for(edge)
    columns = [list(edge.bits)]
    alpha = _column_alpha(columns[0])
    while not is_flat_back(columns[-1]):
        if len(columns) >= limit:
            raise GenerationDiverged(f"no flat back within {limit} columns")
        left = len(columns) - 1
        new = next_column(columns[-1], alpha, left, mode)
        new_alpha = _column_alpha(new)
        # align the new column on its crossbar joints
        r = next(r for r in range(len(new) + 1) if has_crossbar(r, left))
        new_alpha += alpha[r] - new_alpha[r]
        crossed = [r for r in range(len(new) + 1) if has_crossbar(r, left)]
        if np.any(new_alpha[crossed] != alpha[crossed]):
            raise InvalidIntermediate(f"column {left + 1} breaks a crossbar")
        columns.append(new)
        alpha = new_alpha
    lattice = LatticeEncoding.from_columns(columns)
    report = check_validity(lattice)
    if not report.is_valid:
        raise InvalidIntermediate(f"generated lattice has violations {report.violations}")
    return GenerationResult(lattice, len(columns), mode)


def column_mean_deviation(enc: LatticeEncoding) -> list[float]:
    """Mean |alpha - column mean| for each column of a lattice."""
    alpha = alpha_offsets(enc.to_array())
    return [float(np.abs(alpha[:, c] - alpha[:, c].mean()).mean()) for c in range(enc.cols_b)]


# -- glyphs and height maps ---------------------------------------------------

GLYPH_ROWS = 7
GLYPH_COLS = 6


def load_font(text: str | None = None) -> dict[str, tuple[tuple[int, ...], ...]]:
    """Parse a glyph file: a line holding the character, then 7 rows of 6 '#'/'.'."""
    if text is None:
        text = resources.files("starlattice").joinpath("font6x7.txt").read_text()
    lines = [ln.rstrip("\n") for ln in text.splitlines() if ln.strip() and not ln.startswith(";")]
    font = {}
    i = 0
    while i < len(lines):
        name = lines[i].strip()
        rows = lines[i + 1 : i + 1 + GLYPH_ROWS]
        if len(name) != 1 or len(rows) != GLYPH_ROWS:
            raise LatticeError(f"malformed glyph entry near {name!r}")
        bitmap = []
        for row in rows:
            row = row.strip()
            if len(row) != GLYPH_COLS or set(row) - {"#", "."}:
                raise LatticeError(f"glyph {name!r} row {row!r} must be 6 of '#'/'.'")
            bitmap.append(tuple(1 if ch == "#" else 0 for ch in row))
        font[name] = tuple(bitmap)
        i += 1 + GLYPH_ROWS
    return font


_FONT: dict | None = None


def default_font() -> dict[str, tuple[tuple[int, ...], ...]]:
    global _FONT
    if _FONT is None:
        _FONT = load_font()
    return _FONT


def pixels_to_edge(heights: Sequence[int]) -> EdgeProfile:
    """Edge for one layer of pixel heights (two links per pixel).

    The top joint is the zero reference.  The joint closing pixel ``k`` sits
    at offset ``2 * heights[k]``; inside a pixel the edge climbs, descends or
    zigzags, so a flat pixel is the (+, -) pair of the flat back.
    """
    targets = []
    for h in heights:
        targets += [2 * h, 2 * h]
    edge = track_edge(targets)
    got = expressed_heights(edge)
    if list(got) != list(heights):
        bad = [(k, heights[k]) for k in range(len(heights)) if got[k] != heights[k]]
        raise HeightStepError([(k - 1, 0) for k, _ in bad[:1]])
    return edge


def expressed_heights(edge: EdgeProfile | Sequence[int], top: int = 0) -> tuple[int, ...]:
    """Pixel heights read off an edge: offset of every second joint, halved."""
    slopes = edge.slopes if isinstance(edge, EdgeProfile) else tuple(edge)
    pos = np.concatenate([[top], top + np.cumsum(slopes)])
    return tuple(int(v) // 2 for v in pos[2::2])


def letter_to_layers(glyph: str, font: dict | None = None) -> list[EdgeProfile]:
    """One edge per glyph column (6 layers of 7 pixels); pixel 1 is raised."""
    font = font if font is not None else default_font()
    key = glyph.upper() if glyph.upper() in font else glyph
    if key not in font:
        raise UnknownGlyph(f"no glyph for {glyph!r}")
    bitmap = font[key]
    layers = []
    for s in range(GLYPH_COLS):
        layers.append(pixels_to_edge([bitmap[r][s] for r in range(GLYPH_ROWS)]))
    return layers


def render_glyph(layers: Sequence[EdgeProfile]) -> tuple[tuple[int, ...], ...]:
    cols = [expressed_heights(e) for e in layers]
    return tuple(tuple(col[r] for col in cols) for r in range(len(cols[0])))


@dataclass(frozen=True)
class HeightViolation:
    row: int  # upper pixel of the offending pair (0-based); -1 is the top edge
    layer: int
    step: int


def validate_heightmap(hm: HeightMap) -> list[HeightViolation]:
    """Within-layer steps larger than one unit.

    The top edge of every layer is fixed at height 0, so the first pixel is
    checked against it as well.  Steps between layers are unconstrained.
    """
    out = []
    for s in range(hm.layers_s):
        col = (0,) + hm.layer(s)
        for r in range(len(col) - 1):
            step = col[r + 1] - col[r]
            if abs(step) > 1:
                out.append(HeightViolation(r - 1, s, step))
    return out


def staircase_profile(heights: Sequence[int], unit_mm: float = 1.0, pitch_mm: float = 1.0) -> ProfilePolyline:
    """Polyline through the pixel-boundary joints of one layer.

    Two links per pixel: joint ``2k+2`` sits at ``heights[k]`` units and the
    joint between sits halfway between its neighbours.
    """
    xs = [0.0]
    for h in heights:
        prev = xs[-1]
        xs += [0.5 * (prev + h * unit_mm), h * unit_mm]
    ys = [i * pitch_mm for i in range(len(xs))]
    return ProfilePolyline(tuple(zip(xs, ys)))


def display_compression(geom: GeometryParams) -> float:
    """Compression that tilts the links to 45 degrees (unit height per unit pitch)."""
    return compression_for_theta(geom.s2, math.pi / 4)


def heightmap_to_layers(hm: HeightMap, geom: GeometryParams) -> tuple[list[EdgeProfile], float]:
    """Edges for every layer plus the shared compression.

    With any unit step in the map the steepest slice has slope
    ``unit / pitch``; pixel pitch and unit height are set equal, so the
    shared compression puts the links at 45 degrees.  A map without steps
    keeps ``geom.compression_c``.
    """
    bad = validate_heightmap(hm)
    if bad:
        raise HeightStepError([(v.row, v.layer) for v in bad])
    has_step = any(
        h != 0 for s in range(hm.layers_s) for h in np.diff((0,) + hm.layer(s))
    )
    if has_step:
        c = display_compression(geom)
    else:
        c = geom.compression_c
    a = compressed_cell(GeometryParams(geom.s1, geom.s2, geom.crossbar_l, c)).offset_a
    layers = []
    for s in range(hm.layers_s):
        heights = hm.layer(s)
        prof = staircase_profile(heights, unit_mm=2 * a, pitch_mm=1.0)
        edge, _ = approximate_profile(prof, 2 * len(heights), geom, compression_c=c)
        if expressed_heights(edge) != tuple(heights):
            raise InvalidIntermediate(f"layer {s} does not reproduce its heights")
        layers.append(edge)
    return layers, float(c)
