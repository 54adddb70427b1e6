"""Two-stage log-linear fit of valid counts to ``2**(k1*A*B + k2*(A+B) + k3)``.

Stage 1 fits ``log2(count) = m_A * B + b_A`` for each fixed A.  Stage 2 fits
``m_A = k1*A + k2`` and ``b_A = k2*A + k3``.  The constant k2 shows up in both
stage-2 lines; ``variant="averaged"`` fits the two lines independently and
averages the two k2 estimates, ``variant="joint"`` solves one least-squares
problem with k2 shared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import LatticeError

FIT = "fit"
VALIDATION = "validation"

FIT_ROWS = (2, 4, 6, 8)
VARIANTS = ("averaged", "joint")

# Enumerated valid counts (upper triangle, A <= B); the table is symmetric.
REFERENCE_COUNTS: dict[tuple[int, int], int] = {
    (2, 2): 6, (2, 4): 36, (2, 6): 216, (2, 8): 1296, (2, 10): 7776,
    (2, 12): 46656, (2, 14): 279936,
    (4, 4): 486, (4, 6): 6642, (4, 8): 90882, (4, 10): 1243674, (4, 12): 17019234,
    (6, 6): 210924, (6, 8): 6730128,
}
# Cells of the reference table that came from the closed form, not enumeration.
REFERENCE_EXTRAPOLATED: dict[tuple[int, int], float] = {
    (8, 8): 475487113.0,
    (10, 10): 5.62438e12,
    (12, 12): 3.49006e17,
}
REFERENCE_CONSTANTS = (0.2989, 0.6924, -1.383169)
VALIDATION_POINTS = ((10, 2), (12, 2), (14, 2), (10, 4), (12, 4), (6, 8), (4, 12), (2, 14))
# Percent errors reported alongside the validation points above.
REFERENCE_VALIDATION_ERRORS = {
    (10, 2): 1.45, (12, 2): 1.77, (14, 2): 2.08, (10, 4): 1.41,
    (12, 4): 1.52, (6, 8): 1.69, (4, 12): 1.52, (2, 14): 2.08,
}


class InsufficientPoints(LatticeError):
    pass


class DegenerateRegression(LatticeError):
    pass


@dataclass(frozen=True)
class DataPoint:
    rows_a: int
    cols_b: int
    count: float
    role: str = FIT


@dataclass(frozen=True)
class FitDataset:
    points: tuple[DataPoint, ...]

    def __post_init__(self):
        seen: dict[tuple[int, int], str] = {}
        for p in self.points:
            if not p.count > 0:
                raise LatticeError(f"count at ({p.rows_a},{p.cols_b}) must be positive")
            if p.role not in (FIT, VALIDATION):
                raise LatticeError(f"unknown role {p.role!r}")
            key = (p.rows_a, p.cols_b)
            if key in seen and seen[key] != p.role:
                raise LatticeError(f"({key}) appears in both fit and validation sets")
            seen[key] = p.role

    def subset(self, role: str) -> list[DataPoint]:
        return [p for p in self.points if p.role == role]


def reference_table() -> dict[tuple[int, int], int]:
    """Enumerated counts with both (A, B) and (B, A) filled in."""
    full = {}
    for (a, b), v in REFERENCE_COUNTS.items():
        full[(a, b)] = v
        full[(b, a)] = v
    return full


def reference_dataset(counts: dict[tuple[int, int], int] | None = None) -> FitDataset:
    """Fit/validation split over the reference cells.

    ``counts`` substitutes other values for the same cells (e.g. this
    package's own DP counts).
    """
    table = reference_table()
    if counts is not None:
        table = {k: counts[k] for k in table}
    val = set(VALIDATION_POINTS)
    pts = [DataPoint(a, b, v, VALIDATION if (a, b) in val else FIT) for (a, b), v in sorted(table.items())]
    return FitDataset(tuple(pts))


@dataclass(frozen=True)
class Line:
    slope: float
    intercept: float
    r2: float
    n: int


def _line(x, y) -> Line:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2:
        raise InsufficientPoints(f"need at least 2 points for a line, got {len(x)}")
    if np.ptp(x) == 0:
        raise DegenerateRegression("zero variance in the regressor")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0 else 1.0 - float((resid**2).sum()) / ss_tot
    return Line(float(slope), float(intercept), min(max(r2, 0.0), 1.0), len(x))


@dataclass(frozen=True)
class FitModel:
    k1: float
    k2: float
    k3: float
    per_line_r2: dict[int, float] = field(default_factory=dict)
    stage1: dict[int, Line] = field(default_factory=dict)
    slope_line: Line | None = None
    intercept_line: Line | None = None
    variant: str = "averaged"

    def exponent(self, rows_a: float, cols_b: float) -> float:
        return self.k1 * rows_a * cols_b + self.k2 * (rows_a + cols_b) + self.k3


def fit_scaling(data: FitDataset, variant: str = "averaged", rows=FIT_ROWS) -> FitModel:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    fit_pts = data.subset(FIT)
    stage1: dict[int, Line] = {}
    for a in rows:
        pts = sorted((p.cols_b, math.log2(p.count)) for p in fit_pts if p.rows_a == a)
        if len(pts) < 2:
            raise InsufficientPoints(f"A={a} has {len(pts)} fit point(s); need at least 2")
        xs, ys = zip(*pts)
        stage1[a] = _line(xs, ys)

    a_vals = np.array(rows, dtype=float)
    slopes = np.array([stage1[a].slope for a in rows])
    intercepts = np.array([stage1[a].intercept for a in rows])
    slope_line = _line(a_vals, slopes)
    intercept_line = _line(a_vals, intercepts)
    if variant == "averaged":
        k1 = slope_line.slope
        k2 = 0.5 * (slope_line.intercept + intercept_line.slope)
        k3 = intercept_line.intercept
    else:
        n = len(rows)
        design = np.zeros((2 * n, 3))
        design[:n, 0] = a_vals
        design[:n, 1] = 1.0
        design[n:, 1] = a_vals
        design[n:, 2] = 1.0
        target = np.concatenate([slopes, intercepts])
        k1, k2, k3 = (float(v) for v in np.linalg.lstsq(design, target, rcond=None)[0])
    return FitModel(
        float(k1), float(k2), float(k3),
        per_line_r2={a: stage1[a].r2 for a in rows},
        stage1=stage1,
        slope_line=slope_line,
        intercept_line=intercept_line,
        variant=variant,
    )


def predict_count(model: FitModel, rows_a: float, cols_b: float) -> float:
    return 2.0 ** model.exponent(rows_a, cols_b)


@dataclass(frozen=True)
class ValidationResult:
    errors: dict[tuple[int, int], float]
    predicted: dict[tuple[int, int], float]

    @property
    def max_error(self) -> float:
        return max(self.errors.values()) if self.errors else 0.0


def validate_fit(model: FitModel, validation: FitDataset | list[DataPoint]) -> ValidationResult:
    pts = validation.subset(VALIDATION) if isinstance(validation, FitDataset) else validation
    errors, predicted = {}, {}
    for p in pts:
        est = predict_count(model, p.rows_a, p.cols_b)
        predicted[(p.rows_a, p.cols_b)] = est
        errors[(p.rows_a, p.cols_b)] = abs(est - p.count) / p.count * 100.0
    return ValidationResult(errors, predicted)


def parse_count_table(text: str) -> FitDataset:
    """Rows of ``A B count [role]``; role defaults from the validation list."""
    val = set(VALIDATION_POINTS)
    pts = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.replace(",", " ").replace("\t", " ").split()
        if len(tok) < 3:
            raise LatticeError(f"table row needs A, B and count: {line!r}")
        a, b, cnt = int(tok[0]), int(tok[1]), float(tok[2])
        role = tok[3] if len(tok) > 3 else (VALIDATION if (a, b) in val else FIT)
        pts.append(DataPoint(a, b, cnt, role))
    return FitDataset(tuple(pts))


def format_report(models: list[FitModel], validation: FitDataset | None = None) -> str:
    out = []
    for m in models:
        out.append(f"variant: {m.variant}")
        out.append(f"  k1 = {m.k1:.6f}")
        out.append(f"  k2 = {m.k2:.6f}")
        out.append(f"  k3 = {m.k3:.6f}")
        out.append("  A\tslope\tintercept\tR2")
        for a, ln in m.stage1.items():
            out.append(f"  {a}\t{ln.slope:.6f}\t{ln.intercept:.6f}\t{ln.r2:.7f}")
        if m.slope_line is not None and m.intercept_line is not None:
            out.append(
                f"  slope line: m_A = {m.slope_line.slope:.6f}*A + {m.slope_line.intercept:.6f}"
                f" (R2 {m.slope_line.r2:.7f})"
            )
            out.append(
                f"  intercept line: b_A = {m.intercept_line.slope:.6f}*A + {m.intercept_line.intercept:.6f}"
                f" (R2 {m.intercept_line.r2:.7f})"
            )
        if validation is not None and validation.subset(VALIDATION):
            res = validate_fit(m, validation)
            out.append("  A\tB\tpredicted\tobserved\terror%")
            for p in validation.subset(VALIDATION):
                key = (p.rows_a, p.cols_b)
                out.append(
                    f"  {p.rows_a}\t{p.cols_b}\t{round(res.predicted[key])}\t{p.count:.0f}\t{res.errors[key]:.2f}"
                )
            out.append(f"  max error: {res.max_error:.2f}%")
    return "\n".join(out)
