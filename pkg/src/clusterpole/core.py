"""Grids, error norms, rate fitting, and small shared utilities.

Error norms for functions with an endpoint singularity are measured on
exponentially graded grids: 2000 points for fitting work and 100000 points
whenever a sup norm is reported, so that oscillations reaching all the way
down to 1e-12 are resolved.
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import lstsq as _lstsq

from .exceptions import EvaluationError

FIT_GRID_SIZE = 2000
REPORT_GRID_SIZE = 100_000

#: points with |e| at or below this magnitude are ignored when locating
#: alternating extrema (rounding dust on otherwise clean error curves)
SIGN_DEAD_BAND = 1e-15


@dataclass(frozen=True)
class GradedGrid:
    """Logarithmically equispaced grid, points 10**t for equispaced t.

    Attributes:
        points: strictly increasing grid points.
        decades: decades spanned by the exponent range.
        count: number of points.
    """

    points: np.ndarray
    decades: float
    count: int

    @property
    def descriptor(self):
        return (self.decades, self.count)


@dataclass(frozen=True)
class ErrorCurve:
    """Sampled error e(x) together with its sup norm and alternating extrema.

    ``extrema`` holds (x, e) pairs of the sign-alternating local extrema of
    the samples; consecutive same-sign extrema are merged keeping the larger
    magnitude, and extrema below :data:`SIGN_DEAD_BAND` are dropped.
    """

    xs: np.ndarray
    es: np.ndarray
    norm_inf: float
    extrema: tuple

    def sign_changes(self) -> int:
        s = np.sign(self.es[np.abs(self.es) > SIGN_DEAD_BAND])
        return int(np.sum(s[1:] * s[:-1] < 0))


@dataclass(frozen=True)
class RateFit:
    """Least-squares line log(e) = slope * t + intercept with t = sqrt(n) or n."""

    slope: float
    intercept: float
    r2: float
    axis: str


def build_graded_grid(a_exp: float, b_exp: float, count: int) -> GradedGrid:
    """Return ``count`` points 10**t with t equispaced in [a_exp, b_exp].

    Raises:
        ValueError: if count < 2 or the exponent range is empty.
    """
    if count < 2:
        raise ValueError(f"graded grid needs at least 2 points, got {count}")
    if not a_exp < b_exp:
        raise ValueError(f"need a_exp < b_exp, got [{a_exp}, {b_exp}]")
    pts = np.logspace(a_exp, b_exp, count)
    return GradedGrid(points=pts, decades=float(b_exp - a_exp), count=count)


def fit_grid() -> GradedGrid:
    """Standard 2000-point grid on [1e-12, 1] used for fitting."""
    return build_graded_grid(-12, 0, FIT_GRID_SIZE)


def report_grid() -> GradedGrid:
    """Standard 100000-point grid on [1e-12, 1] used for reported sup norms."""
    return build_graded_grid(-12, 0, REPORT_GRID_SIZE)


def _eval_on(f: Callable, x: np.ndarray) -> np.ndarray:
    vals = np.asarray(f(x), dtype=float)
    if vals.shape != x.shape:
        vals = np.array([f(xi) for xi in x], dtype=float)
    return vals


def alternating_extrema_indices(es: np.ndarray, dead_band: float = SIGN_DEAD_BAND):
    """Indices of sign-alternating local extrema of the sampled curve.

    Endpoints count as extrema when they are local ones; runs of same-sign
    extrema collapse to the largest magnitude in the run.
    """
    n = len(es)
    raw = []
    for i in range(n):
        if abs(es[i]) <= dead_band:
            continue
        left_ok = i == 0 or es[i] >= es[i - 1]
        right_ok = i == n - 1 or es[i] >= es[i + 1]
        is_max = left_ok and right_ok
        left_ok = i == 0 or es[i] <= es[i - 1]
        right_ok = i == n - 1 or es[i] <= es[i + 1]
        is_min = left_ok and right_ok
        if is_max or is_min:
            raw.append(i)
    merged = []
    for i in raw:
        if merged and np.sign(es[merged[-1]]) == np.sign(es[i]):
            if abs(es[i]) > abs(es[merged[-1]]):
                merged[-1] = i
        else:
            merged.append(i)
    return merged


def make_error_curve(xs: np.ndarray, es: np.ndarray) -> ErrorCurve:
    idx = alternating_extrema_indices(es)
    return ErrorCurve(
        xs=xs,
        es=es,
        norm_inf=float(np.max(np.abs(es))) if len(es) else 0.0,
        extrema=tuple((float(xs[i]), float(es[i])) for i in idx),
    )


def sup_error(f: Callable, r: Callable, grid: GradedGrid) -> ErrorCurve:
    """Sampled error curve e = f - r on the grid, with discrete sup norm.

    Raises:
        EvaluationError: if f or r is non-finite at a grid point; the
            exception carries the offending x.
    """
    xs = grid.points
    fv = _eval_on(f, xs)
    rv = _eval_on(r, xs)
    for name, vals in (("f", fv), ("r", rv)):
        bad = ~np.isfinite(vals)
        if bad.any():
            x_bad = float(xs[np.argmax(bad)])
            raise EvaluationError(f"{name} is non-finite at x={x_bad!r}", x=x_bad)
    return make_error_curve(xs, fv - rv)


def fit_rate(errors: Sequence, axis: str = "sqrt_n", min_n: int = 4) -> RateFit:
    """Least-squares line of log(e) against sqrt(n) or n.

    ``errors`` is a sequence of (n, e) pairs with e > 0. Points with
    n < ``min_n`` are excluded by default to reduce preasymptotic bias;
    pass ``min_n=0`` to fit everything.

    Raises:
        ValueError: on non-positive errors or fewer than 3 usable points.
    """
    if axis not in ("sqrt_n", "n"):
        raise ValueError(f"axis must be 'sqrt_n' or 'n', got {axis!r}")
    ns = np.array([p[0] for p in errors], dtype=float)
    es = np.array([p[1] for p in errors], dtype=float)
    if np.any(es <= 0):
        raise ValueError("rate fit requires strictly positive errors")
    keep = ns >= min_n
    ns, es = ns[keep], es[keep]
    if len(ns) < 3:
        raise ValueError(f"rate fit needs >= 3 points with n >= {min_n}, got {len(ns)}")
    t = np.sqrt(ns) if axis == "sqrt_n" else ns
    y = np.log(es)
    A = np.vstack([t, np.ones_like(t)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return RateFit(slope=float(slope), intercept=float(intercept),
                   r2=float(min(max(r2, 0.0), 1.0)), axis=axis)


def scaled_lstsq(A: np.ndarray, b: np.ndarray, cond: float = 1e-14):
    """Least squares by column-scaled QR (columns scaled to unit 2-norm).

    Returns (coefficients, effective_rank). Rank is reported against the
    scaled matrix at the given condition threshold.
    """
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    coef, _, rank, _ = _lstsq(A / norms, b, cond=cond, lapack_driver="gelsy")
    return coef / norms, int(rank)


def format_float(v) -> str:
    """17 significant digits: round-trip exact for doubles."""
    return format(float(v), ".17g")


def write_csv(path, header: Sequence[str], rows) -> None:
    """Write rows as comma-separated values with a header line.

    Floats are emitted with 17 significant digits; other values via str().
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = [
                format_float(c) if isinstance(c, (float, np.floating)) else str(c)
                for c in row
            ]
            fh.write(",".join(cells) + "\n")
