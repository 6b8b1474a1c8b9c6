"""Least-squares and iteratively reweighted (minimax) fitting with fixed poles.

The basis is {1/(x - p_k)} for the prescribed poles plus a polynomial tail
(just the constant by default). Discrete least squares on a graded grid uses
the weight w(x) = sqrt(x) so that the objective emulates a uniformly weighted
continuous one; the reweighting iteration then drives the error curve to
equioscillation, i.e. toward the best sup-norm coefficients for those poles.

The error that is reported and equioscillated is the plain f - r unless an
``error_weight`` is supplied, in which case every reported curve (and the
reweighting itself) uses error_weight(x) * (f - r)(x).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .clustering import ClusteredPoleSet
from .core import ErrorCurve, GradedGrid, alternating_extrema_indices, make_error_curve, scaled_lstsq
from .exceptions import IllPosedError
from .approximants import PoleResidue

__all__ = [
    "FitProblem",
    "FitResult",
    "least_squares_fit",
    "lawson_minimax_fit",
    "equioscillation_count",
    "default_weight",
]

LAWSON_MAX_ITER = 100
LAWSON_TOL = 0.05


def default_weight(x):
    """Mesh weight sqrt(x) for least squares on exponentially graded grids."""
    return np.sqrt(x)


@dataclass
class FitProblem:
    """A fixed-pole rational fitting problem on a grid.

    Attributes:
        f: target function on the grid interval.
        poles: prescribed poles (a ClusteredPoleSet, an array of locations,
            or None for a pole-free polynomial fit).
        grid: fitting grid.
        weight: least-squares weight; default sqrt(x). The weight vanishing
            at x = 0 removes the singular point from the objective while the
            grid keeps it.
        poly_degree: degree of the polynomial tail (0 = constant only).
        error_weight: optional weight defining the error measure; None means
            the plain error f - r is reported and minimaxed.
    """

    f: Callable
    poles: object
    grid: GradedGrid
    weight: Optional[Callable] = None
    poly_degree: int = 0
    error_weight: Optional[Callable] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.poly_degree < 0:
            raise ValueError("poly_degree must be >= 0")
        p = self.pole_array
        x = self.grid.points
        if len(p):
            if np.min(np.abs(x[:, None] - p[None, :])) == 0.0:
                raise ValueError("grid points must be disjoint from poles")
        w = self.weight_values
        interior = x != 0
        if np.any(w[interior] <= 0):
            raise ValueError("weight must be positive on the grid away from x=0")

    @property
    def pole_array(self) -> np.ndarray:
        if self.poles is None:
            return np.empty(0, dtype=float)
        if isinstance(self.poles, ClusteredPoleSet):
            return self.poles.poles
        return np.asarray(self.poles, dtype=float)

    @property
    def n_basis(self) -> int:
        return len(self.pole_array) + 1 + self.poly_degree

    @property
    def weight_values(self) -> np.ndarray:
        if "w" not in self._cache:
            w = default_weight if self.weight is None else self.weight
            self._cache["w"] = np.asarray(w(self.grid.points), dtype=float)
        return self._cache["w"]

    @property
    def error_weight_values(self) -> np.ndarray:
        if "ew" not in self._cache:
            if self.error_weight is None:
                self._cache["ew"] = np.ones_like(self.grid.points)
            else:
                self._cache["ew"] = np.asarray(self.error_weight(self.grid.points), dtype=float)
        return self._cache["ew"]

    def design_matrix(self) -> np.ndarray:
        if "A" not in self._cache:
            x = self.grid.points
            p = self.pole_array
            cols = [kernels.cauchy_matrix(x, p)] if len(p) else []
            cols.append(np.vander(x, self.poly_degree + 1, increasing=True))
            self._cache["A"] = np.hstack(cols)
        return self._cache["A"]

    def f_values(self) -> np.ndarray:
        if "fv" not in self._cache:
            fv = np.asarray(self.f(self.grid.points), dtype=float)
            if fv.shape != self.grid.points.shape:
                fv = np.array([self.f(x) for x in self.grid.points], dtype=float)
            self._cache["fv"] = fv
        return self._cache["fv"]


@dataclass(frozen=True)
class FitResult:
    """Fitted approximant plus its error curve on the problem grid."""

    approximant: PoleResidue
    error_curve: ErrorCurve
    lawson_iterations: int
    equioscillation_count: int
    converged: bool
    effective_rank: int


def _coef_to_approximant(problem: FitProblem, coef: np.ndarray) -> PoleResidue:
    n_p = len(problem.pole_array)
    return PoleResidue(
        poles=problem.pole_array.copy(),
        residues=coef[:n_p].copy(),
        poly_coeffs=coef[n_p:].copy(),
    )


def _solve(problem: FitProblem, row_weights: np.ndarray):
    if problem.grid.count < problem.n_basis:
        raise ValueError(
            f"grid size {problem.grid.count} below basis size {problem.n_basis}"
        )
    A = problem.design_matrix() * row_weights[:, None]
    b = problem.f_values() * row_weights
    coef, rank = scaled_lstsq(A, b)
    if rank < problem.n_basis:
        raise IllPosedError(
            f"design matrix rank deficient: rank {rank} of {problem.n_basis}",
            effective_rank=rank,
        )
    return coef, rank


def _measure_error(problem: FitProblem, coef: np.ndarray) -> np.ndarray:
    return (problem.f_values() - problem.design_matrix() @ coef) * problem.error_weight_values


def least_squares_fit(problem: FitProblem) -> FitResult:
    """Minimize the weighted squared error over the grid.

    Raises:
        IllPosedError: when the design matrix is numerically rank deficient.
    """
    coef, rank = _solve(problem, problem.weight_values)
    es = _measure_error(problem, coef)
    curve = make_error_curve(problem.grid.points, es)
    return FitResult(
        approximant=_coef_to_approximant(problem, coef),
        error_curve=curve,
        lawson_iterations=0,
        equioscillation_count=len(curve.extrema),
        converged=True,
        effective_rank=rank,
    )


def lawson_minimax_fit(
    problem: FitProblem,
    max_iter: int = LAWSON_MAX_ITER,
    tol: float = LAWSON_TOL,
) -> FitResult:
    """Iteratively reweighted least squares toward the sup-norm optimum.

    Per-point weights start from the problem's least-squares weights and are
    updated multiplicatively by |e| with max-normalization each step. The
    iteration stops once the error curve has at least n_basis + 1 alternating
    extrema whose magnitudes agree within a factor 1 + tol; if that never
    happens the best iterate (smallest sup error) is returned with
    ``converged=False``.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    lam = problem.weight_values**2
    best = None
    iterations = 0
    converged = False
    n_basis = problem.n_basis
    for _ in range(max_iter):
        iterations += 1
        coef, rank = _solve(problem, np.sqrt(lam))
        es = _measure_error(problem, coef)
        sup = float(np.max(np.abs(es)))
        if best is None or sup < best[0]:
            best = (sup, coef, es, rank)
        ext = alternating_extrema_indices(es)
        if len(ext) >= n_basis + 1:
            mags = np.abs(es[ext])
            if mags.max() / mags.min() <= 1.0 + tol:
                converged = True
                break
        lam = lam * np.abs(es)
        peak = lam.max()
        if peak == 0.0:
            converged = True
            break
        lam = lam / peak
    _, coef, es, rank = best
    curve = make_error_curve(problem.grid.points, es)
    return FitResult(
        approximant=_coef_to_approximant(problem, coef),
        error_curve=curve,
        lawson_iterations=iterations,
        equioscillation_count=len(curve.extrema),
        converged=converged,
        effective_rank=rank,
    )


def equioscillation_count(curve: ErrorCurve) -> int:
    """Number of sign-alternating local extrema of the curve's samples.

    Raises:
        ValueError: if the curve has fewer than 3 samples.
    """
    if len(curve.es) < 3:
        raise ValueError("need at least 3 samples")
    return len(curve.extrema)
