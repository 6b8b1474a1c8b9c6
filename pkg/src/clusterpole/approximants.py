"""Closed-form and interpolatory rational approximants of sqrt(x) on [0, 1].

Three families, all with poles exponentially clustered at the singularity:

* :func:`newman` -- the classical product-formula approximant, evaluated in
  log space so degrees up to a few hundred stay inside double range;
* :func:`trapezoidal_sqrt` -- the rational function obtained by applying an
  equispaced trapezoidal rule to the integral representation of sqrt(x),
  stored in pole-residue form;
* :func:`stenger_interpolant` -- rational interpolation with preassigned
  poles at mirrored clustered nodes.
"""

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import kernels
from .core import scaled_lstsq
from .exceptions import EvaluationError, IllPosedError, PoleEvaluationError

__all__ = [
    "NewmanForm",
    "PoleResidue",
    "NodePoleInterpolant",
    "RationalApproximant",
    "newman",
    "trapezoidal_sqrt",
    "trapezoidal_sqrt_direct",
    "trapezoidal_step",
    "stenger_step",
    "stenger_interpolant",
    "evaluate",
]

#: relative proximity below which an evaluation point counts as hitting a pole
POLE_TOL = 1e-14


@dataclass(frozen=True)
class NewmanForm:
    """Product-formula approximant of degree n with parameter xi."""

    n: int
    xi: float

    @property
    def degree(self) -> int:
        return self.n


@dataclass(frozen=True)
class PoleResidue:
    """r(x) = sum_k residues[k]/(x - poles[k]) + sum_j poly_coeffs[j] x^j."""

    poles: np.ndarray
    residues: np.ndarray
    poly_coeffs: np.ndarray

    def __post_init__(self):
        if len(self.poles) != len(self.residues):
            raise ValueError("poles and residues must have equal length")
        if len(np.unique(self.poles)) != len(self.poles):
            raise ValueError("poles must be distinct")

    @property
    def degree(self) -> int:
        return len(self.poles)


@dataclass(frozen=True)
class NodePoleInterpolant:
    """Rational interpolant with fixed simple poles.

    Stores the interpolation nodes, their function values, the poles, and the
    solved coefficients on the basis {1, 1/(x - p_1), ..., 1/(x - p_n)}.
    """

    nodes: np.ndarray
    poles: np.ndarray
    values: np.ndarray
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.poles)


RationalApproximant = Union[NewmanForm, PoleResidue, NodePoleInterpolant]


def newman(n: int, xi_mode: str = "classic") -> NewmanForm:
    """Degree-n product-formula approximant of sqrt(x) on [0, 1].

    xi_mode "classic" takes xi = exp(-1/sqrt(2n)); "improved" takes
    xi = exp(-(pi/2)/sqrt(2n)), which converges faster in practice.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if xi_mode == "classic":
        xi = np.exp(-1.0 / np.sqrt(2.0 * n))
    elif xi_mode == "improved":
        xi = np.exp(-(np.pi / 2.0) / np.sqrt(2.0 * n))
    else:
        raise ValueError(f"xi_mode must be 'classic' or 'improved', got {xi_mode!r}")
    return NewmanForm(n=n, xi=float(xi))


def trapezoidal_step(n: int) -> float:
    """Step size pi*sqrt(2/n) balancing truncation and discretization error."""
    return float(np.pi * np.sqrt(2.0 / n))


def _trap_k(n: int) -> np.ndarray:
    # k = -(n-1)/2 .. (n-1)/2; half-integers when n is even
    return np.arange(n) - (n - 1) / 2.0


def trapezoidal_sqrt(n: int, h: float | None = None) -> PoleResidue:
    """Trapezoidal-rule approximant of sqrt(x), in pole-residue form.

    Poles sit at -exp(2kh); rewriting x/(exp(2kh) + x) = 1 + p_k/(x - p_k)
    gives residues (2h/pi) exp(kh) p_k plus one constant term. The partial
    fraction split is exact algebra, but its floating-point evaluation loses
    relative accuracy near x = 0 once the constant term is large (n around 20
    and beyond); :func:`trapezoidal_sqrt_direct` keeps the cancellation-free
    original form.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if h is None:
        h = trapezoidal_step(n)
    if h <= 0:
        raise ValueError("h must be > 0")
    k = _trap_k(n)
    poles = -np.exp(2.0 * k * h)
    residues = (2.0 * h / np.pi) * np.exp(k * h) * poles
    c0 = (2.0 * h / np.pi) * float(np.exp(k * h).sum())
    return PoleResidue(poles=poles, residues=residues, poly_coeffs=np.array([c0]))


def trapezoidal_sqrt_direct(x, n: int, h: float | None = None):
    """Direct summation (2hx/pi) sum_k exp(kh)/(exp(2kh) + x).

    Exact zero at x = 0; serves as the independent evaluation route for the
    pole-residue form.
    """
    if h is None:
        h = trapezoidal_step(n)
    x_arr = np.asarray(x, dtype=float)
    k = _trap_k(n)
    terms = np.exp(k * h)[None, :] / (np.exp(2.0 * k * h)[None, :] + x_arr.reshape(-1, 1))
    out = (2.0 * h / np.pi) * x_arr.reshape(-1) * terms.sum(axis=1)
    return float(out[0]) if np.isscalar(x) else out.reshape(x_arr.shape)


def stenger_step(n: int) -> float:
    """Default node/pole spacing pi/sqrt(n)."""
    return float(np.pi / np.sqrt(n))


def stenger_interpolant(f: Callable, n: int, h: float | None = None) -> NodePoleInterpolant:
    """Rational interpolant with poles -exp(-(k-1)h) and nodes mirroring them.

    Interpolates f at x_0 = 0 and x_k = exp(-(k-1)h), k = 1..n, by the unique
    degree-n rational function with simple poles p_k = -x_k. The square system
    is solved by column-scaled QR; conditioning grows quickly with n, which
    caps the achievable interpolation accuracy around n of 40.

    Raises:
        IllPosedError: if the interpolation matrix is numerically singular.
        EvaluationError: if f is non-finite at a node.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if h is None:
        h = stenger_step(n)
    inner = np.exp(-(np.arange(1, n + 1) - 1.0) * h)
    nodes = np.concatenate([[0.0], inner])
    poles = -inner
    values = np.asarray(f(nodes), dtype=float)
    if values.shape != nodes.shape:
        values = np.array([f(x) for x in nodes], dtype=float)
    if not np.all(np.isfinite(values)):
        x_bad = float(nodes[np.argmax(~np.isfinite(values))])
        raise EvaluationError(f"f is non-finite at node x={x_bad!r}", x=x_bad)
    A = np.hstack([np.ones((n + 1, 1)), kernels.cauchy_matrix(nodes, poles)])
    coeffs, rank = scaled_lstsq(A, values)
    if rank < n + 1:
        raise IllPosedError(
            f"interpolation matrix is numerically singular (rank {rank} of {n + 1})",
            effective_rank=rank,
        )
    return NodePoleInterpolant(nodes=nodes, poles=poles, values=values, coeffs=coeffs)


def _check_pole_proximity(x_arr: np.ndarray, poles: np.ndarray):
    for j, p in enumerate(poles):
        tol = POLE_TOL * max(abs(p), 1e-300)
        hits = np.abs(x_arr - p) < tol
        if hits.any():
            x_bad = complex(x_arr[np.argmax(hits)])
            raise PoleEvaluationError(
                f"evaluation point {x_bad} hits pole {j} at {p}",
                x=x_bad, pole_index=j,
            )


def _newman_eval_real(r: NewmanForm, x: np.ndarray) -> np.ndarray:
    t = np.sqrt(x)
    q = kernels.newman_ratio(t, r.xi, 2 * r.n)
    return t * (1.0 - q) / (1.0 + q)


def _newman_eval_complex(r: NewmanForm, x: np.ndarray) -> np.ndarray:
    t = np.sqrt(x.astype(complex))
    xik = r.xi ** np.arange(2 * r.n)
    log_den = np.log(t[:, None] + xik[None, :]).sum(axis=1)
    num = xik[None, :] - t[:, None]
    if np.any(num == 0):
        return _newman_eval_complex_hit(t, xik)
    log_num = np.log(num).sum(axis=1)
    q = np.exp(log_num - log_den)
    small = np.abs(q) <= 1.0
    out = np.empty_like(t)
    out[small] = t[small] * (1.0 - q[small]) / (1.0 + q[small])
    inv = 1.0 / q[~small]
    out[~small] = t[~small] * (inv - 1.0) / (inv + 1.0)
    return out


def _newman_eval_complex_hit(t, xik):
    # exact cancellation p(-t) = 0: ratio collapses to 1
    out = np.empty_like(t)
    for i, ti in enumerate(t):
        num = xik - ti
        if np.any(num == 0):
            out[i] = ti
        else:
            q = np.exp(np.log(num).sum() - np.log(ti + xik).sum())
            out[i] = ti * (1.0 - q) / (1.0 + q)
    return out


def _eval_newman(r: NewmanForm, x_arr: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(x_arr) or np.any(x_arr < 0):
        vals = _newman_eval_complex(r, x_arr.astype(complex))
    else:
        vals = _newman_eval_real(r, x_arr.astype(float))
    if not np.all(np.isfinite(vals)):
        x_bad = x_arr[np.argmax(~np.isfinite(vals))]
        raise EvaluationError(f"evaluation is non-finite at x={x_bad!r}", x=x_bad)
    return vals


def _eval_pole_residue(r: PoleResidue, x_arr: np.ndarray) -> np.ndarray:
    _check_pole_proximity(x_arr, r.poles)
    real_case = (
        not np.iscomplexobj(x_arr)
        and not np.iscomplexobj(r.poles)
        and not np.iscomplexobj(r.residues)
    )
    if real_case:
        return kernels.pole_residue_eval(
            x_arr.astype(float),
            np.asarray(r.poles, dtype=float),
            np.asarray(r.residues, dtype=float),
            np.asarray(r.poly_coeffs, dtype=float),
        )
    out = np.zeros(x_arr.shape, dtype=complex)
    if len(r.poles):
        out += (1.0 / (x_arr[:, None] - r.poles[None, :])) @ r.residues
    acc = np.zeros_like(out)
    for c in np.asarray(r.poly_coeffs)[::-1]:
        acc = acc * x_arr + c
    return out + acc


def _eval_interpolant(r: NodePoleInterpolant, x_arr: np.ndarray) -> np.ndarray:
    _check_pole_proximity(x_arr, r.poles)
    if np.iscomplexobj(x_arr):
        basis = 1.0 / (x_arr[:, None] - r.poles[None, :])
        return r.coeffs[0] + basis @ r.coeffs[1:]
    return r.coeffs[0] + kernels.cauchy_matrix(x_arr.astype(float), r.poles) @ r.coeffs[1:]


def evaluate(r: RationalApproximant, x):
    """Evaluate an approximant at x (scalar or array, real or complex).

    Raises:
        PoleEvaluationError: if x is within relative :data:`POLE_TOL` of a
            stored pole.
        EvaluationError: if the evaluation turns out non-finite.
    """
    scalar = np.isscalar(x)
    x_arr = np.atleast_1d(np.asarray(x))
    if isinstance(r, NewmanForm):
        vals = _eval_newman(r, x_arr)
    elif isinstance(r, PoleResidue):
        vals = _eval_pole_residue(r, x_arr)
    elif isinstance(r, NodePoleInterpolant):
        vals = _eval_interpolant(r, x_arr)
    else:
        raise TypeError(f"not a rational approximant: {type(r)!r}")
    return vals[0].item() if scalar else vals
