"""Variable-transform quadrature on [-1, 1] and its rational-function view.

The rules are equispaced trapezoidal rules after a change of variables: the
single-exponential tanh map gives root-exponential accuracy for endpoint
singularities, the double-exponential tanh-sinh map converges almost
exponentially. Every rule doubles as the rational function
r(t) = sum w_k / (t - x_k), whose closeness to the characteristic function
phi(t) = log((t+1)/(t-1)) on a contour certifies the quadrature error: this
is the contour-integral identity checked by :func:`gtm_error_identity_check`,
with the 1-norm of phi - r along a real segment as the workable error gauge
(:func:`gtm_l1_norm`).

Node distances to the endpoints fall below machine epsilon for the
double-exponential map; they are therefore carried separately in
cancellation-free form (``rule.left_gaps``), and the float64 ``nodes`` array
may round the outermost entries to +-1 even though the represented nodes are
strictly interior.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import GradedGrid  # noqa: F401  (re-exported grid type in signatures)
from .exceptions import BranchCutError, EvaluationError, PoleEvaluationError
from .potential import graded_segment

__all__ = [
    "VariableTransform",
    "QuadratureRule",
    "transform",
    "default_step",
    "build_rule",
    "integrate",
    "endpoint_distances",
    "characteristic_phi",
    "rule_rational",
    "tanh_rule_rational",
    "tanh_sinh_rule_rational",
    "Rectangle",
    "gtm_error_identity_check",
    "gtm_l1_norm",
    "reference_integral",
]

_NODE_TOL = 1e-14


@dataclass(frozen=True)
class VariableTransform:
    """Odd increasing map g: R -> (-1, 1) with derivative g_prime."""

    kind: str
    g: Callable
    g_prime: Callable


def _sech(z):
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)


def transform(kind: str) -> VariableTransform:
    if kind == "tanh":
        return VariableTransform(kind, np.tanh, lambda s: _sech(s) ** 2)
    if kind == "tanh_sinh":
        return VariableTransform(
            kind,
            lambda s: np.tanh(0.5 * np.pi * np.sinh(s)),
            lambda s: 0.5 * np.pi * np.cosh(s) * _sech(0.5 * np.pi * np.sinh(s)) ** 2,
        )
    raise ValueError(f"kind must be 'tanh' or 'tanh_sinh', got {kind!r}")


def default_step(kind: str, n: int) -> float:
    """Empirical step sizes: pi/sqrt(n) (tanh), 1.2 log(2 pi n)/n (tanh-sinh)."""
    if kind == "tanh":
        return float(np.pi / np.sqrt(n))
    if kind == "tanh_sinh":
        return float(1.2 * np.log(2.0 * np.pi * n) / n)
    raise ValueError(f"kind must be 'tanh' or 'tanh_sinh', got {kind!r}")


@dataclass(frozen=True)
class QuadratureRule:
    """Truncated trapezoidal rule in transformed variables.

    Attributes:
        kind: "tanh" or "tanh_sinh".
        nodes: n nodes, odd-symmetric (x_{-k} = -x_k bitwise); the outermost
            entries may round to +-1.0 in float64 even though the represented
            nodes are interior (see ``left_gaps``).
        weights: positive, even-symmetric weights h * g'(kh).
        h: step size.
        n: number of nodes; k runs over -(n-1)/2 .. (n-1)/2, half-integers
            for even n.
        left_gaps: cancellation-free distances 1 + x_k of the left-half
            nodes, ascending (closest node first).
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    h: float
    n: int
    left_gaps: np.ndarray


def _gap_z(kind: str, s: np.ndarray) -> np.ndarray:
    # distance to the endpoint is 1 - tanh(z) = 2 exp(-2z)/(1 + exp(-2z))
    return s if kind == "tanh" else 0.5 * np.pi * np.sinh(s)


def build_rule(kind: str, n: int, h: float | None = None) -> QuadratureRule:
    """n-point tanh or tanh-sinh rule with the empirical default step size.

    Raises:
        ValueError: for n < 1, h <= 0, or parameters so large that weights
            underflow to zero.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tr = transform(kind)
    if h is None:
        h = default_step(kind, n)
    if h <= 0:
        raise ValueError("h must be > 0")
    # positive half of the index range, mirrored for exact symmetry
    k_pos = np.arange(n // 2, dtype=float) + (0.5 if n % 2 == 0 else 1.0)
    s = k_pos * h
    x_pos = tr.g(s)
    w_pos = h * tr.g_prime(s)
    z = _gap_z(kind, s)
    e = np.exp(-2.0 * z)
    gaps_pos = 2.0 * e / (1.0 + e)  # 1 - g(s), cancellation-free
    if n % 2 == 1:
        center_x = np.array([0.0])
        center_w = np.array([h * tr.g_prime(0.0)])
        nodes = np.concatenate([-x_pos[::-1], center_x, x_pos])
        weights = np.concatenate([w_pos[::-1], center_w, w_pos])
    else:
        nodes = np.concatenate([-x_pos[::-1], x_pos])
        weights = np.concatenate([w_pos[::-1], w_pos])
    if np.any(weights <= 0.0):
        raise ValueError("weights underflow to zero; reduce n or h")
    left_gaps = gaps_pos[::-1]  # node order: closest to -1 first
    return QuadratureRule(kind=kind, nodes=nodes, weights=weights, h=float(h),
                          n=n, left_gaps=left_gaps)


def integrate(rule: QuadratureRule, f: Callable) -> float:
    """sum w_k f(x_k), accumulated in symmetric pairs (odd f gives exactly 0).

    Raises:
        EvaluationError: if f is non-finite at a node.
    """
    x = rule.nodes
    vals = np.asarray(f(x), dtype=float)
    if vals.shape != x.shape:
        vals = np.array([f(xi) for xi in x], dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        x_bad = float(x[np.argmax(bad)])
        raise EvaluationError(f"integrand non-finite at node x={x_bad!r}", x=x_bad)
    m = rule.n // 2
    pair_sum = float(np.sum(rule.weights[:m] * (vals[:m] + vals[::-1][:m])))
    if rule.n % 2 == 1:
        pair_sum += float(rule.weights[m] * vals[m])
    return pair_sum


def endpoint_distances(rule: QuadratureRule) -> np.ndarray:
    """Distances 1 + x_k of the left-half nodes, ascending, cancellation-free."""
    return rule.left_gaps.copy()


def characteristic_phi(t):
    """log((t+1)/(t-1)), principal branch, continuous off the cut [-1, 1].

    Raises:
        BranchCutError: for t on [-1, 1].
    """
    scalar = np.isscalar(t)
    t_arr = np.atleast_1d(np.asarray(t))
    if np.iscomplexobj(t_arr):
        on_cut = (t_arr.imag == 0.0) & (np.abs(t_arr.real) <= 1.0)
        if on_cut.any():
            raise BranchCutError(f"t={t_arr[np.argmax(on_cut)]} lies on the cut [-1, 1]")
        vals = np.log((t_arr + 1.0) / (t_arr - 1.0))
    else:
        if np.any(np.abs(t_arr) <= 1.0):
            bad = float(t_arr[np.argmax(np.abs(t_arr) <= 1.0)])
            raise BranchCutError(f"t={bad} lies on the cut [-1, 1]")
        vals = np.log1p(2.0 / (t_arr - 1.0))
    return vals[0].item() if scalar else vals


def rule_rational(rule: QuadratureRule, t):
    """Partial-fraction sum r(t) = sum w_k / (t - x_k).

    Raises:
        PoleEvaluationError: if t falls within relative 1e-14 of a node.
    """
    scalar = np.isscalar(t)
    t_arr = np.atleast_1d(np.asarray(t))
    for j, xk in enumerate(rule.nodes):
        if np.any(np.abs(t_arr - xk) < _NODE_TOL * max(abs(xk), 1.0)):
            raise PoleEvaluationError(f"t collides with node {j} at {xk}",
                                      x=t, pole_index=j)
    vals = np.sum(rule.weights[None, :] / (t_arr[:, None] - rule.nodes[None, :]), axis=1)
    return vals[0].item() if scalar else vals


def tanh_rule_rational(n: int, h: float, t):
    """Closed form h sum sech^2(kh) / (t - tanh(kh)) for the tanh rule."""
    k = np.arange(n) - (n - 1) / 2.0
    s = k * h
    t_arr = np.atleast_1d(np.asarray(t))
    vals = h * np.sum(_sech(s)[None, :] ** 2 / (t_arr[:, None] - np.tanh(s)[None, :]), axis=1)
    return vals[0].item() if np.isscalar(t) else vals


def tanh_sinh_rule_rational(n: int, h: float, t):
    """Closed form for the tanh-sinh rule's rational function."""
    k = np.arange(n) - (n - 1) / 2.0
    s = k * h
    sh = 0.5 * np.pi * np.sinh(s)
    w = 0.5 * np.pi * np.cosh(s) * _sech(sh) ** 2
    t_arr = np.atleast_1d(np.asarray(t))
    vals = h * np.sum(w[None, :] / (t_arr[:, None] - np.tanh(sh)[None, :]), axis=1)
    return vals[0].item() if np.isscalar(t) else vals


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned contour that must strictly enclose [-1, 1]."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < -1.0 < 1.0 < self.re_max and self.im_min < 0.0 < self.im_max):
            raise ValueError("rectangle must strictly enclose [-1, 1]")

    def corners(self):
        return (
            complex(self.re_min, self.im_min),
            complex(self.re_max, self.im_min),
            complex(self.re_max, self.im_max),
            complex(self.re_min, self.im_max),
        )


def reference_integral(f: Callable, n: int = 200) -> float:
    """High-accuracy reference for the integral of f over [-1, 1]."""
    return integrate(build_rule("tanh_sinh", n), f)


def gtm_error_identity_check(
    rule: QuadratureRule,
    f: Callable,
    contour: Rectangle = Rectangle(-2.0, 2.0, -1.0, 1.0),
    I_exact: float | None = None,
    panels: int = 64,
    gauss_order: int = 8,
):
    """Both sides of the contour-integral identity for the quadrature error.

    Returns (lhs, rhs): lhs = I - I_n with I from ``I_exact`` (or a 200-point
    double-exponential reference), rhs = the contour integral
    (1/2 pi i) closed-int f(t) (phi(t) - r(t)) dt over the rectangle,
    discretized with composite Gauss panels on each side.
    """
    I = reference_integral(f) if I_exact is None else float(I_exact)
    lhs = I - integrate(rule, f)
    xg, wg = np.polynomial.legendre.leggauss(gauss_order)
    corners = contour.corners()
    total = 0.0 + 0.0j
    for i in range(4):
        z0, z1 = corners[i], corners[(i + 1) % 4]
        step = (z1 - z0) / panels
        for p in range(panels):
            za = z0 + step * p
            mid = za + step / 2.0
            half = step / 2.0
            tpts = mid + half * xg
            vals = f(tpts) * (characteristic_phi(tpts) - rule_rational(rule, tpts))
            total += half * np.sum(wg * vals)
    rhs = total / (2.0j * np.pi)
    return float(lhs), float(rhs.real)


def gtm_l1_norm(rule: QuadratureRule, segment, mesh_size: int = 2000) -> float:
    """Integral of |phi(t) - r(t)| over a real segment outside (-1, 1).

    The mesh is graded toward the endpoint adjacent to the cut, where the
    logarithmic divergence of phi is integrable; trapezoid weights finish the
    job.

    Raises:
        ValueError: if the segment overlaps (-1, 1).
        PoleEvaluationError: if a mesh point collides with a node.
    """
    a, b = float(segment[0]), float(segment[1])
    if a == b:
        return 0.0
    if a > b:
        a, b = b, a
    if not (b <= -1.0 or a >= 1.0):
        raise ValueError(f"segment [{a}, {b}] must satisfy b <= -1 or a >= 1")
    cluster_at = b if b <= -1.0 else a
    pts, w = graded_segment(a, b, cluster_at, count=mesh_size)
    vals = np.abs(characteristic_phi(pts) - rule_rational(rule, pts))
    return float(np.sum(w * vals))
