"""Potential-theory diagnostics for interpolation-with-poles configurations.

The central object is phi(z) = prod(z - x_j) / prod(z - p_k) for interpolation
points x_j and poles p_k. Its modulus controls interpolation error bounds: the
sup-norm bound uses the ratio tau = max_E |phi| / min_Gamma |phi|, which goes
vacuous (tau >= 1) when the pole contour touches the approximation set, while
the 1-norm bound stays finite there.

The second half of the module is a strip model for clustering near an
endpoint singularity: a harmonic potential on the half-plane with a hinge
boundary condition, transplanted by s = log t to an infinite strip of height
pi. Both the exact Poisson-formula solution and its bilinear mid-strip
approximation are provided, together with the linear pole density and the
closed-form rate predictions they imply.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .exceptions import PoleEvaluationError

__all__ = [
    "PointConfiguration",
    "StripModel",
    "phi",
    "log_abs_phi",
    "tau",
    "discrete_potential",
    "hermite_error_bound_l1",
    "graded_segment",
    "strip_potential_exact",
    "strip_potential_bilinear",
    "strip_density",
    "predict_rates",
    "STATED_FIG12_RATES",
]

#: empirically stated rate constants (uniform, tapered) for the sqrt(x)
#: linear-minimax experiment; kept separate from the closed-form predictions
#: of predict_rates, which do not reduce to these numbers (see ledger)
STATED_FIG12_RATES = (2.2, 4.4)

_COLLISION_TOL = 1e-14


@dataclass(frozen=True)
class PointConfiguration:
    """Interpolation points and poles, one more point than pole or trimmed equal."""

    interp_points: np.ndarray
    poles: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.interp_points, dtype=complex)
        pls = np.asarray(self.poles, dtype=complex)
        object.__setattr__(self, "interp_points", pts)
        object.__setattr__(self, "poles", pls)
        for name, arr in (("interp_points", pts), ("poles", pls)):
            if len(np.unique(arr)) != len(arr):
                raise ValueError(f"{name} must be distinct")
        if len(pts) - len(pls) not in (0, 1):
            raise ValueError(
                "need len(interp_points) - len(poles) in {0, 1}, got "
                f"{len(pts)} points and {len(pls)} poles"
            )

    @property
    def n(self) -> int:
        return len(self.poles) if len(self.poles) else len(self.interp_points)


def _check_collisions(z_arr: np.ndarray, targets: np.ndarray, what: str):
    for j, t in enumerate(targets):
        tol = _COLLISION_TOL * max(abs(t), 1e-300)
        hits = np.abs(z_arr - t) <= tol
        if hits.any():
            z_bad = complex(z_arr[np.argmax(hits)])
            raise PoleEvaluationError(
                f"evaluation point {z_bad} collides with {what} {j}",
                x=z_bad, pole_index=j,
            )


def phi(cfg: PointConfiguration, z):
    """prod(z - x_j) / prod(z - p_k), evaluated through sums of complex logs."""
    scalar = np.isscalar(z)
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_collisions(z_arr, cfg.poles, "pole")
    s = np.zeros_like(z_arr)
    if len(cfg.interp_points):
        s += np.log(z_arr[:, None] - cfg.interp_points[None, :]).sum(axis=1)
    if len(cfg.poles):
        s -= np.log(z_arr[:, None] - cfg.poles[None, :]).sum(axis=1)
    vals = np.exp(s)
    return vals[0].item() if scalar else vals


def log_abs_phi(cfg: PointConfiguration, z):
    """log |phi(z)| for an array of points (overflow-free)."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_collisions(z_arr, cfg.poles, "pole")
    _check_collisions(z_arr, cfg.interp_points, "interpolation point")
    return kernels.log_abs_phi(z_arr, cfg.interp_points, cfg.poles)


def tau(cfg: PointConfiguration, E_samples, Gamma_samples) -> float:
    """max over E of |phi| divided by min over Gamma of |phi|.

    Warns when the ratio is >= 1, in which case the sup-norm error bound it
    feeds is vacuous.
    """
    E = np.atleast_1d(np.asarray(E_samples, dtype=complex))
    G = np.atleast_1d(np.asarray(Gamma_samples, dtype=complex))
    if not len(E) or not len(G):
        raise ValueError("sample lists must be nonempty")
    log_ratio = float(np.max(log_abs_phi(cfg, E)) - np.min(log_abs_phi(cfg, G)))
    value = float(np.exp(log_ratio))
    if value >= 1.0:
        warnings.warn("tau >= 1: the sup-norm error bound is vacuous", RuntimeWarning)
    return value


def discrete_potential(cfg: PointConfiguration, z):
    """u(z) = (1/n) [sum log|z - x_j| - sum log|z - p_k|], n = pole count.

    Satisfies exp(n u(z)) = |phi(z)|.
    """
    scalar = np.isscalar(z)
    vals = log_abs_phi(cfg, z) / cfg.n
    return float(vals[0]) if scalar else vals


def graded_segment(a: float, b: float, cluster_at: float, count: int = 2000,
                   min_rel: float = 1e-12):
    """Segment mesh graded toward one endpoint, with trapezoid weights.

    Returns (points, weights); points run from a to b, spaced geometrically in
    distance from ``cluster_at`` (which must be one of the endpoints), and the
    weights integrate a sampled function over [a, b] by the trapezoid rule.
    The clustered endpoint itself is approached to min_rel times the segment
    length but never touched.
    """
    if not (cluster_at == a or cluster_at == b):
        raise ValueError("cluster_at must be one of the endpoints")
    if count < 2:
        raise ValueError("count must be >= 2")
    length = abs(b - a)
    if length == 0:
        return np.array([a], dtype=float), np.array([0.0])
    d = length * np.logspace(np.log10(min_rel), 0.0, count)
    pts = cluster_at + np.sign((a + b) / 2 - cluster_at) * d
    pts = pts[np.argsort(pts)]
    gaps = np.diff(pts)
    w = np.zeros(count)
    w[:-1] += gaps / 2
    w[1:] += gaps / 2
    return pts, w


def hermite_error_bound_l1(
    cfg: PointConfiguration,
    x: complex,
    f_bound_const: float,
    alpha: float,
    zc: complex,
    gamma_points,
    gamma_weights,
) -> float:
    """1-norm interpolation error bound (1/2pi) ||phi(x)/phi(t) |t-zc|^(a-1)||_1 * C.

    ``gamma_points``/``gamma_weights`` discretize the contour piece that
    matters with quadrature weights; ``f_bound_const`` bounds the remaining
    sup-norm factor. Finite even when the sup-norm ratio tau is vacuous.

    Raises:
        ValueError: for alpha outside (0, 1] or a sample sitting at zc.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    t = np.atleast_1d(np.asarray(gamma_points, dtype=complex))
    w = np.atleast_1d(np.asarray(gamma_weights, dtype=float))
    if t.shape != w.shape:
        raise ValueError("gamma_points and gamma_weights must match in shape")
    dist = np.abs(t - zc)
    if alpha < 1.0 and np.any(dist == 0.0):
        raise ValueError("sample at zc is non-integrable for alpha < 1")
    log_x = float(log_abs_phi(cfg, np.array([x], dtype=complex))[0])
    log_t = log_abs_phi(cfg, t)
    integrand = np.exp(log_x - log_t) * dist ** (alpha - 1.0)
    return float(f_bound_const * np.sum(w * integrand) / (2.0 * np.pi))


# ---------------------------------------------------------------------------
# strip model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StripModel:
    """Hinge-boundary harmonic model on the strip 0 < Im s < pi.

    Boundary data: 0 on the top edge and on the bottom edge left of
    log(epsilon); (alpha/n)(x - log(epsilon)) on the bottom edge right of it.
    alpha is the singularity exponent, n the pole budget, epsilon the
    distance of the closest pole.
    """

    alpha: float
    n: int
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must be in (0, 1)")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def log_eps(self) -> float:
        return float(np.log(self.epsilon))


_GL10 = np.polynomial.legendre.leggauss(10)
_GL21 = np.polynomial.legendre.leggauss(21)


def _adaptive_gauss(f, a: float, b: float, tol: float) -> float:
    """Adaptive Gauss-Legendre with a 10/21-point error estimate per panel."""
    stack = [(a, b)]
    total = 0.0
    while stack:
        a0, b0 = stack.pop()
        mid, half = (a0 + b0) / 2.0, (b0 - a0) / 2.0
        coarse = half * float(np.sum(_GL10[1] * f(mid + half * _GL10[0])))
        fine = half * float(np.sum(_GL21[1] * f(mid + half * _GL21[0])))
        if abs(fine - coarse) <= tol * max(1.0, abs(fine)) or (b0 - a0) < 1e-12:
            total += fine
        else:
            stack.append((a0, mid))
            stack.append((mid, b0))
    return total


def strip_potential_exact(m: StripModel, s: complex, tol: float = 1e-11) -> float:
    """Poisson-formula solution of the strip problem at s = x + iy.

    u = (alpha/n)/(2 pi) * integral_0^inf xi sin(y) / (cosh(xi - X) - cos(y)) dxi
    with X = x - log(epsilon). The integrand peaks at xi = X and decays like
    exp(-(xi - X)); the integral is truncated at max(40, X + 45), beyond which
    the tail is negligible at double precision.

    Raises:
        ValueError: for s outside the open strip 0 < Im s < pi.
    """
    s = complex(s)
    x, y = s.real, s.imag
    if not 0.0 < y < np.pi:
        raise ValueError(f"s must satisfy 0 < Im s < pi, got Im s = {y}")
    X = x - m.log_eps
    sin_y, cos_y = np.sin(y), np.cos(y)

    def integrand(xi):
        return xi * sin_y / (np.cosh(xi - X) - cos_y)

    upper = max(40.0, X + 45.0)
    if 0.0 < X < upper:
        val = _adaptive_gauss(integrand, 0.0, X, tol) + _adaptive_gauss(integrand, X, upper, tol)
    else:
        val = _adaptive_gauss(integrand, 0.0, upper, tol)
    return float(m.alpha / m.n * val / (2.0 * np.pi))


def strip_potential_bilinear(m: StripModel, s: complex) -> float:
    """Mid-strip approximation (alpha/n) (1 - y/pi) (x - log(epsilon))."""
    s = complex(s)
    return float(m.alpha / m.n * (1.0 - s.imag / np.pi) * (s.real - m.log_eps))


def strip_density(m: StripModel, x: float) -> float:
    """Linear pole density (alpha/pi^2)(x - log(epsilon)) on the bottom edge.

    Integrating the density from log(epsilon) to 0 gives the pole budget;
    setting that integral to n fixes epsilon = exp(-pi sqrt(2 n / alpha)).

    Raises:
        ValueError: for x < log(epsilon).
    """
    if x < m.log_eps:
        raise ValueError(f"x must be >= log(epsilon) = {m.log_eps}, got {x}")
    return float(m.alpha / np.pi**2 * (x - m.log_eps))


def predict_rates(alpha: float, n: int, kind: str):
    """Closest-pole distance and accuracy scale for a clustering strategy.

    uniform: (exp(-pi sqrt(n/alpha)), exp(-pi sqrt(alpha n)));
    tapered: (exp(-pi sqrt(2n/alpha)), exp(-pi sqrt(2 alpha n))).
    Tapering doubles the squared decay exponent of the accuracy for any
    (alpha, n).
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind == "uniform":
        return (float(np.exp(-np.pi * np.sqrt(n / alpha))),
                float(np.exp(-np.pi * np.sqrt(alpha * n))))
    if kind == "tapered":
        return (float(np.exp(-np.pi * np.sqrt(2.0 * n / alpha))),
                float(np.exp(-np.pi * np.sqrt(2.0 * alpha * n))))
    raise ValueError(f"kind must be 'uniform' or 'tapered', got {kind!r}")
