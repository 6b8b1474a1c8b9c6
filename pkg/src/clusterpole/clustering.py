"""Exponentially clustered pole and node sets, uniform and tapered.

Distances to the singularity are geometric (equispaced on a log scale) for
uniform clustering; tapered clustering spaces log-distances proportionally to
sqrt(k), which thins the density out linearly near the singularity.

Indexing convention: tapered sets are generated from k = 1 (the closest pole
is k = 1, at distance exp(sigma*(1 - sqrt(n)))), uniform sets from k = 0 (the
closest pole is k = n-1, at distance exp(-(n-1)h)). Either way the stored
arrays are sorted by distance, closest first.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ClusteredPoleSet",
    "TaperDiagnostic",
    "uniform_poles",
    "tapered_poles",
    "lightning_poles",
    "analyze_taper",
    "LIGHTNING_SIGMA",
]

#: default tapering rate for corner pole ladders in the Laplace solver
LIGHTNING_SIGMA = 4.0


@dataclass(frozen=True)
class ClusteredPoleSet:
    """Negative real poles sorted by distance to the origin, closest first.

    Attributes:
        poles: pole locations on (-inf, 0), |poles| strictly increasing.
        kind: "uniform", "tapered", or "custom".
        n: number of poles.
        sigma: clustering rate (log-spacing h for uniform sets, tapering
            coefficient for tapered sets).
        beta: overall distance scale.
    """

    poles: np.ndarray
    kind: str
    n: int
    sigma: float
    beta: float = 1.0

    def __post_init__(self):
        d = self.distances
        if len(d) and (np.any(d <= 0) or np.any(np.diff(d) <= 0)):
            raise ValueError("pole distances must be positive and strictly increasing")

    @property
    def distances(self) -> np.ndarray:
        return np.abs(self.poles)


@dataclass(frozen=True)
class TaperDiagnostic:
    """Straight-line quality of log-distances against sqrt(k) and against k."""

    slope_sqrtk: float
    r2_sqrtk: float
    slope_k: float
    r2_k: float


def uniform_poles(n: int, h: float) -> ClusteredPoleSet:
    """Uniformly clustered poles p_k = -exp(-k h), k = 0..n-1.

    Log-distances are exactly equispaced with spacing h; the closest pole sits
    at distance exp(-(n-1)h).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if h <= 0:
        raise ValueError("h must be > 0")
    k = np.arange(n - 1, -1, -1, dtype=float)
    return ClusteredPoleSet(poles=-np.exp(-k * h), kind="uniform", n=n, sigma=float(h))


def tapered_poles(n: int, sigma: float, scale: float = 1.0) -> ClusteredPoleSet:
    """Tapered poles p_k = -scale * exp(sigma*(sqrt(k) - sqrt(n))), k = 1..n.

    Log-distances are equispaced in sqrt(k); the set thins out toward the
    singularity and the farthest pole sits at distance ``scale``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    k = np.arange(1, n + 1, dtype=float)
    d = scale * np.exp(sigma * (np.sqrt(k) - np.sqrt(n)))
    return ClusteredPoleSet(poles=-d, kind="tapered", n=n, sigma=float(sigma),
                            beta=float(scale))


def lightning_poles(n: int, sigma: float = LIGHTNING_SIGMA) -> ClusteredPoleSet:
    """Corner pole ladder d_k = exp(-sigma*(sqrt(n) - sqrt(k))), k = 1..n.

    Distances are relative to a unit corner scale; the Laplace solver
    multiplies by its own geometric scale per corner.
    """
    return tapered_poles(n, sigma)


def _line_fit(t: np.ndarray, y: np.ndarray):
    A = np.vstack([t, np.ones_like(t)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), float(min(max(r2, 0.0), 1.0))


def analyze_taper(distances) -> TaperDiagnostic:
    """Fit log(d_k) against sqrt(k) and against k (k = 1..m, ordinary LS).

    A tapered set lines up with the sqrt(k) axis (r2_sqrtk ~ 1); a uniform set
    lines up with the k axis.

    Raises:
        ValueError: unless distances are positive and strictly increasing.
    """
    d = np.asarray(distances, dtype=float)
    if len(d) < 2:
        raise ValueError("need at least 2 distances")
    if np.any(d <= 0):
        raise ValueError("distances must be positive")
    if np.any(np.diff(d) <= 0):
        raise ValueError("distances must be strictly increasing")
    k = np.arange(1, len(d) + 1, dtype=float)
    y = np.log(d)
    slope_s, r2_s = _line_fit(np.sqrt(k), y)
    slope_k, r2_k = _line_fit(k, y)
    return TaperDiagnostic(slope_sqrtk=slope_s, r2_sqrtk=r2_s,
                           slope_k=slope_k, r2_k=r2_k)
