import logging
from typing import NamedTuple

import numpy as np

from measures.base_measure import Measure
from measures.multivariate import UniformBox
from quantizer.cells2d import bisector, quadrature_statistics, truncation_box
from quantizer.grid import as_quantizer
from util.errors import InvalidQuantizer, UnsupportedOperation
from util.quadrature import adaptive_gauss_legendre

logger = logging.getLogger(__name__)

DEGENERACY_SCALE = 1e-8
FACET_TOL = 1e-10


class Facet(NamedTuple):
    i: int
    j: int
    origin: np.ndarray
    direction: np.ndarray
    t0: float
    t1: float
    touches_box: bool


def _clip_line(origin, direction, lo, hi, constraints):
    """
    Parameter interval of {origin + t·direction} inside the box and the half-planes.

    Returns (t0, t1, touches_box); t0 >= t1 when the set is empty.
    """
    t0, t1 = -np.inf, np.inf
    box0 = box1 = False
    for k in range(2):
        if direction[k] == 0.0:
            if not lo[k] <= origin[k] <= hi[k]:
                return 0.0, 0.0, False
            continue
        a = (lo[k] - origin[k]) / direction[k]
        b = (hi[k] - origin[k]) / direction[k]
        a, b = min(a, b), max(a, b)
        if a > t0:
            t0, box0 = a, True
        if b < t1:
            t1, box1 = b, True
    for normal, offset in constraints:
        slope = normal @ direction
        rest = offset - normal @ origin
        if slope == 0.0:
            if rest < 0:
                return 0.0, 0.0, False
        elif slope > 0:
            if rest / slope < t1:
                t1, box1 = rest / slope, False
        elif rest / slope > t0:
            t0, box0 = rest / slope, False
    return t0, t1, box0 or box1


def voronoi_facets(points: np.ndarray, lo, hi) -> list[Facet]:
    """Shared edges V_i ∩ V_j (i < j) of the Voronoi diagram clipped to the box [lo, hi]."""
    facets = []
    K = len(points)
    for i in range(K):
        for j in range(i + 1, K):
            normal, _ = bisector(points, i, j)
            origin = 0.5 * (points[i] + points[j])
            direction = np.array([-normal[1], normal[0]]) / np.linalg.norm(normal)
            others = [bisector(points, i, l) for l in range(K) if l not in (i, j)]
            t0, t1, touches = _clip_line(origin, direction, lo, hi, others)
            if t1 > t0:
                facets.append(Facet(i, j, origin, direction, t0, t1, touches))
    return facets


def _facet_integral(facet: Facet, points, m: Measure, left: int, right: int) -> np.ndarray:
    """∫ (x_left - ξ) ⊗ (x_right - ξ) f(ξ) / |x_j - x_i| dσ(ξ) over the facet."""
    xl, xr = points[left], points[right]
    gap = np.linalg.norm(points[facet.j] - points[facet.i])

    def integrand(t):
        y = facet.origin + t[:, None] * facet.direction
        f = np.atleast_1d(m.pdf(y))
        return f[:, None, None] * (xl - y)[:, :, None] * (xr - y)[:, None, :] / gap

    value, _ = adaptive_gauss_legendre(integrand, facet.t0, facet.t1, tol=FACET_TOL)
    return value


def _check(x, m: Measure):
    x = as_quantizer(x)
    if x.dim != 2 or m.dim != 2:
        raise UnsupportedOperation(f"the boundary Hessian is implemented for d = 2, got d = {x.dim}")
    if not m.is_analytic:
        raise UnsupportedOperation("the boundary Hessian needs an analytic measure")
    if x.min_separation() < DEGENERACY_SCALE * max(1.0, x.max_norm()):
        raise InvalidQuantizer("centers are too close for the facet integrals")
    return x


def _box(m: Measure, truncation: float | None):
    if truncation is None:
        return truncation_box(m)
    centre = m.mean()
    lo, hi = centre - truncation, centre + truncation
    if isinstance(m, UniformBox):
        lo, hi = np.maximum(lo, m.lo), np.minimum(hi, m.hi)
    return lo, hi


def hessian_2d_boundary(x, m: Measure, truncation: float | None = None) -> np.ndarray:
    """
    Hessian of the distortion in d = 2 from Voronoi facet integrals.

    Off-diagonal blocks are 2 ∫_{V_i ∩ V_j} (x_i - ξ) ⊗ (x_j - ξ) / |x_j - x_i| dμ and
    the diagonal blocks 2 μ(V_i) I - 2 Σ_j ∫_{V_i ∩ V_j} (x_i - ξ) ⊗ (x_i - ξ) / |x_j - x_i| dμ.
    Unbounded facets are cut at the truncation box of the measure.

    Parameters
    ----------
    x : Quantizer
        Grid in R^2.
    m : Measure
        gaussianNd or uniformBox in d = 2.
    truncation : float, optional
        Half-width of the box around the mean; defaults to the 1e-12 tail radius.
    """
    x = _check(x, m)
    points = x.points
    lo, hi = _box(m, truncation)
    K = x.K
    H = np.zeros((2 * K, 2 * K))
    mass = quadrature_statistics(points, m).mass
    for i in range(K):
        H[2 * i:2 * i + 2, 2 * i:2 * i + 2] = 2.0 * mass[i] * np.eye(2)
    for facet in voronoi_facets(points, lo, hi):
        i, j = facet.i, facet.j
        cross = 2.0 * _facet_integral(facet, points, m, i, j)
        H[2 * i:2 * i + 2, 2 * j:2 * j + 2] = cross
        H[2 * j:2 * j + 2, 2 * i:2 * i + 2] = cross.T
        H[2 * i:2 * i + 2, 2 * i:2 * i + 2] -= 2.0 * _facet_integral(facet, points, m, i, i)
        H[2 * j:2 * j + 2, 2 * j:2 * j + 2] -= 2.0 * _facet_integral(facet, points, m, j, j)
    return 0.5 * (H + H.T)


def facets_cross_boundary(x, m: Measure, truncation: float | None = None) -> bool:
    """True when m is box-uniform and some facet ends on the box, where the density jumps."""
    x = _check(x, m)
    if not isinstance(m, UniformBox):
        return False
    lo, hi = _box(m, truncation)
    flagged = any(f.touches_box for f in voronoi_facets(x.points, lo, hi))
    if flagged:
        logger.info("facets meet the support boundary; the Hessian there is reported, not certified")
    return flagged
