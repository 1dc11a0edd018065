import numpy as np

from measures.base_measure import Measure
from measures.multivariate import UniformBox
from util.quadrature import polygon_rule

QUADRATURE_ORDER = 12
QUADRATURE_REFINE = 2


def truncation_box(m: Measure) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned box carrying all but a 1e-12 tail of m (the support for box-uniform measures)."""
    if isinstance(m, UniformBox):
        return m.lo, m.hi
    r = m.truncation_radius()
    centre = m.mean()
    return centre - r, centre + r


def box_polygon(lo, hi) -> np.ndarray:
    return np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]], dtype=float)


def clip_polygon(polygon: np.ndarray, normal: np.ndarray, offset: float) -> np.ndarray:
    """
    Sutherland-Hodgman clip of a convex polygon to the half-plane {y : normal·y <= offset}.
    """
    if len(polygon) == 0:
        return polygon
    out = []
    values = polygon @ normal - offset
    for k in range(len(polygon)):
        p, q = polygon[k], polygon[(k + 1) % len(polygon)]
        vp, vq = values[k], values[(k + 1) % len(polygon)]
        if vp <= 0:
            out.append(p)
        if (vp < 0 < vq) or (vq < 0 < vp):
            out.append(p + (vp / (vp - vq)) * (q - p))
    return np.array(out).reshape(-1, 2)


def bisector(points: np.ndarray, i: int, j: int) -> tuple[np.ndarray, float]:
    """Half-plane of points at least as close to x_i as to x_j, as (normal, offset)."""
    normal = points[j] - points[i]
    offset = 0.5 * (points[j] @ points[j] - points[i] @ points[i])
    return normal, offset


def voronoi_cell(points: np.ndarray, i: int, lo, hi) -> np.ndarray:
    polygon = box_polygon(lo, hi)
    for j in range(len(points)):
        if j != i:
            polygon = clip_polygon(polygon, *bisector(points, i, j))
    return polygon


def quadrature_statistics(points: np.ndarray, m: Measure):
    from quantizer.geometry import CellStatistics, Method

    lo, hi = truncation_box(m)
    K = len(points)
    mass = np.zeros(K)
    first = np.zeros((K, 2))
    per_cell = np.zeros(K)
    for i in range(K):
        polygon = voronoi_cell(points, i, lo, hi)
        nodes, weights = polygon_rule(polygon, QUADRATURE_ORDER, QUADRATURE_REFINE)
        if len(nodes) == 0:
            continue
        w = weights * m.pdf(nodes)
        mass[i] = w.sum()
        first[i] = w @ nodes
        per_cell[i] = w @ np.sum((nodes - points[i]) ** 2, axis=1)
    return CellStatistics(mass, first, per_cell, 0.0, Method.QUADRATURE_2D.value)
