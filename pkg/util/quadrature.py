import numpy as np
from numpy.polynomial.legendre import leggauss


def _nodes(order: int, a: float, b: float):
    t, w = leggauss(order)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * t, half * w


def _rule(func, a, b, order):
    x, w = _nodes(order, a, b)
    values = np.asarray(func(x), dtype=float)
    return np.tensordot(w, values, axes=(0, 0))


def adaptive_gauss_legendre(func, a: float, b: float, tol: float = 1e-12, order: int = 16, max_depth: int = 40):
    """
    Integrate `func` over [a, b] by recursive bisection of a fixed Gauss-Legendre rule.

    `func` takes an array of nodes of shape (n,) and returns values of shape (n, ...),
    so vector- and matrix-valued integrands are integrated in one pass. A panel is
    accepted when the rule on the panel and the sum of the rules on its halves agree
    to `tol` (absolute, split between halves).

    Returns
    -------
    value : ndarray or float
    error : float
        Sum of the accepted panel discrepancies.
    """
    if b <= a:
        # zero-width rule: zeros with the integrand's shape
        return _rule(func, a, a, order), 0.0

    # fixed node set per panel, so the result does not depend on evaluation order
    stack = [(a, b, _rule(func, a, b, order), tol, 0)]
    total = None
    error = 0.0
    while stack:
        lo, hi, whole, local_tol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _rule(func, lo, mid, order)
        right = _rule(func, mid, hi, order)
        diff = float(np.max(np.abs(left + right - whole)))
        if diff <= local_tol or depth >= max_depth:
            piece = left + right
            total = piece if total is None else total + piece
            error += diff
        else:
            stack.append((mid, hi, right, 0.5 * local_tol, depth + 1))
            stack.append((lo, mid, left, 0.5 * local_tol, depth + 1))
    return total, error


def triangle_rule(vertices: np.ndarray, order: int = 12):
    """
    Nodes and weights of a collapsed (Duffy) tensor Gauss-Legendre rule on a triangle.

    Parameters
    ----------
    vertices : ndarray of shape (3, 2)
    order : int
        Points per direction; the rule has order**2 nodes.
    """
    t, w = leggauss(order)
    u = 0.5 * (t + 1.0)
    wu = 0.5 * w
    uu, vv = np.meshgrid(u, u, indexing='ij')
    ww = np.outer(wu, wu)
    a, b, c = vertices
    s = uu * (1.0 - vv)
    r = uu * vv
    points = a + s[..., None] * (b - a) + r[..., None] * (c - a)
    area2 = abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    weights = ww * uu * area2
    return points.reshape(-1, 2), weights.reshape(-1)


def polygon_rule(polygon: np.ndarray, order: int = 12, refine: int = 2):
    """
    Quadrature nodes and weights on a convex polygon.

    The polygon is fanned into triangles from its first vertex; each triangle is split
    `refine` times into four similar sub-triangles before applying `triangle_rule`.
    """
    polygon = np.asarray(polygon, dtype=float)
    if len(polygon) < 3:
        return np.empty((0, 2)), np.empty(0)
    triangles = [np.array([polygon[0], polygon[i], polygon[i + 1]]) for i in range(1, len(polygon) - 1)]
    for _ in range(refine):
        finer = []
        for a, b, c in triangles:
            ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
            finer.extend([np.array([a, ab, ca]), np.array([ab, b, bc]), np.array([ca, bc, c]), np.array([ab, bc, ca])])
        triangles = finer
    points, weights = zip(*(triangle_rule(tri, order) for tri in triangles))
    return np.concatenate(points), np.concatenate(weights)
