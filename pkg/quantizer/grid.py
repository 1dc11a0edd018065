import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from util.errors import InvalidQuantizer


class Quantizer:
    """
    An ordered K-tuple of pairwise distinct points of R^d (an element of F_K).

    One-dimensional grids are stored sorted ascending (F_K^+). Instances are
    immutable: the point array is a read-only copy.

    Parameters
    ----------
    points : array-like of shape (K, d) or (K,)
        A flat sequence is read as K points of R^1.
    sort : bool
        Sort 1D grids. With sort=False an unsorted 1D grid is rejected instead.
    """

    __slots__ = ("_points",)

    def __init__(self, points, sort: bool = True):
        array = np.array(points, dtype=float)
        if array.ndim == 1:
            array = array.reshape(-1, 1)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise InvalidQuantizer(f"expected a K x d array with K >= 1, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidQuantizer("quantizer coordinates must be finite")
        if array.shape[1] == 1:
            if sort:
                array = np.sort(array, axis=0)
            elif np.any(np.diff(array[:, 0]) < 0):
                raise InvalidQuantizer("1D quantizer must be sorted ascending")
        if len(np.unique(array, axis=0)) != len(array):
            raise InvalidQuantizer("quantizer points must be pairwise distinct")
        array.setflags(write=False)
        self._points = array

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def K(self) -> int:
        return self._points.shape[0]

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def flat(self) -> np.ndarray:
        """1D grids as a length-K vector."""
        return self._points[:, 0] if self.dim == 1 else self._points.reshape(-1)

    def min_separation(self) -> float:
        if self.K == 1:
            return np.inf
        diff = self._points[:, None, :] - self._points[None, :, :]
        dist = np.sqrt(np.sum(diff ** 2, axis=-1))
        return float(np.min(dist[np.triu_indices(self.K, 1)]))

    def max_norm(self) -> float:
        return float(np.max(np.linalg.norm(self._points, axis=1)))

    def distance_to(self, other: "Quantizer") -> float:
        """
        Euclidean distance between two grids of equal shape.

        1D grids are compared coordinatewise in sorted order; in d >= 2 the points are
        matched by the cheapest assignment, since grids are equal up to relabelling.
        """
        if other.points.shape != self._points.shape:
            raise InvalidQuantizer("grids must have the same shape")
        if self.dim == 1:
            return float(np.linalg.norm(self._points - other.points))

        cost = cdist(self._points, other.points, 'sqeuclidean')
        rows, cols = linear_sum_assignment(cost)
        return float(np.sqrt(cost[rows, cols].sum()))

    def __len__(self):
        return self.K

    def __eq__(self, other):
        return isinstance(other, Quantizer) and np.array_equal(self._points, other.points)

    def __hash__(self):
        return hash(self._points.tobytes())

    def __repr__(self):
        return f"Quantizer(K={self.K}, d={self.dim}, points={self._points.tolist()})"

    def __reduce__(self):
        return (Quantizer, (np.array(self._points),))


def as_quantizer(x, sort: bool = True) -> Quantizer:
    return x if isinstance(x, Quantizer) else Quantizer(x, sort=sort)
