import numpy as np

from measures.base_measure import Measure
from util.errors import DomainError, UnsupportedOperation


class EmpiricalMeasure(Measure):
    """
    Uniform measure (1/n) Σ δ_{X_i} on a point cloud.

    In 1D the sorted atoms and their prefix sums are kept, so cdf, quantile and
    interval moments cost a binary search. Intervals are half-open (a, b].

    Parameters
    ----------
    points : array-like of shape (n, d) or (n,)
    """

    kind = "empirical"
    is_empirical = True

    def __init__(self, points, tail=None):
        array = np.array(points, dtype=float)
        if array.ndim == 1:
            array = array.reshape(-1, 1)
        if array.ndim != 2 or array.shape[0] < 1:
            raise DomainError(f"empirical measure needs an (n, d) array with n >= 1, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise DomainError("empirical points must be finite")
        array.setflags(write=False)
        self.points = array
        self.n, self.dim = array.shape
        self.weights = np.full(self.n, 1.0 / self.n)
        if self.dim == 1:
            self.sorted = np.sort(array[:, 0])
            self._cum1 = np.concatenate([[0.0], np.cumsum(self.sorted)])
            self._cum2 = np.concatenate([[0.0], np.cumsum(self.sorted ** 2)])
        super().__init__(tail)

    def distinct_points(self) -> np.ndarray:
        return np.unique(self.points, axis=0)

    def cdf(self, x):
        if self.dim != 1:
            return super().cdf(x)
        value = np.searchsorted(self.sorted, np.asarray(x, dtype=float), side='right') / self.n
        return float(value) if np.ndim(value) == 0 else value

    def quantile(self, p):
        if self.dim != 1:
            return super().quantile(p)
        p = self._check_probability(p)
        # inf{x : F(x) >= p}; the small shift absorbs rounding in p = i/n
        index = np.clip(np.ceil(self.n * p - 1e-9).astype(int), 1, self.n) - 1
        value = self.sorted[index]
        return float(value) if np.ndim(value) == 0 else value

    def moments(self, a, b):
        if self.dim != 1:
            return super().moments(a, b)
        lo = np.searchsorted(self.sorted, np.asarray(a, dtype=float), side='right')
        hi = np.searchsorted(self.sorted, np.asarray(b, dtype=float), side='right')
        hi = np.maximum(lo, hi)
        mass = (hi - lo) / self.n
        first = (self._cum1[hi] - self._cum1[lo]) / self.n
        second = (self._cum2[hi] - self._cum2[lo]) / self.n
        return mass, first, second

    def sample(self, n: int, stream: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise DomainError(f"sample size must be positive, got {n}")
        return self.points[stream.integers(0, self.n, size=n)]

    def pdf(self, xi):
        raise UnsupportedOperation("an empirical measure has no density")

    def mean(self) -> np.ndarray:
        return self.points.mean(axis=0)

    def second_moment(self) -> float:
        return float(np.mean(np.sum(self.points ** 2, axis=1)))

    def effective_support(self):
        return self.points.min(axis=0), self.points.max(axis=0)

    def truncation_radius(self) -> float:
        return float(np.max(np.linalg.norm(self.points, axis=1)))

    def __repr__(self):
        return f"empirical(n={self.n}, d={self.dim})"
