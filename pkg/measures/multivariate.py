import numpy as np
from scipy import stats
from scipy.linalg import cholesky, eigvalsh, LinAlgError

from measures.base_measure import TAIL_PROBABILITY, Measure
from models.data_model import TailDescriptor
from util.errors import DomainError


class GaussianNd(Measure):
    """
    Gaussian N(mean, covariance) on R^d; the covariance must be symmetric positive definite.
    """

    kind = "gaussianNd"

    def __init__(self, mean, covariance, tail: TailDescriptor | None = None):
        self._mean = np.array(mean, dtype=float).reshape(-1)
        cov = np.array(covariance, dtype=float)
        d = len(self._mean)
        if cov.shape != (d, d):
            raise DomainError(f"covariance must be {d}x{d}, got shape {cov.shape}")
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
            raise DomainError("covariance must be symmetric")
        try:
            self._chol = cholesky(cov, lower=True)
        except LinAlgError:
            raise DomainError("covariance must be positive definite")
        self.covariance = cov
        self.dim = d
        self._dist = stats.multivariate_normal(mean=self._mean, cov=cov)
        super().__init__(tail)

    def lambda_max(self) -> float:
        return float(eigvalsh(self.covariance)[-1])

    def default_tail(self):
        return TailDescriptor(kind="hyper-exponential", theta=1.0 / (2.0 * self.lambda_max()), kappa=2.0)

    def pdf(self, xi):
        xi = np.asarray(xi, dtype=float)
        value = self._dist.pdf(xi.reshape(-1, self.dim))
        return float(np.ravel(value)[0]) if xi.ndim == 1 else np.atleast_1d(value)

    def sample(self, n: int, stream: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise DomainError(f"sample size must be positive, got {n}")
        return self._mean + stream.standard_normal((n, self.dim)) @ self._chol.T

    def mean(self) -> np.ndarray:
        return self._mean.copy()

    def second_moment(self) -> float:
        return float(self._mean @ self._mean + np.trace(self.covariance))

    def truncation_radius(self) -> float:
        """Radius around the mean outside of which the mass is below 1e-12."""
        return float(np.sqrt(self.lambda_max() * stats.chi2.isf(TAIL_PROBABILITY, self.dim)))

    def effective_support(self):
        r = self.truncation_radius()
        return self._mean - r, self._mean + r

    def __repr__(self):
        return f"gaussNd:{','.join(f'{v:g}' for v in self._mean)};{','.join(f'{v:g}' for v in self.covariance.ravel())}"


class UniformBox(Measure):
    kind = "uniformBox"

    def __init__(self, lo, hi, tail: TailDescriptor | None = None):
        self.lo = np.array(lo, dtype=float).reshape(-1)
        self.hi = np.array(hi, dtype=float).reshape(-1)
        if self.lo.shape != self.hi.shape:
            raise DomainError("box corners must have the same dimension")
        if not np.all(np.isfinite(self.lo)) or not np.all(np.isfinite(self.hi)) or np.any(self.hi <= self.lo):
            raise DomainError("box corners must be finite with lo < hi on every axis")
        self.dim = len(self.lo)
        self.volume = float(np.prod(self.hi - self.lo))
        super().__init__(tail)

    def pdf(self, xi):
        xi = np.asarray(xi, dtype=float)
        pts = xi.reshape(-1, self.dim)
        inside = np.all((pts >= self.lo) & (pts <= self.hi), axis=1)
        value = np.where(inside, 1.0 / self.volume, 0.0)
        return float(value[0]) if xi.ndim == 1 else value

    def sample(self, n: int, stream: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise DomainError(f"sample size must be positive, got {n}")
        return self.lo + (self.hi - self.lo) * stream.random((n, self.dim))

    def mean(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def second_moment(self) -> float:
        return float(np.sum((self.lo ** 2 + self.lo * self.hi + self.hi ** 2) / 3.0))

    def effective_support(self):
        return self.lo.copy(), self.hi.copy()

    def __repr__(self):
        return f"box:{','.join(f'{v:g}' for v in self.lo)};{','.join(f'{v:g}' for v in self.hi)}"
