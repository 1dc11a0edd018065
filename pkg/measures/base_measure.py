from abc import ABC, abstractmethod

import numpy as np
from scipy import stats
from scipy.special import ndtr

from models.data_model import CellMoments, TailDescriptor
from util.errors import DomainError, UnsupportedOperation

TAIL_PROBABILITY = 1e-12


class Measure(ABC):
    """
    A probability measure on R^d.

    Subclasses are immutable after construction. One-dimensional measures expose
    `cdf`, `quantile` and `cell_moments`; analytic measures expose `pdf`.

    Parameters
    ----------
    tail : TailDescriptor, optional
        Tail parameters of the density. Defaults to the descriptor implied by the family
        (see `default_tail`); they are trusted, never verified.
    """

    kind: str = "measure"
    dim: int = 1
    is_empirical: bool = False

    def __init__(self, tail: TailDescriptor | None = None):
        self.tail = tail if tail is not None else self.default_tail()
        self.spec = None

    @property
    def is_analytic(self) -> bool:
        return not self.is_empirical

    def label(self) -> str:
        return self.spec or repr(self)

    def default_tail(self) -> TailDescriptor | None:
        return None

    def pdf(self, xi):
        raise UnsupportedOperation(f"{self.kind} has no density")

    def cdf(self, x):
        raise UnsupportedOperation(f"cdf needs a 1D measure, {self.kind} has d={self.dim}")

    def quantile(self, p):
        raise UnsupportedOperation(f"quantile needs a 1D measure, {self.kind} has d={self.dim}")

    def moments(self, a, b):
        raise UnsupportedOperation(f"cell moments need a 1D measure, {self.kind} has d={self.dim}")

    def cell_moments(self, a: float, b: float) -> CellMoments:
        """
        Mass, first and second moment of the measure restricted to the interval (a, b).

        Bounds may be infinite. Continuous measures do not distinguish open and closed
        ends; empirical measures use the half-open interval (a, b].
        """
        if a > b:
            raise DomainError(f"cell bounds must satisfy a <= b, got ({a}, {b})")
        mass, first, second = self.moments(np.array([a], dtype=float), np.array([b], dtype=float))
        return CellMoments(mass=float(mass[0]), first=float(first[0]), second=float(second[0]))

    @abstractmethod
    def sample(self, n: int, stream: np.random.Generator) -> np.ndarray:
        """Draw n i.i.d. points as an (n, d) array; deterministic given the stream."""

    @abstractmethod
    def mean(self) -> np.ndarray:
        pass

    @abstractmethod
    def second_moment(self) -> float:
        """E|X|^2."""

    @abstractmethod
    def effective_support(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-axis (lo, hi) arrays holding all but a 1e-12 tail on each side."""

    def truncation_radius(self) -> float:
        lo, hi = self.effective_support()
        return float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))

    def _check_probability(self, p):
        p = np.asarray(p, dtype=float)
        if np.any(~(p > 0)) or np.any(~(p < 1)):
            raise DomainError("quantile levels must lie in the open interval (0, 1)")
        return p


class AnalyticMeasure1D(Measure):
    """
    One-dimensional measure backed by a frozen scipy.stats distribution.

    Subclasses supply the closed-form interval moments.
    """

    def __init__(self, dist, tail: TailDescriptor | None = None):
        self._dist = dist
        super().__init__(tail)

    def pdf(self, xi):
        value = self._dist.pdf(np.asarray(xi, dtype=float))
        return float(value) if np.ndim(value) == 0 else value

    def cdf(self, x):
        value = self._dist.cdf(np.asarray(x, dtype=float))
        return float(value) if np.ndim(value) == 0 else value

    def quantile(self, p):
        value = self._dist.ppf(self._check_probability(p))
        return float(value) if np.ndim(value) == 0 else value

    def sample(self, n: int, stream: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise DomainError(f"sample size must be positive, got {n}")
        return np.asarray(self._dist.rvs(size=n, random_state=stream), dtype=float).reshape(n, 1)

    def mean(self) -> np.ndarray:
        return np.array([self._dist.mean()])

    def variance(self) -> float:
        return float(self._dist.var())

    def second_moment(self) -> float:
        return float(self._dist.mean() ** 2 + self._dist.var())

    def effective_support(self):
        lo, hi = self._dist.support()
        if np.isinf(lo):
            lo = self._dist.ppf(TAIL_PROBABILITY)
        if np.isinf(hi):
            hi = self._dist.isf(TAIL_PROBABILITY)
        return np.array([lo], dtype=float), np.array([hi], dtype=float)


class Uniform1D(AnalyticMeasure1D):
    kind = "uniform1d"

    def __init__(self, a: float, b: float, tail: TailDescriptor | None = None):
        if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
            raise DomainError(f"uniform bounds must be finite with a < b, got ({a}, {b})")
        self.a, self.b = float(a), float(b)
        super().__init__(stats.uniform(loc=a, scale=b - a), tail)

    def moments(self, a, b):
        h = 1.0 / (self.b - self.a)
        u = np.clip(a, self.a, self.b)
        v = np.clip(b, self.a, self.b)
        v = np.maximum(u, v)
        mass = (v - u) * h
        first = 0.5 * (v - u) * (v + u) * h
        second = (v - u) * (v * v + u * v + u * u) / 3.0 * h
        return mass, first, second

    def __repr__(self):
        return f"uniform:{self.a:g},{self.b:g}"


def _phi(z):
    return np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)


def _z_phi(z):
    # z φ(z), with the limit 0 at ±inf
    finite = np.isfinite(z)
    safe = np.where(finite, z, 0.0)
    return np.where(finite, safe * _phi(safe), 0.0)


class Gaussian1D(AnalyticMeasure1D):
    kind = "gaussian1d"

    def __init__(self, m: float, sigma: float, tail: TailDescriptor | None = None):
        if not sigma > 0:
            raise DomainError(f"gaussian sigma must be positive, got {sigma}")
        self.m, self.sigma = float(m), float(sigma)
        super().__init__(stats.norm(loc=m, scale=sigma), tail)

    def default_tail(self):
        return TailDescriptor(kind="hyper-exponential", theta=1.0 / (2.0 * self.sigma ** 2), kappa=2.0)

    def cdf(self, x):
        value = ndtr((np.asarray(x, dtype=float) - self.m) / self.sigma)
        return float(value) if np.ndim(value) == 0 else value

    def moments(self, a, b):
        alpha = (np.asarray(a, dtype=float) - self.m) / self.sigma
        beta = (np.asarray(b, dtype=float) - self.m) / self.sigma
        # upper-tail form keeps relative accuracy for cells far right of the mean
        mass = np.where(alpha > 0, ndtr(-alpha) - ndtr(-beta), ndtr(beta) - ndtr(alpha))
        d_phi = _phi(alpha) - _phi(beta)
        m, s = self.m, self.sigma
        first = m * mass + s * d_phi
        second = m * m * mass + 2.0 * m * s * d_phi + s * s * (mass + _z_phi(alpha) - _z_phi(beta))
        return mass, first, second

    def __repr__(self):
        return f"gauss:{self.m:g},{self.sigma:g}"


def _exp_partial_moments(u, v):
    """
    Integrals of z^k e^{-z} over [u, v] ⊂ [0, inf] for k = 0, 1, 2.
    """
    def primitives(z):
        finite = np.isfinite(z)
        safe = np.where(finite, z, 0.0)
        e = np.where(finite, np.exp(-safe), 0.0)
        return e, (safe + 1.0) * e, (safe * safe + 2.0 * safe + 2.0) * e

    pu, pv = primitives(u), primitives(v)
    return tuple(np.maximum(lo - hi, 0.0) for lo, hi in zip(pu, pv))


class Laplace1D(AnalyticMeasure1D):
    kind = "laplace1d"

    def __init__(self, m: float, scale: float, tail: TailDescriptor | None = None):
        if not scale > 0:
            raise DomainError(f"laplace scale must be positive, got {scale}")
        self.m, self.scale = float(m), float(scale)
        super().__init__(stats.laplace(loc=m, scale=scale), tail)

    def default_tail(self):
        return TailDescriptor(kind="hyper-exponential", theta=1.0 / self.scale, kappa=1.0)

    def moments(self, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        m, s = self.m, self.scale
        # right half: x = m + s z
        r0, r1, r2 = _exp_partial_moments((np.maximum(a, m) - m) / s, (np.maximum(b, m) - m) / s)
        # left half: x = m - s z
        l0, l1, l2 = _exp_partial_moments((m - np.minimum(b, m)) / s, (m - np.minimum(a, m)) / s)
        mass = 0.5 * (r0 + l0)
        first = 0.5 * (m * (r0 + l0) + s * (r1 - l1))
        second = 0.5 * (m * m * (r0 + l0) + 2.0 * m * s * (r1 - l1) + s * s * (r2 + l2))
        return mass, first, second

    def __repr__(self):
        return f"laplace:{self.m:g},{self.scale:g}"


class Exponential1D(AnalyticMeasure1D):
    kind = "exponential1d"

    def __init__(self, rate: float, shift: float = 0.0, tail: TailDescriptor | None = None):
        if not rate > 0:
            raise DomainError(f"exponential rate must be positive, got {rate}")
        self.rate, self.shift = float(rate), float(shift)
        super().__init__(stats.expon(loc=shift, scale=1.0 / rate), tail)

    def default_tail(self):
        return TailDescriptor(kind="hyper-exponential", theta=self.rate, kappa=1.0)

    def moments(self, a, b):
        lam, t = self.rate, self.shift
        u = lam * (np.maximum(np.asarray(a, dtype=float), t) - t)
        v = lam * (np.maximum(np.asarray(b, dtype=float), t) - t)
        e0, e1, e2 = _exp_partial_moments(u, v)
        mass = e0
        first = t * e0 + e1 / lam
        second = t * t * e0 + 2.0 * t * e1 / lam + e2 / lam ** 2
        return mass, first, second

    def __repr__(self):
        return f"exp:{self.rate:g},{self.shift:g}"
