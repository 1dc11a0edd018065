import numpy as np
from scipy.integrate import quad
from scipy.linalg import eigh
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from measures import EmpiricalMeasure, Gaussian1D, GaussianNd
from measures.base_measure import Measure
from models.result_model import TransportResult
from util.errors import DomainError, SizeLimitError, UnsupportedOperation
from util.settings import settings

QUAD_LIMIT = 500


def _check_order(p: int) -> int:
    if p not in (1, 2):
        raise DomainError(f"order p must be 1 or 2, got {p}")
    return int(p)


def _check_1d(*measures: Measure):
    for m in measures:
        if m.dim != 1:
            raise UnsupportedOperation(f"1D transport needs 1D measures, got {m.kind} in d={m.dim}")


def _empirical_vs_empirical(a: EmpiricalMeasure, b: EmpiricalMeasure, p: int) -> float:
    # both quantile functions are constant between consecutive merged jumps
    jumps = np.union1d(np.arange(a.n + 1) / a.n, np.arange(b.n + 1) / b.n)
    mid = 0.5 * (jumps[1:] + jumps[:-1])
    qa = a.sorted[np.minimum((mid * a.n).astype(int), a.n - 1)]
    qb = b.sorted[np.minimum((mid * b.n).astype(int), b.n - 1)]
    return float(np.sum(np.diff(jumps) * np.abs(qa - qb) ** p))


def _empirical_vs_analytic(a: EmpiricalMeasure, m: Measure, p: int) -> float:
    """Σ_i ∫ |ξ - y_(i)|^p over the μ-quantile band of the i-th order statistic."""
    n = a.n
    y = a.sorted
    inner = np.atleast_1d(m.quantile(np.arange(1, n) / n)) if n > 1 else np.empty(0)
    lows = np.concatenate([[-np.inf], inner])
    highs = np.concatenate([inner, [np.inf]])
    if p == 2:
        mass, first, second = m.moments(lows, highs)
        return float(np.sum(np.maximum(second - 2.0 * y * first + y * y * mass, 0.0)))
    split = np.clip(y, lows, highs)
    mass_l, first_l, _ = m.moments(lows, split)
    mass_r, first_r, _ = m.moments(split, highs)
    return float(np.sum(np.maximum(y * mass_l - first_l, 0.0) + np.maximum(first_r - y * mass_r, 0.0)))


def w_p_1d(m: Measure, nu: Measure, p: int = 2) -> TransportResult:
    """
    W_p between 1D measures through the quantile coupling, (∫_0^1 |F^{-1}(u) - G^{-1}(u)|^p du)^{1/p}.

    Empirical quantile functions are step functions; the integral is evaluated exactly
    over their steps. Two analytic measures are integrated by adaptive quadrature,
    whose error estimate is reported as `error_bound`.

    Parameters
    ----------
    m, nu : Measure
        One-dimensional analytic or empirical measures.
    p : int
        1 or 2.
    """
    p = _check_order(p)
    _check_1d(m, nu)
    error = 0.0
    if m.is_empirical and nu.is_empirical:
        value = _empirical_vs_empirical(m, nu, p)
    elif m.is_empirical:
        value = _empirical_vs_analytic(m, nu, p)
    elif nu.is_empirical:
        value = _empirical_vs_analytic(nu, m, p)
    else:
        value, error = quad(lambda u: abs(m.quantile(u) - nu.quantile(u)) ** p, 0.0, 1.0, limit=QUAD_LIMIT)
        value = max(value, 0.0)
    distance = value ** (1.0 / p)
    bound = (value + error) ** (1.0 / p) - distance if error else 0.0
    return TransportResult(distance=distance, p=p, method="quantile1d", error_bound=bound)


def w_p_sorted(a: EmpiricalMeasure, b: EmpiricalMeasure, p: int = 2) -> TransportResult:
    p = _check_order(p)
    if not (a.is_empirical and b.is_empirical):
        raise UnsupportedOperation("the sorted coupling compares two empirical measures")
    _check_1d(a, b)
    if a.n != b.n:
        raise DomainError(f"sorted coupling needs equal sizes, got {a.n} and {b.n}")
    distance = float(np.mean(np.abs(a.sorted - b.sorted) ** p) ** (1.0 / p))
    return TransportResult(distance=distance, p=p, method="sorted")


def w2_assignment(a: EmpiricalMeasure, b: EmpiricalMeasure, limit: int | None = None) -> TransportResult:
    """
    Exact W_2 between two empirical measures of equal size by optimal assignment.

    Parameters
    ----------
    a, b : EmpiricalMeasure
        Clouds with the same n and d.
    limit : int, optional
        Largest accepted n, QLAB_ASSIGNMENT_LIMIT by default.
    """
    if not (a.is_empirical and b.is_empirical):
        raise UnsupportedOperation("assignment compares two empirical measures")
    if a.dim != b.dim:
        raise DomainError(f"clouds live in different dimensions ({a.dim} and {b.dim})")
    if a.n != b.n:
        raise DomainError(f"assignment needs equal sizes, got {a.n} and {b.n}")
    limit = settings.assignment_limit if limit is None else limit
    if a.n > limit:
        raise SizeLimitError(f"assignment is limited to n <= {limit}, got {a.n}")
    cost = cdist(a.points, b.points, 'sqeuclidean')
    rows, cols = linear_sum_assignment(cost)
    distance = float(np.sqrt(cost[rows, cols].sum() / a.n))
    return TransportResult(distance=distance, p=2, method="assignment")


def _gaussian_parameters(g: Measure):
    if isinstance(g, Gaussian1D):
        return np.array([g.m]), np.array([[g.sigma ** 2]])
    if isinstance(g, GaussianNd):
        return g.mean(), g.covariance
    raise UnsupportedOperation(f"closed-form W_2 needs Gaussian measures, got {g.kind}")


def _psd_sqrt(matrix: np.ndarray, strict: bool) -> np.ndarray:
    values, vectors = eigh(0.5 * (matrix + matrix.T))
    if strict and np.any(values <= 0):
        raise DomainError("covariance must be symmetric positive definite")
    return (vectors * np.sqrt(np.maximum(values, 0.0))) @ vectors.T


def w2_gaussian(g1: Measure, g2: Measure) -> TransportResult:
    """√(|m1 - m2|^2 + tr(Σ1 + Σ2 - 2 (Σ1^{1/2} Σ2 Σ1^{1/2})^{1/2}))."""
    m1, s1 = _gaussian_parameters(g1)
    m2, s2 = _gaussian_parameters(g2)
    if len(m1) != len(m2):
        raise DomainError(f"Gaussians live in different dimensions ({len(m1)} and {len(m2)})")
    root1 = _psd_sqrt(s1, strict=True)
    _psd_sqrt(s2, strict=True)
    cross = _psd_sqrt(root1 @ s2 @ root1, strict=False)
    squared = float(np.sum((m1 - m2) ** 2) + np.trace(s1 + s2 - 2.0 * cross))
    return TransportResult(distance=float(np.sqrt(max(squared, 0.0))), p=2, method="gaussian-closed-form")


def wasserstein(a: Measure, b: Measure, p: int = 2) -> TransportResult:
    """Exact W_p by the best available method for the pair."""
    p = _check_order(p)
    if a.dim == 1 and b.dim == 1:
        return w_p_1d(a, b, p)
    if p != 2:
        raise UnsupportedOperation("in d >= 2 only W_2 is available")
    if a.is_empirical and b.is_empirical:
        return w2_assignment(a, b)
    if isinstance(a, (Gaussian1D, GaussianNd)) and isinstance(b, (Gaussian1D, GaussianNd)):
        return w2_gaussian(a, b)
    raise UnsupportedOperation(f"no exact W_2 between {a.kind} and {b.kind} in d >= 2")
