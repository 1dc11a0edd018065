import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize, minimize_scalar
from scipy.special import gammaln

from measures import Gaussian1D, GaussianNd
from measures.base_measure import Measure
from models.result_model import ScaleEstimates
from models.solver_model import SolverSetting
from solver.base_solver import Solver
from util.errors import DomainError
from util.rng import make_stream, split
from util.settings import settings

MOMENT_SAMPLE = 1 << 16
MOMENT_STREAM_KEY = 0x4D4F4D


def _moment_sample(m: Measure) -> np.ndarray:
    return m.sample(MOMENT_SAMPLE, make_stream(settings.seed, MOMENT_STREAM_KEY))


def _isotropic(m: Measure):
    """(mean, s) when m is N(mean, s^2 I), else None."""
    if isinstance(m, Gaussian1D):
        return np.array([m.m]), m.sigma
    if isinstance(m, GaussianNd):
        s2 = m.covariance[0, 0]
        if np.allclose(m.covariance, s2 * np.eye(m.dim)):
            return m.mean(), math.sqrt(s2)
    return None


def _gaussian_norm_moment(d: int, q: float) -> float:
    """E|Z|^q for Z ~ N(0, I_d)."""
    return math.exp(q / 2.0 * math.log(2.0) + gammaln((d + q) / 2.0) - gammaln(d / 2.0))


def _central_moment_1d(m: Measure, q: float, a: float) -> float:
    lo, hi = m.effective_support()
    edges = sorted({lo[0], hi[0], min(max(a, lo[0]), hi[0])})
    return sum(quad(lambda t: abs(t - a) ** q * m.pdf(t), u, v, limit=200)[0] for u, v in zip(edges[:-1], edges[1:]))


def absolute_moment(m: Measure, q: float) -> float:
    """
    M_q(μ) = ∫ |ξ|^q μ(dξ).

    Exact sums for empirical measures, quadrature for 1D analytic ones, the closed form
    for centred isotropic Gaussians and a fixed 2^16-point sample otherwise.
    """
    if not q > 0:
        raise DomainError(f"moment order must be positive, got {q}")
    if m.is_empirical:
        return float(np.mean(np.linalg.norm(m.points, axis=1) ** q))
    iso = _isotropic(m)
    if iso is not None and np.all(iso[0] == 0):
        return iso[1] ** q * _gaussian_norm_moment(m.dim, q)
    if m.dim == 1:
        return _central_moment_1d(m, q, 0.0)
    return float(np.mean(np.linalg.norm(_moment_sample(m), axis=1) ** q))


def sigma_q(m: Measure, q: float) -> float:
    """σ_q(μ) = min_a (∫ |ξ - a|^q μ(dξ))^{1/q}."""
    if not q >= 1:
        raise DomainError(f"sigma_q needs q >= 1, got {q}")
    iso = _isotropic(m)
    if iso is not None:
        return iso[1] * _gaussian_norm_moment(m.dim, q) ** (1.0 / q)
    if m.dim == 1 and m.is_analytic:
        lo, hi = m.effective_support()
        best = minimize_scalar(lambda a: _central_moment_1d(m, q, a), bounds=(lo[0], hi[0]), method='bounded',
                               options={'xatol': 1e-10})
        return float(best.fun ** (1.0 / q))
    points = m.points if m.is_empirical else _moment_sample(m)

    def objective(a):
        return float(np.mean(np.linalg.norm(points - a, axis=1) ** q))

    best = minimize(objective, points.mean(axis=0), method='Nelder-Mead', options={'xatol': 1e-10, 'fatol': 1e-14})
    return float(min(best.fun, objective(points.mean(axis=0))) ** (1.0 / q))


def _root_mean(values: np.ndarray) -> tuple[float, float]:
    """√mean and its delta-method standard error."""
    mean = float(np.mean(values))
    if len(values) < 2 or mean <= 0:
        return math.sqrt(max(mean, 0.0)), 0.0
    se = float(np.std(values, ddof=1) / np.sqrt(len(values)))
    return math.sqrt(mean), se / (2.0 * math.sqrt(mean))


def max_norm_estimates(m: Measure, n: int, reps: int, stream: np.random.Generator):
    """
    Estimates of r_1, r_n and r_2n with standard errors, from paired 2n-point draws.
    """
    if n < 1 or reps < 1:
        raise DomainError(f"n and reps must be positive, got n={n}, reps={reps}")
    max1, maxn, max2n = np.empty(reps), np.empty(reps), np.empty(reps)
    for r in range(reps):
        norms = np.sum(m.sample(2 * n, stream) ** 2, axis=1)
        max1[r] = norms[0]
        maxn[r] = norms[:n].max()
        max2n[r] = norms.max()
    return _root_mean(max1), _root_mean(maxn), _root_mean(max2n)


def scale_estimates(
    m: Measure,
    n: int,
    reps: int,
    K: int,
    stream: np.random.Generator,
    q: float = 3.0,
    solver_settings: SolverSetting | None = None,
) -> ScaleEstimates:
    """
    Scale quantities entering the clustering-performance bounds.

    r_1, r_n and r_{2n} (r_n = ∥max_{i<=n}|X_i|∥_2) come from the same 2n-point draw in
    each replication, so r_1 <= r_n <= r_{2n} holds for the estimates; ρ̂ and ê* come
    from a multistart solve.

    Parameters
    ----------
    m : Measure
    n : int
        Sample size of r_n.
    reps : int
        Replications of the maxima.
    K : int
        Quantization level.
    stream : numpy Generator
    q : float
        Moment order of M_q and σ_q (2 + η).
    solver_settings : SolverSetting, optional
        Settings of the multistart solve; QLAB_REFERENCE_RESTARTS restarts by default.
    """
    draws, solve_stream = split(stream, 2)
    (r1, r1_se), (rn, rn_se), (r2n, r2n_se) = max_norm_estimates(m, n, reps, draws)

    solver_settings = solver_settings or SolverSetting(restarts=settings.reference_restarts)
    _, e_star_hat, rho_hat = Solver(m, solver_settings).best_of(K, stream=solve_stream)
    return ScaleEstimates(
        r1=r1, r1_std_error=r1_se,
        rn=rn, rn_std_error=rn_se,
        r2n=r2n, r2n_std_error=r2n_se,
        rho_hat=rho_hat,
        e_star_hat=e_star_hat,
        m2=math.sqrt(m.second_moment()),
        q=q,
        M_q=absolute_moment(m, q),
        sigma_q=sigma_q(m, q),
    )
