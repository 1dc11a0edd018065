"""
Closed-form bounds on optimal quantizers and on the performance of empirical quantization.

Universal constants the bounds leave unspecified are explicit arguments.
"""
import math

import numpy as np

from measures import Gaussian1D, GaussianNd
from measures.base_measure import Measure
from models.data_model import TailDescriptor
from models.result_model import RadiusReport
from util.errors import DomainError, NotApplicable, UnsupportedOperation


def _nonnegative(**values):
    for name, value in values.items():
        if value is None:
            raise DomainError(f"missing parameter '{name}'")
        if not value >= 0:
            raise DomainError(f"{name} must be nonnegative, got {value}")


def _positive(**values):
    for name, value in values.items():
        if value is None:
            raise DomainError(f"missing parameter '{name}'")
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")


def perf_bound_thm21(e_star: float, w2: float) -> float:
    """D_{K,μ∞}(x^(n)) - inf D_{K,μ∞} <= 4 e* W_2 + 4 W_2^2."""
    _nonnegative(e_star=e_star, w2=w2)
    return 4.0 * e_star * w2 + 4.0 * w2 ** 2


def quantizer_bound_thm22(lambda_star: float, e_star: float, w2: float) -> float:
    """
    Bound on the squared distance between x^(n) and the optimal grid:
    (8/λ*) e* W_2 + (8/λ*) W_2^2. The distance bound is its square root.
    """
    if lambda_star is None:
        raise DomainError("missing parameter 'lambda_star'")
    if not lambda_star > 0:
        raise NotApplicable(f"the quantizer-distance bound needs lambda_star > 0, got {lambda_star}")
    _nonnegative(e_star=e_star, w2=w2)
    return 8.0 / lambda_star * (e_star * w2 + w2 ** 2)


def quantizer_distance_bound(lambda_star: float, e_star: float, w2: float) -> float:
    return math.sqrt(quantizer_bound_thm22(lambda_star, e_star, w2))


def empirical_rate_prop41(d: int, q: float, n: float) -> float:
    """
    Rate factor of the mean performance for μ with a finite q-th moment:

        n^{-1/4} + n^{-(q-2)/2q}                     if d < 4, q != 4
        n^{-1/4} (log(1+n))^{1/2} + n^{-(q-2)/2q}    if d = 4, q != 4
        n^{-1/d} + n^{-(q-2)/2q}                     if d > 4, q != d/(d-2)

    The multiplicative constant is not included.
    """
    _positive(d=d)
    if not q > 2:
        raise DomainError(f"moment order q must exceed 2, got {q}")
    if not n > 1:
        raise DomainError(f"sample size n must exceed 1, got {n}")
    moment_term = n ** (-(q - 2.0) / (2.0 * q))
    if d <= 4 and q == 4:
        raise NotApplicable("q = 4 is excluded for d <= 4")
    if d > 4 and math.isclose(q, d / (d - 2.0)):
        raise NotApplicable(f"q = d/(d-2) = {d / (d - 2.0):g} is excluded for d = {d}")
    if d < 4:
        return n ** -0.25 + moment_term
    if d == 4:
        return n ** -0.25 * math.sqrt(math.log1p(n)) + moment_term
    return n ** (-1.0 / d) + moment_term


def fournier_guillin_rate(p: float, d: int, q: float, n: float, M_q: float, C: float = 1.0) -> float:
    """
    Mean rate of W_p^p(μ_n, μ) for μ with a finite q-th moment M_q, q > p:
    C M_q^{p/q} times n^{-1/2}, n^{-1/2} log(1+n) or n^{-p/d} (for p > d/2, p = d/2,
    p < d/2), plus n^{-(q-p)/q}.
    """
    _positive(p=p, d=d, n=n, C=C)
    _nonnegative(M_q=M_q)
    if not q > p:
        raise DomainError(f"moment order q must exceed p, got q={q}, p={p}")
    tail = n ** (-(q - p) / q)
    critical = math.isclose(p, d / 2.0)
    if critical or p > d / 2.0:
        if math.isclose(q, 2.0 * p):
            raise NotApplicable("q = 2p is excluded when p >= d/2")
        main = n ** -0.5 * math.log1p(n) if critical else n ** -0.5
    else:
        if math.isclose(q, d / (d - p)):
            raise NotApplicable("q = d/(d-p) is excluded when p < d/2")
        main = n ** (-p / d)
    return C * M_q ** (p / q) * (main + tail)


def standard_gaussian_constant(d: int) -> float:
    """24 (1 + d/2) log 2, the performance constant of N(0, I_d)."""
    return 24.0 * (1.0 + d / 2.0) * math.log(2.0)


def gaussian_performance_constant(m: Measure) -> float:
    """
    C_μ = 24 (1 ∨ log(2 E e^{|X|^2/4})) for X ~ N(m, Σ).

    E e^{|X|^2/4} = det(I - Σ/2)^{-1/2} exp(¼ mᵀ (I - Σ/2)^{-1} m), finite when λ_max(Σ) < 2.
    """
    if isinstance(m, Gaussian1D):
        mean, cov = np.array([m.m]), np.array([[m.sigma ** 2]])
    elif isinstance(m, GaussianNd):
        mean, cov = m.mean(), m.covariance
    else:
        raise UnsupportedOperation(f"the Gaussian constant needs a Gaussian measure, got {m.kind}")
    reduced = np.eye(len(mean)) - 0.5 * cov
    if np.linalg.eigvalsh(reduced)[0] <= 0:
        raise NotApplicable("E exp(|X|^2/4) is infinite when the covariance has an eigenvalue >= 2")
    log_moment = -0.5 * np.linalg.slogdet(reduced)[1] + 0.25 * mean @ np.linalg.solve(reduced, mean)
    return 24.0 * max(1.0, math.log(2.0) + float(log_moment))


def clustering_bound_thm42(kind: str, K: float, n: float, **params) -> float:
    """
    Upper bounds of the mean clustering performance E D_{K,μ}(x^(n)) - inf D_{K,μ}.

    Parameters
    ----------
    kind : str
        `a`: general bound, params r1, r2n, rho.
        `b`: polynomial tail, params C, p > 2, c > d + p, d, gamma (default 1).
        `c`: hyper-exponential tail with kappa >= 2, params C, kappa, d, gamma (default 1);
        with gaussian=True, kappa defaults to 2 and a missing C is the N(0, I_d) constant.
    K : float
        Quantization level.
    n : float
        Sample size.
    """
    _positive(K=K, n=n)
    scale = K / math.sqrt(n)
    if kind == "a":
        r1, r2n, rho = params.get("r1"), params.get("r2n"), params.get("rho")
        _nonnegative(r1=r1, r2n=r2n, rho=rho)
        return 2.0 * scale * (r2n ** 2 + rho ** 2 + 2.0 * r1 * (r2n + rho))

    gamma = params.get("gamma", 1.0)
    d = params.get("d")
    _positive(d=d)
    if kind == "b":
        C, p, c = params.get("C"), params.get("p"), params.get("c")
        _nonnegative(C=C)
        _positive(p=p, c=c)
        if not p > 2:
            raise NotApplicable(f"the polynomial-tail bound needs p > 2, got {p}")
        if not c > d + p:
            raise NotApplicable(f"the polynomial-tail bound needs c > d + p, got c={c}, d+p={d + p}")
        exponent = 2.0 * (p + d) * gamma / (d * (c - p - d))
        return scale * (C * n ** (2.0 / p) + 6.0 * K ** exponent)

    if kind == "c":
        kappa = params.get("kappa", 2.0 if params.get("gaussian") else None)
        _positive(kappa=kappa)
        if kappa < 2:
            raise NotApplicable(f"the hyper-exponential bound needs kappa >= 2, got {kappa}")
        C = params.get("C")
        if C is None and params.get("gaussian"):
            C = standard_gaussian_constant(d)
        _nonnegative(C=C)
        power = 2.0 / kappa
        return C * scale * (1.0 + math.log(n) ** power + gamma * math.log(K) ** power * (1.0 + 2.0 / d) ** power)

    raise DomainError(f"unknown bound kind '{kind}', expected a, b or c")


def bounded_support_bound(K: float, n: float, R: float) -> float:
    """12 K R^2 / √n for μ supported in the ball B(0, R)."""
    _positive(K=K, n=n)
    _nonnegative(R=R)
    return 12.0 * K * R ** 2 / math.sqrt(n)


def zador_upper(C: float, sigma: float, d: int, K: float) -> float:
    """e*_{K,μ} <= C σ_{2+η}(μ) K^{-1/d}."""
    _positive(C=C, sigma=sigma, d=d, K=K)
    return C * sigma * K ** (-1.0 / d)


def radius_bounds(tail: TailDescriptor, d: int, K: float, p: float = 2.0) -> RadiusReport:
    """
    Growth of the maximal radius ρ_K of optimal quantizers.

    Hyper-exponential tails give the asymptotic bound 2 ϑ^{-1/κ} (1 + 2/d)^{1/κ} (log K)^{1/κ},
    and in 1D the exact limit factor (3/ϑ)^{1/κ} of ρ_K / (log K)^{1/κ}. Polynomial tails
    give the limit exponent (p + d) / (d (c - p - d)) of log ρ_K / log K.
    """
    _positive(d=d)
    if K is None or not K >= 2:
        raise DomainError(f"radius bounds need K >= 2, got {K}")
    inputs = {"d": d, "K": K, "p": p, **tail.model_dump()}
    if tail.kind == "hyper-exponential":
        theta, kappa = tail.theta, tail.kappa
        value = 2.0 * theta ** (-1.0 / kappa) * (1.0 + 2.0 / d) ** (1.0 / kappa) * math.log(K) ** (1.0 / kappa)
        exact = (3.0 / theta) ** (1.0 / kappa) if d == 1 else None
        return RadiusReport(kind=tail.kind, value=value, exact_1d_factor=exact, inputs=inputs)
    if not p >= 2:
        raise DomainError(f"the polynomial-tail exponent needs p >= 2, got {p}")
    if not tail.c > d + p:
        raise NotApplicable(f"the polynomial-tail exponent needs c > d + p, got c={tail.c}, d+p={d + p}")
    return RadiusReport(kind=tail.kind, value=(p + d) / (d * (tail.c - p - d)), inputs=inputs)
