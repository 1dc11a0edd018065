import logging

import numpy as np

from measures.base_measure import Measure
from models.result_model import PdCertificate, TridiagonalMatrix
from quantizer.grid import Quantizer
from util.errors import UnsupportedOperation
from util.quadrature import adaptive_gauss_legendre

logger = logging.getLogger(__name__)

LAMBDA_STAR_MARGIN = 1e-8
BISECTION_TOL = 1e-11


def _sorted_grid(x) -> np.ndarray:
    # raw input is not re-sorted: an unsorted grid is not in F_K^+
    q = x if isinstance(x, Quantizer) else Quantizer(x, sort=False)
    if q.dim != 1:
        raise UnsupportedOperation(f"the tridiagonal Hessian is for 1D grids, got d={q.dim}")
    return q.flat()


def _check_measure(m: Measure):
    if m.dim != 1 or not m.is_analytic:
        raise UnsupportedOperation(f"the 1D Hessian needs a 1D analytic measure, got {m.kind}")


def hessian_1d(x, m: Measure) -> TridiagonalMatrix:
    """
    Hessian of the 1D distortion at a sorted grid.

    With cut points c_i = (x_i + x_{i+1})/2, A_i = 2 μ((c_{i-1}, c_i)) and
    B_i = (x_{i+1} - x_i) f(c_i) / 2:

        diag_i = A_i - B_{i-1} - B_i,   off_i = -B_i.

    Parameters
    ----------
    x : Quantizer or array-like
        Sorted, pairwise distinct grid.
    m : Measure
        1D analytic measure with a continuous density.
    """
    _check_measure(m)
    x = _sorted_grid(x)
    cuts = 0.5 * (x[1:] + x[:-1])
    mass, _, _ = m.moments(np.concatenate([[-np.inf], cuts]), np.concatenate([cuts, [np.inf]]))
    A = 2.0 * mass
    B = 0.5 * np.diff(x) * np.atleast_1d(m.pdf(cuts)) if len(cuts) else np.empty(0)
    diag = A.copy()
    diag[:-1] -= B
    diag[1:] -= B
    return TridiagonalMatrix(diag=diag.tolist(), off=(-B).tolist())


def leading_minors(T: TridiagonalMatrix) -> np.ndarray:
    """f_k = d_k f_{k-1} - off_{k-1}^2 f_{k-2}, with f_0 = 1."""
    d = np.asarray(T.diag, dtype=float)
    off = np.asarray(T.off, dtype=float)
    minors = np.empty(len(d))
    prev2, prev = 0.0, 1.0
    for k in range(len(d)):
        current = d[k] * prev - (off[k - 1] ** 2 * prev2 if k > 0 else 0.0)
        minors[k] = current
        prev2, prev = prev, current
    return minors


def count_below(T: TridiagonalMatrix, t: float) -> int:
    """Number of eigenvalues strictly below t (negative pivots of T - tI)."""
    d = np.asarray(T.diag, dtype=float)
    off = np.asarray(T.off, dtype=float)
    count = 0
    q = 1.0
    for k in range(len(d)):
        q = d[k] - t - (off[k - 1] ** 2 / q if k > 0 else 0.0)
        if q == 0.0:
            q = -np.finfo(float).tiny
        if q < 0:
            count += 1
    return count


def min_eigenvalue(T: TridiagonalMatrix, tol: float = BISECTION_TOL) -> float:
    """Lower end of the bisection bracket of the smallest eigenvalue, within `tol` relative to its size."""
    d = np.asarray(T.diag, dtype=float)
    radius = np.zeros(len(d))
    off = np.abs(np.asarray(T.off, dtype=float))
    radius[:-1] += off
    radius[1:] += off
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if count_below(T, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return lo


def pd_certificate(T: TridiagonalMatrix) -> PdCertificate:
    minors = leading_minors(T)
    lam = min_eigenvalue(T)
    positive = bool(np.all(minors > 0))
    if positive != (lam > 0) and abs(lam) > 1e-12:
        logger.warning("minor test (%s) and eigenvalue bound %.3e disagree", positive, lam)
    return PdCertificate(
        positive_definite=positive,
        leading_minors=minors.tolist(),
        row_excess=T.row_sums().tolist(),
        lambda_star=lam,
    )


def theorem_lambda_star(certificate: PdCertificate) -> float:
    """Eigenvalue bound at the computed optimum, less a 1e-8 margin for the neighbourhood."""
    return certificate.lambda_star - LAMBDA_STAR_MARGIN


def lipschitz_row_excess(x, m: Measure) -> np.ndarray:
    """
    L_i = 2 μ(C_i) - (x_i - x_{i-1}) f(c_{i-1}) - (x_{i+1} - x_i) f(c_i).

    Cell masses are integrated from the density, so the result checks `hessian_1d`
    independently of the CDF.
    """
    _check_measure(m)
    x = _sorted_grid(x)
    lo, hi = m.effective_support()
    cuts = 0.5 * (x[1:] + x[:-1])
    edges = np.concatenate([[lo[0]], np.clip(cuts, lo[0], hi[0]), [hi[0]]])
    mass = np.array([adaptive_gauss_legendre(m.pdf, a, b)[0] for a, b in zip(edges[:-1], edges[1:])])
    L = 2.0 * mass
    jumps = np.diff(x) * np.atleast_1d(m.pdf(cuts)) if len(cuts) else np.empty(0)
    L[:-1] -= jumps
    L[1:] -= jumps
    return L
