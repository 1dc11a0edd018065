import numpy as np
from scipy.linalg import eigvalsh

from hessian.boundary import facets_cross_boundary, hessian_2d_boundary
from hessian.finite_difference import fd_hessian
from hessian.tridiagonal import hessian_1d, pd_certificate
from measures.base_measure import Measure
from models.result_model import HessianReport, PdCertificate
from quantizer.grid import as_quantizer
from util.errors import UnsupportedOperation


def dense_certificate(H: np.ndarray) -> PdCertificate:
    """Certificate for a full symmetric matrix: minors by determinants, λ* by eigvalsh."""
    minors = np.array([np.linalg.det(H[:k, :k]) for k in range(1, len(H) + 1)])
    return PdCertificate(
        positive_definite=bool(np.all(minors > 0)),
        leading_minors=minors.tolist(),
        row_excess=H.sum(axis=1).tolist(),
        lambda_star=float(eigvalsh(H)[0]),
    )


def relative_discrepancy(H: np.ndarray, reference: np.ndarray) -> float:
    return float(np.max(np.abs(H - reference)) / max(np.max(np.abs(reference)), np.finfo(float).tiny))


def hessian_report(x, m: Measure, fd_check: bool = False, step: float = 1e-4) -> HessianReport:
    """
    Hessian with its certificate: tridiagonal in 1D, facet integrals in 2D, finite differences beyond.
    """
    x = as_quantizer(x)
    if not m.is_analytic:
        raise UnsupportedOperation("Hessians are computed for analytic measures only")
    boundary_flag = False
    if m.dim == 1:
        T = hessian_1d(x, m)
        H = T.dense()
        certificate = pd_certificate(T)
    elif m.dim == 2:
        H = hessian_2d_boundary(x, m)
        certificate = dense_certificate(H)
        boundary_flag = facets_cross_boundary(x, m)
    else:
        H = fd_hessian(x, m, step)
        certificate = dense_certificate(H)
        fd_check = False
    discrepancy = relative_discrepancy(H, fd_hessian(x, m, step)) if fd_check else None
    return HessianReport(
        matrix=H.tolist(),
        certificate=certificate,
        fd_discrepancy=discrepancy,
        boundary_flag=boundary_flag,
    )
