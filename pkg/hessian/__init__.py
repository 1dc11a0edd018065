from hessian.boundary import facets_cross_boundary, hessian_2d_boundary
from hessian.finite_difference import fd_hessian
from hessian.report import hessian_report
from hessian.tridiagonal import hessian_1d, lipschitz_row_excess, pd_certificate, theorem_lambda_star

__all__ = [
    "facets_cross_boundary",
    "fd_hessian",
    "hessian_1d",
    "hessian_2d_boundary",
    "hessian_report",
    "lipschitz_row_excess",
    "pd_certificate",
    "theorem_lambda_star",
]
