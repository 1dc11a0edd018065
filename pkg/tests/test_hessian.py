import numpy as np
import pytest

from hessian import (
    facets_cross_boundary,
    fd_hessian,
    hessian_1d,
    hessian_2d_boundary,
    hessian_report,
    lipschitz_row_excess,
    pd_certificate,
    theorem_lambda_star,
)
from hessian.report import relative_discrepancy
from hessian.tridiagonal import count_below, leading_minors, min_eigenvalue
from measures import EmpiricalMeasure, Gaussian1D, GaussianNd, Laplace1D, UniformBox
from models.result_model import TridiagonalMatrix
from models.solver_model import SolverSetting
from quantizer import Quantizer
from solver.base_solver import Solver
from util.errors import DomainError, InvalidQuantizer, UnsupportedOperation
from util.rng import make_stream


def uniform_optimum(K):
    return Quantizer((2.0 * np.arange(1, K + 1) - 1.0) / (2.0 * K))


def test_uniform_k2_hessian(uniform):
    T = hessian_1d(uniform_optimum(2), uniform)
    assert T.diag == pytest.approx([0.75, 0.75], abs=1e-15)
    assert T.off == pytest.approx([-0.25], abs=1e-15)


@pytest.mark.parametrize("m", [Gaussian1D(0.0, 1.0), Laplace1D(1.0, 2.0)], ids=repr)
def test_single_point_hessian_is_two(m):
    T = hessian_1d([0.3], m)
    assert T.diag == [2.0]
    assert T.off == []


def test_hessian_rejects_unsorted_or_duplicate_grids(gauss):
    with pytest.raises(InvalidQuantizer):
        hessian_1d(np.array([1.0, -1.0]), gauss)
    with pytest.raises(InvalidQuantizer):
        hessian_1d(np.array([0.0, 0.0]), gauss)


def test_hessian_needs_1d_analytic(two_atoms, gauss2d):
    with pytest.raises(UnsupportedOperation):
        hessian_1d([0.0, 1.0], two_atoms)
    with pytest.raises(UnsupportedOperation):
        hessian_1d([0.0, 1.0], gauss2d)


def test_uniform_certificate(uniform):
    cert = pd_certificate(hessian_1d(uniform_optimum(2), uniform))
    assert cert.positive_definite
    assert cert.leading_minors == pytest.approx([0.75, 0.5], abs=1e-15)
    assert cert.lambda_star == pytest.approx(0.5, abs=1e-10)
    assert theorem_lambda_star(cert) == pytest.approx(0.5 - 1e-8, abs=1e-10)


def test_gaussian_k2_certificate(gauss):
    a = np.sqrt(2.0 / np.pi)
    cert = pd_certificate(hessian_1d([-a, a], gauss))
    assert cert.positive_definite
    assert cert.lambda_star == pytest.approx(1.0 - 2.0 / np.pi, abs=1e-10)
    assert theorem_lambda_star(cert) > 0


def test_singular_certificate():
    cert = pd_certificate(TridiagonalMatrix(diag=[1.0, 1.0], off=[-1.0]))
    assert not cert.positive_definite
    assert cert.leading_minors[1] == 0.0
    assert cert.lambda_star == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("K", range(1, 11))
def test_uniform_minors_closed_form(uniform, K):
    minors = leading_minors(hessian_1d(uniform_optimum(K), uniform))
    expected = [(2 * k + 1) / (2 ** k * K ** k) for k in range(1, K)]
    previous = expected[-1] if expected else 1.0
    expected.append((2 * K + 1) / (2 ** K * K ** K) + previous / (2 * K))
    assert np.allclose(minors, expected, rtol=1e-10, atol=1e-12)


def test_sturm_count_and_bisection_match_eigvalsh(stream):
    for _ in range(20):
        size = int(stream.integers(1, 9))
        T = TridiagonalMatrix(diag=stream.normal(size=size).tolist(), off=stream.normal(size=size - 1).tolist())
        eigenvalues = np.linalg.eigvalsh(T.dense())
        assert min_eigenvalue(T) == pytest.approx(eigenvalues[0], abs=1e-9)
        t = float(stream.normal())
        assert count_below(T, t) == int(np.sum(eigenvalues < t))


@pytest.mark.parametrize("off", [0.3, 0.5, 0.7, 1.3])
def test_bisection_terminates_on_large_eigenvalues(off):
    T = TridiagonalMatrix(diag=[1e6, 1e6 + 3.1], off=[off])
    expected = np.linalg.eigvalsh(T.dense())[0]
    assert min_eigenvalue(T) == pytest.approx(expected, rel=1e-10)


def test_certificate_of_a_widely_spread_gaussian_grid(gauss):
    T = hessian_1d([-1e6, 1e6], gauss)
    cert = pd_certificate(T)
    assert not cert.positive_definite
    assert cert.lambda_star == pytest.approx(np.linalg.eigvalsh(T.dense())[0], rel=1e-9)


def test_row_excess_matches_row_sums(gauss):
    x = Quantizer([-1.5, -0.2, 0.4, 1.7])
    T = hessian_1d(x, gauss)
    assert np.allclose(lipschitz_row_excess(x, gauss), T.row_sums(), atol=1e-10)


@pytest.mark.parametrize("K", range(2, 7))
def test_gaussian_optimum_is_diagonally_dominant(gauss, K):
    x = Solver(gauss, SolverSetting(method="newton", tol=1e-12)).solve(K).quantizer
    cert = pd_certificate(hessian_1d(x, gauss))
    assert cert.positive_definite
    assert min(cert.row_excess) > 0
    assert cert.lambda_star > 0


def test_gaussian_grid_matches_finite_differences(gauss):
    x = Quantizer([-1.0, 1.0])
    assert relative_discrepancy(hessian_1d(x, gauss).dense(), fd_hessian(x, gauss)) <= 1e-6


def test_random_gaussian_grids_match_finite_differences():
    stream = make_stream(2024, 6)
    for _ in range(20):
        m = Gaussian1D(float(stream.normal()), float(stream.uniform(0.5, 2.0)))
        K = int(stream.integers(1, 6))
        while True:
            x = np.sort(m.m + m.sigma * stream.normal(size=K))
            if K == 1 or np.min(np.diff(x)) > 0.05 * m.sigma:
                break
        H = hessian_1d(x, m).dense()
        assert relative_discrepancy(H, fd_hessian(Quantizer(x), m)) <= 1e-6


def test_fd_hessian_of_a_single_center(gauss2d):
    H = fd_hessian([[0.2, -0.1]], gauss2d)
    assert np.allclose(H, 2.0 * np.eye(2), atol=1e-6)
    assert np.allclose(fd_hessian([[3.0]], EmpiricalMeasure([0.0, 1.0, 5.0])), [[2.0]], atol=1e-6)


def test_fd_hessian_recovers_uniform_matrix(uniform):
    H = fd_hessian(uniform_optimum(2), uniform)
    assert np.allclose(H, [[0.75, -0.25], [-0.25, 0.75]], atol=1e-6)


def test_fd_hessian_error_is_second_order():
    m = Gaussian1D(0.0, 1.0)
    x = Quantizer([-0.9, 0.2, 1.3])
    exact = hessian_1d(x, m).dense()
    coarse = np.max(np.abs(fd_hessian(x, m, step=0.1) - exact))
    fine = np.max(np.abs(fd_hessian(x, m, step=0.05) - exact))
    assert 2.5 <= coarse / fine <= 5.5


def test_fd_hessian_rejects_nonpositive_step(gauss):
    with pytest.raises(DomainError):
        fd_hessian([0.0], gauss, step=0.0)


def test_2d_single_center(gauss2d):
    assert np.allclose(hessian_2d_boundary([[0.3, -0.4]], gauss2d), 2.0 * np.eye(2), atol=1e-7)


def test_2d_hessian_is_symmetric(gauss2d):
    H = hessian_2d_boundary([[-1.0, 0.0], [1.0, 0.2], [0.1, 1.4]], gauss2d)
    assert np.max(np.abs(H - H.T)) <= 1e-10


def test_2d_hessian_matches_finite_differences(gauss2d):
    stream = make_stream(77, 2)
    grids = [np.array([[-1.0, 0.0], [1.0, 0.2], [0.1, 1.4]])]
    while len(grids) < 5:
        x = stream.uniform(-1.5, 1.5, size=(3, 2))
        if Quantizer(x).min_separation() > 0.5:
            grids.append(x)
    for x in grids:
        H = hessian_2d_boundary(x, gauss2d)
        assert relative_discrepancy(H, fd_hessian(x, gauss2d)) <= 1e-3


def test_2d_hessian_rejects_coincident_centers(gauss2d):
    with pytest.raises(InvalidQuantizer):
        hessian_2d_boundary([[0.0, 0.0], [1e-12, 0.0]], gauss2d)


def test_uniform_box_boundary_flag():
    m = UniformBox([0.0, 0.0], [1.0, 1.0])
    assert facets_cross_boundary([[0.25, 0.5], [0.75, 0.5]], m)
    assert not facets_cross_boundary([[0.25, 0.5], [0.75, 0.5]], GaussianNd([0.5, 0.5], np.eye(2)))


def test_report_1d_with_fd_check(uniform):
    report = hessian_report(uniform_optimum(3), uniform, fd_check=True)
    assert report.certificate.positive_definite
    assert report.fd_discrepancy <= 1e-6
    assert not report.boundary_flag


def test_report_rejects_empirical(two_atoms):
    with pytest.raises(UnsupportedOperation):
        hessian_report([0.0, 1.0], two_atoms)


def test_report_3d_uses_finite_differences():
    m = GaussianNd([0.0, 0.0, 0.0], np.eye(3))
    report = hessian_report([[0.0, 0.0, 0.0]], m)
    assert np.allclose(report.matrix, 2.0 * np.eye(3), atol=1e-3)
