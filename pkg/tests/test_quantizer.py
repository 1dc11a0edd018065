import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from measures import EmpiricalMeasure, Gaussian1D, GaussianNd, Laplace1D, Uniform1D, UniformBox
from models.solver_model import SolverSetting
from quantizer import Method, Quantizer, cell_statistics, distortion, gradient, nearest, voronoi_weights
from solver.base_solver import Solver
from transport.wasserstein import w_p_1d
from util.errors import InvalidQuantizer, UnsupportedOperation
from util.rng import make_stream


def test_quantizer_rejects_duplicates_and_non_finite():
    with pytest.raises(InvalidQuantizer):
        Quantizer([0.0, 1.0, 0.0])
    with pytest.raises(InvalidQuantizer):
        Quantizer([[0.0, np.nan]])
    with pytest.raises(InvalidQuantizer):
        Quantizer([1.0, 0.0], sort=False)


def test_quantizer_sorts_1d_and_is_read_only():
    q = Quantizer([0.75, 0.25])
    assert q.flat().tolist() == [0.25, 0.75]
    assert (q.K, q.dim) == (2, 1)
    with pytest.raises(ValueError):
        q.points[0, 0] = 1.0


def test_quantizer_distance():
    assert Quantizer([0.0, 1.0]).distance_to(Quantizer([0.0, 2.0])) == pytest.approx(1.0)
    a = Quantizer([[0.0, 0.0], [3.0, 4.0]])
    b = Quantizer([[3.0, 4.0], [0.0, 1.0]])
    assert a.distance_to(b) == pytest.approx(1.0)
    assert a.min_separation() == pytest.approx(5.0)
    assert a.max_norm() == pytest.approx(5.0)


def test_nearest_examples():
    x = Quantizer([0.0, 1.0])
    assert nearest(x, 0.9) == (1, pytest.approx(0.01))
    assert nearest(x, 0.5) == (0, 0.25)
    assert nearest(Quantizer([[0.0, 0.0], [3.0, 4.0]]), [3.0, 4.0]) == (1, 0.0)


def test_nearest_tie_in_2d_goes_to_lowest_index():
    x = Quantizer([[1.0, 0.0], [-1.0, 0.0]])
    assert nearest(x, [0.0, 5.0])[0] == 0


def test_distortion_examples(uniform, two_atoms):
    assert distortion([0.0, 1.0], two_atoms).value == 0.0
    assert distortion([0.5], two_atoms).value == pytest.approx(0.25)
    estimate = distortion([0.25, 0.75], uniform)
    assert estimate.value == pytest.approx(1.0 / 48.0, abs=1e-15)
    assert estimate.error == pytest.approx(np.sqrt(1.0 / 48.0))
    assert estimate.method == "exact1d"


def test_gradient_examples(uniform, gauss):
    assert np.allclose(gradient([0.25, 0.75], uniform), 0.0, atol=1e-12)
    assert gradient([0.0], EmpiricalMeasure([0.0, 2.0])).tolist() == [[-2.0]]
    assert np.allclose(gradient([0.0], gauss), 0.0, atol=1e-15)


def test_voronoi_weight_examples(uniform, gauss):
    assert voronoi_weights([0.25, 0.75], uniform).weights == pytest.approx([0.5, 0.5])
    assert voronoi_weights([0.0, 2.0], EmpiricalMeasure([0.0, 1.0, 2.0])).weights == pytest.approx([2 / 3, 1 / 3])
    assert voronoi_weights([-1.0, 1.0], gauss, Method.EXACT_1D).weights == pytest.approx([0.5, 0.5], abs=1e-15)


def test_method_pairing(uniform, two_atoms, gauss2d):
    with pytest.raises(UnsupportedOperation):
        distortion([0.5], two_atoms, Method.EXACT_1D)
    with pytest.raises(UnsupportedOperation):
        distortion([0.5], uniform, Method.EMPIRICAL)
    with pytest.raises(UnsupportedOperation):
        distortion([0.5], two_atoms, Method.MONTE_CARLO)
    with pytest.raises(UnsupportedOperation):
        distortion([[0.0, 0.0]], gauss2d, Method.EXACT_1D)


@given(points=st.lists(st.floats(min_value=-3, max_value=3), min_size=1, max_size=6, unique=True))
def test_exact_1d_agrees_with_dense_monte_carlo(points):
    m = Gaussian1D(0.3, 1.2)
    sample = m.sample(200_000, make_stream(5))
    exact = distortion(points, m).value
    mc = distortion(points, m, Method.MONTE_CARLO, samples=sample)
    assert abs(exact - mc.value) <= 5.0 * mc.std_error + 1e-12


@given(points=st.lists(st.floats(min_value=-2, max_value=2), min_size=2, max_size=5, unique=True))
def test_unsorted_input_keeps_row_order(points):
    m = EmpiricalMeasure(np.linspace(-2.0, 2.0, 41) + 1e-3 * np.pi)
    stats = cell_statistics(np.array(points).reshape(-1, 1), m)
    order = np.argsort(points)
    ordered = cell_statistics(np.sort(points).reshape(-1, 1), m)
    assert np.allclose(stats.mass[order], ordered.mass)


def test_quadrature_2d_total_mass_and_distortion(gauss2d):
    x = Quantizer([[-1.0, 0.0], [1.0, 0.3], [0.0, 1.5]])
    stats = cell_statistics(x.points, gauss2d, Method.QUADRATURE_2D)
    assert stats.mass.sum() == pytest.approx(1.0, abs=1e-8)
    assert np.allclose(stats.first.sum(axis=0), 0.0, atol=1e-8)
    mc = distortion(x, gauss2d, Method.MONTE_CARLO, n_samples=400_000, stream=make_stream(9))
    assert np.sum(stats.distortion) == pytest.approx(mc.value, abs=5.0 * mc.std_error)


def test_quadrature_2d_single_center_is_second_moment():
    m = GaussianNd([0.5, -1.0], [[1.0, 0.2], [0.2, 0.5]])
    d = distortion([[0.0, 0.0]], m, Method.QUADRATURE_2D).value
    assert d == pytest.approx(m.second_moment(), rel=1e-7)


def test_quadrature_2d_uniform_box_quarters():
    m = UniformBox([0.0, 0.0], [1.0, 1.0])
    x = [[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75, 0.75]]
    assert distortion(x, m, Method.QUADRATURE_2D).value == pytest.approx(2.0 / (12.0 * 16.0), rel=1e-12)
    assert voronoi_weights(x, m, Method.QUADRATURE_2D).weights == pytest.approx([0.25] * 4)


@pytest.mark.parametrize("m", [Gaussian1D(0.0, 1.0), Laplace1D(0.5, 1.5)], ids=["gauss", "laplace"])
def test_gradient_matches_central_differences(m):
    x = np.array([-1.2, 0.1, 0.9, 2.4])
    h = 1e-5
    analytic = gradient(x, m)[:, 0]
    numeric = []
    for i in range(len(x)):
        step = np.zeros_like(x)
        step[i] = h
        numeric.append((distortion(x + step, m).value - distortion(x - step, m).value) / (2.0 * h))
    assert analytic == pytest.approx(numeric, abs=1e-7)


@given(points=st.lists(st.floats(min_value=-4, max_value=4), min_size=1, max_size=6, unique=True))
def test_quantization_error_is_lipschitz_in_w2(points):
    gauss = Gaussian1D(0.0, 1.0)
    for nu in (EmpiricalMeasure(gauss.sample(200, make_stream(15))), Laplace1D(0.2, 0.8)):
        gap = abs(distortion(points, gauss).error - distortion(points, nu).error)
        w2 = w_p_1d(nu, gauss)
        assert gap <= w2.distance + w2.error_bound + 1e-9


@pytest.mark.parametrize("m", [Uniform1D(0.0, 1.0), Gaussian1D(0.0, 1.0)], ids=["uniform", "gauss"])
def test_optimal_error_strictly_decreases_with_k(m):
    solver = Solver(m, SolverSetting(method="newton"))
    errors = [solver.solve(K).quantization_error for K in range(1, 9)]
    assert np.all(np.diff(errors) < 0)


def test_solver_centers_stay_in_the_convex_hull():
    box = UniformBox([0.0, -1.0], [1.0, 2.0])
    result = Solver(box, SolverSetting(init="sample-pp", mc_samples=20_000)).solve(5, make_stream(3))
    points = result.quantizer.points
    assert np.all(points >= [0.0, -1.0]) and np.all(points <= [1.0, 2.0])

    cloud = EmpiricalMeasure(make_stream(16).exponential(size=300))
    centers = Solver(cloud, SolverSetting(init="sample-pp")).solve(6, make_stream(17)).quantizer.flat()
    assert centers.min() >= cloud.sorted[0] and centers.max() <= cloud.sorted[-1]


def test_monte_carlo_converges_at_the_uniform_optimum(uniform):
    estimates = [distortion([0.25, 0.75], uniform, Method.MONTE_CARLO, n_samples=n, stream=make_stream(18, i))
                 for i, n in enumerate((1_000, 10_000, 100_000, 1_000_000))]
    for estimate in estimates:
        assert abs(estimate.value - 1.0 / 48.0) <= 4.0 * estimate.std_error
    errors = [estimate.std_error for estimate in estimates]
    assert np.all(np.diff(errors) < 0)
    assert errors[0] / errors[2] == pytest.approx(10.0, rel=0.2)
