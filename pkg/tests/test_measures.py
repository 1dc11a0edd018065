import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import kstest

from measures import EmpiricalMeasure, Exponential1D, Gaussian1D, GaussianNd, Laplace1D, Uniform1D, UniformBox
from util.errors import DomainError, UnsupportedOperation
from util.rng import make_stream

ANALYTIC_1D = [Uniform1D(0.0, 1.0), Gaussian1D(0.5, 2.0), Laplace1D(-1.0, 0.5), Exponential1D(2.0, 1.0)]
ATOMS = EmpiricalMeasure([-1.5, -0.25, 0.0, 0.0, 0.8, 2.0, 3.5])


def test_pdf_examples(uniform, gauss):
    assert uniform.pdf(0.5) == 1.0
    assert gauss.pdf(0.0) == pytest.approx(0.3989422804, abs=1e-10)
    assert uniform.pdf(2.0) == 0.0


def test_pdf_of_empirical_is_unsupported(two_atoms):
    with pytest.raises(UnsupportedOperation):
        two_atoms.pdf(0.5)


def test_cdf_examples(uniform, gauss, two_atoms):
    assert gauss.cdf(0.0) == 0.5
    assert uniform.cdf(0.3) == pytest.approx(0.3)
    assert two_atoms.cdf(0.5) == 0.5


def test_cdf_in_2d_is_unsupported(gauss2d):
    with pytest.raises(UnsupportedOperation):
        gauss2d.cdf(0.0)


def test_quantile_examples(uniform, gauss, two_atoms):
    assert uniform.quantile(0.25) == pytest.approx(0.25)
    assert gauss.quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
    assert two_atoms.quantile(0.5) == 0.0
    assert two_atoms.quantile(0.51) == 1.0


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_quantile_outside_unit_interval(gauss, two_atoms, p):
    with pytest.raises(DomainError):
        gauss.quantile(p)
    with pytest.raises(DomainError):
        two_atoms.quantile(p)


@pytest.mark.parametrize("m", ANALYTIC_1D, ids=repr)
def test_density_integrates_to_one(m):
    lo, hi = m.effective_support()
    knots = sorted({lo[0], hi[0], *[x for x in (m.mean()[0],) if lo[0] < x < hi[0]]})
    total = sum(quad(m.pdf, a, b, limit=200, epsabs=1e-13)[0] for a, b in zip(knots[:-1], knots[1:]))
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("m", ANALYTIC_1D, ids=repr)
@given(p=st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_quantile_inverts_cdf(m, p):
    x = m.quantile(p)
    assert m.cdf(x) == pytest.approx(p, abs=1e-8)


@pytest.mark.parametrize("m", ANALYTIC_1D, ids=repr)
def test_cdf_nondecreasing(m):
    lo, hi = m.effective_support()
    values = m.cdf(np.linspace(lo[0] - 1.0, hi[0] + 1.0, 500))
    assert np.all(np.diff(values) >= 0)


def test_sample_is_deterministic_per_stream(gauss):
    a = gauss.sample(100, make_stream(7, 1, 2))
    b = gauss.sample(100, make_stream(7, 1, 2))
    assert np.array_equal(a, b)
    assert a.shape == (100, 1)


def test_gaussian_sample_mean(gauss):
    sample = gauss.sample(100_000, make_stream(7, 3))
    assert abs(sample.mean()) <= 3.0 / math.sqrt(1e5)


def test_single_atom_resampling():
    m = EmpiricalMeasure([[5.0]])
    assert np.array_equal(m.sample(3, make_stream(1)), np.full((3, 1), 5.0))


def test_cell_moments_examples(uniform, gauss):
    cell = uniform.cell_moments(0.25, 0.75)
    assert cell.mass == pytest.approx(0.5)
    assert cell.first == pytest.approx(0.25)
    assert cell.second == pytest.approx(0.13541667, abs=1e-8)

    shifted = Gaussian1D(1.5, 2.0)
    total = shifted.cell_moments(-np.inf, np.inf)
    assert total.mass == pytest.approx(1.0, abs=1e-15)
    assert total.first == pytest.approx(1.5, abs=1e-14)
    assert total.second == pytest.approx(1.5 ** 2 + 4.0, abs=1e-13)

    atoms = EmpiricalMeasure([0.0, 2.0]).cell_moments(-1.0, 1.0)
    assert (atoms.mass, atoms.first, atoms.second) == (0.5, 0.0, 0.0)


def test_cell_moments_reject_reversed_interval(uniform):
    with pytest.raises(DomainError):
        uniform.cell_moments(0.75, 0.25)


@pytest.mark.parametrize("m", ANALYTIC_1D[1:], ids=repr)
@given(a=st.floats(min_value=-4, max_value=4), width=st.floats(min_value=1e-3, max_value=4))
def test_cell_moments_match_quadrature(m, a, width):
    b = a + width
    cell = m.cell_moments(a, b)
    # kinks and jumps of the density: the mode of the Laplace law, the start of the exponential
    breaks = [t for t in (m.mean()[0], m.effective_support()[0][0]) if a < t < b] or None
    for k, value in enumerate((cell.mass, cell.first, cell.second)):
        expected = quad(lambda t: t ** k * m.pdf(t), a, b, epsabs=1e-14, epsrel=1e-12, points=breaks)[0]
        assert value == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("m", ANALYTIC_1D + [ATOMS], ids=repr)
@given(a=st.floats(min_value=-6, max_value=6), width=st.floats(min_value=0, max_value=8))
def test_cell_mass_is_a_cdf_increment(m, a, width):
    b = a + width
    assert m.cell_moments(a, b).mass == pytest.approx(m.cdf(b) - m.cdf(a), abs=1e-12)


@pytest.mark.parametrize("m", ANALYTIC_1D + [ATOMS], ids=repr)
@given(cuts=st.lists(st.floats(min_value=-6, max_value=6), min_size=3, max_size=3))
def test_cell_moments_are_additive(m, cuts):
    a, b, c = sorted(cuts)
    whole = m.cell_moments(a, c)
    parts = m.cell_moments(a, b) + m.cell_moments(b, c)
    assert parts.mass == pytest.approx(whole.mass, abs=1e-12)
    assert parts.first == pytest.approx(whole.first, abs=1e-11)
    assert parts.second == pytest.approx(whole.second, abs=1e-10)


@pytest.mark.parametrize("m", ANALYTIC_1D, ids=repr)
@given(p=st.floats(min_value=1e-4, max_value=1 - 1e-4))
def test_quantile_is_the_generalized_inverse(m, p):
    x = m.quantile(p)
    assert m.cdf(x) >= p - 1e-12
    assert m.cdf(x - 1e-6) < p


@given(p=st.floats(min_value=1e-6, max_value=1.0, exclude_max=True))
def test_empirical_quantile_is_the_generalized_inverse(p):
    x = ATOMS.quantile(p)
    assert ATOMS.cdf(x) >= p - 1e-9
    assert ATOMS.cdf(x - 1e-6) < p


@pytest.mark.parametrize("m", ANALYTIC_1D, ids=repr)
def test_samples_follow_the_cdf(m):
    sample = m.sample(100_000, make_stream(2024, 5))
    assert kstest(sample.ravel(), m.cdf).statistic <= 0.01


def test_gaussian_far_tail_cell_keeps_relative_accuracy(gauss):
    cell = gauss.cell_moments(8.0, np.inf)
    assert cell.mass == pytest.approx(6.22096057427174e-16, rel=1e-10)


def test_empirical_weights_are_uniform():
    m = EmpiricalMeasure(np.arange(7.0))
    assert np.all(m.weights == 1.0 / 7.0)
    assert m.weights.sum() == pytest.approx(1.0, abs=1e-15)


def test_empirical_cell_moments_are_half_open():
    m = EmpiricalMeasure([0.0, 1.0, 2.0])
    assert m.cell_moments(0.0, 1.0).mass == pytest.approx(1.0 / 3.0)
    assert m.cell_moments(1.0, 2.0).first == pytest.approx(2.0 / 3.0)


def test_gaussian_nd_checks_covariance():
    with pytest.raises(DomainError):
        GaussianNd([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(DomainError):
        GaussianNd([0.0, 0.0], [[1.0, 0.5], [0.4, 1.0]])


def test_gaussian_nd_moments_and_tail():
    m = GaussianNd([1.0, -1.0], [[2.0, 0.3], [0.3, 1.0]])
    assert m.second_moment() == pytest.approx(2.0 + 3.0)
    assert m.default_tail().kappa == 2.0
    assert m.default_tail().theta == pytest.approx(1.0 / (2.0 * m.lambda_max()))
    sample = m.sample(200_000, make_stream(3))
    assert np.allclose(np.cov(sample.T), m.covariance, atol=0.03)


def test_uniform_box():
    m = UniformBox([0.0, 0.0], [2.0, 1.0])
    assert m.pdf(np.array([1.0, 0.5])) == pytest.approx(0.5)
    assert m.pdf(np.array([3.0, 0.5])) == 0.0
    assert np.allclose(m.mean(), [1.0, 0.5])
    lo, hi = m.effective_support()
    assert np.array_equal(lo, [0.0, 0.0]) and np.array_equal(hi, [2.0, 1.0])


def test_default_tails():
    assert Gaussian1D(0.0, 2.0).default_tail().theta == pytest.approx(1.0 / 8.0)
    assert Laplace1D(0.0, 0.5).default_tail().theta == pytest.approx(2.0)
    assert Exponential1D(3.0).default_tail().kappa == 1.0
    assert Uniform1D(0.0, 1.0).tail is None
