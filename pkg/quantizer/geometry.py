"""
Nearest-center assignment, Voronoi weights, distortion and gradient.

Every evaluation goes through `cell_statistics`, which returns per-cell mass,
first moment and distortion contribution for one of four methods:

- exact1d: closed-form interval moments between midpoint cut points (1D analytic);
- empirical: exact sums over the atoms of an empirical measure;
- montecarlo: the same sums over an i.i.d. sample of an analytic measure;
- quadrature2d: polygon quadrature over clipped Voronoi cells (2D analytic).

Voronoi ties go to the lowest index.
"""
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

from measures.base_measure import Measure
from models.result_model import DistortionEstimate, VoronoiWeights
from quantizer.grid import Quantizer, as_quantizer
from util.errors import UnsupportedOperation
from util.rng import make_stream
from util.settings import settings

CHUNK_ENTRIES = 1 << 22


class Method(str, Enum):
    EXACT_1D = "exact1d"
    EMPIRICAL = "empirical"
    MONTE_CARLO = "montecarlo"
    QUADRATURE_2D = "quadrature2d"


class CellStatistics(NamedTuple):
    mass: np.ndarray          # (K,)
    first: np.ndarray         # (K, d), ∫_{V_i} ξ dμ
    distortion: np.ndarray    # (K,), ∫_{V_i} |ξ - x_i|^2 dμ
    std_error: float          # Monte-Carlo standard error of the total distortion
    tag: str


def default_method(m: Measure) -> Method:
    if m.is_empirical:
        return Method.EMPIRICAL
    if m.dim == 1:
        return Method.EXACT_1D
    return Method.MONTE_CARLO


def check_pairing(m: Measure, method: Method):
    method = Method(method)
    if method is Method.EXACT_1D and not (m.dim == 1 and m.is_analytic):
        raise UnsupportedOperation(f"exact1d needs a 1D analytic measure, got {m.kind} in d={m.dim}")
    if method is Method.EMPIRICAL and not m.is_empirical:
        raise UnsupportedOperation(f"method empirical needs an empirical measure, got {m.kind}")
    if method is Method.MONTE_CARLO and not m.is_analytic:
        raise UnsupportedOperation("montecarlo is for analytic measures; use method empirical")
    if method is Method.QUADRATURE_2D and not (m.dim == 2 and m.is_analytic):
        raise UnsupportedOperation(f"quadrature2d needs a 2D analytic measure, got {m.kind} in d={m.dim}")
    return method


def assign(points: np.ndarray, samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Index of the nearest center (lowest on ties) and squared distance for every sample.

    Parameters
    ----------
    points : ndarray of shape (K, d)
    samples : ndarray of shape (n, d)
    """
    samples = np.asarray(samples, dtype=float).reshape(-1, points.shape[1])
    K = points.shape[0]
    if points.shape[1] == 1 and np.all(np.diff(points[:, 0]) > 0):
        # sorted 1D grid: cell i is (c_{i-1}, c_i]
        cuts = 0.5 * (points[1:, 0] + points[:-1, 0])
        index = np.searchsorted(cuts, samples[:, 0], side='left')
        return index, (samples[:, 0] - points[index, 0]) ** 2
    index = np.empty(len(samples), dtype=int)
    sqd = np.empty(len(samples))
    step = max(1, CHUNK_ENTRIES // K)
    for start in range(0, len(samples), step):
        block = cdist(samples[start:start + step], points, 'sqeuclidean')
        index[start:start + step] = np.argmin(block, axis=1)
        sqd[start:start + step] = block[np.arange(len(block)), index[start:start + step]]
    return index, sqd


def nearest(x: Quantizer, xi) -> tuple[int, float]:
    x = as_quantizer(x)
    index, sqd = assign(x.points, np.asarray(xi, dtype=float).reshape(1, x.dim))
    return int(index[0]), float(sqd[0])


def sample_statistics(points: np.ndarray, samples: np.ndarray, tag: str) -> CellStatistics:
    """Cell statistics of the uniform measure on `samples` (an empirical measure or an MC draw)."""
    K, d = points.shape
    n = len(samples)
    index, sqd = assign(points, samples)
    mass = np.bincount(index, minlength=K) / n
    first = np.stack([np.bincount(index, weights=samples[:, k], minlength=K) for k in range(d)], axis=1) / n
    per_cell = np.bincount(index, weights=sqd, minlength=K) / n
    std_error = float(np.std(sqd, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return CellStatistics(mass, first, per_cell, std_error, tag)


def exact_statistics(points: np.ndarray, m: Measure) -> CellStatistics:
    order = np.argsort(points[:, 0], kind='stable')
    x = points[order, 0]
    cuts = 0.5 * (x[1:] + x[:-1])
    lows = np.concatenate([[-np.inf], cuts])
    highs = np.concatenate([cuts, [np.inf]])
    mass, first, second = m.moments(lows, highs)
    per_cell = np.maximum(second - 2.0 * x * first + x * x * mass, 0.0)
    inverse = np.empty_like(order)
    inverse[order] = np.arange(len(order))
    return CellStatistics(mass[inverse], first[inverse].reshape(-1, 1), per_cell[inverse], 0.0, Method.EXACT_1D.value)


def cell_statistics(
    points: np.ndarray,
    m: Measure,
    method: Method | str | None = None,
    samples: np.ndarray | None = None,
    n_samples: int | None = None,
    stream: np.random.Generator | None = None,
) -> CellStatistics:
    """
    Per-cell mass, first moment and distortion of a raw (K, d) grid.

    Parameters
    ----------
    points : ndarray of shape (K, d)
        Centers; need not be sorted.
    m : Measure
    method : Method, optional
        Defaults to `default_method(m)`.
    samples : ndarray, optional
        Fixed Monte-Carlo sample; overrides `n_samples` and `stream`.
    n_samples : int, optional
        Monte-Carlo size, QLAB_MC_SAMPLES by default.
    stream : numpy Generator, optional
        Monte-Carlo stream, seeded from QLAB_SEED by default.
    """
    method = check_pairing(m, method or default_method(m))
    points = np.asarray(points, dtype=float).reshape(-1, m.dim)
    if method is Method.EXACT_1D:
        return exact_statistics(points, m)
    if method is Method.EMPIRICAL:
        return sample_statistics(points, m.points, Method.EMPIRICAL.value)
    if method is Method.QUADRATURE_2D:
        from quantizer.cells2d import quadrature_statistics
        return quadrature_statistics(points, m)
    if samples is None:
        n = n_samples or settings.mc_samples
        samples = m.sample(n, stream if stream is not None else make_stream(settings.seed))
    return sample_statistics(points, np.asarray(samples, dtype=float), f"montecarlo({len(samples)})")


def distortion(x: Quantizer, m: Measure, method=None, **kwargs) -> DistortionEstimate:
    """
    D_{K,μ}(x) = ∫ min_i |ξ - x_i|^2 μ(dξ) together with e = √D.

    Keyword arguments are passed to `cell_statistics`.
    """
    x = as_quantizer(x)
    stats = cell_statistics(x.points, m, method, **kwargs)
    value = float(np.sum(stats.distortion))
    return DistortionEstimate(value=value, error=float(np.sqrt(value)), std_error=stats.std_error, method=stats.tag)


def gradient(x: Quantizer, m: Measure, method=None, **kwargs) -> np.ndarray:
    """Row i is 2 ∫_{V_i} (x_i - ξ) μ(dξ), as a (K, d) array."""
    x = as_quantizer(x)
    stats = cell_statistics(x.points, m, method, **kwargs)
    return 2.0 * (x.points * stats.mass[:, None] - stats.first)


def voronoi_weights(x: Quantizer, m: Measure, method=None, **kwargs) -> VoronoiWeights:
    x = as_quantizer(x)
    stats = cell_statistics(x.points, m, method, **kwargs)
    return VoronoiWeights(weights=stats.mass.tolist(), method=stats.tag)
