import numpy as np

from measures.base_measure import Measure
from quantizer.geometry import Method, cell_statistics, default_method
from quantizer.grid import as_quantizer
from util.errors import DomainError
from util.rng import make_stream
from util.settings import settings


def fd_method(m: Measure) -> Method:
    """Deterministic distortion for the oracle where one exists."""
    if m.is_analytic and m.dim == 2:
        return Method.QUADRATURE_2D
    return default_method(m)


def fd_hessian(
    x,
    m: Measure,
    step: float = 1e-4,
    method: Method | str | None = None,
    n_samples: int | None = None,
    stream: np.random.Generator | None = None,
) -> np.ndarray:
    """
    Central second differences of the distortion, symmetrized.

    Monte-Carlo distortions are evaluated on one sample drawn up front, so every
    perturbed grid sees the same random numbers.

    Parameters
    ----------
    x : Quantizer
    m : Measure
    step : float
        Perturbation of each coordinate; must be positive.
    method : Method, optional
        Distortion method; exact1d, empirical or quadrature2d when available, else montecarlo.
    """
    if not step > 0:
        raise DomainError(f"finite-difference step must be positive, got {step}")
    x = as_quantizer(x)
    method = Method(method or fd_method(m))
    samples = None
    if method is Method.MONTE_CARLO:
        samples = m.sample(n_samples or settings.mc_samples, stream if stream is not None else make_stream(settings.seed))
    shape = x.points.shape
    base = x.points.reshape(-1)
    size = len(base)

    def D(delta):
        stats = cell_statistics((base + delta).reshape(shape), m, method, samples=samples)
        return float(np.sum(stats.distortion))

    h = step
    eye = np.eye(size) * h
    centre = D(np.zeros(size))
    plus = [D(eye[a]) for a in range(size)]
    minus = [D(-eye[a]) for a in range(size)]
    H = np.empty((size, size))
    for a in range(size):
        H[a, a] = (plus[a] - 2.0 * centre + minus[a]) / h ** 2
        for b in range(a + 1, size):
            value = (D(eye[a] + eye[b]) - D(eye[a] - eye[b]) - D(eye[b] - eye[a]) + D(-eye[a] - eye[b])) / (4.0 * h ** 2)
            H[a, b] = H[b, a] = value
    return 0.5 * (H + H.T)
