import re

import numpy as np
import pandas as pd

from measures import EmpiricalMeasure, Exponential1D, Gaussian1D, GaussianNd, Laplace1D, Uniform1D, UniformBox
from measures.base_measure import Measure
from util.errors import ConfigError, QuantLabError

NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
SPEC_PATTERN = re.compile(r"^\s*(?P<family>[A-Za-z]+)\s*:\s*(?P<body>.*?)\s*$")


def _numbers(text: str, spec: str) -> list[float]:
    fields = [f.strip() for f in text.split(',')] if text.strip() else []
    if not fields or any(re.fullmatch(NUMBER, f) is None for f in fields):
        raise ConfigError(f"expected comma-separated numbers in '{spec}', got '{text}'")
    return [float(f) for f in fields]


def _expect(values: list[float], counts: tuple[int, ...], spec: str) -> list[float]:
    if len(values) not in counts:
        raise ConfigError(f"'{spec}' takes {' or '.join(map(str, counts))} parameters, got {len(values)}")
    return values


def load_points(path: str) -> np.ndarray:
    """
    Read a point cloud: one point per row, d columns, no header.

    Parameters
    ----------
    path : str
        CSV file path.
    """
    try:
        df = pd.read_csv(path, header=None)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ConfigError(f"cannot read point cloud '{path}': {exc}")
    if df.empty or not all(pd.api.types.is_numeric_dtype(t) for t in df.dtypes):
        raise ConfigError(f"point cloud '{path}' must hold numeric columns only")
    return df.to_numpy(dtype=float)


def load_measure(spec: str) -> Measure:
    """
    Build a measure from a distribution spec.

    Grammar: `uniform:a,b`, `gauss:m,sigma`, `laplace:m,b`, `exp:lambda[,shift]`,
    `gaussNd:meanCsv;covCsv` (covariance row-major), `box:loCsv;hiCsv`,
    `empirical:path.csv`.

    Parameters
    ----------
    spec : str
        The distribution spec.
    """
    match = SPEC_PATTERN.match(spec or "")
    if match is None:
        raise ConfigError(f"malformed distribution spec '{spec}'")
    family, body = match.group("family"), match.group("body")

    try:
        if family == "uniform":
            measure = Uniform1D(*_expect(_numbers(body, spec), (2,), spec))
        elif family == "gauss":
            measure = Gaussian1D(*_expect(_numbers(body, spec), (2,), spec))
        elif family == "laplace":
            measure = Laplace1D(*_expect(_numbers(body, spec), (2,), spec))
        elif family == "exp":
            measure = Exponential1D(*_expect(_numbers(body, spec), (1, 2), spec))
        elif family in ("gaussNd", "box"):
            parts = body.split(';')
            if len(parts) != 2:
                raise ConfigError(f"'{spec}' needs two ';'-separated parts")
            first, second = _numbers(parts[0], spec), _numbers(parts[1], spec)
            if family == "box":
                measure = UniformBox(first, second)
            else:
                d = len(first)
                if len(second) != d * d:
                    raise ConfigError(f"'{spec}': covariance needs {d * d} entries, got {len(second)}")
                cov = np.array(second).reshape(d, d)
                measure = Gaussian1D(first[0], float(np.sqrt(cov[0, 0]))) if d == 1 else GaussianNd(first, cov)
        elif family == "empirical":
            measure = EmpiricalMeasure(load_points(body))
        else:
            raise ConfigError(f"unknown distribution family '{family}' in '{spec}'")
    except ConfigError:
        raise
    except QuantLabError as exc:
        raise ConfigError(f"invalid parameters in '{spec}': {exc}")

    measure.spec = spec.strip()
    return measure
