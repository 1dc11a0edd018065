import pandas as pd

from quantizer.grid import Quantizer
from util.errors import ConfigError, InvalidQuantizer
from util.measure_loader import load_points


def read_grid(path: str) -> Quantizer:
    """Read a quantizer CSV: K rows, d columns, no header."""
    points = load_points(path)
    try:
        return Quantizer(points)
    except InvalidQuantizer as exc:
        raise ConfigError(f"grid '{path}' is not a valid quantizer: {exc}")


def write_grid(quantizer: Quantizer, path: str):
    pd.DataFrame(quantizer.points).to_csv(path, header=False, index=False, float_format='%.17g')
