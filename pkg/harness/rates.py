import numpy as np
import pandas as pd

from models.experiment_model import ResultRow
from util.errors import DomainError


def fit_rate(rows: list[ResultRow | dict], x_field: str = "n", y_field: str = "performance") -> tuple[float, float, float]:
    """
    Least-squares fit of log(mean y) = intercept + slope * log(x) over the per-x means.

    Rows without a y value (timeouts, undefined quantities) are skipped.

    Returns
    -------
    slope, intercept, r2 : float
    """
    records = [row.model_dump() if isinstance(row, ResultRow) else dict(row) for row in rows]
    table = pd.DataFrame.from_records(records)
    if x_field not in table or y_field not in table:
        raise DomainError(f"rows have no '{x_field}' or '{y_field}' field")
    table = table[[x_field, y_field]].astype(float).dropna()
    means = table.groupby(x_field)[y_field].mean()
    if len(means) < 3:
        raise DomainError(f"a rate fit needs at least 3 distinct {x_field} values, got {len(means)}")
    if (means.index <= 0).any() or (means <= 0).any():
        raise DomainError(f"log-log fit needs positive {x_field} and mean {y_field}")

    log_x, log_y = np.log(means.index.to_numpy()), np.log(means.to_numpy())
    slope, intercept = np.polyfit(log_x, log_y, 1)
    residual = log_y - (intercept + slope * log_x)
    total = np.sum((log_y - log_y.mean()) ** 2)
    r2 = 1.0 if total == 0 else 1.0 - float(np.sum(residual ** 2)) / float(total)
    return float(slope), float(intercept), r2
