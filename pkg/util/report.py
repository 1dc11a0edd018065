"""
Plain-text rendering of result models: `key: value` lines, with matrices and grids
written as indented rows of space-separated numbers.
"""
from collections.abc import Mapping

import numpy as np


def format_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return " ".join(format_value(v) for v in value)
    return str(value)


def render(fields: Mapping, matrices: Mapping | None = None) -> str:
    lines = [f"{key}: {format_value(value)}" for key, value in fields.items()]
    for key, rows in (matrices or {}).items():
        lines.append(f"{key}:")
        lines.extend(f"  {format_value(list(row))}" for row in np.atleast_2d(np.asarray(rows, dtype=float)))
    return "\n".join(lines)


def render_solve(result) -> str:
    return render(
        {
            "method": result.method,
            "K": result.quantizer.K,
            "dim": result.quantizer.dim,
            "distortion": result.distortion,
            "quantization_error": result.quantization_error,
            "iterations": result.iterations,
            "converged": result.converged,
            "gradient_norm": result.gradient_norm,
        },
        {"grid": result.quantizer.points},
    )


def render_hessian(report) -> str:
    fields = {}
    if report.certificate is not None:
        cert = report.certificate
        fields.update(
            positive_definite=cert.positive_definite,
            leading_minors=cert.leading_minors,
            row_excess=cert.row_excess,
            lambda_star=cert.lambda_star,
        )
    fields.update(fd_discrepancy=report.fd_discrepancy, boundary_flag=report.boundary_flag)
    return render(fields, {"matrix": report.matrix})


def render_model(model) -> str:
    """Any flat pydantic model; nested mappings are flattened as `outer.inner`."""
    fields = {}
    for key, value in model.model_dump().items():
        if isinstance(value, Mapping):
            fields.update({f"{key}.{inner}": v for inner, v in value.items()})
        else:
            fields[key] = value
    return render(fields)
