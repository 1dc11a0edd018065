import math

from bounds.theorems import (
    bounded_support_bound,
    clustering_bound_thm42,
    empirical_rate_prop41,
    fournier_guillin_rate,
    perf_bound_thm21,
    quantizer_bound_thm22,
    radius_bounds,
    zador_upper,
)
from models.data_model import TailDescriptor
from models.result_model import BoundReport
from util.errors import DomainError

ASYMPTOTIC = {"thm42b", "thm42c", "radius"}


def _radius(params):
    tail_fields = {k: params[k] for k in ("theta", "kappa", "c", "tau", "beta", "A") if k in params}
    kind = params.get("tail", "hyper-exponential" if "theta" in params else "polynomial")
    try:
        tail = TailDescriptor(kind=kind, **tail_fields)
    except ValueError as exc:
        raise DomainError(f"invalid tail: {exc}")
    return radius_bounds(tail, params.get("d"), params.get("K"), params.get("p", 2.0)).value


def _required(params, *names):
    missing = [name for name in names if name not in params]
    if missing:
        raise DomainError(f"missing parameter(s): {', '.join(missing)}")
    return [params[name] for name in names]


def _thm42(kind):
    def evaluate(params):
        _required(params, "K", "n")
        return clustering_bound_thm42(kind, **params)
    return evaluate


BOUNDS = {
    "thm21": lambda p: perf_bound_thm21(*_required(p, "e_star", "w2")),
    "thm22": lambda p: quantizer_bound_thm22(*_required(p, "lambda_star", "e_star", "w2")),
    "prop41": lambda p: empirical_rate_prop41(*_required(p, "d", "q", "n")),
    "thm42a": _thm42("a"),
    "thm42b": _thm42("b"),
    "thm42c": _thm42("c"),
    "zador": lambda p: zador_upper(*_required(p, "C", "sigma", "d", "K")),
    "radius": _radius,
    "fournier-guillin": lambda p: fournier_guillin_rate(*_required(p, "p", "d", "q", "n", "M_q"), C=p.get("C", 1.0)),
    "bounded-support": lambda p: bounded_support_bound(*_required(p, "K", "n", "R")),
}


def parse_params(text: str) -> dict:
    """Parse `k=v,k=v`; numbers become floats, true/false booleans, anything else stays a string."""
    params = {}
    for item in filter(None, (part.strip() for part in (text or "").split(','))):
        key, sep, value = item.partition('=')
        if not sep or not key.strip():
            raise DomainError(f"expected key=value, got '{item}'")
        value = value.strip()
        if value.lower() in ("true", "false"):
            params[key.strip()] = value.lower() == "true"
            continue
        try:
            params[key.strip()] = float(value)
        except ValueError:
            params[key.strip()] = value
    return params


def evaluate_bound(name: str, params: dict) -> BoundReport:
    """
    Evaluate a named bound; an optional `measured` parameter (with `measured_std_error`) fills the slack.
    """
    if name not in BOUNDS:
        raise DomainError(f"unknown bound '{name}', expected one of {', '.join(BOUNDS)}")
    params = dict(params)
    measured = params.pop("measured", None)
    measured_se = params.pop("measured_std_error", None)
    bound = BOUNDS[name](params)
    slack = None if measured is None else bound - measured
    if slack is not None and math.isnan(slack):
        slack = None
    return BoundReport(
        name=name,
        measured=measured,
        measured_std_error=measured_se,
        bound=bound,
        slack=slack,
        inputs=params,
        applicable="asymptotic" if name in ASYMPTOTIC else True,
    )
