import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from bounds.scales import max_norm_estimates
from bounds.theorems import (
    clustering_bound_thm42,
    gaussian_performance_constant,
    perf_bound_thm21,
    quantizer_bound_thm22,
)
from hessian.tridiagonal import hessian_1d, pd_certificate, theorem_lambda_star
from measures import EmpiricalMeasure, Gaussian1D, GaussianNd, Uniform1D
from measures.base_measure import Measure
from models.experiment_model import EXPERIMENTS, SCHEMA_VERSION, ExperimentConfig, ResultRow
from quantizer.geometry import Method, distortion
from quantizer.grid import Quantizer
from solver.base_solver import Solver
from transport.wasserstein import w2_assignment, w_p_1d
from util.errors import ConfigError, DomainError, NotApplicable, QuantLabError, UnsupportedOperation
from util.measure_loader import load_measure
from util.rng import make_stream, split
from util.settings import settings

logger = logging.getLogger(__name__)

# second stream key, separating the stream families of one experiment
CELL_TAG, REFERENCE_TAG, EVALUATION_TAG, NORM_TAG = 0, 1, 2, 3

# below this sample size the quantizer-distance bound is reported as pre-asymptotic
PRE_ASYMPTOTIC_N = 256

COLUMNS = [
    "schema_version", "experiment", "distribution", "K", "n", "seed", "performance", "w2", "w2_surrogate",
    "bound", "slack", "quantizer_distance", "bound_asymptotic", "status",
]


class CellJob(NamedTuple):
    cfg: ExperimentConfig
    base_seed: int
    K: int
    n: int
    seed: int
    reference: np.ndarray          # (K, d) reference optimum of μ
    lambda_star: float | None      # thm22-distance only
    norms: tuple | None            # thm42-gaussian only: (r1, r_n, r_2n) estimates
    timeout: float


def load_config(path: str) -> ExperimentConfig:
    """Read and validate a JSON experiment configuration; every failure is a ConfigError."""
    try:
        with open(path) as f:
            document = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    try:
        cfg = ExperimentConfig(**document)
    except (ValidationError, TypeError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}")
    load_measure(cfg.distribution)
    return cfg


@lru_cache(maxsize=8)
def _measure(spec: str) -> Measure:
    return load_measure(spec)


def _experiment_index(cfg: ExperimentConfig) -> int:
    return EXPERIMENTS.index(cfg.experiment)


def check_experiment(cfg: ExperimentConfig, m: Measure):
    """Raise UnsupportedOperation when the experiment cannot run on the configured distribution."""
    name = cfg.experiment
    if name == "uniform-closed-form" and not isinstance(m, Uniform1D):
        raise UnsupportedOperation(f"{name} needs a uniform:a,b distribution, got {cfg.distribution}")
    if name == "thm21-slack" and m.dim != 1:
        raise UnsupportedOperation(f"{name} needs a 1D distribution (exact W2), got d={m.dim}")
    if name == "thm22-distance" and not (m.dim == 1 and m.is_analytic):
        raise UnsupportedOperation(f"{name} needs a 1D analytic distribution, got {cfg.distribution}")
    if name == "thm42-gaussian" and not isinstance(m, (Gaussian1D, GaussianNd)):
        raise UnsupportedOperation(f"{name} needs a Gaussian distribution, got {cfg.distribution}")
    if cfg.solver.method == "newton" and m.dim != 1:
        raise UnsupportedOperation("the newton method is defined in 1D only")
    if min(cfg.n) < max(cfg.K):
        raise DomainError(f"every sample size must be at least K, got n={min(cfg.n)} < K={max(cfg.K)}")


def _cell_settings(cfg: ExperimentConfig):
    # x^(n) quantizes an empirical measure, where Newton is not defined
    if cfg.solver.method == "newton":
        return cfg.solver.model_copy(update={"method": "lloyd"})
    return cfg.solver


def reference_optimum(cfg: ExperimentConfig, m: Measure, K: int, base_seed: int, workers: int = 1) -> Quantizer:
    """
    Best-known optimal quantizer of μ at level K: the closed form (2i-1)/(2K) grid for
    the uniform experiment, a multistart solve otherwise, its restarts spread over `workers`.
    """
    if cfg.experiment == "uniform-closed-form":
        a, b = m.a, m.b
        return Quantizer(a + (b - a) * (2.0 * np.arange(1, K + 1) - 1.0) / (2.0 * K))
    restarts = cfg.reference_restarts or settings.reference_restarts
    stream = make_stream(base_seed, _experiment_index(cfg), REFERENCE_TAG, K)
    result, _, _ = Solver(m, cfg.solver).best_of(K, restarts=restarts, stream=stream, workers=workers)
    logger.info("reference optimum for K=%d: distortion %.17g (%s)", K, result.distortion, result.method)
    return result.quantizer


def _evaluator(cfg: ExperimentConfig, m: Measure, base_seed: int):
    """D_μ(·) shared by x^(n) and the reference, so both are measured with the same sample."""
    if m.is_empirical or m.dim == 1:
        return lambda x: distortion(x, m).value
    if m.dim == 2 and cfg.solver.multid_method == Method.QUADRATURE_2D.value:
        return lambda x: distortion(x, m, Method.QUADRATURE_2D).value
    size = cfg.solver.mc_samples or settings.mc_samples
    sample = m.sample(size, make_stream(base_seed, _experiment_index(cfg), EVALUATION_TAG))
    return lambda x: distortion(x, m, Method.MONTE_CARLO, samples=sample).value


def _w2(m: Measure, empirical: EmpiricalMeasure, stream) -> tuple[float | None, bool]:
    if m.dim == 1:
        return w_p_1d(empirical, m, 2).distance, False
    # d >= 2: W2 between two independent n-samples stands in for W2(μ_n, μ)
    if empirical.n > settings.assignment_limit:
        return None, True
    other = EmpiricalMeasure(m.sample(empirical.n, stream))
    return w2_assignment(empirical, other).distance, True


def run_cell(job: CellJob) -> ResultRow:
    """One (K, n, seed) cell; depends only on the job, never on other cells."""
    cfg, K, n, seed = job.cfg, job.K, job.n, job.seed
    started = time.perf_counter()
    m = _measure(cfg.distribution)
    sample_stream, solve_stream, w2_stream = split(
        make_stream(job.base_seed, _experiment_index(cfg), CELL_TAG, K, n, seed), 3)

    empirical = EmpiricalMeasure(m.sample(n, sample_stream))
    x_n, _, _ = Solver(empirical, _cell_settings(cfg)).best_of(K, stream=solve_stream)
    x_n = x_n.quantizer
    reference = Quantizer(job.reference)

    evaluate = _evaluator(cfg, m, job.base_seed)
    d_star = evaluate(reference)
    performance = evaluate(x_n) - d_star
    w2, surrogate = _w2(m, empirical, w2_stream)
    e_star = float(np.sqrt(max(d_star, 0.0)))
    row = dict(performance=performance, w2=w2, w2_surrogate=surrogate)

    name = cfg.experiment
    if name in ("consistency", "uniform-closed-form"):
        row["quantizer_distance"] = x_n.distance_to(reference)
    elif name == "thm21-slack":
        row["bound"] = perf_bound_thm21(e_star, w2)
        row["slack"] = row["bound"] - performance
    elif name == "thm22-distance":
        distance = x_n.distance_to(reference)
        row["quantizer_distance"] = distance
        try:
            row["bound"] = quantizer_bound_thm22(job.lambda_star, e_star, w2)
            row["slack"] = row["bound"] - distance ** 2
        except NotApplicable as exc:
            logger.info("K=%d n=%d seed=%d: %s", K, n, seed, exc)
        if n < PRE_ASYMPTOTIC_N:
            row["status"] = "pre-asymptotic"
    elif name == "thm42-gaussian":
        (r1, _), _, (r2n, _) = job.norms
        row["bound"] = clustering_bound_thm42("a", K, n, r1=r1, r2n=r2n, rho=reference.max_norm())
        row["slack"] = row["bound"] - performance
        try:
            row["bound_asymptotic"] = clustering_bound_thm42(
                "c", K, n, C=gaussian_performance_constant(m), kappa=2.0, d=m.dim, gamma=cfg.gamma)
        except NotApplicable as exc:
            logger.info("K=%d n=%d seed=%d: %s", K, n, seed, exc)

    elapsed = time.perf_counter() - started
    if elapsed > job.timeout:
        logger.warning("cell K=%d n=%d seed=%d exceeded %.1fs (%.1fs)", K, n, seed, job.timeout, elapsed)
        row = dict(status="timeout")
    else:
        logger.info("cell K=%d n=%d seed=%d done in %.2fs", K, n, seed, elapsed)
    return ResultRow(experiment=name, distribution=cfg.distribution, K=K, n=n, seed=seed, wall_time=elapsed, **row)


def _jobs(cfg: ExperimentConfig, m: Measure, base_seed: int, workers: int = 1) -> list[CellJob]:
    timeout = cfg.cell_timeout or settings.cell_timeout
    norms = {}
    if cfg.experiment == "thm42-gaussian":
        for n in cfg.n:
            stream = make_stream(base_seed, _experiment_index(cfg), NORM_TAG, n)
            norms[n] = max_norm_estimates(m, n, cfg.max_norm_reps, stream)
    jobs = []
    for K in cfg.K:
        reference = reference_optimum(cfg, m, K, base_seed, workers)
        lambda_star = None
        if cfg.experiment == "thm22-distance":
            lambda_star = theorem_lambda_star(pd_certificate(hessian_1d(reference, m)))
        for n in cfg.n:
            for seed in range(cfg.seeds):
                jobs.append(CellJob(cfg, base_seed, K, n, seed, reference.points, lambda_star, norms.get(n), timeout))
    return jobs


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> list[ResultRow]:
    """
    Run every (K, n, seed) cell of an experiment.

    Each cell draws an n-sample of μ, solves for the optimal quantizer x^(n) of the
    empirical measure and measures it against the reference optimum of μ. Rows come
    back sorted by (K, n, seed) and do not depend on the number of workers.

    Parameters
    ----------
    cfg : ExperimentConfig
    workers : int, optional
        Worker processes; defaults to the config, then QLAB_WORKERS.
    """
    try:
        m = load_measure(cfg.distribution)
    except QuantLabError as exc:
        raise ConfigError(str(exc))
    check_experiment(cfg, m)
    base_seed = cfg.base_seed if cfg.base_seed is not None else settings.seed
    workers = workers or cfg.workers or settings.workers
    jobs = _jobs(cfg, m, base_seed, workers)
    logger.info("running %s on %s: %d cells, %d worker(s)", cfg.experiment, cfg.distribution, len(jobs), workers)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_cell, jobs, chunksize=1))
    else:
        rows = [run_cell(job) for job in jobs]
    return sorted(rows, key=lambda r: (r.K, r.n, r.seed))


def write_results(rows: list[ResultRow], path: str) -> Path:
    """
    Write the result table, sorted by (K, n, seed), with 17 significant digits.

    Wall times go to a `<stem>.timing.csv` sidecar so that the main table is identical
    across reruns. Returns the path of the sidecar.
    """
    rows = sorted(rows, key=lambda r: (r.K, r.n, r.seed))
    records = [{"schema_version": SCHEMA_VERSION, **row.model_dump(exclude={"wall_time"})} for row in rows]
    table = pd.DataFrame.from_records(records, columns=COLUMNS)
    for column in ("performance", "w2", "bound", "slack", "quantizer_distance", "bound_asymptotic"):
        table[column] = table[column].astype(float)
    table.to_csv(path, index=False, float_format='%.17g', lineterminator='\n')

    timing_path = Path(path).with_suffix(".timing.csv")
    timing = pd.DataFrame.from_records(
        [{"K": r.K, "n": r.n, "seed": r.seed, "wall_time": r.wall_time} for r in rows],
        columns=["K", "n", "seed", "wall_time"],
    )
    timing.to_csv(timing_path, index=False, float_format='%.6f', lineterminator='\n')
    return timing_path
