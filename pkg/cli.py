import logging
import sys
from contextlib import contextmanager

import click
from pydantic import ValidationError

from bounds.report import evaluate_bound, parse_params
from harness.runner import load_config, run_experiment, write_results
from hessian.report import hessian_report
from models.solver_model import SolverSetting
from solver.base_solver import Solver
from transport.wasserstein import wasserstein
from util.errors import ConfigError, QuantLabError
from util.grid_io import read_grid, write_grid
from util.measure_loader import load_measure
from util.report import render_hessian, render_model, render_solve
from util.rng import make_stream
from util.settings import configure_logging, settings

logger = logging.getLogger(__name__)


@contextmanager
def _errors():
    try:
        yield
    except (QuantLabError, ValidationError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


@click.group()
@click.option('--log-level', default=None, help="Overrides QLAB_LOG_LEVEL.")
def cli(log_level):
    """Optimal quantization laboratory."""
    configure_logging(log_level)


@cli.command()
@click.option('--dist', required=True, help="Distribution spec, e.g. gauss:0,1.")
@click.option('--K', 'K', type=int, required=True, help="Quantization level.")
@click.option('--method', type=click.Choice(["lloyd", "newton", "clvq"]), default="lloyd")
@click.option('--init', 'init', default="quantile", help="quantile | sample-pp | file:<grid.csv>")
@click.option('--tol', type=float, default=None)
@click.option('--max-iter', type=int, default=10_000)
@click.option('--restarts', type=int, default=1)
@click.option('--seed', type=int, default=None, help="Defaults to QLAB_SEED.")
@click.option('--multid-method', type=click.Choice(["montecarlo", "quadrature2d"]), default="montecarlo")
@click.option('--mc-samples', type=int, default=None)
@click.option('--grid', 'grid_path', default=None, help="Write the grid to this CSV file.")
@click.option('--workers', type=int, default=1, help="Processes sharing the restarts.")
def solve(dist, K, method, init, tol, max_iter, restarts, seed, multid_method, mc_samples, grid_path, workers):
    """Compute a (near-)optimal quantizer of a distribution."""
    with _errors():
        m = load_measure(dist)
        solver_settings = SolverSetting(
            method=method, init=init, tol=tol, max_iter=max_iter, restarts=restarts,
            multid_method=multid_method, mc_samples=mc_samples, seed=seed,
        )
        seed = settings.seed if seed is None else seed
        result, _, _ = Solver(m, solver_settings).best_of(K, stream=make_stream(seed), workers=workers)
        click.echo(render_solve(result))
        if grid_path:
            write_grid(result.quantizer, grid_path)


@cli.command()
@click.option('--dist', required=True)
@click.option('--grid', 'grid_path', required=True, help="Quantizer CSV, K rows by d columns.")
@click.option('--fd-check', is_flag=True, help="Compare against finite differences.")
def hessian(dist, grid_path, fd_check):
    """Hessian of the distortion at a grid, with its positive-definiteness certificate."""
    with _errors():
        report = hessian_report(read_grid(grid_path), load_measure(dist), fd_check=fd_check)
        click.echo(render_hessian(report))


@cli.command()
@click.option('--a', 'a_spec', required=True)
@click.option('--b', 'b_spec', required=True)
@click.option('--p', type=click.Choice(["1", "2"]), default="2")
def w2(a_spec, b_spec, p):
    """Wasserstein distance between two distributions."""
    with _errors():
        result = wasserstein(load_measure(a_spec), load_measure(b_spec), int(p))
        click.echo(render_model(result))


@cli.command()
@click.option('--name', required=True, help="thm21, thm22, prop41, thm42a|b|c, zador, radius, ...")
@click.option('--params', default="", help="Comma-separated key=value pairs.")
def bounds(name, params):
    """Evaluate a closed-form bound."""
    with _errors():
        click.echo(render_model(evaluate_bound(name, parse_params(params))))


@cli.command()
@click.option('--config', 'config_path', required=True, help="JSON experiment configuration.")
@click.option('--out', default=None, help="Result CSV; defaults to the config's output.")
@click.option('--workers', type=int, default=None)
def experiment(config_path, out, workers):
    """Run an experiment grid; exit code 2 when some cells timed out."""
    with _errors():
        cfg = load_config(config_path)
        out = out or cfg.output
        if not out:
            raise ConfigError("no output path: pass --out or set 'output' in the config")
        rows = run_experiment(cfg, workers=workers)
        write_results(rows, out)
        timeouts = sum(row.status == "timeout" for row in rows)
        click.echo(f"rows: {len(rows)}\ntimeouts: {timeouts}\noutput: {out}")
    if timeouts:
        sys.exit(2)


if __name__ == '__main__':
    cli()
