import logging

from flask import Flask, jsonify, request
from pydantic import ValidationError

from bounds.report import BOUNDS, evaluate_bound
from hessian.report import hessian_report
from models.solver_model import SolverSetting
from quantizer.grid import Quantizer
from solver.base_solver import Solver
from transport.wasserstein import wasserstein
from util.errors import QuantLabError
from util.measure_loader import load_measure
from util.rng import make_stream
from util.settings import configure_logging, settings

configure_logging()
logger = logging.getLogger(__name__)

app = Flask(__name__)


def _body() -> dict:
    body = request.get_json(silent=True)
    if not isinstance(body, dict):
        raise QuantLabError("request body must be a JSON object")
    return body


def _required(body, *names):
    missing = [name for name in names if body.get(name) is None]
    if missing:
        raise QuantLabError(f"missing field(s): {', '.join(missing)}")
    return [body[name] for name in names]


@app.errorhandler(QuantLabError)
def handle_lab_error(exc):
    return jsonify({'error': str(exc)}), 400


@app.errorhandler(ValidationError)
def handle_validation_error(exc):
    return jsonify({'error': str(exc)}), 400


@app.route('/solve', methods=['POST'])
def solve():
    body = _body()
    dist, K = _required(body, 'dist', 'K')
    solver_settings = SolverSetting(**{k: v for k, v in body.items() if k in SolverSetting.model_fields})
    seed = settings.seed if solver_settings.seed is None else solver_settings.seed
    result, e_star, rho = Solver(load_measure(dist), solver_settings).best_of(int(K), stream=make_stream(seed))
    return jsonify({
        'grid': result.quantizer.points.tolist(),
        'distortion': result.distortion,
        'quantization_error': e_star,
        'max_norm': rho,
        'iterations': result.iterations,
        'converged': result.converged,
        'gradient_norm': result.gradient_norm,
        'method': result.method,
    })


@app.route('/hessian', methods=['POST'])
def hessian():
    body = _body()
    dist, grid = _required(body, 'dist', 'grid')
    report = hessian_report(Quantizer(grid), load_measure(dist), fd_check=bool(body.get('fd_check', False)))
    return jsonify(report.model_dump())


@app.route('/w2', methods=['POST'])
def w2():
    body = _body()
    a, b = _required(body, 'a', 'b')
    result = wasserstein(load_measure(a), load_measure(b), int(body.get('p', 2)))
    return jsonify(result.model_dump())


@app.route('/bounds', methods=['POST'])
def bounds():
    body = _body()
    name, = _required(body, 'name')
    if name not in BOUNDS:
        return jsonify({'error': f"unknown bound '{name}'"}), 404
    params = body.get('params', {})
    if not isinstance(params, dict):
        raise QuantLabError("params must be a JSON object")
    return jsonify(evaluate_bound(name, params).model_dump())


if __name__ == '__main__':
    app.run(debug=True)
