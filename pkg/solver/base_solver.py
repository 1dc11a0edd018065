import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from hessian.tridiagonal import hessian_1d
from measures.base_measure import Measure
from models.solver_model import SolverSetting, SolveResult
from quantizer.geometry import CellStatistics, Method, assign, cell_statistics
from quantizer.grid import Quantizer
from util.errors import DomainError, InvalidQuantizer, UnsupportedOperation
from util.grid_io import read_grid
from util.rng import make_stream, split
from util.settings import settings as lab_settings

logger = logging.getLogger(__name__)

SEEDING_SAMPLE = 10_000
RESEED_POOL = 1_000
CLVQ_BLOCK = 4_096


class Solver:
    """
    Solver object that takes a probability measure as input and computes (near-)optimal
    quadratic quantizers of it, by Lloyd's fixed-point iteration, a damped Newton method
    on the tridiagonal Hessian (1D) or competitive learning (CLVQ).

    Cell statistics are exact in 1D (closed-form interval moments) and for empirical
    measures; analytic measures in d >= 2 use a Monte-Carlo sample drawn once per solve,
    or polygon quadrature in d = 2.

    Parameters
    ----------
    measure : Measure
        The measure to quantize.
    settings : SolverSetting
        Solver settings according to SolverSetting model.
    """

    def __init__(self, measure: Measure, settings: SolverSetting | None = None):
        self.measure = measure
        self.settings = settings or SolverSetting()
        if measure.is_empirical:
            self.method = Method.EMPIRICAL
        elif measure.dim == 1:
            self.method = Method.EXACT_1D
        else:
            self.method = Method(self.settings.multid_method)
        self.tol = self.settings.tol
        if self.tol is None:
            self.tol = 1e-10 if self.method in (Method.EXACT_1D, Method.QUADRATURE_2D) else 1e-8

    # -------------------------------- #

    def _stream(self, stream):
        if stream is not None:
            return stream
        return make_stream(self.settings.seed if self.settings.seed is not None else lab_settings.seed)

    def _statistics(self, points, samples) -> CellStatistics:
        return cell_statistics(points, self.measure, self.method, samples=samples)

    def _fixed_sample(self, stream):
        if self.method is not Method.MONTE_CARLO:
            return None
        return self.measure.sample(self.settings.mc_samples or lab_settings.mc_samples, stream)

    def _result(self, points, stats, iterations, history, name) -> SolveResult:
        grad = 2.0 * (points * stats.mass[:, None] - stats.first)
        gnorm = float(np.linalg.norm(grad))
        return SolveResult(
            quantizer=Quantizer(points),
            distortion=float(np.sum(stats.distortion)),
            iterations=iterations,
            converged=gnorm <= self.tol,
            gradient_norm=gnorm,
            method=f"{name}/{stats.tag}",
            history=history,
        )

    def _check_monotone(self, history):
        if self.method is Method.MONTE_CARLO or len(history) < 2:
            return
        previous, current = history[-2], history[-1]
        if current > previous + 1e-12 * max(1.0, abs(previous)):
            logger.warning("distortion increased from %.17g to %.17g at iteration %d", previous, current, len(history) - 1)

    # -------------------------------- #

    def init_quantizer(self, K: int, strategy: str | None = None, stream: np.random.Generator | None = None) -> Quantizer:
        """
        Initial grid of K distinct points.

        Parameters
        ----------
        K : int
            Quantization level.
        strategy : str
            `quantile` (1D, quantiles (2i-1)/(2K)), `sample-pp` (k-means++ seeding on a
            10^4-point sample) or `file:<grid.csv>`. Defaults to the configured init.
        stream : numpy Generator
            Random stream used by sample-pp.
        """
        strategy = strategy or self.settings.init
        if K < 1:
            raise DomainError(f"quantization level must be positive, got {K}")
        m = self.measure
        if m.is_empirical and len(m.distinct_points()) < K:
            raise DomainError(f"the measure has {len(m.distinct_points())} distinct atoms, fewer than K = {K}")

        if strategy.startswith("file:"):
            grid = read_grid(strategy[len("file:"):])
            if grid.K != K or grid.dim != m.dim:
                raise DomainError(f"initial grid has shape {grid.points.shape}, expected ({K}, {m.dim})")
            return grid

        if strategy == "quantile":
            if m.dim != 1:
                raise UnsupportedOperation("quantile initialization is defined in 1D only")
            levels = (2.0 * np.arange(1, K + 1) - 1.0) / (2.0 * K)
            points = np.atleast_1d(m.quantile(levels))
            if len(np.unique(points)) < K:
                # atoms shared by several quantile levels: spread over the distinct atoms instead
                atoms = m.distinct_points()[:, 0]
                points = atoms[np.floor(levels * len(atoms)).astype(int)]
            return Quantizer(points)

        if strategy == "sample-pp":
            return self._plus_plus(K, self._stream(stream))

        raise DomainError(f"unknown init strategy '{strategy}'")

    def _plus_plus(self, K, stream) -> Quantizer:
        m = self.measure
        if m.is_empirical and m.n <= SEEDING_SAMPLE:
            pool = m.distinct_points()
        else:
            pool = np.unique(m.sample(SEEDING_SAMPLE, stream), axis=0)
        if len(pool) < K:
            raise DomainError(f"seeding pool has {len(pool)} distinct points, fewer than K = {K}")
        if len(pool) == K:
            return Quantizer(pool)

        trials = 2 + int(np.log(K))
        centers = [pool[stream.integers(len(pool))]]
        closest = np.sum((pool - centers[0]) ** 2, axis=1)
        for _ in range(1, K):
            total = closest.sum()
            if total <= 0:
                raise DomainError("seeding pool has fewer distinct points than K")
            candidates = np.searchsorted(np.cumsum(closest), stream.random(trials) * total, side='right')
            candidates = np.minimum(candidates, len(pool) - 1)
            best, best_potential, best_closest = None, np.inf, None
            for c in candidates:
                trial = np.minimum(closest, np.sum((pool - pool[c]) ** 2, axis=1))
                if trial.sum() < best_potential:
                    best, best_potential, best_closest = c, trial.sum(), trial
            centers.append(pool[best])
            closest = best_closest
        return Quantizer(np.array(centers))

    # -------------------------------- #

    def _reseed(self, points, previous, stats, dead, samples, stream):
        """Move dead (empty or duplicated) centers; `stats` describe the cells of `previous`."""
        m = self.measure
        logger.warning("re-seeding %d dead center(s)", int(dead.sum()))
        points = points.copy()
        if self.method is Method.EXACT_1D:
            x = previous[:, 0]
            order = np.argsort(x)
            cuts = 0.5 * (x[order][1:] + x[order][:-1])
            lows = np.empty(len(x))
            lows[order] = np.concatenate([[-np.inf], cuts])
            targets = [i for i in np.argsort(-stats.distortion, kind='stable') if stats.mass[i] > 0]
            for j, i in zip(np.flatnonzero(dead), targets):
                base = float(m.cdf(lows[i])) if np.isfinite(lows[i]) else 0.0
                for share in (0.75, 0.25, 0.5):
                    candidate = m.quantile(base + share * stats.mass[i])
                    if candidate not in points[:, 0]:
                        points[j, 0] = candidate
                        break
            return points

        # farthest-atom rule on the atoms, the fixed sample, or a fresh pool
        if self.method is Method.EMPIRICAL:
            atoms = m.points
        elif samples is not None:
            atoms = samples
        else:
            atoms = m.sample(RESEED_POOL, stream)
        live = points[~dead]
        _, sqd = assign(live, atoms)
        taken = {tuple(p) for p in live}
        candidates = iter(np.argsort(-sqd, kind='stable'))
        for j in np.flatnonzero(dead):
            for c in candidates:
                if tuple(atoms[c]) not in taken:
                    points[j] = atoms[c]
                    taken.add(tuple(atoms[c]))
                    break
        return points

    def _lloyd_update(self, points, stats, samples, stream):
        new = points.copy()
        alive = stats.mass > 0
        new[alive] = stats.first[alive] / stats.mass[alive, None]
        _, first_seen = np.unique(new, axis=0, return_index=True)
        dead = ~alive
        duplicate = np.ones(len(new), dtype=bool)
        duplicate[first_seen] = False
        dead |= duplicate
        if dead.any():
            new = self._reseed(new, points, stats, dead, samples, stream)
        if new.shape[1] == 1:
            new = np.sort(new, axis=0)
        return new

    def lloyd(self, init: Quantizer, tol: float | None = None, max_iter: int | None = None,
              stream: np.random.Generator | None = None) -> SolveResult:
        """
        Lloyd I: replace every center by the centroid of its Voronoi cell.

        Stops when the gradient norm or the largest center displacement falls below `tol`.
        """
        tol = self.tol if tol is None else tol
        max_iter = self.settings.max_iter if max_iter is None else max_iter
        stream = self._stream(stream)
        samples = self._fixed_sample(stream)
        points = np.array(init.points, dtype=float)
        stats = self._statistics(points, samples)
        history = [float(np.sum(stats.distortion))]
        iterations = 0
        while iterations < max_iter:
            grad = 2.0 * (points * stats.mass[:, None] - stats.first)
            if np.linalg.norm(grad) <= tol:
                break
            new = self._lloyd_update(points, stats, samples, stream)
            displacement = float(np.max(np.abs(new - points)))
            points = new
            iterations += 1
            stats = self._statistics(points, samples)
            history.append(float(np.sum(stats.distortion)))
            self._check_monotone(history)
            logger.debug("lloyd iteration %d: distortion %.17g, displacement %.3e", iterations, history[-1], displacement)
            if displacement <= tol:
                break
        return self._result(points, stats, iterations, history, "lloyd")

    def newton_1d(self, init: Quantizer, tol: float | None = None, max_iter: int | None = None) -> SolveResult:
        """
        Damped Newton iteration on the 1D distortion.

        The step solves H δ = -∇D with the tridiagonal Hessian; it is halved until the
        distortion decreases and the grid stays sorted. A singular Hessian or a step that
        is not a descent direction falls back to one Lloyd iteration.
        """
        m = self.measure
        if m.dim != 1 or not m.is_analytic:
            raise UnsupportedOperation("newton_1d needs a 1D analytic measure")
        tol = self.tol if tol is None else tol
        max_iter = self.settings.max_iter if max_iter is None else max_iter
        x = np.array(init.flat(), dtype=float)
        if np.any(np.diff(x) <= 0):
            raise InvalidQuantizer("newton_1d needs a sorted grid of distinct points")

        def statistics(grid):
            return cell_statistics(grid.reshape(-1, 1), m, Method.EXACT_1D)

        stats = statistics(x)
        D = float(np.sum(stats.distortion))
        history = [D]
        iterations = 0
        while iterations < max_iter:
            g = 2.0 * (x * stats.mass - stats.first[:, 0])
            if np.linalg.norm(g) <= tol:
                break
            accepted = None
            try:
                T = hessian_1d(x, m)
                banded = np.zeros((3, len(x)))
                banded[0, 1:] = T.off
                banded[1] = T.diag
                banded[2, :-1] = T.off
                delta = solve_banded((1, 1), banded, -g)
                if not np.all(np.isfinite(delta)) or delta @ g >= 0:
                    raise LinAlgError("not a descent direction")
                t = 1.0
                for _ in range(60):
                    candidate = x + t * delta
                    if np.all(np.diff(candidate) > 0):
                        cand_stats = statistics(candidate)
                        cand_D = float(np.sum(cand_stats.distortion))
                        if cand_D <= D + 4.0 * np.finfo(float).eps * abs(D):
                            accepted = candidate, cand_stats, cand_D
                            break
                    t *= 0.5
            except (LinAlgError, ValueError, InvalidQuantizer) as exc:
                logger.debug("newton step rejected (%s); falling back to lloyd", exc)
            if accepted is None:
                candidate = self._lloyd_update(x.reshape(-1, 1), stats, None, None)[:, 0]
                cand_stats = statistics(candidate)
                accepted = candidate, cand_stats, float(np.sum(cand_stats.distortion))
            step = float(np.max(np.abs(accepted[0] - x)))
            x, stats, D = accepted
            iterations += 1
            history.append(D)
            self._check_monotone(history)
            logger.debug("newton iteration %d: distortion %.17g, step %.3e", iterations, D, step)
            if step == 0.0:
                break
        return self._result(x.reshape(-1, 1), stats, iterations, history, "newton")

    def clvq(self, init: Quantizer, steps: int | None = None, a: float | None = None, b: float | None = None,
             stream: np.random.Generator | None = None) -> SolveResult:
        """
        Competitive learning: at step t draw ξ and move the winning center by
        x_i <- x_i - γ_t (x_i - ξ), with γ_t = a / (b + t).
        """
        steps = self.settings.clvq_steps if steps is None else steps
        a = self.settings.clvq_a if a is None else a
        b = self.settings.clvq_b if b is None else b
        stream = self._stream(stream)
        points = np.array(init.points, dtype=float)
        t = 0
        while t < steps:
            block = self.measure.sample(min(CLVQ_BLOCK, steps - t), stream)
            for xi in block:
                t += 1
                winner = int(np.argmin(np.sum((points - xi) ** 2, axis=1)))
                points[winner] -= a / (b + t) * (points[winner] - xi)
        if points.shape[1] == 1:
            points = np.sort(points, axis=0)
        stats = self._statistics(points, self._fixed_sample(stream))
        return self._result(points, stats, steps, [float(np.sum(stats.distortion))], "clvq")

    # -------------------------------- #

    def _initial_strategy(self, restart: int) -> str:
        strategy = self.settings.init
        if restart > 0 or (strategy == "quantile" and self.measure.dim != 1):
            return "sample-pp"
        return strategy

    def solve(self, K: int, stream: np.random.Generator | None = None, init: Quantizer | None = None) -> SolveResult:
        """
        Run the configured method from `init` (or the configured initialization).
        """
        stream = self._stream(stream)
        if init is None:
            init = self.init_quantizer(K, self._initial_strategy(0), stream)
        method = self.settings.method
        if method == "newton":
            return self.newton_1d(init)
        if method == "clvq":
            return self.clvq(init, stream=stream)
        return self.lloyd(init, stream=stream)

    def _restart(self, K: int, r: int, stream: np.random.Generator) -> SolveResult:
        init = self.init_quantizer(K, self._initial_strategy(r), stream)
        result = self.solve(K, stream, init)
        logger.debug("restart %d: distortion %.17g", r, result.distortion)
        return result

    def best_of(
        self,
        K: int,
        restarts: int | None = None,
        stream: np.random.Generator | None = None,
        workers: int = 1,
    ):
        """
        Multistart estimate of the optimal quantizer.

        Restart 0 uses the configured initialization, later ones k-means++ seeding; each
        restart owns a child stream, so running restarts on `workers` processes gives the
        same result. The best result is the lowest distortion, ties going to the lowest
        restart index.

        Returns
        -------
        result : SolveResult
        e_star_hat : float
            √ of the best distortion.
        rho_hat : float
            Largest point norm of the best grid.
        """
        restarts = self.settings.restarts if restarts is None else restarts
        if restarts < 1:
            raise DomainError(f"restarts must be at least 1, got {restarts}")
        children = split(self._stream(stream), restarts)
        if workers > 1 and restarts > 1:
            with ProcessPoolExecutor(max_workers=min(workers, restarts)) as pool:
                results = list(pool.map(self._restart, [K] * restarts, range(restarts), children))
        else:
            results = [self._restart(K, r, child) for r, child in enumerate(children)]
        best = None
        for result in results:
            if best is None or result.distortion < best.distortion:
                best = result
        return best, float(np.sqrt(best.distortion)), best.quantizer.max_norm()
