from solver.base_solver import Solver

__all__ = ["Solver"]
