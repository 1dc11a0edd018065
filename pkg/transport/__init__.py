from transport.wasserstein import w2_assignment, w2_gaussian, w_p_1d, w_p_sorted, wasserstein

__all__ = ["w2_assignment", "w2_gaussian", "w_p_1d", "w_p_sorted", "wasserstein"]
