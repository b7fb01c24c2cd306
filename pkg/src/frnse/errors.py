"""Shared exception types for the solvers."""


class NonConvergence(Exception):
    """Picard iteration hit max_iter with the increment still above tol.

    Usually means the horizon T is too large for the contraction regime.
    The partial convergence data is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DivergenceDetected(Exception):
    """NaN or overflow appeared during time stepping or fixed-point iteration."""
