"""Choice of the tilt vector minimizing the expected sampling cost."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible
from .model import ModelParams, validate_model
from .tilt import complexity_term, solve_psi_B, theta0_upper

INV_PHI = (math.sqrt(5) - 1) / 2
EPS = 1e-6


def golden_section(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(argmin, f(argmin))``.

    Stops once the bracket is narrower than ``tol``. Endpoint values are
    compared at the end so a monotone ``f`` returns the better endpoint.
    """
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    e = a + INV_PHI * (b - a)
    fc, fe = f(c), f(e)
    while b - a > tol:
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + INV_PHI * (b - a)
            fe = f(e)
    x, fx = (c, fc) if fc <= fe else (e, fe)
    for end in (lo, hi):
        f_end = f(end)
        if f_end < fx:
            x, fx = end, f_end
    return x, fx


@dataclass
class EtaOptimum:
    eta_star: np.ndarray
    X_at_eta_star: float
    theta0: np.ndarray
    # Distance from each coordinate to the nearer end of its search interval.
    boundary_gap: np.ndarray

    def to_dict(self) -> dict:
        return {
            "eta_star": self.eta_star.tolist(),
            "X_at_eta_star": self.X_at_eta_star,
            "theta0": self.theta0.tolist(),
            "boundary_gap": self.boundary_gap.tolist(),
        }


def optimize_eta(params: ModelParams, tol: float = 1e-5, eps: float = EPS) -> EtaOptimum:
    """Coordinate-wise golden-section minimization of the cost.

    The cost is a sum of one-coordinate terms, each convex, so the d searches
    are independent. Each runs on ``(eps, theta0_i - eps)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    validate_model(params)
    theta0 = theta0_upper(params)
    eta = np.empty(params.d)
    terms = np.empty(params.d)
    gap = np.empty(params.d)
    for i in range(params.d):
        lo, hi = eps, theta0[i] - eps
        if not hi > lo:
            raise Infeasible(f"no interior feasible tilt for direction {i + 1}")

        def cost(e, i=i):
            return complexity_term(params, i, e, solve_psi_B(params, e))

        eta[i], terms[i] = golden_section(cost, lo, hi, tol)
        gap[i] = min(eta[i] - lo, hi - eta[i])
    return EtaOptimum(eta, float(terms.sum()), theta0, gap)
