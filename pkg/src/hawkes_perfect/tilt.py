"""Cumulant generating function of the total birth time and the tilted cluster law.

For a tilt ``theta`` the vector ``psi_B(theta)`` is the least nonnegative
solution of

    x_i = sum_j hbar_ij * (exp(psi_f_ij(theta) + x_j) - 1).

The right-hand side ``F`` is increasing and convex in ``x`` with Jacobian
``hbar_ij * exp(psi_f_ij + x_j)``, which at the solution is exactly the
tilted offspring matrix ``h_tilde``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .branching import EffectiveClusterParams
from .errors import Infeasible, TiltTooLarge
from .model import ModelParams, hbar, spectral_radius

log = logging.getLogger(__name__)

TOL = 1e-12
OVERFLOW_GUARD = 1e3
MAX_ITER = 100_000


@dataclass(frozen=True)
class TiltSolution:
    eta: float
    psi_B: np.ndarray
    psi_f_matrix: np.ndarray
    h_tilde: np.ndarray
    s_tilde_rowsums: np.ndarray
    feasible: bool
    iterations: int = 0
    residual: float = float("nan")

    def require_feasible(self) -> "TiltSolution":
        if not self.feasible:
            raise Infeasible(f"cumulant system has no finite solution at eta={self.eta}")
        return self


def _infeasible(theta: float, psi_f_mat: np.ndarray, d: int, iterations: int) -> TiltSolution:
    nan_vec = np.full(d, np.nan)
    return TiltSolution(
        eta=theta,
        psi_B=nan_vec,
        psi_f_matrix=psi_f_mat,
        h_tilde=np.full((d, d), np.nan),
        s_tilde_rowsums=nan_vec.copy(),
        feasible=False,
        iterations=iterations,
    )


def solve_psi_B(
    params: ModelParams,
    theta: float,
    tol: float = TOL,
    guard: float = OVERFLOW_GUARD,
    max_iter: int = MAX_ITER,
) -> TiltSolution:
    """Solve the cumulant fixed-point system at ``theta`` by monotone iteration from zero.

    Each step is a Newton step on ``x = F(x)``; started from ``0`` the iterates
    increase monotonically to the least fixed point, the same limit as plain
    iteration ``x <- F(x)`` but in a handful of steps. The system is declared
    infeasible when the Jacobian reaches spectral radius 1 before convergence
    (no finite least root), when an iterate passes ``guard``, or when
    ``max_iter`` steps pass without the residual dropping below ``tol``.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    d = params.d
    psi_f_mat = params.kernel.psi_f_matrix(theta)
    h = hbar(params)
    eye = np.eye(d)
    x = np.zeros(d)
    for it in range(max_iter + 1):
        growth = h * np.exp(psi_f_mat + x)
        residual_vec = growth.sum(axis=1) - h.sum(axis=1) - x
        residual = float(np.max(np.abs(residual_vec))) if d else 0.0
        if residual < tol:
            break
        if it == max_iter or spectral_radius(growth) >= 1.0:
            return _infeasible(theta, psi_f_mat, d, it)
        step = np.linalg.solve(eye - growth, residual_vec)
        # From below the least root the Newton step is nonnegative; clip roundoff.
        x = x + np.maximum(step, 0.0)
        if not np.all(np.isfinite(x)) or np.max(x) > guard:
            return _infeasible(theta, psi_f_mat, d, it + 1)

    h_tilde = h * np.exp(psi_f_mat + x)
    if spectral_radius(h_tilde) >= 1.0:
        return _infeasible(theta, psi_f_mat, d, it)
    s_rows = np.linalg.solve(eye - h_tilde, np.ones(d))
    return TiltSolution(
        eta=theta,
        psi_B=x,
        psi_f_matrix=psi_f_mat,
        h_tilde=h_tilde,
        s_tilde_rowsums=s_rows,
        feasible=True,
        iterations=it,
        residual=residual,
    )


def is_feasible(params: ModelParams, theta: float) -> bool:
    try:
        return solve_psi_B(params, theta).feasible
    except TiltTooLarge:
        return False


def tilted_cluster_params(params: ModelParams, sol: TiltSolution) -> EffectiveClusterParams:
    """Cluster law under exponential tilting of the total birth time by ``sol.eta``."""
    sol.require_feasible()
    return EffectiveClusterParams(
        offspring_means=sol.h_tilde,
        birth_sampler=params.kernel.birth_sampler(sol.eta),
        eta=sol.eta,
    )


class TiltCache:
    """Solutions keyed by tilt value; each distinct ``eta`` is solved once."""

    def __init__(self, params: ModelParams, key_tol: float = 1e-12):
        self.params = params
        self.key_tol = key_tol
        self._solutions: dict[float, TiltSolution] = {}

    def get(self, eta: float) -> TiltSolution:
        eta = float(eta)
        for key, sol in self._solutions.items():
            if abs(key - eta) <= self.key_tol:
                return sol
        sol = solve_psi_B(self.params, eta)
        self._solutions[eta] = sol
        return sol


def complexity_term(params: ModelParams, i: int, eta_i: float, sol: TiltSolution | None = None) -> float:
    """Expected draws spent on direction ``i``: clusters proposed times (1 + mean cluster size)."""
    if eta_i <= 0:
        raise ValueError("tilt must be positive")
    if sol is None:
        sol = solve_psi_B(params, eta_i)
    sol.require_feasible()
    mean_clusters = params.lambda0[i] * np.exp(sol.psi_B[i]) / eta_i
    return float(mean_clusters * (1.0 + sol.s_tilde_rowsums[i]))


def complexity_X(params: ModelParams, eta) -> float:
    """Expected number of random variables generated when sampling the pre-zero clusters."""
    eta = np.broadcast_to(np.asarray(eta, dtype=float), (params.d,))
    cache = TiltCache(params)
    return sum(complexity_term(params, i, e, cache.get(e)) for i, e in enumerate(eta.tolist()))


def theta0_upper(params: ModelParams, tol: float = 1e-6) -> np.ndarray:
    """Per-direction lower bound, within ``tol``, on the largest feasible tilt.

    The fixed-point system couples all directions, so for the irreducible
    models here the bound is the same in every coordinate.
    """
    hi = params.kernel.max_tilt()
    lo = 0.0
    if is_feasible(params, hi * (1 - 1e-12)):
        lo = hi * (1 - 1e-12)
    else:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if is_feasible(params, mid):
                lo = mid
            else:
                hi = mid
    log.debug("feasibility boundary in [%g, %g]", lo, hi)
    return np.full(params.d, lo)
