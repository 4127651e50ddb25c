"""Model parameters, the exponential excitation kernel and closed-form quantities.

Convention: ``h[i][j]`` is the effect of a direction-``i`` event on the
intensity of direction ``j``, so ``hbar[i][j]`` is the mean number of
direction-``j`` children of a direction-``i`` parent. Directions are 0-based
in Python and 1-based in every file written for humans.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple, Protocol

import numpy as np

from .errors import ConfigError, DimensionMismatch, TiltTooLarge, Unstable
from .rng import RandomStream

BirthSampler = Callable[[int, int, RandomStream], float]


class Kernel(Protocol):
    """What the samplers need from an excitation kernel family.

    ``hbar`` gives the integrals of ``h_ij``; ``psi_f`` is the cumulant
    generating function of the normalized birth density ``f_ij``; and
    ``birth_sampler(eta)`` draws from ``f_ij`` exponentially tilted by ``eta``.
    """

    d: int

    def hbar(self) -> np.ndarray: ...

    def max_tilt(self) -> float: ...

    def psi_f(self, i: int, j: int, theta: float) -> float: ...

    def psi_f_matrix(self, theta: float) -> np.ndarray: ...

    def birth_sampler(self, eta: float) -> BirthSampler: ...


@dataclass(frozen=True)
class ExponentialKernel:
    """``h_ij(t) = alpha_ij * exp(-beta_ij * t)``."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float, ndmin=2)
        beta = np.array(self.beta, dtype=float, ndmin=2)
        if alpha.shape != beta.shape or alpha.shape[0] != alpha.shape[1]:
            raise DimensionMismatch(
                f"alpha {alpha.shape} and beta {beta.shape} must be equal square matrices"
            )
        if not np.all(np.isfinite(alpha)) or np.any(alpha < 0):
            raise ConfigError("alpha entries must be finite and nonnegative")
        if not np.all(np.isfinite(beta)) or np.any(beta <= 0):
            raise ConfigError("beta entries must be finite and positive")
        alpha.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def d(self) -> int:
        return self.alpha.shape[0]

    def h(self, i: int, j: int, t):
        return self.alpha[i, j] * np.exp(-self.beta[i, j] * np.asarray(t))

    def hbar(self) -> np.ndarray:
        return self.alpha / self.beta

    def max_tilt(self) -> float:
        """Tilts strictly below this keep every ``psi_f`` finite."""
        return float(self.beta.min())

    def psi_f(self, i: int, j: int, theta: float) -> float:
        b = self.beta[i, j]
        if theta >= b:
            raise TiltTooLarge(f"theta={theta} >= beta[{i}][{j}]={b}")
        return math.log(b / (b - theta))

    def psi_f_matrix(self, theta: float) -> np.ndarray:
        if theta >= self.max_tilt():
            raise TiltTooLarge(f"theta={theta} >= min beta={self.max_tilt()}")
        return np.log(self.beta / (self.beta - theta))

    def birth_sampler(self, eta: float) -> BirthSampler:
        # Tilting Exp(beta) by eta gives Exp(beta - eta).
        if eta >= self.max_tilt():
            raise TiltTooLarge(f"eta={eta} >= min beta={self.max_tilt()}")
        rates = (self.beta - eta).tolist()

        def sample(i: int, j: int, rng: RandomStream) -> float:
            return rng.exponential(rates[i][j])

        return sample

    def to_dict(self) -> dict:
        return {"type": "exponential", "alpha": self.alpha.tolist(), "beta": self.beta.tolist()}


@dataclass(frozen=True)
class ModelParams:
    lambda0: np.ndarray
    kernel: ExponentialKernel

    def __post_init__(self):
        lam = np.array(self.lambda0, dtype=float, ndmin=1)
        if lam.ndim != 1 or lam.shape[0] != self.kernel.d:
            raise DimensionMismatch(
                f"lambda0 has {lam.shape[0]} entries but the kernel is {self.kernel.d}x{self.kernel.d}"
            )
        lam.setflags(write=False)
        object.__setattr__(self, "lambda0", lam)

    @property
    def d(self) -> int:
        return self.kernel.d

    @classmethod
    def exponential(cls, lambda0, alpha, beta) -> "ModelParams":
        return cls(lambda0, ExponentialKernel(alpha, beta))

    def to_dict(self) -> dict:
        return {"lambda0": self.lambda0.tolist(), "kernel": self.kernel.to_dict()}


class Event(NamedTuple):
    """One arrival inside a cluster. ``index`` is 1-based; ``parent == 0`` marks the immigrant."""

    index: int
    direction: int
    parent: int
    time: float
    birth: float


@dataclass
class Cluster:
    immigrant_direction: int
    tau: float
    events: list[Event] = field(default_factory=list)
    length_L: float = 0.0
    total_birth_B: float = 0.0
    pruned: int = 0

    @property
    def size(self) -> int:
        return len(self.events)


@dataclass
class ValidationReport:
    d: int
    spectral_radius: float
    positive_background: bool
    stable: bool
    max_tilt: float

    @property
    def ok(self) -> bool:
        return self.positive_background and self.stable

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "spectral_radius": self.spectral_radius,
            "positive_background": self.positive_background,
            "stable": self.stable,
            "feasible_eta_range": [0.0, self.max_tilt],
            "ok": self.ok,
        }


def spectral_radius(m: np.ndarray) -> float:
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def hbar(params: ModelParams) -> np.ndarray:
    return params.kernel.hbar()


def validate_model(params: ModelParams, raise_on_error: bool = True) -> ValidationReport:
    """Check positivity of the background rates and the stability condition.

    For the exponential family every tilt ``0 <= eta < min(beta)`` keeps the
    birth densities exponentially integrable; the report carries that bound.
    """
    rho = spectral_radius(hbar(params))
    report = ValidationReport(
        d=params.d,
        spectral_radius=rho,
        positive_background=bool(np.all(params.lambda0 > 0)),
        stable=rho < 1.0,
        max_tilt=params.kernel.max_tilt(),
    )
    if raise_on_error:
        if not report.positive_background:
            raise ConfigError("all background intensities lambda0 must be > 0")
        if not report.stable:
            raise Unstable(f"spectral radius of hbar is {rho:.6g} >= 1; no stationary process")
    return report


def stationary_intensity(params: ModelParams) -> np.ndarray:
    """Long-run event rate per direction, the solution of ``(I - hbar^T) x = lambda0``."""
    h = hbar(params)
    try:
        x = np.linalg.solve(np.eye(params.d) - h.T, params.lambda0)
    except np.linalg.LinAlgError as exc:
        raise Unstable("I - hbar^T is singular") from exc
    if not np.all(x > 0) or spectral_radius(h) >= 1.0:
        raise Unstable(f"no positive stationary intensity (got {x})")
    return x


def psi_f(params: ModelParams, i: int, j: int, theta: float) -> float:
    return params.kernel.psi_f(i, j, theta)


def sample_tilted_birth(params: ModelParams, i: int, j: int, eta: float, rng: RandomStream) -> float:
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    b = params.kernel.beta[i, j]
    if eta >= b:
        raise TiltTooLarge(f"eta={eta} >= beta[{i}][{j}]={b}")
    return rng.exponential(b - eta)


def model_from_dict(cfg: dict) -> ModelParams:
    try:
        kernel = cfg["kernel"]
        kind = kernel.get("type", "exponential")
        if kind != "exponential":
            raise ConfigError(f"unsupported kernel type {kind!r}; only 'exponential' is available")
        return ModelParams.exponential(cfg["lambda0"], kernel["alpha"], kernel["beta"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed model config: missing or invalid {exc}") from exc


def load_model(path: str | Path) -> ModelParams:
    path = Path(path)
    try:
        cfg = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read model config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return model_from_dict(cfg)
