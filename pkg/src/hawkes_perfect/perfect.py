"""Exact stationary paths: tilted proposals for the clusters alive at time 0, plus forward clusters."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .branching import (
    DEFAULT_CLUSTER_CAP,
    EffectiveClusterParams,
    PathSample,
    generate_cluster,
    simulate_forward,
    untilted_cluster_params,
)
from .model import Cluster, ModelParams, validate_model
from .rng import RandomStream
from .tilt import TiltCache, TiltSolution, tilted_cluster_params


@dataclass
class AcceptanceRecord:
    proposed: np.ndarray
    accepted: np.ndarray
    rv_count_events: int = 0
    rv_count_uniforms: int = 0
    rv_count_primitive: int = 0

    @classmethod
    def empty(cls, d: int) -> "AcceptanceRecord":
        return cls(np.zeros(d, dtype=np.int64), np.zeros(d, dtype=np.int64))

    def merge(self, other: "AcceptanceRecord") -> "AcceptanceRecord":
        return AcceptanceRecord(
            self.proposed + other.proposed,
            self.accepted + other.accepted,
            self.rv_count_events + other.rv_count_events,
            self.rv_count_uniforms + other.rv_count_uniforms,
            self.rv_count_primitive + other.rv_count_primitive,
        )


def sample_cluster_arrivals(lambda0_i: float, psi_B_i: float, eta_i: float, rng: RandomStream) -> list[float]:
    """Arrivals on (-inf, 0] with rate ``lambda0_i * exp(psi_B_i + eta_i * t)``.

    The rate is a multiple of an exponential density, so the count is Poisson
    with the total mass and each arrival sits an Exp(eta_i) distance before 0.
    """
    if eta_i <= 0:
        raise ValueError("eta_i must be positive")
    k = rng.poisson(lambda0_i * math.exp(psi_B_i) / eta_i)
    return [-rng.exponential(eta_i) for _ in range(k)]


@dataclass
class PerfectSampler:
    """Precomputed tilt solutions and cluster laws for one model and tilt vector."""

    params: ModelParams
    eta: np.ndarray
    cap: int = DEFAULT_CLUSTER_CAP
    solutions: list[TiltSolution] = field(init=False)
    proposal_laws: list[EffectiveClusterParams] = field(init=False)
    forward_law: EffectiveClusterParams = field(init=False)

    def __post_init__(self):
        validate_model(self.params)
        self.eta = np.broadcast_to(np.asarray(self.eta, dtype=float), (self.params.d,)).copy()
        if np.any(self.eta <= 0):
            raise ValueError("every tilt coordinate must be positive")
        cache = TiltCache(self.params)
        laws: dict[float, EffectiveClusterParams] = {}
        self.solutions = []
        self.proposal_laws = []
        for e in self.eta.tolist():
            sol = cache.get(e)
            self.solutions.append(sol)
            if sol.eta not in laws:
                laws[sol.eta] = tilted_cluster_params(self.params, sol)
            self.proposal_laws.append(laws[sol.eta])
        self.forward_law = untilted_cluster_params(self.params)

    def propose(self, i: int, tau: float, rng: RandomStream) -> tuple[Cluster, bool]:
        """One full tilted cluster rooted at ``tau`` and its accept/reject decision."""
        cluster = generate_cluster(self.proposal_laws[i], i, tau, rng, cap=self.cap)
        u = rng.uniform()
        if cluster.length_L <= -tau:
            return cluster, False
        # B >= L > -tau makes the exponent negative, so this is a valid probability.
        assert cluster.total_birth_B >= cluster.length_L
        return cluster, u <= math.exp(-self.eta[i] * (cluster.total_birth_B + tau))

    def sample_N0(self, rng: RandomStream, record: AcceptanceRecord | None = None) -> list[Cluster]:
        """Clusters with immigrants before 0 that still have events after 0."""
        lam = self.params.lambda0.tolist()
        accepted = []
        start = rng.draws
        for i in range(self.params.d):
            eta_i = float(self.eta[i])
            for tau in sample_cluster_arrivals(lam[i], float(self.solutions[i].psi_B[i]), eta_i, rng):
                cluster, ok = self.propose(i, tau, rng)
                if record is not None:
                    record.proposed[i] += 1
                    record.rv_count_events += cluster.size
                    record.rv_count_uniforms += 1
                if ok:
                    accepted.append(cluster)
                    if record is not None:
                        record.accepted[i] += 1
        if record is not None:
            record.rv_count_primitive += rng.draws - start
        return accepted

    def sample_path(self, T: float, rng: RandomStream) -> PathSample:
        """Stationary path on [0, T]: surviving pre-zero clusters plus clusters born in [0, T]."""
        if T <= 0:
            raise ValueError("horizon T must be positive")
        record = AcceptanceRecord.empty(self.params.d)
        old = self.sample_N0(rng, record)
        fresh = simulate_forward(self.params, T, rng, eff=self.forward_law, cap=self.cap)
        times = [[] for _ in range(self.params.d)]
        for cluster in old:
            for ev in cluster.events:
                if 0.0 <= ev.time <= T:
                    times[ev.direction].append(ev.time)
        merged = [np.sort(np.concatenate([np.asarray(a, dtype=float), b])) for a, b in zip(times, fresh.times)]
        return PathSample(
            horizon=T,
            times=merged,
            rv_count_events=record.rv_count_events,
            rv_count_uniforms=record.rv_count_uniforms,
            rv_count_primitive=record.rv_count_primitive + fresh.rv_count_primitive,
            immigrant_clusters=fresh.immigrant_clusters,
            forward_events=fresh.rv_count_events,
            proposed=record.proposed,
            accepted=record.accepted,
        )


def sample_N0(params: ModelParams, eta, rng: RandomStream, record: AcceptanceRecord | None = None) -> list[Cluster]:
    return PerfectSampler(params, eta).sample_N0(rng, record)


def sample_stationary_path(params: ModelParams, eta, T: float, rng: RandomStream) -> PathSample:
    return PerfectSampler(params, eta).sample_path(T, rng)
