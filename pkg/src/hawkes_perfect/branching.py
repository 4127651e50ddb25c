"""Cluster generation by branching and forward (transient) simulation on [0, T]."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ClusterSizeCap, Unstable
from .model import BirthSampler, Cluster, Event, ModelParams, hbar, spectral_radius, validate_model
from .rng import RandomStream
from .stats import ci95_columns

DEFAULT_CLUSTER_CAP = 10_000_000


@dataclass
class EffectiveClusterParams:
    """Offspring means and birth-time sampler driving :func:`generate_cluster`."""

    offspring_means: np.ndarray
    birth_sampler: BirthSampler
    spectral_radius: float = field(default=float("nan"))
    eta: float = 0.0

    def __post_init__(self):
        self.offspring_means = np.asarray(self.offspring_means, dtype=float)
        if np.isnan(self.spectral_radius):
            self.spectral_radius = spectral_radius(self.offspring_means)
        if self.spectral_radius >= 1.0:
            raise Unstable(f"offspring matrix is not subcritical (radius {self.spectral_radius:.6g})")
        self._rows = [
            [(j, m) for j, m in enumerate(row) if m > 0.0] for row in self.offspring_means.tolist()
        ]

    @property
    def d(self) -> int:
        return self.offspring_means.shape[0]

    def expected_sizes(self) -> np.ndarray:
        """Mean number of events in a cluster rooted in each direction."""
        d = self.d
        return np.linalg.solve(np.eye(d) - self.offspring_means, np.ones(d))


def untilted_cluster_params(params: ModelParams) -> EffectiveClusterParams:
    return EffectiveClusterParams(hbar(params), params.kernel.birth_sampler(0.0))


def generate_cluster(
    eff: EffectiveClusterParams,
    immigrant_direction: int,
    tau: float,
    rng: RandomStream,
    horizon: float | None = None,
    cap: int = DEFAULT_CLUSTER_CAP,
) -> Cluster:
    """Grow one cluster from an immigrant at ``tau``, processing events first-in first-out.

    Every processed event in direction ``l`` gets ``Poisson(offspring_means[l][j])``
    children in each direction ``j``, born after i.i.d. delays from the birth
    sampler. With ``horizon`` set, children landing after it are dropped with
    their whole subtree (all descendants would land later still); their draws
    are counted in ``cluster.pruned``. ``length_L`` and ``total_birth_B`` refer
    to the kept events.
    """
    rows = eff._rows
    sample = eff.birth_sampler
    poisson = rng.poisson
    events = [Event(1, immigrant_direction, 0, tau, 0.0)]
    # Offsets from tau summed along ancestor paths; with births added to the
    # total in the same index order this keeps B >= L exact in floating point.
    offsets = [0.0]
    append = events.append
    longest = 0.0
    total_birth = 0.0
    pruned = 0
    k = 0
    while k < len(events):
        parent = events[k]
        p_offset = offsets[k]
        k += 1
        p_dir = parent.direction
        p_time = parent.time
        p_index = parent.index
        for j, mean in rows[p_dir]:
            n = poisson(mean)
            for _ in range(n):
                b = sample(p_dir, j, rng)
                t = p_time + b
                if horizon is not None and t > horizon:
                    pruned += 1
                    continue
                append(Event(len(events) + 1, j, p_index, t, b))
                off = p_offset + b
                offsets.append(off)
                total_birth += b
                if off > longest:
                    longest = off
        if len(events) > cap:
            raise ClusterSizeCap(
                f"cluster exceeded {cap} events; the branching matrix is probably near-critical"
            )
    return Cluster(immigrant_direction, tau, events, longest, total_birth, pruned)


@dataclass
class PathSample:
    """Per-direction sorted event times on [0, horizon] plus draw counters."""

    horizon: float
    times: list[np.ndarray]
    rv_count_events: int = 0
    rv_count_uniforms: int = 0
    rv_count_primitive: int = 0
    immigrant_clusters: int = 0
    forward_events: int = 0
    proposed: np.ndarray | None = None
    accepted: np.ndarray | None = None

    @property
    def d(self) -> int:
        return len(self.times)

    @property
    def counts(self) -> np.ndarray:
        return np.array([len(t) for t in self.times], dtype=np.int64)

    @property
    def rvs(self) -> int:
        """Cost metric: generated cluster events plus one uniform per proposed cluster."""
        return self.rv_count_events + self.rv_count_uniforms

    def window_counts(self, edges) -> np.ndarray:
        """``(len(edges) - 1, d)`` event counts on the half-open windows ``(a, b]``."""
        edges = np.asarray(edges, dtype=float)
        out = np.empty((len(edges) - 1, self.d), dtype=np.int64)
        for j, t in enumerate(self.times):
            idx = np.searchsorted(t, edges, side="right")
            out[:, j] = np.diff(idx)
        return out


def poisson_arrivals(rate: float, T: float, rng: RandomStream) -> list[float]:
    """Homogeneous Poisson arrivals on [0, T]: a Poisson count, then sorted uniforms."""
    n = rng.poisson(rate * T)
    return sorted(T * rng.uniform() for _ in range(n))


def simulate_forward(
    params: ModelParams,
    T: float,
    rng: RandomStream,
    eff: EffectiveClusterParams | None = None,
    cap: int = DEFAULT_CLUSTER_CAP,
) -> PathSample:
    """Transient path on [0, T] started empty: immigrants on [0, T] and their clusters."""
    if T <= 0:
        raise ValueError("horizon T must be positive")
    if eff is None:
        validate_model(params)
        eff = untilted_cluster_params(params)
    d = params.d
    start = rng.draws
    buckets: list[list[float]] = [[] for _ in range(d)]
    n_events = pruned = n_clusters = 0
    for i, lam in enumerate(params.lambda0.tolist()):
        for tau in poisson_arrivals(lam, T, rng):
            cluster = generate_cluster(eff, i, tau, rng, horizon=T, cap=cap)
            n_clusters += 1
            n_events += cluster.size
            pruned += cluster.pruned
            for ev in cluster.events:
                buckets[ev.direction].append(ev.time)
    times = [np.sort(np.asarray(b, dtype=float)) for b in buckets]
    return PathSample(
        horizon=T,
        times=times,
        rv_count_events=n_events + pruned,
        rv_count_primitive=rng.draws - start,
        immigrant_clusters=n_clusters,
    )


@dataclass
class WindowTable:
    """Per-window, per-direction mean event rate and 95% halfwidth."""

    t_start: np.ndarray
    window: float
    mean: np.ndarray
    ci_halfwidth: np.ndarray
    reps: int

    def rows(self):
        for w, t in enumerate(self.t_start.tolist()):
            for j in range(self.mean.shape[1]):
                yield t, j + 1, float(self.mean[w, j]), float(self.ci_halfwidth[w, j])

    def at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        w = int(np.argmin(np.abs(self.t_start - t)))
        return self.mean[w], self.ci_halfwidth[w]


def naive_transient_estimate(
    params: ModelParams, T: float, window: float, reps: int, seed: int
) -> WindowTable:
    """Mean counts per window ``(t, t + window]`` over ``reps`` forward runs from an empty start."""
    n_windows = round(T / window)
    if n_windows < 1 or abs(n_windows * window - T) > 1e-9 * max(1.0, T):
        raise ValueError(f"window {window} does not divide T={T}")
    validate_model(params)
    eff = untilted_cluster_params(params)
    edges = np.linspace(0.0, T, n_windows + 1)
    counts = np.empty((reps, n_windows, params.d))
    for r in range(reps):
        path = simulate_forward(params, T, RandomStream(seed, r), eff=eff)
        counts[r] = path.window_counts(edges)
    rates = counts.reshape(reps, -1) / window
    mean, hw, _ = ci95_columns(rates)
    return WindowTable(
        t_start=edges[:-1],
        window=window,
        mean=mean.reshape(n_windows, params.d),
        ci_halfwidth=hw.reshape(n_windows, params.d),
        reps=reps,
    )
