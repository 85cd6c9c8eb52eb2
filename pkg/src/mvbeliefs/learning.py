"""Core belief dynamics: log-linear aggregation followed by Bayesian update.

Each agent keeps one belief vector per signal type. A time step has two
stages, both executed in the log domain so that thousands of likelihood
products never underflow:

1. aggregation: for agent ``i`` and type ``l``, the new intermediate
   log-belief in state ``theta`` is
   ``gamma[l] * sum_j w[i, j] * log mu[j, l, theta]
   + sum_{k != l} gamma[k] * log mu[i, k, theta]``,
   renormalized over states: a geometric mean of the neighbours' same-type
   beliefs and the agent's own other-type beliefs;
2. Bayesian update: the intermediate belief is multiplied by the
   likelihood of the fresh type-``l`` observation and renormalized.

Normalization is applied after both stages, pinning the belief invariant
(log-sum-exp zero per agent and type) at every point of the pipeline.

Randomness contract: one master seed; the observation stream of each
(trial, agent, type) triple is an independent substream derived from a
fixed-length key, so results are reproducible and independent of execution
order. Observation sequences can also be injected, which is how oracle
tests and paired Monte Carlo comparisons drive the dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParameter,
    InvalidPrior,
    ModelError,
)
from .network import Network, validate_gamma
from .signals import (
    Gaussian,
    HypothesisSpace,
    SignalModel,
    _gaussian_logpdf,
    sample,
    sample_series,
)

__all__ = [
    "BeliefState",
    "ObservationBatch",
    "LearningProblem",
    "ConvergenceSpec",
    "ConvergenceStats",
    "Trajectory",
    "init_beliefs",
    "aggregate",
    "bayes_update",
    "apply_step",
    "step",
    "run",
    "observation_streams",
    "draw_batch",
    "presample_observations",
    "batch_from_series",
]

_NORMALIZATION_TOL = 1e-10

# Realm tags keep every seed key the same length so distinct purposes can
# never alias (trailing zeros in shorter keys would).
_OBS_REALM = 0


def _logsumexp(a: np.ndarray, axis: int = -1, keepdims: bool = False) -> np.ndarray:
    peak = np.max(a, axis=axis, keepdims=True)
    out = peak + np.log(np.sum(np.exp(a - peak), axis=axis, keepdims=True))
    return out if keepdims else np.squeeze(out, axis=axis)


def _normalize(log_beliefs: np.ndarray) -> np.ndarray:
    return log_beliefs - _logsumexp(log_beliefs, axis=-1, keepdims=True)


@dataclass(frozen=True)
class BeliefState:
    """Log-beliefs ``log_beliefs[i, l, j]`` of agent i, type l, state j at time t."""

    log_beliefs: np.ndarray
    t: int

    def __post_init__(self):
        lb = self.log_beliefs
        if lb.ndim != 3:
            raise DimensionMismatch("log_beliefs must have shape (n, p, m)")
        if not np.all(np.isfinite(lb)):
            raise ModelError("log-beliefs must be finite (positive beliefs everywhere)")
        residual = float(np.max(np.abs(_logsumexp(lb, axis=-1))))
        if residual > _NORMALIZATION_TOL:
            raise ModelError(
                f"beliefs are not normalized: log-sum-exp residual {residual:.3e}"
            )
        lb.setflags(write=False)

    @property
    def n(self) -> int:
        return self.log_beliefs.shape[0]

    @property
    def p(self) -> int:
        return self.log_beliefs.shape[1]

    @property
    def m(self) -> int:
        return self.log_beliefs.shape[2]

    def beliefs(self) -> np.ndarray:
        return np.exp(self.log_beliefs)

    def argmax(self) -> np.ndarray:
        """Most-believed state index per (agent, type)."""
        return np.argmax(self.log_beliefs, axis=-1)


@dataclass(frozen=True)
class ObservationBatch:
    """One time step of observations, ``values[i][l]``."""

    values: tuple[tuple[Any, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "values", tuple(tuple(row) for row in self.values)
        )


@dataclass(frozen=True)
class LearningProblem:
    """A validated bundle: network, signal-type weights, hypotheses, model."""

    network: Network
    gamma: np.ndarray
    hypotheses: HypothesisSpace
    model: SignalModel

    def __post_init__(self):
        object.__setattr__(self, "gamma", validate_gamma(self.gamma))
        if self.model.n != self.network.n:
            raise DimensionMismatch(
                f"model has {self.model.n} agents, network has {self.network.n}"
            )
        if self.model.p != self.gamma.shape[0]:
            raise DimensionMismatch(
                f"model has {self.model.p} signal types, gamma has {self.gamma.shape[0]}"
            )
        if self.model.m != self.hypotheses.m:
            raise DimensionMismatch(
                f"model has {self.model.m} states, hypothesis space has {self.hypotheses.m}"
            )

    @property
    def n(self) -> int:
        return self.network.n

    @property
    def p(self) -> int:
        return self.model.p

    @property
    def m(self) -> int:
        return self.model.m


@dataclass(frozen=True)
class ConvergenceSpec:
    """Threshold/window used to report sustained high belief."""

    threshold: float = 0.99
    window: int = 50

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise InvalidParameter("convergence threshold must be in (0,1)")
        if self.window < 1:
            raise InvalidParameter("convergence window must be >= 1")


@dataclass
class ConvergenceStats:
    """Per-(agent, type, state) threshold-crossing bookkeeping.

    ``first_crossed[i, l, j]`` is the earliest step at which the belief in
    state j reached the threshold (-1 if never); ``trailing_streak`` counts
    the consecutive final steps it stayed there.
    """

    threshold: float
    window: int
    first_crossed: np.ndarray
    trailing_streak: np.ndarray

    def sustained(self) -> np.ndarray:
        return self.trailing_streak >= self.window


@dataclass
class Trajectory:
    """Recorded belief states of one simulation run."""

    times: np.ndarray
    log_beliefs: np.ndarray
    true_index: int
    final: BeliefState
    observations: list[ObservationBatch] | None = None
    convergence: ConvergenceStats | None = None

    def beliefs(self) -> np.ndarray:
        return np.exp(self.log_beliefs)

    def log_ratios(self) -> np.ndarray:
        """log mu(state) - log mu(true state) at every recorded time."""
        ref = self.log_beliefs[..., self.true_index][..., None]
        return self.log_beliefs - ref

    def rate_series(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-step average log-ratios ``log_ratios / t`` for recorded t > 0."""
        mask = self.times > 0
        ratios = self.log_ratios()[mask]
        times = self.times[mask]
        return times, ratios / times[:, None, None, None]


def init_beliefs(
    hyp: HypothesisSpace, n: int, p: int, priors=None
) -> BeliefState:
    """Initial belief state at t=0; uniform over states unless priors given.

    Priors, if given, must be an (n, p, m) grid of strictly positive masses
    with each (agent, type) row summing to one within 1e-9.
    """
    if n < 1 or p < 1:
        raise DimensionMismatch("need at least one agent and one signal type")
    m = hyp.m
    if priors is None:
        log_beliefs = np.full((n, p, m), -np.log(m))
    else:
        pri = np.array(priors, dtype=float)
        if pri.shape != (n, p, m):
            raise InvalidPrior(
                f"priors must have shape {(n, p, m)}, got {pri.shape}"
            )
        if np.any(~np.isfinite(pri)) or np.any(pri <= 0.0):
            raise InvalidPrior("priors must be strictly positive on every state")
        sums = pri.sum(axis=-1)
        if float(np.max(np.abs(sums - 1.0))) > 1e-9:
            raise InvalidPrior("each (agent, type) prior must sum to 1")
        log_beliefs = np.log(pri)
    return BeliefState(log_beliefs=log_beliefs, t=0)


def _aggregate_arrays(log_beliefs: np.ndarray, weights: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """Log-linear aggregation over neighbours and other types, normalized."""
    p = gamma.shape[0]
    mixed = np.tensordot(gamma, log_beliefs, axes=([0], [1]))  # (n, m)
    out = np.empty_like(log_beliefs)
    for l in range(p):
        own = log_beliefs[:, l, :]
        out[:, l, :] = gamma[l] * (weights @ own) + (mixed - gamma[l] * own)
    return _normalize(out)


def aggregate(state: BeliefState, net: Network, gamma) -> np.ndarray:
    """Aggregation stage; returns the normalized intermediate log-belief grid."""
    g = validate_gamma(gamma)
    if state.n != net.n or state.p != g.shape[0]:
        raise DimensionMismatch("state, network, and gamma dimensions disagree")
    return _aggregate_arrays(state.log_beliefs, net.weights, g)


def _cell_params(cell: Sequence) -> tuple:
    """Pack one (agent, type) structure cell into arrays for fast evaluation."""
    first = cell[0]
    if isinstance(first, Gaussian):
        means = np.array([fam.mean for fam in cell])
        stds = np.array([fam.std for fam in cell])
        return ("gaussian", means, stds)
    log_masses = np.log(np.array([fam.probs for fam in cell]))  # (m, |S|)
    return ("categorical", first.symbols, log_masses)


def _cell_loglik(params: tuple, obs) -> np.ndarray:
    """Log-likelihood of one observation under all m structures of a cell."""
    if params[0] == "gaussian":
        _, means, stds = params
        return _gaussian_logpdf(obs, means, stds)
    _, symbols, log_masses = params
    try:
        idx = symbols.index(obs)
    except ValueError:
        from .errors import UnsupportedObservation

        raise UnsupportedObservation(
            f"symbol {obs!r} not in alphabet {symbols}"
        ) from None
    return log_masses[:, idx]


def _batch_loglik(model: SignalModel, batch: ObservationBatch) -> np.ndarray:
    out = np.empty((model.n, model.p, model.m))
    for i in range(model.n):
        for l in range(model.p):
            params = _cell_params(model.structures[i][l])
            out[i, l, :] = _cell_loglik(params, batch.values[i][l])
    return out


def bayes_update(
    aggregated: np.ndarray, model: SignalModel, batch: ObservationBatch, t: int
) -> BeliefState:
    """Bayesian update of an aggregated grid with one observation batch.

    Returns the belief state at time ``t + 1``.
    """
    posterior = _normalize(aggregated + _batch_loglik(model, batch))
    return BeliefState(log_beliefs=posterior, t=t + 1)


def apply_step(
    state: BeliefState, net: Network, gamma, model: SignalModel, batch: ObservationBatch
) -> BeliefState:
    """One full step driven by an injected observation batch."""
    return bayes_update(aggregate(state, net, gamma), model, batch, state.t)


def observation_streams(
    seed: int, n: int, p: int, trial: int = 0
) -> list[list[np.random.Generator]]:
    """Independent observation substream per (agent, type) for one trial."""
    if seed < 0 or trial < 0:
        raise InvalidParameter("seed and trial index must be non-negative")
    return [
        [
            np.random.default_rng(
                np.random.SeedSequence([seed, _OBS_REALM, trial, i, l])
            )
            for l in range(p)
        ]
        for i in range(n)
    ]


def draw_batch(
    model: SignalModel, streams: list[list[np.random.Generator]]
) -> ObservationBatch:
    """Sample one observation per (agent, type) from the generators."""
    values = tuple(
        tuple(sample(model.generators[i][l], streams[i][l]) for l in range(model.p))
        for i in range(model.n)
    )
    return ObservationBatch(values=values)


def step(
    state: BeliefState,
    net: Network,
    gamma,
    model: SignalModel,
    streams: list[list[np.random.Generator]],
) -> BeliefState:
    """Sample a batch from the generators, aggregate, and update."""
    return apply_step(state, net, gamma, model, draw_batch(model, streams))


ObservationSeries = list  # list[list[np.ndarray]], indexed [agent][type][t]


def presample_observations(
    model: SignalModel, seed: int, horizon: int, trial: int = 0
) -> ObservationSeries:
    """Draw all observations for a run up front, one array per (agent, type).

    Stream-for-stream identical to drawing one batch per step.
    """
    streams = observation_streams(seed, model.n, model.p, trial=trial)
    return [
        [
            sample_series(model.generators[i][l], streams[i][l], horizon)
            for l in range(model.p)
        ]
        for i in range(model.n)
    ]


def batch_from_series(series: ObservationSeries, t: int) -> ObservationBatch:
    """Observation batch for step ``t + 1`` (0-based series index ``t``)."""
    return ObservationBatch(
        values=tuple(tuple(per_type[t] for per_type in row) for row in series)
    )


def _series_tables(model: SignalModel, series: ObservationSeries, horizon: int) -> np.ndarray:
    """Log-likelihood table ``table[t, i, l, j]`` for a whole run."""
    n, p, m = model.n, model.p, model.m
    table = np.empty((horizon, n, p, m))
    for i in range(n):
        for l in range(p):
            params = _cell_params(model.structures[i][l])
            obs = series[i][l]
            if len(obs) < horizon:
                raise DimensionMismatch(
                    f"observation series for agent {i}, type {l} has "
                    f"{len(obs)} entries, horizon is {horizon}"
                )
            if params[0] == "gaussian":
                _, means, stds = params
                table[:, i, l, :] = _gaussian_logpdf(
                    np.asarray(obs[:horizon], dtype=float)[:, None], means, stds
                )
            else:
                _, symbols, log_masses = params
                lookup = {s: k for k, s in enumerate(symbols)}
                try:
                    idx = np.array([lookup[s] for s in obs[:horizon]])
                except KeyError as exc:
                    from .errors import UnsupportedObservation

                    raise UnsupportedObservation(
                        f"symbol {exc.args[0]!r} not in alphabet {symbols}"
                    ) from None
                table[:, i, l, :] = log_masses[:, idx].T
    return table


def run(
    problem: LearningProblem,
    horizon: int,
    seed: int | None = None,
    *,
    trial: int = 0,
    record_stride: int = 1,
    priors=None,
    observation_series: ObservationSeries | None = None,
    convergence: ConvergenceSpec | None = None,
    record_observations: bool = False,
) -> Trajectory:
    """Run the two-stage dynamics for ``horizon`` steps and record beliefs.

    States are recorded at t = 0, stride, 2*stride, ... and always at the
    final step. Observations are sampled from the model's generators using
    the (seed, trial) substream contract unless ``observation_series`` is
    injected. With a ``convergence`` spec, threshold-crossing statistics are
    tracked at every step regardless of the recording stride.
    """
    if horizon < 1:
        raise InvalidParameter(f"horizon must be >= 1, got {horizon}")
    if record_stride < 1:
        raise InvalidParameter(f"record_stride must be >= 1, got {record_stride}")
    if observation_series is None:
        if seed is None:
            raise InvalidParameter("a seed is required when observations are sampled")
        observation_series = presample_observations(
            problem.model, seed, horizon, trial=trial
        )

    tables = _series_tables(problem.model, observation_series, horizon)
    weights, gamma = problem.network.weights, problem.gamma
    state0 = init_beliefs(problem.hypotheses, problem.n, problem.p, priors=priors)
    log_beliefs = np.array(state0.log_beliefs)

    tracking = convergence is not None
    if tracking:
        log_thr = np.log(convergence.threshold)
        above = log_beliefs >= log_thr
        streak = above.astype(np.int64)
        first_crossed = np.where(above, 0, -1)

    times = [0]
    records = [log_beliefs.copy()]
    for t in range(1, horizon + 1):
        aggregated = _aggregate_arrays(log_beliefs, weights, gamma)
        log_beliefs = _normalize(aggregated + tables[t - 1])
        if tracking:
            above = log_beliefs >= log_thr
            streak = np.where(above, streak + 1, 0)
            first_crossed = np.where(above & (first_crossed < 0), t, first_crossed)
        if t % record_stride == 0 or t == horizon:
            times.append(t)
            records.append(log_beliefs.copy())

    final = BeliefState(log_beliefs=log_beliefs.copy(), t=horizon)
    stats = None
    if tracking:
        stats = ConvergenceStats(
            threshold=convergence.threshold,
            window=convergence.window,
            first_crossed=first_crossed,
            trailing_streak=streak,
        )
    observations = None
    if record_observations:
        observations = [batch_from_series(observation_series, t) for t in range(horizon)]
    return Trajectory(
        times=np.array(times),
        log_beliefs=np.stack(records),
        true_index=problem.hypotheses.true_index,
        final=final,
        observations=observations,
        convergence=stats,
    )
