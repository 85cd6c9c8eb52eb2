"""Shipped experiment builders and the Monte Carlo harness.

Two scenario families are provided. The grid scenario places two agents
near a 4x4 lattice of candidate target positions; each agent receives a
distance reading (Gaussian, mean equal to its true distance to the target)
and an up/down cue (categorical over {U, D}, 0.8 mass on the correct side).
With the default geometry the two distance circles meet in two lattice
points, so neither signal type identifies the target alone but the pair
does: the canonical observational-equivalence setup.

The localization scenario scatters sensors in the unit square with a grid
of candidate positions; each sensor reads a noisy distance and a noisy
azimuth toward the target, with the azimuth structures deliberately wider
than the azimuth noise (auxiliary information). Whenever the target sits
off the candidate lattice the model is mis-specified and single-type
learning can converge to the wrong candidate.

The Monte Carlo harness redraws sensor placements around a fixed target
and compares three learners per trial: the combined two-type learner and
the two one-hot relaxations that put all weight on a single type. All
three consume the same observation draws, and every random quantity is a
deterministic substream of the campaign seed, so summaries are reproducible
trial-for-trial regardless of execution order or parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analysis import build_report
from .errors import DimensionMismatch, InvalidParameter, OutOfBounds, TargetOffGrid
from .learning import LearningProblem, presample_observations, run
from .network import validate_network
from .signals import Categorical, Gaussian, HypothesisSpace, SignalModel

__all__ = [
    "TWO_AGENT_WEIGHTS",
    "GridScenario",
    "LocalizationScenario",
    "LocalizationCampaign",
    "TrialRecord",
    "MonteCarloSummary",
    "monte_carlo",
    "run_trial",
]

# Fixed two-agent network used by both shipped scenarios: agent 0 listens
# only to agent 1; agent 1 mixes its own belief with agent 0's.
TWO_AGENT_WEIGHTS = ((0.0, 1.0), (0.7, 0.3))

_PLACEMENT_REALM = 1


def _distance(a, b) -> float:
    return math.hypot(b[0] - a[0], b[1] - a[1])


def _azimuth(a, b) -> float:
    """Bearing from point a to point b in (-pi, pi]."""
    return math.atan2(b[1] - a[1], b[0] - a[0])


@dataclass(frozen=True)
class GridScenario:
    """Two agents localizing a target on a small integer lattice."""

    agent_positions: tuple[tuple[float, float], ...] = ((0.0, 1.0), (3.0, 1.0))
    target: tuple[int, int] = (1, 2)
    grid_side: int = 4
    noise_std: float = 0.5
    up_prob: float = 0.8
    gamma: tuple[float, float] = (0.5, 0.5)

    def grid_points(self) -> list[tuple[int, int]]:
        side = self.grid_side
        return [(x, y) for x in range(side) for y in range(side)]

    def build(self) -> LearningProblem:
        """Assemble the full problem; well specified by construction."""
        if len(self.agent_positions) != 2:
            raise DimensionMismatch(
                "the grid scenario uses the fixed two-agent network"
            )
        points = self.grid_points()
        tx, ty = self.target
        if (
            tx != int(tx)
            or ty != int(ty)
            or not (0 <= int(tx) < self.grid_side)
            or not (0 <= int(ty) < self.grid_side)
        ):
            raise TargetOffGrid(
                f"target {self.target} is not one of the {len(points)} grid points"
            )
        true_index = points.index((int(tx), int(ty)))
        hyp = HypothesisSpace(
            labels=tuple(f"({x},{y})" for x, y in points), true_index=true_index
        )

        up, down = self.up_prob, 1.0 - self.up_prob
        structures = []
        for pos in self.agent_positions:
            distance_structs = tuple(
                Gaussian(mean=_distance(pos, pt), std=self.noise_std) for pt in points
            )
            # A state level with the agent counts as "above" (>=) so the cue
            # is always defined.
            side_structs = tuple(
                Categorical(symbols=("U", "D"), probs=(up, down))
                if pt[1] >= pos[1]
                else Categorical(symbols=("U", "D"), probs=(down, up))
                for pt in points
            )
            structures.append((distance_structs, side_structs))
        generators = tuple(
            (per_agent[0][true_index], per_agent[1][true_index])
            for per_agent in structures
        )
        model = SignalModel(structures=tuple(structures), generators=generators)
        return LearningProblem(
            network=validate_network(TWO_AGENT_WEIGHTS),
            gamma=np.array(self.gamma),
            hypotheses=hyp,
            model=model,
        )


@dataclass(frozen=True)
class LocalizationScenario:
    """Sensors in the unit square reading distance and azimuth to a target."""

    agent_positions: tuple[tuple[float, float], ...]
    target: tuple[float, float]
    grid_side: int = 6
    sigma1: float = 0.5
    sigma2: float = 0.5
    azimuth_variance_factor: float = 10.0
    gamma: tuple[float, float] = (0.5, 0.5)
    weights: tuple[tuple[float, ...], ...] | None = None

    def candidate_points(self) -> list[tuple[float, float]]:
        side = self.grid_side
        if side < 2:
            raise InvalidParameter("candidate grid needs at least 2 points per side")
        return [
            (x / (side - 1), y / (side - 1)) for x in range(side) for y in range(side)
        ]

    def nearest_candidate(self) -> int:
        points = self.candidate_points()
        dists = [_distance(pt, self.target) for pt in points]
        return int(np.argmin(dists))

    def build(self) -> LearningProblem:
        """Assemble the full problem; mis-specified whenever the target is
        off the candidate lattice."""
        for pos in self.agent_positions + (self.target,):
            if not (0.0 <= pos[0] <= 1.0 and 0.0 <= pos[1] <= 1.0):
                raise OutOfBounds(f"position {pos} outside the unit square")
        if self.azimuth_variance_factor <= 0.0:
            raise InvalidParameter("azimuth variance factor must be positive")
        points = self.candidate_points()
        true_index = self.nearest_candidate()
        hyp = HypothesisSpace(
            labels=tuple(f"({x:g},{y:g})" for x, y in points), true_index=true_index
        )
        azimuth_std = math.sqrt(self.azimuth_variance_factor) * self.sigma2

        structures = []
        generators = []
        for pos in self.agent_positions:
            distance_structs = tuple(
                Gaussian(mean=_distance(pos, pt), std=self.sigma1) for pt in points
            )
            azimuth_structs = tuple(
                Gaussian(mean=_azimuth(pos, pt), std=azimuth_std) for pt in points
            )
            structures.append((distance_structs, azimuth_structs))
            generators.append(
                (
                    Gaussian(mean=_distance(pos, self.target), std=self.sigma1),
                    Gaussian(mean=_azimuth(pos, self.target), std=self.sigma2),
                )
            )
        model = SignalModel(
            structures=tuple(structures), generators=tuple(generators)
        )
        if self.weights is not None:
            network = validate_network(self.weights)
        elif len(self.agent_positions) == 2:
            network = validate_network(TWO_AGENT_WEIGHTS)
        else:
            raise DimensionMismatch(
                "a weight matrix is required for other than two sensors"
            )
        return LearningProblem(
            network=network,
            gamma=np.array(self.gamma),
            hypotheses=hyp,
            model=model,
        )


@dataclass(frozen=True)
class LocalizationCampaign:
    """Monte Carlo campaign: random sensor placements around a fixed target."""

    trials: int
    horizon: int
    seed: int
    target: tuple[float, float]
    agent_count: int = 2
    grid_side: int = 6
    sigma1: float = 0.5
    sigma2: float = 0.5
    azimuth_variance_factor: float = 10.0
    gamma: tuple[float, float] = (0.5, 0.5)
    weights: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidParameter("trial count must be >= 1")
        if self.horizon < 1:
            raise InvalidParameter("horizon must be >= 1")
        if self.seed < 0:
            raise InvalidParameter("seed must be non-negative")


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one placement: three simulated learners plus the analysis."""

    trial: int
    agent_positions: tuple[tuple[float, float], ...]
    nearest_index: int
    predicted_index: int
    ambiguous: bool
    objective_gap: float
    sim_combined: int
    sim_type1: int
    sim_type2: int
    success_combined: bool
    success_type1: bool
    success_type2: bool
    prediction_agrees: bool

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "agent_positions": [list(pos) for pos in self.agent_positions],
            "nearest_index": self.nearest_index,
            "predicted_index": self.predicted_index,
            "ambiguous": self.ambiguous,
            "objective_gap": self.objective_gap,
            "sim_combined": self.sim_combined,
            "sim_type1": self.sim_type1,
            "sim_type2": self.sim_type2,
            "success_combined": self.success_combined,
            "success_type1": self.success_type1,
            "success_type2": self.success_type2,
            "prediction_agrees": self.prediction_agrees,
        }


@dataclass(frozen=True)
class MonteCarloSummary:
    trials: int
    horizon: int
    seed: int
    target: tuple[float, float]
    successes_combined: int
    successes_type1_only: int
    successes_type2_only: int
    prediction_agreements: int
    ambiguous_trials: int
    records: tuple[TrialRecord, ...]

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "horizon": self.horizon,
            "seed": self.seed,
            "target": list(self.target),
            "successes_combined": self.successes_combined,
            "successes_type1_only": self.successes_type1_only,
            "successes_type2_only": self.successes_type2_only,
            "prediction_agreements": self.prediction_agreements,
            "ambiguous_trials": self.ambiguous_trials,
            "records": [record.to_dict() for record in self.records],
        }


def _placement(campaign: LocalizationCampaign, trial: int) -> tuple[tuple[float, float], ...]:
    rng = np.random.default_rng(
        np.random.SeedSequence([campaign.seed, _PLACEMENT_REALM, trial, 0, 0])
    )
    coords = rng.random((campaign.agent_count, 2))
    return tuple((float(x), float(y)) for x, y in coords)


def _consensus_state(trajectory) -> int:
    """Common final argmax across every (agent, type), or -1 if split."""
    choices = trajectory.final.argmax()
    first = int(choices.flat[0])
    return first if np.all(choices == first) else -1


def _one_hot(p: int, hot: int) -> np.ndarray:
    g = np.zeros(p)
    g[hot] = 1.0
    return g


def run_trial(campaign: LocalizationCampaign, trial: int) -> TrialRecord:
    """Simulate one placement with shared observations across the learners."""
    positions = _placement(campaign, trial)
    scenario = LocalizationScenario(
        agent_positions=positions,
        target=campaign.target,
        grid_side=campaign.grid_side,
        sigma1=campaign.sigma1,
        sigma2=campaign.sigma2,
        azimuth_variance_factor=campaign.azimuth_variance_factor,
        gamma=campaign.gamma,
        weights=campaign.weights,
    )
    problem = scenario.build()
    series = presample_observations(
        problem.model, campaign.seed, campaign.horizon, trial=trial
    )

    limits = {}
    for name, gamma in (
        ("combined", problem.gamma),
        ("type1", _one_hot(problem.p, 0)),
        ("type2", _one_hot(problem.p, 1)),
    ):
        variant = LearningProblem(
            network=problem.network,
            gamma=gamma,
            hypotheses=problem.hypotheses,
            model=problem.model,
        )
        trajectory = run(
            variant,
            campaign.horizon,
            observation_series=series,
            record_stride=campaign.horizon,
        )
        limits[name] = _consensus_state(trajectory)

    report = build_report(
        problem.network, problem.gamma, problem.model, problem.hypotheses
    )
    ranked = np.sort(report.limit_objective)
    gap = float(ranked[1] - ranked[0]) if ranked.shape[0] > 1 else math.inf
    nearest = problem.hypotheses.true_index
    return TrialRecord(
        trial=trial,
        agent_positions=positions,
        nearest_index=nearest,
        predicted_index=report.predicted_limit,
        ambiguous=bool(report.tied_limits),
        objective_gap=gap,
        sim_combined=limits["combined"],
        sim_type1=limits["type1"],
        sim_type2=limits["type2"],
        success_combined=limits["combined"] == nearest,
        success_type1=limits["type1"] == nearest,
        success_type2=limits["type2"] == nearest,
        prediction_agrees=limits["combined"] == report.predicted_limit,
    )


def monte_carlo(campaign: LocalizationCampaign, jobs: int = 1) -> MonteCarloSummary:
    """Run the campaign; results are merged by trial index, so the summary is
    identical for any job count."""
    if jobs < 1:
        raise InvalidParameter("jobs must be >= 1")
    indices = range(campaign.trials)
    if jobs == 1:
        records = [run_trial(campaign, trial) for trial in indices]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(
                pool.map(run_trial, [campaign] * campaign.trials, indices, chunksize=8)
            )
    return MonteCarloSummary(
        trials=campaign.trials,
        horizon=campaign.horizon,
        seed=campaign.seed,
        target=campaign.target,
        successes_combined=sum(r.success_combined for r in records),
        successes_type1_only=sum(r.success_type1 for r in records),
        successes_type2_only=sum(r.success_type2 for r in records),
        prediction_agreements=sum(r.prediction_agrees for r in records),
        ambiguous_trials=sum(r.ambiguous for r in records),
        records=tuple(records),
    )
