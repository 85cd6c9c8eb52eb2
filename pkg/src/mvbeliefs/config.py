"""JSON experiment and campaign configuration: parsing and serialization.

Parsing is strict (unknown fields are rejected with the offending path),
and every module-level validation (network assumption A1, positive masses,
dimension checks) runs during deserialization, so a config that parses is a
config that runs. ``parse`` followed by ``to_dict`` round-trips every field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .learning import ConvergenceSpec, LearningProblem
from .network import validate_network
from .scenarios import LocalizationCampaign
from .signals import (
    Categorical,
    Gaussian,
    HypothesisSpace,
    LikelihoodFamily,
    SignalModel,
)

__all__ = [
    "ExperimentConfig",
    "parse_experiment_config",
    "experiment_config_to_dict",
    "parse_campaign_config",
    "campaign_config_to_dict",
    "load_json",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully specified single-run experiment."""

    problem: LearningProblem
    horizon: int
    seed: int
    record_stride: int
    convergence: ConvergenceSpec


def load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None


def _check_keys(data: Mapping, required: set[str], optional: set[str], where: str):
    if not isinstance(data, Mapping):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = sorted(set(data) - required - optional)
    if unknown:
        raise ConfigError(f"unknown field(s) in {where}: {', '.join(unknown)}")
    missing = sorted(required - set(data))
    if missing:
        raise ConfigError(f"missing field(s) in {where}: {', '.join(missing)}")


def _int_field(data: Mapping, key: str, where: str, minimum: int) -> int:
    value = data[key]
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{where}.{key} must be an integer >= {minimum}")
    return value


def family_from_dict(data: Mapping, where: str) -> LikelihoodFamily:
    if not isinstance(data, Mapping) or "kind" not in data:
        raise ConfigError(f"{where} must be an object with a 'kind' field")
    kind = data["kind"]
    if kind == "gaussian":
        _check_keys(data, {"kind", "mean", "std"}, set(), where)
        return Gaussian(mean=float(data["mean"]), std=float(data["std"]))
    if kind == "categorical":
        _check_keys(data, {"kind", "probs"}, set(), where)
        probs = data["probs"]
        if not isinstance(probs, Mapping) or not probs:
            raise ConfigError(f"{where}.probs must be a non-empty object")
        return Categorical.from_mapping(
            {str(sym): float(mass) for sym, mass in probs.items()}
        )
    raise ConfigError(f"{where}.kind must be 'gaussian' or 'categorical', got {kind!r}")


def family_to_dict(family: LikelihoodFamily) -> dict:
    if isinstance(family, Gaussian):
        return {"kind": "gaussian", "mean": family.mean, "std": family.std}
    return {
        "kind": "categorical",
        "probs": {sym: mass for sym, mass in zip(family.symbols, family.probs)},
    }


def parse_experiment_config(data: Mapping) -> ExperimentConfig:
    """Build a validated :class:`ExperimentConfig` from plain JSON data."""
    _check_keys(
        data,
        required={"network", "gamma", "hypotheses", "signal_model", "horizon", "seed"},
        optional={"record_stride", "convergence"},
        where="config",
    )
    _check_keys(data["network"], {"weights"}, set(), "config.network")
    network = validate_network(data["network"]["weights"])

    hyp_data = data["hypotheses"]
    _check_keys(hyp_data, {"labels", "true_index"}, set(), "config.hypotheses")
    if not isinstance(hyp_data["labels"], list):
        raise ConfigError("config.hypotheses.labels must be a list")
    hypotheses = HypothesisSpace(
        labels=tuple(hyp_data["labels"]),
        true_index=_int_field(hyp_data, "true_index", "config.hypotheses", 0),
    )

    sm = data["signal_model"]
    _check_keys(sm, {"structures", "generators"}, set(), "config.signal_model")
    structures = tuple(
        tuple(
            tuple(
                family_from_dict(
                    fam, f"config.signal_model.structures[{i}][{l}][{j}]"
                )
                for j, fam in enumerate(per_type)
            )
            for l, per_type in enumerate(per_agent)
        )
        for i, per_agent in enumerate(sm["structures"])
    )
    generators = tuple(
        tuple(
            family_from_dict(fam, f"config.signal_model.generators[{i}][{l}]")
            for l, fam in enumerate(per_agent)
        )
        for i, per_agent in enumerate(sm["generators"])
    )
    model = SignalModel(structures=structures, generators=generators)

    problem = LearningProblem(
        network=network,
        gamma=np.array(data["gamma"], dtype=float),
        hypotheses=hypotheses,
        model=model,
    )

    convergence = ConvergenceSpec()
    if "convergence" in data:
        conv = data["convergence"]
        _check_keys(conv, set(), {"threshold", "window"}, "config.convergence")
        convergence = ConvergenceSpec(
            threshold=float(conv.get("threshold", 0.99)),
            window=conv.get("window", 50),
        )

    return ExperimentConfig(
        problem=problem,
        horizon=_int_field(data, "horizon", "config", 1),
        seed=_int_field(data, "seed", "config", 0),
        record_stride=(
            _int_field(data, "record_stride", "config", 1)
            if "record_stride" in data
            else 1
        ),
        convergence=convergence,
    )


def experiment_config_to_dict(cfg: ExperimentConfig) -> dict:
    problem = cfg.problem
    return {
        "network": {
            "weights": [[float(x) for x in row] for row in problem.network.weights]
        },
        "gamma": [float(x) for x in problem.gamma],
        "hypotheses": {
            "labels": list(problem.hypotheses.labels),
            "true_index": problem.hypotheses.true_index,
        },
        "signal_model": {
            "structures": [
                [[family_to_dict(fam) for fam in per_type] for per_type in per_agent]
                for per_agent in problem.model.structures
            ],
            "generators": [
                [family_to_dict(fam) for fam in per_agent]
                for per_agent in problem.model.generators
            ],
        },
        "horizon": cfg.horizon,
        "seed": cfg.seed,
        "record_stride": cfg.record_stride,
        "convergence": {
            "threshold": cfg.convergence.threshold,
            "window": cfg.convergence.window,
        },
    }


def parse_campaign_config(data: Mapping) -> LocalizationCampaign:
    """Build a validated Monte Carlo campaign from plain JSON data."""
    _check_keys(
        data,
        required={"trials", "horizon", "seed", "target"},
        optional={
            "agent_count",
            "grid_side",
            "sigma1",
            "sigma2",
            "azimuth_variance_factor",
            "gamma",
            "weights",
        },
        where="campaign",
    )
    target = data["target"]
    if not isinstance(target, list) or len(target) != 2:
        raise ConfigError("campaign.target must be a [x, y] pair")
    weights = data.get("weights")
    if weights is not None:
        weights = tuple(tuple(float(x) for x in row) for row in weights)
    return LocalizationCampaign(
        trials=_int_field(data, "trials", "campaign", 1),
        horizon=_int_field(data, "horizon", "campaign", 1),
        seed=_int_field(data, "seed", "campaign", 0),
        target=(float(target[0]), float(target[1])),
        agent_count=(
            _int_field(data, "agent_count", "campaign", 1)
            if "agent_count" in data
            else 2
        ),
        grid_side=(
            _int_field(data, "grid_side", "campaign", 2) if "grid_side" in data else 6
        ),
        sigma1=float(data.get("sigma1", 0.5)),
        sigma2=float(data.get("sigma2", 0.5)),
        azimuth_variance_factor=float(data.get("azimuth_variance_factor", 10.0)),
        gamma=tuple(float(x) for x in data.get("gamma", (0.5, 0.5))),
        weights=weights,
    )


def campaign_config_to_dict(campaign: LocalizationCampaign) -> dict:
    payload = {
        "trials": campaign.trials,
        "horizon": campaign.horizon,
        "seed": campaign.seed,
        "target": [campaign.target[0], campaign.target[1]],
        "agent_count": campaign.agent_count,
        "grid_side": campaign.grid_side,
        "sigma1": campaign.sigma1,
        "sigma2": campaign.sigma2,
        "azimuth_variance_factor": campaign.azimuth_variance_factor,
        "gamma": list(campaign.gamma),
    }
    if campaign.weights is not None:
        payload["weights"] = [list(row) for row in campaign.weights]
    return payload
