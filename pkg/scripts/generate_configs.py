#!/usr/bin/env python3
"""Regenerate the JSON configs shipped under configs/.

The grid config uses the default two-agent geometry whose distance circles
meet in two lattice points; the localization config pins a placement where
the distance view alone mislearns while the azimuth view and the combined
learner find the candidate nearest the target; the campaign config fixes a
target calibrated so the combined learner clearly beats both single-type
relaxations.
"""

from pathlib import Path

from mvbeliefs.config import (
    ExperimentConfig,
    campaign_config_to_dict,
    experiment_config_to_dict,
)
from mvbeliefs.learning import ConvergenceSpec
from mvbeliefs.reporting import write_json
from mvbeliefs.scenarios import (
    GridScenario,
    LocalizationCampaign,
    LocalizationScenario,
)

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def main():
    CONFIG_DIR.mkdir(exist_ok=True)

    grid = ExperimentConfig(
        problem=GridScenario().build(),
        horizon=2000,
        seed=7,
        record_stride=1,
        convergence=ConvergenceSpec(),
    )
    write_json(experiment_config_to_dict(grid), CONFIG_DIR / "grid_two_signal.json")

    localization = ExperimentConfig(
        problem=LocalizationScenario(
            agent_positions=((0.56, 0.43), (0.86, 0.16)),
            target=(0.78, 0.42),
        ).build(),
        horizon=3000,
        seed=314,
        record_stride=5,
        convergence=ConvergenceSpec(),
    )
    write_json(
        experiment_config_to_dict(localization),
        CONFIG_DIR / "localization_two_sensor.json",
    )

    campaign = LocalizationCampaign(
        trials=1000,
        horizon=2000,
        seed=1000,
        target=(0.72, 0.35),
    )
    write_json(
        campaign_config_to_dict(campaign), CONFIG_DIR / "montecarlo_localization.json"
    )
    for name in (
        "grid_two_signal.json",
        "localization_two_sensor.json",
        "montecarlo_localization.json",
    ):
        print(f"wrote {CONFIG_DIR / name}")


if __name__ == "__main__":
    main()
