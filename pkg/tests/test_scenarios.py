import math

import numpy as np
import pytest

from mvbeliefs.analysis import build_report
from mvbeliefs.errors import (
    DimensionMismatch,
    InvalidParameter,
    OutOfBounds,
    TargetOffGrid,
)
from mvbeliefs.learning import run
from mvbeliefs.scenarios import (
    GridScenario,
    LocalizationCampaign,
    LocalizationScenario,
    monte_carlo,
    run_trial,
)
from mvbeliefs.signals import (
    Categorical,
    SignalModel,
    check_identifiability,
    well_specified,
)


def restrict_to_type(model: SignalModel, l: int) -> SignalModel:
    return SignalModel(
        structures=tuple((per_agent[l],) for per_agent in model.structures),
        generators=tuple((per_agent[l],) for per_agent in model.generators),
    )


class TestGridScenario:
    def test_default_geometry_identifiability(self):
        prob = GridScenario().build()
        true = prob.hypotheses.true_index
        assert check_identifiability(prob.model, prob.hypotheses) == {true}
        distance_only = restrict_to_type(prob.model, 0)
        pair = check_identifiability(distance_only, prob.hypotheses)
        assert len(pair) >= 2
        # the distance circles around (1,2) also meet at (1,0)
        assert pair == {prob.hypotheses.labels.index("(1,0)"), true}
        side_only = restrict_to_type(prob.model, 1)
        assert len(check_identifiability(side_only, prob.hypotheses)) > 2

    def test_well_specified_by_construction(self):
        prob = GridScenario().build()
        assert well_specified(prob.model, prob.hypotheses)

    def test_off_grid_target_rejected(self):
        with pytest.raises(TargetOffGrid):
            GridScenario(target=(1.5, 2)).build()
        with pytest.raises(TargetOffGrid):
            GridScenario(target=(4, 0)).build()

    def test_agent_level_with_state_counts_as_above(self):
        # both default agents sit at y=1, so states with y=1 must get the
        # "above" masses (0.8 on U)
        scen = GridScenario()
        prob = scen.build()
        j = prob.hypotheses.labels.index("(2,1)")
        for i in range(2):
            fam = prob.model.structures[i][1][j]
            assert isinstance(fam, Categorical)
            assert fam.probs[fam.symbols.index("U")] == scen.up_prob

    def test_two_agents_required(self):
        with pytest.raises(DimensionMismatch):
            GridScenario(agent_positions=((0.0, 1.0),)).build()


class TestLocalizationScenario:
    def test_candidate_lattice(self):
        scen = LocalizationScenario(
            agent_positions=((0.2, 0.2), (0.8, 0.8)), target=(0.5, 0.5)
        )
        points = scen.candidate_points()
        assert len(points) == 36
        assert points[0] == (0.0, 0.0)
        assert points[-1] == (1.0, 1.0)
        assert points[1] == (0.0, 0.2)  # x-major ordering
        prob = scen.build()
        assert prob.m == 36

    def test_true_state_is_nearest_candidate(self):
        scen = LocalizationScenario(
            agent_positions=((0.2, 0.2), (0.8, 0.8)), target=(0.78, 0.42)
        )
        prob = scen.build()
        assert prob.hypotheses.labels[prob.hypotheses.true_index] == "(0.8,0.4)"

    def test_on_candidate_target_predicts_that_candidate(self):
        scen = LocalizationScenario(
            agent_positions=((0.2, 0.2), (0.8, 0.8)), target=(0.6, 0.4)
        )
        prob = scen.build()
        true = prob.hypotheses.true_index
        # the distance view is exactly specified on a candidate; the azimuth
        # view keeps its deliberate variance widening, which is
        # state-independent and cannot move the optimum
        for i in range(prob.n):
            assert prob.model.generators[i][0] == prob.model.structures[i][0][true]
        report = build_report(prob.network, prob.gamma, prob.model, prob.hypotheses)
        assert report.predicted_limit == true
        assert report.learns_true_state

    def test_off_candidate_target_is_mis_specified(self):
        scen = LocalizationScenario(
            agent_positions=((0.2, 0.2), (0.8, 0.8)), target=(0.78, 0.42)
        )
        prob = scen.build()
        assert not well_specified(prob.model, prob.hypotheses)

    def test_positions_outside_square_rejected(self):
        with pytest.raises(OutOfBounds):
            LocalizationScenario(
                agent_positions=((1.2, 0.2), (0.8, 0.8)), target=(0.5, 0.5)
            ).build()
        with pytest.raises(OutOfBounds):
            LocalizationScenario(
                agent_positions=((0.2, 0.2), (0.8, 0.8)), target=(0.5, -0.1)
            ).build()

    def test_azimuth_structures_are_widened(self):
        scen = LocalizationScenario(
            agent_positions=((0.2, 0.2), (0.8, 0.8)), target=(0.5, 0.5)
        )
        prob = scen.build()
        azimuth_struct = prob.model.structures[0][1][0]
        assert azimuth_struct.std == pytest.approx(math.sqrt(10) * 0.5)
        azimuth_gen = prob.model.generators[0][1]
        assert azimuth_gen.std == 0.5

    def test_more_than_two_sensors_needs_weights(self):
        positions = ((0.1, 0.1), (0.5, 0.5), (0.9, 0.9))
        with pytest.raises(DimensionMismatch):
            LocalizationScenario(agent_positions=positions, target=(0.5, 0.5)).build()
        weights = (
            (0.4, 0.3, 0.3),
            (0.2, 0.5, 0.3),
            (0.3, 0.3, 0.4),
        )
        prob = LocalizationScenario(
            agent_positions=positions, target=(0.5, 0.5), weights=weights
        ).build()
        assert prob.n == 3


class TestMonteCarlo:
    CAMPAIGN = LocalizationCampaign(
        trials=4, horizon=250, seed=2024, target=(0.72, 0.35)
    )

    def test_single_trial_counts_are_binary(self):
        campaign = LocalizationCampaign(
            trials=1, horizon=250, seed=5, target=(0.72, 0.35)
        )
        summary = monte_carlo(campaign)
        for count in (
            summary.successes_combined,
            summary.successes_type1_only,
            summary.successes_type2_only,
        ):
            assert count in (0, 1)

    def test_deterministic_given_seed(self):
        one = monte_carlo(self.CAMPAIGN)
        two = monte_carlo(self.CAMPAIGN)
        assert one.to_dict() == two.to_dict()

    def test_parallel_execution_matches_serial(self):
        serial = monte_carlo(self.CAMPAIGN, jobs=1)
        parallel = monte_carlo(self.CAMPAIGN, jobs=2)
        assert serial.to_dict() == parallel.to_dict()

    def test_trial_records_are_self_consistent(self):
        summary = monte_carlo(self.CAMPAIGN)
        assert summary.trials == 4
        assert len(summary.records) == 4
        for record in summary.records:
            assert record.nearest_index == 26  # candidate (0.8, 0.4)
            assert record.success_combined == (
                record.sim_combined == record.nearest_index
            )
            assert record.prediction_agrees == (
                record.sim_combined == record.predicted_index
            )
            for x, y in record.agent_positions:
                assert 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0

    def test_placements_differ_across_trials(self):
        summary = monte_carlo(self.CAMPAIGN)
        positions = {record.agent_positions for record in summary.records}
        assert len(positions) == 4

    def test_on_candidate_target_all_learners_succeed(self):
        campaign = LocalizationCampaign(
            trials=1, horizon=800, seed=7, target=(0.6, 0.4)
        )
        record = run_trial(campaign, 0)
        assert record.success_combined
        assert record.success_type1
        assert record.success_type2
        assert not record.ambiguous

    def test_invalid_campaign_rejected(self):
        with pytest.raises(InvalidParameter):
            LocalizationCampaign(trials=0, horizon=10, seed=1, target=(0.5, 0.5))
        with pytest.raises(InvalidParameter):
            monte_carlo(self.CAMPAIGN, jobs=0)


class TestMisleadingGeometry:
    """A fixed placement where distance information alone mislearns."""

    POSITIONS = ((0.56, 0.43), (0.86, 0.16))
    TARGET = (0.78, 0.42)

    def test_single_type_verdicts(self):
        prob = LocalizationScenario(
            agent_positions=self.POSITIONS, target=self.TARGET
        ).build()
        true = prob.hypotheses.true_index
        combined = build_report(prob.network, prob.gamma, prob.model, prob.hypotheses)
        distance = build_report(
            prob.network, np.array([1.0, 0.0]), prob.model, prob.hypotheses
        )
        azimuth = build_report(
            prob.network, np.array([0.0, 1.0]), prob.model, prob.hypotheses
        )
        assert combined.learns_true_state and combined.predicted_limit == true
        assert azimuth.learns_true_state and azimuth.predicted_limit == true
        assert not distance.learns_true_state
        assert distance.predicted_limit != true

    def test_simulation_reproduces_the_verdicts(self):
        from mvbeliefs.learning import LearningProblem, presample_observations

        prob = LocalizationScenario(
            agent_positions=self.POSITIONS, target=self.TARGET
        ).build()
        true = prob.hypotheses.true_index
        series = presample_observations(prob.model, 314, 2500)
        outcomes = {}
        for name, gamma in (
            ("combined", (0.5, 0.5)),
            ("distance", (1.0, 0.0)),
            ("azimuth", (0.0, 1.0)),
        ):
            variant = LearningProblem(
                network=prob.network,
                gamma=np.array(gamma),
                hypotheses=prob.hypotheses,
                model=prob.model,
            )
            traj = run(variant, 2500, observation_series=series, record_stride=2500)
            outcomes[name] = set(traj.final.argmax().flatten().tolist())
        assert outcomes["combined"] == {true}
        assert outcomes["azimuth"] == {true}
        assert true not in outcomes["distance"]
