"""Model-level convergence predictions, computed without simulation.

For each alternative state the condition value
``c(state) = sum_l gamma[l] * sum_i pi[i] * ledger[i, l, state]``
is the almost-sure limit of the per-step average log-ratio between that
state's belief and the true state's belief: one shared rate for every
agent and every signal type. Collective learning of the designated true
state is guaranteed exactly when all alternatives have negative condition
values; a positive value means the group mislearns toward a better-scoring
state.

The predicted limit uses the reference-independent form: the state
minimizing ``sum_l gamma[l] * sum_i pi[i] * KL(generator_il || structure_il(state))``.
It depends only on generators and structures, never on which state is
designated true, and reduces to the familiar weighted squared-error rule
for Gaussian structures with common scales.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousLimit, ConvergenceFailure, DimensionMismatch
from .network import (
    Network,
    StationaryDistribution,
    _power_iteration,
    augment,
    augmented_stationary,
    stationary_distribution,
    validate_gamma,
)
from .signals import (
    DivergenceLedger,
    HypothesisSpace,
    SignalModel,
    check_identifiability,
    divergence_ledger,
    kl_divergence,
)

__all__ = [
    "BOUNDARY_TOL",
    "TIE_TOL",
    "AnalysisReport",
    "condition_values",
    "limit_objective",
    "predicted_limit",
    "build_report",
]

# Strict negativity margin: condition values in (-BOUNDARY_TOL, BOUNDARY_TOL)
# are numerical zeros and flagged as boundary rather than classified.
BOUNDARY_TOL = 1e-12
TIE_TOL = 1e-12


@dataclass(frozen=True)
class AnalysisReport:
    """Everything the theory predicts about one problem instance."""

    pi: np.ndarray
    augmented_pi: np.ndarray
    ledger: DivergenceLedger
    condition_values: np.ndarray
    learns_true_state: bool
    predicted_limit: int
    tied_limits: tuple[int, ...]
    boundary_states: tuple[int, ...]
    limit_objective: np.ndarray
    identifiability_set: tuple[int, ...]
    true_index: int

    def to_dict(self, labels: tuple[str, ...] | None = None) -> dict:
        """JSON-serializable summary; state indices annotated with labels."""
        def name(j: int) -> str:
            return labels[j] if labels is not None else str(j)

        return {
            "pi": [float(x) for x in self.pi],
            "augmented_pi": [float(x) for x in self.augmented_pi],
            "true_index": self.true_index,
            "true_state": name(self.true_index),
            "condition_values": [float(x) for x in self.condition_values],
            "learns_true_state": self.learns_true_state,
            "predicted_limit": self.predicted_limit,
            "predicted_state": name(self.predicted_limit),
            "tied_limits": list(self.tied_limits),
            "boundary_states": list(self.boundary_states),
            "limit_objective": [float(x) for x in self.limit_objective],
            "identifiability_set": list(self.identifiability_set),
            "divergence_ledger": [
                [[float(x) for x in per_type] for per_type in per_agent]
                for per_agent in self.ledger.values
            ],
        }


def condition_values(
    ledger: DivergenceLedger, pi: StationaryDistribution, gamma
) -> np.ndarray:
    """Influence- and type-weighted ledger totals, one value per state.

    Exactly zero at the true state; the almost-sure limit of the per-step
    average log-ratio for every agent and signal type.
    """
    g = validate_gamma(gamma)
    n, p, _ = ledger.values.shape
    if pi.n != n:
        raise DimensionMismatch(f"pi has {pi.n} entries, ledger has {n} agents")
    if g.shape[0] != p:
        raise DimensionMismatch(
            f"gamma has {g.shape[0]} entries, ledger has {p} signal types"
        )
    return np.einsum("i,l,ilm->m", pi.pi, g, ledger.values)


def limit_objective(
    model: SignalModel, pi: StationaryDistribution, gamma
) -> np.ndarray:
    """Group mis-specification score of each candidate state.

    ``objective[j] = sum_l gamma[l] * sum_i pi[i] * KL(generator_il || structure_il[j])``.
    The difference ``objective[j] - objective[j']`` equals
    ``c(j') - c(j)`` for any reference state, so the argmin is the predicted
    collective limit.
    """
    g = validate_gamma(gamma)
    if pi.n != model.n:
        raise DimensionMismatch(f"pi has {pi.n} entries, model has {model.n} agents")
    if g.shape[0] != model.p:
        raise DimensionMismatch(
            f"gamma has {g.shape[0]} entries, model has {model.p} signal types"
        )
    objective = np.zeros(model.m)
    for i in range(model.n):
        for l in range(model.p):
            gen = model.generators[i][l]
            weight = pi.pi[i] * g[l]
            for j in range(model.m):
                objective[j] += weight * kl_divergence(
                    gen, model.structures[i][l][j]
                )
    return objective


def predicted_limit(
    model: SignalModel,
    pi: StationaryDistribution,
    gamma,
    tie_tol: float = TIE_TOL,
) -> int:
    """State the group converges to: the argmin of :func:`limit_objective`.

    Raises AmbiguousLimit when two or more states score within ``tie_tol``
    of the minimum; callers that prefer a deterministic answer break the tie
    toward the lowest index (see :func:`build_report`).
    """
    objective = limit_objective(model, pi, gamma)
    best = int(np.argmin(objective))
    tied = np.flatnonzero(objective <= objective[best] + tie_tol)
    if tied.shape[0] > 1:
        raise AmbiguousLimit(
            f"states {tuple(int(j) for j in tied)} tie for the predicted limit",
            tied=tuple(int(j) for j in tied),
        )
    return best


def build_report(
    net: Network, gamma, model: SignalModel, hyp: HypothesisSpace
) -> AnalysisReport:
    """Compose the full analysis for one problem instance.

    The type-weighted stationary vector is cross-checked against direct
    power iteration on the augmented matrix within 1e-8.
    """
    g = validate_gamma(gamma)
    pi = stationary_distribution(net)
    aug = augment(net, g)
    augmented_pi = augmented_stationary(aug, pi)
    direct, _ = _power_iteration(aug.weights, tol=1e-12, max_iter=100_000)
    if direct is None or float(np.max(np.abs(direct - augmented_pi))) > 1e-8:
        raise ConvergenceFailure(
            "type-weighted stationary vector disagrees with power iteration "
            "on the augmented matrix"
        )

    ledger = divergence_ledger(model, hyp)
    cvals = condition_values(ledger, pi, g)
    others = [j for j in range(hyp.m) if j != hyp.true_index]
    boundary = tuple(j for j in others if abs(cvals[j]) <= BOUNDARY_TOL)
    learns = all(cvals[j] < -BOUNDARY_TOL for j in others)

    objective = limit_objective(model, pi, g)
    try:
        limit = predicted_limit(model, pi, g)
        tied: tuple[int, ...] = ()
    except AmbiguousLimit as exc:
        tied = exc.tied
        limit = min(tied)

    ident = tuple(sorted(check_identifiability(model, hyp)))
    return AnalysisReport(
        pi=pi.pi,
        augmented_pi=augmented_pi,
        ledger=ledger,
        condition_values=cvals,
        learns_true_state=learns,
        predicted_limit=limit,
        tied_limits=tied,
        boundary_states=boundary,
        limit_objective=objective,
        identifiability_set=ident,
        true_index=hyp.true_index,
    )
