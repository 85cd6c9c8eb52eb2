"""Hypothesis spaces, likelihood families, and their information geometry.

A hypothesis space is a finite ordered list of state labels with one state
designated true. Every (agent, signal type) pair views the world through a
family of likelihoods, one per state, plus a generating distribution that
actually produces its observations. Two families are supported:

``Gaussian``
    real-valued signals with fixed mean and standard deviation;
``Categorical``
    finite-alphabet signals with strictly positive masses (positivity keeps
    every log-likelihood finite, discharging assumption A2b by construction).

The module also provides the exact Kullback-Leibler closed forms and the
divergence ledger ``k[i, l, state]``: the difference between how badly the
designated true state and how badly an alternative explain agent ``i``'s
type-``l`` data. Positive entries mark misleading (agent, type) views, the
raw material of every convergence verdict in :mod:`mvbeliefs.analysis`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    FamilyMismatch,
    InvalidDistribution,
    UnsupportedObservation,
)

__all__ = [
    "Gaussian",
    "Categorical",
    "LikelihoodFamily",
    "HypothesisSpace",
    "SignalModel",
    "DivergenceLedger",
    "log_likelihood",
    "sample",
    "sample_series",
    "kl_divergence",
    "divergence_ledger",
    "check_identifiability",
    "well_specified",
    "families_equal",
]

_LOG_TWO_PI = math.log(2.0 * math.pi)
_MASS_TOL = 1e-12


@dataclass(frozen=True)
class Gaussian:
    """Normal distribution on the real line."""

    mean: float
    std: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.std)):
            raise InvalidDistribution("gaussian parameters must be finite")
        if self.std <= 0.0:
            raise InvalidDistribution(f"gaussian std must be positive, got {self.std}")


@dataclass(frozen=True)
class Categorical:
    """Distribution over a finite alphabet with strictly positive masses."""

    symbols: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "probs", tuple(float(q) for q in self.probs))
        if len(self.symbols) != len(self.probs) or not self.symbols:
            raise InvalidDistribution("alphabet and masses must align and be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise InvalidDistribution("alphabet symbols must be unique")
        if any(not math.isfinite(q) or q <= 0.0 for q in self.probs):
            raise InvalidDistribution("categorical masses must be strictly positive")
        if abs(sum(self.probs) - 1.0) > _MASS_TOL:
            raise InvalidDistribution(
                f"categorical masses sum to {sum(self.probs):.15g}, expected 1"
            )

    @classmethod
    def from_mapping(cls, masses: Mapping[str, float]) -> "Categorical":
        return cls(symbols=tuple(masses.keys()), probs=tuple(masses.values()))

    def index_of(self, symbol) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise UnsupportedObservation(
                f"symbol {symbol!r} not in alphabet {self.symbols}"
            ) from None


LikelihoodFamily = Union[Gaussian, Categorical]


@dataclass(frozen=True)
class HypothesisSpace:
    """Ordered state labels with a designated true state."""

    labels: tuple[str, ...]
    true_index: int

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))
        if not self.labels:
            raise DimensionMismatch("hypothesis space must contain at least one state")
        if len(set(self.labels)) != len(self.labels):
            raise DimensionMismatch("state labels must be unique")
        if not 0 <= self.true_index < len(self.labels):
            raise DimensionMismatch(
                f"true_index {self.true_index} out of range for {len(self.labels)} states"
            )

    @property
    def m(self) -> int:
        return len(self.labels)


def _same_support(a: LikelihoodFamily, b: LikelihoodFamily) -> bool:
    if isinstance(a, Gaussian) and isinstance(b, Gaussian):
        return True
    if isinstance(a, Categorical) and isinstance(b, Categorical):
        return a.symbols == b.symbols
    return False


def families_equal(
    a: LikelihoodFamily, b: LikelihoodFamily, mass_tol: float = _MASS_TOL
) -> bool:
    """Distribution identity: exact parameters for Gaussian, masses within
    ``mass_tol`` elementwise for Categorical."""
    if isinstance(a, Gaussian) and isinstance(b, Gaussian):
        return a.mean == b.mean and a.std == b.std
    if isinstance(a, Categorical) and isinstance(b, Categorical):
        if a.symbols != b.symbols:
            return False
        return all(abs(x - y) <= mass_tol for x, y in zip(a.probs, b.probs))
    return False


@dataclass(frozen=True)
class SignalModel:
    """Per-agent, per-type likelihood structures and generating distributions.

    ``structures[i][l][j]`` is agent ``i``'s assumed likelihood of type-``l``
    observations under state ``j``; ``generators[i][l]`` is the distribution
    that actually produces them. For each (agent, type) all structures and
    the generator must share one family kind and one support, so that
    log-likelihood ratios are well defined.
    """

    structures: tuple[tuple[tuple[LikelihoodFamily, ...], ...], ...]
    generators: tuple[tuple[LikelihoodFamily, ...], ...]

    def __post_init__(self):
        structures = tuple(
            tuple(tuple(per_type) for per_type in per_agent)
            for per_agent in self.structures
        )
        generators = tuple(tuple(per_agent) for per_agent in self.generators)
        object.__setattr__(self, "structures", structures)
        object.__setattr__(self, "generators", generators)
        if not structures or not structures[0] or not structures[0][0]:
            raise DimensionMismatch("signal model must be non-empty")
        n, p, m = len(structures), len(structures[0]), len(structures[0][0])
        if len(generators) != n or any(len(row) != p for row in generators):
            raise DimensionMismatch("generator grid must be n x p")
        for i in range(n):
            if len(structures[i]) != p:
                raise DimensionMismatch(f"agent {i} has a ragged structure row")
            for l in range(p):
                cell = structures[i][l]
                if len(cell) != m:
                    raise DimensionMismatch(
                        f"agent {i}, type {l} has {len(cell)} structures, expected {m}"
                    )
                ref = cell[0]
                for j, fam in enumerate(cell):
                    if not _same_support(ref, fam):
                        raise FamilyMismatch(
                            f"agent {i}, type {l}: structure for state {j} does not "
                            "share the family kind/support of the others"
                        )
                if not _same_support(ref, generators[i][l]):
                    raise FamilyMismatch(
                        f"agent {i}, type {l}: generator kind/support does not match "
                        "the structures"
                    )

    @property
    def n(self) -> int:
        return len(self.structures)

    @property
    def p(self) -> int:
        return len(self.structures[0])

    @property
    def m(self) -> int:
        return len(self.structures[0][0])


@dataclass(frozen=True)
class DivergenceLedger:
    """Grid ``values[i, l, j]``: KL(f_il || struct_il[true]) - KL(f_il || struct_il[j]).

    Entry zero at the true state by construction; positive entries mean state
    ``j`` explains agent ``i``'s type-``l`` data better than the designated
    true state does (a misleading view).
    """

    values: np.ndarray
    true_index: int


def _gaussian_logpdf(x, mean, std):
    z = (x - mean) / std
    return -0.5 * (z * z) - np.log(std) - 0.5 * _LOG_TWO_PI


def log_likelihood(family: LikelihoodFamily, obs) -> float:
    """Log-density (Gaussian) or log-mass (Categorical) of one observation."""
    if isinstance(family, Gaussian):
        return float(_gaussian_logpdf(float(obs), family.mean, family.std))
    return float(np.log(family.probs[family.index_of(obs)]))


def _invert_cdf(cum: np.ndarray, u) -> np.ndarray:
    idx = np.searchsorted(cum, u, side="right")
    return np.minimum(idx, cum.shape[0] - 1)


def sample(family: LikelihoodFamily, rng: np.random.Generator):
    """Draw one observation; same stream position always gives the same draw."""
    if isinstance(family, Gaussian):
        return float(rng.normal(family.mean, family.std))
    cum = np.cumsum(family.probs)
    idx = int(_invert_cdf(cum, rng.random()))
    return family.symbols[idx]


def sample_series(family: LikelihoodFamily, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` observations in one call.

    Produces exactly the sequence that ``count`` successive :func:`sample`
    calls on the same stream would.
    """
    if isinstance(family, Gaussian):
        return rng.normal(family.mean, family.std, size=count)
    cum = np.cumsum(family.probs)
    idx = _invert_cdf(cum, rng.random(count))
    return np.array(family.symbols, dtype=object)[idx]


def kl_divergence(p: LikelihoodFamily, q: LikelihoodFamily) -> float:
    """Exact KL divergence D(p || q) for same-kind, same-support families."""
    if isinstance(p, Gaussian) and isinstance(q, Gaussian):
        var_ratio = (p.std * p.std + (p.mean - q.mean) ** 2) / (2.0 * q.std * q.std)
        return math.log(q.std / p.std) + var_ratio - 0.5
    if isinstance(p, Categorical) and isinstance(q, Categorical):
        if p.symbols != q.symbols:
            raise FamilyMismatch(
                f"alphabets differ: {p.symbols} vs {q.symbols}"
            )
        return float(
            sum(pp * math.log(pp / qq) for pp, qq in zip(p.probs, q.probs))
        )
    raise FamilyMismatch(
        f"cannot compare {type(p).__name__} with {type(q).__name__}"
    )


def divergence_ledger(model: SignalModel, hyp: HypothesisSpace) -> DivergenceLedger:
    """Fill the divergence ledger with two KL evaluations per cell.

    When the model is well specified (generator equals the structure at the
    true state), every entry reduces to minus the divergence from the true
    structure to the alternative, hence is non-positive.
    """
    if hyp.m != model.m:
        raise DimensionMismatch(
            f"hypothesis space has {hyp.m} states, model has {model.m}"
        )
    n, p, m = model.n, model.p, model.m
    values = np.empty((n, p, m))
    for i in range(n):
        for l in range(p):
            gen = model.generators[i][l]
            base = kl_divergence(gen, model.structures[i][l][hyp.true_index])
            for j in range(m):
                values[i, l, j] = base - kl_divergence(gen, model.structures[i][l][j])
    values.setflags(write=False)
    return DivergenceLedger(values=values, true_index=hyp.true_index)


def check_identifiability(model: SignalModel, hyp: HypothesisSpace) -> set[int]:
    """States observationally equivalent to the true state for every view.

    Returns the intersection over all agents and types of the per-view
    equivalence sets; the true state is globally identifiable (assumption
    A3) exactly when the result is the singleton ``{true_index}``.
    """
    if hyp.m != model.m:
        raise DimensionMismatch(
            f"hypothesis space has {hyp.m} states, model has {model.m}"
        )
    equivalent = set(range(model.m))
    for i in range(model.n):
        for l in range(model.p):
            ref = model.structures[i][l][hyp.true_index]
            cell = model.structures[i][l]
            equivalent = {
                j for j in equivalent if families_equal(cell[j], ref)
            }
    return equivalent


def well_specified(model: SignalModel, hyp: HypothesisSpace) -> bool:
    """True when every generator equals its structure at the true state."""
    return all(
        model.generators[i][l] == model.structures[i][l][hyp.true_index]
        for i in range(model.n)
        for l in range(model.p)
    )
