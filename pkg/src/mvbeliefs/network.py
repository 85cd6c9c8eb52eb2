"""Directed communication networks and their spectral structure.

Agents exchange beliefs over a weighted digraph: ``weights[i, j]`` is the
attention agent ``i`` pays to agent ``j``, and each row sums to one so the
incoming information is a convex combination. Validation enforces the
standing network assumption A1 (strong connectivity of the positivity
pattern plus at least one positive self-weight), which makes the matrix
the transition kernel of an irreducible aperiodic chain with a unique,
strictly positive stationary distribution, the eigenvector centrality
that weighs each agent's long-run influence.

For ``p`` signal types coupled by weights ``gamma``, :func:`augment`
assembles the block matrix whose diagonal block ``l`` is ``gamma[l] * A``
and whose off-diagonal block ``(l, k)`` is ``gamma[k] * I``: the kernel of
the multiview update acting on all per-type belief copies at once. Its
stationary distribution is the type-weighted concatenation
``(gamma[0]*pi, ..., gamma[p-1]*pi)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    InvalidGamma,
    NoPositiveDiagonal,
    NotRowStochastic,
    NotStronglyConnected,
)

__all__ = [
    "EDGE_TOLERANCE",
    "Network",
    "StationaryDistribution",
    "AugmentedNetwork",
    "validate_network",
    "validate_gamma",
    "stationary_distribution",
    "augment",
    "augmented_stationary",
    "is_strongly_connected",
]

# Entries below this are treated as absent edges, so floating noise in an
# otherwise zero weight cannot fake connectivity.
EDGE_TOLERANCE = 1e-15

_ROW_SUM_TOL = 1e-9
_GAMMA_SUM_TOL = 1e-12


def _read_only(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Network:
    """A validated directed network with row-stochastic weights."""

    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class StationaryDistribution:
    """Left fixed point of a row-stochastic matrix, normalized to mass one."""

    pi: np.ndarray

    def __post_init__(self):
        pi = self.pi
        if pi.ndim != 1:
            raise DimensionMismatch("stationary distribution must be a vector")
        if np.any(pi <= 0.0):
            raise ConvergenceFailure(
                "stationary distribution has a non-positive entry"
            )
        if abs(float(pi.sum()) - 1.0) > 1e-12:
            raise ConvergenceFailure("stationary distribution does not sum to 1")

    @property
    def n(self) -> int:
        return self.pi.shape[0]


@dataclass(frozen=True)
class AugmentedNetwork:
    """Block matrix coupling the per-signal-type copies of a network."""

    weights: np.ndarray
    gamma: np.ndarray
    base_n: int

    @property
    def p(self) -> int:
        return self.gamma.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def _reachable_from(adjacency: np.ndarray, start: int) -> np.ndarray:
    """Boolean reachability over a dense adjacency pattern (BFS)."""
    n = adjacency.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for w in np.flatnonzero(adjacency[v]):
                if not seen[w]:
                    seen[w] = True
                    nxt.append(int(w))
        frontier = nxt
    return seen


def is_strongly_connected(support: np.ndarray) -> bool:
    """True iff the digraph with edge pattern ``support`` is strongly connected.

    Kosaraju-style check: every node must be reachable from node 0 and node 0
    must be reachable from every node (reachability on the transpose).
    """
    if support.shape[0] == 0:
        return False
    return bool(
        _reachable_from(support, 0).all() and _reachable_from(support.T, 0).all()
    )


def validate_network(weights) -> Network:
    """Validate a weight matrix against the network assumption A1.

    Requires a square matrix with non-negative entries, rows summing to one
    (within 1e-9), a strongly connected positivity pattern, and at least one
    positive diagonal entry.

    Raises NotRowStochastic, NotStronglyConnected, or NoPositiveDiagonal,
    each naming the violated clause.
    """
    w = np.array(weights, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] == 0:
        raise DimensionMismatch(
            f"weight matrix must be square and non-empty, got shape {w.shape}"
        )
    if np.any(~np.isfinite(w)) or np.any(w < 0.0):
        raise NotRowStochastic("weights must be finite and non-negative")
    row_sums = w.sum(axis=1)
    worst = int(np.argmax(np.abs(row_sums - 1.0)))
    if abs(row_sums[worst] - 1.0) > _ROW_SUM_TOL:
        raise NotRowStochastic(
            f"row {worst} sums to {row_sums[worst]:.12g}, expected 1"
        )
    support = w > EDGE_TOLERANCE
    if not is_strongly_connected(support):
        raise NotStronglyConnected(
            "communication graph is not strongly connected"
        )
    if not np.any(np.diag(support)):
        raise NoPositiveDiagonal("no agent has a positive self-weight")
    return Network(weights=_read_only(w.copy()))


def _power_iteration(
    w: np.ndarray, tol: float, max_iter: int
) -> tuple[np.ndarray | None, float]:
    """Left power iteration ``x <- x @ w``; returns (vector, residual)."""
    n = w.shape[0]
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = x @ w
        nxt = nxt / nxt.sum()
        if float(np.max(np.abs(nxt - x))) <= tol:
            residual = float(np.max(np.abs(nxt @ w - nxt)))
            return nxt, residual
        x = nxt
    residual = float(np.max(np.abs(x @ w - x)))
    return None, residual


def _stationary_by_solve(w: np.ndarray) -> np.ndarray:
    """Solve (w.T - I) pi = 0 with the last equation replaced by sum(pi)=1."""
    n = w.shape[0]
    m = w.T - np.eye(n)
    m[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(m, b)
    return pi / pi.sum()


def stationary_distribution(
    net: Network, tol: float = 1e-12, max_iter: int = 100_000
) -> StationaryDistribution:
    """Stationary distribution of a validated network.

    Power iteration first; if it does not reach ``tol`` within ``max_iter``
    steps, falls back to a direct linear solve. Raises ConvergenceFailure
    with the best residual if neither route meets the tolerance.
    """
    w = net.weights
    pi, residual = _power_iteration(w, tol, max_iter)
    if pi is None or residual > tol:
        candidate = _stationary_by_solve(w)
        cand_residual = float(np.max(np.abs(candidate @ w - candidate)))
        if pi is None or cand_residual < residual:
            pi, residual = candidate, cand_residual
    if residual > tol:
        raise ConvergenceFailure(
            f"stationary distribution residual {residual:.3e} exceeds {tol:.3e}",
            residual=residual,
        )
    return StationaryDistribution(pi=_read_only(pi))


def validate_gamma(gamma) -> np.ndarray:
    """Validate signal-type weights.

    The standard form has every entry strictly inside (0, 1) with total mass
    one. Two documented relaxations are accepted: a single type with weight
    exactly 1.0 (the classic single-signal model), and a one-hot vector over
    several types (all mass on one type, used for single-type comparison
    runs).
    """
    g = np.array(gamma, dtype=float)
    if g.ndim != 1 or g.shape[0] == 0:
        raise InvalidGamma("gamma must be a non-empty vector")
    if np.any(~np.isfinite(g)):
        raise InvalidGamma("gamma entries must be finite")
    one_hot = np.count_nonzero(g == 1.0) == 1 and np.count_nonzero(g == 0.0) == g.shape[0] - 1
    if not one_hot:
        if np.any(g <= 0.0) or np.any(g >= 1.0):
            raise InvalidGamma(
                "gamma entries must lie strictly inside (0,1) "
                "(or form a one-hot vector)"
            )
        if abs(float(g.sum()) - 1.0) > _GAMMA_SUM_TOL:
            raise InvalidGamma(f"gamma sums to {g.sum():.12g}, expected 1")
    return _read_only(g.copy())


def augment(net: Network, gamma) -> AugmentedNetwork:
    """Assemble the block matrix coupling the per-type network copies.

    Block (l, k) is ``gamma[k] * A`` on the diagonal (k == l) and
    ``gamma[k] * I`` off it; the result is row-stochastic by construction
    and is checked to be so within 1e-12.
    """
    g = validate_gamma(gamma)
    n, p = net.n, g.shape[0]
    eye = np.eye(n)
    big = np.empty((n * p, n * p))
    for l in range(p):
        for k in range(p):
            block = net.weights if k == l else eye
            big[l * n : (l + 1) * n, k * n : (k + 1) * n] = g[k] * block
    row_err = float(np.max(np.abs(big.sum(axis=1) - 1.0)))
    if row_err > 1e-12:
        raise NotRowStochastic(
            f"augmented matrix rows deviate from 1 by {row_err:.3e}"
        )
    return AugmentedNetwork(weights=_read_only(big), gamma=g, base_n=n)


def augmented_stationary(aug: AugmentedNetwork, pi: StationaryDistribution) -> np.ndarray:
    """Stationary distribution of the augmented matrix.

    Returns the concatenation ``(gamma[0]*pi, ..., gamma[p-1]*pi)`` and
    verifies it is a left fixed point of the augmented matrix within 1e-10.
    """
    if pi.n != aug.base_n:
        raise DimensionMismatch(
            f"pi has {pi.n} entries but the augmented network couples "
            f"{aug.base_n} agents"
        )
    tilde = np.concatenate([g * pi.pi for g in aug.gamma])
    residual = float(np.max(np.abs(tilde @ aug.weights - tilde)))
    if residual > 1e-10:
        raise ConvergenceFailure(
            f"type-weighted stationary vector residual {residual:.3e}",
            residual=residual,
        )
    return _read_only(tilde)
