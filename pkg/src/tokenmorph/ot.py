"""Exact discrete optimal transport between token sets.

Ground cost is squared Euclidean distance. The general solver is a dense
transportation simplex with Bland's anti-cycling pivot rule; instances
with uniform weights and equal sizes are routed to a shortest-augmenting-
path assignment solver, where the optimal coupling is a permutation.
Brute-force and sorted-1D oracles are included for verification.

All functions are pure: they never mutate their inputs and hold no
global state, so concurrent calls on shared token sets are safe.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidParameterError,
    InvalidWeightsError,
    SolverFailureError,
)
from .tokens import TokenSet, require_same_dimension

MARGINAL_TOL = 1e-9

_METHODS = ("auto", "simplex", "assignment")


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Pairwise ground costs between two token sets.

    ``values[i, j]`` is the squared Euclidean distance between token i of
    the first set and token j of the second.
    """

    values: np.ndarray
    metric: str = "sqeuclidean"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        vals = np.array(vals, copy=True)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """A feasible coupling between two token sets and its total cost.

    Row sums of ``coupling`` equal the source weights and column sums the
    target weights, both within 1e-9; ``total_cost`` is the inner product
    of the coupling with the squared-Euclidean cost matrix.
    """

    coupling: np.ndarray
    total_cost: float

    def __post_init__(self):
        coup = np.array(np.asarray(self.coupling, dtype=np.float64), copy=True)
        coup.setflags(write=False)
        object.__setattr__(self, "coupling", coup)
        object.__setattr__(self, "total_cost", float(self.total_cost))


@dataclass(frozen=True)
class AssignmentResult:
    """A minimum-cost perfect matching: ``permutation[i]`` is the column
    assigned to row i, ``cost`` the summed matched entries."""

    permutation: np.ndarray
    cost: float


def cost_matrix(a: TokenSet, b: TokenSet) -> CostMatrix:
    """Squared Euclidean cost matrix between two token sets.

    Args:
        a: source set, n tokens in R^m.
        b: target set, n' tokens in R^m.

    Returns:
        CostMatrix with values[i, j] = sum_d (a[i, d] - b[j, d])**2.

    Raises:
        DimensionMismatchError: if the embedding dimensions differ.
    """
    require_same_dimension(a, b)
    diff = a.points[:, None, :] - b.points[None, :, :]
    values = np.einsum("ijk,ijk->ij", diff, diff)
    return CostMatrix(values)


def solve_exact_ot(a: TokenSet, b: TokenSet, method: str = "auto") -> TransportPlan:
    """Solve the exact optimal transport problem between two token sets.

    Minimizes sum_ij coupling[i, j] * d(a_i, b_j)^2 over all couplings
    with marginals equal to the sets' weight vectors.

    Args:
        a: source token set.
        b: target token set.
        method: "auto" picks the assignment fast path when both sets have
            uniform weights and equal sizes and the transportation simplex
            otherwise; "simplex" and "assignment" force a route.

    Returns:
        TransportPlan with an exactly optimal coupling; output is
        deterministic for fixed inputs (ties are resolved by a fixed
        pivot order toward smallest index pairs).

    Raises:
        DimensionMismatchError: on differing embedding dimensions, or
            differing sizes when method="assignment".
        SolverFailureError: if the computed coupling violates a marginal
            constraint by more than 1e-9.
    """
    if method not in _METHODS:
        raise InvalidParameterError(f"method must be one of {_METHODS}, got {method!r}")
    cm = cost_matrix(a, b)
    values = cm.values

    use_assignment = False
    if method == "assignment":
        if a.n != b.n:
            raise DimensionMismatchError(
                f"assignment path requires equal sizes, got {a.n} vs {b.n}"
            )
        if not (a.has_uniform_weights() and b.has_uniform_weights()):
            raise InvalidWeightsError("assignment path requires uniform weights")
        use_assignment = True
    elif method == "auto":
        use_assignment = (
            a.n == b.n and a.has_uniform_weights() and b.has_uniform_weights()
        )

    if use_assignment:
        perm, _ = _min_cost_matching(values)
        coupling = np.zeros_like(values)
        coupling[np.arange(a.n), perm] = 1.0 / a.n
    else:
        coupling = _transportation_simplex(values, a.weights, b.weights)

    _check_marginals(coupling, a.weights, b.weights)
    total = float(np.sum(coupling * values))
    return TransportPlan(coupling, total)


def w2_distance(a: TokenSet, b: TokenSet) -> float:
    """2-Wasserstein distance: square root of the optimal coupling cost."""
    plan = solve_exact_ot(a, b)
    return math.sqrt(max(plan.total_cost, 0.0))


def solve_assignment(cost: CostMatrix | np.ndarray) -> AssignmentResult:
    """Minimum-cost perfect matching on a square cost matrix.

    Uses a shortest-augmenting-path (Hungarian) method with potentials.
    Ties are broken deterministically: equal-cost columns are explored in
    ascending index order, so the zero matrix yields the identity
    permutation.

    Raises:
        InvalidParameterError: if the matrix is not square.
    """
    values = cost.values if isinstance(cost, CostMatrix) else np.asarray(cost, float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise InvalidParameterError(
            f"assignment requires a square matrix, got shape {values.shape}"
        )
    perm, total = _min_cost_matching(values)
    return AssignmentResult(perm, total)


def brute_force_ot_uniform(a: TokenSet, b: TokenSet) -> float:
    """Test oracle: exhaustive OT cost for uniform equal-size sets.

    Enumerates all n! permutations; rejected for n > 8.
    """
    require_same_dimension(a, b)
    if a.n != b.n:
        raise DimensionMismatchError(f"sizes differ: {a.n} vs {b.n}")
    if not (a.has_uniform_weights() and b.has_uniform_weights()):
        raise InvalidWeightsError("brute force oracle requires uniform weights")
    if a.n > 8:
        raise InvalidParameterError(f"n={a.n} exceeds the n<=8 enumeration guard")
    values = cost_matrix(a, b).values
    rows = np.arange(a.n)
    best = math.inf
    for perm in itertools.permutations(range(a.n)):
        best = min(best, float(values[rows, perm].sum()))
    return best / a.n


def sorted_1d_ot(a: TokenSet, b: TokenSet) -> float:
    """Test oracle: closed-form 1-D OT cost via sorted matching."""
    if a.m != 1 or b.m != 1:
        raise DimensionMismatchError("sorted 1-D oracle requires m == 1")
    if a.n != b.n:
        raise DimensionMismatchError(f"sizes differ: {a.n} vs {b.n}")
    if not (a.has_uniform_weights() and b.has_uniform_weights()):
        raise InvalidWeightsError("sorted 1-D oracle requires uniform weights")
    xs = np.sort(a.points[:, 0])
    ys = np.sort(b.points[:, 0])
    return float(np.mean((xs - ys) ** 2))


def _check_marginals(coupling: np.ndarray, supply: np.ndarray, demand: np.ndarray) -> None:
    row_err = float(np.max(np.abs(coupling.sum(axis=1) - supply)))
    col_err = float(np.max(np.abs(coupling.sum(axis=0) - demand)))
    if row_err > MARGINAL_TOL or col_err > MARGINAL_TOL:
        raise SolverFailureError(
            f"coupling violates marginals (row err {row_err:.3e}, col err {col_err:.3e})"
        )
    if float(coupling.min()) < -MARGINAL_TOL:
        raise SolverFailureError("coupling has a negative entry")


def _min_cost_matching(values: np.ndarray) -> tuple[np.ndarray, float]:
    """Hungarian algorithm with potentials, O(n^3), deterministic ties.

    Internally 1-indexed over columns with column 0 as the virtual root.
    """
    c = np.asarray(values, dtype=np.float64)
    n = c.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=np.int64)  # match[j] = row on column j, 0 if free
    way = np.zeros(n + 1, dtype=np.int64)

    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            unused = ~used[1:]
            cur = c[i0 - 1, :] - u[i0] - v[1:]
            better = unused & (cur < minv[1:])
            if better.any():
                idx = np.flatnonzero(better)
                minv[idx + 1] = cur[idx]
                way[idx + 1] = j0
            candidates = np.where(unused, minv[1:], np.inf)
            j1 = int(np.argmin(candidates)) + 1
            delta = candidates[j1 - 1]
            used_idx = np.flatnonzero(used)
            u[match[used_idx]] += delta
            v[used_idx] -= delta
            minv[1:][unused] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0 != 0:
            j1 = int(way[j0])
            match[j0] = match[j1]
            j0 = j1

    perm = np.zeros(n, dtype=np.int64)
    for j in range(1, n + 1):
        perm[match[j] - 1] = j - 1
    total = float(c[np.arange(n), perm].sum())
    return perm, total


def _transportation_simplex(
    values: np.ndarray, supply: np.ndarray, demand: np.ndarray
) -> np.ndarray:
    """Dense transportation simplex (MODI method).

    Starts from the northwest-corner basic solution; the basis is a
    spanning tree of the bipartite transport graph with n + n' - 1 cells.
    Entering cells follow Dantzig's most-negative-reduced-cost rule with
    lexicographic tie-breaks, switching to Bland's rule (first negative
    cell) after a pivot budget so degenerate instances cannot cycle.
    The leaving cell is the first minimizer on the cycle. The pivot
    sequence, and therefore the returned basic solution, is fully
    deterministic.
    """
    n, m = values.shape
    alloc = np.zeros((n, m))
    in_basis = np.zeros((n, m), dtype=bool)
    basis: list[tuple[int, int]] = []

    rs = np.asarray(supply, dtype=np.float64).copy()
    rd = np.asarray(demand, dtype=np.float64).copy()
    i = j = 0
    while True:
        q = min(rs[i], rd[j])
        alloc[i, j] = q
        in_basis[i, j] = True
        basis.append((i, j))
        rs[i] -= q
        rd[j] -= q
        if i == n - 1 and j == m - 1:
            break
        if rs[i] == 0.0 and i < n - 1:
            i += 1
        elif j < m - 1:
            j += 1
        else:
            # Rounding dust can leave residual supply at the last column;
            # push remaining rows forward instead of stepping out of range.
            i += 1

    tol = 1e-11 * max(1.0, float(values.max()))
    max_pivots = max(2000, 30 * n * m)
    bland_after = 40 * (n + m)

    for pivot in range(max_pivots):
        u, v = _tree_duals(values, basis, n, m)
        reduced = values - u[:, None] - v[None, :]
        candidates = (reduced < -tol) & ~in_basis
        if not candidates.any():
            break
        if pivot < bland_after:
            flat = int(np.argmin(np.where(candidates, reduced, np.inf)))
        else:
            flat = int(np.argmax(candidates))  # first negative cell (Bland)
        ei, ej = divmod(flat, m)

        path = _tree_path(basis, n, ei, ej)
        # Cycle = entering cell (+) followed by alternating -/+ tree edges.
        minus_cells: list[tuple[int, int]] = []
        plus_cells: list[tuple[int, int]] = [(ei, ej)]
        for k in range(len(path) - 1):
            kind1, a1 = path[k]
            _, a2 = path[k + 1]
            cell = (a1, a2) if kind1 == "r" else (a2, a1)
            if k % 2 == 0:
                minus_cells.append(cell)
            else:
                plus_cells.append(cell)

        theta = math.inf
        leaving = minus_cells[0]
        for cell in minus_cells:
            val = alloc[cell]
            if val < theta or (val == theta and cell < leaving):
                theta = val
                leaving = cell
        for cell in plus_cells:
            alloc[cell] += theta
        for cell in minus_cells:
            alloc[cell] -= theta
        alloc[leaving] = 0.0

        in_basis[leaving] = False
        basis.remove(leaving)
        in_basis[ei, ej] = True
        basis.append((ei, ej))
    else:
        raise SolverFailureError("transportation simplex exceeded its pivot budget")

    negative = alloc < 0.0
    if negative.any():
        if float(alloc.min()) < -1e-12:
            raise SolverFailureError("transportation simplex produced negative mass")
        alloc[negative] = 0.0
    return alloc


def _tree_duals(
    values: np.ndarray, basis: list[tuple[int, int]], n: int, m: int
) -> tuple[np.ndarray, np.ndarray]:
    rows_adj: list[list[int]] = [[] for _ in range(n)]
    cols_adj: list[list[int]] = [[] for _ in range(m)]
    for bi, bj in basis:
        rows_adj[bi].append(bj)
        cols_adj[bj].append(bi)

    u = np.full(n, np.nan)
    v = np.full(m, np.nan)
    u[0] = 0.0
    stack: list[tuple[str, int]] = [("r", 0)]
    while stack:
        kind, k = stack.pop()
        if kind == "r":
            for bj in rows_adj[k]:
                if np.isnan(v[bj]):
                    v[bj] = values[k, bj] - u[k]
                    stack.append(("c", bj))
        else:
            for bi in cols_adj[k]:
                if np.isnan(u[bi]):
                    u[bi] = values[bi, k] - v[k]
                    stack.append(("r", bi))
    if np.isnan(u).any() or np.isnan(v).any():
        raise SolverFailureError("transport basis is not a spanning tree")
    return u, v


def _tree_path(
    basis: list[tuple[int, int]], n: int, ei: int, ej: int
) -> list[tuple[str, int]]:
    """Unique path of tree nodes from row ei to column ej."""
    rows_adj: dict[int, list[int]] = {}
    cols_adj: dict[int, list[int]] = {}
    for bi, bj in basis:
        rows_adj.setdefault(bi, []).append(bj)
        cols_adj.setdefault(bj, []).append(bi)

    start = ("r", ei)
    goal = ("c", ej)
    parent: dict[tuple[str, int], tuple[str, int] | None] = {start: None}
    queue: deque[tuple[str, int]] = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        kind, k = node
        if kind == "r":
            for bj in rows_adj.get(k, ()):
                nxt = ("c", bj)
                if nxt not in parent:
                    parent[nxt] = node
                    queue.append(nxt)
        else:
            for bi in cols_adj.get(k, ()):
                nxt = ("r", bi)
                if nxt not in parent:
                    parent[nxt] = node
                    queue.append(nxt)
    if goal not in parent:
        raise SolverFailureError("transport basis is disconnected")

    path: list[tuple[str, int]] = []
    node: tuple[str, int] | None = goal
    while node is not None:
        path.append(node)
        node = parent[node]
    path.reverse()  # now start -> goal
    return path
