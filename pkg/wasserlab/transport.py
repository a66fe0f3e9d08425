"""Exact discrete p-Wasserstein distances.

The solver is the transportation simplex (network simplex on the complete
bipartite graph) with u-v potentials, a spanning-tree basis, supply
perturbation against degeneracy and Bland's rule as anti-cycling fallback.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DomainError, InputError, OracleUnavailableError, SolverError
from .measures import DiscreteMeasure
from .norms import NormSpec

logger = logging.getLogger(__name__)

MAX_CELLS = 10 ** 6


@dataclass(frozen=True, eq=False)
class TransportPlan:
    source: DiscreteMeasure
    target: DiscreteMeasure
    mass: np.ndarray


@dataclass(frozen=True)
class SolverStats:
    iterations: int
    degenerate_pivots: int
    status: str
    min_reduced_cost: float


@dataclass(frozen=True, eq=False)
class OTResult:
    distance: float
    cost_p: float
    p: float
    plan: TransportPlan
    solver_stats: SolverStats


@dataclass(frozen=True)
class PlanCheck:
    ok: bool
    row_error: float
    column_error: float
    min_entry: float


@dataclass(frozen=True)
class MonotonicityReport:
    monotone: bool
    cycle: Optional[Tuple[int, ...]]
    gain: float


def _check_exponent(p: float):
    if not (math.isfinite(p) and p >= 1):
        raise DomainError(f'p must be a finite real >= 1, got {p}')


def cost_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure, spec: NormSpec, p: float) -> np.ndarray:
    """Entries N(x_i - y_j)^p."""
    _check_exponent(p)
    if mu.dimension != nu.dimension:
        raise InputError(f'dimension mismatch: {mu.dimension} vs {nu.dimension}')
    diff = mu.points[:, None, :] - nu.points[None, :, :]
    return spec.value(diff) ** p


class TransportSimplex:
    """Transportation simplex for balanced supplies/demands.

    cfg keys: max_iter, perturbation, bland_after, pivot_tol,
    reduced_cost_tol, marginal_tol.
    """

    def __init__(self, cfg: Optional[Dict] = None):
        cfg = cfg or {}
        self.max_iter = int(cfg.get('max_iter', 100000))
        self.perturbation = float(cfg.get('perturbation', 1e-13))
        self.bland_after = int(cfg.get('bland_after', 50))
        self.pivot_tol = float(cfg.get('pivot_tol', 1e-12))
        self.reduced_cost_tol = float(cfg.get('reduced_cost_tol', 1e-9))
        self.marginal_tol = float(cfg.get('marginal_tol', 1e-10))

    @staticmethod
    def _northwest_corner(supply, demand):
        m, k = len(supply), len(demand)
        s, d = supply.copy(), demand.copy()
        flow = np.zeros((m, k))
        basic = np.zeros((m, k), dtype=bool)
        i = j = 0
        while True:
            x = min(s[i], d[j])
            flow[i, j] = x
            basic[i, j] = True
            s[i] -= x
            d[j] -= x
            if i == m - 1 and j == k - 1:
                break
            if j == k - 1 or (i < m - 1 and s[i] <= d[j]):
                i += 1
            else:
                j += 1
        return flow, basic

    @staticmethod
    def _potentials(cost, basic):
        m, k = cost.shape
        u = np.full(m, np.nan)
        v = np.full(k, np.nan)
        u[0] = 0.0
        stack = [('r', 0)]
        while stack:
            side, idx = stack.pop()
            if side == 'r':
                for j in np.flatnonzero(basic[idx]):
                    if np.isnan(v[j]):
                        v[j] = cost[idx, j] - u[idx]
                        stack.append(('c', j))
            else:
                for i in np.flatnonzero(basic[:, idx]):
                    if np.isnan(u[i]):
                        u[i] = cost[i, idx] - v[idx]
                        stack.append(('r', i))
        if np.isnan(u).any() or np.isnan(v).any():
            raise SolverError('basis is not a spanning tree')
        return u, v

    @staticmethod
    def _tree_path(basic, row, col):
        """Cells on the tree path from row node `row` to column node `col`."""
        m, k = basic.shape
        # nodes: rows 0..m-1, columns m..m+k-1
        parent = {row: None}
        queue = [row]
        target = m + col
        while queue and target not in parent:
            node = queue.pop(0)
            if node < m:
                nbrs = [m + j for j in np.flatnonzero(basic[node])]
            else:
                nbrs = list(np.flatnonzero(basic[:, node - m]))
            for nb in nbrs:
                if nb not in parent:
                    parent[nb] = node
                    queue.append(nb)
        if target not in parent:
            raise SolverError('entering cell does not close a cycle')
        cells = []
        node = target
        while parent[node] is not None:
            prev = parent[node]
            cells.append((prev, node - m) if prev < m else (node, prev - m))
            node = prev
        cells.reverse()
        return cells

    @staticmethod
    def _tree_flows(basic, supply, demand):
        """Flows of the basic solution for the given marginals (leaf elimination)."""
        m, k = basic.shape
        s, d = supply.astype(float).copy(), demand.astype(float).copy()
        flow = np.zeros((m, k))
        remaining = basic.copy()
        row_deg = remaining.sum(axis=1)
        col_deg = remaining.sum(axis=0)
        leaves = [('r', i) for i in range(m) if row_deg[i] == 1]
        leaves += [('c', j) for j in range(k) if col_deg[j] == 1]
        while leaves:
            side, idx = leaves.pop()
            if side == 'r':
                cols = np.flatnonzero(remaining[idx])
                if len(cols) != 1:
                    continue
                i, j = idx, cols[0]
                flow[i, j] = s[i]
                d[j] -= s[i]
                s[i] = 0.0
            else:
                rows = np.flatnonzero(remaining[:, idx])
                if len(rows) != 1:
                    continue
                i, j = rows[0], idx
                flow[i, j] = d[j]
                s[i] -= d[j]
                d[j] = 0.0
            remaining[i, j] = False
            row_deg[i] -= 1
            col_deg[j] -= 1
            if row_deg[i] == 1:
                leaves.append(('r', i))
            if col_deg[j] == 1:
                leaves.append(('c', j))
        return flow

    def call(self, supply: np.ndarray, demand: np.ndarray, cost: np.ndarray):
        m, k = cost.shape
        if m * k > MAX_CELLS:
            raise InputError(f'{m}x{k} transport problem exceeds {MAX_CELLS} cells')
        eps = self.perturbation * np.arange(1, m + 1)
        supply_p = supply + eps
        demand_p = demand.copy()
        demand_p[-1] += eps.sum()

        flow, basic = self._northwest_corner(supply_p, demand_p)
        scale = max(1.0, float(np.abs(cost).max()))
        tol = self.pivot_tol * scale
        iterations = degenerate = streak = 0
        bland = False
        status = 'optimal'
        while True:
            u, v = self._potentials(cost, basic)
            reduced = cost - u[:, None] - v[None, :]
            reduced[basic] = 0.0
            if bland:
                candidates = np.flatnonzero(reduced.ravel() < -tol)
                if candidates.size == 0:
                    break
                enter = divmod(int(candidates[0]), k)
            else:
                flat = int(np.argmin(reduced))
                if reduced.flat[flat] >= -tol:
                    break
                enter = divmod(flat, k)
            if iterations >= self.max_iter:
                status = 'iteration_limit'
                break
            iterations += 1

            path = self._tree_path(basic, enter[0], enter[1])
            minus = path[0::2]
            plus = path[1::2]
            theta = min(flow[c] for c in minus)
            ties = [c for c in minus if flow[c] <= theta]
            leave = min(ties) if bland else ties[0]
            for c in plus:
                flow[c] += theta
            for c in minus:
                flow[c] -= theta
            flow[enter] += theta
            flow[leave] = 0.0
            basic[leave] = False
            basic[enter] = True

            if theta <= self.perturbation * 1e-3:
                degenerate += 1
                streak += 1
                if not bland and streak > self.bland_after:
                    logger.debug('switching to Bland pricing after %d degenerate pivots', streak)
                    bland = True
            else:
                streak = 0

        if status != 'optimal':
            raise SolverError(f'transport simplex hit max_iter={self.max_iter}')

        flow = self._tree_flows(basic, supply, demand)
        if flow.min() < -1e-15:
            logger.debug('clamping negative flow %.3g after removing perturbation', flow.min())
        flow = np.clip(flow, 0.0, None)
        u, v = self._potentials(cost, basic)
        reduced = cost - u[:, None] - v[None, :]
        min_reduced = float(reduced.min())
        if min_reduced < -self.reduced_cost_tol * scale:
            raise SolverError(f'optimality certificate failed: reduced cost {min_reduced:.3g}')
        stats = SolverStats(iterations=iterations, degenerate_pivots=degenerate,
                            status=status, min_reduced_cost=min_reduced)
        logger.debug('transport simplex finished', extra={
            'iterations': iterations, 'degenerate_pivots': degenerate, 'status': status,
            'shape': (m, k)})
        return flow, (u, v), stats


def check_plan(plan: TransportPlan, tol: float = 1e-10) -> PlanCheck:
    """Marginal check of a coupling: row sums = source weights, column sums = target weights."""
    mass = np.asarray(plan.mass, dtype=float)
    if mass.shape != (plan.source.size, plan.target.size):
        return PlanCheck(False, math.inf, math.inf, float(mass.min(initial=0.0)))
    row_err = float(np.abs(mass.sum(axis=1) - plan.source.weights).max())
    col_err = float(np.abs(mass.sum(axis=0) - plan.target.weights).max())
    min_entry = float(mass.min())
    ok = row_err <= tol and col_err <= tol and min_entry >= -1e-15
    return PlanCheck(ok, row_err, col_err, min_entry)


def solve(mu: DiscreteMeasure, nu: DiscreteMeasure, spec: NormSpec, p: float,
          cfg: Optional[Dict] = None) -> OTResult:
    """Optimal coupling and W_p distance between two discrete measures."""
    cost = cost_matrix(mu, nu, spec, p)
    solver = TransportSimplex(cfg)
    flow, _, stats = solver.call(mu.weights, nu.weights, cost)
    plan = TransportPlan(source=mu, target=nu, mass=flow)
    check = check_plan(plan, solver.marginal_tol)
    if not check.ok:
        raise SolverError(f'plan violates marginals: {check}')
    cost_p = max(0.0, float(np.sum(flow * cost)))
    return OTResult(distance=cost_p ** (1.0 / p), cost_p=cost_p, p=p, plan=plan,
                    solver_stats=stats)


def wasserstein(mu: DiscreteMeasure, nu: DiscreteMeasure, spec: NormSpec, p: float,
                cfg: Optional[Dict] = None) -> float:
    return solve(mu, nu, spec, p, cfg).distance


def _as_counts(weights: np.ndarray, max_denominator: int) -> List[Fraction]:
    fracs = []
    for w in weights:
        f = Fraction(float(w)).limit_denominator(max_denominator)
        if abs(float(f) - w) > 1e-12:
            raise OracleUnavailableError(f'weight {w!r} is not a fraction with denominator '
                                         f'<= {max_denominator}')
        fracs.append(f)
    return fracs


def brute_force_oracle(mu: DiscreteMeasure, nu: DiscreteMeasure, spec: NormSpec, p: float,
                       max_denominator: int = 120, node_budget: int = 2_000_000) -> float:
    """W_p by exhaustive search over assignments of D equal unit atoms.

    Both measures are expanded to D unit atoms (D the common denominator of
    all weights). Assignments of unit atoms that only differ by swapping
    copies of the same point have equal cost, so the search runs over the
    integer couplings they induce, with the running cost as pruning bound.
    """
    cost = cost_matrix(mu, nu, spec, p)
    a = _as_counts(mu.weights, max_denominator)
    b = _as_counts(nu.weights, max_denominator)
    denom = reduce(math.lcm, (f.denominator for f in a + b), 1)
    if denom > max_denominator:
        raise OracleUnavailableError(f'common denominator {denom} exceeds {max_denominator}')
    rows = [int(f * denom) for f in a]
    cols = [int(f * denom) for f in b]
    m, k = cost.shape
    best = [math.inf]
    nodes = [0]

    def visit(i, j, row_left, cols_left, acc):
        nodes[0] += 1
        if nodes[0] > node_budget:
            raise OracleUnavailableError(f'enumeration exceeded {node_budget} nodes')
        if acc >= best[0]:
            return
        if i == m:
            best[0] = acc
            return
        if j == k - 1:
            n = row_left
            if n > cols_left[j]:
                return
            cols_left[j] -= n
            nxt = rows[i + 1] if i + 1 < m else 0
            visit(i + 1, 0, nxt, cols_left, acc + n * cost[i, j])
            cols_left[j] += n
            return
        for n in range(min(row_left, cols_left[j]), -1, -1):
            cols_left[j] -= n
            visit(i, j + 1, row_left - n, cols_left, acc + n * cost[i, j])
            cols_left[j] += n

    visit(0, 0, rows[0], list(cols), 0.0)
    if not math.isfinite(best[0]):
        raise OracleUnavailableError('no integer coupling found')
    return (max(best[0], 0.0) / denom) ** (1.0 / p)


def cyclical_monotonicity_check(pairs: Sequence[Tuple[np.ndarray, np.ndarray]], spec: NormSpec,
                                p: float, max_cycle: int = 4,
                                tol: float = 1e-10) -> MonotonicityReport:
    """Search for a cycle x_i -> y_{i+1} that lowers sum c(x_i, y_i), c = N^p."""
    if max_cycle > 6:
        raise DomainError(f'max_cycle must be <= 6, got {max_cycle}')
    if len(pairs) < 2:
        return MonotonicityReport(True, None, 0.0)
    xs = np.array([np.asarray(x, float) for x, _ in pairs])
    ys = np.array([np.asarray(y, float) for _, y in pairs])
    c = spec.value(xs[:, None, :] - ys[None, :, :]) ** p
    worst = (0.0, None)
    for length in range(2, min(max_cycle, len(pairs)) + 1):
        for subset in itertools.combinations(range(len(pairs)), length):
            head, rest = subset[0], subset[1:]
            for order in itertools.permutations(rest):
                cyc = (head,) + order
                base = sum(c[i, i] for i in cyc)
                shifted = sum(c[cyc[t], cyc[(t + 1) % length]] for t in range(length))
                gain = shifted - base
                if gain < -tol * (1 + abs(base)) and gain < worst[0]:
                    worst = (gain, cyc)
    return MonotonicityReport(worst[1] is None, worst[1], float(worst[0]))


def plan_support_pairs(plan: TransportPlan, threshold: float = 1e-12):
    rows, cols = np.nonzero(plan.mass > threshold)
    return [(plan.source.points[i], plan.target.points[j]) for i, j in zip(rows, cols)]


def plan_to_csv_rows(plan: TransportPlan, spec: NormSpec, p: float, threshold: float = 0.0):
    """Rows (i, j, mass, cost_ij) for the nonzero cells of a plan."""
    cost = cost_matrix(plan.source, plan.target, spec, p)
    rows, cols = np.nonzero(plan.mass > threshold)
    return [(int(i), int(j), float(plan.mass[i, j]), float(cost[i, j])) for i, j in zip(rows, cols)]
