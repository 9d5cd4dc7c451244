"""Shadow-vertex simplex: a parametric-objective pivot walk.

Phase II sweeps the objective q(lambda) = (1 - lambda) t + lambda z from a
start objective t (for which the start vertex is optimal) to the true
objective z. At each vertex the multipliers mu(lambda) = A_B^{-T} q(lambda)
are affine in lambda; the walk advances lambda until some multiplier hits
zero, drops that constraint, and takes a ratio-test pivot along the freed
edge. The visited vertices are exactly the preimages of consecutive shadow
polygon vertices on span(t, z).

Phase I is deliberately not the randomized construction the theory analyzes:
it is a brute-force scan for the first feasible basis in canonical order,
with t = sum of that basis's constraint normals (which certifies optimality
of the start vertex for t). Reported step counts are Phase II pivots only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InvalidStartError, PhaseOneError, SizeLimitError
from .polytope import (
    FEAS_TOL,
    LinearProgram,
    PolytopeVertex,
    _check_budget,
    is_feasible,
    recession_directions,
)

PIVOT_TIE_TOL = 1e-9


@dataclass
class PivotTrace:
    visited: list                 # PolytopeVertex sequence
    pivot_count: int
    outcome: str                  # "optimal" | "unbounded" | "phase1_failed"
    lambda_breakpoints: list = field(default_factory=list)
    degenerate: bool = False      # a pivot tie was broken lexicographically
    ray: np.ndarray | None = None

    def to_json_dict(self) -> dict:
        return {
            "status": self.outcome,
            "pivot_count": self.pivot_count,
            "lambda_breakpoints": [float(v) for v in self.lambda_breakpoints],
            "visited_tight_sets": [list(v.tight_set) for v in self.visited],
        }


def _verify_start(lp: LinearProgram, start: PolytopeVertex, t: np.ndarray) -> np.ndarray:
    idx = list(start.tight_set)
    if len(set(idx)) != lp.d or min(idx) < 0 or max(idx) >= lp.n:
        raise InvalidStartError("tight set must be d distinct constraint indices")
    sub = lp.A[idx]
    s = np.linalg.svd(sub, compute_uv=False)
    if s[-1] < 1e-12 * max(1.0, s[0]):
        raise InvalidStartError("tight-set rows are linearly dependent")
    x = np.asarray(start.point, dtype=float)
    if np.max(np.abs(sub @ x - lp.b[idx])) > 1e-7:
        raise InvalidStartError("tight constraints are not tight at the start point")
    if np.max(lp.A @ x - lp.b) > 1e-7:
        raise InvalidStartError("start point is infeasible")
    mu_t = np.linalg.solve(sub.T, t)
    if np.min(mu_t) < -1e-7:
        raise InvalidStartError("start vertex is not optimal for the start objective")
    return mu_t


def shadow_pivot_walk(lp: LinearProgram, start: PolytopeVertex, start_objective) -> PivotTrace:
    """Walk from the t-optimal vertex to the z-optimal one (or a ray)."""
    t = np.asarray(start_objective, dtype=float).ravel()
    z = lp.z
    _verify_start(lp, start, t)

    basis = sorted(start.tight_set)
    x = np.asarray(start.point, dtype=float).copy()
    lam = 0.0
    trace = PivotTrace(visited=[PolytopeVertex(point=x.copy(), tight_set=tuple(basis))],
                       pivot_count=0, outcome="optimal")
    max_pivots = math.comb(lp.n, lp.d) + 1

    for _ in range(max_pivots):
        sub = lp.A[basis]
        mu_t = np.linalg.solve(sub.T, t)
        mu_z = np.linalg.solve(sub.T, z)
        if np.min(mu_z) >= -PIVOT_TIE_TOL:
            trace.outcome = "optimal"
            return trace
        # lambda at which each decreasing multiplier reaches zero
        slope = mu_z - mu_t
        roots = np.full(lp.d, math.inf)
        dec = slope < -1e-15
        roots[dec] = mu_t[dec] / (mu_t[dec] - mu_z[dec])
        lam_star = float(np.min(roots))
        if lam_star > 1.0:
            trace.outcome = "optimal"
            return trace
        lam_star = min(max(lam_star, lam), 1.0)
        leaving_ties = [p for p in range(lp.d)
                        if roots[p] <= lam_star + PIVOT_TIE_TOL]
        if len(leaving_ties) > 1:
            trace.degenerate = True
        r_pos = min(leaving_ties, key=lambda p: basis[p])

        # edge direction keeping the other d-1 constraints tight
        e = np.zeros(lp.d)
        e[r_pos] = -1.0
        w = np.linalg.solve(sub, e)

        slack = lp.b - lp.A @ x
        advance = lp.A @ w
        candidates = []
        for j in range(lp.n):
            if j in basis or advance[j] <= 1e-11:
                continue
            candidates.append((max(slack[j], 0.0) / advance[j], j))
        if not candidates:
            trace.outcome = "unbounded"
            trace.ray = w
            trace.lambda_breakpoints.append(lam_star)
            return trace
        theta = min(step for step, _ in candidates)
        entering_ties = [j for step, j in candidates if step <= theta + PIVOT_TIE_TOL]
        if len(entering_ties) > 1:
            trace.degenerate = True
        j = min(entering_ties)

        x = x + theta * w
        basis[r_pos] = j
        basis = sorted(basis)
        lam = lam_star
        trace.lambda_breakpoints.append(lam_star)
        trace.visited.append(PolytopeVertex(point=x.copy(), tight_set=tuple(basis)))
        trace.pivot_count += 1

    raise RuntimeError("pivot walk failed to terminate within the basis budget")


def find_initial_vertex(lp: LinearProgram, seed=None):
    """First feasible basis in canonical order, plus a certifying objective.

    Returns (vertex, t) with t = sum of the tight-set normals (so the vertex
    is optimal for t with multipliers all 1), or None when the polytope is
    infeasible. A feasible polytope with no basic solution raises
    PhaseOneError. The seed is accepted for interface symmetry; this Phase I
    is deterministic.
    """
    n, d = lp.n, lp.d
    _check_budget(n, d)
    if n >= d:
        for idx in combinations(range(n), d):
            sub = lp.A[list(idx)]
            s = np.linalg.svd(sub, compute_uv=False)
            if s[-1] < 1e-12 * max(1.0, s[0]):
                continue
            x = np.linalg.solve(sub, lp.b[list(idx)])
            if np.all(lp.A @ x - lp.b <= FEAS_TOL):
                t = sub.sum(axis=0)
                return PolytopeVertex(point=x, tight_set=tuple(idx)), t
    if is_feasible(lp):
        raise PhaseOneError("feasible polytope has no basic feasible solution")
    return None


@dataclass(frozen=True)
class SolveResult:
    status: str               # "optimal" | "unbounded" | "infeasible" | "phase1_failed"
    trace: PivotTrace
    start_objective: np.ndarray | None = None

    @property
    def vertex(self):
        return self.trace.visited[-1] if self.trace.visited else None

    def objective_value(self, lp: LinearProgram) -> float | None:
        v = self.vertex
        return None if v is None else v.objective_value(lp.z)


def solve(lp: LinearProgram, seed=None) -> SolveResult:
    """Two-phase driver: canonical-scan Phase I, shadow pivot walk Phase II."""
    try:
        found = find_initial_vertex(lp, seed)
    except PhaseOneError:
        # feasible but no basic solution: still detect an improving ray
        dirs = recession_directions(lp.A)
        if len(dirs) and float(np.max(dirs @ lp.z)) > 1e-9:
            k = int(np.argmax(dirs @ lp.z))
            return SolveResult("unbounded",
                               PivotTrace(visited=[], pivot_count=0,
                                          outcome="unbounded", ray=dirs[k]))
        return SolveResult("phase1_failed",
                           PivotTrace(visited=[], pivot_count=0, outcome="phase1_failed"))
    except SizeLimitError:
        raise
    if found is None:
        return SolveResult("infeasible",
                           PivotTrace(visited=[], pivot_count=0, outcome="phase1_failed"))
    start, t = found
    trace = shadow_pivot_walk(lp, start, t)
    return SolveResult(trace.outcome, trace, start_objective=t)
