"""Perceptron feasibility solver, its margin, and the classic update bound.

The margin nu of points a_1..a_n is the best worst-case normalized inner
product over feasible directions. For strictly feasible instances it equals
the distance from the origin to the convex hull of the normalized points,
computed here by Wolfe's minimum-norm-point algorithm; when the origin lies
in or on that hull the instance is infeasible and nu is reported as 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleMarginError, InvalidInputError, OutOfRegimeError

HULL_TOL = 1e-8          # origin within this of the hull -> margin 0
MNP_GAP_TOL = 1e-12      # Wolfe duality-gap termination


@dataclass(frozen=True)
class PerceptronInstance:
    points: np.ndarray   # (n, d), all rows nonzero

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=float))
        if p.ndim != 2 or p.shape[0] < 1 or not np.all(np.isfinite(p)):
            raise InvalidInputError("points must be a finite n x d array")
        if np.any(np.linalg.norm(p, axis=1) == 0.0):
            raise InvalidInputError("all points must be nonzero")
        object.__setattr__(self, "points", p)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def normalized(self) -> np.ndarray:
        return self.points / np.linalg.norm(self.points, axis=1, keepdims=True)


@dataclass(frozen=True)
class PerceptronRun:
    iterations: int
    final_x: np.ndarray | None
    status: str   # "solved" | "iteration_cap_reached"


def parse_instance(text: str) -> PerceptronInstance:
    """Plain-text instance: first line "n d", then n lines of d scalars."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidInputError("empty instance file")
    try:
        n, d = (int(tok) for tok in lines[0].split())
        rows = [list(map(float, lines[1 + i].split())) for i in range(n)]
    except (ValueError, IndexError) as exc:
        raise InvalidInputError(f"malformed instance file: {exc}") from exc
    if any(len(r) != d for r in rows):
        raise InvalidInputError("malformed instance file: wrong field counts")
    return PerceptronInstance(np.asarray(rows, dtype=float))


def min_norm_point(points: np.ndarray, max_iter: int = 10000) -> np.ndarray:
    """Wolfe's algorithm for the minimum-norm point in a convex hull.

    Major cycle adds the point most opposed to the current iterate; minor
    cycle restores the iterate to the relative interior of its active-set
    simplex via the affine minimizer. Terminates on the Wolfe criterion
    u.p_j >= ||u||^2 - gap for all j.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    i0 = int(np.argmin(np.einsum("ij,ij->i", p, p)))
    active = [i0]
    lam = np.array([1.0])
    u = p[i0].copy()
    for _ in range(max_iter):
        scores = p @ u
        j = int(np.argmin(scores))
        uu = float(u @ u)
        if scores[j] >= uu - max(MNP_GAP_TOL, 1e-12 * uu) or uu == 0.0:
            break
        if j in active:
            break
        active.append(j)
        lam = np.append(lam, 0.0)
        for _ in range(max_iter):
            q = p[active]
            m = len(active)
            # affine minimizer: (Q Q^T) alpha + mu 1 = 0, sum alpha = 1
            kkt = np.zeros((m + 1, m + 1))
            kkt[:m, :m] = q @ q.T
            kkt[:m, m] = 1.0
            kkt[m, :m] = 1.0
            rhs = np.zeros(m + 1)
            rhs[m] = 1.0
            alpha = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:m]
            if np.all(alpha > 1e-12):
                lam = alpha
                u = q.T @ alpha
                break
            # step toward alpha as far as the simplex allows, drop zeros
            shrink = lam - alpha
            mask = shrink > 1e-15
            theta = float(np.min(lam[mask] / shrink[mask]))
            theta = min(max(theta, 0.0), 1.0)
            lam = (1.0 - theta) * lam + theta * alpha
            keep = lam > 1e-12
            if not np.any(keep):
                keep[int(np.argmax(lam))] = True
            active = [a for a, k in zip(active, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            u = p[active].T @ lam
    return u


def wiggle_room(inst: PerceptronInstance) -> float:
    """Margin nu: distance from the origin to the hull of normalized points.

    Returns 0.0 when the origin lies in (or within HULL_TOL of) the hull,
    i.e. when no strictly feasible direction exists.
    """
    u = min_norm_point(inst.normalized())
    nu = float(np.linalg.norm(u))
    return 0.0 if nu <= HULL_TOL else nu


def wiggle_room_grid(inst: PerceptronInstance, directions: int = 100000) -> float:
    """Independent d=2 oracle: dense sweep of unit directions."""
    if inst.d != 2:
        raise InvalidInputError("grid oracle is for d = 2 only")
    angles = 2.0 * math.pi * np.arange(directions) / directions
    xs = np.column_stack([np.cos(angles), np.sin(angles)])
    margins = (inst.normalized() @ xs.T).min(axis=0)
    return float(margins.max())


def run_perceptron(inst: PerceptronInstance, iteration_cap: int,
                   rule: str = "lowest_index") -> PerceptronRun:
    """The update loop: start at 0, add a normalized violated point until
    strictly feasible or the cap is reached.

    rule selects which violated point to add: "lowest_index" (default) or
    "most_violated" (smallest normalized inner product).
    """
    if iteration_cap < 1:
        raise InvalidInputError("iteration_cap must be at least 1")
    if rule not in ("lowest_index", "most_violated"):
        raise InvalidInputError(f"unknown selection rule: {rule}")
    norm_pts = inst.normalized()
    x = np.zeros(inst.d)
    for it in range(iteration_cap + 1):
        margins = inst.points @ x
        violated = np.flatnonzero(margins <= 0.0)
        if violated.size == 0:
            return PerceptronRun(iterations=it, final_x=x, status="solved")
        if it == iteration_cap:
            break
        if rule == "lowest_index":
            pick = int(violated[0])
        else:
            pick = int(violated[np.argmin((norm_pts @ x)[violated])])
        x = x + norm_pts[pick]
    return PerceptronRun(iterations=iteration_cap, final_x=None,
                         status="iteration_cap_reached")


def iteration_bound(nu: float) -> int:
    """Worst-case update count ceil(1/nu^2) for margin nu > 0."""
    if not (nu > 0):
        raise InfeasibleMarginError("iteration bound requires a positive margin")
    # tolerate float noise so e.g. nu = 1/sqrt(2) gives exactly 2
    return math.ceil(1.0 / nu ** 2 - 1e-9)


def blum_dunagan_tail(n: int, d: int, sigma: float, t: float) -> float:
    """Literal margin tail bound (n d^1.5 / (sigma t)) * log(sigma t / d^1.5).

    Valid only for sigma^2 strictly below 1/(2d). The value is returned
    unclamped; reports clamp to [0, 1] and flag nonpositive-log points as
    vacuous rather than guessing an intended form.
    """
    if n < 1 or d < 1:
        raise InvalidInputError("n and d must be at least 1")
    if not (t > 0):
        raise InvalidInputError("t must be positive")
    sigma = float(sigma)
    if not (0 < sigma ** 2 < 1.0 / (2.0 * d)):
        raise OutOfRegimeError("bound requires sigma^2 < 1/(2d)")
    ratio = sigma * t / d ** 1.5
    return (n * d ** 1.5 / (sigma * t)) * math.log(ratio)
