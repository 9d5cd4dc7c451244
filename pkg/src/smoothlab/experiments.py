"""Monte Carlo experiment harness.

Each experiment kind follows the same shape: a validated ExperimentConfig,
one independent seed stream per trial (so parallel and serial runs agree
bit for bit), a list of JSON-friendly per-trial records, and a pure
aggregation step turning those records into report rows. The aggregation
functions double as the replay verifier: re-running them on the per-trial
records stored in a report must reproduce the report rows exactly.
"""

from __future__ import annotations

import math
import statistics
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from .errors import ConfigError, InvalidInputError, OutOfRegimeError, SizeLimitError
from .numkit import inverse_norm
from .perceptron import (
    PerceptronInstance,
    blum_dunagan_tail,
    iteration_bound,
    parse_instance,
    run_perceptron,
    wiggle_room,
)
from .perturb import (
    RegimeWarning,
    SeedSpec,
    gaussian_matrix,
    gaussian_points,
    rademacher_matrix,
    regime_notes,
    smoothed_input,
    variance_regime_limit,
)
from .polytope import (
    LinearProgram,
    brute_force_optimum,
    parse_lp,
    shadow_polygon,
    shadow_size_bound,
)
from .errors import UnboundedShadowError
from .simplex import solve

EXPERIMENT_KINDS = (
    "matrix_tail",
    "rademacher_tail",
    "shadow_size",
    "simplex_pivots",
    "perceptron_tail",
    "submatrix_lemma",
    "smoothed_profile",
)

SUBMATRIX_BUDGET = 100_000
PROFILE_ITERATION_CAP = 100_000


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: int = 0
    d: int = 0
    sigma_grid: tuple = ()
    thresholds: tuple = ()
    trials: int = 1
    master_seed: int = 0
    center_source: str = "zero"    # zero | ones | box | stretched | a file path
    exhaustive: bool = False       # rademacher_tail: enumerate all sign matrices
    rule: str = "lowest_index"     # perceptron selection rule
    measure: str = "simplex_pivots"  # smoothed_profile measure
    output_path: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "sigma_grid", tuple(float(s) for s in self.sigma_grid))
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))

    def echo(self) -> dict:
        # the output location is delivery detail, not an experiment parameter;
        # leaving it out keeps reports byte-identical across destinations
        d = asdict(self)
        d.pop("output_path")
        return d


@dataclass
class Report:
    schema: str
    config: dict
    columns: list
    rows: list
    warnings: list = field(default_factory=list)
    per_trial: list | None = None


def config_from_echo(d: dict) -> ExperimentConfig:
    d = dict(d)
    d["sigma_grid"] = tuple(d.get("sigma_grid", ()))
    d["thresholds"] = tuple(d.get("thresholds", ()))
    d.pop("jobs", None)
    return ExperimentConfig(**d)


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"unknown experiment kind: {cfg.kind}")
    if cfg.trials < 1:
        raise ConfigError("trials must be at least 1")
    if cfg.master_seed < 0 or cfg.master_seed >= 2 ** 64:
        raise ConfigError("master_seed must be a 64-bit unsigned integer")
    tail_kinds = ("matrix_tail", "rademacher_tail", "perceptron_tail")
    if cfg.kind in tail_kinds and not cfg.thresholds:
        raise ConfigError(f"{cfg.kind} requires at least one threshold")
    if any(t <= 0 for t in cfg.thresholds):
        raise ConfigError("thresholds must be positive")
    sigma_kinds = ("matrix_tail", "shadow_size", "simplex_pivots",
                   "perceptron_tail", "submatrix_lemma", "smoothed_profile")
    if cfg.kind in sigma_kinds:
        if not cfg.sigma_grid:
            raise ConfigError(f"{cfg.kind} requires a sigma grid")
        if cfg.kind != "smoothed_profile" and any(s <= 0 for s in cfg.sigma_grid):
            raise ConfigError("sigma values must be positive")
        if any(s < 0 or not math.isfinite(s) for s in cfg.sigma_grid):
            raise ConfigError("sigma values must be finite and nonnegative")
    if cfg.kind != "rademacher_tail" or not cfg.exhaustive:
        if cfg.d < 1:
            raise ConfigError("d must be at least 1")
    needs_n = ("shadow_size", "simplex_pivots", "perceptron_tail", "submatrix_lemma")
    if cfg.kind in needs_n and cfg.n < 1:
        raise ConfigError("n must be at least 1")


# ---------------------------------------------------------------------------
# centers

def center_matrix(cfg: ExperimentConfig) -> np.ndarray:
    """d x d center for matrix-tail experiments."""
    if cfg.center_source == "zero":
        return np.zeros((cfg.d, cfg.d))
    if cfg.center_source == "ones":
        return np.ones((cfg.d, cfg.d))
    try:
        m = np.loadtxt(cfg.center_source, ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read center file: {exc}") from exc
    if m.shape != (cfg.d, cfg.d):
        raise ConfigError(f"center file has shape {m.shape}, expected ({cfg.d}, {cfg.d})")
    return m


def point_centers(cfg: ExperimentConfig) -> np.ndarray:
    """n x d row centers for point-perturbation experiments.

    "zero" is the origin for every row; "ones" the unit-normalized all-ones
    vector; "box" cycles through +-e_k (a cross-polytope of constraint
    normals); "stretched" is the box with axis k shrunk geometrically, a
    mildly adversarial elongated polytope. Anything else is a file in the
    perceptron instance format.
    """
    n, d = cfg.n, cfg.d
    src = cfg.center_source
    if src == "zero":
        return np.zeros((n, d))
    if src == "ones":
        return np.tile(np.ones(d) / math.sqrt(d), (n, 1))
    if src in ("box", "stretched"):
        rows = np.zeros((n, d))
        for i in range(n):
            k = i % d
            sign = 1.0 if (i // d) % 2 == 0 else -1.0
            scale = 5.0 ** (-k) if src == "stretched" else 1.0
            rows[i, k] = sign * scale
        return rows
    try:
        inst = parse_instance(open(src, encoding="utf-8").read())
    except OSError as exc:
        raise ConfigError(f"cannot read center file: {exc}") from exc
    if inst.points.shape != (n, d):
        raise ConfigError(
            f"center file has shape {inst.points.shape}, expected ({n}, {d})")
    return inst.points


# ---------------------------------------------------------------------------
# trial workers (top-level so process pools can pickle them)

def _streams(sigma_index: int, trials: int, trial: int) -> int:
    return sigma_index * trials + trial


def _trial_matrix_tail(args):
    cfg, center, sigma, stream = args
    m = gaussian_matrix(center, sigma, SeedSpec(cfg.master_seed, stream))
    return inverse_norm(m)


def _trial_rademacher(args):
    cfg, stream = args
    m = rademacher_matrix(cfg.d, SeedSpec(cfg.master_seed, stream))
    return inverse_norm(m)


def _trial_shadow_size(args):
    cfg, centers, sigma, stream = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        pts = gaussian_points(centers, sigma, SeedSpec(cfg.master_seed, 2 * stream))
    plane_rng = SeedSpec(cfg.master_seed, 2 * stream + 1).rng()
    t = plane_rng.standard_normal(cfg.d)
    z = plane_rng.standard_normal(cfg.d)
    try:
        poly = shadow_polygon(pts, t, z)
    except UnboundedShadowError:
        return "unbounded"
    return int(poly.vertex_count)


def _trial_simplex_pivots(args):
    cfg, centers, sigma, stream = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = gaussian_points(centers, sigma, SeedSpec(cfg.master_seed, 2 * stream))
        z = SeedSpec(cfg.master_seed, 2 * stream + 1).rng().standard_normal(cfg.d)
        z = z / np.linalg.norm(z)
        lp = LinearProgram(rows, np.ones(cfg.n), z)
        result = solve(lp)
        oracle = brute_force_optimum(lp)
        agree = result.status == oracle.status
        gap = None
        if agree and result.status == "optimal":
            gap = abs(result.objective_value(lp) - oracle.value)
            agree = gap <= 1e-6
        rec = {
            "status": result.status,
            "oracle_status": oracle.status,
            "agree": bool(agree),
            "pivots": result.trace.pivot_count,
            "hull_count": None,
            "within_hull": None,
        }
        if result.status == "optimal" and result.start_objective is not None:
            try:
                poly = shadow_polygon(rows, result.start_objective, z)
            except (UnboundedShadowError, InvalidInputError):
                poly = None
            if poly is not None:
                rec["hull_count"] = int(poly.vertex_count)
                rec["within_hull"] = bool(result.trace.pivot_count <= poly.vertex_count)
    return rec


def _trial_perceptron_tail(args):
    cfg, centers, sigma, stream = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        pts = gaussian_points(centers, sigma, SeedSpec(cfg.master_seed, stream))
    inst = PerceptronInstance(pts)
    nu = wiggle_room(inst)
    if nu <= 0.0:
        return {"nu": 0.0, "feasible": False, "iterations": None,
                "bound": None, "within": None}
    bound = iteration_bound(nu)
    run = run_perceptron(inst, iteration_cap=bound, rule=cfg.rule)
    return {"nu": nu, "feasible": True, "iterations": run.iterations,
            "bound": bound, "within": bool(run.status == "solved")}


def _trial_submatrix(args):
    cfg, centers, sigma, stream = args
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        pts = gaussian_points(centers, sigma, SeedSpec(cfg.master_seed, stream))
    tau = sigma ** 2 / (8.0 * cfg.d ** 1.5 * cfg.n ** 7)
    total = 0
    for idx in combinations(range(cfg.n), cfg.d):
        sub = pts[list(idx)].T   # columns a_i, i in I
        if inverse_norm(sub) >= tau:
            total += 1
    return int(total)


def _trial_profile(args):
    cfg, center_data, sigma, stream = args
    flat = np.asarray(center_data["flat"], dtype=float)
    shape = tuple(center_data["shape"])
    pert = smoothed_input(flat, sigma, SeedSpec(cfg.master_seed, stream)).reshape(shape)
    if cfg.measure == "simplex_pivots":
        n, d = shape
        z = np.ones(d) / math.sqrt(d)
        lp = LinearProgram(pert, np.ones(n), z)
        result = solve(lp)
        return {"measure": result.trace.pivot_count, "status": result.status}
    # perceptron_iterations
    norms = np.linalg.norm(pert, axis=1)
    if np.any(norms == 0.0):
        return {"measure": 0, "status": "degenerate_zero_row"}
    inst = PerceptronInstance(pert)
    run = run_perceptron(inst, iteration_cap=PROFILE_ITERATION_CAP, rule=cfg.rule)
    return {"measure": run.iterations, "status": run.status}


def _map_trials(worker, argslist, jobs: int):
    if jobs <= 1 or len(argslist) <= 1:
        return [worker(a) for a in argslist]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunk = max(1, len(argslist) // (4 * jobs))
        return list(pool.map(worker, argslist, chunksize=chunk))


# ---------------------------------------------------------------------------
# aggregation (pure functions of config + per-trial records)

def _frac(count: int, total: int) -> float:
    return count / total if total else 0.0

def _stderr(p: float, trials: int) -> float:
    return math.sqrt(p * (1.0 - p) / trials) if trials else 0.0


def aggregate_matrix_tail(cfg: ExperimentConfig, per_trial: list) -> list:
    rows = []
    sd = math.sqrt(cfg.d)
    for block in per_trial:
        sigma = float(block["sigma"])
        values = [float(v) for v in block["values"]]
        trials = len(values)
        edelman_applicable = cfg.center_source == "zero" and sigma == 1.0
        for t in cfg.thresholds:
            p = _frac(sum(1 for v in values if v > t), trials)
            rows.append({
                "sigma": sigma,
                "threshold": t,
                "empirical": p,
                "stderr": _stderr(p, trials),
                "bound_edelman": sd / t if edelman_applicable else None,
                "bound_sst": 1.823 * sd / (t * sigma),
                "bound_thm43": cfg.d ** 1.5 / (t * sigma),
                "bound_conj1": sd / (t * sigma),
            })
    return rows


def aggregate_rademacher_tail(cfg: ExperimentConfig, per_trial: list) -> list:
    values = [float(v) for v in per_trial[0]["values"]]
    trials = len(values)
    singular = sum(1 for v in values if math.isinf(v))
    sfreq = _frac(singular, trials)
    rows = []
    for t in cfg.thresholds:
        p = _frac(sum(1 for v in values if v > t), trials)
        rows.append({
            "threshold": t,
            "empirical": p,
            "stderr": _stderr(p, trials),
            "bound_conjecture2": math.sqrt(cfg.d) / t,
            "bound_status": "conjectural",
            "singularity_freq": sfreq,
        })
    return rows


def aggregate_shadow_size(cfg: ExperimentConfig, per_trial: list) -> list:
    rows = []
    for block in per_trial:
        sigma = float(block["sigma"])
        counts = block["counts"]
        bounded = [int(c) for c in counts if c != "unbounded"]
        rows.append({
            "sigma": sigma,
            "trials": len(counts),
            "bounded_trials": len(bounded),
            "unbounded_trials": len(counts) - len(bounded),
            "mean_vertices": sum(bounded) / len(bounded) if bounded else None,
            "max_vertices": max(bounded) if bounded else None,
            "bound_expected_vertices": shadow_size_bound(cfg.n, cfg.d, sigma),
        })
    return rows


def aggregate_simplex_pivots(cfg: ExperimentConfig, per_trial: list) -> list:
    rows = []
    for block in per_trial:
        sigma = float(block["sigma"])
        recs = block["records"]
        pivots = [r["pivots"] for r in recs if r["status"] in ("optimal", "unbounded")]
        agrees = sum(1 for r in recs if r["agree"])
        checked = [r for r in recs if r["within_hull"] is not None]
        rows.append({
            "sigma": sigma,
            "trials": len(recs),
            "mean_pivots": sum(pivots) / len(pivots) if pivots else None,
            "median_pivots": statistics.median(pivots) if pivots else None,
            "max_pivots": max(pivots) if pivots else None,
            "oracle_match_frac": _frac(agrees, len(recs)),
            "hull_checked": len(checked),
            "hull_bound_violations": sum(1 for r in checked if not r["within_hull"]),
        })
    return rows


def aggregate_perceptron_tail(cfg: ExperimentConfig, per_trial: list) -> list:
    rows = []
    for block in per_trial:
        sigma = float(block["sigma"])
        recs = block["records"]
        feas = [r for r in recs if r["feasible"]]
        infeasible_freq = _frac(len(recs) - len(feas), len(recs))
        violations = sum(1 for r in feas if not r["within"])
        for t in cfg.thresholds:
            exceed = sum(1 for r in feas if r["nu"] > 0 and 1.0 / r["nu"] > t)
            p = _frac(exceed, len(feas))
            raw = blum_dunagan_tail(cfg.n, cfg.d, sigma, t)
            clamped = min(max(raw, 0.0), 1.0)
            vacuous = raw <= 0.0 or raw >= 1.0
            rows.append({
                "sigma": sigma,
                "threshold": t,
                "empirical": p,
                "stderr": _stderr(p, len(feas)),
                "bound_blum_dunagan": clamped,
                "bound_raw": raw,
                "vacuous": vacuous,
                "infeasible_freq": infeasible_freq,
                "feasible_trials": len(feas),
                "iteration_bound_violations": violations,
            })
    return rows


def aggregate_submatrix(cfg: ExperimentConfig, per_trial: list) -> list:
    rows = []
    n, d = cfg.n, cfg.d
    rhs = math.ceil((n - d - 1) / 2) * math.comb(n, d - 1)
    prob_bound = 1.0 - n ** (-d) - n ** (-n + d - 1) - n ** (-2.9 * d + 1)
    for block in per_trial:
        sigma = float(block["sigma"])
        sums = [int(s) for s in block["sums"]]
        events = sum(1 for s in sums if d / 2 * s < rhs)
        rows.append({
            "sigma": sigma,
            "trials": len(sums),
            "indicator_threshold": sigma ** 2 / (8.0 * d ** 1.5 * n ** 7),
            "mean_indicator_sum": sum(sums) / len(sums),
            "lhs_mean": d / 2 * (sum(sums) / len(sums)),
            "rhs": rhs,
            "event_freq": _frac(events, len(sums)),
            "stated_probability_bound": prob_bound,
        })
    return rows


def aggregate_profile(cfg: ExperimentConfig, per_trial: list) -> list:
    rows = []
    by_sigma = {}
    for block in per_trial:
        sigma = float(block["sigma"])
        measures = [float(r["measure"]) for r in block["records"]]
        mean = sum(measures) / len(measures)
        if len(measures) > 1:
            var = sum((m - mean) ** 2 for m in measures) / (len(measures) - 1)
            halfwidth = 1.96 * math.sqrt(var / len(measures))
        else:
            halfwidth = 0.0
        rows.append({
            "center_id": block["center_id"],
            "sigma": sigma,
            "mean_measure": mean,
            "confidence_halfwidth": halfwidth,
            "is_smoothed_estimate": False,
        })
        by_sigma.setdefault(sigma, []).append(mean)
    for sigma in sorted(by_sigma):
        rows.append({
            "center_id": "max_over_centers",
            "sigma": sigma,
            "mean_measure": max(by_sigma[sigma]),
            "confidence_halfwidth": None,
            "is_smoothed_estimate": True,
        })
    return rows


AGGREGATORS = {
    "matrix_tail": aggregate_matrix_tail,
    "rademacher_tail": aggregate_rademacher_tail,
    "shadow_size": aggregate_shadow_size,
    "simplex_pivots": aggregate_simplex_pivots,
    "perceptron_tail": aggregate_perceptron_tail,
    "submatrix_lemma": aggregate_submatrix,
    "smoothed_profile": aggregate_profile,
}

COLUMNS = {
    "matrix_tail": ["sigma", "threshold", "empirical", "stderr",
                    "bound_edelman", "bound_sst", "bound_thm43", "bound_conj1"],
    "rademacher_tail": ["threshold", "empirical", "stderr",
                        "bound_conjecture2", "bound_status", "singularity_freq"],
    "shadow_size": ["sigma", "trials", "bounded_trials", "unbounded_trials",
                    "mean_vertices", "max_vertices", "bound_expected_vertices"],
    "simplex_pivots": ["sigma", "trials", "mean_pivots", "median_pivots",
                       "max_pivots", "oracle_match_frac", "hull_checked",
                       "hull_bound_violations"],
    "perceptron_tail": ["sigma", "threshold", "empirical", "stderr",
                        "bound_blum_dunagan", "bound_raw", "vacuous",
                        "infeasible_freq", "feasible_trials",
                        "iteration_bound_violations"],
    "submatrix_lemma": ["sigma", "trials", "indicator_threshold",
                        "mean_indicator_sum", "lhs_mean", "rhs", "event_freq",
                        "stated_probability_bound"],
    "smoothed_profile": ["center_id", "sigma", "mean_measure",
                         "confidence_halfwidth", "is_smoothed_estimate"],
}

SCHEMA_VERSION = "v1"


def _schema(kind: str) -> str:
    return f"{kind}.{SCHEMA_VERSION}"


# ---------------------------------------------------------------------------
# runners

def run_matrix_tail(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    _validate(cfg)
    center = center_matrix(cfg)
    per_trial = []
    for si, sigma in enumerate(cfg.sigma_grid):
        args = [(cfg, center, sigma, _streams(si, cfg.trials, i))
                for i in range(cfg.trials)]
        per_trial.append({"sigma": sigma,
                          "values": _map_trials(_trial_matrix_tail, args, jobs)})
    notes = []
    if any(s != 1.0 for s in cfg.sigma_grid) or cfg.center_source != "zero":
        notes.append("bound_edelman applies only to zero center with sigma = 1")
    return Report(schema=_schema(cfg.kind), config=cfg.echo(),
                  columns=COLUMNS[cfg.kind],
                  rows=aggregate_matrix_tail(cfg, per_trial),
                  warnings=notes, per_trial=per_trial)


def run_rademacher_tail(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    _validate(cfg)
    if cfg.exhaustive:
        if cfg.d * cfg.d > 20:
            raise SizeLimitError("exhaustive enumeration limited to d*d <= 20")
        values = []
        cells = cfg.d * cfg.d
        for code in range(2 ** cells):
            bits = [(code >> k) & 1 for k in range(cells)]
            m = (2.0 * np.asarray(bits, dtype=float) - 1.0).reshape(cfg.d, cfg.d)
            values.append(inverse_norm(m))
    else:
        args = [(cfg, i) for i in range(cfg.trials)]
        values = _map_trials(_trial_rademacher, args, jobs)
    per_trial = [{"values": values}]
    return Report(schema=_schema(cfg.kind), config=cfg.echo(),
                  columns=COLUMNS[cfg.kind],
                  rows=aggregate_rademacher_tail(cfg, per_trial),
                  warnings=["Conjecture-2 bound is conjectural; measured, never asserted"],
                  per_trial=per_trial)


def run_shadow_size(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    _validate(cfg)
    centers = point_centers(cfg)
    notes = []
    for sigma in cfg.sigma_grid:
        shadow_size_bound(cfg.n, cfg.d, sigma)  # out-of-regime guard
        notes.extend(f"sigma={sigma}: {m}" for m in regime_notes(centers, sigma))
    per_trial = []
    for si, sigma in enumerate(cfg.sigma_grid):
        args = [(cfg, centers, sigma, _streams(si, cfg.trials, i))
                for i in range(cfg.trials)]
        per_trial.append({"sigma": sigma,
                          "counts": _map_trials(_trial_shadow_size, args, jobs)})
    return Report(schema=_schema(cfg.kind), config=cfg.echo(),
                  columns=COLUMNS[cfg.kind],
                  rows=aggregate_shadow_size(cfg, per_trial),
                  warnings=notes, per_trial=per_trial)


def run_simplex_pivots(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    _validate(cfg)
    centers = point_centers(cfg)
    notes = []
    for sigma in cfg.sigma_grid:
        notes.extend(f"sigma={sigma}: {m}" for m in regime_notes(centers, sigma))
    per_trial = []
    for si, sigma in enumerate(cfg.sigma_grid):
        args = [(cfg, centers, sigma, _streams(si, cfg.trials, i))
                for i in range(cfg.trials)]
        per_trial.append({"sigma": sigma,
                          "records": _map_trials(_trial_simplex_pivots, args, jobs)})
    return Report(schema=_schema(cfg.kind), config=cfg.echo(),
                  columns=COLUMNS[cfg.kind],
                  rows=aggregate_simplex_pivots(cfg, per_trial),
                  warnings=notes, per_trial=per_trial)


def run_perceptron_tail(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    _validate(cfg)
    for sigma in cfg.sigma_grid:
        if not (sigma ** 2 < 1.0 / (2.0 * cfg.d)):
            raise OutOfRegimeError("perceptron tail requires sigma^2 < 1/(2d)")
    centers = point_centers(cfg)
    notes = []
    for sigma in cfg.sigma_grid:
        notes.extend(f"sigma={sigma}: {m}" for m in regime_notes(centers, sigma))
    per_trial = []
    for si, sigma in enumerate(cfg.sigma_grid):
        args = [(cfg, centers, sigma, _streams(si, cfg.trials, i))
                for i in range(cfg.trials)]
        per_trial.append({"sigma": sigma,
                          "records": _map_trials(_trial_perceptron_tail, args, jobs)})
    return Report(schema=_schema(cfg.kind), config=cfg.echo(),
                  columns=COLUMNS[cfg.kind],
                  rows=aggregate_perceptron_tail(cfg, per_trial),
                  warnings=notes, per_trial=per_trial)


def run_submatrix_lemma(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    _validate(cfg)
    if math.comb(cfg.n, cfg.d) > SUBMATRIX_BUDGET:
        raise SizeLimitError(
            f"C({cfg.n},{cfg.d}) exceeds the submatrix budget {SUBMATRIX_BUDGET}")
    for sigma in cfg.sigma_grid:
        if sigma ** 2 > variance_regime_limit(cfg.n, cfg.d) * (1 + 1e-12):
            raise OutOfRegimeError("submatrix lemma requires sigma^2 <= 1/(9 d log n)")
    centers = point_centers(cfg)
    notes = [
        "the stated inequality direction is evaluated literally; both sides reported"]
    for sigma in cfg.sigma_grid:
        notes.extend(f"sigma={sigma}: {m}" for m in regime_notes(centers, sigma))
    per_trial = []
    for si, sigma in enumerate(cfg.sigma_grid):
        args = [(cfg, centers, sigma, _streams(si, cfg.trials, i))
                for i in range(cfg.trials)]
        per_trial.append({"sigma": sigma,
                          "sums": _map_trials(_trial_submatrix, args, jobs)})
    return Report(schema=_schema(cfg.kind), config=cfg.echo(),
                  columns=COLUMNS[cfg.kind],
                  rows=aggregate_submatrix(cfg, per_trial),
                  warnings=notes, per_trial=per_trial)


def profile_center_set(cfg: ExperimentConfig) -> list:
    """Centers probed by the smoothed-complexity estimator.

    The true worst case maximizes over all inputs; here the maximum is over
    this finite configured set, and reports label it accordingly.
    """
    n, d = cfg.n, cfg.d
    if cfg.center_source not in ("zero", "ones", "box", "stretched"):
        if cfg.measure == "simplex_pivots":
            lp = parse_lp(open(cfg.center_source, encoding="utf-8").read())
            return [("file", lp.A)]
        inst = parse_instance(open(cfg.center_source, encoding="utf-8").read())
        return [("file", inst.points)]
    sets = []
    for src in ("box", "stretched", "ones"):
        c = ExperimentConfig(kind=cfg.kind, n=n, d=d, sigma_grid=(1.0,),
                             trials=1, center_source=src)
        sets.append((src, point_centers(c)))
    return sets


def estimate_smoothed_complexity(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    """Per-center trial means under relative perturbation, max over centers.

    At sigma = 0 the estimate collapses to the deterministic worst case over
    the center set; a single center gives the plain average-case estimate.
    """
    _validate(cfg)
    if cfg.measure not in ("simplex_pivots", "perceptron_iterations"):
        raise ConfigError(f"unknown profile measure: {cfg.measure}")
    centers = profile_center_set(cfg)
    per_trial = []
    for si, sigma in enumerate(cfg.sigma_grid):
        for ci, (center_id, data) in enumerate(centers):
            payload = {"flat": data.ravel(), "shape": data.shape}
            base = (si * len(centers) + ci) * cfg.trials
            args = [(cfg, payload, sigma, base + i) for i in range(cfg.trials)]
            per_trial.append({"sigma": sigma, "center_id": center_id,
                              "records": _map_trials(_trial_profile, args, jobs)})
    return Report(schema=_schema(cfg.kind), config=cfg.echo(),
                  columns=COLUMNS[cfg.kind],
                  rows=aggregate_profile(cfg, per_trial),
                  warnings=["smoothed estimate is a max over the tested centers only"],
                  per_trial=per_trial)


RUNNERS = {
    "matrix_tail": run_matrix_tail,
    "rademacher_tail": run_rademacher_tail,
    "shadow_size": run_shadow_size,
    "simplex_pivots": run_simplex_pivots,
    "perceptron_tail": run_perceptron_tail,
    "submatrix_lemma": run_submatrix_lemma,
    "smoothed_profile": estimate_smoothed_complexity,
}


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> Report:
    if cfg.kind not in RUNNERS:
        raise ConfigError(f"unknown experiment kind: {cfg.kind}")
    return RUNNERS[cfg.kind](cfg, jobs=jobs)


def replay_rows(report_dict: dict) -> list:
    """Recompute report rows from the per-trial records of a saved report."""
    cfg = config_from_echo(report_dict["config"])
    per_trial = report_dict.get("per_trial")
    if per_trial is None:
        raise InvalidInputError("report has no per-trial records; rerun with --per-trial")
    return AGGREGATORS[cfg.kind](cfg, per_trial)


def verify_replay(report_dict: dict) -> bool:
    """True when the saved rows match a recomputation from per-trial records."""
    return replay_rows(report_dict) == report_dict["rows"]
