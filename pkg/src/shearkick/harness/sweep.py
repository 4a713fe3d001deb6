"""Seeded Lyapunov sweeps over one parameter.

Every (grid point, orbit) pair is an independent task keyed by its indices;
results are written back by index, so the CSV bytes never depend on the
number of worker threads.
"""
import csv
import io
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..lyapunov import classify, initial_conditions, max_lyapunov, summarize
from ..ndim import initial_conditions_nd, top_lyapunov_nd
from .config import FULL_N_STEPS, build_params
from .output import fmt_float, table_text

CSV_COLUMNS = ("model", "sigma", "lambda", "A", "tau", "seed", "orbit_id",
               "n_steps", "lambda_max", "classification")


@dataclass(frozen=True)
class RunRecord:
    """One orbit of a sweep.  ``sigma`` and ``lam`` are tuples for the n-D model
    (``lam`` is Lambda flattened row-major)."""

    model: str
    sigma: object
    lam: object
    A: float
    tau: float
    seed: int
    orbit_id: int
    n_steps: int
    lambda_max: float
    classification: str
    wall_time: float = 0.0

    def key(self):
        # everything except wall time, which is not reproducible
        return (self.model, self.sigma, self.lam, self.A, self.tau, self.seed,
                self.orbit_id, self.n_steps, self.lambda_max, self.classification)


@dataclass
class SweepResult:
    records: list
    points: list
    n_steps: int

    def csv_text(self):
        return records_to_csv(self.records)

    def summary(self):
        return {"n_steps": self.n_steps, "points": self.points,
                "wall_time_total": sum(r.wall_time for r in self.records)}


def _vec(x):
    if isinstance(x, tuple):
        return " ".join(fmt_float(v) for v in x)
    return fmt_float(x)


def records_to_csv(records):
    rows = [(r.model, _vec(r.sigma), _vec(r.lam), r.A, r.tau, r.seed, r.orbit_id,
             r.n_steps, r.lambda_max, r.classification) for r in records]
    return table_text(CSV_COLUMNS, rows)


def records_from_csv(text):
    """Parse a sweep CSV back into RunRecords (wall time is not stored)."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected header {reader.fieldnames}")
    out = []
    for row in reader:
        vec = row["model"] == "ndim"
        out.append(RunRecord(
            model=row["model"],
            sigma=tuple(map(float, row["sigma"].split())) if vec else float(row["sigma"]),
            lam=tuple(map(float, row["lambda"].split())) if vec else float(row["lambda"]),
            A=float(row["A"]), tau=float(row["tau"]), seed=int(row["seed"]),
            orbit_id=int(row["orbit_id"]), n_steps=int(row["n_steps"]),
            lambda_max=float(row["lambda_max"]), classification=row["classification"]))
    return out


def _param_columns(model, p):
    if model == "shear2d":
        return p.sigma, p.lam, p.A, p.tau
    return tuple(p.sigma.tolist()), tuple(p.Lambda.ravel().tolist()), p.A, p.tau


def _one_orbit(model, p, seed, orbit_id, n_steps, ens):
    if model == "shear2d":
        s0, v0 = initial_conditions(p, seed, orbit_id)
        return max_lyapunov(s0, v0, n_steps, p, burn_in=ens["burn_in"], zero_band=ens["zero_band"])
    s0, v0 = initial_conditions_nd(p, seed, orbit_id)
    return top_lyapunov_nd(s0, v0, n_steps, p, burn_in=ens["burn_in"], zero_band=ens["zero_band"])


def run_sweep(cfg, workers=None, full=False, n_steps=None):
    """Run the ensemble protocol at every grid point of ``cfg``.

    Without a sweep section the configured parameters form a single point.
    ``full`` selects the long 4e6-step runs; ``n_steps`` overrides both.
    """
    ens = cfg.ensemble
    steps = n_steps or (FULL_N_STEPS if full else ens["n_steps"])
    workers = workers or ens["workers"]
    name = cfg.sweep["name"] if cfg.sweep else None
    grid = cfg.grid() or [None]
    plist = [build_params(cfg.model, cfg.params if v is None else cfg.with_value(name, v)) for v in grid]
    tasks = [(gi, oi) for gi in range(len(grid)) for oi in range(ens["n_orbits"])]

    def run(task):
        gi, oi = task
        t0 = time.perf_counter()
        est = _one_orbit(cfg.model, plist[gi], cfg.seed, oi, steps, ens)
        return est, time.perf_counter() - t0

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    records, points = [], []
    for gi, value in enumerate(grid):
        p = plist[gi]
        cols = _param_columns(cfg.model, p)
        chunk = results[gi * ens["n_orbits"]:(gi + 1) * ens["n_orbits"]]
        for oi, (est, wall) in enumerate(chunk):
            records.append(RunRecord(cfg.model, *cols, cfg.seed, oi, steps, est.value,
                                     est.classification, wall))
        rep = summarize([e for e, _ in chunk], gap=ens["gap"])
        median = statistics.median(rep.kept)
        points.append({
            "parameter": name, "value": value, "min_of_8": rep.min_of_8, "max_of_8": rep.max_of_8,
            "multi_behavior_flag": rep.multi_behavior_flag, "dropped": list(rep.dropped),
            "median": median, "classification": classify(median, ens["zero_band"]),
            "wall_time": sum(w for _, w in chunk),
        })
    return SweepResult(records, points, steps)


def classification_fractions(points):
    """Fraction of grid points in each classification."""
    n = len(points)
    labels = [pt["classification"] for pt in points]
    return {c: labels.count(c) / n for c in ("negative", "near-zero", "positive")}


def point_values(result):
    """Per grid point: (value, kept estimates as an array)."""
    out = []
    n_orbits = len(result.records) // len(result.points)
    for gi, pt in enumerate(result.points):
        vals = [r.lambda_max for r in result.records[gi * n_orbits:(gi + 1) * n_orbits]]
        kept = [v for i, v in enumerate(vals) if i not in pt["dropped"]]
        out.append((pt["value"], np.asarray(kept)))
    return out
