"""Execute a ``RunConfig`` and write CSV/JSON artifacts.

Output schema (fixed):

* ``trajectory.csv``: t, x, y, z, fidelity, then one D_k column per pair
* ``speed.csv``: t, g  (g = -2 F''(t), signed)
* ``sweep.csv``: parameter, v0_squared, blp, indivisible (Choi scan or rate
  signs, either one failing)
* ``report.json``: convention, config, closed-form region, NonMarkovReport,
  MonotonicityReport, sampled fidelity spot-check (only when some analysis
  or a sweep was requested)
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .config import UNITS_CONVENTION, RunConfig
from .dynamics import TimeGrid, trajectory
from .errors import DomainError, QdynError, RunError
from .models import initial_speed_squared_closed_form, table1_region
from .nonmarkov import (
    blp_measure,
    cp_divisibility_scan,
    nonmarkov_report,
    rate_sign_divisibility,
    trace_distance_curve,
)
from .qubit import bloch_from_angles, density_from_bloch, fidelity, fidelity_matrix_oracle
from .speed import fidelity_curve, initial_speed_scan, speed_squared_fd

FLOAT_FMT = ".17g"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    return format(float(x), FLOAT_FMT)


def write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _clean(obj):
    # JSON has no NaN/inf; numpy scalars are not serialisable
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


@contextmanager
def stage(name: str):
    try:
        yield
    except RunError:
        raise
    except (QdynError, ArithmeticError) as exc:
        raise RunError(name, exc) from exc


def default_jobs() -> int:
    raw = os.environ.get("QDYN_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"QDYN_JOBS must be an integer, got {raw!r}") from None


def _antipode(angles):
    return (math.pi - angles[0], (angles[1] + math.pi) % (2 * math.pi))


def _sweep_point(args):
    cfg, value = args
    model = cfg.build_model(**{cfg.sweep.parameter: value})
    v0 = initial_speed_squared_closed_form(model, cfg.theta)
    blp = blp_measure(model, cfg.horizon).measure
    if blp <= cfg.tolerances.blp_zero:
        blp = 0.0
    # the rate-sign test resolves violations finer than the (s, t) cell size
    div = cp_divisibility_scan(model, cfg.horizon, tol=cfg.tolerances.choi)
    rates = rate_sign_divisibility(model, np.linspace(cfg.t0, cfg.t1, cfg.n_points), tol=cfg.tolerances.rate)
    return [value, v0, blp, not (div.divisible and rates.divisible)]


def _fidelity_spot_check(seed: int, n: int = 200) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        v = rng.normal(size=(2, 3))
        v *= (rng.uniform(size=(2, 1)) ** (1 / 3)) / np.linalg.norm(v, axis=1, keepdims=True)
        f = fidelity(v[0], v[1])
        g = fidelity_matrix_oracle(density_from_bloch(v[0]), density_from_bloch(v[1]))
        worst = max(worst, abs(f - g))
    return {"seed": seed, "pairs": n, "max_abs_difference": worst}


def run(cfg: RunConfig, jobs: int = 1) -> list[Path]:
    """Run every requested analysis; returns the written file paths in order."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    angles = (cfg.theta, cfg.phi)
    pairs = list(cfg.pairs) or [(angles, _antipode(angles))]
    with stage("qubit-core"):
        model = cfg.build_model()
    report: dict = {
        "convention": UNITS_CONVENTION,
        "config": cfg.to_dict(),
        "model": {"family": model.kind, **cfg.params},
        "closed_form_region": table1_region(model)._asdict(),
        "notes": [],
    }

    with stage("dynamics-engine"):
        grid = TimeGrid(cfg.t0, cfg.t1, cfg.n_points)
        traj = trajectory(model, bloch_from_angles(angles), grid)
        fid = fidelity_curve(model, angles, traj.times)
    with stage("nonmarkov-analysis"):
        dcols = [trace_distance_curve(model, p, traj.times) for p in pairs]
    header = ["t", "x", "y", "z", "fidelity"] + [f"D_{k}" for k in range(len(pairs))]
    rows = np.column_stack([traj.times, traj.states, fid] + dcols)
    write_csv(out / "trajectory.csv", header, rows)
    written.append(out / "trajectory.csv")

    if "speed" in cfg.analysis:
        srows, skipped = [], 0
        with stage("speed-metrics"):
            for t in traj.times:
                try:
                    s = speed_squared_fd(model, angles, float(t), cfg.tolerances.h)
                except DomainError:
                    skipped += 1
                    continue
                srows.append([t, s.v_squared])
        if skipped:
            report["notes"].append(f"speed: {skipped} grid point(s) skipped near non-differentiable points")
        write_csv(out / "speed.csv", ["t", "g"], srows)
        written.append(out / "speed.csv")

    if "blp" in cfg.analysis or "divisibility" in cfg.analysis:
        with stage("nonmarkov-analysis"):
            nm = nonmarkov_report(model, cfg.horizon, zero_tol=cfg.tolerances.blp_zero, choi_tol=cfg.tolerances.choi)
        report["nonmarkov"] = nm.to_dict()

    if cfg.sweep is not None:
        sw = cfg.sweep
        values = [float(v) for v in np.linspace(sw.start, sw.stop, sw.points)]
        with stage("sweep"):
            if jobs > 1:
                with ProcessPoolExecutor(max_workers=jobs) as pool:
                    rows = list(pool.map(_sweep_point, [(cfg, v) for v in values]))
            else:
                rows = [_sweep_point((cfg, v)) for v in values]
        write_csv(out / "sweep.csv", ["parameter", "v0_squared", "blp", "indivisible"], rows)
        written.append(out / "sweep.csv")
        if sw.parameter == model.driving:
            with stage("speed-metrics"):
                mono = initial_speed_scan(model, sw.parameter, values, cfg.theta, h=cfg.tolerances.h)
            report["monotonicity"] = mono.to_dict()
        else:
            report["notes"].append(f"no monotonicity verdict: {sw.parameter!r} is not the driving parameter {model.driving!r}")

    if not cfg.analysis and cfg.sweep is None:
        return written
    report["fidelity_spot_check"] = _fidelity_spot_check(cfg.seed)
    write_json(out / "report.json", report)
    written.append(out / "report.json")
    return written
