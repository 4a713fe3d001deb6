"""Command line interface: ``shearkick <command> --config run.json --out result.csv``.

Every command reads one JSON config, writes a CSV table to ``--out`` and a
JSON summary next to it (same name, ``.json`` suffix), and optionally an SVG
figure to ``--svg``.  ``--seed`` overrides the seed in the config.

Exit codes: 0 success, 2 configuration error, 3 numerical guard tripped.
"""
import argparse
import json
import math
import os
import sys

import numpy as np

from .. import geometry, singular1d
from ..core2d import iterate, trapping_bound
from ..errors import ConfigError, NonFiniteState, ShearKickError
from ..ndim import NDState, jacobian_nd, psi_nd, psi_nd_lifted, wss_covector
from .config import load_config
from .output import table_text, write_atomic
from .svg import emit_figure
from .sweep import run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3


def _paths(cfg, args):
    out = args.out or cfg.output.get("csv")
    if not out:
        raise ConfigError("no output path (pass --out or set output.csv)", where="output.csv")
    js = cfg.output.get("json") or os.path.splitext(out)[0] + ".json"
    svg = args.svg or cfg.output.get("svg")
    return out, js, svg


def _write(cfg, args, csv_text, summary, figure=None):
    out, js, svg = _paths(cfg, args)
    write_atomic(out, csv_text)
    summary = {"command": args.command, "seed": cfg.seed, "model": cfg.model,
               "params": cfg.params, **summary}
    write_atomic(js, json.dumps(summary, indent=2, sort_keys=True, default=_jsonable) + "\n")
    if svg and figure is not None:
        write_atomic(svg, emit_figure(*figure))
    return out


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def cmd_simulate(cfg, args):
    sec = cfg.section("simulate")
    p = cfg.require_params()
    nd = cfg.model == "ndim"
    m = p.sigma.size if nd else 1
    initial = sec["initial"] or [[0.0] * (m + 1)]
    rows = []
    for i, s0 in enumerate(initial):
        if not isinstance(s0, list) or len(s0) != m + 1:
            raise ConfigError(f"each initial state needs {m + 1} numbers", where="simulate.initial")
        if nd:
            s = NDState(float(s0[0]), np.asarray(s0[1:], dtype=float))
            step = psi_nd_lifted if sec["lifted"] else psi_nd
            traj = [s]
            for _ in range(sec["n_kicks"]):
                s = step(s, p)
                traj.append(s)
            for k, s in enumerate(traj):
                rows.append((i, k, float(s.theta), *map(float, s.y)))
        else:
            traj = iterate((float(s0[0]), float(s0[1])), p, sec["n_kicks"], lifted=sec["lifted"])
            for k, (th, y) in enumerate(np.asarray(traj)):
                rows.append((i, k, float(th), float(y)))
    header = ["orbit", "k", "theta"] + (["y"] if m == 1 and not nd else [f"y{j}" for j in range(m)])
    return _write(cfg, args, table_text(header, rows), {"n_orbits": len(initial), "n_kicks": sec["n_kicks"]})


def _lyapunov_figure(cfg, result):
    series = {"label": cfg.model, "x": [], "values": [], "flags": []}
    n = cfg.ensemble["n_orbits"]
    for gi, pt in enumerate(result.points):
        vals = [r.lambda_max for r in result.records[gi * n:(gi + 1) * n]]
        series["x"].append(pt["value"])
        series["values"].append([v for j, v in enumerate(vals) if j not in pt["dropped"]])
        series["flags"].append(pt["multi_behavior_flag"])
    p = cfg.params
    title = f"{cfg.model}: " + ", ".join(f"{k}={p[k]}" for k in p if k != cfg.sweep["name"] and k not in ("H", "v"))
    return "lyapunov-vs-tau", {"series": [series], "xlabel": cfg.sweep["name"], "title": title}


def cmd_sweep(cfg, args):
    if cfg.sweep is None:
        raise ConfigError("required for the sweep command", where="sweep")
    result = run_sweep(cfg, workers=args.workers, full=args.full)
    summary = result.summary()
    _print_points(result.points)
    return _write(cfg, args, result.csv_text(), summary, _lyapunov_figure(cfg, result))


def cmd_lyapunov(cfg, args):
    cfg.require_params()
    cfg.sweep = None
    result = run_sweep(cfg, workers=args.workers, full=args.full)
    _print_points(result.points)
    return _write(cfg, args, result.csv_text(), result.summary())


def _print_points(points):
    for pt in points:
        flag = " multi-behavior" if pt["multi_behavior_flag"] else ""
        where = "" if pt["value"] is None else f"{pt['parameter']}={pt['value']!r} "
        print(f"{where}median={pt['median']:.6g} [{pt['min_of_8']:.6g}, {pt['max_of_8']:.6g}] "
              f"{pt['classification']}{flag}")


def cmd_cycle_image(cfg, args):
    sec = cfg.section("cycle_image")
    base = cfg.require_params("shear2d")
    sigmas = sec["sigmas"] or [base.sigma]
    rows, panels, reports = [], [], []
    for sigma in sigmas:
        p = base.replace(sigma=float(sigma))
        curve = geometry.image_of_cycle(p, sec["n_kicks"], resolution=sec["resolution"],
                                        arc_tol=sec["arc_tol"], budget=sec["budget"])
        rep = geometry.fold_report(curve)
        reports.append({"sigma": p.sigma, "points": len(curve), "complete": curve.complete,
                        "turning_points": rep.turning_points, "laps": rep.laps, "is_graph": rep.is_graph})
        rows += [(p.sigma, float(s), float(t), float(y)) for s, t, y in zip(curve.s, curve.theta, curve.y)]
        panels.append({"label": f"sigma={p.sigma:g}", "theta": curve.theta, "y": curve.y})
    title = f"image of the cycle after {sec['n_kicks']} kick(s): lambda={base.lam:g}, A={base.A:g}, tau={base.tau:g}"
    fig = ("cycle-image", {"panels": panels, "h": trapping_bound(base), "title": title})
    return _write(cfg, args, table_text(["sigma", "s", "theta", "y"], rows), {"curves": reports}, fig)


def cmd_attractor(cfg, args):
    sec = cfg.section("attractor")
    p = cfg.require_params("shear2d")
    cloud = geometry.attractor_cloud(p, sec["n_points"], sec["burn_in"], sec["n_record"], seed=cfg.seed)
    rows = [(k, i, float(cloud[k, i, 0]), float(cloud[k, i, 1]))
            for k in range(cloud.shape[0]) for i in range(cloud.shape[1])]
    h = trapping_bound(p)
    summary = {"h": h, "y_min": float(cloud[..., 1].min()), "y_max": float(cloud[..., 1].max()),
               "diameter_bound": geometry.cloud_diameter(cloud)}
    fig = ("attractor", {"theta": cloud[..., 0], "y": cloud[..., 1], "h": h,
                         "title": f"sigma={p.sigma:g}, lambda={p.lam:g}, A={p.A:g}, tau={p.tau:g}"})
    return _write(cfg, args, table_text(["record", "point", "theta", "y"], rows), summary, fig)


def cmd_invariant_curve(cfg, args):
    sec = cfg.section("invariant_curve")
    p = cfg.require_params("shear2d")
    res = geometry.invariant_curve(p, tol=sec["tol"], max_iters=sec["max_iters"],
                                   resolution=sec["resolution"], slope_tol=sec["slope_tol"])
    if isinstance(res, geometry.InvariantCurve):
        print(f"invariant curve after {res.iterations} iterations (residual {res.residual:.3g})")
        rows = list(zip(res.theta.tolist(), res.g.tolist()))
        summary = {"status": "converged", "iterations": res.iterations, "residual": res.residual,
                   "max_abs_g": float(np.max(np.abs(res.g)))}
        return _write(cfg, args, table_text(["theta", "g"], rows), summary)
    print(f"breakdown at iteration {res.iteration}: {res.reason}")
    img = res.image
    rows = list(zip(img.s.tolist(), img.theta.tolist(), img.y.tolist()))
    summary = {"status": "breakdown", "iteration": res.iteration, "reason": res.reason}
    return _write(cfg, args, table_text(["s", "theta", "y"], rows), summary)


def cmd_staircase(cfg, args):
    sec = cfg.section("staircase")
    grid = np.linspace(sec["a_start"], sec["a_stop"], sec["n_points"])
    table = singular1d.staircase(float(sec["B"]), grid, n=sec["n"], n_init=sec["n_init"])
    steps = singular1d.plateaus(table, tol=1e-5)
    summary = {"B": sec["B"], "plateaus": [{"a_start": a, "a_end": b, "rho": r} for a, b, r in steps]}
    fig = ("staircase", {"a": table[:, 0], "rho": table[:, 1], "title": f"B={sec['B']:g}"})
    rows = [tuple(map(float, r)) for r in table]
    return _write(cfg, args, table_text(["a", "rho", "error"], rows), summary, fig)


def cmd_singular_compare(cfg, args):
    sec = cfg.section("singular_compare")
    base = cfg.require_params("shear2d")
    rows = []
    for k in sec["k_values"]:
        for a in sec["a_values"]:
            p = base.replace(tau=float(k) + float(a))
            c = singular1d.compare_to_2d(p, n=sec["n"], seed=cfg.seed, n_orbits=sec["n_orbits"],
                                         burn_in=sec["burn_in"])
            print(f"k={c.k} a={c.a:.6g}: 1D {c.lambda_1d:.6g}  2D {c.lambda_2d:.6g}  gap {c.gap:.3g}")
            rows.append((c.k, float(a), c.B, base.lam * c.k, c.lambda_1d, c.lambda_2d, c.gap))
    return _write(cfg, args, table_text(["k", "a", "B", "lambda_k", "lambda_1d", "lambda_2d", "gap"], rows),
                  {"n": sec["n"], "n_orbits": sec["n_orbits"]})


def cmd_ndim(cfg, args):
    p = cfg.require_params("ndim")
    det = float(np.linalg.det(jacobian_nd(NDState(0.0, np.zeros(p.sigma.size)), p)))
    geo = {"n": p.n, "v": p.v, "wss_covector": wss_covector(p), "effective_shear": p.effective_shear,
           "det_jacobian": det, "exp_minus_trace_tau": math.exp(-float(np.trace(p.Lambda)) * p.tau)}
    print(f"n={p.n}  effective shear w.v={p.effective_shear:.6g}  v={np.round(p.v, 6).tolist()}")
    result = run_sweep(cfg, workers=args.workers, full=args.full)
    _print_points(result.points)
    fig = _lyapunov_figure(cfg, result) if cfg.sweep else None
    return _write(cfg, args, result.csv_text(), {"geometry": geo, **result.summary()}, fig)


COMMANDS = {
    "simulate": (cmd_simulate, "iterate the kicked map from given initial states"),
    "lyapunov": (cmd_lyapunov, "ensemble Lyapunov estimate at one parameter point"),
    "sweep": (cmd_sweep, "ensemble Lyapunov estimates over a parameter grid"),
    "cycle-image": (cmd_cycle_image, "images of the limit cycle and their folds"),
    "attractor": (cmd_attractor, "point cloud on the attractor"),
    "invariant-curve": (cmd_invariant_curve, "graph transform for an invariant circle"),
    "staircase": (cmd_staircase, "rotation numbers of the singular-limit circle maps"),
    "singular-compare": (cmd_singular_compare, "1D singular limit against the 2D map"),
    "ndim": (cmd_ndim, "geometry and Lyapunov estimates of the n-dimensional model"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="shearkick", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", help="CSV output path (overrides output.csv)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--svg", help="also write an SVG figure here")
        if name in ("lyapunov", "sweep", "ndim"):
            sp.add_argument("--full", action="store_true", help="4e6 steps per orbit (slow)")
            sp.add_argument("--workers", type=int, help="worker threads (results do not depend on it)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        cfg = load_config(args.config, seed_override=args.seed)
        out = func(cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonFiniteState as exc:
        print(f"numerical guard tripped: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ShearKickError, ValueError) as exc:
        # parameter problems found after parsing are still input errors
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
