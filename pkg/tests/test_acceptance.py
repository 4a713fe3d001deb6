"""Acceptance suite: each test is one numbered criterion at its stated tolerance
and runtime budget (measured wall time on this machine)."""
import json
import math
import os
import time

import numpy as np
import pytest

from oracles import rk4_adaptive, shear_field
from shearkick import core2d, singular1d
from shearkick.core2d import ShearParams, circle_distance, fixed_points_integer_tau, trapping_bound
from shearkick.geometry import (
    Breakdown,
    InvariantCurve,
    distance_to_graph,
    fold_report,
    horseshoe_crossing_diagnostic,
    image_of_cycle,
    invariant_curve,
)
from shearkick.harness import cli
from shearkick.harness.config import load_config, parse_config
from shearkick.harness.sweep import classification_fractions, run_sweep
from shearkick.lyapunov import ensemble_protocol
from shearkick.ndim import (
    NDParams,
    NDState,
    flow_nd,
    jacobian_nd,
    kick_nd,
    magnification_factor,
    optimal_kick_direction,
    psi_nd,
    psi_nd_lifted,
    singular_limit_map_nd,
    top_lyapunov_nd,
    wss_covector,
)

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def random_shear_params(rng):
    # standard ranges: lam = A = 0.1, sigma in [0.05, 4], tau in [5, 15]
    return ShearParams(float(rng.uniform(0.05, 4.0)), 0.1, 0.1, float(rng.uniform(5.0, 15.0)))


@pytest.mark.criterion(1, "exact map matches adaptive RK4 to 1e-8 per kick (100 draws, < 10 s)")
def test_exact_map_oracle():
    rng = np.random.default_rng(2024)
    worst = 0.0
    with Timer() as t:
        for _ in range(100):
            p = random_shear_params(rng)
            h = trapping_bound(p)
            th, y = float(rng.random()), float(rng.uniform(-h, h))
            f = shear_field(p.sigma, p.lam)
            # psi: instantaneous kick, then the unforced flow for tau
            ref = rk4_adaptive(f, [th, y + p.A * math.sin(2 * math.pi * th)], p.tau)
            out = core2d.psi((th, y), p)
            worst = max(worst, circle_distance(out[0], ref[0]), abs(out[1] - ref[1]))
            # flow alone from the same state
            ref = rk4_adaptive(f, [th, y], p.tau)
            out = core2d.flow((th, y), p.tau, p)
            worst = max(worst, circle_distance(out[0], ref[0]), abs(out[1] - ref[1]))
    assert worst <= 1e-8
    assert t.elapsed < 10.0


@pytest.mark.criterion(2, "det D psi = e^{-lam tau} (2D) and e^{-tr(Lambda) tau} (n-D) to 1e-10 (< 5 s)")
def test_determinant_identity():
    rng = np.random.default_rng(7)
    with Timer() as t:
        worst = 0.0
        for _ in range(10_000):
            p = ShearParams(*rng.uniform([0.01, 0.01, 0.0, 0.1], [5.0, 2.0, 1.0, 20.0]))
            J = core2d.jacobian((rng.random(), rng.normal()), p)
            worst = max(worst, abs(J.det / math.exp(-p.lam * p.tau) - 1.0))
        for _ in range(100):
            m = int(rng.integers(1, 6))
            # contraction rates on the scale of the 2D draws (lam = 0.1, tau in [5, 15])
            M = rng.standard_normal((m, m)) * 0.05
            Lam = M + (max(0.0, -np.linalg.eigvals(M).real.min()) + rng.uniform(0.05, 0.2)) * np.eye(m)
            p = NDParams(rng.standard_normal(m), Lam, float(rng.uniform(0, 1)), float(rng.uniform(5.0, 15.0)))
            target = math.exp(-np.trace(Lam) * p.tau)
            for _ in range(100):
                d = np.linalg.det(jacobian_nd(NDState(rng.random(), rng.standard_normal(m)), p))
                worst = max(worst, abs(d / target - 1.0))
    assert worst <= 1e-10
    assert t.elapsed < 5.0


@pytest.mark.criterion(3, "spiral sink: ensemble exponent = -lam tau/2 within 2%, tau = 5..13 (< 2 min)")
def test_spiral_sink_quantitative():
    with Timer() as t:
        bad = []
        for tau in range(5, 14):
            p = ShearParams(0.05, 0.1, 0.1, float(tau))
            sink = fixed_points_integer_tau(p)[1]
            assert tuple(sink.point) == (0.5, 0.0)
            assert sink.classification == "spiral sink"
            assert isinstance(sink.eigenvalues[0], complex)
            rep = ensemble_protocol(p, n_orbits=10, n_steps=100_000, seed=0, burn_in=1000)
            target = -0.5 * p.lam * p.tau
            bad += [(tau, v) for v in rep.kept if abs(v - target) > 0.02 * abs(target)]
    assert not bad
    assert t.elapsed < 120.0


@pytest.mark.criterion(4, "tau sweeps at n=1e5, step 0.25: (a) >=70% <=0, (f) >=70% >0, (c) a flagged point")
def test_tau_sweep_qualitative():
    with Timer() as t:
        res = {name: run_sweep(load_config(os.path.join(CONFIGS, f"sweep_{name}.json")))
               for name in ("sigma005", "sigma4", "sigma05")}
    for r in res.values():
        assert r.n_steps == 100_000
        assert all(b - a == pytest.approx(0.25) for a, b in zip([p["value"] for p in r.points],
                                                                [p["value"] for p in r.points][1:]))
    frac_a = classification_fractions(res["sigma005"].points)
    frac_f = classification_fractions(res["sigma4"].points)
    flags_c = [p["value"] for p in res["sigma05"].points if p["multi_behavior_flag"]]
    results = {
        "(a) sigma=0.05 non-positive fraction": frac_a["near-zero"] + frac_a["negative"] >= 0.7,
        "(f) sigma=4 positive fraction": frac_f["positive"] >= 0.7,
        "(c) sigma=0.5 multi-behavior point": len(flags_c) >= 1,
    }
    assert all(results.values()), results
    assert t.elapsed <= 15 * 60


def fold_onset(lam, A, tau, lo=0.01, hi=3.0, tol=1e-3):
    def folds(s):
        return fold_report(image_of_cycle(ShearParams(s, lam, A, tau), resolution=2048)).turning_points > 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if folds(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@pytest.mark.criterion(5, "fold onset by bisection within 1e-2 of the analytic threshold 0.25178 (< 30 s)")
def test_fold_onset():
    with Timer() as t:
        found = fold_onset(0.1, 0.1, 10.0)
    analytic = core2d.fold_threshold_sigma(0.1, 0.1, 10.0)
    assert analytic == pytest.approx(0.25178, abs=1e-5)
    assert abs(found - analytic) <= 1e-2
    assert t.elapsed < 30.0


@pytest.mark.criterion(6, "invariant curve at sigma=0.05, tau=10.5 attracts orbits to 1e-6; breakdown at sigma=2 (< 1 min)")
def test_invariant_curve_regime():
    with Timer() as t:
        p = ShearParams(0.05, 0.1, 0.1, 10.5)
        c = invariant_curve(p, tol=1e-8)
        assert isinstance(c, InvariantCurve)
        rng = np.random.default_rng(0)
        h = trapping_bound(p)
        th, y = rng.random(1000), rng.uniform(-h, h, 1000)
        for _ in range(1000):
            th, y = core2d.psi((th, y), p)
        assert distance_to_graph(np.column_stack([th, y]), c).max() <= 1e-6
        assert isinstance(invariant_curve(ShearParams(2.0, 0.1, 0.1, 10.0)), Breakdown)
    assert t.elapsed < 60.0


@pytest.mark.criterion(7, "rotation numbers: A=0 gives frac(tau) to 1e-9; B=0.1 staircase monotone with a rho=0 plateau (< 1 min)")
def test_rotation_numbers():
    with Timer() as t:
        for tau in (5.0, 7.3, 10.25, 12.8, 14.999):
            rho = singular1d.rotation_number_psi(ShearParams(2.0, 0.1, 0.0, tau), n=10_000, burn_in=10)
            assert abs(rho - (tau - math.floor(tau))) <= 1e-9
        a = np.arange(512) / 512
        tab = singular1d.staircase(0.1, a, n=20_000)
        rho, err = tab[:, 1], tab[:, 2]
        assert np.all(np.diff(rho) >= 0)
        zero = a[rho <= err]
        assert zero.size >= 2 and zero.max() - zero.min() > 0
    assert t.elapsed < 60.0


@pytest.mark.criterion(8, "singular limit: |gap| <= 0.05 at lam k = 3 and no larger (within 0.02) at lam k = 6 (< 3 min)")
def test_singular_limit_convergence():
    lam, sigma, A = 0.1, 2.0, 0.1  # sigma / lam = 20
    gaps = {}
    with Timer() as t:
        for a in (0.1, 0.3, 0.7):
            for lk in (3, 6):
                k = round(lk / lam)
                gaps[a, lk] = singular1d.compare_to_2d(ShearParams(sigma, lam, A, k + a), n=1_000_000).gap
    failures = {key: g for key, g in gaps.items() if key[1] == 3 and g > 0.05}
    failures.update({(a, 6): gaps[a, 6] for a in (0.1, 0.3, 0.7) if gaps[a, 6] > gaps[a, 3] + 0.02})
    assert not failures, f"gaps {gaps}"
    assert t.elapsed < 180.0


@pytest.mark.criterion(9, "n=2 reductions agree with core2d to 1e-12; optimal direction beats 1000 random ones (< 30 s)")
def test_nd_reductions_and_optimum():
    rng = np.random.default_rng(9)
    with Timer() as t:
        for _ in range(20):
            p2 = random_shear_params(rng)
            pn = NDParams.from_shear(p2)
            cmp = singular1d.CircleMapParams(0.37, p2.shear_ratio)
            for _ in range(20):
                th, y = float(rng.random()), float(rng.uniform(-0.2, 0.2))
                s = NDState(th, np.array([y]))
                for a, b in ((flow_nd(s, p2.tau, pn), core2d.flow((th, y), p2.tau, p2)),
                             (kick_nd(s, pn), core2d.kick((th, y), p2)),
                             (psi_nd(s, pn), core2d.psi((th, y), p2))):
                    assert circle_distance(a.theta, b[0]) <= 1e-12 and abs(a.y[0] - b[1]) <= 1e-12
                assert abs(psi_nd_lifted(s, pn).theta - core2d.psi_lifted((th, y), p2)[0]) <= 1e-12
                assert np.abs(jacobian_nd(s, pn) - core2d.jacobian((th, y), p2).as_array()).max() <= 1e-12
                assert abs(magnification_factor(pn, th)
                           - p2.A * math.sin(2 * math.pi * th) * p2.sigma / p2.lam) <= 1e-12
                assert circle_distance(singular_limit_map_nd(th, 0.37, pn), singular1d.f(th, cmp)) <= 1e-12
            assert np.abs(wss_covector(pn) - [1.0, p2.sigma / p2.lam]).max() <= 1e-12
            est_nd = top_lyapunov_nd(NDState(0.3, np.array([0.0])), np.array([1.0, 0.0]), 2000, pn).value
            est_2d = core2d_lyapunov((0.3, 0.0), (1.0, 0.0), 2000, p2)
            assert abs(est_nd - est_2d) <= 1e-12
        for _ in range(20):
            m = int(rng.integers(2, 7))
            M = rng.standard_normal((m, m))
            Lam = M + (max(0.0, -np.linalg.eigvals(M).real.min()) + 0.1) * np.eye(m)
            sigma = rng.standard_normal(m)
            v = optimal_kick_direction(sigma, Lam)
            w = sigma @ np.linalg.inv(Lam)
            u = rng.standard_normal((1000, m))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            assert np.all(w @ v >= u @ w)
    assert t.elapsed < 30.0


def core2d_lyapunov(p0, v0, n, params):
    from shearkick.lyapunov import max_lyapunov
    return max_lyapunov(p0, v0, n, params).value


@pytest.mark.criterion(10, "horseshoe: >= 2 full crossings at sigma=2, <= 1 at sigma=0.05 (< 10 s)")
def test_horseshoe():
    with Timer() as t:
        strong = horseshoe_crossing_diagnostic(ShearParams(2.0, 0.1, 0.1, 10.0))
        weak = horseshoe_crossing_diagnostic(ShearParams(0.05, 0.1, 0.1, 10.0))
    assert strong["full_crossings"] >= 2
    assert weak["full_crossings"] <= 1
    assert t.elapsed < 10.0


@pytest.mark.criterion(11, "sweep reruns give byte-identical CSV independent of thread count")
def test_reproducibility(tmp_path):
    with open(os.path.join(CONFIGS, "sweep_sigma05.json")) as fh:
        raw = json.load(fh)
    raw["ensemble"]["n_steps"] = 20_000
    path = tmp_path / "run.json"
    path.write_text(json.dumps(raw))
    outs = []
    for i, workers in enumerate((1, 2, 4, 1)):
        out = tmp_path / f"run{i}.csv"
        assert cli.main(["sweep", "--config", str(path), "--out", str(out), "--workers", str(workers)]) == 0
        outs.append(out.read_bytes())
    assert len(set(outs)) == 1
    assert outs[0] == run_sweep(parse_config(json.dumps(raw)), workers=3).csv_text().encode()
