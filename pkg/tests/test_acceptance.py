"""Acceptance criteria 1-11.

Each check returns ``(ok, detail)``; the pytest wrapper prints one
``[criterion N] PASS|FAIL`` line and asserts.  Run as a script
(``python tests/test_acceptance.py``) to get only the eleven lines.

All Monte Carlo checks use one fixed master seed, chosen before any
result was seen and never tuned.
"""

from __future__ import annotations

import logging
import math
import sys
import time
from dataclasses import replace

import numpy as np
import pytest

from irolasso.cli import main as cli_main
from irolasso.ensembles import RandomSource, gen_gaussian, gen_iro
from irolasso.geometry import (
    SparseSignal,
    descent_cone_member,
    estimate_width_mc,
    min_dist_to_cone,
    project_tangent_cone,
    random_sparse_signal,
    width_closed_form_sparse,
)
from irolasso.harness import (
    ExperimentSpec,
    run_nse_sweep,
    run_recovery_trials,
    run_sigma_profile,
)
from irolasso.mcsv import empirical_mcsv
from irolasso.predictions import (
    ProblemDims,
    ao_saddle_numeric,
    mcsv_ao_numeric,
    mcsv_bound_comparison,
    mcsv_bound_gaussian,
    mcsv_bound_iro,
    nse_gaussian,
    nse_iro,
)
from irolasso.solver import project_l1_ball

SEED = 2024
N, K, M = 256, 10, 128
BASE = ExperimentSpec(master_seed=SEED, n=N, k=K, m_list=(M,), sigma_list=(1e-3,), trials=25)
OMEGA_SQ = width_closed_form_sparse(N, K).omega_sq

RESULTS: dict[int, tuple[bool, str]] = {}


def _mean(rows, **match):
    vals = [r.nse_empirical for r in rows if all(getattr(r, k) == v for k, v in match.items())]
    return float(np.mean(vals))


def _grid():
    """5x5 grid of valid (m/n, omega^2/m) at n = 1000."""
    n = 1000
    for mf in np.linspace(0.2, 0.9, 5):
        for wf in np.linspace(0.1, 0.9, 5):
            m = int(round(mf * n))
            yield n, m, wf * m


# -- criteria -------------------------------------------------------------------


def check_1():
    t0 = time.perf_counter()
    rows = run_nse_sweep(replace(BASE, ensembles=("iro",)))
    secs = time.perf_counter() - t0
    pred = nse_iro(ProblemDims(N, M, OMEGA_SQ))
    ratio = _mean(rows) / pred
    ok = 0.85 <= ratio <= 1.15 and secs < 120
    return ok, f"iro mean/prediction = {ratio:.4f} (pred {pred:.2f}), runtime {secs:.1f}s"


def check_2():
    rows = run_nse_sweep(replace(BASE, ensembles=("gaussian",)))
    pred = nse_gaussian(ProblemDims(N, M, OMEGA_SQ))
    ratio = _mean(rows) / pred
    return 0.85 <= ratio <= 1.15, f"gaussian mean/prediction = {ratio:.4f} (pred {pred:.2f})"


def check_3():
    ms = (96, 128, 160, 192)
    rows = run_nse_sweep(replace(BASE, ensembles=("iro", "gaussian"), m_list=ms))
    parts, ok = [], True
    for m in ms:
        a, b = _mean(rows, ensemble="iro", m=m), _mean(rows, ensemble="gaussian", m=m)
        ok &= a < b
        parts.append(f"m={m}: {a:.1f}<{b:.1f}" if a < b else f"m={m}: {a:.1f}>={b:.1f}")
    return ok, "; ".join(parts)


def check_4():
    rows = run_nse_sweep(replace(BASE, ensembles=("pdct", "phadamard")))
    pred = nse_iro(ProblemDims(N, M, OMEGA_SQ))
    r_dct = _mean(rows, ensemble="pdct") / pred
    r_had = _mean(rows, ensemble="phadamard") / pred
    ok = all(0.85 <= r <= 1.15 for r in (r_dct, r_had))
    return ok, f"pdct/pred = {r_dct:.4f}, phadamard/pred = {r_had:.4f}"


def check_5():
    sigmas = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)
    rows = run_sigma_profile(replace(BASE, ensembles=("iro",), sigma_list=sigmas))
    pred = nse_iro(ProblemDims(N, M, OMEGA_SQ))
    means = {s: _mean(rows, sigma=s) for s in sigmas}
    worst = max(means.values()) / pred
    a, b = means[1e-4], means[1e-3]
    plateau = max(a, b) / min(a, b) - 1
    ok = worst <= 1.15 and plateau <= 0.05
    ratios = ", ".join(f"{s:g}:{v / pred:.3f}" for s, v in means.items())
    return ok, f"mean/pred per sigma [{ratios}]; plateau gap {plateau:.4f}"


def check_6():
    t0 = time.perf_counter()
    worst = 0.0
    for n, m, w2 in _grid():
        s = ao_saddle_numeric(n, m, w2)
        for got, want in ((s.beta_sq, (m - w2) / (n - m)), (s.t, m), (s.value, m - w2)):
            worst = max(worst, abs(got - want) / abs(want))
    secs = time.perf_counter() - t0
    return worst <= 1e-6 and secs < 1.0, f"max rel err {worst:.2e} over 25 points in {secs:.3f}s"


def check_7():
    worst = 0.0
    for n, m, w2 in _grid():
        w = math.sqrt(w2)
        worst = max(worst, abs(mcsv_ao_numeric(n, m, w).value / mcsv_bound_iro(n, m, w) - 1))
    n = 256
    exceptions, logged_before = [], _warning_count()
    for kf in (0.01, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15):
        w = width_closed_form_sparse(n, max(1, round(kf * n))).omega
        for mf in (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9):
            r = mcsv_bound_comparison(n, round(mf * n), w)
            if r["status"] == "iro_below_gaussian":
                exceptions.append((kf, mf))
    logged = _warning_count() - logged_before
    m, w = 100, 4.0
    g = mcsv_bound_gaussian(10**6 * m, m, w)
    lim = abs(mcsv_bound_iro(10**6 * m, m, w) - g) / g
    ok = worst <= 1e-6 and logged == len(exceptions) and lim <= 0.01
    return ok, (f"saddle vs closed form max rel err {worst:.2e}; (m/n, k/n) grid exceptions {len(exceptions)} "
                f"(logged {logged}); m<<n gap {lim:.2e}")


class _Counter(logging.Handler):
    count = 0

    def emit(self, record):
        if record.levelno >= logging.WARNING:
            _Counter.count += 1


_handler = _Counter()
logging.getLogger("irolasso").addHandler(_handler)


def _warning_count():
    return _Counter.count


def check_8():
    n, m, k = 128, 96, 5
    omega = width_closed_form_sparse(n, k).omega
    bound = mcsv_bound_iro(n, m, omega)
    vals = []
    for s in range(10):
        src = RandomSource(SEED).child("mcsv-accept", s)
        a = gen_iro(m, n, src)
        sig = random_sparse_signal(n, k, src.child("signal"))
        vals.append(empirical_mcsv(a, sig, restarts=20, iters=2000, src=src.child("restarts")).value)
    vals = np.array(vals)
    below = int(np.sum(vals < bound - 0.02))

    sq = gen_iro(64, 64, RandomSource(SEED).child("square"))
    sq_val = empirical_mcsv(sq, random_sparse_signal(64, 3, RandomSource(SEED)), restarts=4, iters=100,
                            src=RandomSource(SEED)).value
    svd_err = 0.0
    for i in range(5):
        a = gen_gaussian(8, 8, 1.0, RandomSource(SEED).child("svd", i)).entries
        est = empirical_mcsv(a, SparseSignal(np.eye(8)[0]), restarts=10, iters=4000,
                             src=RandomSource(SEED).child("svd-r", i), project=lambda v: v)
        svd_err = max(svd_err, abs(est.value - np.linalg.svd(a, compute_uv=False)[-1]))
    ok = below == 0 and abs(sq_val - 1) <= 1e-6 and svd_err <= 1e-3
    return ok, (f"bound {bound:.4f}; empirical min {vals.min():.4f} mean {vals.mean():.4f}; "
                f"{below}/10 runs below bound-0.02; square |v-1| {abs(sq_val - 1):.1e}; "
                f"whole-space max SVD err {svd_err:.1e}")


def check_9():
    hi, lo = math.ceil(1.5 * OMEGA_SQ), math.ceil(0.5 * OMEGA_SQ)
    parts, ok = [], True
    for ens in ("iro", "gaussian"):
        s_hi = float(np.mean(run_recovery_trials(ens, N, K, hi, 25, SEED) < 1e-6))
        s_lo = float(np.mean(run_recovery_trials(ens, N, K, lo, 25, SEED) < 1e-6))
        ok &= s_hi >= 0.9 and s_lo <= 0.1
        parts.append(f"{ens}: success {s_hi:.2f} at m={hi}, {s_lo:.2f} at m={lo}")
    return ok, "; ".join(parts)


def check_10():
    rng = np.random.default_rng(SEED)
    l1_worst = 0.0
    for i in range(100):
        dim = 2 if i % 2 == 0 else 3
        step = 2e-3 if dim == 2 else 2e-2
        v = rng.uniform(-2, 2, dim)
        r = step * rng.integers(round(0.1 / step), round(1.0 / step))
        axis = np.arange(-r, r + step / 2, step)
        pts = np.stack(np.meshgrid(*[axis] * dim, indexing="ij"), -1).reshape(-1, dim)
        pts = pts[np.abs(pts).sum(1) <= r + 1e-12]
        g = pts[np.argmin(((pts - v) ** 2).sum(1))]
        l1_worst = max(l1_worst, np.linalg.norm(project_l1_ball(v, r) - g) / (step * math.sqrt(dim)))
    l1_ok = l1_worst <= 1.0

    cone_ok = True
    for trial in range(5):
        src = RandomSource(SEED).child("cone", trial)
        sig = random_sparse_signal(16, 3, src)
        v = src.child("v").generator().standard_normal(16) * 2
        p = project_tangent_cone(v, sig)
        res = v - p
        cone_ok &= descent_cone_member(p, sig, tol=1e-9)
        cone_ok &= abs(p @ res) <= 1e-9 * max(1.0, v @ v)
        cone_ok &= min_dist_to_cone(res, sig)[1] <= 1e-9 * max(1.0, res @ res)
        g = src.child("w").generator()
        feas = [project_tangent_cone(u, sig) * g.uniform(0, 3) for u in g.standard_normal((1000, 16)) * 3]
        cone_ok &= np.linalg.norm(res) <= min(np.linalg.norm(v - w) for w in feas) + 1e-9

    parts, width_ok = [], True
    for n, k in ((64, 4), (128, 8), (256, 10)):
        x0 = np.zeros(n)
        x0[:k] = 1.0
        est = estimate_width_mc(SparseSignal(x0), 10_000, RandomSource(SEED).child("width", n, k))
        cf = width_closed_form_sparse(n, k).omega_sq
        z = (est.omega_sq - cf) / est.std_err
        width_ok &= abs(z) <= 3
        parts.append(f"({n},{k}) MC {est.omega_sq:.3f} vs CF {cf:.3f} = {z:+.1f} SE")
    ok = l1_ok and cone_ok and width_ok
    return ok, (f"l1 grid worst/res {l1_worst:.2f} ({'ok' if l1_ok else 'bad'}); cone KKT+samples "
                f"{'ok' if cone_ok else 'bad'}; width {'; '.join(parts)}")


def check_11(tmp_dir):
    commands = {
        "nse": ["nse", "--seed", str(SEED), "--ensembles", "iro,gaussian,pdct,phadamard", "--trials", "5"],
        "sigma-profile": ["sigma-profile", "--seed", str(SEED), "--trials", "5"],
        "mcsv": ["mcsv", "--seed", str(SEED), "--n", "64", "--k", "2", "--mcsv-seeds", "1",
                 "--mcsv-restarts", "2", "--mcsv-iters", "100"],
    }
    same = {}
    for name, argv in commands.items():
        outs = []
        for rep in range(2):
            path = f"{tmp_dir}/{name}-{rep}.csv"
            if cli_main([*argv, "-o", path]) != 0:
                return False, f"{name} exited non-zero"
            with open(path, "rb") as fh:
                outs.append(fh.read())
        same[name] = outs[0] == outs[1] and len(outs[0]) > 0
    return all(same.values()), ", ".join(f"{k}: {'identical' if v else 'DIFFERENT'}" for k, v in same.items())


# -- pytest wiring ----------------------------------------------------------------


def _report(n, ok, detail):
    RESULTS[n] = (ok, detail)
    line = f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    return line


@pytest.mark.parametrize("n", range(1, 11))
def test_criterion(n):
    ok, detail = globals()[f"check_{n}"]()
    line = _report(n, ok, detail)
    assert ok, line


def test_criterion_11(tmp_path):
    ok, detail = check_11(str(tmp_path))
    line = _report(11, ok, detail)
    assert ok, line


if __name__ == "__main__":
    import tempfile

    logging.basicConfig(level=logging.ERROR)
    failed = 0
    for n in range(1, 12):
        if n == 11:
            with tempfile.TemporaryDirectory() as d:
                ok, detail = check_11(d)
        else:
            ok, detail = globals()[f"check_{n}"]()
        _report(n, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
