"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import mpmath as mp
import numpy as np
import pytest

from wavescope.config import RunConfig
from wavescope.document import run_portrait
from wavescope.figures import common_zero_lambda
from wavescope.portrait import (
    HamiltonianField,
    build_portrait,
    find_critical_points,
    integrate_streamline,
    level_topology,
    sweep_merge_tracking,
)
from wavescope.stagnation import (
    bed_stagnation_feasible,
    class4_lambda_threshold,
    class4_y0_bound,
    feasible_region_sample,
    max_level,
    stagnation_levels,
)
from wavescope.wave_model import (
    WaveClassId,
    WaveParameters,
    background_current,
    bifurcation_rhs,
    sturm_residual,
    thetas,
    velocity_field,
)

from .conftest import draw_params

H = 1e-4
ALPHA0, EPS = -20.0, 0.05


def report(capsys, n, checks):
    """Print one line for criterion ``n`` and fail on any false sub-check."""
    ok = all(v for _, v in checks)
    failed = [name for name, v in checks if not v]
    detail = "all sub-checks hold" if ok else "failed: " + "; ".join(failed)
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def fd_kind(f, x, y):
    Hf = f.H
    hxx = (Hf(x + H, y) - 2 * Hf(x, y) + Hf(x - H, y)) / H**2
    hyy = (Hf(x, y + H) - 2 * Hf(x, y) + Hf(x, y - H)) / H**2
    hxy = (Hf(x + H, y + H) - Hf(x + H, y - H) - Hf(x - H, y + H) + Hf(x - H, y - H)) / (4 * H * H)
    return "saddle" if hxx * hyy - hxy * hxy < 0 else "center"


H4 = 1.5e-3


def laplacian4(fn, x, y, h=H4):
    """Fourth-order five-point-per-axis Laplacian.

    G reaches ~130 for W4, where a second-order stencil loses more than 1e-6
    to rounding at any step size; this one stays near 2e-7.
    """
    c = (-1.0, 16.0, -30.0, 16.0, -1.0)
    d = (-2, -1, 0, 1, 2)
    xx = sum(ci * fn(x + di * h, y) for ci, di in zip(c, d))
    yy = sum(ci * fn(x, y + di * h) for ci, di in zip(c, d))
    return (xx + yy) / (12 * h * h)


def upper_level_points(pts):
    top = max(p.level_index for p in pts)
    return top, [p for p in pts if p.level_index == top]


def test_criterion_1_fig3_structure(capsys):
    cfg = RunConfig(alpha0=ALPHA0, lam=4.39, epsilon=EPS)
    run_portrait(cfg)  # compile kernels outside the timed run
    t0 = time.perf_counter()
    doc = run_portrait(cfg)
    elapsed = time.perf_counter() - t0

    th0 = math.sqrt(20)
    closed = [1 + (n * math.pi - 4.39) / th0 for n in (0, 1)]
    f = lambda y: mp.sin(mp.sqrt(20) * (y - 1) + mp.mpf("4.39"))  # noqa: E731
    oracle = [float(mp.findroot(f, b, solver="bisect")) for b in [(0.0, 0.3), (0.5, 0.9)]]
    levels = [s["y0"] for s in doc.stagnation]
    layers_with_points = sorted({c["level_index"] for c in doc.critical_points if c["level_index"] >= 0})

    pts = find_critical_points(HamiltonianField(WaveParameters.create(ALPHA0, 4.39, EPS)))
    top, upper = upper_level_points(pts)
    report(capsys, 1, [
        ("2 critical layers", len(levels) == 2 and layers_with_points == [0, 1]),
        ("levels within 1e-3 of closed form", all(abs(a - b) < 1e-3 for a, b in zip(levels, closed))),
        ("levels within 1e-3 of bisection", all(abs(a - b) < 1e-3 for a, b in zip(levels, oracle))),
        ("upper layer ii.b", level_topology(pts, top) == "ii.b"),
        ("saddle within 0.05 of pi/2",
         any(p.kind == "saddle" and abs(p.x - math.pi / 2) < 0.05 for p in upper)),
        (f"runtime {elapsed:.2f}s < 5s", elapsed < 5.0),
    ])


def test_criterion_2_fig3_transition(capsys):
    p = WaveParameters.create(ALPHA0, 4.60, EPS)
    pts = find_critical_points(HamiltonianField(p))
    top, upper = upper_level_points(pts)
    sweep = sweep_merge_tracking(ALPHA0, EPS, (4.30, 4.60), 31, "positive", merge_tol=1e-10)
    inside = [m for m in sweep.merges if 4.30 < m.lam < 4.60]
    # independent check of the located merge: saddle present on one side, gone on the other
    bracketed = False
    if inside:
        lam = inside[0].lam

        def has_half_pi_saddle(lv):
            q = find_critical_points(HamiltonianField(WaveParameters.create(ALPHA0, lv, EPS)), safety_net=False)
            return any(c.provenance == "common_zero_at_half_pi" and c.level_index >= 0 and c.kind == "saddle"
                       for c in q)

        bracketed = has_half_pi_saddle(lam - 1e-4) != has_half_pi_saddle(lam + 1e-4)
    topo = level_topology(pts, top)
    report(capsys, 2, [
        ("pi/2 saddle absent at 4.60", not any(q.kind == "saddle" and abs(q.x - math.pi / 2) < 0.05 for q in upper)),
        (f"upper layer ii.a at 4.60 (found {topo})", topo == "ii.a"),
        ("merge lambda located in (4.30, 4.60)", bool(inside)),
        ("merge bracketed to 1e-4", bracketed),
    ])


def test_criterion_3_stagnation_endpoints(capsys):
    bands = feasible_region_sample([-1.0])
    w2 = bands[0]
    thresholds_ok = True
    monotone_ok = bounded_ok = True
    for alpha0 in (0.5, 4.0, 30.0):
        lmin = class4_lambda_threshold(alpha0)
        (lv,) = stagnation_levels(WaveParameters.create(alpha0, lmin))
        thresholds_ok &= abs(lv.y0) < 1e-10
        thresholds_ok &= abs(float(background_current(WaveParameters.create(alpha0, lmin), 0.0))) < 1e-10
        lam2 = np.linspace(lmin**2, 100 * lmin**2, 100)
        ys = [stagnation_levels(WaveParameters.create(alpha0, math.sqrt(v)))[0].y0 for v in lam2]
        monotone_ok &= all(b >= a for a, b in zip(ys, ys[1:]))
        bounded_ok &= all(y < class4_y0_bound(alpha0) for y in ys)
    report(capsys, 3, [
        ("W2 band [0, 1-pi/4] to 1e-10", w2.y0_min == 0.0 and abs(w2.y0_max - (1 - math.pi / 4)) < 1e-10),
        ("W4 threshold gives Y0=0 to 1e-10", thresholds_ok),
        ("W4 Y0 monotone in lambda^2", monotone_ok),
        ("W4 Y0 below the arctanh bound", bounded_ok),
    ])


def test_criterion_4_hamiltonian_identity(capsys):
    rng = np.random.default_rng(4)
    worst = 0.0
    for cls in WaveClassId:
        for _ in range(10):
            f = HamiltonianField(draw_params(rng, cls, EPS))
            xs = rng.uniform(-math.pi, math.pi, 1000)
            ys = rng.uniform(0.0, 1.0, 1000)
            u, v = f.velocity(xs, ys)
            hy = (f.H(xs, ys + H) - f.H(xs, ys - H)) / (2 * H)
            hx = (f.H(xs + H, ys) - f.H(xs - H, ys)) / (2 * H)
            worst = max(worst, float(np.max(np.abs(hy - u))), float(np.max(np.abs(hx + v))))
    report(capsys, 4, [(f"max residual {worst:.2e} < 1e-6", worst < 1e-6)])


def test_criterion_5_conservation(capsys):
    rng = np.random.default_rng(5)
    worst = 0.0
    statuses = set()
    for cls in WaveClassId:
        # 5 waves x 10 starts = 50 streamlines per class
        for _ in range(5):
            f = HamiltonianField(draw_params(rng, cls, EPS))
            for _ in range(10):
                start = (float(rng.uniform(-math.pi, math.pi)), float(rng.uniform(0.0, 1.0)))
                s = integrate_streamline(f, start, t_span=50.0, tol=1e-10, stop_on_return=False)
                statuses.add(s.status)
                worst = max(worst, s.h_drift)
    report(capsys, 5, [(f"max relative drift {worst:.2e} < 1e-7 over {sorted(statuses)}", worst < 1e-7)])


def test_criterion_6_analytic_structure(capsys):
    rng = np.random.default_rng(6)
    div = sturm = lap = 0.0
    for cls in WaveClassId:
        for _ in range(5):
            p = draw_params(rng, cls, EPS)
            for _ in range(20):
                x, y = float(rng.uniform(-math.pi, math.pi)), float(rng.uniform(H, 1.0))
                ux = (velocity_field(p, x + H, y).u - velocity_field(p, x - H, y).u) / (2 * H)
                vy = (velocity_field(p, x, y + H).v - velocity_field(p, x, y - H).v) / (2 * H)
                div = max(div, abs(ux + vy))
                sturm = max(sturm, abs(sturm_residual(p, y)))
                # V1 = sin(X) G(Y) solves Laplace(V1) = alpha0 V1
                V1 = lambda a, b: velocity_field(p, a, b).v / p.epsilon  # noqa: E731
                lap = max(lap, abs(laplacian4(V1, x, y) - p.alpha0 * V1(x, y)))
    report(capsys, 6, [
        (f"divergence {div:.1e} < 1e-6", div < 1e-6),
        (f"Sturm residual {sturm:.1e} < 1e-6", sturm < 1e-6),
        (f"Laplace residual {lap:.1e} < 1e-6", lap < 1e-6),
    ])


def common_zero_cases(count=20):
    cases = []
    for alpha0 in np.linspace(-6.0, -80.0, 60):
        alpha0 = float(alpha0)
        _, th1 = thetas(alpha0)
        for m in range(1, int(th1 / math.pi) + 1):
            for n in range(-3, 6):
                lam = common_zero_lambda(alpha0, m, n)
                if 0 < lam < 2 * math.pi and m * math.pi / th1 < 1:
                    r = bifurcation_rhs(alpha0, lam)
                    if r > 1e-3 and math.isfinite(r):
                        cases.append((alpha0, lam, m))
    step = max(1, len(cases) // count)
    return cases[::step][:count]


def test_criterion_7_classification(capsys):
    cases = common_zero_cases()
    kinds_agree = True
    saddles = 0
    for alpha0, lam, m in cases:
        p = WaveParameters.create(alpha0, lam, 0.02)
        f = HamiltonianField(p)
        pts = find_critical_points(f)
        for c in pts:
            if c.kind != "degenerate":
                kinds_agree &= fd_kind(f, c.x, c.y) == c.kind
        y_star = m * math.pi / p.theta1
        saddles += any(
            c.kind == "saddle" and abs(c.x - math.pi / 2) < 1e-6 and abs(c.y - y_star) < 1e-9 for c in pts
        )
    for lam in (4.39, 4.60):
        f = HamiltonianField(WaveParameters.create(ALPHA0, lam, EPS))
        for c in find_critical_points(f):
            kinds_agree &= fd_kind(f, c.x, c.y) == c.kind
    report(capsys, 7, [
        ("analytic kind equals finite-difference kind", kinds_agree),
        (f"saddle at (pi/2, Y*) in {saddles}/{len(cases)} common-zero cases", saddles == len(cases) == 20),
    ])


def test_criterion_8_region(capsys):
    alphas = [-5.0, -1.0, 1.0, 10.0, 100.0]
    bands = feasible_region_sample(alphas + [-10.0])
    tops = [max_level(bands, a) for a in alphas]
    certs_ok = True
    for b in bands:
        for y0, lam in b.certificates:
            certs_ok &= abs(float(background_current(WaveParameters.create(b.alpha0, lam), y0))) < 1e-10
    report(capsys, 8, [
        ("bed feasible iff alpha0 >= -pi^2",
         all(bed_stagnation_feasible(bands, a) == (a >= -math.pi**2) for a in alphas + [-10.0])),
        ("max Y0 strictly increasing", all(b > a for a, b in zip(tops, tops[1:]))),
        ("max Y0 below 1", tops[-1] < 1.0),
        ("certificates |U0(Y0)| < 1e-10", certs_ok and all(b.certificates for b in bands)),
    ])


def test_criterion_9_determinism(capsys, tmp_path):
    from wavescope.figures import reproduce_figures

    def tree(root):
        return {str(q.relative_to(root)): q.read_bytes() for q in sorted(root.rglob("*")) if q.is_file()}

    reproduce_figures(tmp_path / "a")
    reproduce_figures(tmp_path / "b")
    ta, tb = tree(tmp_path / "a"), tree(tmp_path / "b")
    report(capsys, 9, [
        (f"{len(ta)} files", len(ta) > 10),
        ("byte-identical trees", ta == tb),
    ])


@pytest.mark.parametrize("lam", [4.39, 4.60])
def test_fig3_portraits_build(lam):
    pp = build_portrait(WaveParameters.create(ALPHA0, lam, EPS), grid=(400, 200))
    assert pp.max_level_residual < 1e-8
