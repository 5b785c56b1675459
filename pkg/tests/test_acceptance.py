"""Acceptance criteria, one test per criterion, each at its stated tolerance.

Every test prints a single ``[PASS]``/``[FAIL] criterion N: ...`` line; the
lines are collected again in the pytest terminal summary. Criteria the
implementation cannot meet are left failing rather than relaxed. Run
``python3 tests/test_acceptance.py`` for the lines without pytest.
"""

import json
import math
import time

import numpy as np
from scipy import optimize

from gibbs_scope import cli
from gibbs_scope import double_layer as dl
from gibbs_scope.bifurcation import Verdict, classify_gibbs, profile_minima
from gibbs_scope.certificates import lattice as lat
from gibbs_scope.certificates import meanfield as mf
from gibbs_scope.circle_kernel import (
    TWO_PI,
    HeatKernelSpec,
    QuadratureGrid,
    heat_kernel_density,
    integrate_periodic,
    transition_density,
    wrapped_gaussian_density,
)
from gibbs_scope.meanfield_rate import make_L_evaluator, u_domain
from oracles import G_oracle, brute_minima_1d

RESULTS = []


def report(n, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    print(line)
    RESULTS.append(line)
    return ok


def test_criterion_1_epsilon_star(tmp_path):
    out = tmp_path / "eps.json"
    start = time.perf_counter()
    code = cli.main(["epsilon-star", "--beta", "5", "--hbar", "0.16", "--t", "1", "--bracket", "0.3:0.4",
                     "--sensitivity", "--output", str(out)])
    elapsed = time.perf_counter() - start
    res = json.loads(out.read_text())["results"]
    eps, width = res["epsilon_star"], res["bisection_width"]
    alt = res["sensitivity"].get("epsilon_star")
    ok = code == 0 and 0.33481860 < eps < 0.33481863 and width <= 1e-9 and elapsed <= 30
    assert report(1, ok, f"eps*={eps:.10f} (target (0.33481860, 0.33481863)), width={width:.2e}, "
                         f"{elapsed:.1f}s; alternate convention eps*={alt} (informational)")


def test_criterion_2_basin_flip():
    beta, hb, t = 5.0, 0.16, 1.0
    lo, hi = u_domain(beta, hb)
    parts, ok = [], True
    basins = {}
    for eps in (0.3, 0.4):
        rep = profile_minima(beta, hb, eps, t)
        brute = brute_minima_1d(lambda U: G_oracle(U, beta, hb, eps, t, kmax=30), lo, hi)
        agree = len(brute) == rep.num_local and all(
            abs(m.location - x) < 1e-5 for m, (x, _) in zip(rep.local_minima, brute))
        ok &= rep.num_local == 2 and agree
        basins[eps] = np.sign(rep.best.location)
        parts.append(f"eps={eps}: {rep.num_local} minima, argmin U={rep.best.location:.6f}, "
                     f"brute-force agreement={agree}")
    ok &= basins[0.3] != basins[0.4]
    assert report(2, ok, "; ".join(parts))


def test_criterion_3_large_time():
    start = time.perf_counter()
    v = classify_gibbs(5.0, 0.16, 20.0)
    elapsed = time.perf_counter() - start
    cert = v.certificate
    ok = v.verdict is Verdict.GIBBS_EVIDENCE and "large-t certificate" in v.annotations and elapsed <= 60
    detail = f"verdict={v.verdict.value}, annotations={list(v.annotations)}, {elapsed:.1f}s"
    if cert is not None:
        detail += f", deviation={cert.deviation:.2e} < margin {cert.depth_margin / 2:.2e}"
    assert report(3, ok, detail)


def test_criterion_4_cor3_closed_form():
    worst_c, worst_t = 0.0, 0.0
    for beta in (0.1, 0.5, 1.0, 2.0, 5.0):
        for n in (1, 2):
            C = mf.mf_cfg_constant(mf.quadratic_rotator_spec(beta, n))
            closed = 4 * beta * (n + 1) * math.exp(beta)
            worst_c = max(worst_c, abs(C.value - closed) / closed)
            th = mf.thm2_threshold(beta, n, C.value)
            t_formula = -math.log(1 - 1 / (32 * beta ** 2 * (n + 1) ** 2 * math.exp(2 * beta))) / n
            root = optimize.brentq(lambda t: th.condition(t) - 1, 0, 10 * t_formula, xtol=1e-300, rtol=1e-15)
            worst_t = max(worst_t, abs(t_formula - root), abs(th.t_max - root))
    ok = worst_c < 1e-8 and worst_t < 1e-12
    assert report(4, ok, f"max rel error of C(F,g)={worst_c:.1e}, max |t_max - root|={worst_t:.1e}")


def test_criterion_5_kernel_oracle():
    theta = TWO_PI * np.arange(64) / 64
    worst = max(np.max(np.abs(heat_kernel_density(theta, HeatKernelSpec(t)) - wrapped_gaussian_density(theta, 2 * t)))
                for t in (0.05, 0.2, 1.0, 5.0))
    grid = QuadratureGrid(1024)
    semi = 0.0
    for s in (0.25, 0.5, 1.0):
        for t in (0.25, 0.5, 1.0):
            lhs = integrate_periodic(lambda p: transition_density(0.7, p, HeatKernelSpec(s))
                                     * transition_density(p, 2.9, HeatKernelSpec(t)), grid)
            semi = max(semi, abs(lhs - transition_density(0.7, 2.9, HeatKernelSpec(s + t))))
    ok = worst < 1e-10 and semi < 1e-8
    assert report(5, ok, f"max |q_t - wrapped(2t)|={worst:.1e}, semigroup error={semi:.1e}")


def test_criterion_6_convexity():
    step = 0.05
    U = np.arange(-10.0, 10.0 + step / 2, step)
    worst = math.inf
    for eps in (0.1, 0.3, 0.5):
        for t in (0.5, 1.0, 2.0):
            L = make_L_evaluator(eps, t)(U)
            worst = min(worst, float(((L[2:] - 2 * L[1:-1] + L[:-2]) / step ** 2).min()))
    assert report(6, worst >= -1e-9, f"min second difference of L={worst:.3e}")


def test_criterion_7_dobrushin():
    bJ = (0.05, 0.1, 0.2, 0.4)
    t_max = [lat.genthm_t_max(lat.LatticeInteractionSpec(b)) for b in bJ]
    decreasing = all(a > b for a, b in zip(t_max, t_max[1:]))
    zero = lat.LatticeInteractionSpec(0.0)
    beta0 = math.isinf(lat.genthm_t_max(zero)) and all(lat.genthm_certificate(zero, t).holds for t in (0.1, 10, 1e4))
    c = 0.2
    ring = lat.DobrushinMatrix.from_offsets(8, 1, {(1,): c, (-1,): c})
    neumann = abs(lat.neumann_series(ring).row_sum_sup - 1 / (1 - 2 * c))
    ok = decreasing and beta0 and neumann < 1e-12
    assert report(7, ok, f"t_max={[round(x, 6) for x in t_max]} strictly decreasing={decreasing}; "
                         f"beta=0 holds for all t={beta0}; Neumann error={neumann:.1e}")


def test_criterion_8_fineness():
    parts, ok = [], True
    for name, cert in (("fineapp", lat.fineapp_certificate(lat.LatticeInteractionSpec(0.3), 0.01)),
                       ("prop1", mf.fineness_certificate_mf(mf.cor3_constant(0.1, 1), 0.01))):
        M = cert.min_arcs
        good = (0 < cert.rho_max < math.inf and mf.arc_diameter(M) < cert.rho_max
                and (M == 1 or mf.arc_diameter(M - 1) >= cert.rho_max))
        ok &= good
        parts.append(f"{name}: rho_max={cert.rho_max:.6f}, M={M}")
    assert report(8, ok, "; ".join(parts))


def _brute_region_minimum(p, mask_fn, n=2001):
    g = TWO_PI * np.arange(n) / n
    phi = dl.make_potential(p)
    best = (math.inf, None)
    for i, a in enumerate(g):
        v = phi(np.full(n, a), g)
        v = np.where(mask_fn(a, g), v, np.inf)
        j = int(np.argmin(v))
        if v[j] < best[0]:
            best = (float(v[j]), (a, g[j]))
    return best


def test_criterion_9_spin_flop():
    sym = dl.ground_states(dl.PairPotentialParams(20.0, 1.0, 0.0, 1.0, 0.0))
    n_glob = len(sym.global_minima)
    sym_ok = n_glob == 2 and abs(sym.global_minima[0].depth - sym.global_minima[1].depth) <= 1e-12
    pi2 = dl.basin_depths(dl.PairPotentialParams(20.0, 1.0, 0.0, 1.0, math.pi / 2))

    beta, J, h = 5.0, 1.0, 0.5
    t = dl.default_time(beta, h)
    res = dl.spin_flop_epsilon(beta, J, h, t, dl.find_spin_flop_bracket(beta, J, h, t))
    p = dl.PairPotentialParams(beta, J, h, t, res.epsilon)
    rep = dl.ground_states(p)
    two = len(rep.global_minima) == 2 and {m.form for m in rep.global_minima} == {"north", "south"}
    oracle = True
    for m in rep.global_minima:
        north = m.form == "north"
        mask = (lambda a, g: (np.cos(a) + np.cos(g)) > 0) if north else (lambda a, g: (np.cos(a) + np.cos(g)) < 0)
        depth, loc = _brute_region_minimum(p, mask)
        oracle &= dl._torus_distance(m.location, loc) < 1e-4 + TWO_PI / 2001 and m.depth <= depth + 1e-12
    forms = [dl.ground_states(p.with_epsilon(res.epsilon + s)).global_minima for s in (-1e-3, 1e-3)]
    jump = len(forms[0]) == len(forms[1]) == 1 and forms[0][0].form != forms[1][0].form
    ok = sym_ok and two and oracle and jump
    assert report(9, ok, f"h=0, eps=0, beta=20: {n_glob} global minimum at "
                         f"{tuple(round(x, 6) for x in sym.global_minima[0].location)} (two required); "
                         f"h=0 pair at eps=pi/2 differs by {abs(pi2.difference):.1e} (informational); "
                         f"spin flop eps*={res.epsilon:.12f}, two equal-depth minima={two}, "
                         f"grid oracle={oracle}, argmin jump={jump}")


def test_criterion_10_recovery():
    r = dl.recovery_check(1.0, 2.0, 5.0, 40.0)
    match = r.relative_mismatch <= 0.05
    dets = [np.linalg.det(dl.reference_recovery_form(1.0, h, 40.0)[1]) for h in (-1e-6, 0.0, 1e-6)]
    flip = dets[0] < 0 < dets[2] and abs(dets[1]) < 1e-12
    ok = match and flip
    assert report(10, ok, f"Hessian mismatch vs reference form={r.relative_mismatch:.3g} in s=sigma/(2pi) "
                          f"({r.relative_mismatch_alt:.3g} against H_sigma/(2pi)^2), 5% required; "
                          f"reference determinant flips at h=0={flip}")


if __name__ == "__main__":
    import inspect
    import tempfile
    from pathlib import Path

    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            kwargs = {"tmp_path": Path(tempfile.mkdtemp())} if "tmp_path" in inspect.signature(fn).parameters else {}
            try:
                fn(**kwargs)
            except AssertionError:
                pass
