"""Acceptance criteria, one PASS/FAIL line each, at the stated tolerances.

Run with ``pytest -s tests/test_acceptance.py`` to see the report lines.
"""

import time

import numpy as np

from bfio.amplitude import build_circle, circle_amplitude_sum, combine
from bfio.butterfly import Plan, PlanConfig, apply
from bfio.oracle import benchmark, direct_full, relative_error, white_noise
from bfio.phase import get_phase

import test_butterfly as tb
import test_grid as tg
import test_lowrank as tl
import test_vecio as tv
from conftest import stage_errors

_BENCH = {}


def report(num, title, ok, detail):
    print(f"\nACCEPTANCE {num} {'PASS' if ok else 'FAIL'}: {title} -- {detail}")
    assert ok, f"criterion {num}: {detail}"


def bench(N, q, phase="ellipse"):
    key = (N, q, phase)
    if key not in _BENCH:
        pl = Plan(PlanConfig(N=N, q=q, phase=get_phase(phase)))
        _BENCH[key] = benchmark(pl, trials=1, seed=0)
    return _BENCH[key]


def mem_available() -> int:
    try:
        with open("/proc/meminfo") as fh:
            for line in fh:
                if line.startswith("MemAvailable:"):
                    return int(line.split()[1]) * 1024
    except OSError:
        pass
    return 0


def test_c1_oracle_equivalence_small():
    t0 = time.perf_counter()
    errs = {}
    for N in (16, 32, 64):
        f = white_noise(N, 0)
        for name in ("fourier", "ellipse", "circle"):
            ph = get_phase(name)
            u = apply(Plan(PlanConfig(N=N, q=9, phase=ph)), f)
            errs[(N, name)] = relative_error(u, direct_full(ph, N, f))
    dt = time.perf_counter() - t0
    worst = max(errs.values())
    detail = ", ".join(f"{n}/{N}={e:.2e}" for (N, n), e in errs.items())
    report(1, "full-grid error <= 1e-3 for N in {16,32,64}, q=9, all phases, < 60 s",
           worst <= 1e-3 and dt < 60, f"worst {worst:.2e}, {dt:.1f} s; {detail}")


REFERENCE_EPS = {5: (1.26e-2, 5), 7: (7.57e-4, 5), 9: (3.15e-5, 10), 11: (7.34e-7, 20)}


def test_c2_reference_accuracy_n256():
    rows, ok = [], True
    for q, (ref, k) in REFERENCE_EPS.items():
        e = bench(256, q).relative_error
        inside = ref / k <= e <= ref * k
        ok &= inside
        rows.append(f"q={q}: {e:.2e} vs {ref:.2e} (x{k}) {'ok' if inside else 'out'}")
    report(2, "ellipse N=256 sampled eps_a within the stated factors of the reference", ok, "; ".join(rows))


def test_c3_accuracy_trend_in_q():
    e = [bench(256, q).relative_error for q in (5, 7, 9, 11)]
    factor = (e[0] / e[-1]) ** (1 / 3)  # geometric mean per q-step of 2
    report(3, "average eps_a improvement per q += 2 at N=256 >= 10", factor >= 10,
           f"factor {factor:.2f}; eps_a = " + ", ".join(f"{v:.2e}" for v in e))


def test_c4_stability_in_n():
    e256 = bench(256, 7).relative_error
    e512 = bench(512, 7).relative_error
    ratio = e512 / e256
    report(4, "eps_a(512,7) within x3 of eps_a(256,7)", 1 / 3 <= ratio <= 3,
           f"{e512:.2e} / {e256:.2e} = {ratio:.2f}")


def test_c5_complexity_scaling():
    t256 = bench(256, 7).wall_time_fast
    t512 = bench(512, 7).wall_time_fast
    r1 = t512 / t256
    ok = r1 <= 5.5
    detail = f"T(512)/T(256) = {t512:.1f}/{t256:.1f} = {r1:.2f}"
    pl = Plan(PlanConfig(N=1024, q=7, phase=get_phase("ellipse")))
    widest = max(pl.n_pairs(a) for a in range(pl.a_start, pl.a_end + 1))
    need = 2 * widest * pl.q ** 2 * 16 + (1 << 30)
    if mem_available() > 1.5 * need:
        f = white_noise(1024, 0)
        t0 = time.perf_counter()
        apply(pl, f)
        t1024 = time.perf_counter() - t0
        r2 = t1024 / t512
        ok &= r2 <= 5.5
        detail += f"; T(1024)/T(512) = {t1024:.1f}/{t512:.1f} = {r2:.2f}"
    else:
        detail += f"; N=1024 skipped (needs ~{need / 2**30:.1f} GiB)"
    del pl
    report(5, "apply time ratio per doubling of N <= 5.5", ok, detail)


def test_c6_variable_amplitude():
    N = 256
    ap, am = build_circle(N, 1e-7, 0)
    pl = Plan(PlanConfig(N=N, q=9, phase=get_phase("circle")))
    r = benchmark(pl, seed=0, amp=combine(ap, am), amp_exact=circle_amplitude_sum, amp_name="circle")
    ok_s = ap.s == 3 and am.s == 3
    ok_e = r.relative_error <= 1e-3
    report(6, "circle example: s = 3 at eps_amp = 1e-7 and eps_a(256,9) <= 1e-3", ok_s and ok_e,
           f"s+ = {ap.s}, s- = {am.s} (residuals {ap.residual:.1e}, {am.residual:.1e}); eps_a = {r.relative_error:.2e}")


def test_c7_property_suite():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    results = {}

    def check(name, fn):
        try:
            fn()
            results[name] = "ok"
        except AssertionError as e:
            results[name] = f"FAILED ({str(e).splitlines()[0][:80]})"

    def unity():
        for q in range(2, 12):
            for a, b in rng.uniform(-0.5, 0.5, (20, 2)):
                tg.test_partition_of_unity.hypothesis.inner_test(q, a, b)
        tg.test_lagrange_1d_examples()
        tg.test_lagrange_2d_node_and_separability(rng)

    def reproduction():
        for q in (2, 5, 9, 11):
            tg.test_polynomial_reproduction(q, rng)

    def vanishing():
        tl.test_residual_vanishes_on_center_lines(rng)

    def switch_consistency():
        pl = Plan(PlanConfig(N=64, q=9, phase=get_phase("ellipse")))
        errs = stage_errors(pl, white_noise(64, 0))
        worst = max(e for name, _, e in errs if name in ("switch", "target"))
        assert worst <= 1e-3, f"worst post-switch relative error {worst:.2e}"

    def factored():
        tb.test_source_step_factored_matches_unfactored(rng)
        tb.test_target_step_factored_matches_unfactored(rng)
        tb.test_switch_matches_dense_kernel(rng)

    def vecio():
        import tempfile, pathlib
        with tempfile.TemporaryDirectory() as d:
            tv.test_round_trip_exact(pathlib.Path(d), rng)

    check("partition of unity + collocation", unity)
    check("polynomial reproduction", reproduction)
    check("linearity", tb.test_linearity)
    check("residual vanishing lines", vanishing)
    check("switch consistency 1e-3 (N=64,q=9)", switch_consistency)
    check("rank(1e-6) <= 121", tl.test_rank_bounded_across_levels)
    check("factored == unfactored 1e-12", factored)
    check("vector I/O round trip", vecio)
    dt = time.perf_counter() - t0
    ok = all(v == "ok" for v in results.values()) and dt < 120
    report(7, "property suite in < 2 minutes", ok,
           f"{dt:.1f} s; " + "; ".join(f"{k}: {v}" for k, v in results.items()))


def test_c8_substitutions():
    # documentation criterion: what replaces the non-reproducible rows
    report(8, "absolute 2008 timings, N = 2048/4096 rows and the 3-D table are substituted", True,
           "covered by the scaling ratios of criterion 5 and the property suite of criterion 7")
