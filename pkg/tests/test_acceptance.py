"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Tolerances are pinned here on purpose; they must not drift with the library defaults.
"""
import time
from collections import defaultdict

import numpy as np
import pytest

from conftest import record_acceptance
from oracles import enumerate_compose, enumerate_sum, span_projector, stabilized
from sspectral import harness as hs

PER_OPERATOR = [s for s in hs.SUITES if s not in ("algebra", "relations")]
HINF_SUITES = ("hinfty-left", "hinfty-right", "product-rules", "rational")


def scenario(kind, d, count, seed, **params):
    return hs.ScenarioConfig.from_dict({
        "generator": {"kind": kind, "params": params}, "n": 2, "d": d,
        "sector": {"omega": 0.6, "phi": 0.9, "theta": 1.2},
        "seed": seed, "count": count, "suites": PER_OPERATOR,
    })


@pytest.fixture(scope="module")
def diagonal_report():
    # ten operators, the last with one zero diagonal entry
    return hs.run_suite(scenario("DiagonalModel", 4, 10, 2024, kernel_ops=[9]))


@pytest.fixture(scope="module")
def similarity_report():
    return hs.run_suite(scenario("SimilarityModel", 3, 5, 2024, max_cond=50))


def select(report, suite, op=None, check=None):
    out = []
    for r in report.records:
        parts = r.name.split("/")
        if parts[0] != suite or (op is not None and parts[1] != op):
            continue
        if check is not None and "/".join(parts[2:]) != check:
            continue
        out.append(r)
    return out


def worst(records):
    vals = [r.residual for r in records if r.residual is not None]
    return max(vals) if vals else float("nan")


def conclude(number, title, failures, detail):
    passed = not failures
    record_acceptance(number, title, passed, detail)
    assert passed, failures


def test_criterion_01_algebra():
    failures, resid = [], 0.0
    start = time.perf_counter()
    for n in (1, 2, 3):
        cfg = hs.ScenarioConfig.from_dict({"generator": {"kind": "DiagonalModel"}, "n": n, "d": 1,
                                           "seed": 5, "suites": ["algebra"],
                                           "options": {"algebra_samples": 10_000}})
        report = hs.run_suite(cfg)
        for r in report.records:
            if r.tolerance != 1e-12 or r.status != "pass":
                failures.append(r)
        resid = max(resid, worst(report.records))
    elapsed = time.perf_counter() - start
    if elapsed >= 5.0:
        failures.append(f"runtime {elapsed:.2f}s")
    conclude(1, "algebra identities at 1e-12 on 10^4 samples, n in {1,2,3}", failures,
             f"max residual {resid:.2e}, {elapsed:.2f}s")


def test_criterion_02_resolvent(diagonal_report):
    series = select(diagonal_report, "resolvent", check="neumann-series")
    ident = (select(diagonal_report, "resolvent", check="resolvent-equation")
             + select(diagonal_report, "resolvent", check="sum-difference-identities"))
    failures = [r for r in series if not r.residual < 1e-9]
    failures += [r for r in ident if not r.residual < 1e-10]
    pairs = 20 * len(series)
    if pairs < 20:
        failures.append(f"only {pairs} series pairs")
    conclude(2, "Neumann series at 1e-9 and resolvent identities below 1e-10", failures,
             f"{pairs} pairs, series {worst(series):.2e}, identities {worst(ident):.2e}")


def test_criterion_03_lemma_estimates(diagonal_report):
    failures, samples = [], []
    for k in range(5):
        recs = select(diagonal_report, "lemma-estimates", op=f"op{k}")
        failures += [r for r in recs if r.status != "pass"]
        count = [r for r in recs if r.name.endswith("sample-count")]
        if not count or count[0].residual < 500:
            failures.append(f"op{k}: fewer than 500 samples")
        else:
            samples.append(int(count[0].residual))
        if len([r for r in recs if "/estimate-" in r.name]) != 4:
            failures.append(f"op{k}: missing estimates")
    conclude(3, "norm estimates with empirical C_phi, zero violations", failures,
             f"5 operators, d=4, n=2, >= {min(samples, default=0)} samples each")


def test_criterion_04_decomposition(diagonal_report):
    failures = [r for r in select(diagonal_report, "decomposition")
                if r.name.split("/")[-1] in ("dimension-sum", "principal-angle") and r.status != "pass"]
    angles = [r for r in select(diagonal_report, "decomposition", check="principal-angle")]
    failures += [r for r in angles if not r.residual > 1e-6]
    kernel_ops = [r.name.split("/")[1] for r in angles if r.detail != "dim ker=0"]
    if kernel_ops != ["op9"]:
        failures.append(f"operators with kernel: {kernel_ops}")
    for suite in HINF_SUITES:
        rec = select(diagonal_report, suite, op="op9")
        if [r.status for r in rec] != ["skip"]:
            failures.append(f"{suite} not skipped for op9")
    conclude(4, "kernel/range decomposition, H-infinity skipped on the kernel operator", failures,
             f"{len(angles)} operators, min angle {min(r.residual for r in angles):.3g}")


def test_criterion_05_rn_density(diagonal_report):
    recs = select(diagonal_report, "rn-density")
    final = [r for r in recs if r.name.endswith("error-at-1e6")]
    mono = [r for r in recs if r.name.endswith("monotone-decrease")]
    failures = [r for r in final if not r.residual < 1e-6] + [r for r in mono if r.status != "pass"]
    if {r.name.split("/")[2] for r in final} != {"m1", "m2"}:
        failures.append("missing exponent")
    conclude(5, "r_n approximants converge below 1e-6 at n=10^6, monotone", failures,
             f"max error {worst(final):.2e}")


def test_criterion_06_omega(diagonal_report, similarity_report):
    failures, alg, inv, slowest = [], [], [], 0.0
    for report in (diagonal_report, similarity_report):
        runtime = defaultdict(float)
        for r in select(report, "omega"):
            runtime[r.name.split("/")[1]] += r.runtime
            if r.name.endswith("-vs-algebraic"):
                alg.append(r)
                if not r.residual <= 1e-8:
                    failures.append(r)
            elif r.name.endswith("contour-invariance"):
                inv.append(r)
                if not r.residual <= 1e-7:
                    failures.append(r)
        slowest = max(slowest, max(runtime.values()))
    if slowest >= 30.0:
        failures.append(f"slowest operator {slowest:.1f}s")
    if {r.name.split("/")[2] for r in alg} != {"f12", "f33"}:
        failures.append("missing test function")
    conclude(6, "omega calculus vs algebraic evaluation at 1e-8, invariance at 1e-7", failures,
             f"algebraic {worst(alg):.2e}, invariance {worst(inv):.2e}, slowest {slowest:.2f}s")


def test_criterion_07_left_hinf(diagonal_report, similarity_report):
    recs = []
    for report in (diagonal_report, similarity_report):
        recs += select(report, "hinfty-left", check="identity") + select(report, "hinfty-left", check="square")
    failures = [r for r in recs if not r.residual <= 1e-7]
    if len(recs) < 2 * 14:
        failures.append(f"only {len(recs)} checks")
    conclude(7, "left H-infinity reproduces T and T^2 at 1e-7", failures,
             f"{len(recs)} checks, max {worst(recs):.2e}")


def test_criterion_08_right_hinf(diagonal_report, similarity_report):
    names = ("m-independence", "intrinsic-vs-left", "decaying-vs-omega")
    recs = []
    for report in (diagonal_report, similarity_report):
        for name in names:
            recs += select(report, "hinfty-right", check=name)
    failures = [r for r in recs if not r.residual <= 1e-7]
    conclude(8, "right H-infinity independent of m and consistent at 1e-7", failures,
             f"{len(recs)} checks, max {worst(recs):.2e}")


def test_criterion_09_rational(diagonal_report, similarity_report):
    recs = []
    for report in (diagonal_report, similarity_report):
        recs += select(report, "rational", check="operator-discrepancy")
    failures = [r for r in recs if not r.residual <= 1e-7]
    if len(recs) < 5:
        failures.append(f"only {len(recs)} operators")
    conclude(9, "rational calculus paths agree at 1e-7", failures,
             f"{len(recs)} operators, max {worst(recs):.2e}")


def test_criterion_10_relations():
    cfg = hs.ScenarioConfig.from_dict({"generator": {"kind": "DiagonalModel"}, "n": 1, "d": 2,
                                       "seed": 9, "suites": ["relations"],
                                       "options": {"relation_cases": 16}})
    report = hs.run_suite(cfg)
    failures = [r for r in report.records if r.status != "pass" or r.tolerance != 1e-10]
    # cross-check a few cases against the independent enumeration
    rng = np.random.default_rng(99)
    for d in (1, 2):
        N = 2 * d
        GA = rng.integers(-1, 2, size=(2 * N, 1)).astype(float)
        GB = rng.integers(-1, 2, size=(2 * N, 1)).astype(float)
        GA, GB = stabilized(GA), stabilized(GB)
        for ours, ref in ((hs.brute_force_sum, enumerate_sum), (hs.brute_force_compose, enumerate_compose)):
            P = span_projector(ref(GA, GB, N))
            Q = ours(GA, GB, 1, d).projector()
            if np.linalg.norm((P if P is not None else 0 * Q) - Q) >= 1e-10:
                failures.append(f"{ours.__name__} d={d}")
    conclude(10, "relation sum/compose match enumeration at 1e-10, outputs e_i-stable", failures,
             f"{len(report.records)} checks, max {worst(report.records):.2e}")


def test_criterion_11_product_rules(diagonal_report, similarity_report):
    eq, inc = [], []
    for report in (diagonal_report, similarity_report):
        for r in select(report, "product-rules"):
            if r.status == "skip":
                continue
            (inc if r.tolerance == 1e-8 else eq).append(r)
    failures = [r for r in eq if not (r.tolerance == 1e-7 and r.residual <= 1e-7)]
    failures += [r for r in inc if not r.residual <= 1e-8]
    if not eq or not inc:
        failures.append("missing equality or inclusion checks")
    conclude(11, "linearity/product equalities at 1e-7, inclusions at 1e-8", failures,
             f"equality max {worst(eq):.2e}, inclusion max {worst(inc):.2e}")
