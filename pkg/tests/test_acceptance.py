"""Acceptance gate.

Each test checks one criterion and records a ``PASS``/``FAIL`` line that
is printed in the terminal summary (and immediately, under ``-s``).
"""
import json
import time

import numpy as np
import pytest

import conftest
from conftest import load_fixture
from oracles import brute_force_bilevel, ply_by_ply_AD, textbook_q
from lamopt.cli import main
from lamopt.clt import (MODES, QUASI_ISO, AngleSet, a_matrix, buckling_factor,
                        counts_of, d_matrix, xi_a, xi_d, zeta)
from lamopt.inner import RuleSetInner, retrieve_stacking
from lamopt.outer import compositions, design_margins
from lamopt.problem import DesignProblem
from lamopt.region import extreme_sequences, multinomial, verify_counts

QUASI = AngleSet(QUASI_ISO)


def record(number, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    conftest.ACCEPTANCE.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def small_count_reports():
    cases = [c for n in range(1, 9) for c in compositions(n, 4)]
    t0 = time.perf_counter()
    reports = [verify_counts(c, QUASI, m, samples=100, seed=i, tol=1e-9)
               for i, c in enumerate(cases) for m in MODES]
    return cases, reports, time.perf_counter() - t0


def test_c1_hull_theorem(small_count_reports):
    cases, reports, elapsed = small_count_reports
    n_pts = sum(r["n_sequences"] for r in reports)
    outside = sum(r["n_outside"] for r in reports)
    worst = max(r["max_hull_violation"] for r in reports)
    n8 = sum(sum(c) == 8 for c in cases)
    record(1, outside == 0 and n8 == 165 and elapsed < 60,
           f"{len(cases)} compositions with N<=8 ({n8} at N=8) x 2 modes, "
           f"{n_pts} sequence points, {outside} outside, max violation {worst:.1e}, "
           f"{elapsed:.1f} s (hull and support together)")


def test_c2_support_theorem(small_count_reports):
    cases, reports, _ = small_count_reports
    gap = max(r["max_support_gap"] for r in reports)
    contiguous = all(r["maximizers_contiguous"] for r in reports)
    record(2, gap <= 1e-9 and contiguous,
           f"{len(reports) * 100} directions, max support gap {gap:.1e}, "
           f"maximizers block-contiguous: {contiguous}")


def test_c3_uniform_stacks():
    worst = 0.0
    for a in QUASI.angles:
        z = zeta(a)
        idx = QUASI.index(a)
        for n in range(1, 33):
            seq = (idx,) * n
            worst = max(worst,
                        np.abs(xi_d(seq, QUASI, "midpoint") - (1 - 1 / (4 * n * n)) * z).max(),
                        np.abs(xi_d(seq, QUASI, "exact") - z).max())
    record(3, worst <= 1e-12, f"N=1..32, 4 angles, 2 modes, max error {worst:.1e}")


def test_c4_clt_consistency(material):
    rng = np.random.default_rng(2024)
    Q = textbook_q(material.E1, material.E2, material.G12, material.nu12)
    worst_a = worst_d = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 21))
        seq = tuple(int(k) for k in rng.integers(0, 4, size=n))
        A_ref, D_ref = ply_by_ply_AD(QUASI.to_angles(seq), Q, material.ply_thickness)
        D = d_matrix(xi_d(seq, QUASI, "exact"), n, material)
        A = a_matrix(xi_a(counts_of(seq, 4), QUASI), n, material)
        worst_d = max(worst_d, np.abs(D - D_ref).max() / np.abs(D_ref).max())
        worst_a = max(worst_a, np.abs(A - A_ref).max() / np.abs(A_ref).max())
    record(4, max(worst_a, worst_d) <= 1e-9,
           f"200 sequences N<=20, max relative error A {worst_a:.1e}, D {worst_d:.1e}")


@pytest.mark.parametrize("name", ["compression.json", "biaxial.json",
                                  "uniaxial.json", "tension.json"])
def test_c5_bilevel_optimality(name, tmp_path, capsys):
    data = load_fixture(name)
    problem = DesignProblem.from_dict(data)
    src, out = tmp_path / name, tmp_path / "result.json"
    src.write_text(json.dumps(data))
    code = main(["optimize", str(src), "-o", str(out)])
    capsys.readouterr()
    res = json.loads(out.read_text())

    def margin_fn(counts, seq):
        return design_margins(counts, xi_d(seq, problem.angles, problem.mode), problem)

    ref = brute_force_bilevel(problem, 8, margin_fn)
    seq = problem.angles.to_indices(res["stacking_sequence"])
    margins = design_margins(res["counts"], xi_d(seq, problem.angles, problem.mode), problem)
    worst = min(margins.values())
    ok = code == 0 and ref is not None and res["total_plies"] == ref[0] and worst >= -1e-7
    record(5, ok, f"{name}: optimize N={res.get('total_plies')}, brute force N="
                  f"{None if ref is None else ref[0]}, min design margin {worst:.3g}")


def test_c6_inner_oracle_equivalence():
    rng = np.random.default_rng(6)
    rule_sets = [RuleSetInner(),
                 RuleSetInner(max_contiguous=2),
                 RuleSetInner(outer_ply_angles=(45, -45), max_disorientation=45),
                 RuleSetInner(max_contiguous=3, outer_ply_angles=(45, -45),
                              max_disorientation=90)]
    agree = 0
    for _ in range(50):
        while True:
            counts = tuple(int(c) for c in rng.integers(0, 4, size=4))
            if 1 <= sum(counts) and multinomial(counts) <= 10**5:
                break
        ext = extreme_sequences(counts, QUASI)
        if rng.random() < 0.5:
            target = rng.dirichlet(np.ones(len(ext.points))) @ ext.points
        else:
            target = rng.uniform(-1, 1, size=4)
        rules = rule_sets[int(rng.integers(len(rule_sets)))]
        a = retrieve_stacking(counts, target, rules, QUASI, method="exhaustive")
        b = retrieve_stacking(counts, target, rules, QUASI, method="branch-and-bound")
        agree += (a.sequence, a.residual) == (b.sequence, b.residual) and b.exact
    record(6, agree == 50, f"{agree}/50 seeded targets agree in sequence and residual")


def test_c7_buckling_linearity(material, plate_loads):
    rng = np.random.default_rng(7)
    worst, same = 0.0, True
    for _ in range(20):
        n = int(rng.integers(2, 16))
        seq = tuple(int(k) for k in rng.integers(0, 4, size=n))
        D = d_matrix(xi_d(seq, QUASI), n, material)
        f, mode = buckling_factor(D, plate_loads)
        for c in (0.5, 2.0, 10.0):
            fc, mc = buckling_factor(c * D, plate_loads)
            worst = max(worst, abs(fc - c * f) / abs(c * f))
            same &= mc == mode
    record(7, worst <= 1e-12 and same,
           f"20 laminates x c in {{0.5, 2, 10}}, max relative error {worst:.1e}, "
           f"same critical mode: {same}")


def test_c8_determinism(tmp_path, capsys):
    outs = []
    for name in ("combined.json", "biaxial.json"):
        src = tmp_path / name
        src.write_text(json.dumps(load_fixture(name)))
        for t in (1, 8):
            dst = tmp_path / f"{name}.{t}"
            main(["optimize", str(src), "--threads", str(t), "-o", str(dst)])
            outs.append(dst.read_bytes())
    capsys.readouterr()
    record(8, outs[0] == outs[1] and outs[2] == outs[3],
           "threads 1 and 8 give byte-identical result files on 2 fixtures")
