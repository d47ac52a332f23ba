"""The eight acceptance criteria, each at its stated tolerance.

Every test records one ``criterion N PASS|FAIL: ...`` line, printed in the
terminal summary, before asserting.
"""

from __future__ import annotations

import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from permstab import io, zoo
from permstab.cone import ConeProblem, integer_kernel_point
from permstab.correct import stabilize
from permstab.harness import (
    brute_force_actions,
    kernel_cone_generators,
    perturb,
    random_honest_action,
    run_trial,
    trial_seed,
)
from permstab.lattice import dg_matrix, sharp
from permstab.schreier import perturb_pair, random_exact_pair, repair

ZOO5 = ["SL2Z", "F2xZ2", "F2xZ3", "Z2*Z3", "Z4-Z2+loop"]
SIZES = [12, 60, 600]


def record(log, n, ok, detail):
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {detail}"
    log.append(line)
    print(line)


@pytest.fixture(scope="module")
def zoo_trials():
    """1000 pipeline trials over the zoo and sizes, mixed perturbations."""
    gogs = {name: zoo.by_name(name) for name in ZOO5}
    gens = {name: kernel_cone_generators(g) for name, g in gogs.items()}
    combos = list(product(ZOO5, SIZES))
    start = time.perf_counter()
    records = []
    for i in range(1000):
        name, size = combos[i % len(combos)]
        k = 1 + (i // len(combos)) % 10
        records.append(run_trial(gogs[name], name, size, "mixed", k, trial_seed(2024, i), generators=gens[name]))
    return records, time.perf_counter() - start


@pytest.fixture(scope="module")
def sl2z_sweep():
    """SL₂(ℤ), k ∈ 1..20 transpositions, five seeds each, at three sizes."""
    g = zoo.sl2z()
    gens = kernel_cone_generators(g)
    start = time.perf_counter()
    out = {}
    for size in (60, 600, 6000):
        out[size] = [
            run_trial(g, "SL2Z", size, "transpositions", k, trial_seed(size, 100 * k + s), generators=gens)
            for k in range(1, 21)
            for s in range(5)
        ]
    return out, time.perf_counter() - start


def test_criterion_1_exactness(zoo_trials, acceptance_log):
    records, elapsed = zoo_trials
    exact = sum(1 for r in records if r.output_defect == 0)
    perturbed = sum(1 for r in records if r.delta > 0)
    ok = exact == len(records) == 1000 and elapsed < 300
    record(acceptance_log, 1, ok, f"{exact}/{len(records)} outputs have defect 0 ({perturbed} inputs perturbed), {elapsed:.0f}s")
    assert ok


def test_criterion_2_linear_constant(sl2z_sweep, acceptance_log):
    sweep, elapsed = sl2z_sweep
    maxima = {}
    for size, recs in sweep.items():
        ratios = [r.distance / r.delta for r in recs if r.delta > 0]
        maxima[size] = max(ratios)
    drift = max(maxima.values()) / min(maxima.values())
    ok = drift < 2 and elapsed < 600
    shown = ", ".join(f"|X|={s}: {float(m):.3f}" for s, m in maxima.items())
    record(acceptance_log, 2, ok, f"max distance/defect {shown}; drift {float(drift):.3f}x (< 2x), {elapsed:.0f}s")
    assert ok


def test_criterion_3_kernel_defect_bound(zoo_trials, sl2z_sweep, acceptance_log):
    records = zoo_trials[0] + [r for recs in sl2z_sweep[0].values() for r in recs]
    held = sum(1 for r in records if r.kernel_bound_ok)
    ok = held == len(records)
    record(acceptance_log, 3, ok, f"kernel defect <= 2 max|G_e|^2 delta |X| on {held}/{len(records)} trials")
    assert ok


def test_criterion_4_honest_in_kernel(acceptance_log):
    start = time.perf_counter()
    checked, bad = 0, 0
    for name, degrees in (("SL2Z", range(1, 5)), ("F1xZ2", range(1, 7))):
        g = zoo.by_name(name)
        dgm = dg_matrix(g)
        for n in degrees:
            for rho in brute_force_actions(g, n):
                checked += 1
                if any(dgm.apply(sharp(rho)).coords):
                    bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and checked > 0 and elapsed < 60
    record(acceptance_log, 4, ok, f"{checked} exhaustively enumerated honest actions, {bad} outside ker d, {elapsed:.1f}s")
    assert ok


def _exhaustive_optimum(p: ConeProblem) -> Fraction:
    cap = sum(p.lam)
    best = None
    n = p.ncols
    for y in product(range(cap + 1), repeat=n):
        if sum(y) > cap or any(p.apply(y)):
            continue
        d = p.distance(p.lam, y)
        if best is None or d < best:
            best = d
    return best


def test_criterion_5_cone_oracle(acceptance_log):
    rng = np.random.Generator(np.random.PCG64(55))
    start = time.perf_counter()
    failures, worst = 0, Fraction(0)
    for _ in range(500):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(1, 5))
        matrix = tuple(tuple(int(x) for x in rng.integers(-3, 4, size=n)) for _ in range(m))
        total = int(rng.integers(0, 21))
        cuts = sorted(int(x) for x in rng.integers(0, total + 1, size=n - 1))
        lam = tuple(b - a for a, b in zip([0] + cuts, cuts + [total]))
        p = ConeProblem(matrix, (1,) * n, (1,) * m, lam)
        sol = integer_kernel_point(p)
        opt = _exhaustive_optimum(p)
        good = (
            not any(p.apply(sol.lambda_prime))
            and all(x >= 0 for x in sol.lambda_prime)
            and sum(sol.lambda_prime) <= sum(lam)
            and sol.distance <= 2 * opt
        )
        if opt:
            worst = max(worst, sol.distance / opt)
        failures += not good
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 300
    record(acceptance_log, 5, ok, f"500 random problems, {failures} failures, worst distance/optimum {float(worst):.3f}, {elapsed:.0f}s")
    assert ok


def test_criterion_6_fix_constant(zoo_trials, sl2z_sweep, acceptance_log):
    records = zoo_trials[0] + [r for recs in sl2z_sweep[0].values() for r in recs]
    held = sum(1 for r in records if r.fix_bound_ok)
    ok = held == len(records)
    record(acceptance_log, 6, ok, f"d(rho, rho') <= 2|H||G|^2 delta at every fix step on {held}/{len(records)} trials")
    assert ok


def test_criterion_7_schreier_repair(acceptance_log):
    start = time.perf_counter()
    exact_all = True
    lines = []
    drifts = []
    for n in (2, 3, 4):
        consts = {}
        for m in (50, 500):
            ce = cv = Fraction(0)
            for edits in range(1, 11):
                for s in range(5):
                    a = random_exact_pair(2, n, m, seed=trial_seed(m, 10 * edits + s))
                    p = perturb_pair(a, edits, seed=trial_seed(m + 1, 10 * edits + s))
                    rep = repair(p.automorphism)
                    exact_all &= rep.automorphism.is_exact and rep.graph.vertices == m
                    # k counts perturbed vertices and edges; each swap touches two
                    k = p.vertex_edits + p.edge_edits
                    ce = max(ce, Fraction(rep.edge_diff, k))
                    cv = max(cv, Fraction(rep.vertex_diff, k))
            consts[m] = (ce, cv)
        e50, v50 = consts[50]
        e500, v500 = consts[500]
        de = max(e50, e500) / min(e50, e500) if min(e50, e500) else Fraction(1)
        dv = max(v50, v500) / min(v50, v500) if min(v50, v500) else Fraction(1)
        drifts.append(max(de, dv))
        lines.append(f"n={n}: C_edge {float(e50):.2f} vs {float(e500):.2f}, C_vertex {float(v50):.2f} vs {float(v500):.2f}")
    elapsed = time.perf_counter() - start
    ok = exact_all and max(drifts) < 2 and elapsed < 300
    record(acceptance_log, 7, ok, f"exact={exact_all}; {'; '.join(lines)} (|V| = 50 vs 500); max drift {float(max(drifts)):.3f}x, {elapsed:.0f}s")
    assert ok


def test_criterion_8_idempotence(acceptance_log):
    bad_idem = bad_round = 0
    checked = 0
    for i, name in enumerate(ZOO5 * 20):
        g = zoo.by_name(name)
        size = SIZES[i % 3]
        honest = random_honest_action(g, size, seed=trial_seed(8, i))
        rep = stabilize(honest)
        data = io.action_to_json(rep.output_action)
        if rep.distance != 0 or data != io.action_to_json(honest):
            bad_round += 1
        bent = perturb(honest, "mixed", 1 + i % 5, seed=trial_seed(9, i)).action
        first = stabilize(bent).output_action
        again = stabilize(first)
        if again.distance != 0 or io.action_to_json(again.output_action) != io.action_to_json(first):
            bad_idem += 1
        checked += 1
    ok = bad_idem == 0 and bad_round == 0
    record(acceptance_log, 8, ok, f"{checked} honest round trips ({bad_round} changed), {checked} re-stabilized outputs ({bad_idem} moved)")
    assert ok
