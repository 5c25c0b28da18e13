"""One pass/fail line per acceptance criterion, printed in the terminal summary."""

import time

import numpy as np

import tasteleak as tl
from oracles import brute_force_joint, brute_force_vulnerability, make_linear, phenotype_r16, phenotype_r38, phi
from tasteleak.inference import crosscheck_scores, total_variation
from tasteleak.programs import format_centi
from tasteleak.utility import error_bound_probability, recommended, tradeoff_frontier

SIGMAS = (0.1, 0.5, 1.0, 2.0, 5.0)


def _record(log, number, ok, detail):
    log.append(f"C{number} {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def test_c1_r16_non_taster_gives_away_ethnicity(acceptance_log):
    start = time.perf_counter()
    table = tl.load_population_table()
    post = tl.condition_on_output(tl.exact_joint(table, tl.PHENOTYPE_R16), "non-taster").posterior
    elapsed = time.perf_counter() - start
    ok = post["African"] >= 0.999 and post["European"] == 0 and post["American"] == 0 and elapsed < 1.0
    assert _record(acceptance_log, 1, ok,
                   f"p(African|non-taster)={post['African']:.6f}, European={post['European']}, "
                   f"American={post['American']}, {elapsed * 1000:.0f} ms")


def test_c2_max_output_privacy(acceptance_log, joints):
    mop = {k: tl.max_output_privacy(j).score for k, j in joints.items()}
    near_one = [k for k in mop if k != tl.PHENOTYPE_R38]
    low = min(mop[k] for k in near_one)
    r38 = mop[tl.PHENOTYPE_R38]
    ok = low >= 0.99 and abs(r38 - 0.36) <= 0.02
    assert _record(acceptance_log, 2, ok, f"Ph_r38={r38:.4f}, min over the others={low:.6f}")


def test_c3_vulnerability_ordering(acceptance_log, joints):
    v = {k: tl.bayes_vulnerability(j) for k, j in joints.items()}
    oracle = {
        tl.PHENOTYPE_R38: phenotype_r38,
        tl.PHENOTYPE_R16: phenotype_r16,
        tl.LINEAR_SCORE: make_linear(),
    }
    worst = max(abs(v[k] - brute_force_vulnerability(brute_force_joint(f))) for k, f in oracle.items())
    noisy = [v[(tl.NOISY_SCORE, s)] for s in SIGMAS]
    ok = (
        abs(v[tl.PHENOTYPE_R16] - 0.2557) <= 0.002
        and abs(v[tl.PHENOTYPE_R38] - 0.2797) <= 0.002
        and v[tl.PHENOTYPE_R16] < v[tl.PHENOTYPE_R38] < v[tl.LINEAR_SCORE]
        and all(a > b for a, b in zip(noisy, noisy[1:]))
        and worst <= 1e-12
    )
    assert _record(acceptance_log, 3, ok,
                   f"V(Ph_r16)={v[tl.PHENOTYPE_R16]:.4f} < V(Ph_r38)={v[tl.PHENOTYPE_R38]:.4f} "
                   f"< V(L)={v[tl.LINEAR_SCORE]:.4f}; V(NL)={', '.join(f'{x:.4f}' for x in noisy)}; "
                   f"oracle gap {worst:.1e}")


def test_c4_dominant_linear_outputs(acceptance_log, joints):
    j = joints[tl.LINEAR_SCORE]
    pv = j.output_marginal
    top = np.argsort(pv)[::-1][:3]
    outputs = {j.outputs[i] for i in top}
    mass = float(pv[top].sum())
    v = tl.bayes_vulnerability(j)
    ok = outputs == {124, 931, 1737} and mass >= 0.85 and 0.35 <= v <= 0.50
    shown = ", ".join(format_centi(o) for o in sorted(outputs))
    assert _record(acceptance_log, 4, ok, f"top outputs {{{shown}}} carry {mass:.4f}; V(L)={v:.4f}")


def test_c5_error_bound_probabilities(acceptance_log):
    cases = [(0.5, 1.0, True), (0.1, 0.5, True), (0.5, 0.5, False), (0.1, 0.1, False)]
    parts, ok = [], True
    for sigma, delta, passes_line in cases:
        p = error_bound_probability(tl.NoiseSpec(sigma), delta)
        target = 2 * phi(delta / sigma) - 1
        good = abs(p - target) <= 0.01 and (p >= 0.9) == passes_line
        ok &= good
        parts.append(f"(s={sigma:g}, d={delta:g}) {p:.4f} vs {target:.4f}{'' if good else ' X'}")
    assert _record(acceptance_log, 5, ok, "; ".join(parts))


def test_c6_tradeoff_recommendation(acceptance_log, joints):
    rows = tradeoff_frontier(
        tl.bayes_vulnerability(joints[tl.LINEAR_SCORE]),
        {s: tl.bayes_vulnerability(joints[(tl.NOISY_SCORE, s)]) for s in SIGMAS},
    )
    best = recommended(rows, 1.0)
    ok = best is not None and best.program == tl.NOISY_SCORE and best.sigma == 0.5
    detail = "none" if best is None else f"{best.program} sigma={best.sigma} (V={best.bayes_vulnerability:.4f}, " \
                                         f"utility={best.error_bound:.4f})"
    assert _record(acceptance_log, 6, ok, f"delta=1 recommends {detail}")


def test_c7_property_suite(acceptance_log, table, weights, joints):
    failures = []
    for key, j in joints.items():
        if abs(j.table.sum() - 1) > 1e-9 or np.abs(j.ethnicity_marginal - 0.25).max() > 1e-9:
            failures.append(f"{key}: sums")
        v, mop = tl.bayes_vulnerability(j), tl.max_output_privacy(j).score
        if not 0.25 - 1e-12 <= v <= mop + 1e-12 <= 1 + 1e-12:
            failures.append(f"{key}: ordering")
    tv = total_variation(tl.exact_joint(table, tl.NOISY_SCORE, weights, tl.NoiseSpec(1e-6)),
                         joints[tl.LINEAR_SCORE])
    if tv > 1e-6:
        failures.append(f"TV={tv}")
    worst = 0.0
    for key, j in joints.items():
        program, sigma = key if isinstance(key, tuple) else (key, None)
        noise = tl.NoiseSpec(sigma) if sigma else None
        w = weights if program in (tl.LINEAR_SCORE, tl.NOISY_SCORE) else None
        mc = tl.monte_carlo_joint(table, program, w, noise, samples=100_000, seed=0)
        worst = max(worst, float(crosscheck_scores(j, mc).max()))
    if worst > 4:
        failures.append(f"MC {worst:.2f} SE")
    ok = not failures
    assert _record(acceptance_log, 7, ok,
                   f"{len(joints)} joints checked, TV(1e-6)={tv:.1e}, MC worst {worst:.2f} SE"
                   + (f"; failures: {failures}" if failures else "")
                   + "; suite runtime reported below")
