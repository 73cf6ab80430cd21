"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are printed immediately (visible with ``-s``) and repeated in an
"acceptance criteria" section of the terminal summary.

Environment knobs:
  HPFOLD_SMOKE_SECONDS  per-seed wall-clock budget for the Harvard smoke run
                        (default 30; set 600 for the full ten-minute version)
"""

import os
import random
import time

import pytest

from hpfold import cli
from hpfold.bench import load_instances, relative_improvement, success_rate
from hpfold.heuristics import HeuristicKind, execute, recompute, simulate, value
from hpfold.model import Conformation, energy, parse_sequence, validate
from hpfold.oracle import enumerate_optimal, neighborhood_oracle
from hpfold.search import SearchParams, SearchState, lws_run, lws_step, random_walk
from hpfold.segments import generate_moves

from conftest import (
    ACCEPTANCE_LINES,
    brute_energy,
    compact_conformation,
    random_selection,
    random_sequence,
)


def report(number: int, ok: bool, detail: str, binding: bool = True) -> None:
    tag = ("PASS" if ok else "FAIL") if binding else ("MET" if ok else "NOT MET") + " (reported only)"
    line = f"[{tag}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _moves_as_set(moves):
    return {m.changes for m in moves}


# 1 ---------------------------------------------------------------------------

def test_criterion_1_small_instances_reach_exact_optimum():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    hits = total = 0
    misses = []
    for _ in range(25):
        seq = random_sequence(rng, rng.randint(6, 8))
        opt = enumerate_optimal(seq).optimal_energy
        for seed in range(5):
            # Stopping at the known optimum only truncates a run that has already succeeded.
            res = lws_run(seq, SearchParams(max_iterations=50_000, rng_seed=seed, target_energy=opt))
            total += 1
            if res.best_energy == opt:
                hits += 1
            else:
                misses.append((seq.monomers, seed, res.best_energy, opt))
    elapsed = time.perf_counter() - t0
    rate = 100.0 * hits / total
    ok = rate >= 90.0 and elapsed < 300.0
    report(1, ok, f"{hits}/{total} pairs optimal ({rate:.1f}%, need >= 90%), {elapsed:.1f}s (limit 300s)")
    assert rate >= 90.0, misses
    assert elapsed < 300.0


# 2 ---------------------------------------------------------------------------

def test_criterion_2_neighborhood_matches_oracle():
    rng = random.Random(77)
    bad = 0
    for case in range(500):
        n = rng.randint(4, 24)
        conf = compact_conformation(rng, n, 40) if case % 2 else random_walk(n, rng)
        sel = random_selection(rng, n, 3)
        if _moves_as_set(generate_moves(conf, sel)) != _moves_as_set(neighborhood_oracle(conf, sel)):
            bad += 1
    report(2, bad == 0, f"500 cases, {bad} discrepancies")
    assert bad == 0


# 3 ---------------------------------------------------------------------------

def test_criterion_3_incremental_state_is_exact():
    rng = random.Random(3)
    seq = random_sequence(rng, 64)
    conf = random_walk(64, rng)
    state = recompute(conf, seq)
    executed = state_errors = delta_errors = 0
    while executed < 10_000:
        moves = generate_moves(conf, random_selection(rng, 64, 3))
        if not moves:
            continue
        move = rng.choice(moves)
        before = [value(state, k) for k in HeuristicKind]
        deltas = simulate(state, conf, seq, move)
        execute(state, conf, seq, move)
        executed += 1
        after = [value(state, k) for k in HeuristicKind]
        if any(deltas[k] != after[k] - before[k] for k in HeuristicKind):
            delta_errors += 1
        if state != recompute(conf, seq):
            state_errors += 1
    ok = state_errors == 0 and delta_errors == 0
    report(3, ok, f"{executed} moves, {state_errors} accumulator mismatches, {delta_errors} delta mismatches")
    assert ok


# 4 ---------------------------------------------------------------------------

def test_criterion_4_contact_energy_matches_pair_scan():
    rng = random.Random(4)
    checked = bad = 0
    # Half are fresh random walks, half are reached through executed moves.
    for _ in range(50):
        n = rng.randint(2, 60)
        seq = random_sequence(rng, n, rng.choice([0.3, 0.5, 0.8]))
        conf = random_walk(n, rng)
        state = recompute(conf, seq)
        for step in range(20):
            if step % 2:
                moves = generate_moves(conf, random_selection(rng, n, 3)) if n > 1 else []
                if moves:
                    execute(state, conf, seq, rng.choice(moves))
                maintained = state.contact_energy
            else:
                conf = compact_conformation(rng, n, rng.randint(0, 30)) if n > 1 else Conformation([(0, 0, 0)])
                state = recompute(conf, seq)
                maintained = state.contact_energy
            expected = brute_energy(conf.positions, seq.monomers)
            checked += 1
            bad += maintained != expected or energy(conf, seq) != expected
    report(4, bad == 0, f"{checked} conformations, {bad} mismatches")
    assert checked == 1000 and bad == 0


# 5 ---------------------------------------------------------------------------

def test_criterion_5_metric_values():
    a = relative_improvement(-346, -326, -384)
    b = relative_improvement(-354, -334, -381)
    s = success_rate([-69] * 16 + [-68] * 34, -69)
    ok = abs(a - 34.48) <= 0.01 and abs(b - 42.55) <= 0.01 and s == 32.0
    report(5, ok, f"R.I. {a:.4f} and {b:.4f}, success rate {s}")
    assert abs(a - 34.48) <= 0.01
    assert abs(b - 42.55) <= 0.01
    assert s == 32.0


# 6 ---------------------------------------------------------------------------

def test_criterion_6_stagnation_schedule_and_reset():
    # An all-P chain has no contacts, so the best energy never improves by itself.
    seq = parse_sequence("P" * 6)
    rng = random.Random(6)
    params = SearchParams(rng_seed=6)
    state = SearchState.start(seq, params, random_walk(6, rng))
    while len(state.escalations) < 4:
        lws_step(state, rng)
    thresholds = [e[1] for e in state.escalations]
    sizes = [e[2] for e in state.escalations]
    iters = [e[0] for e in state.escalations]

    # Inject an improvement: pretend the best so far is worse than any reachable state.
    state.best_energy = 1
    while state.best_energy == 1:
        lws_step(state, rng)
    reset = (state.segment_size, state.max_stable, state.steps_since_improvement)

    # After the reset the first escalation is again due after 1000 steps.
    resumed_at = state.iteration
    while len(state.escalations) < 5:
        lws_step(state, rng)
    again = state.escalations[4]

    ok = (
        thresholds == [1000, 1200, 1440, 1728]
        and sizes == [1, 2, 3, 4]
        and iters == [1000, 1200, 1440, 1728]
        and reset == (1, 1000, 0)
        and again[1:] == (1000, 1) and again[0] - resumed_at == 1000
    )
    report(6, ok, f"thresholds {thresholds}, sizes {sizes}, after reset {reset}, next escalation {again[1:]}")
    assert thresholds == [1000, 1200, 1440, 1728]
    assert sizes == [1, 2, 3, 4]
    assert reset == (1, 1000, 0)
    assert again[1:] == (1000, 1) and again[0] - resumed_at == 1000


# 7 ---------------------------------------------------------------------------

def test_criterion_7_bench_is_deterministic_across_parallelism(tmp_path, capsys):
    inst = tmp_path / "inst.fasta"
    inst.write_text(
        ">a [El=-9]\nHPHHPPHHHHPHHHPPHH\n"
        ">b [El=-6]\nHHPPHPHPHHPH\n"
        ">c\nPHPPHHPHHPPHPHHHPPHP\n"
    )
    outputs = []
    for par in (1, 2):
        out = tmp_path / f"out{par}"
        code = cli.main([
            "bench", "--instances", str(inst), "--runs", "3", "--seed-base", "11",
            "--max-iters", "1500", "--parallel", str(par), "--out-dir", str(out),
        ])
        assert code == 0
        outputs.append((out / "stats.csv").read_bytes())
    capsys.readouterr()
    ok = outputs[0] == outputs[1]
    report(7, ok, f"stats.csv identical for parallelism 1 and 2 ({len(outputs[0])} bytes)")
    assert ok


# 8 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_8_debug_run_stays_feasible():
    rng = random.Random(8)
    seq = random_sequence(rng, 48)
    params = SearchParams(max_iterations=100_000, rng_seed=8, debug=True)
    state = SearchState.start(seq, params, random_walk(48, rng))
    violations = executed = 0
    t0 = time.perf_counter()
    while state.iteration < params.max_iterations:
        lws_step(state, rng)  # raises FeasibilityError on any violation in debug mode
        if state.last_move is not None:
            executed += 1
    violations = len(validate(state.conformation)) + len(validate(state.best_conformation))
    report(8, violations == 0,
           f"{state.iteration} iterations, {executed} moves validated, {violations} violations "
           f"({time.perf_counter() - t0:.0f}s)")
    assert state.iteration == 100_000
    assert violations == 0


# 9 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_9_harvard_smoke_reported():
    from importlib import resources

    budget = float(os.environ.get("HPFOLD_SMOKE_SECONDS", "30"))
    inst = load_instances(resources.files("hpfold.data").joinpath("harvard.fasta"))[0]
    target = 0.9 * inst.lower_bound
    energies = []
    for seed in range(5):
        res = lws_run(inst.sequence, SearchParams(max_iterations=10**12, wall_clock_budget=budget, rng_seed=seed))
        assert validate(res.best_conformation) == []
        energies.append(res.best_energy)
    met = sum(e <= target for e in energies)
    report(9, met >= 3,
           f"{inst.name} with {budget:g}s per seed: energies {energies}, "
           f"{met}/5 at or below {target:.1f} (E_l {inst.lower_bound})",
           binding=False)
