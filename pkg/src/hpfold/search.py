"""Segment-based hybrid local search on the FCC lattice.

Each iteration re-places a randomly chosen segment (one contiguous window or
several scattered monomers) by exhaustive enumeration, guided by one of three
objectives drawn at random. A tabu list keeps recently moved monomers out of
the next selections; stagnation grows the segment and the patience window.
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels
from .heuristics import (
    Deltas,
    HeuristicKind,
    HeuristicState,
    Move,
    execute,
    recompute,
    simulate,
)
from .lattice import BASIS
from .model import Conformation, HPSequence, validate
from .segments import (
    SegmentKind,
    SegmentSelection,
    build_slots,
    select_segment_type,
    select_segment_variables,
)

log = logging.getLogger(__name__)


class InitializationFailed(RuntimeError):
    pass


class FeasibilityError(AssertionError):
    pass


@dataclass
class SearchParams:
    initial_segment_size: int = 1
    initial_max_stable: int = 1000
    stable_factor: Fraction = Fraction(6, 5)
    tenure_min: int = 4
    tenure_max_divisor: int = 8
    max_single_segment_size: int = 6
    max_multi_segment_size: int = 12
    sub_segment_size: int = 1  # length of each scattered run in MULTIPLE mode
    max_iterations: int = 100_000
    wall_clock_budget: float | None = None  # seconds
    rng_seed: int = 0
    pin_heuristic: HeuristicKind | None = None
    target_energy: int | None = None  # stop as soon as the best energy reaches this
    warmup_iterations: int = 0
    debug: bool = False

    def __post_init__(self) -> None:
        self.stable_factor = Fraction(str(self.stable_factor)) if isinstance(self.stable_factor, float) else Fraction(self.stable_factor)
        for name in ("initial_segment_size", "initial_max_stable", "tenure_min",
                     "tenure_max_divisor", "max_single_segment_size", "max_multi_segment_size",
                     "sub_segment_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.stable_factor <= 0:
            raise ValueError("stable_factor must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")

    def tenure_range(self, n: int) -> tuple[int, int]:
        return self.tenure_min, max(self.tenure_min, n // self.tenure_max_divisor)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    elapsed_ms: float
    current_energy: int
    best_energy: int


class TabuList:
    def __init__(self) -> None:
        self.expiry: dict[int, int] = {}

    def is_tabu(self, index: int, iteration: int) -> bool:
        return self.expiry.get(index, -1) >= iteration

    def add(self, index: int, until: int) -> None:
        self.expiry[index] = until


@dataclass
class SearchState:
    seq: HPSequence
    params: SearchParams
    conformation: Conformation
    heuristic_state: HeuristicState
    tabu: TabuList = field(default_factory=TabuList)
    iteration: int = 0
    segment_size: int = 1
    max_stable: int = 1000
    steps_since_improvement: int = 0
    best_energy: int = 0
    best_conformation: Conformation | None = None
    trace: list[TraceRecord] = field(default_factory=list)
    escalations: list[tuple[int, int, int]] = field(default_factory=list)  # (iteration, threshold, segment size)
    started: float = field(default_factory=time.perf_counter)
    last_kind: HeuristicKind | None = None
    last_move: Move | None = None
    last_deltas: Deltas | None = None

    @classmethod
    def start(cls, seq: HPSequence, params: SearchParams, conf: Conformation) -> "SearchState":
        hs = recompute(conf, seq)
        st = cls(seq, params, conf, hs,
                 segment_size=params.initial_segment_size,
                 max_stable=params.initial_max_stable,
                 best_energy=hs.contact_energy,
                 best_conformation=conf.copy())
        st.trace.append(TraceRecord(0, 0.0, hs.contact_energy, hs.contact_energy))
        return st

    @property
    def energy(self) -> int:
        return self.heuristic_state.contact_energy

    def elapsed_ms(self) -> float:
        return (time.perf_counter() - self.started) * 1000.0

    def effective_size(self, kind: SegmentKind) -> int:
        n = self.seq.n
        if kind is SegmentKind.SINGLE:
            return min(self.segment_size, self.params.max_single_segment_size, n - 1)
        return min(self.segment_size, max(1, n // 4), self.params.max_multi_segment_size)

    def record_improvement(self) -> None:
        self.best_energy = self.energy
        self.best_conformation = self.conformation.copy()
        self.segment_size = self.params.initial_segment_size
        self.max_stable = self.params.initial_max_stable
        self.steps_since_improvement = 0
        self.trace.append(TraceRecord(self.iteration, self.elapsed_ms(), self.energy, self.best_energy))

    def record_stagnation_step(self) -> None:
        self.steps_since_improvement += 1
        if self.steps_since_improvement >= self.max_stable:
            self.escalations.append((self.iteration, self.max_stable, self.segment_size))
            grown = int(self.max_stable * self.params.stable_factor)
            self.max_stable = max(grown, self.max_stable + 1)
            self.segment_size += 1


# --- initial conformation -----------------------------------------------

def random_walk(n: int, rng: random.Random) -> Conformation:
    """Random self-avoiding walk from the origin, built by depth-first extension."""
    pts = [(0, 0, 0)]
    occupied = {pts[0]}
    choices: list[list[int]] = []
    while len(pts) < n:
        if len(choices) < len(pts):
            order = list(range(12))
            rng.shuffle(order)
            choices.append(order)
        options = choices[len(pts) - 1]
        x, y, z = pts[-1]
        while options:
            dx, dy, dz = BASIS[options.pop()]
            p = (x + dx, y + dy, z + dz)
            if p not in occupied:
                pts.append(p)
                occupied.add(p)
                break
        else:
            choices.pop()
            if len(pts) == 1:
                raise InitializationFailed(f"no self-avoiding walk of length {n} found")
            occupied.discard(pts.pop())
    return Conformation(pts)


def initialize_conformation(seq: HPSequence, rng: random.Random, params: SearchParams | None = None) -> Conformation:
    """Random feasible start, optionally polished by a short greedy single-residue phase."""
    conf = random_walk(seq.n, rng)
    if params is None or params.warmup_iterations <= 0 or seq.n < 2:
        return conf
    warm = SearchParams(
        initial_segment_size=1,
        initial_max_stable=params.warmup_iterations + 1,
        tenure_min=params.tenure_min,
        tenure_max_divisor=params.tenure_max_divisor,
        max_iterations=params.warmup_iterations,
        pin_heuristic=HeuristicKind.H1_CONTACTS,
    )
    state = SearchState.start(seq, warm, conf)
    while state.iteration < warm.max_iterations:
        lws_step(state, rng, allow_growth=False)
    return state.best_conformation.copy()


# --- one iteration ------------------------------------------------------

def select_heuristic(rng: random.Random, pinned: HeuristicKind | None = None) -> HeuristicKind:
    if pinned is not None:
        return pinned
    return HeuristicKind(rng.randrange(3))


def best_segment_move(
    conf: Conformation,
    seq: HPSequence,
    hstate: HeuristicState,
    selection: SegmentSelection,
    kind: HeuristicKind,
    seed: int,
    max_steps: int,
) -> tuple[Move | None, int]:
    """Best move for ``kind`` over the whole segment neighbourhood.

    Returns the chosen move (ties broken uniformly at random) and the size of
    the neighbourhood, identity excluded.
    """
    slots = build_slots(conf, selection)
    pos = conf.positions
    is_h = seq.is_h
    k = len(slots)
    moving = set(selection.indices)

    arr = np.array(pos, dtype=np.int64)
    margin = k + 3
    lo = arr.min(axis=0) - margin
    shape = tuple(int(v) for v in arr.max(axis=0) - lo + margin + 1)
    occ = np.zeros(shape, dtype=np.int8)
    hfix = np.zeros(shape, dtype=np.int8)
    g = arr - lo
    fixed = np.array([i not in moving for i in range(len(pos))])
    fg = g[fixed]
    occ[fg[:, 0], fg[:, 1], fg[:, 2]] = 1
    fh = fixed & np.array(is_h, dtype=bool)
    hg = g[fh]
    hfix[hg[:, 0], hg[:, 1], hg[:, 2]] = 1
    fixed_sum = hg.sum(axis=0) if len(hg) else np.zeros(3, dtype=np.int64)
    fixed_norm = int((hg * hg).sum())

    slot_is_h = np.array([is_h[s.monomer] for s in slots], dtype=np.bool_)
    slot_monomer = np.array([s.monomer for s in slots], dtype=np.int64)
    slot_prev = np.array([s.anchor is None for s in slots], dtype=np.bool_)
    slot_anchor = np.array([s.anchor if s.anchor is not None else (0, 0, 0) for s in slots], dtype=np.int64) - lo
    slot_target = np.array([s.target if s.target is not None else (0, 0, 0) for s in slots], dtype=np.int64) - lo
    slot_steps = np.array([s.target_steps for s in slots], dtype=np.int64)
    slot_old = g[slot_monomer]
    n = len(pos)
    slot_adj_h = np.array(
        [sum(1 for j in (s.monomer - 1, s.monomer + 1) if 0 <= j < n and j not in moving and is_h[j]) for s in slots],
        dtype=np.int64,
    )
    count, best, _ = _kernels.search_segment(
        occ, hfix, slot_is_h, slot_monomer, slot_prev, slot_anchor, slot_target,
        slot_steps, slot_adj_h, slot_old, _kernels.reach_table(max(1, int(slot_steps.max()))),
        int(fh.sum()), fixed_sum.astype(np.int64), fixed_norm, hstate.n_h, int(kind), seed,
    )
    if count == 0:
        return None, 0
    best = best + lo
    changes = [
        (s.monomer, (int(p[0]), int(p[1]), int(p[2])))
        for s, p in zip(slots, best)
        if pos[s.monomer] != (p[0], p[1], p[2])
    ]
    return Move.from_pairs(changes), int(count)


def lws_step(state: SearchState, rng: random.Random, allow_growth: bool = True) -> SearchState:
    """Advance the search by one iteration."""
    params = state.params
    seq = state.seq
    n = seq.n
    state.iteration += 1
    it = state.iteration
    state.last_kind = state.last_move = state.last_deltas = None

    kind = select_segment_type(rng)
    size = state.effective_size(kind)
    selection = select_segment_variables(
        n, size, kind, lambda i: state.tabu.is_tabu(i, it), rng, params.sub_segment_size,
    )
    move = None
    if selection is not None:
        hkind = select_heuristic(rng, params.pin_heuristic)
        state.last_kind = hkind
        move, _ = best_segment_move(
            state.conformation, seq, state.heuristic_state, selection, hkind,
            rng.getrandbits(32), params.max_single_segment_size,
        )

    improved = False
    if move is not None:
        deltas = simulate(state.heuristic_state, state.conformation, seq, move)
        execute(state.heuristic_state, state.conformation, seq, move, check=params.debug)
        state.last_move = move
        state.last_deltas = deltas
        if params.debug:
            report = validate(state.conformation)
            if report:
                raise FeasibilityError(f"iteration {it}: {report[:5]}")
        lo, hi = params.tenure_range(n)
        for i in move.indices:
            state.tabu.add(i, it + rng.randint(lo, hi))
        improved = state.energy < state.best_energy

    if improved:
        state.record_improvement()
    elif allow_growth:
        state.record_stagnation_step()
    return state


# --- full run -----------------------------------------------------------

@dataclass
class RunResult:
    best_conformation: Conformation
    best_energy: int
    trace: list[TraceRecord]
    iterations: int
    escalations: list[tuple[int, int, int]]


def lws_run(seq: HPSequence, params: SearchParams, start: Conformation | None = None) -> RunResult:
    """Run the search until the iteration or wall-clock budget is spent."""
    rng = random.Random(params.rng_seed)
    t0 = time.perf_counter()
    conf = start.copy() if start is not None else initialize_conformation(seq, rng, params)
    state = SearchState.start(seq, params, conf)
    state.started = t0
    deadline = None if params.wall_clock_budget is None else t0 + params.wall_clock_budget

    def reached_target() -> bool:
        return params.target_energy is not None and state.best_energy <= params.target_energy

    while state.iteration < params.max_iterations and not reached_target():
        if deadline is not None and time.perf_counter() >= deadline:
            break
        lws_step(state, rng)

    last = state.trace[-1]
    if last.iteration < state.iteration:
        state.trace.append(TraceRecord(state.iteration, state.elapsed_ms(), state.energy, state.best_energy))
    log.debug("lws_run: %d iterations, best %d", state.iteration, state.best_energy)
    return RunResult(state.best_conformation, state.best_energy, state.trace, state.iteration, state.escalations)
