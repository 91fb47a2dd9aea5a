"""Matching mechanisms: four cutoff-raising procedures and two serial ones.

The cutoff mechanisms all start from the all-zero profile (nobody eligible
anywhere) and raise entries step by step, keeping a raise only when the
induced matching stays feasible. They differ in which entries they try:

  irc  uniformly random non-maximal entry, one coupled +1 at a time
  imc  per college, the largest simultaneously raisable set of entries at the
       lowest raisable value level
  idc  random order over entries, each pushed as far as it goes
  iuc  one scalar per college, all of its entries rising in lockstep

Raising an entry from value v only ever admits the single student ranked
v + 1 at that college, so the induced matching is maintained incrementally:
re-seat that student onto her favorite newly opened pair when she likes it
better, delta-check feasibility, revert the raise if the move breaks it.

rsd lets students pick their favorite still-feasible contract in a random
order. csd repeatedly grants, among all unmatched students' current favorite
feasible contracts, the one whose student the target college ranks best.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cutoffs import CutoffProfile, induced_matching, zero_profile
from .market import EMPTY_RESOURCE, Contract, Market, Matching

MECHANISM_ORDER = ("irc", "imc", "idc", "iuc", "rsd", "csd")


@dataclass(frozen=True)
class RunTrace:
    """Everything needed to replay one mechanism run.

    moves is a tuple of (college, entries) raises for the cutoff mechanisms
    and a tuple of granted Contracts for rsd/csd. profile is the terminal
    cutoff profile (cutoff mechanisms only), order the realized student order
    (rsd only).
    """

    mechanism: str
    seed: Optional[int]
    moves: tuple
    matching: Matching
    profile: Optional[CutoffProfile] = None
    order: Optional[tuple[int, ...]] = None


def replay_trace(m: Market, trace: RunTrace) -> Matching:
    """Recompute the final matching from a trace's moves alone."""
    if trace.mechanism in ("rsd", "csd"):
        return Matching(trace.moves)
    rows = [[0] * (m.n_resources + 1) for _ in range(m.n_colleges)]
    for c, rs in trace.moves:
        for r in rs:
            rows[c][r] += 1
    return induced_matching(m, CutoffProfile(rows, m.n_students))


def _require_runnable(m: Market) -> None:
    """Mechanisms index priority lists positionally, so they must be
    permutations. Cached on the market after the first check."""
    if getattr(m, "_priorities_checked", False):
        return
    expected = list(range(m.n_students))
    for c, plist in enumerate(m.priorities):
        if sorted(plist) != expected:
            raise ValueError(f"college {c} priority list is not a permutation")
    m._priorities_checked = True


class _Engine:
    """Incrementally maintained induced matching of a growing cutoff profile.

    Invariant: assign always equals the induced matching of K, and the
    matching is feasible. try_raise keeps them in sync.
    """

    __slots__ = ("m", "K", "assign", "ccount", "rcount", "moves")

    def __init__(self, m: Market):
        self.m = m
        self.K = [[0] * (m.n_resources + 1) for _ in range(m.n_colleges)]
        self.assign: list[Optional[Contract]] = [None] * m.n_students
        self.ccount = [0] * m.n_colleges
        self.rcount = [0] * (m.n_resources + 1)
        self.moves: list[tuple[int, tuple[int, ...]]] = []

    def try_raise(self, c: int, rs: tuple[int, ...]) -> bool:
        """+1 on college c's entries rs, all of which sit at one common value
        v < n_students. Kept iff the induced matching stays feasible."""
        m = self.m
        row = self.K[c]
        v = row[rs[0]]
        s_star = m.priorities[c][v]  # the only newly eligible student
        pos_map = m._pref_pos[s_star]

        best_pos = None
        best_r = -1
        for r in rs:
            p = pos_map.get((c, r))
            if p is not None and (best_pos is None or p < best_pos):
                best_pos = p
                best_r = r

        cur = self.assign[s_star]
        if cur is None:
            cur_pos = len(m.preferences[s_star])
        else:
            cur_pos = pos_map[(cur.college, cur.resource)]

        if best_pos is not None and best_pos < cur_pos:
            # s_star switches to (c, best_r); check the move keeps feasibility
            at_c = cur is not None and cur.college == c
            ok = self.ccount[c] - (1 if at_c else 0) + 1 <= m.college_quotas[c]
            if ok and best_r != EMPTY_RESOURCE:
                if c not in m.regions[best_r - 1]:
                    ok = False
                else:
                    had = cur is not None and cur.resource == best_r
                    ok = (
                        self.rcount[best_r] - (1 if had else 0) + 1
                        <= m.resource_quotas[best_r - 1]
                    )
            if not ok:
                return False
            if cur is not None:
                self.ccount[cur.college] -= 1
                self.rcount[cur.resource] -= 1
            self.assign[s_star] = Contract(s_star, c, best_r)
            self.ccount[c] += 1
            self.rcount[best_r] += 1

        for r in rs:
            row[r] += 1
        self.moves.append((c, tuple(rs)))
        return True

    def finish(self, mechanism: str, seed) -> RunTrace:
        matching = Matching(x for x in self.assign if x is not None)
        profile = CutoffProfile(self.K, self.m.n_students)
        return RunTrace(
            mechanism=mechanism,
            seed=seed,
            moves=tuple(self.moves),
            matching=matching,
            profile=profile,
        )


def _coupled(row: list[int], r: int) -> tuple[int, ...]:
    """Entry set for a one-step raise of (c, r): the empty-resource entry
    rides along when r has caught up with it."""
    if r != EMPTY_RESOURCE and row[r] == row[EMPTY_RESOURCE]:
        return (r, EMPTY_RESOURCE)
    return (r,)


def run_irc(m: Market, seed: Optional[int] = None) -> RunTrace:
    """Random single-entry raises until no entry can move.

    Draws a uniformly random non-maximal entry, tries its one-step raise, and
    reverts on infeasibility. Entries that failed since the last accepted
    raise are skipped (a failed raise is a no-op, so skipping just censors
    wasted draws); any accepted raise clears that memory. Terminates when
    every non-maximal entry has a recorded failure.
    """
    _require_runnable(m)
    rng = np.random.default_rng(seed)
    eng = _Engine(m)
    n = m.n_students
    entries = [
        (c, r) for c in range(m.n_colleges) for r in range(m.n_resources + 1)
    ]
    failed: set[tuple[int, int]] = set()
    while True:
        candidates = [
            e for e in entries if eng.K[e[0]][e[1]] < n and e not in failed
        ]
        if not candidates:
            break
        c, r = candidates[int(rng.integers(len(candidates)))]
        if eng.try_raise(c, _coupled(eng.K[c], r)):
            failed.clear()
        else:
            failed.add((c, r))
    return eng.finish("irc", seed)


def _imc_college_step(eng: _Engine, c: int, rng) -> bool:
    """One IMC visit to college c: scan cutoff values bottom up and apply the
    first feasible simultaneous raise of a largest-possible entry subset.

    At each value level, subsets are searched in decreasing size and in
    random order within a size. Whenever the empty-resource entry sits at the
    level, every candidate subset must contain it (a non-empty entry may
    never climb above the empty-resource entry). Scanning upward past a stuck
    bottom level keeps the college moving when only its higher-valued entries
    can still advance; termination then certifies that no single coupled
    increment is feasible anywhere, i.e. the profile is optimal.
    """
    m = eng.m
    row = eng.K[c]
    n = m.n_students
    values = sorted({val for val in row if val < n})
    for v in values:
        members = [r for r in range(len(row)) if row[r] == v]
        if EMPTY_RESOURCE in members:
            base = [r for r in members if r != EMPTY_RESOURCE]
            for size in range(len(base) + 1, 0, -1):
                combos = list(itertools.combinations(base, size - 1))
                for i in rng.permutation(len(combos)):
                    rs = (EMPTY_RESOURCE,) + combos[int(i)]
                    if eng.try_raise(c, rs):
                        return True
        else:
            for size in range(len(members), 0, -1):
                combos = list(itertools.combinations(members, size))
                for i in rng.permutation(len(combos)):
                    if eng.try_raise(c, combos[int(i)]):
                        return True
    return False


def run_imc(m: Market, seed: Optional[int] = None) -> RunTrace:
    """Per-college simultaneous raises, colleges visited in random passes."""
    _require_runnable(m)
    rng = np.random.default_rng(seed)
    eng = _Engine(m)
    while True:
        changed = False
        for ci in rng.permutation(m.n_colleges):
            if _imc_college_step(eng, int(ci), rng):
                changed = True
        if not changed:
            break
    return eng.finish("imc", seed)


def run_idc(m: Market, seed: Optional[int] = None) -> RunTrace:
    """Entries in random order, each pushed as far as it can go."""
    _require_runnable(m)
    rng = np.random.default_rng(seed)
    eng = _Engine(m)
    n = m.n_students
    entries = [
        (c, r) for c in range(m.n_colleges) for r in range(m.n_resources + 1)
    ]
    while True:
        changed = False
        for idx in rng.permutation(len(entries)):
            c, r = entries[int(idx)]
            while eng.K[c][r] < n and eng.try_raise(c, _coupled(eng.K[c], r)):
                changed = True
        if not changed:
            break
    return eng.finish("idc", seed)


def run_iuc(m: Market, seed: Optional[int] = None) -> RunTrace:
    """One scalar per college; all of its entries rise in lockstep.

    Keeping every entry of a college equal means any admitted student is
    eligible for every pair there, so the result can carry no envy blocks and
    no resource-kind waste blocks regardless of where the scalars get stuck.
    """
    _require_runnable(m)
    rng = np.random.default_rng(seed)
    eng = _Engine(m)
    n = m.n_students
    all_rs = tuple(range(m.n_resources + 1))
    while True:
        changed = False
        for ci in rng.permutation(m.n_colleges):
            c = int(ci)
            if eng.K[c][EMPTY_RESOURCE] < n and eng.try_raise(c, all_rs):
                changed = True
        if not changed:
            break
    return eng.finish("iuc", seed)


def run_rsd(
    m: Market,
    seed: Optional[int] = None,
    order: Optional[Sequence[int]] = None,
) -> RunTrace:
    """Students pick greedily in a random (or given) serial order."""
    _require_runnable(m)
    if order is None:
        rng = np.random.default_rng(seed)
        order = [int(s) for s in rng.permutation(m.n_students)]
    else:
        order = [int(s) for s in order]
        if sorted(order) != list(range(m.n_students)):
            raise ValueError("order must be a permutation of the students")

    ccount = [0] * m.n_colleges
    rcount = [0] * (m.n_resources + 1)
    granted: list[Contract] = []
    for s in order:
        for (c, r) in m.preferences[s]:
            if ccount[c] + 1 > m.college_quotas[c]:
                continue
            if r != EMPTY_RESOURCE:
                if c not in m.regions[r - 1]:
                    continue
                if rcount[r] + 1 > m.resource_quotas[r - 1]:
                    continue
            granted.append(Contract(s, c, r))
            ccount[c] += 1
            rcount[r] += 1
            break
    return RunTrace(
        mechanism="rsd",
        seed=seed,
        moves=tuple(granted),
        matching=Matching(granted),
        order=tuple(order),
    )


def run_csd(m: Market, seed: Optional[int] = None) -> RunTrace:
    """Colleges' favorite claimant goes first, one grant per round.

    Each round collects every unmatched student's favorite still-feasible
    contract and grants the one whose student is ranked best by its college,
    breaking rank ties uniformly at random. Capacities only ever shrink
    during a run, so each student's scan position never moves backwards.
    """
    _require_runnable(m)
    rng = np.random.default_rng(seed)
    ccount = [0] * m.n_colleges
    rcount = [0] * (m.n_resources + 1)
    pointer = [0] * m.n_students
    unmatched = list(range(m.n_students))
    granted: list[Contract] = []

    while True:
        best_key = None
        ties: list[tuple[int, int, int]] = []
        still: list[int] = []
        for s in unmatched:
            prefs = m.preferences[s]
            i = pointer[s]
            while i < len(prefs):
                c, r = prefs[i]
                if ccount[c] < m.college_quotas[c] and (
                    r == EMPTY_RESOURCE
                    or (
                        c in m.regions[r - 1]
                        and rcount[r] < m.resource_quotas[r - 1]
                    )
                ):
                    break
                i += 1
            pointer[s] = i
            if i >= len(prefs):
                continue  # permanently out of options
            still.append(s)
            c, r = prefs[i]
            key = m._rank[c][s]
            if best_key is None or key < best_key:
                best_key = key
                ties = [(s, c, r)]
            elif key == best_key:
                ties.append((s, c, r))
        if best_key is None:
            break
        s, c, r = ties[int(rng.integers(len(ties)))]
        granted.append(Contract(s, c, r))
        ccount[c] += 1
        rcount[r] += 1
        unmatched = [t for t in still if t != s]

    return RunTrace(
        mechanism="csd",
        seed=seed,
        moves=tuple(granted),
        matching=Matching(granted),
    )


MECHANISMS = {
    "irc": run_irc,
    "imc": run_imc,
    "idc": run_idc,
    "iuc": run_iuc,
    "rsd": run_rsd,
    "csd": run_csd,
}


def college_proposing_da(m: Market) -> Matching:
    """Reference deferred acceptance for seat-only markets, colleges proposing.

    Used to pin down what every cutoff mechanism collapses to when there are
    no non-empty resources.

    Raises:
        ValueError: the market has non-empty resources.
    """
    _require_runnable(m)
    if m.n_resources != 0:
        raise ValueError("reference DA is defined for seat-only markets")
    holds: list[Optional[int]] = [None] * m.n_students
    count = [0] * m.n_colleges
    ptr = [0] * m.n_colleges
    active = deque(range(m.n_colleges))
    while active:
        c = active.popleft()
        while count[c] < m.college_quotas[c] and ptr[c] < m.n_students:
            s = m.priorities[c][ptr[c]]
            ptr[c] += 1
            if not m.acceptable(s, c, EMPTY_RESOURCE):
                continue
            h = holds[s]
            if h is None:
                holds[s] = c
                count[c] += 1
            elif m.pref_position(s, (c, EMPTY_RESOURCE)) < m.pref_position(
                s, (h, EMPTY_RESOURCE)
            ):
                holds[s] = c
                count[c] += 1
                count[h] -= 1
                active.append(h)
    return Matching(
        Contract(s, c, EMPTY_RESOURCE)
        for s, c in enumerate(holds)
        if c is not None
    )
