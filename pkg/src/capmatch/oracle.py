"""Brute-force ground truth for small markets.

Everything here trades speed for certainty: exhaustive enumeration of
feasible individually rational matchings, full stability censuses, Pareto
checks against the whole matching set, and an exhaustive manipulation probe.
All entry points guard against combinatorial blowup with an explicit bound
and raise OracleBoundError instead of hanging.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import prod
from typing import Callable, Optional, Sequence, Union

from .blocking import BlockingReport, audit
from .market import EMPTY_RESOURCE, Contract, Market, Matching

DEFAULT_BOUND = 10_000_000


class OracleBoundError(RuntimeError):
    """The requested exhaustive computation exceeds the stated bound."""


def enumerate_matchings(m: Market, bound: int = DEFAULT_BOUND) -> list[Matching]:
    """All feasible individually rational matchings of m.

    Walks a per-student choice tree (each student takes one of her acceptable
    pairs or stays unmatched) and prunes branches as soon as a quota or
    region is violated; adding contracts never repairs a violation, so the
    pruning is exact. The result is duplicate-free by construction.

    Raises:
        OracleBoundError: the unpruned choice tree exceeds `bound` leaves.
    """
    sizes = [len(m.preferences[s]) + 1 for s in range(m.n_students)]
    if prod(sizes) > bound:
        raise OracleBoundError(
            f"choice tree has about {prod(sizes):.3g} leaves, bound is {bound}"
        )

    ccount = [0] * m.n_colleges
    rcount = [0] * (m.n_resources + 1)
    chosen: list[Contract] = []
    out: list[Matching] = []

    def walk(s: int) -> None:
        if s == m.n_students:
            out.append(Matching(chosen))
            return
        walk(s + 1)  # unmatched branch first
        for (c, r) in m.preferences[s]:
            if ccount[c] + 1 > m.college_quotas[c]:
                continue
            if r != EMPTY_RESOURCE:
                if c not in m.regions[r - 1]:
                    continue
                if rcount[r] + 1 > m.resource_quotas[r - 1]:
                    continue
            ccount[c] += 1
            rcount[r] += 1
            chosen.append(Contract(s, c, r))
            walk(s + 1)
            chosen.pop()
            ccount[c] -= 1
            rcount[r] -= 1

    walk(0)
    return out


def _dominates(m: Market, a: Matching, b: Matching) -> bool:
    """Every student weakly prefers a to b and someone strictly does."""
    strict = False
    for s in range(m.n_students):
        xa = a.student_contract(s)
        xb = b.student_contract(s)
        pa = m.pref_position(s, (xa.college, xa.resource) if xa else None)
        pb = m.pref_position(s, (xb.college, xb.resource) if xb else None)
        if pa > pb:
            return False
        if pa < pb:
            strict = True
    return strict


def is_pareto_efficient(
    m: Market, mu: Matching, bound: int = DEFAULT_BOUND
) -> bool:
    """No feasible matching makes someone better off and nobody worse off.

    A dominating matching weakly improves every student over an individually
    rational one, so it is itself individually rational; searching the
    enumerated IR set therefore loses nothing.
    """
    for other in enumerate_matchings(m, bound):
        if other != mu and _dominates(m, other, mu):
            return False
    return True


@dataclass(frozen=True)
class StabilityCensus:
    """Audit of every feasible IR matching of one market.

    The sets hold indices into `matchings`. The census only reports what the
    audits found; it deliberately enforces no inclusion between the sets.
    """

    matchings: tuple[Matching, ...]
    reports: tuple[BlockingReport, ...]
    stable: tuple[int, ...]
    envy_free: tuple[int, ...]
    non_wasteful: tuple[int, ...]
    weakly_stable: tuple[int, ...]
    direct_envy_stable: tuple[int, ...]
    pareto_efficient: tuple[int, ...]

    def set_of(self, name: str) -> list[Matching]:
        idx: tuple[int, ...] = getattr(self, name)
        return [self.matchings[i] for i in idx]


def census(m: Market, bound: int = DEFAULT_BOUND) -> StabilityCensus:
    """Enumerate, audit, and classify every feasible IR matching."""
    matchings = enumerate_matchings(m, bound)
    reports = [audit(m, mu) for mu in matchings]

    def pick(flag: str) -> tuple[int, ...]:
        return tuple(i for i, rep in enumerate(reports) if getattr(rep, flag))

    pareto = tuple(
        i
        for i, mu in enumerate(matchings)
        if not any(
            j != i and _dominates(m, matchings[j], mu)
            for j in range(len(matchings))
        )
    )
    return StabilityCensus(
        matchings=tuple(matchings),
        reports=tuple(reports),
        stable=pick("stable"),
        envy_free=pick("envy_free"),
        non_wasteful=pick("non_wasteful"),
        weakly_stable=pick("weakly_stable"),
        direct_envy_stable=pick("direct_envy_stable"),
        pareto_efficient=pareto,
    )


def _misreports(pairs: Sequence[tuple[int, int]]):
    """All strict orders over subsets of the given pairs, shortest first."""
    for k in range(len(pairs) + 1):
        yield from permutations(pairs, k)


def strategyproofness_probe(
    m: Market,
    mechanism: Union[str, Callable[[Market], Matching]],
    student: int,
    bound: int = 200_000,
    seed: Optional[int] = 0,
) -> Optional[dict]:
    """Search for a profitable misreport by one student.

    mechanism is either a callable Market -> Matching (run deterministically
    once per report) or a mechanism name. Named mechanisms run with the given
    seed; "rsd" is special-cased to iterate every serial order, since its
    guarantee is per-order. Misreports are every strict order over every
    subset of the student's true acceptable pairs, and outcomes are compared
    under the TRUE preferences.

    Returns None when nothing profitable exists, else a dict with the
    misreport, the order (rsd only), and the before/after assignments.

    Raises:
        OracleBoundError: misreports x orders would exceed `bound` runs.
    """
    true_pairs = m.preferences[student]
    n_reports = sum(
        prod(range(len(true_pairs) - k + 1, len(true_pairs) + 1))
        for k in range(len(true_pairs) + 1)
    )

    orders: list[Optional[tuple[int, ...]]] = [None]
    if isinstance(mechanism, str):
        from .mechanisms import MECHANISMS, run_rsd

        if mechanism == "rsd":
            orders = [tuple(p) for p in permutations(range(m.n_students))]

            def runner(mm: Market, order) -> Matching:
                return run_rsd(mm, order=order).matching

        else:
            fn = MECHANISMS[mechanism]

            def runner(mm: Market, order) -> Matching:
                return fn(mm, seed=seed).matching

    else:

        def runner(mm: Market, order) -> Matching:
            return mechanism(mm)

    if n_reports * len(orders) > bound:
        raise OracleBoundError(
            f"{n_reports} misreports x {len(orders)} orders exceeds {bound}"
        )

    def outcome_pos(mm: Market, order) -> tuple[int, Optional[tuple[int, int]]]:
        mu = runner(mm, order)
        x = mu.student_contract(student)
        pair = (x.college, x.resource) if x is not None else None
        # misreported assignments are always drawn from the true acceptable
        # pairs, so the true-list position is always meaningful
        return m.pref_position(student, pair), pair

    truth_by_order = [outcome_pos(m, order) for order in orders]

    for report in _misreports(true_pairs):
        if tuple(report) == true_pairs:
            continue
        deviated = m.with_student_preferences(student, report)
        for oi, order in enumerate(orders):
            dev_pos, dev_pair = outcome_pos(deviated, order)
            true_pos, true_pair = truth_by_order[oi]
            if dev_pos < true_pos:
                return {
                    "student": student,
                    "misreport": tuple(report),
                    "order": order,
                    "truthful_assignment": true_pair,
                    "deviating_assignment": dev_pair,
                }
    return None
