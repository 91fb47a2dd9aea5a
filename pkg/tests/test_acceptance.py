"""Acceptance gate: one test per shipping promise, thirteen in all.

Run with -v to get one pass/fail line per criterion. Criteria 6 through 9
share the `mechanism_grid` session fixture (a single sweep, a few minutes
on one core); everything else finishes in seconds. Frozen constants were
derived with the brute-force census and pinned; edit them only if the
underlying behavior is meant to change.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest
from scipy import stats

from capmatch import (
    Contract,
    CutoffProfile,
    ExperimentConfig,
    GenConfig,
    Market,
    Matching,
    MECHANISMS,
    MECHANISM_ORDER,
    OracleBoundError,
    aggregate,
    audit,
    census,
    college_proposing_da,
    cutoffs_of,
    dumps_market,
    generate_market,
    induced_matching,
    is_optimal,
    is_pareto_efficient,
    load_fixture,
    market_seed,
    mechanism_seed,
    run_experiment,
    strategyproofness_probe,
    table_csv,
)
from capmatch.experiments import results_to_json

FIXTURE_NAMES = (
    "example1",
    "example2",
    "prop2",
    "prop4",
    "prop8_market1",
    "prop8_market2",
)

GRID_MASTER = 919
GRID_REPLICAS = 100
GRID_SEEDS = 5
GRID_REGIMES = ("none", "student_full", "college_full")


def _random_small_market(rng, max_students, max_colleges, max_resources):
    """Draw a market uniformly-ish over small shapes.

    Preference lists are random subsets in random order, so plain/resourced
    presence conventions are violated freely; the auditors and mechanisms
    must cope with that, and the acceptance sweeps deliberately include it.
    """
    n_students = int(rng.integers(2, max_students + 1))
    n_colleges = int(rng.integers(1, max_colleges + 1))
    n_resources = int(rng.integers(0, max_resources + 1))
    quotas = [int(rng.integers(1, 3)) for _ in range(n_colleges)]
    resource_quotas = [int(rng.integers(1, 3)) for _ in range(n_resources)]
    regions = [
        sorted(
            rng.choice(
                n_colleges, size=int(rng.integers(1, n_colleges + 1)), replace=False
            ).tolist()
        )
        for _ in range(n_resources)
    ]
    priorities = [
        tuple(int(x) for x in rng.permutation(n_students)) for _ in range(n_colleges)
    ]
    preferences = []
    for _ in range(n_students):
        pairs = [
            (c, r)
            for c in range(n_colleges)
            for r in range(n_resources + 1)
            if r == 0 or c in regions[r - 1]
        ]
        k = int(rng.integers(0, len(pairs) + 1))
        idx = rng.choice(len(pairs), size=k, replace=False)
        preferences.append(tuple(pairs[i] for i in idx))
    return Market(
        n_students, quotas, resource_quotas, regions, priorities, preferences
    )


def _all_valid_profiles(m):
    """Every cutoff profile whose plain row dominates its resource rows."""
    n = m.n_students
    width = m.n_resources + 1
    per_college = []
    for _ in range(m.n_colleges):
        rows = [
            combo
            for combo in itertools.product(range(n + 1), repeat=width)
            if all(v <= combo[0] for v in combo[1:])
        ]
        per_college.append(rows)
    for choice in itertools.product(*per_college):
        yield CutoffProfile(choice, n)


@pytest.fixture(scope="session")
def mechanism_grid():
    """One sweep feeding criteria 6-9.

    For each alignment regime: 100 generated markets, every mechanism, five
    mechanism seeds per market, each output audited. A fourth regime with
    both sides fully aligned is swept for CSD only (criterion 9 needs it).
    Only the slim facts the criteria read are kept per run.
    """
    runs = {}
    for regime in GRID_REGIMES:
        cfg = GenConfig(alignment=regime)
        for rep in range(GRID_REPLICAS):
            m = generate_market(cfg, seed=market_seed(GRID_MASTER, rep))
            for mech in MECHANISM_ORDER:
                for k in range(GRID_SEEDS):
                    seed = mechanism_seed(GRID_MASTER, rep * GRID_SEEDS + k, mech)
                    report = audit(m, MECHANISMS[mech](m, seed=seed).matching)
                    runs.setdefault((regime, mech), []).append(
                        (rep, k, report.direct_envy_stable, dict(report.counts),
                         report.total)
                    )
    cfg = GenConfig(alignment="student_and_college_full")
    for rep in range(GRID_REPLICAS):
        m = generate_market(cfg, seed=market_seed(GRID_MASTER, rep))
        for k in range(GRID_SEEDS):
            seed = mechanism_seed(GRID_MASTER, rep * GRID_SEEDS + k, "csd")
            report = audit(m, MECHANISMS["csd"](m, seed=seed).matching)
            runs.setdefault(("student_and_college_full", "csd"), []).append(
                (rep, k, report.direct_envy_stable, dict(report.counts), report.total)
            )
    return runs


def test_criterion_01_showcase_market_has_no_stable_matching():
    """example1: exactly five feasible individually rational matchings, and
    the classically stable set is empty."""
    cen = census(load_fixture("example1"))
    assert len(cen.matchings) == 5
    assert cen.set_of("stable") == []


def test_criterion_02_unique_des_matching_is_resource_inefficient():
    """prop2: exactly one direct-envy stable matching, pinned contract for
    contract, and its audit flags it resource-inefficient."""
    cen = census(load_fixture("prop2"))
    des = cen.set_of("direct_envy_stable")
    assert des == [Matching([Contract(0, 0, 0), Contract(2, 1, 0)])]
    i = cen.matchings.index(des[0])
    assert cen.reports[i].resource_efficient is False


def test_criterion_03_two_des_matchings_neither_envy_free():
    """prop4: exactly two direct-envy stable matchings, and both still carry
    envy (indirect, so direct-envy stability survives)."""
    cen = census(load_fixture("prop4"))
    des = cen.set_of("direct_envy_stable")
    assert sorted(des, key=lambda mu: sorted(mu.contracts)) == [
        Matching([Contract(0, 0, 0), Contract(1, 1, 0), Contract(2, 2, 1)]),
        Matching([Contract(0, 2, 0), Contract(1, 1, 1), Contract(2, 0, 0)]),
    ]
    for mu in des:
        i = cen.matchings.index(mu)
        assert cen.reports[i].envy_free is False


def test_criterion_04_direct_envy_stable_implies_weakly_stable():
    """Over at least 10,000 audited matchings (every fixture census plus
    random markets up to 6 students / 3 colleges / 2 resources), no matching
    should audit direct-envy stable without also auditing weakly stable."""
    audited = 0
    violations = []

    def scan(tag, cen):
        nonlocal audited
        audited += len(cen.matchings)
        for i, report in enumerate(cen.reports):
            if report.direct_envy_stable and not report.weakly_stable:
                violations.append((tag, i))

    for name in FIXTURE_NAMES:
        scan(name, census(load_fixture(name)))
    rng = np.random.default_rng(424242)
    draw = 0
    while audited < 10_000:
        m = _random_small_market(rng, 6, 3, 2)
        draw += 1
        try:
            cen = census(m, bound=3_000)
        except OracleBoundError:
            continue
        scan(f"random#{draw}", cen)
    assert not violations, (
        f"{len(violations)} of {audited} audited matchings are direct-envy "
        f"stable but not weakly stable; first at {violations[0]}"
    )


def test_criterion_05_optimal_cutoffs_induce_exactly_the_des_set():
    """On 250 random tiny markets, exhaustive enumeration of valid cutoff
    profiles must induce exactly the census's direct-envy stable set, and
    cutoffs_of must round-trip every member back to itself optimally."""
    rng = np.random.default_rng(90210)
    checked = 0
    while checked < 250:
        m = _random_small_market(rng, 3, 2, 1)
        cen = census(m)
        des = {mu for mu in cen.set_of("direct_envy_stable")}
        induced = set()
        for k in _all_valid_profiles(m):
            if is_optimal(m, k):
                induced.add(induced_matching(m, k))
        assert induced == des, (
            f"market {checked}: optimal-profile matchings {induced} "
            f"!= direct-envy stable set {des}"
        )
        for mu in des:
            k = cutoffs_of(m, mu)
            assert induced_matching(m, k) == mu
            assert is_optimal(m, k)
        checked += 1


def test_criterion_06_cutoff_raising_mechanisms_end_des(mechanism_grid):
    """IRC, IMC, and IDC outputs audit direct-envy stable on every run of
    the grid (3 regimes x 100 markets x 5 seeds each)."""
    bad = []
    for regime in GRID_REGIMES:
        for mech in ("irc", "imc", "idc"):
            for rep, k, des, _counts, _total in mechanism_grid[(regime, mech)]:
                if not des:
                    bad.append((regime, mech, rep, k))
    assert not bad, f"{len(bad)} grid runs not direct-envy stable: {bad[:5]}"


def test_criterion_07_uniform_raising_kills_envy_and_resource_waste(
    mechanism_grid,
):
    """IUC outputs carry zero direct envy, zero indirect envy, and zero
    resource waste on every grid run."""
    bad = []
    for regime in GRID_REGIMES:
        for rep, k, _des, counts, _total in mechanism_grid[(regime, "iuc")]:
            if counts["direct_envy"] or counts["indirect_envy"] or counts["resource"]:
                bad.append((regime, rep, k, counts))
    assert not bad, f"{len(bad)} IUC runs with envy or resource waste: {bad[:5]}"


def test_criterion_08_dictatorships_are_non_wasteful_and_pareto_efficient(
    mechanism_grid,
):
    """RSD and CSD outputs carry zero seat waste and zero resource waste on
    every grid run, and are Pareto-efficient on every market small enough
    for the exhaustive check (all six fixtures plus 60 random draws)."""
    bad = []
    for regime in GRID_REGIMES:
        for mech in ("rsd", "csd"):
            for rep, k, _des, counts, _total in mechanism_grid[(regime, mech)]:
                if counts["seat"] or counts["resource"]:
                    bad.append((regime, mech, rep, k, counts))
    assert not bad, f"{len(bad)} dictatorship runs with waste: {bad[:5]}"

    markets = [load_fixture(name) for name in FIXTURE_NAMES]
    rng = np.random.default_rng(31415)
    markets.extend(_random_small_market(rng, 6, 3, 2) for _ in range(60))
    checked = 0
    for i, m in enumerate(markets):
        for mech in ("rsd", "csd"):
            for seed in range(3):
                mu = MECHANISMS[mech](m, seed=seed).matching
                try:
                    efficient = is_pareto_efficient(m, mu, bound=3_000)
                except OracleBoundError:
                    continue
                checked += 1
                assert efficient, f"market {i}, {mech}, seed {seed}: not Pareto"
    assert checked >= 300


def test_criterion_09_college_aligned_csd_is_fully_stable(mechanism_grid):
    """When colleges share one priority order, CSD's output audits with a
    total blocking count of zero on every replica, with or without student
    alignment on top."""
    bad = []
    for regime in ("college_full", "student_and_college_full"):
        for rep, k, _des, _counts, total in mechanism_grid[(regime, "csd")]:
            if total:
                bad.append((regime, rep, k, total))
    assert not bad, f"{len(bad)} aligned CSD runs with blocks: {bad[:5]}"


def test_criterion_10_no_resources_collapses_to_deferred_acceptance():
    """On 100 generated markets with no resources, IRC, IMC, IDC, and IUC
    all return the college-proposing deferred-acceptance matching at every
    seed, and that matching audits classically stable."""
    cfg = GenConfig(n_resources=0)
    for rep in range(100):
        m = generate_market(cfg, seed=market_seed(777, rep))
        da = college_proposing_da(m)
        assert audit(m, da).stable
        for mech in ("irc", "imc", "idc", "iuc"):
            for k in range(2):
                seed = mechanism_seed(777, rep * 2 + k, mech)
                assert MECHANISMS[mech](m, seed=seed).matching == da, (
                    f"replica {rep}, {mech}, seed index {k}"
                )


def test_criterion_11_dropping_the_safe_option_pays_off_except_under_rsd():
    """prop8_market2: reporting only the favorite pair moves student 0 from
    (0, r0) to the truly preferred (1, r0) under all four cutoff mechanisms
    at every seed tried. The probe finds no such edge against RSD on any
    tiny fixture."""
    m = load_fixture("prop8_market2")
    lie = m.with_student_preferences(0, ((1, 0),))
    assert m.pref_position(0, (1, 0)) < m.pref_position(0, (0, 0))
    for mech in ("irc", "imc", "idc", "iuc"):
        for seed in range(5):
            honest = MECHANISMS[mech](m, seed=seed).matching.student_contract(0)
            gamed = MECHANISMS[mech](lie, seed=seed).matching.student_contract(0)
            assert (honest.college, honest.resource) == (0, 0)
            assert (gamed.college, gamed.resource) == (1, 0)
    for name in ("example1", "prop8_market1", "prop8_market2"):
        fixture = load_fixture(name)
        for s in range(fixture.n_students):
            assert strategyproofness_probe(fixture, "rsd", s) is None


def test_criterion_12_blocking_totals_order_imc_below_irc_below_idc():
    """Over 100 shared replicas at default generator settings, mean total
    blocking counts order IMC < IRC < IDC, each gap significant at 5% by a
    one-sided paired t-test."""
    cfg = ExperimentConfig(
        market=GenConfig(),
        replicas=100,
        mechanisms=("imc", "irc", "idc"),
        master_seed=101,
    )
    results = run_experiment(cfg)
    totals = {
        mech: np.array(
            [r.total for r in results if r.mechanism == mech], dtype=float
        )
        for mech in ("imc", "irc", "idc")
    }
    assert totals["imc"].mean() < totals["irc"].mean() < totals["idc"].mean()
    low = stats.ttest_rel(totals["imc"], totals["irc"], alternative="less")
    high = stats.ttest_rel(totals["irc"], totals["idc"], alternative="less")
    assert low.pvalue < 0.05, f"IMC < IRC not significant: p={low.pvalue}"
    assert high.pvalue < 0.05, f"IRC < IDC not significant: p={high.pvalue}"


def test_criterion_13_one_seed_one_byte_stream():
    """Running the same (config, master seed) twice reproduces byte-identical
    market serializations, identical run results (object and JSON), and an
    identical aggregate CSV."""
    cfg = ExperimentConfig(
        market=GenConfig(n_students=30, n_colleges=5, n_resources=2),
        replicas=5,
        mechanisms=("imc", "rsd"),
        master_seed=6,
    )
    passes = []
    for _ in range(2):
        markets = [
            dumps_market(generate_market(cfg.market, seed=market_seed(cfg.master_seed, rep)))
            for rep in range(cfg.replicas)
        ]
        results = run_experiment(cfg)
        passes.append(
            (markets, results, results_to_json(cfg, results), table_csv(aggregate(results)))
        )
    first, second = passes
    assert first[0] == second[0]
    assert first[1] == second[1]
    assert first[2] == second[2]
    assert first[3] == second[3]
