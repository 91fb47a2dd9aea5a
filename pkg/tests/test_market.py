"""Core model layer: markets, matchings, feasibility, serialization."""

import json

import pytest

from capmatch import (
    EMPTY_RESOURCE,
    Contract,
    Market,
    Matching,
    is_feasible,
    is_individually_rational,
    load_fixture,
    prefers,
    rank,
    validate_market,
)
from capmatch.market import (
    dumps_market,
    loads_market,
    market_from_dict,
    market_to_dict,
    matching_from_list,
    matching_to_list,
)


def tiny_market():
    # two students, two colleges, one shared-region resource, quotas all 1
    return Market(
        n_students=2,
        college_quotas=[1, 1],
        resource_quotas=[1],
        regions=[[0, 1]],
        priorities=[[1, 0], [0, 1]],
        preferences=[
            [(0, 1), (1, 1)],
            [(1, 1), (0, 1)],
        ],
    )


def test_construction_shapes_are_checked():
    with pytest.raises(ValueError):
        Market(2, [1], [1], [], [[0, 1]], [[], []])  # quotas/regions misaligned
    with pytest.raises(ValueError):
        Market(2, [1], [], [], [[0, 1], [1, 0]], [[], []])  # extra priority list
    with pytest.raises(ValueError):
        Market(3, [1], [], [], [[0, 1, 2]], [[], []])  # missing a pref list
    with pytest.raises(ValueError):
        Market(-1, [], [], [], [], [])


def test_empty_resource_is_id_zero_and_everywhere():
    m = tiny_market()
    assert EMPTY_RESOURCE == 0
    assert m.in_region(0, EMPTY_RESOURCE)
    assert m.in_region(1, EMPTY_RESOURCE)
    # the single non-empty resource is id 1 with quota 1, region both colleges
    assert m.resource_quota(1) == 1
    assert m.region(1) == frozenset({0, 1})
    assert m.n_resources == 1  # counts non-empty resources only


def test_rank_is_one_based():
    m = tiny_market()
    assert rank(m, 0, 1) == 1
    assert rank(m, 0, 0) == 2
    assert rank(m, 1, 0) == 1
    m2 = Market(2, [1], [], [], [[0]], [[], []])  # student 1 unranked
    with pytest.raises(ValueError):
        rank(m2, 0, 1)


def test_pref_position_totalizes_with_unmatched_in_the_middle():
    m = tiny_market()
    # student 0 lists (0,1) then (1,1); unmatched sits after the list,
    # unlisted pairs after that.
    assert m.pref_position(0, (0, 1)) == 0
    assert m.pref_position(0, (1, 1)) == 1
    assert m.pref_position(0, None) == 2
    assert m.pref_position(0, (0, 0)) == 3
    assert prefers(m, 0, (0, 1), (1, 1))
    assert prefers(m, 0, None, (0, 0))  # unmatched beats unlisted
    assert not prefers(m, 0, (0, 1), (0, 1))  # strict


def test_duplicate_pref_entries_keep_first_position():
    m = Market(1, [1], [], [], [[0]], [[(0, 0), (0, 0)]])
    assert m.pref_position(0, (0, 0)) == 0
    # the duplicate is a validation warning, not a hard error
    issues = validate_market(m)
    assert any(sev == "error" for sev, _ in issues)


def test_matching_rejects_two_contracts_per_student():
    with pytest.raises(ValueError):
        Matching([Contract(0, 0, 0), Contract(0, 1, 0)])


def test_matching_containers_and_equality():
    mu = Matching([Contract(1, 0, 1), Contract(0, 1, 0)])
    assert len(mu) == 2
    assert Contract(0, 1, 0) in mu
    assert mu.student_contract(0) == Contract(0, 1, 0)
    assert mu.student_contract(7) is None
    assert mu.college_contracts(0) == (Contract(1, 0, 1),)
    assert mu.resource_contracts(1) == (Contract(1, 0, 1),)
    assert mu.college_counts.get(0) == 1
    # order of construction is irrelevant
    assert mu == Matching([Contract(0, 1, 0), Contract(1, 0, 1)])
    assert hash(mu) == hash(Matching([Contract(0, 1, 0), Contract(1, 0, 1)]))
    assert list(mu) == sorted(mu)


def test_feasibility_checks_quotas_and_regions():
    m = tiny_market()
    assert is_feasible(m, Matching([Contract(0, 0, 1)]))
    # two units of resource 1 exceed its regional quota of 1
    assert not is_feasible(m, Matching([Contract(0, 0, 1), Contract(1, 1, 1)]))
    # college quota 1 violated
    m3 = Market(2, [1], [2], [[0]], [[0, 1]], [[(0, 1)], [(0, 1)]])
    assert not is_feasible(m3, Matching([Contract(0, 0, 1), Contract(1, 0, 1)]))
    # region membership: resource 1's region excludes college 1
    m4 = Market(1, [1, 1], [1], [[0]], [[0], [0]], [[(1, 1)]])
    assert not is_feasible(m4, Matching([Contract(0, 1, 1)]))
    assert is_feasible(m4, Matching([Contract(0, 1, 0)]))  # empty resource fine


def test_empty_resource_never_counts_against_resource_quotas():
    m = Market(3, [3], [1], [[0]], [[0, 1, 2]], [[(0, 0)]] * 3)
    mu = Matching([Contract(s, 0, 0) for s in range(3)])
    assert is_feasible(m, mu)


def test_individual_rationality_follows_the_lists():
    m = tiny_market()
    assert is_individually_rational(m, Matching([Contract(0, 0, 1)]))
    assert not is_individually_rational(m, Matching([Contract(0, 0, 0)]))
    assert is_individually_rational(m, Matching())


def test_with_student_preferences_is_a_copy():
    m = tiny_market()
    m2 = m.with_student_preferences(0, [(1, 1)])
    assert m.preferences[0] == ((0, 1), (1, 1))
    assert m2.preferences[0] == ((1, 1),)
    assert m2.preferences[1] == m.preferences[1]
    assert m != m2


VALIDATION_EXPECTATIONS = {
    # fixture -> (n errors, n warnings); warnings are the presence-convention
    # notes for students who list (c, r) without a later (c, r0)
    "example1": (0, 2),
    "example2": (0, 2),
    "prop2": (0, 1),
    "prop4": (0, 1),
    "prop8_market1": (0, 2),
    "prop8_market2": (0, 0),
}


def test_fixture_validation_profile():
    for name, (n_err, n_warn) in VALIDATION_EXPECTATIONS.items():
        issues = validate_market(load_fixture(name))
        errors = [msg for sev, msg in issues if sev == "error"]
        warnings = [msg for sev, msg in issues if sev == "warning"]
        assert len(errors) == n_err, (name, errors)
        assert len(warnings) == n_warn, (name, warnings)


def test_validate_flags_structural_errors():
    bad_quota = Market(1, [0], [], [], [[0]], [[]])
    assert any(sev == "error" for sev, _ in validate_market(bad_quota))

    not_a_permutation = Market(2, [1], [], [], [[0, 0]], [[], []])
    assert any(sev == "error" for sev, _ in validate_market(not_a_permutation))

    unknown_college = Market(1, [1], [], [], [[0]], [[(5, 0)]])
    assert any(sev == "error" for sev, _ in validate_market(unknown_college))

    empty_region = Market(1, [1], [1], [[]], [[0]], [[]])
    assert any(sev == "error" for sev, _ in validate_market(empty_region))


def test_market_dict_round_trip():
    m = load_fixture("prop4")
    assert market_from_dict(market_to_dict(m)) == m
    assert loads_market(dumps_market(m)) == m


def test_market_serialization_is_canonical():
    m = load_fixture("example1")
    text = dumps_market(m)
    assert text == dumps_market(loads_market(text))  # stable under round trip
    assert text.endswith("\n")
    doc = json.loads(text)
    assert json.dumps(doc, indent=2, sort_keys=True) + "\n" == text


def test_matching_list_round_trip():
    mu = Matching([Contract(2, 1, 0), Contract(0, 0, 1)])
    rows = matching_to_list(mu)
    assert rows == [[0, 0, 1], [2, 1, 0]]  # sorted
    assert matching_from_list(rows) == mu


def test_save_and_load(tmp_path):
    from capmatch.market import load_market, save_market

    m = load_fixture("prop2")
    path = tmp_path / "m.json"
    save_market(m, path)
    assert load_market(path) == m
