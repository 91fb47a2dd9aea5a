"""Bundled example markets used by tests, demos, and the oracle CLI.

Each fixture is a small hand-built market stored as a JSON file under
capmatch/fixtures/. They are chosen to pin down corner cases of the model:
markets with no stable matching, wasteful but direct-envy stable outcomes,
manipulable cutoff runs, and the failure of feasibility heredity.
"""

from __future__ import annotations

from importlib import resources

from .market import Market, loads_market

# name -> one-line description of what the market demonstrates
FIXTURES: dict[str, str] = {
    "example1": (
        "two students and two colleges sharing one resource unit; "
        "no stable matching exists"
    ),
    "example2": (
        "one college with three seats and one resource unit; a feasible "
        "matching can have infeasible same-size sets inside the same college"
    ),
    "prop2": (
        "three students, three colleges, one shared unit; the unique "
        "direct-envy stable matching leaves the unit unused"
    ),
    "prop4": (
        "three students, three colleges, one shared unit; exactly two "
        "direct-envy stable matchings and neither is envy-free"
    ),
    "prop8_market1": (
        "two students, two colleges, one shared unit; processing college 0 "
        "first locks every cutoff mechanism into the unstable outcome"
    ),
    "prop8_market2": (
        "seat-only market where truncating one preference list strictly "
        "improves that student under every cutoff mechanism"
    ),
}


# name -> expected census facts, as {flag: indices into the census's
# enumeration order}. The oracle CLI re-checks these on every run so a
# drifting enumeration or audit shows up as a failed expectation, not a
# silently different report.
FIXTURE_EXPECTATIONS: dict[str, dict[str, tuple[int, ...]]] = {
    "example1": {"stable": (), "direct_envy_stable": (2, 4)},
    "example2": {"stable": (21,), "direct_envy_stable": (21,)},
    "prop2": {"direct_envy_stable": (8,), "weakly_stable": ()},
    "prop4": {"direct_envy_stable": (30, 48)},
    "prop8_market1": {"stable": (1,), "direct_envy_stable": (1, 3)},
    "prop8_market2": {"stable": (4, 6), "direct_envy_stable": (4, 6)},
}


def fixture_names() -> list[str]:
    return sorted(FIXTURES)


def load_fixture(name: str) -> Market:
    """Load a bundled market by name.

    Raises:
        KeyError: unknown fixture name.
    """
    if name not in FIXTURES:
        raise KeyError(
            f"unknown fixture {name!r}; available: {', '.join(fixture_names())}"
        )
    text = (
        resources.files("capmatch").joinpath("fixtures", f"{name}.json").read_text()
    )
    return loads_market(text)
