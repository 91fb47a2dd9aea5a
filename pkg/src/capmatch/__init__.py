"""Two-sided many-to-one matching with regionally capped resources.

Students rank (college, resource) pairs, colleges rank students, and each
non-empty resource has a unit quota shared across the colleges of its region.
The package provides the market model, a blocking/stability audit, cutoff
profiles with four cutoff-raising mechanisms, two serial-dictatorship style
mechanisms, exhaustive oracles for small markets, synthetic market
generators, and a simulation harness with a CLI (`capmatch`).
"""

from .blocking import (
    BLOCK_CATEGORIES,
    BlockingReport,
    audit,
    envy_victims,
    is_direct_envy_blocking,
    is_dominated,
    is_envy_blocking,
    is_waste_blocking,
    waste_block_class,
)
from .cutoffs import (
    CutoffProfile,
    cutoffs_of,
    eligible_contracts,
    increment,
    induced_matching,
    is_optimal,
    maximal_profile,
    zero_profile,
)
from .experiments import (
    AggregateRow,
    ExperimentConfig,
    RunResult,
    aggregate,
    format_cell,
    market_seed,
    mechanism_seed,
    run_experiment,
    run_one,
    table_csv,
    table_text,
)
from .fixtures import FIXTURES, fixture_names, load_fixture
from .generate import GenConfig, generate_market
from .market import (
    EMPTY_RESOURCE,
    Contract,
    Market,
    Matching,
    dumps_market,
    is_feasible,
    is_individually_rational,
    load_market,
    loads_market,
    market_from_dict,
    market_to_dict,
    prefers,
    rank,
    save_market,
    validate_market,
)
from .mechanisms import (
    MECHANISM_ORDER,
    MECHANISMS,
    RunTrace,
    college_proposing_da,
    replay_trace,
    run_csd,
    run_idc,
    run_imc,
    run_irc,
    run_iuc,
    run_rsd,
)
from .oracle import (
    OracleBoundError,
    StabilityCensus,
    census,
    enumerate_matchings,
    is_pareto_efficient,
    strategyproofness_probe,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateRow",
    "BLOCK_CATEGORIES",
    "BlockingReport",
    "Contract",
    "CutoffProfile",
    "EMPTY_RESOURCE",
    "ExperimentConfig",
    "FIXTURES",
    "GenConfig",
    "Market",
    "Matching",
    "MECHANISM_ORDER",
    "MECHANISMS",
    "OracleBoundError",
    "RunResult",
    "RunTrace",
    "StabilityCensus",
    "aggregate",
    "audit",
    "census",
    "college_proposing_da",
    "cutoffs_of",
    "dumps_market",
    "eligible_contracts",
    "enumerate_matchings",
    "envy_victims",
    "fixture_names",
    "format_cell",
    "generate_market",
    "increment",
    "induced_matching",
    "is_direct_envy_blocking",
    "is_dominated",
    "is_envy_blocking",
    "is_feasible",
    "is_individually_rational",
    "is_optimal",
    "is_pareto_efficient",
    "is_waste_blocking",
    "load_fixture",
    "load_market",
    "loads_market",
    "market_from_dict",
    "market_seed",
    "market_to_dict",
    "maximal_profile",
    "mechanism_seed",
    "prefers",
    "rank",
    "replay_trace",
    "run_csd",
    "run_experiment",
    "run_idc",
    "run_imc",
    "run_irc",
    "run_iuc",
    "run_one",
    "run_rsd",
    "save_market",
    "strategyproofness_probe",
    "table_csv",
    "table_text",
    "validate_market",
    "waste_block_class",
    "zero_profile",
    "__version__",
]
