"""Single-machine scheduling around an unrestrictive common due date.

Partition model, insert/swap dominance inequalities, local search, exact
solvers and MIP export.
"""

from .dominance import (
    BigMInsert,
    BigMSwap,
    DominanceTables,
    NeighborSets,
    ViolationReport,
    big_m_insert,
    big_m_swap,
    check_dominance,
    delta_insert,
    delta_swap,
    neighbor_sets,
)
from .estimators import BranchAndBoundScheduler, BruteForceScheduler, LocalSearchScheduler, check_instance
from .exact import PartialAssignment, SolveStats, branch_and_bound, brute_force, partial_lower_bound
from .heuristics import HeuristicResult, local_search, multistart, round_fractional
from .instance_io import (
    Instance,
    InstanceError,
    ParseError,
    generate_random,
    parse_native,
    parse_orlib,
    serialize_native,
)
from .mip import MipModel, build_model, emit_lp, read_lp
from .partition import (
    CanonicalSchedule,
    Encoding,
    Partition,
    RatioOrders,
    build_canonical_schedule,
    decode,
    encode,
    evaluate_partition,
    g_value,
    ratio_orders,
    schedule_penalty,
)

__version__ = "0.1.0"
