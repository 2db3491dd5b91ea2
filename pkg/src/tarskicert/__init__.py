"""Certified bounds on Tarski numbers of free group actions.

Subgroup cores, partial Schreier-graph windows, the mod-p filtration of
free groups, and machine-checkable paradoxical-decomposition certificates.
"""

__version__ = "0.1.0"

from .errors import (
    AlphabetMismatch,
    BudgetExceeded,
    FiniteIndexError,
    FreenessViolation,
    GreedyStuck,
    InvariantViolation,
    NonEquivariantMap,
    NoPassingIndex,
    NotFound,
    ShapeError,
    TarskicertError,
    UnresolvedTranslate,
)
from .freewords import (
    Alphabet,
    alphabet,
    commutator,
    conj,
    cyclically_reduce,
    inv,
    mul,
    nielsen_reduce,
    reduce_word,
    reduced_words,
    word_key,
)
from .stallings import (
    AbelianMap,
    CoreGraph,
    ForestCert,
    ForestReport,
    conjugate_core,
    core_from_edges,
    core_graph,
    core_to_dot,
    core_to_json,
    find_j,
    find_low_indegree_vertex,
    find_short_cycle,
    gamma2_forest_test,
    intersect,
    sparse_spanning_tree,
)
from .filtration import (
    FiltrationFailure,
    FiltrationIndexCert,
    FindMResult,
    OmegaBasis,
    TruncSeries,
    certify_min_length,
    enumerate_tuples,
    find_m,
    magnus,
    omega_generators,
    power_tuple_stream,
    zassenhaus_member,
)
from .schreier import (
    FRONTIER_EXIT,
    Oracle,
    Window,
    expand,
    export_dot,
    export_json,
    oracle_conjugate,
    oracle_fg,
    oracle_gamma2,
    trace,
)
from .paradox import (
    SATISFIED,
    Decomposition,
    DoublingCert,
    HallViolation,
    TranslatingSets,
    VerifyReport,
    combine_orbits,
    doubling_check,
    exhaustive_hall_search,
    folner_violation,
    forest_doubling_cert,
    free_action_decomposition,
    hall_check,
    lift,
    make_decomposition,
    piece_tags,
    power_cycle_violation,
    restrict_to_orbit,
    shift_sets,
    verify_decomposition,
)
from .towers import (
    COVERAGE_GAP,
    REJECTED,
    TRANSPORTED,
    CandidateReport,
    FiltrationTowerReport,
    FiltrationTowerSpec,
    FreeActionReport,
    Region,
    TarskiTowerSpec,
    YPartition,
    build_filtration_tower,
    build_tarski_tower,
    enumerate_word_tuples,
    partition_Y,
    tarski_lower_report,
    tarski_upper_decomposition,
    verify_filtration_tower,
    verify_free_on_Yj,
)
from .kernels import IMPLEMENTATION

__all__ = [name for name in dir() if not name.startswith("_")]
