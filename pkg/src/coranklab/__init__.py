"""coranklab: a verification laboratory for corank statistics of random
0/1 Bernoulli matrices — exact and Monte Carlo corank probabilities plus
the anticoncentration and column-selection machinery behind them."""

from .anticoncentration import (
    AtomDistribution,
    LkrCheck,
    build_distribution,
    build_vector_distribution,
    lkr_bound_check,
    scalar_levy,
    threshold,
    vector_levy_bracket,
)
from .errors import InputError, InvariantViolation, ResourceRefusal
from .experiments import (
    BoundRow,
    CorankDistribution,
    EstimateRecord,
    bound_table,
    enumerate_corank,
    fixed_vector_event_mc,
    mc_corank,
)
from .geometry import (
    VectorClass,
    classify_vector,
    distance_to_sparse,
    restricted_operator_norm,
    smallest_singular_value,
)
from .matrix import (
    BernoulliMatrix,
    RankResult,
    from_entries,
    from_text,
    rank_mod_prime,
    rank_rational,
    sample_matrix,
    to_text,
)
from .records import TOOL_VERSION
from .rinv import ColumnSelection, select_columns
from .theta import (
    ThetaCertificate,
    ThetaVerification,
    build_top_index_sets,
    compute_theta,
    verify_theta,
)

__version__ = TOOL_VERSION
