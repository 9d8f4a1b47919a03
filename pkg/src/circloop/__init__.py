"""Planning engine for circular-economy supplier choices under planetary bounds."""

from .bitsets import (
    BitsetTable,
    MaterialBitset,
    ReuseReport,
    StaleVersionError,
    bitset_from_scratch,
    bitset_update_on_move,
    reuse_match,
)
from .documents import DocumentError, Plan, parse_economy, parse_plan, serialize_economy
from .economy import (
    Demand,
    Economy,
    EconomyError,
    InputSlot,
    ProductSpec,
    RawMaterial,
    substitutes,
    validate,
)
from .evaluation import Evaluation, Objective, evaluate
from .generate import generate_economy
from .lca import (
    FeasibilityReport,
    LcaVector,
    PlanetaryBounds,
    Weights,
    check_bounds,
    lca_apply_replacement,
    lca_product,
    lca_raw,
    scalarize,
    total_impact,
)
from .moves import (
    IllegalMoveError,
    Move,
    UndoOrderError,
    UndoToken,
    apply_move,
    legal_moves,
    perft,
    undo_move,
)
from .search import (
    MctsParams,
    SearchResult,
    SearchSpaceError,
    search_beam,
    search_exhaustive,
    search_greedy,
    search_mcts,
)
from .state import Configuration

__version__ = "0.1.0"
