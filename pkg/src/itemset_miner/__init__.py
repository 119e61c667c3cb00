"""Mining of explanatory itemsets from transaction databases.

A transaction database is modeled as unions of independently firing itemsets;
mining recovers a small itemset collection that explains the data, ranked by
how necessary each itemset is to the explanation.
"""

from .core import (
    CLAMP_EPS,
    CoverageError,
    CoveringState,
    DataError,
    Itemset,
    ItemsetModel,
    Transaction,
    TransactionDb,
    itemset_weight,
    make_transaction,
    objective_cost,
    sample_transaction,
    unused_cost,
)
from .cover import (
    InfeasibleCoverError,
    InstanceTooLargeError,
    SupportedItemset,
    SupportedSet,
    exact_cover_oracle,
    greedy_cover,
    min_weight_cover_oracle,
    supported_itemsets,
)
from .evaluation import PrCurve, generate_db, inter_itemset_distance, precision_recall
from .formats import (
    FimiParseError,
    ModelFormatError,
    load_fimi,
    load_model,
    read_ranked_itemsets,
    save_model,
    write_fimi,
    write_ranked_tsv,
)
from .index import PrefixTree, build_index
from .learning import (
    CandidateQueue,
    EmptyDatabaseError,
    MiningConfig,
    MiningResult,
    MiningStats,
    candidate_gen,
    hard_em,
    mine,
    structural_step,
)
from .ranking import RankedItemset, interestingness, rank

__version__ = "0.1.0"

__all__ = [
    "CLAMP_EPS",
    "CandidateQueue",
    "CoverageError",
    "CoveringState",
    "DataError",
    "EmptyDatabaseError",
    "FimiParseError",
    "InfeasibleCoverError",
    "InstanceTooLargeError",
    "Itemset",
    "ItemsetModel",
    "MiningConfig",
    "MiningResult",
    "MiningStats",
    "ModelFormatError",
    "PrCurve",
    "PrefixTree",
    "RankedItemset",
    "SupportedItemset",
    "SupportedSet",
    "Transaction",
    "TransactionDb",
    "build_index",
    "candidate_gen",
    "exact_cover_oracle",
    "generate_db",
    "greedy_cover",
    "hard_em",
    "inter_itemset_distance",
    "interestingness",
    "itemset_weight",
    "load_fimi",
    "load_model",
    "make_transaction",
    "mine",
    "min_weight_cover_oracle",
    "objective_cost",
    "precision_recall",
    "rank",
    "read_ranked_itemsets",
    "sample_transaction",
    "save_model",
    "structural_step",
    "supported_itemsets",
    "unused_cost",
    "write_fimi",
    "write_ranked_tsv",
]
