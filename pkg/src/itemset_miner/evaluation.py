"""Evaluation harness: synthetic database generation and quality metrics.

Recovery experiments sample a database from a known model, mine it, and score
the ranked output with precision/recall (exact itemset equality, 11-point
interpolated precision). Redundancy is scored with the average inter-itemset
distance: the mean over a top-k list of each itemset's minimum symmetric
difference to the others.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .core import Itemset, ItemsetModel, TransactionDb, sample_transaction


def generate_db(model: ItemsetModel, m: int, seed: int) -> TransactionDb:
    """Sample m independent transactions from the model.

    Each transaction uses its own random substream derived from (seed, index),
    so generation is reproducible and could be partitioned across workers
    without changing the result. Empty draws are kept.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    transactions = []
    for j in range(m):
        rng = np.random.default_rng((seed, j))
        txn, _ = sample_transaction(model, rng)
        transactions.append(txn)
    return TransactionDb(transactions)


RECALL_GRID = tuple(k / 10 for k in range(11))


@dataclass(frozen=True)
class PrCurve:
    """Precision/recall points at every top-k cutoff plus the 11-point
    interpolated precision at recall 0.0, 0.1, ..., 1.0."""

    points: tuple[tuple[float, float], ...]  # (recall, precision) per cutoff
    interpolated: tuple[float, ...]


def precision_recall(mined: Sequence[Itemset], truth: Iterable[Itemset]) -> PrCurve:
    """Score a ranked list against the generating itemsets.

    Membership is exact itemset equality. Interpolated precision at recall r
    is the maximum precision over all cutoffs with recall >= r (0 when the
    recall level is never reached), which makes it non-increasing in r.
    """
    truth_set = frozenset(truth)
    if not truth_set:
        raise ValueError("truth must contain at least one itemset")
    points = []
    hits = 0
    for k, itemset in enumerate(mined, start=1):
        if itemset in truth_set:
            hits += 1
        points.append((hits / len(truth_set), hits / k))
    interpolated = tuple(
        max((p for r, p in points if r >= level), default=0.0) for level in RECALL_GRID
    )
    return PrCurve(points=tuple(points), interpolated=interpolated)


def inter_itemset_distance(itemsets: Sequence[Itemset], k: int) -> float:
    """Average inter-itemset distance of the top-k list.

    For each of the first k itemsets, take the minimum symmetric-difference
    size against the other k-1, and average. Higher means less redundant.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(itemsets) < k:
        raise ValueError(f"need {k} itemsets, got {len(itemsets)}")
    top = [frozenset(s.items) for s in itemsets[:k]]
    total = 0
    for i, a in enumerate(top):
        total += min(len(a ^ b) for j, b in enumerate(top) if j != i)
    return total / k
