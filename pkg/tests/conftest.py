"""Shared builders for randomized tests. Everything is seeded explicitly."""

from __future__ import annotations

import numpy as np

from itemset_miner import Itemset, ItemsetModel, TransactionDb


def random_db(rng: np.random.Generator, m: int, n_items: int, density: float) -> TransactionDb:
    """Database of m transactions where each of n_items appears independently
    with probability density (items are ids 1..n_items)."""
    rows = rng.random((m, n_items)) < density
    return TransactionDb([(np.flatnonzero(row) + 1).tolist() for row in rows])


def naive_support(db: TransactionDb, items) -> int:
    """Full-scan support count, the oracle for the prefix-tree index."""
    wanted = set(items)
    return sum(1 for txn in db.transactions if wanted.issubset(txn))


def planted_model(rng: np.random.Generator, n_items: int = 30, n_planted: int = 20,
                  pi_lo: float = 0.05, pi_hi: float = 0.3) -> ItemsetModel:
    """Truth model for recovery experiments: n_planted random itemsets of size
    2..4 with probabilities in [pi_lo, pi_hi], plus low-rate singleton noise on
    every item."""
    ids = np.arange(1, n_items + 1)
    planted: set[tuple[int, ...]] = set()
    while len(planted) < n_planted:
        size = int(rng.integers(2, 5))
        planted.add(tuple(sorted(rng.choice(ids, size=size, replace=False).tolist())))
    entries = {Itemset(t): float(rng.uniform(pi_lo, pi_hi)) for t in planted}
    for i in ids:
        entries[Itemset((int(i),))] = float(rng.uniform(0.01, 0.05))
    return ItemsetModel(entries)
