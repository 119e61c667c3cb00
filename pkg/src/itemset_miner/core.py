"""Core domain types: itemsets, transactions, the generative model and its objective.

The generative story is simple: every model itemset fires independently with
its own probability and a transaction is the union of the itemsets that fired.
Explaining a transaction means picking a set of model itemsets whose union
covers it; the cost of an explanation is its negative log-probability.
"""

from __future__ import annotations

import math
import operator
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping

import numpy as np

#: Probabilities are clamped this far away from the endpoints inside log terms
#: so every objective value stays finite.
CLAMP_EPS = 1e-12


class DataError(ValueError):
    """Bad input data: malformed files, empty databases, infeasible models."""


class CoverageError(ValueError):
    """A covering violates the constraints of the per-transaction objective."""


def itemset_weight(pi: float) -> float:
    """Selection weight -ln(pi) of using an itemset, clamped to stay finite.

    The clamp keeps the weight strictly positive even at pi == 1; the
    structural search uses an exact zero weight only while force-including a
    fresh candidate.
    """
    return -math.log(min(max(pi, CLAMP_EPS), 1.0 - CLAMP_EPS))


def unused_cost(pi: float) -> float:
    """Cost -ln(1 - pi) paid by every transaction that does not use the itemset.

    Clamped away from pi == 1 so it stays finite. At pi == 0 this is exactly
    0.0: an entry that explains nothing adds nothing, which keeps objective
    comparisons across model sizes meaningful.
    """
    return -math.log1p(-min(pi, 1.0 - CLAMP_EPS))


class Itemset:
    """A canonical, non-empty set of item ids.

    Items are stored sorted and duplicate-free, so itemsets built from any
    ordering of the same ids compare and hash equal. Ordering between itemsets
    is lexicographic on the sorted id tuple and is used for deterministic
    tie-breaking throughout.
    """

    __slots__ = ("_items",)

    def __init__(self, items: Iterable[int]):
        uniq = sorted({operator.index(i) for i in items})
        if not uniq:
            raise ValueError("an itemset must contain at least one item")
        if uniq[0] < 0:
            raise ValueError(f"item ids must be non-negative, got {uniq[0]}")
        self._items = tuple(uniq)

    @property
    def items(self) -> tuple[int, ...]:
        return self._items

    @property
    def is_singleton(self) -> bool:
        return len(self._items) == 1

    def issubset(self, items: Iterable[int]) -> bool:
        return set(self._items).issubset(items)

    def union(self, other: "Itemset") -> "Itemset":
        return Itemset(self._items + other._items)

    def __iter__(self) -> Iterator[int]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, item: int) -> bool:
        return item in self._items

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Itemset) and self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __lt__(self, other: "Itemset") -> bool:
        return self._items < other._items

    def __le__(self, other: "Itemset") -> bool:
        return self._items <= other._items

    def __repr__(self) -> str:
        return f"Itemset({', '.join(map(str, self._items))})"


#: A transaction is a sorted, duplicate-free tuple of item ids; it may be empty.
Transaction = tuple[int, ...]


def make_transaction(items: Iterable[int]) -> Transaction:
    uniq = sorted({operator.index(i) for i in items})
    if uniq and uniq[0] < 0:
        raise ValueError(f"item ids must be non-negative, got {uniq[0]}")
    return tuple(uniq)


class TransactionDb:
    """An ordered collection of transactions plus per-item support counts.

    On construction, items are remapped to dense internal indices 0..n-1 in
    decreasing-support order (ties broken by ascending original id) and each
    transaction is also kept as a bitmask over those indices. The compact
    encoding is what the solver and the support index operate on; original ids
    are preserved for all output.
    """

    __slots__ = ("transactions", "item_supports", "item_order", "item_rank", "masks")

    def __init__(self, transactions: Iterable[Iterable[int]]):
        txns = tuple(make_transaction(t) for t in transactions)
        support: Counter[int] = Counter()
        for t in txns:
            support.update(t)
        order = tuple(sorted(support, key=lambda i: (-support[i], i)))
        rank = {item: k for k, item in enumerate(order)}
        masks = []
        for t in txns:
            m = 0
            for i in t:
                m |= 1 << rank[i]
            masks.append(m)
        self.transactions = txns
        self.item_supports = {i: support[i] for i in sorted(support)}
        self.item_order = order
        self.item_rank = rank
        self.masks = tuple(masks)

    @property
    def m(self) -> int:
        """Number of transactions."""
        return len(self.transactions)

    @property
    def universe_size(self) -> int:
        """Number of distinct items that occur in the database."""
        return len(self.item_order)

    def encode(self, items: Iterable[int]) -> int | None:
        """Bitmask over internal indices, or None if any item never occurs."""
        mask = 0
        rank = self.item_rank
        for i in items:
            k = rank.get(i)
            if k is None:
                return None
            mask |= 1 << k
        return mask

    def decode(self, mask: int) -> tuple[int, ...]:
        """Original item ids (ascending) for a bitmask over internal indices."""
        out = []
        order = self.item_order
        while mask:
            low = mask & -mask
            out.append(order[low.bit_length() - 1])
            mask ^= low
        return tuple(sorted(out))

    def __len__(self) -> int:
        return len(self.transactions)

    def __repr__(self) -> str:
        return f"TransactionDb(m={self.m}, items={self.universe_size})"


class ItemsetModel:
    """A set of itemsets, each with an inclusion probability and an optional
    cached support count.

    Immutable after construction. Iteration, serialization and sampling all
    use the lexicographic itemset order so results are reproducible.
    """

    __slots__ = ("_pis", "_supports", "_itemsets", "universe")

    def __init__(
        self,
        entries: Mapping[Itemset, float] | Iterable[tuple[Itemset, float]],
        universe: int | None = None,
        supports: Mapping[Itemset, int] | None = None,
    ):
        pairs = entries.items() if isinstance(entries, Mapping) else entries
        pis: dict[Itemset, float] = {}
        for itemset, pi in pairs:
            if not isinstance(itemset, Itemset):
                itemset = Itemset(itemset)
            pi = float(pi)
            if not 0.0 <= pi <= 1.0:
                raise ValueError(f"probability out of range for {itemset}: {pi}")
            pis[itemset] = pi
        self._pis = pis
        self._itemsets = tuple(sorted(pis))
        sup: dict[Itemset, int] = {}
        if supports:
            for itemset, count in supports.items():
                if not isinstance(itemset, Itemset):
                    itemset = Itemset(itemset)
                if itemset in pis:
                    sup[itemset] = int(count)
        self._supports = sup
        if universe is None:
            universe = len({i for s in pis for i in s.items})
        self.universe = int(universe)

    @classmethod
    def from_singletons(cls, db: TransactionDb) -> "ItemsetModel":
        """Model holding one singleton per database item, with pi set to its
        relative frequency (the standard starting point for mining)."""
        m = db.m
        entries = {}
        supports = {}
        for item, count in db.item_supports.items():
            s = Itemset((item,))
            entries[s] = count / m
            supports[s] = count
        return cls(entries, universe=db.universe_size, supports=supports)

    @property
    def itemsets(self) -> tuple[Itemset, ...]:
        return self._itemsets

    def pi(self, itemset: Itemset) -> float:
        return self._pis[itemset]

    def support(self, itemset: Itemset) -> int | None:
        """Cached transaction count for the itemset, or None if not cached."""
        return self._supports.get(itemset)

    def items(self) -> set[int]:
        """All distinct items mentioned by the model's itemsets."""
        return {i for s in self._itemsets for i in s.items}

    def __contains__(self, itemset: Itemset) -> bool:
        return itemset in self._pis

    def __len__(self) -> int:
        return len(self._pis)

    def __iter__(self) -> Iterator[Itemset]:
        return iter(self._itemsets)

    def __eq__(self, other: object) -> bool:
        # Supports are a cache, not part of the model identity.
        return (
            isinstance(other, ItemsetModel)
            and self._pis == other._pis
            and self.universe == other.universe
        )

    def __repr__(self) -> str:
        return f"ItemsetModel({len(self._pis)} itemsets, universe={self.universe})"


class CoveringState:
    """Per-transaction latent assignments: which model itemsets explain each
    transaction, and the objective value of that explanation."""

    __slots__ = ("chosen", "costs")

    def __init__(self, chosen: Iterable[Iterable[Itemset]], costs: Iterable[float]):
        self.chosen = tuple(frozenset(c) for c in chosen)
        self.costs = tuple(float(c) for c in costs)
        if len(self.chosen) != len(self.costs):
            raise ValueError("chosen and costs must have one entry per transaction")

    def __len__(self) -> int:
        return len(self.chosen)

    def usage(self, itemset: Itemset) -> int:
        return sum(1 for c in self.chosen if itemset in c)

    def usages(self) -> Counter[Itemset]:
        counts: Counter[Itemset] = Counter()
        for c in self.chosen:
            counts.update(c)
        return counts

    @property
    def mean_cost(self) -> float:
        return math.fsum(self.costs) / len(self.costs) if self.costs else 0.0

    def __repr__(self) -> str:
        return f"CoveringState({len(self.chosen)} transactions)"


def objective_cost(
    model: ItemsetModel,
    transaction: Iterable[int],
    chosen: Iterable[Itemset],
) -> float:
    """Negative log-probability of (transaction, chosen) under the model.

    Every model entry contributes: its selection weight if chosen, its
    unused cost otherwise. The chosen itemsets must all be model entries,
    subsets of the transaction, and together cover it.
    """
    txn = set(make_transaction(transaction))
    chosen_set = frozenset(chosen)
    covered: set[int] = set()
    for s in chosen_set:
        if s not in model:
            raise CoverageError(f"chosen itemset {s} is not a model entry")
        if not s.issubset(txn):
            raise CoverageError(f"chosen itemset {s} is not a subset of the transaction")
        covered.update(s.items)
    if covered != txn:
        missing = sorted(txn - covered)
        raise CoverageError(f"chosen itemsets do not cover items {missing}")
    cost = 0.0
    for s in model.itemsets:
        pi = model.pi(s)
        cost += itemset_weight(pi) if s in chosen_set else unused_cost(pi)
    return cost


def sample_transaction(
    model: ItemsetModel, rng: np.random.Generator
) -> tuple[Transaction, frozenset[Itemset]]:
    """Draw one transaction from the model.

    Each itemset fires independently with its own probability; the transaction
    is the union of the itemsets that fired (overlaps permitted, possibly
    empty). Returns the transaction and the set of itemsets that fired.
    """
    isets = model.itemsets
    if not isets:
        raise ValueError("cannot sample from an empty model")
    draws = rng.random(len(isets))
    fired = frozenset(s for s, u in zip(isets, draws) if u < model.pi(s))
    items: set[int] = set()
    for s in fired:
        items.update(s.items)
    return make_transaction(items), fired
