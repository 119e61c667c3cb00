"""Per-transaction inference: explain a transaction as a minimum-weight cover.

Choosing the most probable explanation for a transaction is a weighted
set-cover problem over the model itemsets contained in it, with weight
-ln(pi) per itemset. The greedy algorithm below repeatedly takes the itemset
with the best weight per newly covered item, which is within a factor
H(|X|) = ln|X| + 1 of the optimal cover weight. An exhaustive oracle is
provided for testing at small sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heapify, heappop, heappush
from typing import Callable

from .core import (
    CoverageError,
    DataError,
    Itemset,
    ItemsetModel,
    Transaction,
    itemset_weight,
    make_transaction,
    unused_cost,
)


class InfeasibleCoverError(DataError):
    """Some transaction item is not covered by any supported itemset."""


class InstanceTooLargeError(ValueError):
    """The exhaustive oracle refuses instances above its enumeration guard."""


@dataclass(frozen=True)
class SupportedItemset:
    itemset: Itemset
    pi: float
    weight: float


@dataclass(frozen=True)
class SupportedSet:
    """The model itemsets contained in one transaction, with their weights."""

    transaction: Transaction
    entries: tuple[SupportedItemset, ...]

    def __len__(self) -> int:
        return len(self.entries)


def supported_itemsets(model: ItemsetModel, transaction) -> SupportedSet:
    """All model entries that are subsets of the transaction, in lexicographic
    order, each paired with its selection weight."""
    txn = make_transaction(transaction)
    txn_set = set(txn)
    entries = tuple(
        SupportedItemset(s, model.pi(s), itemset_weight(model.pi(s)))
        for s in model.itemsets
        if s.issubset(txn_set)
    )
    return SupportedSet(txn, entries)


def greedy_cover_masks(
    target: int,
    candidates: list[int],
    masks: list[int],
    weights: list[float],
    keys: list[tuple[int, ...]],
    decode: Callable[[int], tuple[int, ...]] = None,
) -> list[int]:
    """Greedy weighted set cover over bitmask-encoded itemsets.

    candidates are indices into masks/weights/keys; every candidate mask must
    be a subset of target. Returns the chosen indices in selection order.

    Uses a lazy priority queue: adding itemsets to the cover only shrinks the
    marginal coverage of the rest, so a popped entry whose refreshed ratio
    still beats the top of the heap is globally best. Ties break by larger
    new-item count, then lexicographically smallest itemset key.
    """
    chosen: list[int] = []
    covered = 0
    if target == 0:
        return chosen
    heap = []
    for i in candidates:
        mask = masks[i]
        n = mask.bit_count()
        heap.append((weights[i] / n, -n, keys[i], i))
    heapify(heap)
    while covered != target:
        if not heap:
            uncovered = target & ~covered
            where = decode(uncovered) if decode else bin(uncovered)
            raise InfeasibleCoverError(f"no supported itemset covers items {where}")
        ratio, _, key, i = heappop(heap)
        new_mask = masks[i] & ~covered
        if not new_mask:
            continue  # contributes nothing now, and never will again
        n = new_mask.bit_count()
        ratio = weights[i] / n
        if heap:
            top = heap[0]
            stale = ratio > top[0] or (
                ratio == top[0] and (-n > top[1] or (-n == top[1] and key > top[2]))
            )
            if stale:
                heappush(heap, (ratio, -n, key, i))
                continue
        covered |= masks[i]
        chosen.append(i)
    return chosen


def _encode_supported(supported: SupportedSet):
    """Ad-hoc bitmask encoding of a supported set over its own transaction."""
    txn = supported.transaction
    rank = {item: k for k, item in enumerate(txn)}
    target = (1 << len(txn)) - 1
    masks = []
    for entry in supported.entries:
        mask = 0
        for i in entry.itemset.items:
            mask |= 1 << rank[i]
        masks.append(mask)
    return target, masks


def greedy_cover(supported: SupportedSet) -> frozenset[Itemset]:
    """Greedy cover of the supported set's transaction.

    Raises InfeasibleCoverError when some item has no supporting itemset,
    which signals a violated model feasibility invariant.
    """
    target, masks = _encode_supported(supported)
    entries = supported.entries
    weights = [e.weight for e in entries]
    keys = [e.itemset.items for e in entries]
    txn = supported.transaction

    def decode(mask: int) -> tuple[int, ...]:
        return tuple(txn[k] for k in range(len(txn)) if mask >> k & 1)

    chosen = greedy_cover_masks(target, list(range(len(entries))), masks, weights, keys, decode)
    return frozenset(entries[i].itemset for i in chosen)


ORACLE_LIMIT = 25


def _enumerate_covers(supported: SupportedSet, cost_of: Callable[[int], float]):
    """Minimize a per-itemset additive cost over all exact covers by brute force."""
    k = len(supported.entries)
    if k > ORACLE_LIMIT:
        raise InstanceTooLargeError(f"{k} supported itemsets exceeds the limit of {ORACLE_LIMIT}")
    target, masks = _encode_supported(supported)
    entries = supported.entries
    costs = [cost_of(i) for i in range(k)]
    best = None
    best_key = None
    for sel in range(1 << k):
        union = 0
        total = 0.0
        members = []
        for i in range(k):
            if sel >> i & 1:
                union |= masks[i]
                total += costs[i]
                members.append(i)
        if union != target:
            continue
        key = (total, tuple(entries[i].itemset.items for i in members))
        if best_key is None or key < best_key:
            best_key = key
            best = members
    if best is None:
        raise InfeasibleCoverError("supported itemsets cannot cover the transaction")
    return frozenset(entries[i].itemset for i in best)


def exact_cover_oracle(supported: SupportedSet, model: ItemsetModel) -> frozenset[Itemset]:
    """Exhaustively find the cover minimizing the full objective.

    Model entries outside the supported set contribute the same unused cost to
    every cover, so minimizing the chosen entries' weight minus their saved
    unused cost is equivalent. Ties break by the lexicographically smallest
    chosen set. Testing aid only; guarded at ORACLE_LIMIT supported itemsets.
    """
    entries = supported.entries

    def cost_of(i: int) -> float:
        return entries[i].weight - unused_cost(entries[i].pi)

    return _enumerate_covers(supported, cost_of)


def min_weight_cover_oracle(supported: SupportedSet) -> frozenset[Itemset]:
    """Exhaustively find the cover of minimum total selection weight.

    This is the plain weighted set-cover optimum that the greedy algorithm's
    approximation guarantee is stated against.
    """
    entries = supported.entries
    return _enumerate_covers(supported, lambda i: entries[i].weight)


def selection_weight(chosen: frozenset[Itemset], supported: SupportedSet) -> float:
    """Total selection weight of a cover, looked up in the supported set."""
    by_itemset = {e.itemset: e.weight for e in supported.entries}
    return sum(by_itemset[s] for s in chosen)


def verify_cover(supported: SupportedSet, chosen: frozenset[Itemset]) -> None:
    """Raise CoverageError unless chosen is a valid cover of the transaction."""
    txn = set(supported.transaction)
    known = {e.itemset for e in supported.entries}
    covered: set[int] = set()
    for s in chosen:
        if s not in known:
            raise CoverageError(f"{s} is not in the supported set")
        covered.update(s.items)
    if covered != txn:
        raise CoverageError(f"cover misses items {sorted(txn - covered)}")
