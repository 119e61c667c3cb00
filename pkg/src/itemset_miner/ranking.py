"""Interestingness scoring and the final ranked itemset list.

An itemset's interestingness is the fraction of its supporting transactions
that it actually explains. This deliberately favours rare-but-necessary
itemsets over merely frequent ones; probability enters only as a tie-breaker.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import CoveringState, ItemsetModel, Itemset


@dataclass(frozen=True)
class RankedItemset:
    itemset: Itemset
    interestingness: float
    pi: float
    support: int
    usage: int


def interestingness(usage: int, support: int) -> float:
    """usage / support, the fraction of supporting transactions explained.

    Requires 0 <= usage <= support and support >= 1; an itemset can only
    explain transactions that support it, and every mined itemset occurs in
    at least one transaction.
    """
    if usage < 0 or usage > support:
        raise ValueError(f"usage {usage} outside [0, support={support}]")
    if support < 1:
        raise ValueError("support must be at least 1 for a mined itemset")
    return usage / support


def rank(
    model: ItemsetModel,
    coverings: CoveringState,
    include_singletons: bool = True,
) -> list[RankedItemset]:
    """Rank all model itemsets by interestingness.

    Order: interestingness descending, then pi descending, then itemset
    lexicographic ascending so the result is fully deterministic. Usage is
    recomputed from the coverings; support comes from the model's cache.
    """
    usages = coverings.usages()
    rows = []
    for s in model.itemsets:
        if not include_singletons and s.is_singleton:
            continue
        support = model.support(s)
        if support is None:
            raise ValueError(f"model has no cached support for {s}")
        usage = usages.get(s, 0)
        rows.append(RankedItemset(s, interestingness(usage, support), model.pi(s), support, usage))
    rows.sort(key=lambda r: (-r.interestingness, -r.pi, r.itemset.items))
    return rows
