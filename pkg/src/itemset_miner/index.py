"""Prefix-tree index over the transaction database for exact support queries.

Transactions are inserted with items reordered by decreasing global support,
which maximizes prefix sharing. Chains without branching or count changes are
run-compressed into single nodes, and no sibling links are kept; a support
query walks the tree depth-first and adds up the counts of every node at
which the queried items are fully matched.
"""

from __future__ import annotations

from collections.abc import Iterable

from .core import Itemset, TransactionDb


class _Node:
    __slots__ = ("items", "count", "children")

    def __init__(self, items: list[int], count: int, children: dict[int, "_Node"]):
        self.items = items  # run of internal ids, strictly increasing along the path
        self.count = count  # transactions whose reordered prefix includes the full run
        self.children = children  # keyed by the first id of each child's run


class PrefixTree:
    """Immutable-after-build support index; safe for concurrent queries."""

    def __init__(self, db: TransactionDb):
        self._db = db
        self._root = _Node([], 0, {})
        for mask in db.masks:
            self._insert(mask)

    def _insert(self, mask: int) -> None:
        # Ascending internal id order is exactly decreasing-support order.
        seq = []
        while mask:
            low = mask & -mask
            seq.append(low.bit_length() - 1)
            mask ^= low
        node = self._root
        node.count += 1
        pos = 0
        while pos < len(seq):
            child = node.children.get(seq[pos])
            if child is None:
                node.children[seq[pos]] = _Node(seq[pos:], 1, {})
                return
            run = child.items
            k = 0
            while k < len(run) and pos < len(seq) and run[k] == seq[pos]:
                k += 1
                pos += 1
            if k < len(run):
                # The new transaction diverges (or ends) inside this run: split it.
                tail = _Node(run[k:], child.count, child.children)
                child.items = run[:k]
                child.children = {run[k]: tail}
                child.count += 1
                if pos < len(seq):
                    child.children[seq[pos]] = _Node(seq[pos:], 1, {})
                return
            child.count += 1
            node = child

    def support(self, itemset: Itemset | Iterable[int]) -> int:
        """Exact number of transactions containing the itemset.

        Items unknown to the database give support 0. The walk prunes any
        subtree whose items have already passed the next queried id, since
        ids only increase along a path.
        """
        items = itemset.items if isinstance(itemset, Itemset) else tuple(itemset)
        if not items:
            raise ValueError("support of the empty itemset is not defined")
        rank = self._db.item_rank
        query = []
        for item in set(items):
            k = rank.get(item)
            if k is None:
                return 0
            query.append(k)
        query.sort()
        nq = len(query)
        total = 0
        stack = [(self._root, 0)]
        while stack:
            node, qi = stack.pop()
            pruned = False
            for item in node.items:
                if item == query[qi]:
                    qi += 1
                    if qi == nq:
                        break
                elif item > query[qi]:
                    pruned = True
                    break
            if pruned:
                continue
            if qi == nq:
                total += node.count  # descendants are already included in this count
                continue
            want = query[qi]
            for first, child in node.children.items():
                if first <= want:
                    stack.append((child, qi))
        return total

    def node_count(self) -> int:
        """Number of nodes excluding the root sentinel."""
        count = 0
        stack = [self._root]
        while stack:
            node = stack.pop()
            count += len(node.children)
            stack.extend(node.children.values())
        return count

    def _end_counts(self) -> list[int]:
        """Per-node count of transactions ending there (root included)."""
        out = []
        stack = [self._root]
        while stack:
            node = stack.pop()
            out.append(node.count - sum(c.count for c in node.children.values()))
            stack.extend(node.children.values())
        return out


def build_index(db: TransactionDb) -> PrefixTree:
    """Build the support index for a loaded database."""
    return PrefixTree(db)
