"""Model learning: hard EM over the coverings, structural search for new
itemsets, candidate generation, and the top-level mining driver.

The miner starts from all singletons, then alternates two moves: a structural
step that force-includes one support-ranked union candidate and keeps it only
if the average per-transaction objective strictly improves, and a hard-EM pass
(run every few accepted candidates) that re-estimates every probability from
the coverings and drops unused non-singleton itemsets.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from heapq import heapify, heappop
from typing import Callable, Optional

from ._parallel import for_each_slice
from .core import (
    CoverageError,
    CoveringState,
    DataError,
    Itemset,
    ItemsetModel,
    TransactionDb,
    itemset_weight,
    unused_cost,
)
from .cover import greedy_cover_masks
from .index import PrefixTree, build_index


class EmptyDatabaseError(DataError):
    """Mining requires at least one transaction."""


#: Callback invoked after every M-step with the current model and coverings.
MStepHook = Callable[[ItemsetModel, CoveringState], None]


@dataclass(frozen=True)
class MiningConfig:
    """Knobs for a mining run.

    max_iterations bounds the number of structural steps; em_every is how many
    accepted candidates accumulate before a hard-EM pass. The seed only feeds
    reporting and synthetic workflows: mining itself is deterministic.
    """

    max_iterations: int = 1000
    queue_capacity: int = 100_000
    em_tolerance: float = 1e-5
    em_every: int = 5
    em_max_iterations: int = 100
    threads: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.queue_capacity < 1:
            raise ValueError("queue_capacity must be >= 1")
        if not self.em_tolerance > 0:
            raise ValueError("em_tolerance must be > 0")
        if self.em_every < 1:
            raise ValueError("em_every must be >= 1")
        if self.em_max_iterations < 1:
            raise ValueError("em_max_iterations must be >= 1")
        if self.threads is not None and self.threads < 1:
            raise ValueError("threads must be >= 1")

    def resolved_threads(self) -> int:
        return self.threads if self.threads is not None else (os.cpu_count() or 1)


@dataclass
class MiningStats:
    iterations: int = 0
    proposed: int = 0
    accepted: int = 0
    rejected: int = 0
    em_runs: int = 0
    em_iterations: int = 0
    exhausted: bool = False
    index_seconds: float = 0.0
    structural_seconds: float = 0.0
    em_seconds: float = 0.0
    total_seconds: float = 0.0


@dataclass(frozen=True)
class MiningResult:
    model: ItemsetModel
    coverings: CoveringState
    stats: MiningStats


class CandidateQueue:
    """Support-ordered queue of pairwise-union candidates.

    Rebuilt lazily whenever the model's itemset set changes: all distinct
    pairs of model itemsets are enumerated best-supported first, their unions
    looked up in the support index (with a persistent support cache), and
    inserted until capacity. Candidates already in the model, already queued,
    or previously rejected are never inserted nor returned; the rejected set
    only grows within a run.
    """

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("queue capacity must be >= 1")
        self.capacity = capacity
        self.rejected: set[Itemset] = set()
        self._heap: list[tuple[int, tuple[int, ...], Itemset]] = []
        self._built_for: frozenset[Itemset] | None = None
        self._sigma: dict[Itemset, int] = {}

    def __len__(self) -> int:
        return len(self._heap)

    def reject(self, itemset: Itemset) -> None:
        self.rejected.add(itemset)

    def next_candidate(
        self, entries: list[tuple[Itemset, int]], index: PrefixTree
    ) -> tuple[Itemset, int] | None:
        """Pop the highest-support candidate, or None when exhausted.

        Ties break by lexicographically smallest itemset. An empty heap
        triggers one rebuild before giving up, since an earlier capacity
        cut-off may have hidden pairs that are now worth queueing.
        """
        model_set = frozenset(s for s, _ in entries)
        rebuilt = False
        if self._built_for != model_set:
            self._rebuild(entries, model_set, index)
            rebuilt = True
        while True:
            while self._heap:
                neg_support, _, cand = heappop(self._heap)
                if cand in self.rejected or cand in model_set:
                    continue
                return cand, -neg_support
            if rebuilt:
                return None
            self._rebuild(entries, model_set, index)
            rebuilt = True

    def _rebuild(
        self, entries: list[tuple[Itemset, int]], model_set: frozenset[Itemset], index: PrefixTree
    ) -> None:
        ranked = sorted(entries, key=lambda e: (-e[1], e[0].items))
        heap: list[tuple[int, tuple[int, ...], Itemset]] = []
        queued: set[Itemset] = set()
        full = False
        for a in range(len(ranked)):
            if full:
                break
            first = ranked[a][0]
            for b in range(a + 1, len(ranked)):
                cand = first.union(ranked[b][0])
                if cand in model_set or cand in self.rejected or cand in queued:
                    continue
                sigma = self._sigma.get(cand)
                if sigma is None:
                    sigma = index.support(cand)
                    self._sigma[cand] = sigma
                heap.append((-sigma, cand.items, cand))
                queued.add(cand)
                if len(heap) >= self.capacity:
                    full = True
                    break
        heapify(heap)
        self._heap = heap
        self._built_for = model_set


def candidate_gen(
    queue: CandidateQueue, model: ItemsetModel, index: PrefixTree
) -> tuple[Itemset, int] | None:
    """Pull the next candidate for the model, or None when the queue is
    exhausted. Missing support caches are filled from the index."""
    entries = []
    for s in model.itemsets:
        support = model.support(s)
        if support is None:
            support = index.support(s)
        entries.append((s, support))
    return queue.next_candidate(entries, index)


def _mask_bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class _Engine:
    """Mutable mining state over the bitmask encoding of one database.

    Model itemsets live in parallel arrays; per-transaction supported lists
    and coverings hold indices into them. Supported lists are maintained
    incrementally (a candidate only ever extends the lists of transactions
    that contain it), which realizes the per-transaction caching that keeps
    structural trials cheap.
    """

    def __init__(self, db: TransactionDb, threads: int = 1, after_m_step: MStepHook | None = None):
        self.db = db
        self.m = db.m
        self.threads = max(1, threads)
        self.after_m_step = after_m_step
        self.stats = MiningStats()
        self.iset_masks: list[int] = []
        self.iset_keys: list[tuple[int, ...]] = []
        self.iset_objs: list[Itemset] = []
        self.pis: list[float] = []
        self.supports: list[int] = []
        self.usage: list[int] = []
        self.is_singleton: list[bool] = []
        self.supported: list[list[int]] = []
        self.chosen: list[list[int]] = []

    @classmethod
    def from_singletons(
        cls, db: TransactionDb, threads: int = 1, after_m_step: MStepHook | None = None
    ) -> "_Engine":
        eng = cls(db, threads, after_m_step)
        m = db.m
        for k, item in enumerate(db.item_order):
            s = Itemset((item,))
            support = db.item_supports[item]
            eng.iset_masks.append(1 << k)
            eng.iset_keys.append(s.items)
            eng.iset_objs.append(s)
            eng.pis.append(support / m)
            eng.supports.append(support)
            eng.usage.append(0)
            eng.is_singleton.append(True)
        # Singleton index k covers exactly internal item k.
        eng.supported = [_mask_bits(t) for t in db.masks]
        eng.chosen = [[] for _ in range(m)]
        return eng

    @classmethod
    def from_model(
        cls,
        db: TransactionDb,
        model: ItemsetModel,
        threads: int = 1,
        after_m_step: MStepHook | None = None,
    ) -> "_Engine":
        eng = cls(db, threads, after_m_step)
        ghost = 1 << db.universe_size  # bit no transaction has: marks unencodable itemsets
        for s in model.itemsets:
            mask = db.encode(s.items)
            eng.iset_masks.append(mask if mask is not None else ghost)
            eng.iset_keys.append(s.items)
            eng.iset_objs.append(s)
            eng.pis.append(model.pi(s))
            eng.supports.append(0)
            eng.usage.append(0)
            eng.is_singleton.append(s.is_singleton)
        count = len(eng.iset_masks)
        masks = eng.iset_masks
        supported: list[list[int]] = []
        for t in db.masks:
            row = [i for i in range(count) if masks[i] & t == masks[i]]
            supported.append(row)
            for i in row:
                eng.supports[i] += 1
        eng.supported = supported
        eng.chosen = [[] for _ in range(db.m)]
        return eng

    def load_coverings(self, coverings: CoveringState) -> None:
        if len(coverings) != self.m:
            raise ValueError("coverings must have one entry per transaction")
        index_of = {s: i for i, s in enumerate(self.iset_objs)}
        masks = self.iset_masks
        usage = [0] * len(self.iset_objs)
        chosen: list[list[int]] = []
        for j, group in enumerate(coverings.chosen):
            t = self.db.masks[j]
            covered = 0
            row = []
            for s in group:
                i = index_of.get(s)
                if i is None:
                    raise CoverageError(f"covering uses {s}, which is not a model entry")
                if masks[i] & t != masks[i]:
                    raise CoverageError(f"{s} is not a subset of transaction {j}")
                covered |= masks[i]
                row.append(i)
                usage[i] += 1
            if covered != t:
                raise CoverageError(f"transaction {j} is not fully covered")
            row.sort()
            chosen.append(row)
        self.chosen = chosen
        self.usage = usage

    # -- E and M steps ----------------------------------------------------

    def _e_step(self, js=None, forced: int | None = None) -> None:
        weights = [itemset_weight(pi) for pi in self.pis]
        if forced is not None:
            weights[forced] = 0.0
        db_masks = self.db.masks
        iset_masks = self.iset_masks
        keys = self.iset_keys
        supported = self.supported
        chosen = self.chosen
        decode = self.db.decode

        def worker(items, start, stop):
            for pos in range(start, stop):
                j = items[pos]
                chosen[j] = greedy_cover_masks(
                    db_masks[j], supported[j], iset_masks, weights, keys, decode
                )

        for_each_slice(worker, range(self.m) if js is None else js, self.threads)

    def _m_step(self) -> None:
        count = len(self.iset_masks)
        chosen = self.chosen
        partials: list[list[int]] = []

        def worker(items, start, stop):
            local = [0] * count
            for pos in range(start, stop):
                for i in chosen[items[pos]]:
                    local[i] += 1
            partials.append(local)

        for_each_slice(worker, range(self.m), self.threads)
        usage = [0] * count
        for local in partials:  # integer sums: merge order cannot matter
            for i, u in enumerate(local):
                usage[i] += u
        self.usage = usage
        m = self.m
        self.pis = [u / m for u in usage]
        self._notify_m_step()

    def _notify_m_step(self) -> None:
        if self.after_m_step is not None:
            model, coverings = self.materialize()
            self.after_m_step(model, coverings)

    def _mean_cost(self) -> float:
        """Average objective over all transactions at the current (pi, z).

        Every covering pays the model-wide sum of unused costs as a base, plus
        weight minus unused cost per chosen itemset; grouping by itemset turns
        the average into a single pass over the model.
        """
        base = 0.0
        used = 0.0
        for pi, u in zip(self.pis, self.usage):
            uc = unused_cost(pi)
            base += uc
            if u:
                used += u * (itemset_weight(pi) - uc)
        return base + used / self.m

    # -- hard EM -----------------------------------------------------------

    def hard_em(self, epsilon: float, max_iterations: int) -> int:
        """Alternate full E and M steps until the pi vector moves by at most
        epsilon (L2), then drop unused non-singleton itemsets."""
        iterations = 0
        for _ in range(max_iterations):
            iterations += 1
            self._e_step()
            previous = self.pis
            self._m_step()
            delta = math.sqrt(
                sum((a - b) * (a - b) for a, b in zip(previous, self.pis))
            )
            if delta <= epsilon:
                break
        self._prune()
        return iterations

    def _prune(self) -> None:
        """Remove zero-usage non-singleton itemsets.

        Singletons always stay: every item must remain coverable in every
        transaction containing it, whatever later E-steps decide.
        """
        count = len(self.iset_masks)
        keep = [self.usage[i] > 0 or self.is_singleton[i] for i in range(count)]
        if all(keep):
            return
        remap = [-1] * count
        kept = 0
        for i in range(count):
            if keep[i]:
                remap[i] = kept
                kept += 1
        for name in ("iset_masks", "iset_keys", "iset_objs", "pis", "supports", "usage", "is_singleton"):
            old = getattr(self, name)
            setattr(self, name, [old[i] for i in range(count) if keep[i]])
        for j in range(self.m):
            self.supported[j] = [remap[i] for i in self.supported[j] if keep[i]]
            self.chosen[j] = [remap[i] for i in self.chosen[j]]

    # -- structural search ---------------------------------------------------

    def try_candidate(self, candidate: Itemset, support: int) -> bool:
        """Force-include the candidate, re-cover the transactions it supports,
        re-estimate every pi, and keep it only on strict improvement of the
        average objective. A rejected candidate leaves no trace."""
        m = self.m
        mask = self.db.encode(candidate.items)
        db_masks = self.db.masks
        if mask is None:
            mask = 1 << self.db.universe_size
            affected: list[int] = []
        else:
            affected = [j for j in range(m) if mask & db_masks[j] == mask]
        mean_before = self._mean_cost()
        pis_before = self.pis[:]
        usage_before = self.usage[:]
        old_chosen = [(j, self.chosen[j]) for j in affected]

        k = len(self.iset_masks)
        self.iset_masks.append(mask)
        self.iset_keys.append(candidate.items)
        self.iset_objs.append(candidate)
        self.pis.append(1.0)
        self.supports.append(support)
        self.usage.append(0)
        self.is_singleton.append(candidate.is_singleton)
        for j in affected:
            self.supported[j].append(k)

        self._e_step(js=affected, forced=k)
        usage = self.usage
        for j, old in old_chosen:
            for i in old:
                usage[i] -= 1
            for i in self.chosen[j]:
                usage[i] += 1
        self.pis = [u / m for u in usage]
        self._notify_m_step()
        mean_after = self._mean_cost()

        if mean_after < mean_before:
            return True
        self.iset_masks.pop()
        self.iset_keys.pop()
        self.iset_objs.pop()
        self.supports.pop()
        self.is_singleton.pop()
        self.pis = pis_before
        self.usage = usage_before
        for j, old in old_chosen:
            self.chosen[j] = old
            self.supported[j].pop()
        return False

    def structural_step(self, queue: CandidateQueue, index: PrefixTree) -> bool:
        """Try support-ranked candidates until one is accepted. Returns False
        when the queue is exhausted (normal convergence signal)."""
        entries = list(zip(self.iset_objs, self.supports))
        while True:
            pulled = queue.next_candidate(entries, index)
            if pulled is None:
                return False
            candidate, support = pulled
            self.stats.proposed += 1
            if self.try_candidate(candidate, support):
                self.stats.accepted += 1
                return True
            queue.reject(candidate)
            self.stats.rejected += 1

    # -- materialization -----------------------------------------------------

    def materialize(self) -> tuple[ItemsetModel, CoveringState]:
        objs = self.iset_objs
        model = ItemsetModel(
            {objs[i]: self.pis[i] for i in range(len(objs))},
            universe=self.db.universe_size,
            supports={objs[i]: self.supports[i] for i in range(len(objs))},
        )
        weights = [itemset_weight(pi) for pi in self.pis]
        unused = [unused_cost(pi) for pi in self.pis]
        base = math.fsum(unused)
        costs = []
        chosen = []
        for row in self.chosen:
            cost = base
            for i in row:
                cost += weights[i] - unused[i]
            costs.append(cost)
            chosen.append([objs[i] for i in row])
        return model, CoveringState(chosen, costs)


def hard_em(
    model: ItemsetModel,
    db: TransactionDb,
    epsilon: float = 1e-5,
    max_iterations: int = 100,
    *,
    threads: int = 1,
    after_m_step: MStepHook | None = None,
) -> tuple[ItemsetModel, CoveringState]:
    """Estimate probabilities for a fixed itemset collection by hard EM.

    Each E-step commits every transaction to its greedy cover under the
    current weights; each M-step sets every pi to its exact usage frequency.
    Stops when the pi vector changes by at most epsilon in L2, then removes
    itemsets that explain nothing (singletons are always retained).
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    engine = _Engine.from_model(db, model, threads=threads, after_m_step=after_m_step)
    engine.hard_em(epsilon, max_iterations)
    return engine.materialize()


def structural_step(
    model: ItemsetModel,
    db: TransactionDb,
    coverings: CoveringState,
    queue: CandidateQueue,
    index: PrefixTree,
    *,
    threads: int = 1,
    after_m_step: MStepHook | None = None,
) -> tuple[ItemsetModel, CoveringState, bool]:
    """Run one structural move: pull candidates until one improves the average
    objective. Returns the (possibly unchanged) model and coverings plus an
    accepted flag; accepted is False only when the queue is exhausted."""
    engine = _Engine.from_model(db, model, threads=threads, after_m_step=after_m_step)
    engine.load_coverings(coverings)
    accepted = engine.structural_step(queue, index)
    new_model, new_coverings = engine.materialize()
    return new_model, new_coverings, accepted


def mine(
    db: TransactionDb,
    config: MiningConfig | None = None,
    *,
    after_m_step: MStepHook | None = None,
) -> MiningResult:
    """Mine a model that explains the database.

    Starts from all singletons with frequency probabilities, then runs up to
    max_iterations structural steps with a hard-EM pass every em_every
    accepted candidates (plus a final pass so the returned model is always
    EM-consistent). Stops early when the candidate queue is exhausted.
    """
    if config is None:
        config = MiningConfig()
    if db.m == 0:
        raise EmptyDatabaseError("empty database")
    started = time.perf_counter()
    engine = _Engine.from_singletons(
        db, threads=config.resolved_threads(), after_m_step=after_m_step
    )
    stats = engine.stats
    engine._e_step()
    engine._m_step()
    t0 = time.perf_counter()
    index = build_index(db)
    stats.index_seconds = time.perf_counter() - t0
    queue = CandidateQueue(config.queue_capacity)
    since_em = 0
    for _ in range(config.max_iterations):
        t0 = time.perf_counter()
        accepted = engine.structural_step(queue, index)
        stats.structural_seconds += time.perf_counter() - t0
        stats.iterations += 1
        if not accepted:
            stats.exhausted = True
            break
        since_em += 1
        if since_em >= config.em_every:
            t0 = time.perf_counter()
            stats.em_iterations += engine.hard_em(config.em_tolerance, config.em_max_iterations)
            stats.em_seconds += time.perf_counter() - t0
            stats.em_runs += 1
            since_em = 0
    if since_em:
        t0 = time.perf_counter()
        stats.em_iterations += engine.hard_em(config.em_tolerance, config.em_max_iterations)
        stats.em_seconds += time.perf_counter() - t0
        stats.em_runs += 1
    model, coverings = engine.materialize()
    stats.total_seconds = time.perf_counter() - started
    return MiningResult(model=model, coverings=coverings, stats=stats)
