"""Core types, the per-transaction objective, and the generative sampler."""

import math

import numpy as np
import pytest

from itemset_miner import (
    CoverageError,
    Itemset,
    ItemsetModel,
    TransactionDb,
    itemset_weight,
    make_transaction,
    objective_cost,
    sample_transaction,
    unused_cost,
)

LN2 = 0.6931471805599453


class TestItemset:
    def test_canonical_form(self):
        assert Itemset([3, 1, 2]) == Itemset([1, 2, 3]) == Itemset((2, 3, 1, 1))
        assert hash(Itemset([3, 1])) == hash(Itemset([1, 3]))
        assert Itemset([5, 2, 5]).items == (2, 5)

    def test_rejects_empty_and_negative(self):
        with pytest.raises(ValueError):
            Itemset([])
        with pytest.raises(ValueError):
            Itemset([1, -2])

    def test_ordering_is_lexicographic(self):
        assert Itemset([1, 4]) < Itemset([2])
        assert Itemset([1, 2]) < Itemset([1, 2, 3])

    def test_subset_and_union(self):
        assert Itemset([1, 3]).issubset((1, 2, 3))
        assert not Itemset([1, 4]).issubset((1, 2, 3))
        assert Itemset([1, 2]).union(Itemset([2, 5])) == Itemset([1, 2, 5])


class TestTransactionDb:
    def test_dedup_and_supports(self):
        db = TransactionDb([[1, 2, 3], [2, 2, 5]])
        assert db.m == 2
        assert db.transactions == ((1, 2, 3), (2, 5))
        assert db.item_supports == {1: 1, 2: 2, 3: 1, 5: 1}

    def test_empty_transactions_are_kept(self):
        db = TransactionDb([[], [7], []])
        assert db.m == 3
        assert db.transactions == ((), (7,), ())
        assert db.item_supports == {7: 1}

    def test_internal_order_is_support_descending_then_id(self):
        db = TransactionDb([[4, 9], [4], [9], [2]])
        # supports: 4 -> 2, 9 -> 2, 2 -> 1; ties break by ascending id
        assert db.item_order == (4, 9, 2)
        assert db.item_rank == {4: 0, 9: 1, 2: 2}
        assert db.masks == (0b011, 0b001, 0b010, 0b100)

    def test_encode_decode_roundtrip(self):
        db = TransactionDb([[10, 20, 30], [20]])
        mask = db.encode([30, 10])
        assert db.decode(mask) == (10, 30)
        assert db.encode([10, 99]) is None

    def test_make_transaction(self):
        assert make_transaction([5, 1, 5, 3]) == (1, 3, 5)
        assert make_transaction([]) == ()


class TestItemsetModel:
    def test_probability_validation(self):
        with pytest.raises(ValueError):
            ItemsetModel({Itemset([1]): 1.5})

    def test_equality_ignores_support_cache(self):
        a = ItemsetModel({Itemset([1]): 0.5}, supports={Itemset([1]): 3})
        b = ItemsetModel({Itemset([1]): 0.5})
        assert a == b
        assert a.support(Itemset([1])) == 3
        assert b.support(Itemset([1])) is None

    def test_from_singletons(self):
        db = TransactionDb([[1, 2], [1], [1, 3]])
        model = ItemsetModel.from_singletons(db)
        assert set(model.itemsets) == {Itemset([1]), Itemset([2]), Itemset([3])}
        assert model.pi(Itemset([1])) == 1.0
        assert model.pi(Itemset([2])) == pytest.approx(1 / 3)
        assert model.support(Itemset([3])) == 1

    def test_iteration_is_sorted(self):
        model = ItemsetModel({Itemset([2]): 0.1, Itemset([1, 3]): 0.2, Itemset([1]): 0.3})
        assert list(model) == [Itemset([1]), Itemset([1, 3]), Itemset([2])]


class TestClamping:
    def test_interior_values_are_exact(self):
        assert itemset_weight(0.5) == pytest.approx(LN2, abs=1e-15)
        assert unused_cost(0.25) == pytest.approx(-math.log(0.75), abs=1e-15)

    def test_endpoints_are_finite(self):
        assert 0.0 < itemset_weight(1.0) < 1e-11
        assert itemset_weight(0.0) == pytest.approx(-math.log(1e-12))
        assert unused_cost(1.0) == pytest.approx(-math.log(1e-12))

    def test_unused_cost_of_dead_entry_is_exactly_zero(self):
        # An entry with pi == 0 must add nothing to any transaction.
        assert unused_cost(0.0) == 0.0


class TestObjectiveCost:
    def test_single_entry(self):
        s = Itemset([1, 2])
        model = ItemsetModel({s: 0.5})
        assert objective_cost(model, (1, 2), {s}) == pytest.approx(LN2, abs=1e-12)

    def test_two_entry_example(self):
        a, b = Itemset([1]), Itemset([2, 3])
        model = ItemsetModel({a: 0.5, b: 0.25})
        cost = objective_cost(model, (1,), {a})
        # -ln(0.5) - ln(0.75), both terms evaluated independently by hand
        assert cost == pytest.approx(0.9808292530117262, abs=1e-12)

    def test_unused_candidate_adds_its_absence_term(self):
        s = Itemset([1, 2])
        extra = Itemset([3, 4])
        base = ItemsetModel({s: 0.5})
        bigger = ItemsetModel({s: 0.5, extra: 0.1})
        before = objective_cost(base, (1, 2), {s})
        after = objective_cost(bigger, (1, 2), {s})
        assert after - before == pytest.approx(-math.log(0.9), abs=1e-12)
        assert after - before == pytest.approx(unused_cost(0.1), abs=1e-15)

    def test_empty_transaction_costs_only_absence_terms(self):
        model = ItemsetModel({Itemset([1]): 0.25, Itemset([2]): 0.5})
        cost = objective_cost(model, (), ())
        assert cost == pytest.approx(-math.log(0.75) - math.log(0.5), abs=1e-12)

    def test_rejects_non_subset(self):
        s = Itemset([1, 2])
        model = ItemsetModel({s: 0.5, Itemset([1]): 0.5})
        with pytest.raises(CoverageError):
            objective_cost(model, (1,), {s})

    def test_rejects_uncovered(self):
        model = ItemsetModel({Itemset([1]): 0.5, Itemset([2]): 0.5})
        with pytest.raises(CoverageError):
            objective_cost(model, (1, 2), {Itemset([1])})

    def test_rejects_unknown_itemset(self):
        model = ItemsetModel({Itemset([1]): 0.5})
        with pytest.raises(CoverageError):
            objective_cost(model, (1,), {Itemset([1]), Itemset([9])})

    def test_decomposes_into_weights_plus_absence_terms(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            pool = [Itemset(sorted(rng.choice(np.arange(1, 9), size=int(rng.integers(1, 4)),
                                              replace=False).tolist()))
                    for _ in range(n)]
            model = ItemsetModel({s: float(rng.uniform(0, 1)) for s in pool})
            chosen = {s for s in model.itemsets if rng.random() < 0.6} or {model.itemsets[0]}
            txn = sorted({i for s in chosen for i in s.items})
            cost = objective_cost(model, txn, chosen)
            expected = sum(itemset_weight(model.pi(s)) for s in chosen) + sum(
                unused_cost(model.pi(s)) for s in model.itemsets if s not in chosen
            )
            assert cost == pytest.approx(expected, abs=1e-9)


class TestSampleTransaction:
    def test_certain_entry_always_fires(self):
        s = Itemset([2, 7])
        model = ItemsetModel({s: 1.0})
        rng = np.random.default_rng(0)
        for _ in range(20):
            txn, fired = sample_transaction(model, rng)
            assert txn == (2, 7)
            assert fired == {s}

    def test_impossible_entries_never_fire(self):
        model = ItemsetModel({Itemset([1]): 0.0, Itemset([2, 3]): 0.0})
        rng = np.random.default_rng(0)
        for _ in range(20):
            txn, fired = sample_transaction(model, rng)
            assert txn == ()
            assert fired == frozenset()

    def test_overlapping_itemsets_union(self):
        bacon_eggs = Itemset([1, 2])
        cake = Itemset([3, 4, 2])
        model = ItemsetModel({bacon_eggs: 1.0, cake: 1.0})
        txn, fired = sample_transaction(model, np.random.default_rng(0))
        assert txn == (1, 2, 3, 4)
        assert fired == {bacon_eggs, cake}

    def test_sampled_pairs_satisfy_the_objective_preconditions(self):
        rng = np.random.default_rng(5)
        model = ItemsetModel({
            Itemset([1, 2]): 0.6, Itemset([2, 3]): 0.4, Itemset([4]): 0.5, Itemset([1]): 0.2,
        })
        for _ in range(200):
            txn, fired = sample_transaction(model, rng)
            cost = objective_cost(model, txn, fired)
            assert math.isfinite(cost)

    def test_empirical_rates_match_probabilities(self):
        # Binomial concentration at a fixed seed: every empirical firing rate
        # within 3 sigma of its probability over 100,000 draws.
        pis = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
        model = ItemsetModel({Itemset([i + 1]): p for i, p in enumerate(pis)})
        n = 100_000
        counts = dict.fromkeys(model.itemsets, 0)
        for j in range(n):
            rng = np.random.default_rng((123, j))
            _, fired = sample_transaction(model, rng)
            for s in fired:
                counts[s] += 1
        for s in model.itemsets:
            pi = model.pi(s)
            bound = 3 * math.sqrt(pi * (1 - pi) / n)
            assert abs(counts[s] / n - pi) <= bound
