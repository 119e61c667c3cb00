"""File formats: FIMI transaction databases, JSON model files, ranked TSV output."""

from __future__ import annotations

import json
import os
from collections.abc import Iterable, Sequence

from .core import DataError, Itemset, ItemsetModel, TransactionDb
from .ranking import RankedItemset


class FimiParseError(DataError):
    """A FIMI transaction file contained an invalid token."""


class ModelFormatError(DataError):
    """A JSON model file did not match the expected schema."""


def load_fimi(path: str | os.PathLike) -> TransactionDb:
    """Load a FIMI-format transaction database.

    One transaction per line, whitespace-separated non-negative decimal item
    ids. Duplicate items within a line are collapsed, items are sorted, and
    blank lines are kept as empty transactions.
    """
    transactions = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            items = []
            for tok in line.split():
                if not (tok.isascii() and tok.isdigit()):
                    raise FimiParseError(f"{path}: line {lineno}: invalid item {tok!r}")
                items.append(int(tok))
            transactions.append(items)
    return TransactionDb(transactions)


def write_fimi(db: TransactionDb | Iterable[Iterable[int]], path: str | os.PathLike) -> None:
    """Write transactions in FIMI format, one line per transaction."""
    transactions = db.transactions if isinstance(db, TransactionDb) else db
    with open(path, "w", encoding="utf-8") as fh:
        for txn in transactions:
            fh.write(" ".join(map(str, txn)))
            fh.write("\n")


def save_model(model: ItemsetModel, path: str | os.PathLike) -> None:
    """Serialize a model as JSON: {"itemsets": [{"items": [...], "pi": p}], "universe": n}."""
    doc = {
        "itemsets": [
            {"items": list(s.items), "pi": model.pi(s)} for s in model.itemsets
        ],
        "universe": model.universe,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path: str | os.PathLike) -> ItemsetModel:
    """Load a JSON model file written by save_model."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "itemsets" not in doc:
        raise ModelFormatError(f"{path}: missing 'itemsets' field")
    raw = doc["itemsets"]
    if not isinstance(raw, list):
        raise ModelFormatError(f"{path}: 'itemsets' must be a list")
    entries = {}
    for k, rec in enumerate(raw):
        if not isinstance(rec, dict) or "items" not in rec or "pi" not in rec:
            raise ModelFormatError(f"{path}: itemset {k} must have 'items' and 'pi'")
        items, pi = rec["items"], rec["pi"]
        if not isinstance(items, list) or not items:
            raise ModelFormatError(f"{path}: itemset {k} has invalid items {items!r}")
        try:
            itemset = Itemset(items)
            entries[itemset] = float(pi)
            if not 0.0 <= entries[itemset] <= 1.0:
                raise ValueError
        except (TypeError, ValueError):
            raise ModelFormatError(f"{path}: itemset {k} is malformed") from None
    universe = doc.get("universe")
    if universe is not None and (not isinstance(universe, int) or universe < 0):
        raise ModelFormatError(f"{path}: invalid universe {universe!r}")
    return ItemsetModel(entries, universe=universe)


RANKED_HEADER = ("rank", "interestingness", "pi", "support", "usage", "items")


def write_ranked_tsv(rows: Sequence[RankedItemset], path: str | os.PathLike) -> None:
    """Write a ranked itemset list as TSV with a header row.

    The items column holds space-separated original item ids; the rank column
    is contiguous from 1.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(RANKED_HEADER))
        fh.write("\n")
        for k, row in enumerate(rows, start=1):
            fh.write(
                "\t".join(
                    (
                        str(k),
                        format(row.interestingness, ".10g"),
                        format(row.pi, ".10g"),
                        str(row.support),
                        str(row.usage),
                        " ".join(map(str, row.itemset.items)),
                    )
                )
            )
            fh.write("\n")


def read_ranked_itemsets(path: str | os.PathLike) -> list[Itemset]:
    """Read back the itemsets of a ranked TSV file, in rank order."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if header != list(RANKED_HEADER):
            raise DataError(f"{path}: not a ranked itemset TSV (bad header)")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) != len(RANKED_HEADER):
                raise DataError(f"{path}: line {lineno}: expected {len(RANKED_HEADER)} columns")
            out.append(Itemset(int(tok) for tok in cols[-1].split()))
    return out
