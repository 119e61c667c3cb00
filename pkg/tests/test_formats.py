"""FIMI files, JSON model files, and the ranked TSV format."""

import pytest

from itemset_miner import (
    FimiParseError,
    Itemset,
    ItemsetModel,
    ModelFormatError,
    RankedItemset,
    load_fimi,
    load_model,
    read_ranked_itemsets,
    save_model,
    write_fimi,
    write_ranked_tsv,
)


class TestFimi:
    def test_dedup_and_tally(self, tmp_path):
        path = tmp_path / "db.dat"
        path.write_text("1 2 3\n2 2 5\n")
        db = load_fimi(path)
        assert db.m == 2
        assert db.transactions == ((1, 2, 3), (2, 5))
        assert db.item_supports[2] == 2

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.dat"
        path.write_text("")
        db = load_fimi(path)
        assert db.m == 0

    def test_single_item_lines(self, tmp_path):
        path = tmp_path / "db.dat"
        path.write_text("7\n7\n7\n")
        db = load_fimi(path)
        assert db.m == 3
        assert db.item_supports == {7: 3}

    def test_blank_lines_become_empty_transactions(self, tmp_path):
        path = tmp_path / "db.dat"
        path.write_text("1 2\n\n  \n3\n")
        db = load_fimi(path)
        assert db.m == 4
        assert db.transactions == ((1, 2), (), (), (3,))

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "db.dat"
        path.write_text("1 2\n3 x 4\n")
        with pytest.raises(FimiParseError, match="line 2"):
            load_fimi(path)

    def test_negative_item_rejected(self, tmp_path):
        path = tmp_path / "db.dat"
        path.write_text("1 -2\n")
        with pytest.raises(FimiParseError, match="line 1"):
            load_fimi(path)

    def test_missing_file_propagates(self, tmp_path):
        with pytest.raises(OSError):
            load_fimi(tmp_path / "missing.dat")

    def test_roundtrip(self, tmp_path):
        path = tmp_path / "db.dat"
        original = [(1, 2, 3), (), (5,)]
        write_fimi(original, path)
        assert path.read_text() == "1 2 3\n\n5\n"
        assert load_fimi(path).transactions == ((1, 2, 3), (), (5,))


class TestModelJson:
    def test_roundtrip_equality(self, tmp_path):
        model = ItemsetModel(
            {Itemset([1, 2]): 1 / 3, Itemset([4]): 0.25}, universe=7,
            supports={Itemset([4]): 5},
        )
        path = tmp_path / "model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded == model  # support caches are not part of identity
        assert loaded.pi(Itemset([1, 2])) == model.pi(Itemset([1, 2]))
        assert loaded.universe == 7

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_schema_validation(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"itemsets": [{"items": [], "pi": 0.5}]}')
        with pytest.raises(ModelFormatError):
            load_model(path)
        path.write_text('{"itemsets": [{"items": [1], "pi": 1.5}]}')
        with pytest.raises(ModelFormatError):
            load_model(path)
        path.write_text('{"universe": 3}')
        with pytest.raises(ModelFormatError):
            load_model(path)


class TestRankedTsv:
    def test_write_and_read_back(self, tmp_path):
        rows = [
            RankedItemset(Itemset([2, 5]), 1.0, 0.25, 8, 8),
            RankedItemset(Itemset([1]), 0.5, 1 / 3, 6, 3),
        ]
        path = tmp_path / "ranked.tsv"
        write_ranked_tsv(rows, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "rank\tinterestingness\tpi\tsupport\tusage\titems"
        assert lines[1].split("\t") == ["1", "1", "0.25", "8", "8", "2 5"]
        assert lines[2].split("\t")[0] == "2"
        assert read_ranked_itemsets(path) == [Itemset([2, 5]), Itemset([1])]

    def test_rejects_foreign_files(self, tmp_path):
        path = tmp_path / "other.tsv"
        path.write_text("a\tb\n")
        with pytest.raises(ValueError):
            read_ranked_itemsets(path)
