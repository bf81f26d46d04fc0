import json

import pytest
from hypothesis import given, strategies as st

from refaudit.corpus import Dataset, load_dataset, save_dataset, tokenize, validate
from refaudit.errors import DatasetError

from conftest import make_record, write_jsonl


class TestTokenize:
    def test_punctuation_stripped(self):
        assert tokenize("The cat, sat!").tokens == ("the", "cat", "sat")

    def test_empty(self):
        assert tokenize("").tokens == ()

    def test_mixed_alphanumeric(self):
        assert tokenize("A1-b2  c").tokens == ("a1", "b2", "c")

    def test_underscore_splits(self):
        assert tokenize("foo_bar").tokens == ("foo", "bar")

    @given(st.text(max_size=80))
    def test_case_insensitive(self, text):
        assert tokenize(text) == tokenize(text.upper())

    @given(st.text(max_size=80))
    def test_idempotent_on_joined_tokens(self, text):
        tokens = tokenize(text).tokens
        assert tokenize(" ".join(tokens)).tokens == tokens

    @given(st.text(max_size=80))
    def test_no_empty_tokens(self, text):
        assert all(tokenize(text).tokens)


class TestLoadDataset:
    def test_valid_file(self, dataset_file):
        path = dataset_file([make_record(id=f"r{i}") for i in range(3)])
        ds = load_dataset(path)
        assert len(ds) == 3
        assert [r.id for r in ds.records] == ["r0", "r1", "r2"]
        assert ds.distribution_label == "eval"

    def test_duplicate_id_names_line(self, dataset_file):
        path = dataset_file([make_record(id="dup"), make_record(id="dup")])
        with pytest.raises(DatasetError, match="line 2"):
            load_dataset(path)

    def test_nan_score_rejected(self, tmp_path):
        path = tmp_path / "nan.jsonl"
        path.write_text(
            '{"id": "a", "system": "m", "source": "s", "output": "o", '
            '"human": {"faithfulness": NaN}, "metrics": {}}\n',
            encoding="utf-8",
        )
        with pytest.raises(DatasetError, match="not finite"):
            load_dataset(path)

    def test_missing_field_names_line(self, dataset_file):
        row = make_record()
        del row["output"]
        path = dataset_file([make_record(id="ok"), row])
        with pytest.raises(DatasetError, match="line 2"):
            load_dataset(path)

    def test_parse_error_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(json.dumps(make_record()) + "\n{not json\n", encoding="utf-8")
        with pytest.raises(DatasetError, match="line 2"):
            load_dataset(path)

    def test_unknown_key_strict_vs_lenient(self, dataset_file):
        row = make_record()
        row["extra"] = 1
        path = dataset_file([row])
        with pytest.raises(DatasetError, match="unknown keys"):
            load_dataset(path)
        warnings = []
        ds = load_dataset(path, strict=False, warn=warnings.append)
        assert len(ds) == 1
        assert any("extra" in w for w in warnings)

    def test_faithfulness_range_enforced(self, dataset_file):
        path = dataset_file([make_record(human={"faithfulness": 5.5})])
        with pytest.raises(DatasetError, match="faithfulness"):
            load_dataset(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(DatasetError, match="empty"):
            load_dataset(path)

    def test_empty_output_admitted(self, dataset_file):
        path = dataset_file([make_record(output="")])
        assert load_dataset(path).records[0].output_text == ""


class TestRoundTrip:
    def test_save_load_bit_exact(self, tmp_path, dataset_file):
        rows = [
            make_record(
                id="a",
                human={"faithfulness": 4.123456789012345, "coherence": 1.0 / 3.0},
                metrics={"factcc": 1e-17, "dae": 0.1},
                correlates={"density": 13.0 / 6.0},
            ),
            make_record(id="b", metrics={"factcc": -0.0}),
        ]
        ds = load_dataset(dataset_file(rows))
        out = tmp_path / "roundtrip.jsonl"
        save_dataset(ds, out)
        ds2 = load_dataset(out)
        assert ds2.records == ds.records

    def test_save_is_deterministic(self, tmp_path, dataset_file):
        ds = load_dataset(dataset_file([make_record()]))
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        save_dataset(ds, a)
        save_dataset(ds, b)
        assert a.read_bytes() == b.read_bytes()


class TestValidate:
    def test_complete_dataset(self, dataset_file):
        ds = load_dataset(dataset_file([make_record()]))
        assert validate(ds, ["faithfulness"], ["factcc"]) == []

    def test_missing_metric_reported(self, dataset_file):
        ds = load_dataset(dataset_file([make_record(id="x", metrics={})]))
        issues = validate(ds, [], ["factcc"])
        assert len(issues) == 1
        assert issues[0].record_id == "x"
        assert "factcc" in issues[0].field

    def test_empty_requirements(self, dataset_file):
        ds = load_dataset(dataset_file([make_record(human={}, metrics={})]))
        assert validate(ds, [], []) == []

    def test_missing_correlate_reported(self, dataset_file):
        ds = load_dataset(dataset_file([make_record(id="x")]))
        issues = validate(ds, [], [], ["density"])
        assert [i.record_id for i in issues] == ["x"]


class TestDatasetInvariants:
    def test_empty_dataset_rejected(self):
        with pytest.raises(DatasetError):
            Dataset(records=(), name="d", distribution_label="eval")

    def test_label_required(self, dataset_file):
        ds = load_dataset(dataset_file([make_record()]), distribution_label="test")
        assert ds.distribution_label == "test"
