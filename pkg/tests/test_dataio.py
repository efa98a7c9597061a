import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cherrypick.adversary import ImprovementSample
from cherrypick.dataio import (
    Schema,
    cohen_kappa,
    load_improvements,
    normalize_unit_variance,
    read_records,
    rows_to_csv,
    rows_to_json,
    rows_to_table,
    write_raw_values,
)
from cherrypick.exceptions import DegenerateInputError, DomainError, ParseError


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestKappa:
    def test_examples(self):
        assert cohen_kappa(0.7, 0.7) == 0.0
        assert cohen_kappa(1.0, 0.6) == 1.0
        assert cohen_kappa(0.9, 0.8) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("base", [1.0, 1.2])
    def test_base_rate_domain(self, base):
        with pytest.raises(DomainError):
            cohen_kappa(0.9, base)


class TestLoad:
    def test_raw(self, tmp_path):
        path = write(tmp_path, "dataset_id,value\na,0.1\nb,-0.2\nc,0.05\n")
        sample = load_improvements(path)
        np.testing.assert_array_equal(sample.values, [0.1, -0.2, 0.05])
        assert sample.known_sd is None

    def test_paired(self, tmp_path):
        path = write(tmp_path, "dataset_id,score_a,score_b,base_rate\nx,0.9,0.95,0.8\n")
        sample = load_improvements(path, Schema.PAIRED_SCORES)
        assert sample.values[0] == pytest.approx(-0.25, abs=1e-14)

    def test_fixture_shape(self):
        from pathlib import Path

        sample = load_improvements(Path(__file__).parent / "data" / "kappa_synthetic.csv", "raw")
        assert len(sample) == 66

    def test_blank_lines_skipped(self, tmp_path):
        path = write(tmp_path, "dataset_id,value\na,1\n\nb,2\n")
        assert read_records(path)[0] == ["a", "b"]

    @pytest.mark.parametrize(
        "body,row",
        [
            ("a,1\nb,oops\n", 3),
            ("a,1\nb\n", 3),
            ("a,nan\n", 2),
            ("a,1,2\n", 2),
        ],
    )
    def test_malformed_row_number(self, tmp_path, body, row):
        path = write(tmp_path, "dataset_id,value\n" + body)
        with pytest.raises(ParseError, match=f"row {row}:") as info:
            load_improvements(path)
        assert info.value.row == row

    def test_bad_base_rate_row(self, tmp_path):
        path = write(tmp_path, "dataset_id,score_a,score_b,base_rate\nx,0.9,0.9,0.5\ny,0.9,0.9,1.0\n")
        with pytest.raises(ParseError, match="row 3:"):
            load_improvements(path, "paired")

    def test_wrong_header(self, tmp_path):
        path = write(tmp_path, "id,v\na,1\n")
        with pytest.raises(ParseError, match="expected header"):
            load_improvements(path)

    @pytest.mark.parametrize("text", ["", "dataset_id,value\n"])
    def test_empty(self, tmp_path, text):
        with pytest.raises(DomainError):
            load_improvements(write(tmp_path, text))

    def test_unknown_schema(self, tmp_path):
        with pytest.raises(ValueError):
            load_improvements(write(tmp_path, "dataset_id,value\na,1\n"), "json")


class TestNormalize:
    def test_direct(self):
        np.testing.assert_allclose(normalize_unit_variance([0.0, 2.0, 4.0]).values, [0, 1, 2], atol=1e-15)

    def test_pair(self):
        out = normalize_unit_variance([-1.0, 1.0]).values
        np.testing.assert_allclose(out, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)

    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=50))
    @settings(max_examples=100)
    def test_unit_variance_and_idempotent(self, values):
        values = np.array(values)
        if values.std(ddof=1) <= 1e-6 * max(1.0, np.abs(values).max()):
            return
        once = normalize_unit_variance(values).values
        assert abs(once.var(ddof=1) - 1.0) <= 1e-12
        np.testing.assert_allclose(normalize_unit_variance(once).values, once, atol=1e-12)

    def test_scales_known_sd(self):
        out = normalize_unit_variance(ImprovementSample([0.0, 2.0, 4.0], known_sd=4.0))
        assert out.known_sd == 2.0

    @pytest.mark.parametrize("values", [[1.0], [0.5, 0.5, 0.5], [0.0, 0.0]])
    def test_degenerate(self, values):
        with pytest.raises(DegenerateInputError):
            normalize_unit_variance(values)


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=30))
@settings(max_examples=100, deadline=None)
def test_csv_round_trip(tmp_path_factory, values):
    path = tmp_path_factory.mktemp("rt") / "values.csv"
    write_raw_values(path, values)
    ids, parsed = read_records(path)
    assert parsed == [float(v) for v in values]
    assert ids == [f"d{i + 1}" for i in range(len(values))]
    buf = io.StringIO()
    write_raw_values(buf, parsed, ids)
    assert buf.getvalue() == path.read_text(encoding="utf-8")


class TestSerialization:
    rows = [
        {"label": "a", "rate": 0.25, "count": np.int64(3)},
        {"label": "b", "rate": math.nan, "extra": "x"},
    ]

    def test_csv_union_columns(self):
        text = rows_to_csv(self.rows)
        assert text.splitlines() == ["label,rate,count,extra", "a,0.25,3,", "b,,,x"]

    def test_json(self):
        payload = json.loads(rows_to_json(self.rows, {"seed": 3}))
        assert payload["meta"] == {"seed": 3}
        assert payload["rows"][0]["count"] == 3 and payload["rows"][1]["rate"] is None

    def test_table_aligned(self):
        lines = rows_to_table(self.rows).splitlines()
        assert lines[0].split() == ["label", "rate", "count", "extra"]
        assert lines[1].index("0.25") == lines[0].index("rate")
