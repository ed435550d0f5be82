import json
from fractions import Fraction

from coranklab import records as rec


def test_to_jsonable_fractions_and_arrays():
    import numpy as np

    obj = {
        "p": Fraction(1, 2),
        "probs": {1: Fraction(5, 8)},
        "vec": np.array([1.0, 2.0]),
        "count": np.int64(3),
    }
    out = rec.to_jsonable(obj)
    assert out == {"p": "1/2", "probs": {"1": "5/8"}, "vec": [1.0, 2.0], "count": 3}
    assert rec.parse_fraction("5/8") == Fraction(5, 8)
    assert rec.parse_fraction(0.25) == 0.25


def test_canonical_line_is_sorted_and_compact():
    line = rec.canonical_line({"b": 1, "a": Fraction(1, 3)})
    assert line == '{"a":"1/3","b":1}'


def test_jsonl_roundtrip_and_reproducibility_hash(tmp_path):
    p1 = tmp_path / "a.jsonl"
    p2 = tmp_path / "b.jsonl"
    base = {"record": "estimate", "n": 2, "estimate": 0.5, "p": Fraction(1, 2)}
    rec.write_jsonl(p1, [{**base, "started": "t1", "finished": "t2"}])
    rec.write_jsonl(p2, [{**base, "started": "x1", "finished": "x2"}])
    assert p1.read_bytes() != p2.read_bytes()
    assert rec.reproducibility_hash(p1) == rec.reproducibility_hash(p2)
    rec.write_jsonl(p2, [{**base, "n": 3, "started": "t1", "finished": "t2"}])
    assert rec.reproducibility_hash(p1) != rec.reproducibility_hash(p2)
    assert rec.read_jsonl(p1)[0]["p"] == "1/2"


def test_config_hash_ignores_output_path_only():
    a = rec.config_hash({"n": 2, "p": "1/2", "out": "x.jsonl"})
    b = rec.config_hash({"n": 2, "p": "1/2", "out": "y.jsonl"})
    c = rec.config_hash({"n": 3, "p": "1/2", "out": "x.jsonl"})
    assert a == b != c


def test_manifest_tags_every_record():
    man = rec.RunManifest("mc", "deadbeef", 7)
    man.stamp_start()
    man.stamp_finish()
    tagged = rec.tag_records([{"x": 1}, {"y": 2}], man)
    for t in tagged:
        assert t["subcommand"] == "mc"
        assert t["config_hash"] == "deadbeef"
        assert t["seed"] == 7
        assert t["tool_version"] == rec.TOOL_VERSION
        assert t["started"] and t["finished"]


def test_bounds_csv_columns_and_cells(tmp_path):
    path = tmp_path / "t.csv"
    rows = [
        {
            "n": 2,
            "k": 1,
            "p": "1/2",
            "epsilon": "0/1",
            "exact_or_estimate": "5/8",
            "theorem_rate": "1/4",
            "zero_rows_lower": "1/4",
            "conjecture_rhs": "1/2",
            "structured_lower": "1/2",
        }
    ]
    rec.write_bounds_csv(path, rows)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == ",".join(rec.CSV_COLUMNS)
    cells = lines[1].split(",")
    assert cells[0] == "2"
    assert cells[4] == "0.625"  # exact fractions rendered as plot-ready floats
    assert cells[5] == "" and cells[6] == ""
