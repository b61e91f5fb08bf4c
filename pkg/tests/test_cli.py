"""End-to-end runs of the hcratio command line."""
import json
from fractions import Fraction

import pytest

from hardcore_ratios.exact_arith import GaussianRational
from hardcore_ratios.graph_core import PartitionPair, RootedGraph, tree_partition
from hardcore_ratios.main import main

K1 = json.dumps({"vertices": 1, "edges": [], "root": 0, "delta": 3})
P2 = json.dumps({"vertices": 2, "edges": [[0, 1]], "root": 1, "delta": 3})
K14 = json.dumps({"vertices": 5, "edges": [[0, 1], [0, 2], [0, 3], [0, 4]], "root": 0, "delta": 3})


def _records(capsys):
    out = capsys.readouterr().out
    return [json.loads(line) for line in out.splitlines() if line.strip()]


def test_ratio_inline(config_home, capsys):
    assert main(["ratio", K1, "--lambda", "2"]) == 0
    assert _records(capsys) == [{"z_in": "2", "z_out": "1", "ratio": "2"}]


def test_ratio_from_file(config_home, tmp_path, capsys):
    graph = tmp_path / "p2.json"
    graph.write_text(P2)
    assert main(["ratio", str(graph), "--lambda=-1/2"]) == 0
    assert _records(capsys) == [{"z_in": "-1/2", "z_out": "1/2", "ratio": "-1"}]


def test_exit_codes(config_home, capsys):
    assert main(["ratio", "{not json", "--lambda", "1"]) == 2
    assert main(["ratio", K14, "--lambda", "1"]) == 3
    assert main(["implement", "--lambda0=1/100", "--target", "1", "--eps", "1/10", "--catalog-size", "3"]) == 4
    err = capsys.readouterr().err
    assert "shearer_margin" in err


def test_bad_parameter_is_a_usage_error(config_home):
    with pytest.raises(SystemExit) as info:
        main(["classify", "--lambda", "one"])
    assert info.value.code == 2


def test_classify(config_home, capsys):
    assert main(["classify", "--lambda=-1/4"]) == 0
    [record] = _records(capsys)
    assert record["kind"] == "parabolic"
    assert record["tr_squared"] == "4"
    assert record["fixed_points"] == ["-1/2", "-1/2"]

    assert main(["classify", "--lambda=-1+i"]) == 0
    [record] = _records(capsys)
    assert record["kind"] == "loxodromic"
    assert record["fixed_points"] == ["i", "-1-i"]
    assert record["fixed_point_kinds"] == ["attracting", "repelling"]


def test_regions(config_home, capsys):
    assert main(["regions", "--lambda=-4/27", "--delta", "3"]) == 0
    verdicts = {r["region"]: r["status"] for r in _records(capsys)}
    assert verdicts["cardioid"] == "boundary"
    assert verdicts["shearer"] == "boundary"
    assert verdicts["exceptional"] == "outside"


def test_zeros(config_home, capsys):
    assert main(["zeros", "--lambda=-1/2", "--max-vertices", "4", "--dot"]) == 0
    [record] = _records(capsys)
    assert record["found"]
    assert record["tree"]["vertices"] == 2
    assert record["dot"].startswith("graph T {")

    assert main(["zeros", "--lambda", "1/10", "--max-vertices", "5"]) == 0
    [record] = _records(capsys)
    assert record == {"lambda": "1/10", "found": False, "max_vertices": 5}


def test_cayley_zeros(config_home, tmp_path, capsys):
    out = tmp_path / "zeros.csv"
    assert main(["cayley-zeros", "--n", "1", "--out", str(out)]) == 0
    records = _records(capsys)
    assert len(records) == 2
    assert all(r["certified"] for r in records)
    assert float(records[0]["re"]) == pytest.approx(-2.618033988749895)
    assert len(out.read_text().splitlines()) == 3


def test_render_activity_with_manifest(config_home, tmp_path, capsys):
    out = tmp_path / "activity.pgm"
    manifest = tmp_path / "run.json"
    code = main([
        "--manifest", str(manifest), "--threads", "2",
        "render-activity", "--px", "16x8", "--depth", "20", "--rect=-2,-1,2,1", "--out", str(out),
    ])
    assert code == 0
    [record] = _records(capsys)
    assert record["resolution"] == [16, 8]
    assert out.read_bytes().startswith(b"P5\n16 8\n255\n")

    data = json.loads(manifest.read_text())
    assert data["command"] == "render-activity"
    assert data["exit_code"] == 0
    assert data["outputs"] == [str(out)]
    assert data["flags"]["rect"] == "Rect(x0=-2.0, y0=-1.0, x1=2.0, y1=1.0)"
    assert "numpy" in data["versions"]


def test_render_cardioid(config_home, tmp_path, capsys):
    out = tmp_path / "cardioid.csv"
    assert main(["render-cardioid", "--delta", "4", "--samples", "16", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "theta,re,im"
    assert len(lines) == 17


def test_catalog(config_home, capsys):
    assert main(["catalog", "--lambda0=-1+i", "--max-vertices", "4"]) == 0
    records = _records(capsys)
    assert records[0] == {"code": "()", "vertices": 1, "ratio": "-1+i"}
    assert len({r["ratio"] for r in records}) == len(records)


@pytest.mark.slow
def test_value_only_implement(config_home, tmp_path, capsys):
    saved = tmp_path / "implementer.json"
    args = ["implement", "--lambda0=-1+i", "--target=2+i", "--eps=1/1000"]
    assert main(args + ["--value-only", "--save-implementer", str(saved)]) == 0
    [record] = _records(capsys)
    assert record["branch"] == "far"
    assert record["K"] == len(record["labels"])
    assert record["certificate"]["passed"]
    assert "tree" not in record
    assert set(record["timings"]) == {"implementer", "plan"}

    assert main(args + ["--load-implementer", str(saved)]) == 0
    [again] = _records(capsys)
    assert again["labels"] == record["labels"]

    assert main(["implement", "--lambda0=1+i", "--target=2", "--eps=1/10", "--load-implementer", str(saved)]) == 2


@pytest.mark.slow
def test_implement_emits_tree(config_home, tmp_path, capsys):
    saved = tmp_path / "implementer.json"
    args = ["implement", "--lambda0=-1+i", "--target=2+i", "--eps=1/1000000"]
    assert main(["--seed", "0"] + args + ["--save-implementer", str(saved)]) == 0
    [record] = _records(capsys)
    assert record["certificate"]["passed"]
    assert set(record["timings"]) == {"implementer", "plan", "tree"}
    z_in = GaussianRational.parse(record["z_in"])
    z_out = GaussianRational.parse(record["z_out"])
    eps = Fraction(1, 10**6)
    assert (z_in / z_out - GaussianRational(2, 1)).norm() < eps * eps
    tree = RootedGraph.from_json(record["tree"])
    assert tree_partition(tree, GaussianRational(-1, 1)) == PartitionPair(z_in, z_out)

    assert main(args + ["--load-implementer", str(saved)]) == 0
    [again] = _records(capsys)
    assert again["labels"] == record["labels"]
    assert again["z_in"] == record["z_in"]
