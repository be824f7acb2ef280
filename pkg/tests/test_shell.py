import json
import os
from fractions import Fraction as F

import pytest

from saet.cli import main
from saet.complexes import PLSet, build_complex
from saet.errors import DimensionTooHigh, ParseError
from saet.export import export_carved, export_mesh, export_tube
from saet.fixtures import (
    fix_a,
    fix_c,
    fix_t,
    scaled_slope_function_c,
    square_complex,
    step_function_a,
    wedge_complex,
)
from saet.germs import PathGerm
from saet.io import (
    complex_from_dict,
    complex_to_dict,
    function_from_dict,
    function_to_dict,
    load_complex,
    path_from_dict,
    path_to_dict,
    save_complex,
    save_function,
    save_path,
)
from saet.verify import default_corpus, run_suite


def test_complex_roundtrip(tmp_path, square):
    m = fix_a(square)
    path = tmp_path / "fixa.json"
    save_complex(str(path), square, m)
    k2, m2 = load_complex(str(path))
    assert [s.vertex_ids for s in k2.simplices] == [
        s.vertex_ids for s in square.simplices
    ]
    assert k2.vertices == square.vertices
    assert m2.members == m.members


def test_rational_strings_and_shorthand():
    data = {
        "n": 1,
        "vertices": [["0"], ["1/2"], [1]],
        "simplices": [[0, 1], [1, 2]],
        "in_M": [0, 3],
    }
    k, m = complex_from_dict(data)
    assert k.vertices[1] == (F(1, 2),)
    assert m.members == {0, 3}


def test_floats_rejected():
    with pytest.raises(ParseError):
        complex_from_dict({"n": 1, "vertices": [[0.5], [1]], "simplices": [[0, 1]]})


def test_bad_member_ids_rejected():
    with pytest.raises(ParseError):
        complex_from_dict(
            {"n": 1, "vertices": [["0"], ["1"]], "simplices": [[0, 1]], "in_M": [99]}
        )


def test_function_roundtrip(wedge, fix_c):
    g = scaled_slope_function_c(fix_c)
    data = function_to_dict(g)
    g2 = function_from_dict(data, fix_c, validate_continuity=False)
    assert set(g2.pieces) == set(g.pieces)
    for sid, piece in g.pieces.items():
        assert g2.pieces[sid].den == piece.den
        assert g2.pieces[sid].factors == piece.factors


def test_path_roundtrip():
    alpha = PathGerm(
        [(F(1, 2), (0, 0), (1, F(1, 2))), (1, (F(1, 4), F(1, 8)), (F(1, 2), F(1, 4)))]
    )
    assert path_from_dict(path_to_dict(alpha)) == alpha


def test_verify_deterministic_manifests():
    m1 = run_suite("complex,metric")
    m2 = run_suite("complex,metric")
    assert m1.to_json() == m2.to_json()
    assert m1.ok


def test_verify_empty_suite_noop():
    m = run_suite("none")
    assert m.ok and not m.checks


def test_verify_detects_corruption(square):
    corpus = default_corpus()
    bad = set(corpus["fix_a"].members)
    bad.discard(square.id_of((0,)))  # flip the origin membership bit
    corpus["fix_a"] = PLSet(corpus["fix_a"].complex, bad)
    m = run_suite("complex", corpus=corpus)
    assert not m.ok
    failed = [c["name"] for c in m.checks if not c["pass"]]
    assert "rho_fix_a" in failed or "eta_fix_a" in failed


def test_export_mesh_and_tube(tmp_path, square):
    m = fix_a(square)
    obj = tmp_path / "a.obj"
    export_mesh(square, m, str(obj))
    text = obj.read_text().splitlines()
    assert sum(1 for line in text if line.startswith("v ")) == 9
    assert any(line.startswith("f ") for line in text)
    off = tmp_path / "a.off"
    export_mesh(square, m, str(off), fmt="off")
    assert off.read_text().startswith("OFF")
    lens = tmp_path / "lens.obj"
    export_tube(fix_t(), str(lens), resolution=24)
    assert any(line.startswith("l ") for line in lens.read_text().splitlines())


def test_export_carved(tmp_path, fix_a_embedded):
    out = tmp_path / "carved.obj"
    export_carved(fix_a_embedded.carved, str(out), resolution=20)
    assert out.exists() and out.stat().st_size > 0


def test_export_dimension_guard(tmp_path):
    k = build_complex(
        [(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)],
        [(0, 1, 2, 3, 4)],
    )
    with pytest.raises(DimensionTooHigh):
        export_mesh(k, None, str(tmp_path / "x.obj"))


def _write_fixtures(tmp_path):
    k = square_complex()
    save_complex(str(tmp_path / "fixa.json"), k, fix_a(k))
    save_function(str(tmp_path / "step.json"), step_function_a(fix_a(k)))
    kc = wedge_complex()
    save_complex(str(tmp_path / "fixc.json"), kc, fix_c(kc))
    save_function(str(tmp_path / "g.json"), scaled_slope_function_c(fix_c(kc)))
    save_path(str(tmp_path / "path.json"), PathGerm.linear((0, 0, 1), (2, 1, 0)))


def test_cli_analyze(tmp_path, capsys):
    _write_fixtures(tmp_path)
    rc = main(["analyze", str(tmp_path / "fixa.json")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["appropriately_embedded"] is False
    assert report["eta"] == [1, 5, 9, 13]
    rc = main(["analyze", str(tmp_path / "fixc.json")])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0 and report["appropriately_embedded"] is True


def test_cli_analyze_closed_set(tmp_path, capsys):
    k = square_complex()
    save_complex(str(tmp_path / "closed.json"), k, PLSet(k, range(len(k.simplices))))
    rc = main(["analyze", str(tmp_path / "closed.json")])
    report = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert report["appropriately_embedded"] is True
    assert report["rho"] == []


def test_cli_eval(tmp_path, capsys):
    _write_fixtures(tmp_path)
    rc = main(
        [
            "eval",
            str(tmp_path / "fixc.json"),
            str(tmp_path / "g.json"),
            "--path",
            str(tmp_path / "path.json"),
            "--allow-jumps",
        ]
    )
    assert rc == 0
    assert capsys.readouterr().out.strip() == "(1/2, 0)"


def test_cli_verify_deterministic(tmp_path, capsys):
    out1, out2 = tmp_path / "m1.json", tmp_path / "m2.json"
    assert main(["verify", "complex", "--out", str(out1)]) == 0
    assert main(["verify", "complex", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_extend(tmp_path, capsys):
    _write_fixtures(tmp_path)
    rc = main(
        ["extend", str(tmp_path / "fixc.json"), str(tmp_path / "g.json"),
         "--allow-jumps"]
    )
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["Y"] == [3, 6, 11, 14]
    assert report["hypothesis_ok"] is True


def test_cli_carve(tmp_path, capsys):
    _write_fixtures(tmp_path)
    out = tmp_path / "carved"
    rc = main(["carve", str(tmp_path / "fixa.json"), "--out", str(out), "--probe", "2"])
    assert rc == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["units"] == 4
    assert [lv["dim"] for lv in summary["levels"]] == [1, 0]
    assert "Disconnected" not in summary["probe"]["statuses"]
    carved = json.loads((out / "carved.json").read_text())
    assert len(carved["units"]) == 4
    assert (out / "certificates.json").exists()


def test_cli_export(tmp_path):
    _write_fixtures(tmp_path)
    out = tmp_path / "mesh.obj"
    rc = main(["export", str(tmp_path / "fixa.json"), "mesh", "--out", str(out)])
    assert rc == 0 and out.exists()


def test_cli_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_cli_missing_marked_set(tmp_path, capsys):
    k = square_complex()
    save_complex(str(tmp_path / "bare.json"), k)
    rc = main(["analyze", str(tmp_path / "bare.json")])
    assert rc == 1
