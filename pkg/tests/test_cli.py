import json
from fractions import Fraction as F

import pytest

from pptsquare import io
from pptsquare.channel import ChoiMatrix, choi_of_map, identity_map, trace_map, transpose_map
from pptsquare.cli import main
from pptsquare.families import StateFamily, build_composite, family_state
from pptsquare.matrix import DenseMatrix
from reference_displays import C_ETA, MAX_ENT_INPUT


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_choi_and_map_roundtrip(tmp_path, capsys):
    io.write_map(transpose_map(2), tmp_path / "t.json")
    code, _, _ = _run(capsys, "choi", "--map", str(tmp_path / "t.json"), "--out", str(tmp_path / "c.json"))
    assert code == 0
    choi = io.read_choi(tmp_path / "c.json")
    assert choi.matrix == choi_of_map(transpose_map(2)).matrix
    code, out, _ = _run(capsys, "map", "--choi", str(tmp_path / "c.json"), "--in-dim", "2", "--out-dim", "2")
    assert code == 0 and io.read_map(json.loads(out)) == transpose_map(2)


def test_compose(tmp_path, capsys):
    io.write_map(transpose_map(3), tmp_path / "t.json")
    code, out, _ = _run(capsys, "compose", "--outer", str(tmp_path / "t.json"), "--inner", str(tmp_path / "t.json"))
    assert code == 0 and io.read_map(json.loads(out)) == identity_map(3)


def test_ppt_command(tmp_path, capsys):
    io.write_matrix(DenseMatrix.rational(MAX_ENT_INPUT), tmp_path / "s.json")
    code, out, _ = _run(capsys, "ppt", "--state", str(tmp_path / "s.json"), "--dim-a", "2", "--dim-b", "2")
    d = json.loads(out)
    assert code == 0 and d["is_positive"] and not d["is_ppt"]
    assert d["min_eig_pt"] == pytest.approx(-1.0)


def test_pair_command_exact(tmp_path, capsys):
    singlet = [[0, 0, 0, 0], [0, 1, -1, 0], [0, -1, 1, 0], [0, 0, 0, 0]]
    io.write_matrix(DenseMatrix.rational(singlet), tmp_path / "s.json", 2, 2)
    io.write_map(transpose_map(2), tmp_path / "w.json")
    code, out, _ = _run(capsys, "pair", "--state", str(tmp_path / "s.json"), "--witness", str(tmp_path / "w.json"))
    d = json.loads(out)
    assert code == 0 and d["negative"] and d["exact"] == "-2"


def test_family_command(tmp_path, capsys):
    code, _, _ = _run(capsys, "family", "--name", "agkl", "--a", "1/2", "--t", "1/4",
                      "--out", str(tmp_path / "rho.json"))
    M, dims = io.read_matrix(tmp_path / "rho.json")
    assert code == 0 and dims == (4, 2)
    assert M == family_state(StateFamily("agkl", {"a": F(1, 2), "t": F(1, 4)})).matrix
    code, _, err = _run(capsys, "family", "--name", "agkl", "--a", "1/2")
    assert code == 1 and err.startswith("error:")


def test_single_point_pipeline_matches_library(tmp_path, capsys):
    """family -> map -> compose -> choi reproduces build_composite at one point."""
    _run(capsys, "family", "--name", "agkl", "--a", "1/2", "--t", "1/4", "--out", str(tmp_path / "rho.json"))
    _run(capsys, "map", "--choi", str(tmp_path / "rho.json"), "--in-dim", "4", "--out-dim", "2",
         "--out", str(tmp_path / "phi1.json"))
    _run(capsys, "map", "--choi", str(tmp_path / "rho.json"), "--in-dim", "2", "--out-dim", "4",
         "--out", str(tmp_path / "phi2.json"))
    _run(capsys, "compose", "--outer", str(tmp_path / "phi2.json"), "--inner", str(tmp_path / "phi1.json"),
         "--out", str(tmp_path / "comp.json"))
    code, _, _ = _run(capsys, "choi", "--map", str(tmp_path / "comp.json"), "--out", str(tmp_path / "C.json"))
    assert code == 0
    assert io.read_choi(tmp_path / "C.json").matrix == build_composite(F(1, 2), F(1, 4)).choi.matrix


def test_sqroot_command(tmp_path, capsys):
    io.write_choi(ChoiMatrix(DenseMatrix.rational(C_ETA), 2, 2), tmp_path / "eta.json")
    (tmp_path / "cfg.json").write_text(json.dumps({"require_cp": [True, True], "require_ccp": [True, True]}))
    code, out, _ = _run(capsys, "sqroot", "--target", str(tmp_path / "eta.json"), "--dims", "2,2,2",
                        "--restarts", "16", "--seed", "1", "--config", str(tmp_path / "cfg.json"))
    d = json.loads(out)
    assert code == 0 and d["count"] >= 1
    assert all(s["residual"] < 1e-8 and s["verification"]["residual_ok"]
               and s["verification"]["is_ppt_factor1"] for s in d["solutions"])


def test_sqroot_bad_config(tmp_path, capsys):
    io.write_choi(ChoiMatrix(DenseMatrix.rational(C_ETA), 2, 2), tmp_path / "eta.json")
    (tmp_path / "cfg.json").write_text(json.dumps({"restartz": 3}))
    code, _, err = _run(capsys, "sqroot", "--target", str(tmp_path / "eta.json"), "--dims", "2,2,2",
                        "--config", str(tmp_path / "cfg.json"))
    assert code == 1 and "error" in err
    with pytest.raises(SystemExit):
        main(["sqroot", "--target", "x", "--dims", "2,2"])


def test_scan_command(tmp_path, capsys):
    (tmp_path / "g.json").write_text(json.dumps({"points": [["1/2", "1/4"], ["1/3", "0"]]}))
    code, out, err = _run(capsys, "scan", "--family", "agkl", "--grid", str(tmp_path / "g.json"),
                          "--out", str(tmp_path / "r.json"), "--csv", str(tmp_path / "r.csv"))
    assert code == 0 and json.loads(out)["total"] == 2 and not err
    assert (tmp_path / "r.csv").read_text().count("\n") == 3
    assert len(json.loads((tmp_path / "r.json").read_text())["records"]) == 2


def test_scan_exit_codes(tmp_path, capsys):
    (tmp_path / "g.json").write_text(json.dumps({"points": [["0", "0"]]}))
    code, _, _ = _run(capsys, "scan", "--family", "agkl", "--grid", str(tmp_path / "g.json"))
    assert code == 2
    code, _, _ = _run(capsys, "scan", "--family", "other")
    assert code == 1


def test_scan_detection_exit_code(tmp_path, capsys):
    wdir = tmp_path / "w"
    wdir.mkdir()
    io.write_map(trace_map(4).scale(-1), wdir / "neg.json")
    (wdir / "manifest.json").write_text(json.dumps(
        {"witnesses": [{"label": "neg", "file": "neg.json", "classification": "unverified"}]}))
    (tmp_path / "g.json").write_text(json.dumps({"points": [["1/2", "1/4"]]}))
    code, _, err = _run(capsys, "scan", "--family", "agkl", "--grid", str(tmp_path / "g.json"),
                        "--witness-dir", str(wdir))
    assert code == 3 and "FIRED" in err


def test_missing_file_is_an_error(capsys):
    code, _, err = _run(capsys, "choi", "--map", "/nonexistent/m.json")
    assert code == 1 and err.startswith("error:")
