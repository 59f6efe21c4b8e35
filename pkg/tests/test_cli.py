import json
from fractions import Fraction

import pytest

from flexbipyramid.cli import main, run
from flexbipyramid.complexes import build_bipyramid, build_subdivided, edge_lengths_sq
from flexbipyramid.numeric import parse_scalar, set_precision, within
from flexbipyramid.serialization import load_realization, read_obj, realization_from_json

PAPER = "-5/8,1,15/7,11/4,5/2,2/7"


@pytest.fixture(autouse=True)
def _restore_precision():
    yield
    set_precision(128, 1024)


def test_construct_type1(capsys):
    assert main(["construct", "--type1", "--params", PAPER]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["vertices"]["3"] == ["15/7", "11/4", "5/2"]
    assert out["construction"]["type"] == "type1"


def test_construct_type3_flat_obj(tmp_path):
    obj = tmp_path / "out.obj"
    code, out, _ = run(["construct", "--type3", "--t", "0", "--obj", str(obj)])
    assert code == 0
    vlines = [ln for ln in obj.read_text().splitlines() if ln.startswith("v ")]
    assert len(vlines) == 7 and all(ln.endswith(" 0") for ln in vlines)


def test_construct_flex8_with_n():
    code, out, _ = run(["construct", "--flex8", "--a", "1", "--with-n"])
    assert code == 0
    assert sorted(out["vertices"]) == sorted(["1", "2", "3", "4", "5", "T", "B", "N"])
    assert out["vertices"]["3"][2] == "5/2"


def test_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["construct", "--flex8", "--a", "1", "--with-n", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_verify_type3():
    code, out, _ = run(["verify", "--type3", "--samples", "17"])
    assert code == 0 and out["pass"]
    lengths = next(c for c in out["checks"] if c["name"] == "edge_lengths_constant")
    assert lengths["samples"] == 17


def test_verify_flex8():
    code, out, _ = run(["verify", "--flex8", "--samples", "9", "--precision-bits", "256"])
    assert code == 0 and out["pass"] and out["precision_bits"] == 256


def test_verify_type1_with_random_sweep():
    code, out, _ = run(["verify", "--type1", "--params", PAPER, "--random", "10", "--seed", "5"])
    assert code == 0 and out["pass"]


def test_verify_corrupted_realization(tmp_path):
    code, out, _ = run(["construct", "--type1", "--params", PAPER])
    out["vertices"]["2"] = ["1", "2", "3"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(out))
    code, rep, _ = run(["verify", "--realization", str(path)])
    assert code == 1 and not rep["pass"]
    failed = [c["name"] for c in rep["checks"] if not c["pass"]]
    assert "edge_lengths_constant" in failed


def test_verify_saved_realization_passes(tmp_path):
    path = tmp_path / "ok.json"
    assert main(["construct", "--type1", "--params", PAPER, "--out", str(path)]) == 0
    code, rep, _ = run(["verify", "--realization", str(path)])
    assert code == 0 and rep["pass"]


def test_scan_paper_parameters():
    code, out, _ = run(["scan", "--type1", "--params", PAPER])
    assert code == 0
    assert out["improper"] == [["T-4-5", "B-1-2"], ["T-5-1", "B-1-2"], ["B-1-2", "B-4-5"]]


def test_classify_type3():
    code, out, _ = run(["classify", "--type3"])
    assert code == 0 and out["class"] == "AllFlip"


def test_frames_flex8_with_n(tmp_path):
    code, out, _ = run(["frames", "--flex8", "--with-n", "--count", "24", "--out", str(tmp_path)])
    assert code == 0 and out["all_clean"]
    files = sorted(p.name for p in tmp_path.glob("frame_*.obj"))
    assert files == [f"frame_{i:03d}.obj" for i in range(24)]
    # OBJ round trip: edge lengths agree with the construction within printed precision
    cx = build_subdivided()
    ref = edge_lengths_sq(realization_from_json(run(["construct", "--flex8", "--a", "1", "--with-n"])[1]), cx)
    for name in (files[0], files[-1]):
        rho, faces = read_obj((tmp_path / name).read_text())
        got = edge_lengths_sq(rho, cx)
        assert all(within(got[e] - ref[e], Fraction(1, 10 ** 12)) for e in ref.edges)
        assert len(faces) == 12


def test_obj_faces_are_oriented(tmp_path):
    obj = tmp_path / "p.obj"
    run(["construct", "--type1", "--params", PAPER, "--obj", str(obj)])
    rho, faces = read_obj(obj.read_text())
    labels = rho.labels
    named = {tuple(labels[i - 1] for i in f) for f in faces}
    assert ("1", "2", "T") in named and ("2", "1", "B") in named
    assert load_realization(obj).coordinates == rho.coordinates


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "construct", "construction": "type3", "t": "1/2"}))
    code, out, _ = run(["--config", str(cfg)])
    assert code == 0 and out["construction"]["type"] == "type3"
    assert parse_scalar(out["vertices"]["T"][1]) == Fraction(1, 4)


@pytest.mark.parametrize("argv,code", [
    (["construct", "--bogus"], 2),
    (["construct", "--type1", "--params", "1,2,3"], 2),
    (["construct", "--flex8", "--a", "2"], 3),
    (["construct", "--type1", "--params", "1/2,0,1,2,3,1/3"], 3),
])
def test_exit_codes(argv, code):
    got, out, _ = run(argv)
    assert got == code
    if out is not None:
        assert set(out) == {"error", "message"}


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "construct", "nonsense": 1}))
    assert run(["--config", str(cfg)])[0] == 2


def test_b5_obj_round_trip(tmp_path):
    obj = tmp_path / "p.obj"
    _, out, _ = run(["construct", "--type1", "--params", PAPER, "--obj", str(obj)])
    rho, _ = read_obj(obj.read_text())
    cx = build_bipyramid(5)
    ref = edge_lengths_sq(realization_from_json(out), cx)
    got = edge_lengths_sq(rho, cx)
    assert all(within(got[e] - ref[e], Fraction(1, 10 ** 12)) for e in ref.edges)
