import json

import pytest

from knotcsi import cli


def run(argv, capsys, cache):
    code = cli.main(argv + ["--cache-dir", str(cache)] if "--cache-dir" not in argv else argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_help_mentions_all_flags(capsys):
    with pytest.raises(SystemExit):
        cli.main(["invariant", "--help"])
    text = capsys.readouterr().out
    for flag in ("--curve", "--seed", "--samples", "--workers", "--L",
                 "--format", "--out", "--cache-dir", "--weights", "--k"):
        assert flag in text
    with pytest.raises(SystemExit):
        cli.main(["diagrams", "--help"])
    text = capsys.readouterr().out
    for flag in ("--family", "--k", "--max-vertices", "--n", "--max-degree"):
        assert flag in text


def test_invariant_v2_cached_and_deterministic(tmp_path, capsys):
    argv = ["invariant", "v2", "--curve", "builtin:long_trefoil", "--seed", "7",
            "--samples", "65536"]
    code1, out1, _ = run(argv, capsys, tmp_path)
    code2, out2, _ = run(argv, capsys, tmp_path)
    assert code1 == code2 == 0
    r1, r2 = json.loads(out1), json.loads(out2)
    assert r1["cached"] is False and r2["cached"] is True
    r2["cached"] = False
    assert r1 == r2  # byte-identical up to the cached flag
    assert r1["seed"] == 7 and r1["operation"] == "invariant:v2"
    assert "curve_spec_digest" in r1 and "stderr" in r1


def test_random_seed_echoed(tmp_path, capsys):
    argv = ["invariant", "lk", "--curve", "builtin:long_hopf", "--samples", "16384"]
    code, out, _ = run(argv, capsys, tmp_path)
    rep = json.loads(out)
    assert code == 0
    assert rep["seed_was_random"] is True
    assert isinstance(rep["seed"], int)


def test_diagrams_dims_csv_row(capsys):
    code = cli.main(["diagrams", "dims", "--family", "chord", "--k", "4", "--format", "csv"])
    out = capsys.readouterr().out
    assert code == 0
    assert "family,k,relations,rank" in out
    assert "chord,4,1T+4T,3" in out


def test_diagrams_verify_complex(capsys):
    code = cli.main(["diagrams", "verify-complex", "--n", "3", "--max-vertices", "6"])
    out = capsys.readouterr().out
    assert code == 0
    assert "δ²=0: PASS" in out


def test_diagrams_enumerate_and_coboundary(capsys):
    code = cli.main(["diagrams", "enumerate", "--degree", "0", "--parity", "odd",
                     "--max-vertices", "4", "--trivalent"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0 and out["count"] == 5
    code = cli.main(["diagrams", "coboundary", "--diagram",
                     "p=2 q=0 chords=[(1,2)] loops=[] edges=[] parity=odd"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["rows"] == [{"coefficient": "1",
                            "diagram": "p=1 q=0 chords=[] loops=[1] edges=[] parity=odd"}]


def test_integrate_subcommand(tmp_path, capsys):
    argv = ["integrate", "--diagram", "p=4 q=0 chords=[(1,3),(2,4)] loops=[] edges=[] parity=odd",
            "--curve", "builtin:line", "--seed", "3", "--samples", "16384"]
    code, out, _ = run(argv, capsys, tmp_path)
    rep = json.loads(out)
    assert code == 0 and rep["value"] == 0.0


def test_skein_subcommand(tmp_path, capsys):
    argv = ["skein", "--curve", "builtin:singular_x2_nested", "--invariant", "writhe",
            "--seed", "5", "--samples", "16384", "--epsilon", "0.3"]
    code, out, _ = run(argv, capsys, tmp_path)
    rep = json.loads(out)
    assert code == 0 and rep["operation"] == "skein:writhe"


def test_error_exit_codes(tmp_path, capsys):
    code, _, err = run(["invariant", "lk", "--curve", "builtin:nope"], capsys, tmp_path)
    assert code == 2 and "error:" in err
    code, _, err = run(["invariant", "lk", "--curve", "builtin:long_trefoil"], capsys, tmp_path)
    assert code == 2  # lk needs a link
    code, _, err = run(["integrate", "--diagram", "p=1 q=0 chords=[] loops=[1] edges=[] parity=odd",
                        "--curve", "builtin:line"], capsys, tmp_path)
    assert code == 2  # positive-degree diagram rejected


def test_inline_curve_spec(tmp_path, capsys):
    spec = json.dumps({"kind": "perturbed_line", "window": [-2, 2],
                       "coeffs": [[0.0, 0.8, 0.3]]})
    argv = ["invariant", "writhe", "--curve", spec, "--seed", "2", "--samples", "16384"]
    code, out, _ = run(argv, capsys, tmp_path)
    assert code == 0


def test_weight_system_file(tmp_path, capsys):
    from knotcsi import algebra, diagrams

    ws = algebra.casson_weight_system()
    doc = {"degree": 2, "family": "trivalent",
           "values": {diagrams.encode(d): str(v) for d, v in ws.values.items()}}
    path = tmp_path / "w2.json"
    path.write_text(json.dumps(doc))
    argv = ["invariant", "type-k", "--curve", "builtin:line", "--weights", str(path),
            "--seed", "2", "--samples", "16384"]
    code, out, _ = run(argv, capsys, tmp_path)
    assert code == 0

    # an unsound weight system is refused
    bad = {"degree": 2, "family": "trivalent",
           "values": {diagrams.encode(diagrams.x_diagram()): "1"}}
    path2 = tmp_path / "bad.json"
    path2.write_text(json.dumps(bad))
    argv = ["invariant", "type-k", "--curve", "builtin:line", "--weights", str(path2),
            "--seed", "2", "--samples", "16384"]
    code, _, err = run(argv, capsys, tmp_path)
    assert code == 2 and "relation" in err


def test_dump_matrix(tmp_path, capsys):
    out = tmp_path / "m.txt"
    code = cli.main(["diagrams", "dump-matrix", "--n", "3", "--degree", "0",
                     "--max-vertices", "4", "--out", str(out)])
    capsys.readouterr()
    assert code == 0
    assert out.read_text().startswith("%")
