import json

from loopdeg.cli import main


def synth_small(tmp_path, prefix="fe", seed=7):
    out = tmp_path / prefix
    code = main(["synth", "figure-eight", "--seed", str(seed), "--rate", "5",
                 "--out", str(out)])
    assert code == 0
    return out.with_suffix(".csv")


def test_synth_deterministic(tmp_path):
    a = synth_small(tmp_path, "a")
    b = synth_small(tmp_path, "b")
    assert a.read_bytes() == b.read_bytes()
    truth = json.load(open(tmp_path / "a.truth.json"))
    assert truth["kind"] == "figure_eight" and len(truth["loop_pairs"]) == 1


def test_synth_different_seed_differs(tmp_path):
    a = synth_small(tmp_path, "a", seed=1)
    b = synth_small(tmp_path, "b", seed=2)
    assert a.read_bytes() != b.read_bytes()


def test_detect_proves_figure_eight(tmp_path, capsys):
    csv = synth_small(tmp_path)
    out = tmp_path / "out"
    code = main(["detect", "--input", str(csv), "--out", str(out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "proven: 1" in printed
    res = json.load(open(out / "results.json"))
    s = res["summary"]
    assert s["proven"] + s["inconclusive"] + s["partial"] == s["subpavings"]
    assert s["proven"] == 1
    assert (out / "tplane.json").exists() and (out / "detections.csv").exists()
    assert not (out / "tplane.svg").exists()  # plots are opt-in


def test_detect_straight_line_zero_subpavings(tmp_path, capsys):
    p = tmp_path / "line.csv"
    rows = ["t,vx,vy,sigma"] + [f"{t},1.0,0.0,0.01" for t in range(200)]
    p.write_text("\n".join(rows) + "\n")
    code = main(["detect", "--input", str(p), "--out", str(tmp_path / "o")])
    assert code == 0
    assert "subpavings: 0" in capsys.readouterr().out


def test_detect_missing_file(tmp_path, capsys):
    code = main(["detect", "--input", str(tmp_path / "nope.csv")])
    assert code == 2
    assert "nope.csv" in capsys.readouterr().err


def test_detect_bad_eps(tmp_path, capsys):
    csv = synth_small(tmp_path)
    code = main(["detect", "--input", str(csv), "--eps", "1e6",
                 "--out", str(tmp_path / "o")])
    assert code == 2


def test_synth_invalid_kind(capsys):
    assert main(["synth", "zigzag"]) == 2


def test_synth_invalid_param(tmp_path, capsys):
    code = main(["synth", "lawnmower", "--param", "rows=1",
                 "--out", str(tmp_path / "x")])
    assert code == 2


def test_jobs_do_not_change_output_bytes(tmp_path):
    csv = synth_small(tmp_path)
    outs = []
    for jobs in ("1", "2"):
        out = tmp_path / f"out{jobs}"
        code = main(["detect", "--input", str(csv), "--jobs", jobs,
                     "--out", str(out)])
        assert code == 0
        outs.append((out / "tplane.json").read_bytes())
    assert outs[0] == outs[1]


def test_degree_selftest_cli(capsys):
    assert main(["degree-selftest", "--cases", "25", "--seed", "4"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_plots_written(tmp_path):
    csv = synth_small(tmp_path)
    out = tmp_path / "out"
    code = main(["detect", "--input", str(csv), "--out", str(out), "--plots"])
    assert code == 0
    for name in ("tplane.svg", "trajectory.svg"):
        f = out / name
        assert f.exists() and f.stat().st_size > 1000


def test_version_flag(capsys):
    assert main(["--version"]) == 0
