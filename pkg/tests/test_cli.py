import pytest

from planklab.cli import run


def test_cover_example_exits_zero(capsys):
    assert run(["cover", "--k", "3", "--delta", "2^-10",
                "--samples", "1e5"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[1].split(",")[4] == "1"


def test_biortho_example_zero_violations_for_parabola(capsys):
    # k=2 is the one curve whose minimal clean dilation is 10
    assert run(["biortho", "--k", "2", "--delta", "2^-12",
                "--step", "2^-8", "--D", "10"]) == 0


@pytest.mark.xfail(strict=False,
                   reason="k=3 needs dilation 16 for zero violations; at D=10 "
                          "the measured count is 459 (see notes ledger)")
def test_biortho_documented_k3_example():
    assert run(["biortho", "--k", "3", "--delta", "2^-12",
                "--step", "2^-8", "--D", "10"]) == 0


def test_ratio_single_occupancy_example(capsys):
    assert run(["ratio", "--k", "2", "--delta", "2^-8", "--grid", "1024",
                "--trials", "1", "--occupancy", "single"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert abs(float(row[4]) - 1.0) <= 1e-6


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["cover", "--bogus"])
    assert exc.value.code == 1


def test_unknown_subcommand_exits_one():
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 1


def test_violation_exits_two(capsys):
    # r5 overlap at the stated budget is a known violation
    assert run(["overlap", "--space", "r5", "--r", "2^2",
                "--samples", "50"]) == 2


def test_csv_bodies_are_byte_identical(tmp_path):
    args = ["cover", "--k", "2", "--delta", "2^-8", "--samples", "2000"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.json").exists()


def test_sweep_rows_are_union_of_single_runs(capsys):
    run(["sweep", "--cmd", "cover", "--k", "2,3", "--delta", "2^-8",
         "--samples", "2000"])
    sweep_rows = set(capsys.readouterr().out.splitlines()[1:])
    singles = set()
    for k in ("2", "3"):
        run(["cover", "--k", k, "--delta", "2^-8", "--samples", "2000"])
        singles |= set(capsys.readouterr().out.splitlines()[1:])
    assert sweep_rows == singles


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("k=4\ndelta=2^-8\nsamples=1000\n")
    assert run(["cover", "--config", str(cfg), "--samples", "2000"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert row[1] == "4" and row[3] == "2000"


def test_emit_plot_writes_dat(tmp_path):
    out = tmp_path / "r.csv"
    assert run(["cover", "--k", "2", "--delta", "2^-8", "--samples", "1000",
                "--out", str(out), "--emit-plot"]) == 0
    assert (tmp_path / "r.dat").exists()
