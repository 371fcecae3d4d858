"""Command-line interface: output format, determinism, exit codes."""

import math

import pytest

from zpf_optics import __version__
from zpf_optics.cli import main, parse_angle, parse_sweep_value

HEADER = f"# zpf-optics v{__version__}"


def _read(path):
    return path.read_text(encoding="utf-8")


def _rows(text):
    lines = text.strip().splitlines()
    assert lines[0] == HEADER
    columns = lines[1].split(",")
    return columns, [line.split(",") for line in lines[2:]]


# --- zpf run ------------------------------------------------------------------------

def test_run_repeat_is_byte_identical(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = ["run", "--builtin", "dc", "--seed", "7", "--trials", "20000"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert _read(out1) == _read(out2)
    columns, rows = _rows(_read(out1))
    assert columns[-5:] == ["numerator", "denominator", "estimate", "ci_lo", "ci_hi"]
    assert len(rows) == 1


def test_run_stdout_has_version_header(capsys):
    assert main(["run", "--builtin", "dc", "--seed", "1",
                 "--trials", "5000"]) == 0
    out = capsys.readouterr().out
    assert out.startswith(HEADER + "\n")


def test_run_sweep_produces_one_row_per_point(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["run", "--builtin", "dc", "--seed", "3", "--trials", "2000",
                 "--sweep", "phi=0:6.28:lin5", "--out", str(out)]) == 0
    columns, rows = _rows(_read(out))
    assert columns[0] == "phi"
    assert len(rows) == 5
    phis = [float(r[0]) for r in rows]
    assert phis == pytest.approx([0.0, 1.57, 3.14, 4.71, 6.28], abs=0.01)


def test_run_dw_sweep_emits_witness_columns(tmp_path):
    out = tmp_path / "dw.csv"
    assert main(["run", "--builtin", "dw", "--seed", "5", "--trials", "20000",
                 "--threads", "2", "--sweep", "alpha2=0.1:10:log5",
                 "--out", str(out)]) == 0
    columns, rows = _rows(_read(out))
    for name in ("det_w2", "idw", "r_min"):
        assert name in columns
    assert len(rows) == 5
    alpha2s = [float(r[columns.index("alpha2")]) for r in rows]
    assert alpha2s[0] == pytest.approx(0.1)
    assert alpha2s[-1] == pytest.approx(10.0)
    # log spacing: constant ratio
    ratios = [alpha2s[i + 1] / alpha2s[i] for i in range(4)]
    assert max(ratios) == pytest.approx(min(ratios), rel=1e-9)


def test_run_file_and_parse_error(tmp_path):
    good = tmp_path / "good.zpf"
    good.write_text('experiment "g"\nmode a\nsource vacuum -> a\n'
                    'detector D1 on a\npostselect click(D1)\ntrials 2000\nseed 1\n')
    assert main(["run", "--file", str(good), "--out", str(tmp_path / "g.csv")]) == 0

    bad = tmp_path / "bad.zpf"
    bad.write_text('experiment "b"\nmode a\nelement prism(a)\n')
    assert main(["run", "--file", str(bad)]) == 2


def test_run_missing_file_is_usage_error(tmp_path):
    assert main(["run", "--file", str(tmp_path / "nope.zpf")]) == 1


def test_run_unknown_builtin_exit_2(capsys):
    assert main(["run", "--builtin", "nope"]) == 2
    err = capsys.readouterr().err
    assert "dc" in err and "eraser" in err


def test_run_unknown_sweep_param_exit_2():
    assert main(["run", "--builtin", "dc", "--trials", "1000",
                 "--sweep", "bogus=0:1:lin3"]) == 2


def test_run_degenerate_denominator_exit_3(tmp_path):
    prog = tmp_path / "cond.zpf"
    prog.write_text('experiment "c"\nmode a\nsource vacuum -> a\n'
                    'detector D1 on a\npostselect click(D1)\n'
                    'condition on click(D1)\ntrials 50\nseed 0\n')
    assert main(["run", "--file", str(prog)]) == 3


def test_usage_errors_exit_1():
    assert main(["run"]) == 1  # neither --builtin nor --file
    assert main(["frobnicate"]) == 1
    assert main(["--help"]) == 0


# --- zpf analytic ---------------------------------------------------------------------

def test_analytic_dc_curve(capsys):
    assert main(["analytic", "dc", "--points", "9"]) == 0
    columns, rows = _rows(capsys.readouterr().out)
    assert columns == ["phi", "p1", "p2"]
    assert len(rows) == 9
    p1 = [float(r[1]) for r in rows]
    assert max(p1) > min(p1)  # fringes at theta = 0


def test_analytic_dc_flat_at_45deg(capsys):
    assert main(["analytic", "dc", "--theta", "45deg", "--points", "9"]) == 0
    _, rows = _rows(capsys.readouterr().out)
    p1 = [float(r[1]) for r in rows]
    assert max(p1) - min(p1) < 1e-12


def test_analytic_dw_point(capsys):
    assert main(["analytic", "dw", "--alpha2", "1.3"]) == 0
    columns, rows = _rows(capsys.readouterr().out)
    assert columns == ["alpha2", "det_w2", "idw", "r_min"]
    assert float(rows[0][1]) == pytest.approx(0.95, abs=0.02)


def test_analytic_rmin(capsys):
    assert main(["analytic", "rmin", "--idw", "3.8284"]) == 0
    _, rows = _rows(capsys.readouterr().out)
    assert float(rows[0][1]) == pytest.approx(0.2071, abs=1e-3)


def test_analytic_marcum(capsys):
    assert main(["analytic", "marcum", "--a", "0.0", "--b", "3.9"]) == 0
    _, rows = _rows(capsys.readouterr().out)
    q1, lower = float(rows[0][2]), float(rows[0][3])
    assert q1 + lower == pytest.approx(1.0, abs=1e-12)
    assert q1 == pytest.approx(math.exp(-3.9 ** 2 / 2), abs=1e-12)


# --- zpf check ---------------------------------------------------------------------

def test_check_passes(capsys):
    assert main(["check"]) == 0
    out = capsys.readouterr().out
    lines = [l for l in out.strip().splitlines() if l]
    assert len(lines) == 4
    assert all(l.startswith("PASS") for l in lines)


# --- helpers -----------------------------------------------------------------------

def test_parse_sweep_value_forms():
    assert parse_sweep_value("1,2,3").expand() == (1.0, 2.0, 3.0)
    lin = parse_sweep_value("0:1:lin3").expand()
    assert lin == pytest.approx((0.0, 0.5, 1.0))
    log = parse_sweep_value("0.01:100:log5").expand()
    assert log[0] == pytest.approx(0.01)
    assert log[2] == pytest.approx(1.0)
    from zpf_optics.cli import UsageError
    for bad in ("0:1", "0:1:geo5", "a:b:lin3", "0:1:lin0", "-1:1:log3", "x,y"):
        with pytest.raises(UsageError):
            parse_sweep_value(bad)


def test_parse_angle_forms():
    assert parse_angle("45deg") == pytest.approx(math.pi / 4)
    assert parse_angle("0.5rad") == 0.5
    assert parse_angle("0.5") == 0.5
    from zpf_optics.cli import UsageError
    with pytest.raises(UsageError):
        parse_angle("fortyfive")
