import csv
import io
import xml.etree.ElementTree as ET

import pytest

from emscale.cli import SWEEP_COLUMNS, RunConfig, load_config, parse_config, run
from emscale.exceptions import ConfigError
from emscale._csvio import format_float


def _csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_sweep_row_count_and_schema(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = run(["sweep", "--dmin", "1e-3", "--dmax", "10e-3", "--steps", "10", "--tech", "both",
                "--q-mode", "displacement-rule", "--out", str(out)])
    assert code == 0
    rows = _csv(out)
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert len(rows) == 21
    assert {r[1] for r in rows[1:]} == {"wirewound", "micro"}
    assert "20 designs" in capsys.readouterr().out


def test_sweep_is_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        csv_path, svg_path = tmp_path / f"s{i}.csv", tmp_path / f"s{i}.svg"
        assert run(["sweep", "--dmin", "1e-3", "--dmax", "3e-3", "--steps", "3",
                    "--q-mode", "both", "--out", str(csv_path), "--plot", str(svg_path)]) == 0
        outs.append((csv_path.read_bytes(), svg_path.read_bytes()))
    assert outs[0] == outs[1]


def test_plot_is_wellformed_svg_with_series_labels(tmp_path):
    svg = tmp_path / "p.svg"
    assert run(["sweep", "--dmin", "1e-3", "--dmax", "4e-3", "--steps", "4", "--q-mode", "both",
                "--out", str(tmp_path / "p.csv"), "--plot", str(svg)]) == 0
    root = ET.parse(svg).getroot()
    assert root.tag.endswith("svg")
    text = svg.read_text()
    for label in ("wirewound, Q displacement-rule", "micro, Q fixed"):
        assert label in text


def test_sweep_to_stdout(capsys):
    assert run(["sweep", "--dmin", "2e-3", "--dmax", "2e-3", "--steps", "1",
                "--tech", "micro"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("d_m,tech,q_mode")
    assert len(lines) == 2


def test_design_fixed_q_is_impedance_matched(capsys):
    assert run(["design", "--d", "6e-3", "--tech", "wirewound", "--q", "300"]) == 0
    out = capsys.readouterr().out
    assert "strategy        : impedance-matched" in out
    assert "(fixed)" in out


def test_design_writes_single_row(tmp_path, capsys):
    out = tmp_path / "d.csv"
    assert run(["design", "--d", "6e-3", "--out", str(out)]) == 0
    rows = _csv(out)
    assert len(rows) == 2 and rows[1][9] == "matched-damping"


def test_design_infeasible_exit_code(capsys):
    assert run(["design", "--d", "1e-3", "--tech", "wirewound", "--min-wire", "1e-3"]) == 1
    assert "infeasible" in capsys.readouterr().err


def test_flux_has_zero_row(capsys):
    assert run(["flux", "--d", "6e-3", "--samples", "11"]) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["x_m", "flux_Wb"]
    assert ["0", "0"] in rows[1:]
    assert len(rows) == 12


def test_transient_writes_waveform(tmp_path, capsys):
    out = tmp_path / "w.csv"
    assert run(["transient", "--d", "6e-3", "--freq", "100", "--out", str(out)]) == 0
    rows = _csv(out)
    assert rows[0] == ["t_s", "x_m", "v_mps", "flux_Wbturns", "v_load_V"]
    assert len(rows) == 1 + 5 * 200
    assert "harmonic distortion" in capsys.readouterr().out


def test_transient_too_many_turns(capsys):
    assert run(["transient", "--d", "1e-3", "--turns", "100000"]) == 1


@pytest.mark.parametrize("argv", [
    ["sweep", "--bogus"],
    ["nosuch"],
    ["sweep", "--dmin", "1e-5"],
    ["sweep", "--dmax", "0.5"],
    ["sweep", "--dmin", "5e-3", "--dmax", "1e-3"],
    ["design", "--freq", "-1"],
    ["design", "--fill-factor", "2"],
    ["transient", "--load", "cheap"],
    ["design", "--d", "6e-3", "--out", "/nonexistent-dir/x.csv"],
])
def test_invalid_input_exit_code(argv, capsys):
    assert run(argv) == 2


def test_empty_config_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    cfg = load_config(path)
    assert cfg == RunConfig()
    assert cfg.frequency == 1000.0 and cfg.acceleration == 9.81


def test_config_comments_and_values(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# study\nfrequency = 250   # Hz\n\nsteps = 4\ntech = micro\n")
    cfg = load_config(path)
    assert (cfg.frequency, cfg.steps, cfg.tech) == (250.0, 4, "micro")


def test_config_range_error_names_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("frequency = -5\n")
    with pytest.raises(ConfigError, match="frequency") as info:
        load_config(path)
    assert info.value.key == "frequency"


@pytest.mark.parametrize("text,line", [
    ("frequency = 1000\nwidth = 3\n", 2),
    ("frequency 1000\n", 1),
    ("\n\nsteps = ten\n", 3),
    ("q =\n", 1),
])
def test_config_parse_errors_report_line(text, line):
    with pytest.raises(ConfigError, match=f"line {line}:") as info:
        parse_config(text)
    assert info.value.line == line


def test_flag_overrides_config(tmp_path, capsys):
    path = tmp_path / "f.cfg"
    path.write_text("frequency = 1000\n")
    assert load_config(path, {"frequency": 100.0}).frequency == 100.0
    # end to end: the Q in the summary follows the 100 Hz flag
    assert run(["design", "--config", str(path), "--freq", "100", "--d", "6e-3"]) == 0
    q_flag = capsys.readouterr().out
    assert run(["design", "--config", str(path), "--d", "6e-3"]) == 0
    assert capsys.readouterr().out != q_flag


def test_config_error_through_run(tmp_path, capsys):
    path = tmp_path / "x.cfg"
    path.write_text("colour = red\n")
    assert run(["design", "--config", str(path)]) == 2
    assert "line 1: colour: unknown key" in capsys.readouterr().err
    assert run(["design", "--config", str(tmp_path / "missing.cfg")]) == 2


@pytest.mark.parametrize("value,text", [
    (0.0, "0"), (1.5, "1.5"), (1e-3, "0.001"), (1e-4, "1e-4"), (12345.0, "1.2345e4"),
    (-2.5e-7, "-2.5e-7"), (1234.5, "1234.5"), (0.1 + 0.2, "0.30000000000000004"),
    (True, "true"), (7, "7"), (float("nan"), "nan"),
])
def test_float_format(value, text):
    assert format_float(value) == text


def test_float_format_round_trips():
    for v in (1 / 3, 2.0**-30, 6.02214076e23, 9.999e-5, 123.456):
        assert float(format_float(v)) == v
