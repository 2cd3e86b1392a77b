import csv
import io
import json
import subprocess
import sys

import pytest

from piezomag_saw import cli
from piezomag_saw.materials import TERFENOL_D, format_materials


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# piezomag-saw ")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_mode_json(capsys):
    code, out, _ = run(capsys, "mode", "--material", "terfenol-D", "--freq-ghz", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["v_m_s"] == pytest.approx(1005.0, rel=1e-3)
    assert doc["freq_hz"] == 3e9
    assert "material=terfenol-D" in doc["provenance"]


def test_numbers_use_twelve_digits(capsys):
    _, out, _ = run(capsys, "mode", "--format", "csv")
    row = read_csv(out)[0]
    assert row["v_m_s"] == "1004.97287784"


def test_profile_csv(capsys):
    code, out, _ = run(capsys, "profile", "--zmax-wavelengths", "1", "--samples", "11")
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == list(cli.PROFILE_COLUMNS)
    assert len(rows) == 11
    assert float(rows[-1]["z_over_lambda"]) == 1.0
    assert abs(float(rows[-1]["u1_re"])) < abs(float(rows[0]["u1_re"]))


def test_zeropoint_json(capsys):
    code, out, _ = run(capsys, "zeropoint", "--freq-ghz", "10", "--width-um", "1")
    doc = json.loads(out)
    assert code == 0
    assert doc["u0k_m"] == pytest.approx(8.71e-16, rel=1e-9)
    assert {"b_xprime_zp_t", "b_z_zp_t", "u_zp_m", "convention"} <= set(doc)


def test_zeropoint_map_grid(capsys):
    code, out, _ = run(capsys, "zeropoint-map", "--freq-ghz-range", "1:10:4", "--width-um-range", "1:100:3")
    rows = read_csv(out)
    assert code == 0 and len(rows) == 12
    assert list(rows[0]) == list(cli.MAP_COLUMNS)


def test_couple_presets_and_flags(capsys):
    code, out, _ = run(capsys, "couple", "--preset", "fig5d")
    doc = json.loads(out)
    assert code == 0
    assert doc["detuning_rad_s"] == 0.0
    assert doc["arg_g_rad"] == pytest.approx(-0.785398163397)
    code, out, _ = run(capsys, "couple", "--system", "fluxonium", "--area-um2", "500")
    assert json.loads(out)["g_abs_hz"] == pytest.approx(146826235.362 / 2, rel=1e-9)
    code, out, _ = run(capsys, "couple", "--system", "magnon", "--freq-ghz", "3", "--n-spins", "4")
    doc = json.loads(out)
    assert doc["g_abs_hz"] == pytest.approx(2 * 398.739818279, rel=1e-9)
    assert doc["calibrated_n_s"] > 0


def test_couple_usage_errors(capsys):
    assert run(capsys, "couple")[0] == 2
    assert run(capsys, "couple", "--system", "nv")[0] == 2
    assert run(capsys, "couple", "--system", "transmon", "--el-ghz", "1")[0] == 2
    assert run(capsys, "couple", "--preset", "fig5a", "--system", "nv")[0] == 2


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "fig5c", "--axis", "distance-um",
                       "--range", "0.1:1:4")
    rows = read_csv(out)
    assert code == 0 and len(rows) == 4
    assert list(rows[0]) == list(cli.SWEEP_COLUMNS)
    code, out, _ = run(capsys, "sweep", "--preset", "fig5a", "--axis", "width-um",
                       "--range", "1:100:3", "--log")
    assert [float(r["axis_value"]) for r in read_csv(out)] == [1.0, 10.0, 100.0]


def test_dynamics_preset_and_decimation(capsys):
    code, out, _ = run(capsys, "dynamics", "--preset", "fig10c", "--every", "997")
    rows = read_csv(out)
    assert code == 0
    assert list(rows[0]) == list(cli.DYNAMICS_COLUMNS)
    assert float(rows[-1]["t_us"]) == pytest.approx(10.0)
    assert float(rows[-1]["concurrence"]) == pytest.approx(0.19, abs=0.01)


def test_dynamics_explicit_parameters(capsys):
    code, out, _ = run(capsys, "dynamics", "--gamma0-mhz", "1", "--delay-us", "0.1",
                       "--theta-pi", "1", "--tmax-us", "2", "--dt-ns", "1")
    rows = read_csv(out)
    assert code == 0 and float(rows[-1]["t_us"]) == pytest.approx(2.0)
    assert run(capsys, "dynamics", "--gamma0-mhz", "1")[0] == 2
    assert run(capsys, "dynamics", "--preset", "fig7a", "--theta-pi", "1")[0] == 2
    code, _, err = run(capsys, "dynamics", "--gamma0-mhz", "1", "--delay-us", "0.1",
                       "--theta-pi", "1", "--dt-ns", "50")
    assert code == 2 and json.loads(err.splitlines()[-1])["error"] == "invalid_input"


def test_materials_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "materials", "list")
    assert code == 0 and out == "terfenol-D\n"
    code, out, _ = run(capsys, "materials", "show", "terfenol-D")
    assert out == format_materials([TERFENOL_D])
    assert run(capsys, "materials", "show", "nothing")[0] == 2
    assert run(capsys, "materials", "list", "--material-file", str(tmp_path / "missing"))[0] == 2


def test_unknown_subcommand_exits_2_with_usage(capsys):
    code, _, err = run(capsys, "bogus")
    assert code == 2
    assert "usage:" in err
    assert json.loads(err.splitlines()[-1])["error"] == "usage"


def test_bad_values_exit_2(capsys):
    assert run(capsys, "mode", "--freq-ghz", "-3")[0] == 2
    assert run(capsys, "mode", "--material", "nope")[0] == 2
    assert run(capsys, "zeropoint-map", "--freq-ghz-range", "1:2")[0] == 2


def test_numerical_error_exits_1(capsys, monkeypatch):
    from piezomag_saw.rayleigh import NumericalError

    def broken(*_):
        raise NumericalError("no root")

    monkeypatch.setattr(cli.rayleigh, "mode_at_frequency", broken)
    code, _, err = run(capsys, "mode")
    assert code == 1
    assert json.loads(err)["error"] == "numerical"


@pytest.mark.parametrize("command,columns", [
    ("profile", cli.PROFILE_COLUMNS), ("zeropoint-map", cli.MAP_COLUMNS),
    ("sweep", cli.SWEEP_COLUMNS), ("dynamics", cli.DYNAMICS_COLUMNS)])
def test_help_lists_columns(capsys, command, columns):
    with pytest.raises(SystemExit) as info:
        cli.run([command, "--help"])
    assert info.value.code == 0
    text = capsys.readouterr().out
    for col in columns:
        assert col in text


def test_output_file_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(capsys, "dynamics", "--preset", "fig7a", "--every", "50", "-o", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert not [p for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]


def test_verify_negative_control(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text(format_materials([TERFENOL_D.replace(name="flipped", q33=-TERFENOL_D.q33)]))
    code, out, _ = run(capsys, "verify", "fast", "--material", "flipped", "--material-file", str(path))
    assert code == 1
    c1 = out.splitlines()[0]
    assert c1.startswith("C01 FAIL")
    assert "a_coef=0.273628(!)" in c1


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "piezomag_saw.cli", "mode", "--freq-ghz", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["v_m_s"] == pytest.approx(1005, rel=1e-3)
