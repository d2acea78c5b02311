import csv
import io
import json

import pytest

from reflectwalk.cli import Formatter, RunConfig, cmd_spectrum, cmd_table, main, run_checks
from reflectwalk.errors import WalkError

from conftest import REF_PROBS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_table_row_n200():
    text, status = cmd_table(RunConfig(REF_PROBS, j=5, n_values=[200]), Formatter(5, False))
    (row,) = rows(text)
    assert status == 0
    assert (row["I"], row["I+II"], row["I+II+III"], row["exact_dp"]) == (
        "11.28379",
        "12.39490",
        "12.79053",
        "12.78946",
    )
    assert row["exact_series"] == row["exact_dp"]


def test_table_single_row_n10():
    text, _ = cmd_table(RunConfig(REF_PROBS, j=5, n_values=[10]), Formatter(5, False))
    (row,) = rows(text)
    assert row["n"] == "10" and row["exact_dp"] == "5.26359"
    for col, printed in [("I", 2.52314), ("I+II", 3.63425), ("I+II+III", 5.40355)]:
        assert abs(float(row[col]) - printed) <= 1e-5 + 1e-9


def test_table_point_mass(capsys):
    code, out, _ = run(capsys, "table", "--probs", "1", "--j", "4")
    assert code == 0
    for row in rows(out):
        assert row["exact_dp"] == row["exact_series"] == "4.00000"
        assert row["I+II+III"] == "4.00000"


def test_table_header_and_line_endings(capsys):
    code, out, _ = run(capsys, "table", "--probs", *[" ".join(REF_PROBS)], "--j", "5", "--n", "10", "20")
    assert code == 0
    assert out.splitlines()[0] == "n,I,I+II,I+II+III,exact_dp,exact_series,abs_err,err_times_n32"
    assert "\r" not in out


def test_full_precision(capsys):
    _, out, _ = run(capsys, "table", "--probs", "3/10 1/10 1/10 1/2", "--j", "5", "--n", "10", "--full-precision")
    assert len(rows(out)[0]["exact_dp"]) > 10


def test_spectrum_n1_family():
    text = cmd_spectrum(RunConfig(["3/4", "1/4"]), 5, False)
    assert "essential spectrum: [-1, 1]" in text
    assert "RESONANCE,1.25000" in text
    assert "EMBEDDED_RESONANCE,1.00000" in text


def test_spectrum_point_mass():
    text = cmd_spectrum(RunConfig(["1"]), 5, False)
    assert "A4 violated: double root at 1" in text


def test_spectrum_parity_json():
    data = json.loads(cmd_spectrum(RunConfig(["0", "1"]), 5, True))
    lams = sorted(r["lambda"][0] for r in data["roots"])
    assert lams == pytest.approx([-1, 1])
    assert {r["class"] for r in data["roots"]} == {"EMBEDDED_RESONANCE"}
    assert data["essential_spectrum"] == [-1, 1]


def test_verify_reference(capsys):
    code, out, _ = run(capsys, "verify", "--probs", "3/10 1/10 1/10 1/2", "--j", "5", "--n", "100", "--paths", "20000")
    assert code == 0
    assert out.count("[PASS]") == 5


def test_verify_point_mass_skips():
    checks = {c.name: c for c in run_checks(RunConfig(["1"], j=2, n_values=[50], paths=2000))}
    assert checks["dp_series_exact"].status == "pass"
    assert checks["constants_two_route"].status == "skip"
    assert checks["constants_two_route"].detail == "P0_ONE"
    assert checks["decomposition_identity"].detail == "P0_ONE"
    assert checks["monte_carlo_3sigma"].status == "pass"


def test_verify_bad_sum(capsys):
    code, _, err = run(capsys, "verify", "--probs", "1/2 1/4")
    assert code == 2
    assert "SUM_NOT_ONE" in err


def test_simulate_is_byte_identical(capsys):
    argv = ["simulate", "--probs", "3/10 1/10 1/10 1/2", "--j", "5", "--n", "20", "100", "--paths", "30000", "--seed", "7"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    for row in rows(first):
        assert abs(float(row["z_score"])) <= 4


def test_simulate_point_mass(capsys):
    _, out, _ = run(capsys, "simulate", "--probs", "1", "--j", "0", "--n", "10", "--paths", "100", "--seed", "1")
    assert rows(out)[0]["mc_stderr"] == "0.00000"
    _, out, _ = run(capsys, "simulate", "--probs", "1", "--j", "2", "--n", "10", "--paths", "5000", "--seed", "1")
    (row,) = rows(out)
    assert float(row["mc_stderr"]) > 0
    assert abs(float(row["mc_mean"]) - 2) <= 4 * float(row["mc_stderr"])


@pytest.mark.parametrize("extra, code", [(["--seed", "1"], "MISSING_PATHS"), (["--paths", "10"], "MISSING_SEED")])
def test_simulate_missing(capsys, extra, code):
    status, _, err = run(capsys, "simulate", "--probs", "1", *extra)
    assert status == 2 and code in err


def test_moments(capsys):
    code, out, _ = run(capsys, "moments", "--probs", "3/10 1/10 1/10 1/2")
    assert code == 0
    assert [r["exact"] for r in rows(out)] == ["1", "9/5", "5", "72/5"]
    code, _, err = run(capsys, "moments", "--probs", "1", "--max-moment", "17")
    assert code == 2 and "BAD_MOMENT" in err


def test_config_round_trip():
    cfg = RunConfig(["3/10", "0.1", "1/10", "1/2"], j=5, n_values=[10, 400], seed=3, paths=100, output="x.csv")
    assert RunConfig.from_json(cfg.to_json()) == cfg


def test_config_file(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(RunConfig(REF_PROBS, j=5, n_values=[10]).to_json())
    out_path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "table", "--config", str(path), "--output", str(out_path))
    assert code == 0 and out == ""
    assert rows(out_path.read_text())[0]["exact_dp"] == "5.26359"


def test_config_syntax_error_position():
    with pytest.raises(WalkError) as exc:
        RunConfig.from_json('{\n  "probs": ["1"],\n  "j": ,\n}')
    assert exc.value.code == "CONFIG_ERROR"
    assert "line 3 column" in str(exc.value)


@pytest.mark.parametrize(
    "raw",
    [
        {"probs": ["1"], "n_values": [10, 5]},
        {"probs": ["1"], "j": -1},
        {"probs": ["1"], "colour": "red"},
        {"j": 1},
        {"probs": ["1"], "paths": 1},
    ],
)
def test_config_field_errors(raw):
    with pytest.raises(WalkError) as exc:
        RunConfig.from_dict(raw)
    assert exc.value.code == "CONFIG_ERROR"


def test_config_bad_probs():
    with pytest.raises(WalkError) as exc:
        RunConfig.from_dict({"probs": ["1/2", "1/4"]})
    assert exc.value.code == "SUM_NOT_ONE"
