import csv
import io
import json

import pytest

from resfact.bench import CapacityReport, CapacityRow, SweepConfig, run_sweep
from resfact.report import (
    CSV_HEADER,
    emit_report,
    report_to_csv_bytes,
    report_to_json_bytes,
)

EXPECTED_HEADER = (
    "variant,F,M,D,search_space,trials,accuracy,ci_low,ci_high,mean_iterations,"
    "sigma,flip_rate,activation_threshold,convergence_threshold,max_iters,preset_exact"
)


def _report(rows=()):
    cfg = SweepConfig(F=2, variant_kind="brn", search_space_sizes=(16,), D=64)
    return CapacityReport(config=cfg, rows=tuple(rows), operational_capacity=None)


def _sample_row(**overrides):
    fields = dict(
        variant="imf",
        F=2,
        M=100,
        D=1000,
        search_space=10000,
        trials=200,
        accuracy=0.9953,
        ci_low=0.123456789,
        ci_high=1.0,
        mean_iterations=17.355,
        sigma=0.008,
        flip_rate=None,
        activation_threshold=0.001,
        convergence_threshold=0.8,
        max_iters=10000,
        preset_exact="true",
    )
    fields.update(overrides)
    return CapacityRow(**fields)


def test_header_is_the_contract():
    assert CSV_HEADER == EXPECTED_HEADER


def test_empty_report_is_header_only():
    assert report_to_csv_bytes(_report()) == (EXPECTED_HEADER + "\n").encode()


def test_csv_row_rendering():
    data = report_to_csv_bytes(_report([_sample_row()])).decode()
    lines = data.splitlines()
    assert len(lines) == 2
    cells = lines[1].split(",")
    assert cells[0] == "imf"
    assert cells[6] == "0.9953"
    assert cells[7] == "0.123457"  # six significant digits
    assert cells[8] == "1"
    assert cells[11] == ""  # None flip_rate renders empty
    assert cells[15] == "true"


def test_json_matches_csv_numerically():
    report = _report([_sample_row(), _sample_row(search_space=40000, accuracy=1.0)])
    doc = json.loads(report_to_json_bytes(report))
    rows = list(csv.DictReader(io.StringIO(report_to_csv_bytes(report).decode())))
    assert len(doc["rows"]) == len(rows) == 2
    for jrow, crow in zip(doc["rows"], rows):
        for key, jval in jrow.items():
            cval = crow[key]
            if jval is None:
                assert cval == ""
            elif isinstance(jval, float):
                assert float(cval) == jval
            else:
                assert str(jval) == cval
    assert doc["operational_capacity"] is None
    assert doc["config"]["variant_kind"] == "brn"
    assert doc["config"]["search_space_sizes"] == [16]


def test_serialization_is_deterministic():
    report = _report([_sample_row()])
    assert report_to_csv_bytes(report) == report_to_csv_bytes(report)
    assert report_to_json_bytes(report) == report_to_json_bytes(report)


def test_emit_to_file_and_stdout(tmp_path, capsysbinary):
    report = _report([_sample_row()])
    out = tmp_path / "report.csv"
    emit_report(report, "csv", out)
    assert out.read_bytes() == report_to_csv_bytes(report)
    # no stray temp files once the rename lands
    assert [p.name for p in tmp_path.iterdir()] == ["report.csv"]
    emit_report(report, "json", "-")
    assert capsysbinary.readouterr().out == report_to_json_bytes(report)


def test_emit_overwrites_atomically(tmp_path):
    out = tmp_path / "report.csv"
    out.write_text("stale\n")
    emit_report(_report(), "csv", out)
    assert out.read_text() == EXPECTED_HEADER + "\n"


def test_emit_rejects_bad_format(tmp_path):
    with pytest.raises(ValueError):
        emit_report(_report(), "yaml", tmp_path / "x")


def test_emit_propagates_io_errors(tmp_path):
    with pytest.raises(OSError):
        emit_report(_report(), "csv", tmp_path / "no_such_dir" / "x.csv")


def test_round_trip_from_real_sweep():
    # convergence threshold below the converged-attention plateau that the
    # codebook asymmetry imposes (about 1 - 2 * flip_rate at F=2)
    cfg = SweepConfig(
        F=2, variant_kind="acf", search_space_sizes=(16,), D=128,
        flip_rate=0.05, trials_per_size=5, convergence_threshold=0.55,
    )
    report = run_sweep(cfg)
    doc = json.loads(report_to_json_bytes(report))
    (crow,) = csv.DictReader(io.StringIO(report_to_csv_bytes(report).decode()))
    assert doc["rows"][0]["flip_rate"] == float(crow["flip_rate"]) == 0.05
    assert crow["sigma"] == ""
    assert doc["rows"][0]["sigma"] is None
    assert doc["operational_capacity"] == report.operational_capacity == 16
