import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from shuffledp import channel_to_json, parse_csv, rr_channel, validate_channel
from shuffledp.cli import (
    DEFAULT_EPS_SPEC,
    channel_fingerprint,
    main,
    parse_eps_grid,
    svg_line_chart,
)

LN3 = math.log(3.0)


@pytest.fixture
def rr3_file(tmp_path):
    path = tmp_path / "rr3.json"
    path.write_text(channel_to_json(rr_channel(LN3)))
    return str(path)


# ---------------------------------------------------------------------------
# epsilon grid parsing


def test_parse_eps_grid_log_default():
    grid = parse_eps_grid(DEFAULT_EPS_SPEC)
    assert grid.size == 64
    assert grid[0] == pytest.approx(1e-3) and grid[-1] == pytest.approx(10.0)
    assert np.all(np.diff(grid) > 0)


def test_parse_eps_grid_lin_and_list():
    assert parse_eps_grid("lin:0:1:5") == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    assert parse_eps_grid("2,0.5,1") == pytest.approx([0.5, 1.0, 2.0])  # sorted
    assert parse_eps_grid("0") == pytest.approx([0.0])


@pytest.mark.parametrize(
    "spec", ["log:0:1:5", "log:1:2", "log:1:2:0", "lin:-1:1:3", "", "a,b", "1,-2"]
)
def test_parse_eps_grid_rejects(spec):
    from shuffledp import ValidationError

    with pytest.raises(ValidationError):
        parse_eps_grid(spec)


# ---------------------------------------------------------------------------
# curve


def test_curve_anchor_rows(rr3_file, capsys):
    assert main(["curve", "--channel", rr3_file, "--n", "2", "--k", "0", "--eps", "0"]) == 0
    out = capsys.readouterr().out
    assert "0,0.375" in out.splitlines()
    assert main(
        ["curve", "--channel", rr3_file, "--n", "2", "--eps", "1.0986122886681098"]
    ) == 0
    out = capsys.readouterr().out
    assert out.strip().endswith(",0")


def test_curve_exact_vs_binomial_payload(rr3_file, tmp_path):
    for engine, name in (("exact", "a.csv"), ("binomial", "b.csv")):
        assert main(
            [
                "curve", "--channel", rr3_file, "--n", "15", "--eps", "log:0.01:2:33",
                "--engine", engine, "--out", str(tmp_path / name),
            ]
        ) == 0
    _, a = parse_csv((tmp_path / "a.csv").read_text())
    _, b = parse_csv((tmp_path / "b.csv").read_text())
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_curve_gdp_reports_mu(rr3_file, capsys):
    assert main(
        ["curve", "--channel", rr3_file, "--n", "100", "--engine", "gdp", "--eps", "0.1,1"]
    ) == 0
    out = capsys.readouterr().out
    assert "# gdp-mu: 0.11547005383792515" in out
    assert "# gdp-source: canonical" in out


def test_curve_manifest_and_round_trip(rr3_file, capsys):
    assert main(["curve", "--channel", rr3_file, "--n", "4", "--eps", "lin:0:1:7"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# shuffledp-version:")
    assert f"# channel-sha256: {channel_fingerprint(rr_channel(LN3))}" in out
    assert "timestamp" not in out  # stamps are opt-in
    cols, vals = parse_csv(out)
    assert cols == ["epsilon", "delta"]
    assert vals.shape == (7, 2)


def test_curve_json_format_matches_csv(rr3_file, tmp_path):
    args = ["curve", "--channel", rr3_file, "--n", "6", "--eps", "log:0.05:1:9"]
    assert main(args + ["--out", str(tmp_path / "c.csv")]) == 0
    assert main(args + ["--format", "json", "--out", str(tmp_path / "c.json")]) == 0
    _, vals = parse_csv((tmp_path / "c.csv").read_text())
    payload = json.loads((tmp_path / "c.json").read_text())
    np.testing.assert_array_equal(vals[:, 0], payload["epsilon"])
    np.testing.assert_array_equal(vals[:, 1], payload["delta"])
    assert payload["manifest"]["command"] == "curve"


def test_curve_svg(rr3_file, tmp_path):
    svg = tmp_path / "curve.svg"
    assert main(
        ["curve", "--channel", rr3_file, "--n", "5", "--eps", "log:0.01:1:16",
         "--svg", str(svg)]
    ) == 0
    root = ET.fromstring(svg.read_text())
    assert root.tag.endswith("svg")
    assert any(child.tag.endswith("polyline") for child in root)


def test_curve_engine_restrictions(rr3_file, capsys):
    assert main(
        ["curve", "--channel", rr3_file, "--n", "5", "--engine", "binomial",
         "--sidedness", "reverse"]
    ) == 2
    assert main(
        ["curve", "--channel", rr3_file, "--n", "5", "--k", "1", "--engine", "chernoff"]
    ) == 2
    assert "error:" in capsys.readouterr().err


def test_exit_codes(rr3_file, tmp_path, capsys):
    assert main(["curve", "--channel", str(tmp_path / "missing.json"), "--n", "2"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 2, "W0": [0.9, 0.2], "W1": [0.5, 0.5]}')
    assert main(["curve", "--channel", str(bad), "--n", "2"]) == 2
    assert main(["curve", "--channel", rr3_file, "--n", "200", "--cap", "10"]) == 3
    capsys.readouterr()


# ---------------------------------------------------------------------------
# report


def test_report_contents(rr3_file, capsys):
    assert main(
        ["report", "--channel", rr3_file, "--n", "100", "--pi", "0.5", "--m", "2"]
    ) == 0
    out = capsys.readouterr().out
    payload = json.loads(out)
    assert payload["fisher"]["I_pi"] == pytest.approx(4 / 3, rel=1e-12)
    assert payload["gdp"]["mu_unbundled"] == pytest.approx(0.1632993161855452, rel=1e-12)
    assert payload["multimessage"]["ratio"] == pytest.approx(5 / 3, rel=1e-12)
    # the documented decimal renderings appear verbatim in the JSON text
    assert "1.333333" in out and "0.163299" in out and "1.666666" in out
    assert payload["rr_boundary"]["regime"] == "sub-critical"


def test_report_jsd_block(rr3_file, capsys):
    assert main(["report", "--channel", rr3_file, "--n", "10", "--k", "0"]) == 0
    payload = json.loads(capsys.readouterr().out)
    block = payload["jsd_canonical"]
    assert block["asymptotic"] == pytest.approx(0.0175, abs=1e-12)
    assert block["exact"] is not None and block["residual"] is not None


def test_report_perfect_privacy_note(tmp_path, capsys):
    path = tmp_path / "flat.json"
    path.write_text(channel_to_json(rr_channel(0.0)))
    assert main(["report", "--channel", str(path), "--n", "5"]) == 0
    assert "perfect privacy: v = 0" in capsys.readouterr().out


def test_report_non_rr_channel_has_no_boundary_block(tmp_path, capsys):
    path = tmp_path / "tri.json"
    path.write_text(channel_to_json(validate_channel([0.2, 0.3, 0.5], [0.5, 0.3, 0.2])))
    assert main(["report", "--channel", str(path), "--n", "20"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "rr_boundary" not in payload
    assert payload["fisher"] is not None


def test_report_rejects_both_k_and_pi(rr3_file, capsys):
    assert main(
        ["report", "--channel", rr3_file, "--n", "10", "--k", "1", "--pi", "0.5"]
    ) == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# simulate


def test_simulate_deterministic_across_workers(rr3_file, tmp_path):
    out1, out4 = str(tmp_path / "w1.csv"), str(tmp_path / "w4.csv")
    base = ["simulate", "--channel", rr3_file, "--n", "30", "--seed", "3",
            "--reps", "4000"]
    assert main(base + ["--workers", "1", "--out", out1]) == 0
    assert main(base + ["--workers", "4", "--out", out4]) == 0
    b1 = open(out1, "rb").read()
    assert b1 == open(out4, "rb").read()
    assert b"workers" not in b1  # concurrency must not mark the artifact


def test_simulate_summary_and_samples(rr3_file, tmp_path, capsys):
    out = str(tmp_path / "s.csv")
    assert main(
        ["simulate", "--channel", rr3_file, "--n", "50", "--reps", "20000",
         "--workers", "2", "--out", out]
    ) == 0
    summary = json.loads(capsys.readouterr().out)
    assert abs(summary["mean_exp_lambda"] - 1.0) <= 4 * summary["se_exp_lambda"]
    assert summary["kolmogorov_to_gaussian"] > 0
    cols, vals = parse_csv(open(out).read())
    assert cols == ["lambda"]
    assert vals.shape == (20000, 1)


def test_simulate_zero_reps(rr3_file, capsys):
    assert main(["simulate", "--channel", rr3_file, "--n", "10", "--reps", "0"]) == 0
    out = capsys.readouterr().out
    assert out.rstrip().endswith("lambda")
    assert "summary" not in out


def test_simulate_stamp_adds_metadata(rr3_file, tmp_path):
    out = str(tmp_path / "stamped.csv")
    assert main(
        ["simulate", "--channel", rr3_file, "--n", "10", "--reps", "5",
         "--workers", "2", "--out", out, "--stamp"]
    ) == 0
    text = open(out).read()
    assert "# workers: 2" in text
    assert "# timestamp: " in text


def test_simulate_requires_full_channel(tmp_path, capsys):
    path = tmp_path / "ns.json"
    path.write_text(channel_to_json(validate_channel([0.5, 0.5], [0.0, 1.0])))
    assert main(["simulate", "--channel", str(path), "--n", "5", "--reps", "10"]) == 2
    capsys.readouterr()


def test_simulate_json_format(rr3_file, capsys):
    assert main(
        ["simulate", "--channel", rr3_file, "--n", "8", "--reps", "50",
         "--format", "json"]
    ) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["lambda"]) == 50
    assert payload["summary"]["reps"] == 50


# ---------------------------------------------------------------------------
# svg helper


def test_svg_handles_log_axes_and_zeros():
    chart = svg_line_chart([0.0, 0.1, 1.0], [0.5, 0.2, 0.0], log_x=True, log_y=True)
    root = ET.fromstring(chart)
    assert root.tag.endswith("svg")  # zero points dropped, chart still valid
