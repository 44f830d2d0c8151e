"""
Tests for the command-line surface and its exit-code contract
"""

import json
from fractions import Fraction

import pytest

from main import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main
from utils import certificates
from utils.band import load_band_file
from utils.certificates import verify_xy_bounds
from utils.reports import SCHEMA, Report


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestUsage:

    def test_no_command(self, capsys):
        assert main([]) == EXIT_USAGE

    @pytest.mark.parametrize("argv", [
        ["verify"],
        ["omega", "draw"],
        ["omega", "contains", "--b", "one"],
        ["example", "--a", "1/0"],
        ["band"],
        ["band", "x.json", "--tol", "tight"],
        ["verify", "all", "--digits", "many"],
        ["omega", "contains", "--b", "1/0", "--t", "0"],
        ["omega", "plot", "--grid", "8.5"],
        ["example", "--c", "c"],
        ["--bogus"],
    ])
    def test_malformed_arguments(self, capsys, argv):
        assert main(argv) == EXIT_USAGE

    @pytest.mark.parametrize("argv", [
        ["omega", "contains", "--b", "0", "--t", "0", "--eps", "-1"],
        ["omega", "plot", "--grid", "4"],
        ["example", "--b", "-1/2"],
    ])
    def test_rejected_values(self, capsys, argv):
        code, _, err = run(capsys, *argv)
        assert code == EXIT_USAGE
        assert "error:" in err

    def test_help_exits_clean(self, capsys):
        assert main(["--help"]) == EXIT_PASS

    def test_unknown_certificate(self, capsys):
        code, _, err = run(capsys, "verify", "bogus")
        assert code == EXIT_USAGE
        assert "bogus" in err

    def test_contains_needs_both_slopes(self, capsys):
        code, _, err = run(capsys, "omega", "contains", "--b", "0.2")
        assert code == EXIT_USAGE
        assert "--t" in err

    def test_bad_precision_env(self, capsys, monkeypatch):
        monkeypatch.setenv("MOEBIUS_PRECISION_BITS", "lots")
        code, _, err = run(capsys, "omega", "contains", "--b", "0.2", "--t", "-0.4")
        assert code == EXIT_USAGE
        assert "MOEBIUS_PRECISION_BITS" in err


class TestOmega:

    def test_contains(self, capsys):
        code, out, _ = run(capsys, "omega", "contains", "--b", "0.2", "--t", "-0.4")
        assert code == EXIT_PASS
        assert out.strip() == "Ω: true, Ω̂: true"

    def test_enlarged_region_holds_the_vertex(self, capsys):
        code, out, _ = run(capsys, "omega", "contains", "--b", "0", "--t", "-0.57735026919", "--eps", "0.001")
        assert code == EXIT_PASS
        assert out.startswith("Ω: true")

    def test_contains_json(self, capsys):
        code, out, _ = run(capsys, "omega", "contains", "--b", "0.2", "--t", "-0.4", "--json")
        data = json.loads(out)
        assert data["schema"] == SCHEMA
        assert data["results"] == {"omega": True, "omegahat": True}
        assert data["inputs"]["b"] == "1/5"

    def test_plot(self, capsys, tmp_path):
        out_path = tmp_path / "omega.svg"
        code, out, _ = run(capsys, "omega", "plot", "--grid", "32", "--out", str(out_path))
        assert code == EXIT_PASS
        text = out_path.read_text()
        assert "<svg" in text
        assert "vertex (0, -0.57735)" in text


class TestBand:

    def test_fixture(self, capsys, fixtures_dir, tmp_path):
        plot = tmp_path / "ridge.svg"
        code, out, _ = run(capsys, "band", str(fixtures_dir / "triangular_band.json"), "--plot", str(plot), "--json")
        assert code == EXIT_PASS
        data = json.loads(out)
        assert data["passed"]
        assert data["results"]["normalization"]["b"] == pytest.approx(0.0, abs=1e-9)
        assert data["results"]["normalization"]["t"] == pytest.approx(-0.5773502691896258, abs=1e-9)
        assert plot.exists()

    def test_text_report(self, capsys, fixtures_dir):
        code, out, _ = run(capsys, "band", str(fixtures_dir / "triangular_band.json"))
        assert code == EXIT_PASS
        assert "[FAIL]" not in out
        assert "max pitch backtrack" in out

    def test_truncated_file(self, capsys, fixtures_dir, tmp_path):
        text = (fixtures_dir / "triangular_band.json").read_text()
        path = tmp_path / "broken.json"
        path.write_text(text[:100])
        code, _, err = run(capsys, "band", str(path))
        assert code == EXIT_USAGE
        assert "not valid JSON" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "band", str(tmp_path / "absent.json"))
        assert code == EXIT_USAGE

    @pytest.mark.parametrize("key, value", [
        ("creases", 5),
        ("apexes", 5),
        ("apexes", [1, 2, 3, 4]),
        ("bends", {"left": 0}),
        ("lambda", None),
        ("format", "mesh"),
    ])
    def test_malformed_band_exits_with_usage(self, capsys, tmp_path, triangle_data, key, value):
        triangle_data[key] = value
        path = tmp_path / "malformed.json"
        path.write_text(json.dumps(triangle_data))
        code, _, err = run(capsys, "band", str(path))
        assert code == EXIT_USAGE
        assert "error:" in err

    @pytest.mark.parametrize("text", ["[]", "5", "\"band\"", "{}", "null"])
    def test_non_object_documents(self, capsys, tmp_path, text):
        path = tmp_path / "odd.json"
        path.write_text(text)
        code, _, _ = run(capsys, "band", str(path))
        assert code == EXIT_USAGE

    def test_open_band_rejected(self, capsys, tmp_path, triangle_data):
        triangle_data["creases"][0] = "3.1"
        path = tmp_path / "open.json"
        path.write_text(json.dumps(triangle_data))
        code, _, err = run(capsys, "band", str(path))
        assert code == EXIT_USAGE
        assert "close" in err.lower()


class TestVerify:

    def test_negative_control_fails(self, capsys, monkeypatch):
        monkeypatch.setitem(certificates.CERTIFICATES, "xy", lambda: verify_xy_bounds(Fraction(1, 40)))
        code, out, _ = run(capsys, "verify", "xy")
        assert code == EXIT_FAIL
        assert "[FAIL] xy" in out

    @pytest.mark.slow
    def test_all_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "all")
        assert code == EXIT_PASS
        assert out.count("[PASS]") == 5

    @pytest.mark.slow
    def test_slope_json_round_trip(self, capsys):
        code, out, _ = run(capsys, "verify", "slope", "--json", "--sequential")
        assert code == EXIT_PASS
        data = json.loads(out)
        report = Report.from_dict(data)
        assert report.to_dict(include_timing=False) == {k: v for k, v in data.items() if k != "wall_time"}
        assert "slope" in data["results"]["timings"]


@pytest.mark.slow
class TestExample:

    def test_reference_digits(self, capsys, sim_data):
        code, out, _ = run(capsys, "example", "--digits", "32")
        assert code == EXIT_PASS
        assert f"d = {sim_data['d'][:32]}" in out
        assert "lambda - sqrt3 = -0.0017" in out

    def test_writes_band_file(self, capsys, tmp_path):
        path = tmp_path / "sim.json"
        code, _, _ = run(capsys, "example", "--out", str(path))
        assert code == EXIT_PASS
        band = load_band_file(path)
        assert band.n_facets == 8
        assert json.loads(path.read_text())["format"] == "explicit"

    def test_zero_a(self, capsys):
        code, _, _ = run(capsys, "example", "--a", "0")
        assert code == EXIT_USAGE
