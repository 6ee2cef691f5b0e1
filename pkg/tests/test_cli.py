"""Command-line interface: exit codes, formats, config merge, determinism."""

import json

import pytest

from bertrand.cli import run


def call(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_success_returns_zero(self, capsys):
        code, out, err = call(capsys, ["curvature", "--preset", "darboux_iii",
                                       "--r", "0.5:2.5:3"])
        assert code == 0
        assert err == ""
        header = out.splitlines()[0]
        assert header == ("r,f,f_prime,f_double_prime,scalar_curvature,"
                          "green_u,time_coefficient")
        assert len(out.splitlines()) == 4

    def test_unknown_preset_is_a_validation_error(self, capsys):
        code, out, err = call(capsys, ["curvature", "--preset", "nonesuch",
                                       "--r", "1"])
        assert code == 1
        record = json.loads(err)
        assert record["error"] == "UnknownPresetError"
        assert "nonesuch" in record["message"]

    def test_out_of_window_radius_is_a_validation_error(self, capsys):
        code, out, err = call(capsys, ["curvature", "--preset", "darboux_iii",
                                       "--r", "0.1:5:4"])
        assert code == 1
        assert json.loads(err)["error"] == "DomainViolationError"
        assert out == ""

    def test_unbound_orbit_is_a_numerical_error(self, capsys):
        code, out, err = call(capsys, ["apsidal", "--preset", "euclidean_kc",
                                       "--energy", "0.5", "--l2", "1.0"])
        assert code == 2
        assert json.loads(err)["error"] == "NoBoundedOrbitError"


class TestOutputHandling:
    def test_json_format(self, capsys):
        code, out, err = call(capsys, ["catalog", "--format", "json"])
        assert code == 0
        data = json.loads(out)
        assert data["command"] == "catalog"
        assert "rows" in data and "columns" in data
        names = [row[data["columns"].index("name")] for row in data["rows"]]
        assert "darboux_iii" in names

    def test_output_file(self, capsys, tmp_path):
        target = tmp_path / "curv.csv"
        code, out, err = call(capsys, ["curvature", "--preset", "euclidean_kc",
                                       "--r", "1:2:2", "--output", str(target)])
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("r,f,")

    def test_config_file_supplies_defaults(self, capsys, tmp_path):
        config = tmp_path / "conf.json"
        config.write_text(json.dumps({"format": "json"}))
        code, out, err = call(capsys, ["catalog", "--config", str(config)])
        assert code == 0
        json.loads(out)

    def test_flag_overrides_config(self, capsys, tmp_path):
        config = tmp_path / "conf.json"
        config.write_text(json.dumps({"format": "json"}))
        code, out, err = call(capsys, ["catalog", "--config", str(config),
                                       "--format", "csv"])
        assert code == 0
        with pytest.raises(json.JSONDecodeError):
            json.loads(out)
        assert out.startswith("name,")


class TestDeterminism:
    def test_duality_sweep_repeats_byte_identically(self, capsys):
        argv = ["duality", "--preset", "darboux_iii", "--samples", "200",
                "--seed", "5", "--format", "json"]
        code_a, out_a, _ = call(capsys, argv)
        code_b, out_b, _ = call(capsys, argv)
        assert code_a == code_b == 0
        assert out_a == out_b
        data = json.loads(out_a)
        residual_col = data["columns"].index("max_rel_residual")
        assert all(row[residual_col] < 1e-11 for row in data["rows"])


class TestCommandSurface:
    def test_spectrum_reports_levels(self, capsys):
        code, out, err = call(capsys, [
            "spectrum", "--preset", "euclidean_oscillator",
            "--r-start", "1e-6", "--r-end", "7", "--nodes", "400",
            "--spacing", "uniform", "--l", "0", "--k", "2",
            "--scheme", "direct", "--format", "json"])
        assert code == 0
        data = json.loads(out)
        table = data["schemes"]["direct"]
        assert table["columns"] == ["l", "n", "energy"]
        assert table["rows"][0][2] == pytest.approx(1.5, abs=2e-3)
        assert table["rows"][1][2] == pytest.approx(3.5, abs=2e-3)

    def test_orbit_samples_conserve_energy(self, capsys):
        code, out, err = call(capsys, [
            "orbit", "--preset", "euclidean_kc", "--energy", "-0.375",
            "--l2", "1.0", "--t-final", "20", "--samples", "50"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0].split(",")[:4] == ["t", "q0", "q1", "q2"]
        drift_col = lines[0].split(",").index("energy_drift")
        assert all(abs(float(line.split(",")[drift_col])) < 1e-8
                   for line in lines[1:])

    def test_degeneracy_lists_cross_l_clusters(self, capsys):
        code, out, err = call(capsys, [
            "degeneracy", "--preset", "euclidean_oscillator",
            "--r-start", "1e-6", "--r-end", "7", "--nodes", "400",
            "--spacing", "uniform", "--l", "0:2", "--k", "2",
            "--scheme", "direct", "--tol", "1e-3"])
        assert code == 0
        lines = out.splitlines()
        cols = lines[0].split(",")
        assert cols[:4] == ["scheme", "cluster", "energy", "spread"]
        mult_col = cols.index("multiplicity")
        assert any(int(line.split(",")[mult_col]) >= 2 for line in lines[1:])
