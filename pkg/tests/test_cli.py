import json
from pathlib import Path

import numpy as np
import pytest

from defphase.cli import main
from defphase.config import load_config, validate_config
from defphase.errors import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write_cfg(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


class TestConfigValidation:
    def test_unknown_top_level_key(self, tmp_path):
        p = write_cfg(tmp_path, {"scenario": "uniform_fall", "massses": [1.0]})
        with pytest.raises(ConfigError) as err:
            load_config(p)
        assert "massses" in str(err.value)

    def test_unknown_nested_key(self, tmp_path):
        p = write_cfg(
            tmp_path,
            {"scenario": "uniform_fall", "integrator": {"method": "rk4", "dtt": 0.1}},
        )
        with pytest.raises(ConfigError) as err:
            load_config(p)
        assert "$.integrator.dtt" in str(err.value)

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError):
            validate_config({"scenario": "warp_drive"})

    def test_unknown_constant(self):
        with pytest.raises(ConfigError):
            validate_config({"scenario": "uniform_fall", "constants": {"tau": 1.0}})

    def test_shipped_configs_validate(self):
        for path in CONFIGS.glob("*.json"):
            load_config(path)


class TestCliExitCodes:
    def test_missing_config_is_config_error(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "nope.json")]) == 2

    def test_scenario_command_mismatch(self, tmp_path):
        p = write_cfg(tmp_path, {"scenario": "llr_bounds"})
        assert main(["simulate", "--config", str(p), "--out", str(tmp_path)]) == 2

    def test_numerical_failure_exit(self, tmp_path):
        cfg = {
            "scenario": "point_orbit",
            "algebra": {"family": "ordinary", "dim": 2},
            "mass": 1.0,
            "initial": {"x": [1e-12, 0.0], "v": [0.0, 0.0]},
            "field": {"kind": "point", "GM": 1.0},
            "t_end": 0.1,
        }
        p = write_cfg(tmp_path, cfg)
        assert main(["simulate", "--config", str(p), "--out", str(tmp_path),
                     "--no-plots"]) == 3

    def test_gate_failure_exit(self, tmp_path):
        cfg = json.loads((CONFIGS / "wep_sweep_canonical.json").read_text())
        del cfg["scaling"]  # fixed parameters violate the principle
        cfg["gate"] = [{"field": "divergence", "op": "le", "value": 1e-8}]
        cfg["masses"] = [1.0, 1000.0]
        p = write_cfg(tmp_path, cfg)
        assert main(["wep-sweep", "--config", str(p), "--out", str(tmp_path),
                     "--gate", "--no-plots"]) == 4

    def test_gate_pass_exit(self, tmp_path):
        p = CONFIGS / "wep_sweep_canonical.json"
        assert main(["wep-sweep", "--config", str(p), "--out", str(tmp_path),
                     "--gate", "--no-plots"]) == 0


class TestListFlags:
    def test_list_algebras(self, capsys):
        assert main(["--list-algebras"]) == 0
        out = capsys.readouterr().out
        assert "canonical_nc_2d" in out
        assert "lie_miao_2" in out

    def test_list_deformations(self, capsys):
        assert main(["--list-deformation-functions"]) == 0
        out = capsys.readouterr().out
        assert "1d: kempf_quadratic" in out
        assert "3d: isotropic_sqrt" in out


class TestSimulate:
    def test_smoke_outputs(self, tmp_path):
        rc = main(
            ["simulate", "--config", str(CONFIGS / "uniform_fall_nc2d.json"),
             "--out", str(tmp_path), "--format", "csv"]
        )
        assert rc == 0
        assert (tmp_path / "fall_nc2d_trajectory.csv").exists()
        assert (tmp_path / "fall_nc2d_trajectory.png").exists()
        assert (tmp_path / "fall_nc2d_manifest.json").exists()
        manifest = json.loads((tmp_path / "fall_nc2d_manifest.json").read_text())
        assert manifest["config_sha256"]
        assert manifest["constants"]["G"]

    def test_deterministic_json(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            rc = main(
                ["simulate", "--config", str(CONFIGS / "uniform_fall_nc2d.json"),
                 "--out", str(out), "--no-plots"]
            )
            assert rc == 0
        for name in ("fall_nc2d.json", "fall_nc2d_manifest.json", "fall_nc2d_trajectory.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestReports:
    def test_eotvos_value(self, tmp_path):
        rc = main(["eotvos", "--config", str(CONFIGS / "gup_eotvos_planck.json"),
                   "--out", str(tmp_path), "--no-plots"])
        assert rc == 0
        rep = json.loads((tmp_path / "gup_eotvos.json").read_text())
        assert rep["delta_a_over_a"] == pytest.approx(0.1, rel=0.01)

    def test_bounds_values(self, tmp_path):
        rc = main(["bounds", "--config", str(CONFIGS / "llr_bounds.json"),
                   "--out", str(tmp_path), "--no-plots"])
        assert rc == 0
        rep = json.loads((tmp_path / "llr_bounds.json").read_text())
        assert rep["bound_alpha_diff"] == pytest.approx(1.99e-20, rel=0.01)
        assert rep["bound_gamma_diff"] == pytest.approx(5.02e-7, rel=0.01)
        csv_text = (tmp_path / "llr_bounds_summary.csv").read_text()
        assert csv_text.startswith("accuracy,")

    def test_jacobi_suite(self, tmp_path):
        rc = main(["jacobi", "--config", str(CONFIGS / "jacobi_suite.json"),
                   "--out", str(tmp_path), "--no-plots"])
        assert rc == 0
        rep = json.loads((tmp_path / "jacobi.json").read_text())
        assert all(rep["passes"].values())
        assert rep["corrupted_flagged"]

    def test_soccer_ball(self, tmp_path):
        rc = main(["composite", "--config", str(CONFIGS / "soccer_ball.json"),
                   "--out", str(tmp_path), "--no-plots"])
        assert rc == 0
        rep = json.loads((tmp_path / "soccer_fixed.json").read_text())
        assert rep["first_slope"] == pytest.approx(2.0, abs=1e-6)
        assert rep["second_slope"] == pytest.approx(3.0, abs=1e-6)

    def test_sem_eotvos(self, tmp_path):
        rc = main(["eotvos", "--config", str(CONFIGS / "sem_eotvos.json"),
                   "--out", str(tmp_path), "--no-plots"])
        assert rc == 0
        rep = json.loads((tmp_path / "sem_eotvos.json").read_text())
        assert rep["components"]["eta"] == pytest.approx(5.02e-14, rel=0.05)

    def test_big_numbers_written_as_strings(self, tmp_path):
        rc = main(["eotvos", "--config", str(CONFIGS / "sem_eotvos.json"),
                   "--out", str(tmp_path), "--no-plots"])
        assert rc == 0
        manifest = json.loads((tmp_path / "sem_eotvos_manifest.json").read_text())
        assert isinstance(manifest["constants"]["m_sun"], str)
        assert float(manifest["constants"]["m_sun"]) == pytest.approx(1.98892e30)

    def test_figures_rendered_by_default(self, tmp_path):
        rc = main(["composite", "--config", str(CONFIGS / "soccer_ball.json"),
                   "--out", str(tmp_path)])
        assert rc == 0
        assert (tmp_path / "soccer_fixed.png").exists()
