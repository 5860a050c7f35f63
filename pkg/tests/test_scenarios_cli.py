"""Configuration parsing, model building, and the command-line surface."""

import json
import math
import os

import numpy as np
import pytest

from discordnm import (ConfigError, CustomHamiltonianModel, DephasingModel,
                       JaynesCummingsModel)
from discordnm.cli import (EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, _format_cell,
                           _write_atomic, main)
from discordnm.scenarios import (build_model, build_scenario, load_preset,
                                 parse_config_text, parse_matrix, PRESET_NAMES)


class TestParseConfigText:
    def test_comments_and_blanks_ignored(self):
        text = "# header\n\nmodel = dephasing\ngrid.dt = 0.1  # inline\n"
        assert parse_config_text(text) == {"model": "dephasing", "grid.dt": "0.1"}

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("grid.dt = 1\ngrid.dt = 2\n")

    def test_line_without_equals_rejected(self):
        with pytest.raises(ConfigError, match="key = value"):
            parse_config_text("just some words\n")


class TestPresets:
    def test_known_names(self):
        for name in ("example1", "example2", "hadamard-demo"):
            assert "model" in load_preset(name)
        assert set(PRESET_NAMES) >= {"example1", "example2", "hadamard-demo",
                                     "jaynes-cummings", "dephasing"}

    def test_aliases_resolve(self):
        assert load_preset("jaynes-cummings") == load_preset("example1")
        assert load_preset("dephasing") == load_preset("example2")

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="available"):
            load_preset("nope")


class TestBuildScenario:
    def test_defaults_and_types(self):
        cfg = build_scenario(load_preset("example1"))
        assert cfg.model == "jaynes-cummings"
        assert cfg.t_end == 10.0 and cfg.dt == 0.01
        assert cfg.jc_alpha == 5.0 + 0.0j
        assert cfg.jc_truncation_guard is True
        assert cfg.log_base == 2.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown configuration keys"):
            build_scenario({"model": "dephasing", "grid.step": "0.1"})

    def test_overrides_win(self):
        cfg = build_scenario(load_preset("example1"),
                             {"dt": 0.5, "log_base_name": "e", "plots": False})
        assert cfg.dt == 0.5
        assert cfg.log_base == pytest.approx(math.e)
        assert cfg.plots is False

    def test_bad_number_message_names_the_key(self):
        with pytest.raises(ConfigError, match="grid.dt"):
            build_scenario({"model": "dephasing", "grid.dt": "fast"})

    @pytest.mark.parametrize("mapping, fragment", [
        ({"model": "dephasing", "grid.dt": "-1"}, "positive"),
        ({"model": "dephasing", "grid.t_end": "0.01", "grid.dt": "0.05"}, "at least"),
        ({"model": "dephasing", "grid.tau": "99"}, "tau"),
        ({"model": "jaynes-cummings", "jc.epsilon": "1.5"}, "epsilon"),
        ({"model": "jaynes-cummings", "jc.n_max": "0"}, "n_max"),
        ({"model": "dephasing", "dephasing.p0": "-0.2"}, "p0"),
        ({"model": "dephasing", "thresholds.detection": "0"}, "detection"),
        ({"model": "dephasing", "sweep.couplings": "1,2"}, "sweep"),
        ({"model": "custom"}, "custom"),
        ({"model": "warp-drive"}, "unknown model"),
        ({"model": "dephasing", "entropy.log_base": "10"}, "log_base"),
        ({"model": "dephasing", "record.discord": "maybe"}, "boolean"),
    ])
    def test_validation_failures(self, mapping, fragment):
        with pytest.raises(ConfigError, match=fragment):
            build_scenario(mapping)

    def test_sweep_parsing(self):
        cfg = build_scenario({"model": "jaynes-cummings",
                              "sweep.couplings": "0.5, 1.0, 2"})
        assert cfg.sweep_couplings == (0.5, 1.0, 2.0)

    def test_describe_echoes_model_settings(self):
        cfg = build_scenario(load_preset("example1"))
        desc = cfg.describe()
        assert desc["model"] == "jaynes-cummings"
        assert desc["tau"] == 10.0
        assert desc["jaynes_cummings"]["n_max"] == 80


class TestParseMatrix:
    def test_complex_entries(self):
        m = parse_matrix("k", "0.5, 0.5j; -0.5j, 0.5")
        assert np.allclose(m, np.array([[0.5, 0.5j], [-0.5j, 0.5]]))

    def test_ragged_rejected(self):
        with pytest.raises(ConfigError, match="ragged"):
            parse_matrix("k", "1,2;3")

    def test_garbage_rejected(self):
        with pytest.raises(ConfigError, match="cannot parse"):
            parse_matrix("k", "1,spam")


class TestBuildModel:
    def test_jaynes_cummings(self):
        cfg = build_scenario(load_preset("example1"))
        model = build_model(cfg)
        assert isinstance(model, JaynesCummingsModel)
        assert model.n_max == 80
        assert build_model(cfg, coupling=0.5).coupling == 0.5

    def test_dephasing_named_initial_states(self):
        for name, want in (("plus", 0.5), ("zero", 0.0)):
            cfg = build_scenario({"model": "dephasing",
                                  "dephasing.initial": name})
            model = build_model(cfg)
            assert isinstance(model, DephasingModel)
            assert model.initial_system.data[0, 1].real == pytest.approx(want)

    def test_dephasing_mixed_and_matrix_initial(self):
        cfg = build_scenario({"model": "dephasing",
                              "dephasing.initial": "mixed:0.3"})
        assert np.allclose(build_model(cfg).initial_system.data,
                           np.diag([0.3, 0.7]))
        cfg = build_scenario({"model": "dephasing",
                              "dephasing.initial": "0.5,0.5;0.5,0.5"})
        assert np.allclose(build_model(cfg).initial_system.data,
                           np.full((2, 2), 0.5))

    def test_invalid_initial_state_is_config_error(self):
        cfg = build_scenario({"model": "dephasing",
                              "dephasing.initial": "0.9,0;0,0.9"})
        with pytest.raises(ConfigError, match="trace"):
            build_model(cfg)

    def test_custom_model_from_matrices(self):
        mapping = {
            "model": "custom",
            "custom.h_system": "1,0;0,-1",
            "custom.h_environment": "0,0;0,0",
            "custom.h_interaction": "0,0,0,0;0,0,0,0;0,0,0,0;0,0,0,0",
            "custom.rho_system": "0.5,0;0,0.5",
            "custom.rho_environment": "1,0;0,0",
            "custom.coupling": "0.0",
        }
        model = build_model(build_scenario(mapping))
        assert isinstance(model, CustomHamiltonianModel)
        assert model.coupling == 0.0

    def test_demo_has_no_model_object(self):
        cfg = build_scenario(load_preset("hadamard-demo"))
        assert build_model(cfg) is None


def test_format_cell():
    assert _format_cell(None) == ""
    assert _format_cell(-0.0) == "0"
    assert _format_cell(0.1234567890123456) == "0.123456789012"
    assert _format_cell(1.0) == "1"


def test_write_atomic_leaves_no_tmp(tmp_path):
    target = tmp_path / "x.txt"
    _write_atomic(str(target), "payload\n")
    assert target.read_text() == "payload\n"
    assert list(tmp_path.iterdir()) == [target]


class TestMainExitCodes:
    def test_nothing_to_run(self, capsys):
        assert main([]) == EXIT_CONFIG
        assert "nothing to run" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert main(["--config", "/nonexistent.cfg"]) == EXIT_CONFIG
        assert "cannot read config file" in capsys.readouterr().err

    def test_bad_flag_value(self, tmp_path, capsys):
        rc = main(["--preset", "example2", "--dt", "-1",
                   "--out-dir", str(tmp_path)])
        assert rc == EXIT_CONFIG
        assert "grid.dt" in capsys.readouterr().err

    def test_bad_sweep_string(self, tmp_path, capsys):
        rc = main(["--preset", "example1", "--sweep", "1,spam",
                   "--out-dir", str(tmp_path)])
        assert rc == EXIT_CONFIG

    def test_truncation_failure_is_numerical(self, tmp_path, capsys):
        rc = main(["--preset", "example1", "--n-max", "3", "--t-end", "1",
                   "--out-dir", str(tmp_path), "--no-plots"])
        assert rc == EXIT_NUMERICAL
        assert "numerical failure" in capsys.readouterr().err


class TestMainArtifacts:
    def test_demo_run_writes_series_and_summary(self, tmp_path, capsys):
        out = tmp_path / "demo"
        rc = main(["--preset", "hadamard-demo", "--out-dir", str(out),
                   "--no-plots"])
        assert rc == EXIT_OK
        lines = (out / "series.csv").read_text().splitlines()
        assert lines[0] == "t,S_S,S_A,delta_SA,concurrence_SA,discord_S,witness_comm"
        assert len(lines) == 52  # header + 51 grid points
        summary = json.loads((out / "summary.json").read_text())
        assert summary["verdict"] == "no non-Markovianity witnessed"
        assert summary["series_csv"] == "series.csv"
        assert summary["figures"] == []
        stdout = capsys.readouterr().out
        assert "artifacts in" in stdout

    def test_optional_columns_absent_without_recording(self, tmp_path):
        out = tmp_path / "plain"
        rc = main(["--config", self._write_cfg(tmp_path, record=False),
                   "--out-dir", str(out), "--no-plots"])
        assert rc == EXIT_OK
        header = (out / "series.csv").read_text().splitlines()[0]
        assert header == "t,S_S,S_A,delta_SA,concurrence_SA"

    def test_record_flags_add_columns(self, tmp_path):
        out = tmp_path / "rec"
        rc = main(["--config", self._write_cfg(tmp_path, record=False),
                   "--out-dir", str(out), "--no-plots",
                   "--record-discord", "--record-witness"])
        assert rc == EXIT_OK
        header = (out / "series.csv").read_text().splitlines()[0]
        assert header == "t,S_S,S_A,delta_SA,concurrence_SA,discord_S,witness_comm"

    def test_runs_are_deterministic(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert main(["--preset", "example2", "--t-end", "2", "--dt", "0.25",
                         "--out-dir", str(out), "--no-plots"]) == EXIT_OK
        assert (out1 / "series.csv").read_bytes() == (out2 / "series.csv").read_bytes()

    def test_summary_consistent_with_csv(self, tmp_path):
        out = tmp_path / "cons"
        assert main(["--preset", "example2", "--t-end", "3", "--dt", "0.25",
                     "--out-dir", str(out), "--no-plots"]) == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        arr = np.genfromtxt(out / "series.csv", delimiter=",", names=True)
        d = arr["delta_SA"]
        tilde = np.trapezoid(np.abs(d) + d, arr["t"]) / (2.0 * summary["tau"]) \
            if hasattr(np, "trapezoid") else np.trapz(np.abs(d) + d, arr["t"]) / (2.0 * summary["tau"])
        assert summary["p_nm_tilde"] == pytest.approx(tilde, abs=1e-9)
        disc = arr["discord_S"]
        p_nm = (np.trapezoid(disc, arr["t"]) if hasattr(np, "trapezoid")
                else np.trapz(disc, arr["t"])) / summary["tau"]
        assert summary["p_nm"] == pytest.approx(p_nm, abs=1e-9)

    def test_figures_rendered_by_default(self, tmp_path):
        out = tmp_path / "figs"
        rc = main(["--preset", "example2", "--t-end", "1", "--dt", "0.5",
                   "--out-dir", str(out)])
        assert rc == EXIT_OK
        summary = json.loads((out / "summary.json").read_text())
        assert "witness.png" in summary["figures"]
        assert "discord.png" in summary["figures"]
        for name in summary["figures"]:
            assert (out / name).stat().st_size > 0

    def test_sweep_layout(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        rc = main(["--preset", "example1", "--t-end", "1", "--dt", "0.25",
                   "--sweep", "0.5,1.0", "--out-dir", str(out), "--no-plots"])
        assert rc == EXIT_OK
        summary = json.loads((out / "sweep_summary.json").read_text())
        assert [e["coupling"] for e in summary["sweep"]] == [0.5, 1.0]
        for sub in ("coupling_0.5", "coupling_1"):
            assert (out / sub / "series.csv").exists()
            assert (out / sub / "summary.json").exists()
        stdout = capsys.readouterr().out
        assert "sweep of 2 couplings" in stdout

    def test_sweep_figure(self, tmp_path):
        out = tmp_path / "sweepfig"
        rc = main(["--preset", "example1", "--t-end", "1", "--dt", "0.25",
                   "--sweep", "0.5,1.0", "--out-dir", str(out)])
        assert rc == EXIT_OK
        assert (out / "sweep.png").stat().st_size > 0

    def test_log_base_flag_changes_integral(self, tmp_path):
        outs = {}
        for base in ("2", "e"):
            out = tmp_path / f"base{base}"
            assert main(["--preset", "example1", "--t-end", "1", "--dt", "0.25",
                         "--log-base", base, "--out-dir", str(out),
                         "--no-plots"]) == EXIT_OK
            outs[base] = json.loads((out / "summary.json").read_text())["p_nm_tilde"]
        assert outs["e"] == pytest.approx(outs["2"] * math.log(2.0), rel=1e-9)

    @staticmethod
    def _write_cfg(tmp_path, record: bool) -> str:
        path = tmp_path / "scenario.cfg"
        lines = ["model = dephasing", "grid.t_end = 1.0", "grid.dt = 0.5"]
        if record:
            lines += ["record.discord = true", "record.witness = true"]
        path.write_text("\n".join(lines) + "\n")
        return str(path)
