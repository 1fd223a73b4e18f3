from __future__ import annotations

import json

import numpy as np
import pytest

from dykstra import ConfigError
from dykstra import config as cfgmod
from dykstra.cli import main
from dykstra.runner import OUTPUT_ENV, run
from dykstra.scenarios import BUILTIN, builtin


def _minimal(**extra):
    doc = {
        "version": 1,
        "name": "tiny",
        "family": {
            "sets": [{"type": "halfspace", "a": [1, 0], "beta": 0}, {"type": "ball", "center": [0, 0], "radius": 1}],
            "witness": [0, 0],
        },
        "x0": [2, "1/2"],
        "steps": 50,
    }
    doc.update(extra)
    return doc


class TestConfig:
    def test_minimal_valid(self):
        assert cfgmod.validate(_minimal())["steps"] == 50

    @pytest.mark.parametrize("name", list(BUILTIN))
    def test_builtins_valid(self, name):
        cfgmod.validate(builtin(name))

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError) as ei:
            cfgmod.validate(_minimal(colour="red"))
        assert "colour" in str(ei.value)

    def test_unknown_check_key_has_field(self):
        doc = _minimal(checks=[{"name": "identities", "tolerance": 1e-3}])
        with pytest.raises(ConfigError) as ei:
            cfgmod.validate(doc)
        assert ei.value.field.startswith("checks/0")

    def test_missing_required_check_field(self):
        with pytest.raises(ConfigError, match="eps"):
            cfgmod.validate(_minimal(checks=[{"name": "metastability", "f": "1"}]))

    def test_line_numbers(self):
        text = json.dumps(_minimal(steps=-4), indent=2)
        with pytest.raises(ConfigError) as ei:
            cfgmod.loads(text)
        want = next(i for i, line in enumerate(text.splitlines(), 1) if '"steps"' in line)
        assert ei.value.line == want and ei.value.field == "steps"
        assert f"line {want}" in str(ei.value)

    def test_invalid_json(self):
        with pytest.raises(ConfigError) as ei:
            cfgmod.loads('{\n  "version": 1,\n  oops\n}')
        assert ei.value.line == 3

    def test_bad_family(self):
        doc = _minimal()
        doc["family"]["witness"] = [5, 5]
        with pytest.raises(ConfigError) as ei:
            cfgmod.validate(doc)
        assert ei.value.field == "family"

    def test_x0_dimension(self):
        with pytest.raises(ConfigError) as ei:
            cfgmod.validate(_minimal(x0=[1, 2, 3]))
        assert ei.value.field == "x0"

    def test_wrong_version(self):
        with pytest.raises(ConfigError):
            cfgmod.validate(_minimal(version=2))

    def test_steps_cap(self):
        with pytest.raises(ConfigError):
            cfgmod.validate(_minimal(steps=10**6 + 1))


class TestRun:
    def test_empty_checks(self, tmp_path):
        res = run(_minimal(), out_root=tmp_path)
        assert res.exit_code == 0 and res.report["checks"] == []
        assert sorted(res.files) == ["report", "series", "trace"]

    def test_orthant2(self):
        res = run(builtin("orthant2"), write=False)
        assert res.exit_code == 0
        by = {c["check"]: c for c in res.report["checks"]}
        for name in ("identities", "inner_products", "main_identity", "summability", "q_bound"):
            assert by[name]["status"] == "pass"
        assert by["metastability"]["status"] == "capped"

    def test_halfdisc_final_distance(self):
        res = run(builtin("halfdisc"), write=False)
        final = np.array(res.report["final_iterate"])
        assert np.linalg.norm(final - [1, 0]) <= 1e-4
        limit = next(c for c in res.report["checks"] if c["check"] == "limit")
        assert limit["status"] == "pass"

    def test_every_number_is_labelled(self):
        res = run(builtin("twolines"), write=False)
        for c in res.report["checks"]:
            assert "check" in c
            assert "tolerance" in c or "bound" in c
        for r in res.report["rates"]:
            assert "rate" in r and "params" in r

    def test_rate_errors_do_not_abort(self):
        doc = _minimal(
            rates=[
                {"name": "gamma", "params": {"b": 1, "m": 2, "eps": 2, "Delta": "1"}},
                {"name": "omega", "params": {"b": 1, "m": 2, "eps": 1, "f": "0"}},
                {"name": "psi", "params": {"B": 1, "eps": "1/2", "f": "0"}},
            ]
        )
        res = run(doc, write=False)
        rates = res.report["rates"]
        assert rates[0]["status"] == "error"
        assert rates[1]["capped"] and rates[1]["stage"] == "Phi_eps > exp bound"
        assert rates[2]["value"] == "2"
        assert res.exit_code == 1

    def test_failing_check_sets_exit_code(self):
        doc = _minimal(checks=[{"name": "limit", "target": [5, 5], "tol": 1e-6}])
        assert run(doc, write=False).exit_code == 1

    def test_check_error_entry(self):
        doc = _minimal(checks=[{"name": "finitization", "eps": "1/10", "target": [0, 0]}])
        doc["family"].pop("witness")
        res = run(doc, write=False)
        assert res.report["checks"][0]["status"] == "error"


class TestCli:
    def test_psi(self, capsys):
        assert main(["rates", "psi", "--B", "1", "--eps", "1/2", "--f", "0"]) == 0
        assert capsys.readouterr().out.strip() == "2"

    def test_phi_with_note(self, capsys):
        assert main(["rates", "phi", "--B", "1", "--m", "2", "--eps", "3", "--N", "0"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "3" and out[1].startswith("note:")

    def test_theta_capped(self, capsys):
        assert main(["rates", "theta", "--b", "1", "--m", "2", "--eps", "1", "--modulus", "orthant"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("≥ 10^30 (capped)")
        assert "stage: alpha > Psi value" in out and "expression: Theta(" in out

    def test_theta_value(self, capsys):
        main(["rates", "theta", "--b", "2", "--m", "2", "--eps", "12", "--modulus", "orthant"])
        assert capsys.readouterr().out.strip() == "55"

    def test_json_output(self, capsys):
        main(["rates", "modulus_from_rate", "--b", "1", "--eps", "2", "--rho", "1", "--json"])
        d = json.loads(capsys.readouterr().out)
        assert d["value"] == "1/4" and d["rate"] == "modulus_from_rate"

    def test_semialgebraic_note(self, capsys):
        main(["rates", "modulus_semialgebraic", "--n", "1", "--d", "2", "--c", "1", "--m", "2", "--r", "1", "--eps", "1/2"])
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "1/8" and "conditional on supplied c" in out[1]

    def test_malformed_rational(self, capsys):
        with pytest.raises(SystemExit) as ei:
            main(["rates", "psi", "--B", "1/0", "--eps", "1/2", "--f", "0"])
        assert ei.value.code == 2
        assert "rational" in capsys.readouterr().err

    def test_bad_counterfunction(self, capsys):
        assert main(["rates", "psi", "--B", "1", "--eps", "1/2", "--f", "n-1"]) == 2

    def test_run_report_verify(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv(OUTPUT_ENV, str(tmp_path))
        assert main(["run", "orthant2", "--quiet"]) == 0
        out_dir = tmp_path / "orthant2"
        assert (out_dir / "trace.jsonl").exists()
        assert main(["report", str(out_dir)]) == 0
        assert "scenario orthant2" in capsys.readouterr().out
        assert main(["verify", str(out_dir / "trace.jsonl"), "orthant2"]) == 0
        assert "failed: 0" in capsys.readouterr().out

    def test_run_config_file(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text(json.dumps(_minimal(checks=[{"name": "identities"}])))
        assert main(["run", str(path), "--out", str(tmp_path / "o")]) == 0
        assert "identities" in capsys.readouterr().out

    def test_config_error_exit(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text(json.dumps(_minimal(bogus=1), indent=2))
        assert main(["run", str(path)]) == 2
        assert "config error" in capsys.readouterr().err

    def test_scenarios(self, capsys):
        assert main(["scenarios"]) == 0
        listed = [line.split()[0] for line in capsys.readouterr().out.splitlines()]
        assert listed == list(BUILTIN)
        main(["scenarios", "--dump", "affine3"])
        assert json.loads(capsys.readouterr().out)["name"] == "affine3"

    def test_dumped_scenario_equals_builtin(self, tmp_path, capsys):
        main(["scenarios", "--dump", "twolines"])
        path = tmp_path / "twolines.json"
        path.write_text(capsys.readouterr().out)
        a = run(cfgmod.load(path), out_root=tmp_path / "a")
        b = run(builtin("twolines"), out_root=tmp_path / "b")
        assert a.files["report"].read_bytes() == b.files["report"].read_bytes()
