import json

import numpy as np
import pytest

from conftest import I2, KET0, SX, SY, SZ
from uqrel import cli, scenario, sweeps
from uqrel.sweeps import TrialResult
from uqrel.systems import NumericalBreakdown, format_matrix
from uqrel.uncertainty import CSV_COLUMNS, CSV_HEADER


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def summary_of(err):
    return json.loads(err)


class TestVerify:
    def test_error_disturbance_qubits(self, capsys):
        code, out, err = run(["verify", "--mode", "error-disturbance", "--dim", "2", "--trials", "1000",
                              "--seed", "7"], capsys)
        assert code == 0
        s = summary_of(err)
        assert s["trials"] == 1000 and s["failures"] == 0
        assert s["min_slack"] >= -1e-8
        lines = out.splitlines()
        assert lines[0] == CSV_HEADER
        assert lines[1] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1002

    def test_robertson_qutrits(self, capsys):
        code, _, err = run(["verify", "--mode", "robertson", "--dim", "3", "--trials", "200"], capsys)
        assert code == 0
        assert summary_of(err)["max_eps_sigma_dev"] <= 1e-10

    @pytest.mark.parametrize("mode", sweeps.MODES)
    def test_every_mode_runs(self, mode, capsys):
        code, _, err = run(["verify", "--mode", mode, "--dim", "2", "--dim", "3", "--trials", "5"], capsys)
        assert code == 0, err

    @pytest.mark.parametrize(
        "argv",
        [
            ["verify", "--mode", "robertson", "--trials", "0"],
            ["verify", "--mode", "robertson", "--dim", "1"],
            ["verify", "--mode", "bogus"],
            ["verify"],
            ["compare", "--jobs", "0"],
            [],
        ],
    )
    def test_usage_errors(self, argv, capsys):
        code, _, err = run(argv, capsys)
        assert code == 1
        assert err

    def test_json_format_and_out_file(self, tmp_path, capsys):
        path = tmp_path / "r.json"
        code, out, _ = run(["verify", "--mode", "errors-joint", "--trials", "3", "--format", "json",
                            "--out", str(path)], capsys)
        assert code == 0 and out == ""
        doc = json.loads(path.read_text())
        assert doc["summary"]["trials"] == 3
        assert len(doc["rows"]) == 3

    def test_violation_exit_code(self, monkeypatch, capsys):
        def failing(mode, dim, seed, tol):
            return TrialResult([str(seed), dim, mode] + [0.0] * 8 + [0], False, -1.0)

        monkeypatch.setattr(sweeps, "run_trial", failing)
        code, _, err = run(["verify", "--mode", "errors-joint", "--trials", "2", "--seed", "5"], capsys)
        assert code == 2
        assert summary_of(err)["failed_seeds"] == ["5:0", "5:1"]

    def test_breakdown_exit_code(self, monkeypatch, capsys):
        def broken(mode, dim, seed, tol):
            return TrialResult([str(seed), dim, mode] + ["nan"] * 8 + [0], False, float("nan"), breakdown=True)

        monkeypatch.setattr(sweeps, "run_trial", broken)
        code, _, _ = run(["verify", "--mode", "errors-joint", "--trials", "2"], capsys)
        assert code == 3

    def test_breakdown_row_in_real_trial(self, monkeypatch):
        def boom(*args, **kwargs):
            raise NumericalBreakdown("forced")

        monkeypatch.setattr(sweeps, "check_relation_errors", boom)
        res = sweeps.run_trial("errors-joint", 2, sweeps.SeedSpec(1, 0))
        assert res.breakdown and not res.ok
        assert len(res.row) == len(CSV_COLUMNS)

    def test_same_seed_same_bytes(self, tmp_path, capsys):
        paths = [tmp_path / f"{i}.csv" for i in range(3)]
        base = ["verify", "--mode", "error-disturbance", "--dim", "2", "--trials", "30", "--seed", "3"]
        run(base + ["--out", str(paths[0])], capsys)
        run(base + ["--out", str(paths[1])], capsys)
        run(base + ["--out", str(paths[2]), "--jobs", "2"], capsys)
        data = [p.read_bytes() for p in paths]
        assert data[0] == data[1] == data[2]


class TestCompare:
    def test_chain(self, capsys):
        code, out, err = run(["compare", "--trials", "50", "--seed", "2"], capsys)
        assert code == 0
        s = summary_of(err)
        assert s["failures"] == 0
        assert s["most_often_tight"] in sweeps.CHAIN_COLUMNS
        assert out.splitlines()[0] == "# uqrel-chain v1"

    def test_deterministic(self, capsys):
        a = run(["compare", "--trials", "10", "--seed", "9"], capsys)[1]
        b = run(["compare", "--trials", "10", "--seed", "9"], capsys)[1]
        assert a == b


class TestDemo:
    def demo(self, name, capsys):
        code, out, _ = run(["demo", name], capsys)
        assert code == 0
        return json.loads(out)

    def test_luders_xy(self, capsys):
        rel = self.demo("luders-xy", capsys)["relation"]
        assert rel["eps_A"] == 0.0
        assert rel["eta_or_eps_B"] == pytest.approx(1.0)
        assert rel["I"] == pytest.approx(0.0, abs=1e-12)
        assert rel["satisfied_simple"]

    def test_naive_violation(self, capsys):
        out = self.demo("naive-violation", capsys)
        q = out["dim2"]
        assert q["lhs"] == 0.0
        assert q["metadata"]["naive_bound"] == pytest.approx(1.0)
        assert q["metadata"]["violates_naive"] and q["satisfied_simple"]
        assert out["dim3"]["metadata"]["violates_naive"]

    def test_schrodinger_equality(self, capsys):
        out = self.demo("schrodinger-equality", capsys)
        assert out["equality"]
        r = out["report"]
        assert r["eps_A"] * r["eps_B"] == pytest.approx(r["bounds"]["full"], abs=1e-10)

    def test_transpose_map(self, capsys):
        out = self.demo("transpose-map", capsys)
        assert out["disturbance_transpose_sy"] == 0.0
        np.testing.assert_allclose(
            np.array(out["pushforward_transpose_sy"])[..., 0] + 1j * np.array(out["pushforward_transpose_sy"])[..., 1],
            -SY, atol=1e-10,
        )
        assert out["decomposition_deviation"] <= 1e-8

    def test_unknown(self, capsys):
        assert run(["demo", "nope"], capsys)[0] == 1


def qubit_doc(**extra):
    P = [(I2 + SX) / 2, (I2 - SX) / 2]
    doc = {
        "dim": 2,
        "rho": format_matrix(KET0),
        "observables": {"A": format_matrix(SX), "B": format_matrix(SY)},
        "instrument": [[format_matrix(P[0])], [format_matrix(P[1])]],
        "labels": [1.0, -1.0],
        "secondary_povm": [format_matrix((I2 + SZ) / 2), format_matrix((I2 - SZ) / 2)],
    }
    doc.update(extra)
    return doc


def write(tmp_path, doc, name="s.json"):
    path = tmp_path / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return str(path)


class TestCase:
    def test_errors_joint(self, tmp_path, capsys):
        code, out, _ = run(["case", write(tmp_path, qubit_doc())], capsys)
        assert code == 0
        rep = json.loads(out)
        for key in ("eps_A", "eta_or_eps_B", "lhs", "R", "I", "bound_full", "bound_simple", "slack",
                    "satisfied_full", "satisfied_simple", "mode"):
            assert key in rep
        assert rep["scenario_mode"] == "errors-joint"
        assert rep["eps_A"] == 0.0
        assert rep["eta_or_eps_B"] == pytest.approx(1.0)

    @pytest.mark.parametrize("mode", scenario.SCENARIO_MODES)
    def test_modes(self, mode, tmp_path, capsys):
        code, out, _ = run(["case", write(tmp_path, qubit_doc(mode=mode))], capsys)
        assert code == 0
        assert json.loads(out)["scenario_mode"] == mode

    def test_default_mode_without_secondary(self, tmp_path, capsys):
        doc = qubit_doc()
        del doc["secondary_povm"]
        code, out, _ = run(["case", write(tmp_path, doc)], capsys)
        assert code == 0
        assert json.loads(out)["scenario_mode"] == "error-disturbance"

    def test_povm_not_summing_to_identity(self, tmp_path, capsys):
        doc = qubit_doc(secondary_povm=[format_matrix((I2 + SZ) / 2), format_matrix((I2 + SZ) / 2)])
        code, _, err = run(["case", write(tmp_path, doc)], capsys)
        assert code == 1
        assert "secondary_povm" in err and "effects 0..1" in err

    def test_negative_effect_named(self, tmp_path, capsys):
        doc = qubit_doc(secondary_povm=[format_matrix(2 * I2), format_matrix(-I2)])
        code, _, err = run(["case", write(tmp_path, doc)], capsys)
        assert code == 1
        assert "effect 1" in err

    def test_transpose_transfer_map(self, tmp_path, capsys):
        doc = qubit_doc(transfer_map="transpose", mode="error-disturbance")
        code, out, _ = run(["case", write(tmp_path, doc)], capsys)
        assert code == 0
        rep = json.loads(out)
        # transposing after the Luders channel leaves the qubit dephased; sy stays fully disturbed
        assert rep["eta_or_eps_B"] == pytest.approx(1.0)
        assert rep["satisfied_simple"]

    def test_non_positive_transfer_map(self, tmp_path, capsys):
        doc = qubit_doc(transfer_map=np.diag([1.0, 1.0, 1.0, -3.0]).tolist(), mode="error-disturbance")
        doc["instrument"] = [[format_matrix(I2)]]
        doc.pop("labels")
        code, _, err = run(["case", write(tmp_path, doc)], capsys)
        assert code == 1
        assert "not positive" in err

    def test_json_syntax_error(self, tmp_path, capsys):
        code, _, err = run(["case", write(tmp_path, '{\n  "dim": 2,\n  "rho": [[1, 0]\n}')], capsys)
        assert code == 1
        assert "line 4" in err

    def test_missing_field_path(self, tmp_path, capsys):
        doc = qubit_doc()
        del doc["observables"]["B"]
        code, _, err = run(["case", write(tmp_path, doc)], capsys)
        assert code == 1
        assert "observables.B: missing field" in err

    def test_bad_state(self, tmp_path, capsys):
        doc = qubit_doc(rho=format_matrix(I2))
        code, _, err = run(["case", write(tmp_path, doc)], capsys)
        assert code == 1 and "rho" in err

    def test_missing_file(self, tmp_path, capsys):
        assert run(["case", str(tmp_path / "absent.json")], capsys)[0] == 1

    def test_round_trip(self):
        sc = scenario.loads(json.dumps(qubit_doc(transfer_map="transpose")))
        again = scenario.loads(scenario.dumps(sc))
        np.testing.assert_array_equal(again.rho, sc.rho)
        np.testing.assert_array_equal(again.secondary_povm.effects, sc.secondary_povm.effects)
        np.testing.assert_array_equal(again.transfer_map.matrix, sc.transfer_map.matrix)
        assert cli.evaluate_scenario(again) == cli.evaluate_scenario(sc)
