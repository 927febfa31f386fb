import json
import math

import numpy as np
import pytest

from qsl_rtn.cli import cli_main
from qsl_rtn.errors import InvalidSpec
from qsl_rtn.sweep import (
    SweepSpec,
    format_number,
    params_from_spec,
    render,
    render_csv,
    resolve_threads,
    run_sweep,
    spec_from_mapping,
)


def rows_by(result, **filters):
    idx = {c: i for i, c in enumerate(result.columns)}
    out = []
    for row in result.rows:
        if all(row[idx[k]] == v for k, v in filters.items()):
            out.append(row)
    return out, idx


class TestFormatting:
    def test_nine_significant_digits(self):
        assert format_number(math.pi) == "3.14159265"
        assert format_number(5.0) == "5"
        assert format_number(1.23456789012e-7) == "1.23456789e-07"

    def test_negative_zero_normalized(self):
        assert format_number(-0.0) == "0"

    def test_csv_layout(self):
        spec = SweepSpec(kind="evolve", g=1.0, tmax=1.0, points=2, threads=1)
        text = render_csv(run_sweep(spec))
        lines = text.split("\n")
        assert lines[0] == "gamma_t,rx,ry,rz,f"
        assert text.endswith("\n") and "\r" not in text


class TestSpecHandling:
    def test_unknown_field_rejected(self):
        with pytest.raises(InvalidSpec, match="not_a_field"):
            spec_from_mapping({"kind": "fig1", "not_a_field": 3})

    def test_kind_required(self):
        with pytest.raises(InvalidSpec, match="kind"):
            spec_from_mapping({"g": 2.0})

    def test_params_mutually_exclusive(self):
        with pytest.raises(InvalidSpec, match="mutually exclusive"):
            params_from_spec(SweepSpec(kind="qsl", g=1.0, lam=1.0))
        with pytest.raises(InvalidSpec, match="required"):
            params_from_spec(SweepSpec(kind="qsl"))

    def test_resolve_threads_env(self, monkeypatch):
        assert resolve_threads(3) == 3
        monkeypatch.setenv("QSL_RTN_THREADS", "5")
        assert resolve_threads(None) == 5
        monkeypatch.setenv("QSL_RTN_THREADS", "zebra")
        with pytest.raises(InvalidSpec, match="QSL_RTN_THREADS"):
            resolve_threads(None)

    def test_unknown_kind(self):
        with pytest.raises(InvalidSpec, match="kind"):
            run_sweep(SweepSpec(kind="fig9"))

    def test_bad_points(self):
        with pytest.raises(InvalidSpec, match="points"):
            run_sweep(SweepSpec(kind="evolve", g=1.0, points=1, threads=1))


class TestPresets:
    def test_fig1_contract(self):
        res = run_sweep(SweepSpec(kind="fig1", threads=1))
        assert res.columns == ["g", "dp0", "n_coh", "n_coh_over_C0"]
        assert len(res.rows) == 240
        eq, idx = rows_by(res, dp0=0.0)
        assert len(eq) == 120
        for row in eq:
            if row[idx["g"]] <= 1.0:
                assert row[idx["n_coh"]] == 0.0
            if row[idx["g"]] >= 2.0:
                assert row[idx["n_coh"]] > 1e-4
            if row[idx["n_coh"]] > 0:
                assert row[idx["n_coh_over_C0"]] == pytest.approx(
                    row[idx["n_coh"]] / math.sqrt(0.5), rel=1e-12
                )
        biased, idx = rows_by(res, dp0=1.0)
        assert len(biased) == 120
        assert all(row[idx["n_coh"]] <= 1e-9 for row in biased)

    def test_fig2a_contract(self):
        res = run_sweep(SweepSpec(kind="fig2a", threads=1))
        assert res.columns == ["gamma_tau", "g", "dp0", "theta", "lambda_op",
                               "tau_qsl_gamma", "ratio"]
        weak, idx = rows_by(res, g=0.4)
        strong, _ = rows_by(res, g=4.0)
        assert len(weak) == len(strong) == 200
        for row in weak:
            assert row[idx["tau_qsl_gamma"]] == pytest.approx(
                row[idx["gamma_tau"]] * math.sqrt(0.5), rel=1e-6
            )
        for w_row, s_row in zip(weak, strong):
            gt = w_row[idx["gamma_tau"]]
            if gt <= 0.9:
                assert s_row[idx["tau_qsl_gamma"]] == pytest.approx(
                    w_row[idx["tau_qsl_gamma"]], rel=1e-6
                )
        w5 = next(r for r in weak if abs(r[idx["gamma_tau"]] - 5.0) < 1e-9)
        s5 = next(r for r in strong if abs(r[idx["gamma_tau"]] - 5.0) < 1e-9)
        assert s5[idx["tau_qsl_gamma"]] < w5[idx["tau_qsl_gamma"]]

    def test_fig2b_fig3b_contract(self):
        res = run_sweep(SweepSpec(kind="fig2b", threads=1))
        assert res.columns == ["gamma_tau", "n_coh"]
        assert any(row[1] > 0 for row in res.rows)
        res3 = run_sweep(SweepSpec(kind="fig3b", threads=1))
        assert res3.columns == ["gamma_tau", "n_coh"]
        assert all(row[1] <= 1e-12 for row in res3.rows)

    def test_fig5_contract(self):
        res = run_sweep(SweepSpec(kind="fig5", threads=1))
        assert res.columns == ["g", "dp0", "tau_qsl_gamma"]
        eq, idx = rows_by(res, dp0=0.0)
        values = [r[idx["tau_qsl_gamma"]] for r in eq if r[idx["g"]] > 1.05]
        # decreasing past the crossover up to sub-percent ripples where a new
        # revival enters the window (a real feature of the exact dynamics)
        assert all(b <= a * (1.0 + 1e-2) for a, b in zip(values, values[1:]))
        assert values[-1] < 0.3 * values[0]

    def test_fig4_has_four_series(self):
        res = run_sweep(SweepSpec(kind="fig4", threads=1))
        assert len(res.rows) == 800
        combos = {(round(r[1], 6), r[2]) for r in res.rows}
        assert combos == {(4.0, 0.0), (4.0, 1.0), (0.4, 0.0), (0.4, 1.0)}


class TestDeterminism:
    @pytest.mark.parametrize("kind", ["fig1", "fig2b", "fig5"])
    def test_rerun_byte_identity(self, kind):
        a = render(run_sweep(SweepSpec(kind=kind, threads=1)), "csv")
        b = render(run_sweep(SweepSpec(kind=kind, threads=1)), "csv")
        assert a == b

    def test_thread_count_invariance(self):
        a = render(run_sweep(SweepSpec(kind="fig2b", threads=1)), "csv")
        b = render(run_sweep(SweepSpec(kind="fig2b", threads=8)), "csv")
        assert a == b

    def test_mc_validate_determinism(self):
        spec = SweepSpec(kind="mc-validate", g=4.0, traj=4000, seed=11, threads=1)
        a = render(run_sweep(spec), "csv")
        b = render(run_sweep(SweepSpec(kind="mc-validate", g=4.0, traj=4000,
                                       seed=11, threads=8)), "csv")
        assert a == b


class TestMcValidateKind:
    def test_pass_and_schema(self):
        res = run_sweep(SweepSpec(kind="mc-validate", g=4.0, traj=20_000, seed=7, threads=1))
        assert res.columns == ["gamma_t", "re_mc", "im_mc", "stderr",
                               "re_exact", "im_exact", "abs_diff_over_stderr"]
        assert len(res.rows) == 40
        assert res.ok
        assert res.summary["within_4_stderr_fraction"] >= 0.95
        assert all(np.isfinite(row[6]) for row in res.rows)

    def test_traj_floor(self):
        with pytest.raises(InvalidSpec, match="traj"):
            run_sweep(SweepSpec(kind="mc-validate", g=4.0, traj=10))


class TestJsonOutput:
    def test_round_trips(self):
        res = run_sweep(SweepSpec(kind="evolve", g=2.0, tmax=1.0, points=4, threads=1))
        payload = json.loads(render(res, "json"))
        assert payload["kind"] == "evolve"
        assert payload["columns"] == res.columns
        assert len(payload["rows"]) == 4
        assert payload["rows"][0][4] == 1.0  # f(0)


class TestCli:
    def test_qsl_monotone_value(self, capsys):
        assert cli_main(["qsl", "--g", "0.4", "--dp0", "0", "--tau", "5"]) == 0
        out = capsys.readouterr().out
        line = next(l for l in out.splitlines() if l.startswith("tau_qsl_gamma"))
        assert float(line.split("=")[1]) == pytest.approx(3.535534, abs=1e-5)

    def test_nonmark_geometric_value(self, capsys):
        assert cli_main(["nonmark", "--g", "1.4142136", "--dp0", "0", "--tmax", "60"]) == 0
        out = capsys.readouterr().out
        line = next(l for l in out.splitlines() if l.startswith("n_coh "))
        assert float(line.split("=")[1]) == pytest.approx(0.031937, abs=1e-6)

    def test_invalid_arguments_exit_2(self, capsys):
        assert cli_main(["qsl", "--tau", "5"]) == 2  # no coupling given
        assert cli_main(["qsl", "--g", "1", "--lambda", "1", "--tau", "5"]) == 2
        assert cli_main(["qsl", "--g", "1", "--tau", "5", "--bloch", "1,2"]) == 2
        assert cli_main(["qsl", "--g", "1", "--tau", "5", "--bloch", "0.9,0.9,0.9"]) == 2
        assert cli_main(["sweep", "nope"]) == 2
        capsys.readouterr()

    def test_numerical_failure_exit_3(self, capsys):
        assert cli_main(["qsl", "--g", "4", "--tau", "5", "--bloch", "0,0,1"]) == 3
        capsys.readouterr()

    def test_io_failure_exit_4(self, capsys, tmp_path):
        missing = tmp_path / "no" / "such" / "dir" / "x.csv"
        assert cli_main(["sweep", "fig3b", "--out", str(missing)]) == 4
        assert not missing.exists()
        capsys.readouterr()

    def test_atomic_file_output(self, capsys, tmp_path):
        out = tmp_path / "evolve.csv"
        code = cli_main(["evolve", "--g", "2", "--tmax", "1", "--points", "3",
                         "--out", str(out), "--threads", "1"])
        assert code == 0
        text = out.read_text(encoding="utf-8")
        assert text.splitlines()[0] == "gamma_t,rx,ry,rz,f"
        assert not list(tmp_path.glob("*.tmp"))
        capsys.readouterr()

    def test_g_and_lambda_paths_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli_main(["evolve", "--g", "4", "--gamma", "1.0", "--tmax", "2",
                         "--points", "20", "--out", str(a), "--threads", "1"]) == 0
        assert cli_main(["evolve", "--lambda", "4", "--gamma", "1.0", "--tmax", "2",
                         "--points", "20", "--out", str(b), "--threads", "1"]) == 0
        assert a.read_bytes() == b.read_bytes()
        capsys.readouterr()

    def test_config_file_with_flag_override(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"g": 2.0, "tmax": 1.0, "points": 5, "threads": 1}))
        out = tmp_path / "o.csv"
        assert cli_main(["evolve", "--config", str(cfg), "--points", "7",
                         "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 1 + 7
        capsys.readouterr()

    def test_mc_validate_cli(self, capsys, tmp_path):
        out = tmp_path / "mc.csv"
        code = cli_main(["mc-validate", "--g", "4", "--dp0", "0", "--traj", "20000",
                         "--seed", "7", "--out", str(out), "--threads", "1"])
        assert code == 0
        header = out.read_text().splitlines()[0]
        assert header == "gamma_t,re_mc,im_mc,stderr,re_exact,im_exact,abs_diff_over_stderr"
        capsys.readouterr()

    def test_json_format(self, capsys):
        assert cli_main(["qsl", "--g", "0.4", "--tau", "5", "--format", "json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["tau_qsl_gamma"] == pytest.approx(3.5355339, abs=1e-6)

    def test_version_flag(self, capsys):
        assert cli_main(["--version"]) == 0
        capsys.readouterr()
