import json
import subprocess
import sys

import numpy as np
import pytest
from conftest import cached_table

from ringpen import reference as ref
from ringpen.cli import EXIT_BUDGET, EXIT_CONFIG, EXIT_OK, RunConfig, main, parse_config, run, table
from ringpen.core import ConfigurationError
from ringpen.metrics import MetricTrace, Snapshot
from ringpen.runner import drive

GPM = "method: gpm\nfamily: example1\nm: 20\nn: 10\nstop: {metric: dp, delta: 1.0e-4}\n"


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestConfig:
    def test_defaults(self):
        c = parse_config(GPM).resolved()
        assert (c.alpha, c.tau, c.start) == (0.4, 1.0, 5.0)

    def test_perturb_default_follows_family(self):
        assert RunConfig("pdm", "example4", 20, 10).resolved().perturb == "on"
        assert RunConfig("pdm", "example3", 20, 10).resolved().perturb == "off"

    def test_schedule_law(self):
        with pytest.warns(UserWarning), pytest.raises(ConfigurationError) as e:
            parse_config("method: dpm\nfamily: example3\nm: 20\nn: 10\nq1: 0.7\nq2: 0.6\n")
        assert any("q1 < q2" in v for v in e.value.violations)

    def test_missing_field_named(self):
        with pytest.raises(ConfigurationError) as e:
            parse_config("method: gpm\nfamily: example1\nn: 10\n")
        assert e.value.violations == ["m: required field missing"]

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError) as e:
            parse_config(GPM + "gamma: 3\n")
        assert "gamma" in str(e.value)

    def test_parse_error_position(self):
        with pytest.raises(ConfigurationError) as e:
            parse_config("method: gpm\nfamily: [example1\nm: 20\n")
        assert "line" in str(e.value) and "column" in str(e.value)

    def test_all_violations_listed(self):
        c = RunConfig("gpm", "example1", 21, 10, alpha=0.9, perturb="on")
        v = c.violations()
        assert len(v) == 3

    def test_method_family_mismatch(self):
        with pytest.raises(ConfigurationError):
            RunConfig("gpm", "example3", 20, 10).validate()


class TestRuns:
    def test_gpm_kt(self):
        assert run(parse_config(GPM)).kt == 32

    def test_dpm_checkpoints(self):
        r = run(RunConfig("dpm", "example3", 20, 10, record_at=[0, 60, 100, 200]))
        got = [round(r.value_at(k, "phi"), 2) for k in (0, 60, 100, 200)]
        assert got == [360.85, 155.82, 152.6, 152.36]

    def test_pdm_perturbed(self):
        r = run(RunConfig("pdm", "example4", 100, 50, record_at=[200]))
        assert r.value_at(200, "phi") == pytest.approx(1816.3, rel=1e-2)

    def test_byte_identical(self):
        a = run(parse_config(GPM + "record_at: [10, 20]\n")).to_json()
        b = run(parse_config(GPM + "record_at: [10, 20]\n")).to_json()
        assert a == b
        assert json.loads(a)["kt"] == 32

    def test_adm_checkpoint_flagged(self):
        r = run(RunConfig("adm", "example1", 20, 10, budget=100, record_at=[50]))
        cp = r.checkpoints[50]
        assert cp.at == 41 and not cp.exact


class TestMain:
    def test_exit_ok_and_outputs(self, tmp_path):
        cfg = write(tmp_path, "c.yaml", GPM + "record_at: [10, 20, 30]\n")
        out, trace = tmp_path / "r.json", tmp_path / "t.csv"
        assert main(["run", cfg, "--out", str(out), "--trace", str(trace)]) == EXIT_OK
        assert json.loads(out.read_text())["kt"] == 32
        t = MetricTrace.from_csv(trace.read_text())
        assert [s for s, _ in t.series("dp")] == [10, 20, 30]
        first = out.read_text()
        main(["run", cfg, "--out", str(out)])
        assert out.read_text() == first

    def test_exit_config(self, tmp_path, capsys):
        cfg = write(tmp_path, "c.yaml", "method: gpm\nfamily: example1\nm: 20\nn: 10\nalpha: 0.7\n")
        assert main(["run", cfg]) == EXIT_CONFIG
        assert "alpha" in capsys.readouterr().err

    def test_exit_budget_still_reports(self, tmp_path):
        cfg = write(tmp_path, "c.yaml", GPM + "budget: 5\n")
        out = tmp_path / "r.json"
        assert main(["run", cfg, "--out", str(out)]) == EXIT_BUDGET
        data = json.loads(out.read_text())
        assert data["kt"] == 5 and data["stop"]["kt"] is None

    def test_compare(self, tmp_path, capsys):
        a = write(tmp_path, "a.yaml", GPM)
        b = write(tmp_path, "b.yaml", "method: sqp\nfamily: example1\nm: 50\nn: 10\nstop: {metric: dp, delta: 1.0e-4}\n")
        assert main(["compare", a, b]) == EXIT_OK
        out = capsys.readouterr().out
        assert "| " in out and "sqp" in out

    def test_module_entry_point(self, tmp_path):
        cfg = write(tmp_path, "c.yaml", GPM)
        res = subprocess.run([sys.executable, "-m", "ringpen.cli", "run", cfg], capture_output=True, text=True)
        assert res.returncode == 0 and json.loads(res.stdout)["kt"] == 32


class TestTables:
    def test_table1_row(self):
        rows = {(r[0], r[1]): r for r in cached_table(1).rows}
        assert rows[(100, 20)][2] == 32

    def test_table2_row(self):
        rows = {(r[0], r[1]): r for r in cached_table(2).rows}
        assert rows[(50, 10)][2] == 100

    def test_table3_row(self):
        rows = {(r[0], r[1]): r for r in cached_table(3).rows}
        assert rows[(20, 10)][2:] == [287, 7, 144, 3, 0.0]

    def test_layout(self):
        t = cached_table(6)
        assert len(t.rows) == 2 * len(ref.ROWS) and len(t.reference) == len(t.rows)
        assert t.to_csv().splitlines()[0] == ",".join(t.header)
        assert t.to_markdown().count("\n") == len(t.rows) + 2

    def test_bad_id(self):
        with pytest.raises(ConfigurationError):
            table(8)

    def test_table_command(self, tmp_path, capsys):
        assert main(["table", "3", "--out", str(tmp_path), "--reference"]) == EXIT_OK
        assert (tmp_path / "table3.csv").exists() and (tmp_path / "table3.md").exists()
        assert "Reference" in capsys.readouterr().out


class TestDrive:
    @staticmethod
    def stream(values):
        for k, v in enumerate(values):
            yield Snapshot(k, k, np.full((2, 1), v), info={"initial": k == 0})

    def test_initial_snapshot_ignored(self):
        r = drive(self.stream([0.0, 2.0, 0.5, 0.1]), {"v": lambda s: s.x[0, 0]}, stop=("v", 0.6))
        assert r.kt == 2 and r.stop.values["v"] == 0.5

    def test_runs_to_budget_without_targets(self):
        r = drive(self.stream([3.0, 2.0, 1.0]), {"v": lambda s: s.x[0, 0]})
        assert r.kt == 2 and r.met_stop

    def test_unknown_metric(self):
        with pytest.raises(KeyError):
            drive(self.stream([1.0]), {"v": lambda s: 0.0}, stop=("w", 1.0))

    def test_checkpoint_after_stop(self):
        r = drive(self.stream([5.0, 0.1, 0.1, 0.1, 0.1]), {"v": lambda s: s.x[0, 0]},
                  stop=("v", 0.5), record_at=[3])
        assert r.kt == 1 and r.checkpoints[3].exact
