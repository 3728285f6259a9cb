"""
Experiment runner: config files, single runs, and the benchmark tables.

Subcommands::

    ringpen run CONFIG [--out REPORT.json] [--trace TRACE.csv]
    ringpen table N [--out DIR] [--reference]
    ringpen compare CONFIG [CONFIG ...]

Exit codes: 0 success, 2 configuration error, 3 budget exhausted before
the stop criterion was met (the report is still written).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from . import reference as ref
from .baselines import adm_iterates, pdm_iterates, sqp_iterates
from .benchmarks import FAMILIES, ProblemSpec
from .core import ConfigurationError, PenaltyConfig, consensus
from .dpm import DpmRun, StageSchedule, dpm_iterates
from .feasibility import check_gpm_step, gpm_iterates, regularized_feasibility
from .oracles import NormDistance
from .runner import adm_metrics, drive, fermat_weber_metrics, gpm_metrics, sqp_metrics
from .simnet import NO_PERTURBATION, PerturbationModel

METHODS = ("gpm", "sqp", "adm", "pdm", "dpm")
EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3

DEFAULTS = {
    "gpm": {"alpha": 0.4, "tau": 1.0, "budget": 10_000},
    "sqp": {"budget": 10_000},
    "adm": {"budget": 10_000},
    "pdm": {"alpha": 0.5, "beta": 0.25, "budget": 200},
    "dpm": {"alpha": 0.4, "tau": 1.0, "beta": 0.5, "q1": 0.1, "q2": 0.6,
            "theta0": 0.5, "sigma0": 1.0, "budget": 200},
}
FEASIBILITY_METHODS = ("gpm", "sqp", "adm", "dpm")
FERMAT_WEBER_METHODS = ("pdm", "dpm")


@dataclass
class RunConfig:
    """One experiment.  ``None`` parameters take the method defaults."""

    method: str
    family: str
    m: int
    n: int
    alpha: float | None = None
    tau: float | None = None
    beta: float | None = None
    q1: float | None = None
    q2: float | None = None
    theta0: float | None = None
    sigma0: float | None = None
    budget: int | None = None
    stop: dict | None = None
    watch: list = field(default_factory=list)
    record_at: list = field(default_factory=list)
    perturb: str | None = None
    stop_rule: str = "global"
    start: float = 5.0

    def resolved(self):
        """Copy with method defaults filled in."""
        out = RunConfig(**asdict(self))
        for k, v in DEFAULTS.get(self.method, {}).items():
            if getattr(out, k) is None:
                setattr(out, k, v)
        if out.perturb is None:
            out.perturb = "on" if self.family == "example4" else "off"
        return out

    def violations(self):
        v = []
        if self.method not in METHODS:
            v.append(f"method: unknown {self.method!r}; expected one of {METHODS}")
        if self.family not in FAMILIES:
            v.append(f"family: unknown {self.family!r}; expected one of {FAMILIES}")
        for name in ("m", "n"):
            val = getattr(self, name)
            if not isinstance(val, int) or isinstance(val, bool) or val < 1:
                v.append(f"{name}: must be a positive integer, got {val!r}")
        if v:
            return v
        c = self.resolved()
        feas = c.family in ("example1", "example2")
        if feas and c.method not in FEASIBILITY_METHODS:
            v.append(f"method: {c.method} does not apply to {c.family}")
        if not feas and c.method not in FERMAT_WEBER_METHODS:
            v.append(f"method: {c.method} does not apply to {c.family}")
        if feas and (c.m % 2 or c.n % 2 or not c.m > c.n):
            v.append(f"m, n: {c.family} needs even m and n with m > n")
        if c.perturb not in ("on", "off"):
            v.append(f"perturb: must be 'on' or 'off', got {c.perturb!r}")
        elif c.perturb == "on" and c.method not in ("dpm", "pdm"):
            v.append("perturb: only dpm and pdm support perturbed transmission")
        if not isinstance(c.budget, int) or c.budget < 0:
            v.append(f"budget: must be a nonnegative integer, got {c.budget!r}")
        if c.method == "gpm":
            try:
                check_gpm_step(c.alpha, c.tau)
            except ConfigurationError as e:
                v += [f"alpha: {s}" for s in e.violations]
        if c.method == "pdm" and not (c.alpha > 0 and c.beta > 0):
            v.append("alpha, beta: PDM steps must be positive")
        if c.method == "dpm":
            run = _dpm_run(c)
            try:
                run.validate()
            except ConfigurationError as e:
                v += e.violations
        for name, spec in [("stop", c.stop)] + [("watch", w) for w in c.watch]:
            if spec is None:
                continue
            if not isinstance(spec, dict) or set(spec) != {"metric", "delta"}:
                v.append(f"{name}: expected a mapping with keys 'metric' and 'delta'")
        if c.stop_rule not in ("global", "local"):
            v.append(f"stop_rule: must be 'global' or 'local', got {c.stop_rule!r}")
        return v

    def validate(self):
        v = self.violations()
        if v:
            raise ConfigurationError(v)
        return self.resolved()


def _dpm_run(c):
    return DpmRun(PenaltyConfig(c.tau, c.alpha, c.beta), StageSchedule(c.theta0, c.sigma0, c.q1, c.q2),
                  stop=c.stop_rule, budget=c.budget,
                  perturb=PerturbationModel.deterministic() if c.perturb == "on" else NO_PERTURBATION)


CONFIG_KEYS = {f.name for f in fields(RunConfig)}
REQUIRED_KEYS = ("method", "family", "m", "n")


def parse_config(text, source="<config>"):
    """Parse YAML text into a :class:`RunConfig` (validated)."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        problem = getattr(e, "problem", None) or str(e)
        raise ConfigurationError(f"{source}: parse error at {where}: {problem}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: top level must be a mapping")
    v = [f"{k}: unknown key" for k in data if k not in CONFIG_KEYS]
    v += [f"{k}: required field missing" for k in REQUIRED_KEYS if k not in data]
    if v:
        raise ConfigurationError(v)
    cfg = RunConfig(**data)
    cfg.validate()
    return cfg


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(), str(path))


# -- execution ------------------------------------------------------------------

def _pair(spec):
    return None if spec is None else (spec["metric"], float(spec["delta"]))


def build(config):
    """Return ``(iterates, metrics)`` for a validated, resolved config."""
    c = config
    spec = ProblemSpec(c.family, c.m, c.n)
    data = spec.build()
    x0 = consensus([c.start] * c.n, c.m)
    if spec.kind == "feasibility":
        if c.method == "gpm":
            return gpm_iterates(data, x0, c.alpha, c.tau, c.budget), gpm_metrics(data, c.alpha, c.tau)
        if c.method == "sqp":
            return sqp_iterates(data, x0[0], c.budget), sqp_metrics(data)
        if c.method == "adm":
            return adm_iterates(data, x0, c.budget), adm_metrics(data)
        oracle = regularized_feasibility(data, c.tau)
        return dpm_iterates(oracle, x0, _dpm_run(c)), gpm_metrics(data, c.alpha, c.tau)
    perturb = PerturbationModel.deterministic() if c.perturb == "on" else NO_PERTURBATION
    if c.method == "pdm":
        return pdm_iterates(data, x0, c.alpha, c.beta, c.budget, perturb), fermat_weber_metrics(data)
    return dpm_iterates(NormDistance(data), x0, _dpm_run(c)), fermat_weber_metrics(data)


def run(config):
    """Validate, dispatch and drive one configuration."""
    c = config.validate()
    iterates, metrics = build(c)
    return drive(iterates, metrics, stop=_pair(c.stop), watch=[_pair(w) for w in c.watch],
                 record_at=c.record_at, method=c.method, config=asdict(c))


# -- tables ---------------------------------------------------------------------

@dataclass
class Table:
    number: int
    header: list
    rows: list
    reference: list = field(default_factory=list)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()

    def to_markdown(self, rows=None):
        rows = self.rows if rows is None else rows
        cells = [[_fmt(v) for v in r] for r in rows]
        widths = [max(len(h), *(len(r[k]) for r in cells)) if cells else len(h)
                  for k, h in enumerate(self.header)]
        line = lambda r: "| " + " | ".join(s.rjust(wd) for s, wd in zip(r, widths)) + " |"
        out = [line(self.header), "|" + "|".join("-" * (wd + 2) for wd in widths) + "|"]
        out += [line(r) for r in cells]
        return "\n".join(out) + "\n"


def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}" if abs(v) < 1e5 else f"{v:.2f}"
    return str(v)


def _cfg(method, family, m, n, **kw):
    return RunConfig(method, family, m, n, **kw)


def table1(rows=ref.ROWS):
    header = ["m", "n", "kt", "dp@10", "ds@10", "dp@20", "ds@20", "dp@30", "ds@30"]
    out, refs = [], []
    for m, n in rows:
        r = run(_cfg("gpm", "example1", m, n, stop={"metric": "dp", "delta": 1e-4},
                     record_at=list(ref.CHECKPOINTS_EX1)))
        vals = [r.value_at(k, name) for k in ref.CHECKPOINTS_EX1 for name in ("dp", "ds")]
        out.append([m, n, r.kt, *vals])
        kt, *cps = ref.TABLE1[(m, n)]
        refs.append([m, n, kt, *[float(v) for cp in cps for v in cp]])
    return Table(1, header, out, refs)


def table2(rows=ref.ROWS):
    header = ["m", "n", "kt", "ds@10", "ds@20", "ds@30"]
    out, refs = [], []
    for m, n in rows:
        r = run(_cfg("sqp", "example1", m, n, stop={"metric": "dp", "delta": 1e-4},
                     record_at=list(ref.CHECKPOINTS_EX1)))
        out.append([m, n, r.kt, *[r.value_at(k, "ds") for k in ref.CHECKPOINTS_EX1]])
        kt, ds = ref.TABLE2[(m, n)]
        refs.append([m, n, kt, *map(float, ds)])
    return Table(2, header, out, refs)


def table3(rows=ref.ROWS):
    header = ["m", "n", "kt(dp)", "kl(dp)", "kt(ds)", "kl(ds)", "ds"]
    out, refs = [], []
    for m, n in rows:
        r = run(_cfg("adm", "example1", m, n, budget=50 * (2 * m + 1),
                     watch=[{"metric": "dp", "delta": 1e-4}, {"metric": "ds", "delta": 1e-4}]))
        wp, ws = r.watches
        out.append([m, n, wp.kt, wp.kl, ws.kt, ws.kl, ws.values.get("ds")])
        (kt1, kl1), (kt2, kl2, ds) = ref.TABLE3[(m, n)]
        refs.append([m, n, kt1, kl1, kt2, kl2, ds])
    return Table(3, header, out, refs)


def table4(rows=ref.ROWS):
    header = ["m", "n", "kt(dd<=0.1)", "kt(dd<=0.01)", "dp", "kt", "ds"]
    out, refs = [], []
    for m, n in rows:
        k1, k2, dp, (ks, ds) = ref.TABLE4[(m, n)]
        r = run(_cfg("gpm", "example2", m, n, budget=20_000, record_at=[ks],
                     watch=[{"metric": "dd", "delta": 0.1}, {"metric": "dd", "delta": 0.01}]))
        w1, w2 = r.watches
        out.append([m, n, w1.kt, w2.kt, w2.values.get("dp"), ks, r.value_at(ks, "ds")])
        refs.append([m, n, k1, k2, float(dp), ks, float(ds)])
    return Table(4, header, out, refs)


def table5(rows=ref.ROWS):
    """Both methods run to the listed budget; ``conv`` tells whether dd <= 0.1 was ever met."""
    header = ["method", "m", "n", "kt", "kl", "dd", "dp", "ds", "conv"]
    out, refs = [], []
    for method, table in (("sqp", ref.TABLE5_SQP), ("adm", ref.TABLE5_ADM)):
        for (m, n), (kt, kl, dd, dp, ds) in table.items():
            if (m, n) not in rows:
                continue
            r = run(_cfg(method, "example2", m, n, budget=kt, record_at=[kt],
                         watch=[{"metric": "dd", "delta": 0.1}]))
            cp = r.checkpoints[kt]
            conv = r.watches[0].met and r.watches[0].kt <= kt
            out.append([method, m, n, kt, cp.kl if method == "adm" else None,
                        cp.values["dd"], cp.values["dp"], cp.values["ds"], conv])
            refs.append([method, m, n, kt, kl, float(dd), float(dp), float(ds), False])
    return Table(5, header, out, refs)


def _fw_table(number, family, q1, q2, ref_dpm, ref_pdm, rows):
    header = ["method", "m", "n", *[f"phi@{k}" for k in ref.CHECKPOINTS_FW]]
    out, refs = [], []
    for method, table in (("dpm", ref_dpm), ("pdm", ref_pdm)):
        for m, n in rows:
            kw = {"q1": q1, "q2": q2} if method == "dpm" else {}
            r = run(_cfg(method, family, m, n, record_at=list(ref.CHECKPOINTS_FW), **kw))
            out.append([method, m, n, *[r.value_at(k, "phi") for k in ref.CHECKPOINTS_FW]])
            refs.append([method, m, n, *map(float, table[(m, n)])])
    return Table(number, header, out, refs)


def table6(rows=ref.ROWS):
    return _fw_table(6, "example3", 0.1, 0.6, ref.TABLE6_DPM, ref.TABLE6_PDM, rows)


def table7(rows=ref.ROWS):
    return _fw_table(7, "example4", 0.2, 0.5, ref.TABLE7_DPM, ref.TABLE7_PDM, rows)


TABLES = {1: table1, 2: table2, 3: table3, 4: table4, 5: table5, 6: table6, 7: table7}


def table(number, rows=ref.ROWS):
    if number not in TABLES:
        raise ConfigurationError(f"table id must be in 1..7, got {number}")
    return TABLES[number](rows)


# -- command line ---------------------------------------------------------------

def _cmd_run(args):
    cfg = load_config(args.config)
    report = run(cfg)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.trace:
        Path(args.trace).write_text(report.trace.to_csv())
    return EXIT_OK if report.met_stop else EXIT_BUDGET


def _cmd_table(args):
    t = table(args.number)
    md = t.to_markdown()
    sys.stdout.write(f"Table {t.number}\n\n{md}")
    if args.reference:
        sys.stdout.write(f"\nReference\n\n{t.to_markdown(t.reference)}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"table{t.number}.csv").write_text(t.to_csv())
        (out / f"table{t.number}.md").write_text(md)
    return EXIT_OK


def _cmd_compare(args):
    configs = [load_config(p) for p in args.configs]
    reports = [run(c) for c in configs]
    names = sorted({k for r in reports for k in r.final})
    t = Table(0, ["config", "method", "family", "m", "n", "kt", "kl", *names],
              [[p, r.method, c.family, c.m, c.n, r.kt, r.kl, *[r.final.get(k) for k in names]]
               for p, c, r in zip(args.configs, configs, reports)])
    sys.stdout.write(t.to_markdown())
    return EXIT_OK if all(r.met_stop for r in reports) else EXIT_BUDGET


def make_parser():
    p = argparse.ArgumentParser(prog="ringpen", description="Decentralized ring penalty method experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one configuration file")
    r.add_argument("config")
    r.add_argument("--out", help="write the JSON report here instead of stdout")
    r.add_argument("--trace", help="write checkpoint metrics as CSV")
    r.set_defaults(func=_cmd_run)
    t = sub.add_parser("table", help="reproduce one benchmark table")
    t.add_argument("number", type=int, choices=sorted(TABLES))
    t.add_argument("--out", help="directory for CSV and markdown output")
    t.add_argument("--reference", action="store_true", help="also print the published values")
    t.set_defaults(func=_cmd_table)
    c = sub.add_parser("compare", help="run several configurations and tabulate final metrics")
    c.add_argument("configs", nargs="+")
    c.set_defaults(func=_cmd_compare)
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as e:
        for line in e.violations:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
