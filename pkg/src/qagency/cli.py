"""Command-line front end.

Exit codes: 0 success, 1 quantitative failure (tolerance breach, failed
certificate, nothing to optimize), 2 usage or I/O error. All inputs come
from flags; nothing is read from the environment.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import agency, cloning, nogo, optimizer, reference, serialize
from .qstate import fidelity, pure_from_bloch, to_bloch

OK, FAIL, USAGE = 0, 1, 2
FORMATS = ("pretty", "csv", "json")


class UsageError(Exception):
    """Bad flags or unreadable inputs (exit 2)."""


@dataclass
class RunConfig:
    command: str
    circuit: str | None = None
    only: str | None = None
    regime: str = "both"
    fmt: str = "pretty"
    out: str | None = None
    seed: int = 0
    budget: int = 50
    objective: str = "average"
    alpha: complex | None = None
    beta: complex | None = None
    grid: int = 8
    m: int = 2
    bloch: tuple[float, float, float] = (0.0, 0.0, 1.0)
    copies_tol: float = reference.COPIES_TOL
    clones_tol: float = reference.CLONES_TOL


def _fmt(x: float) -> str:
    return f"{x:.5f}"


def _regimes(config: RunConfig) -> tuple[str, ...]:
    return agency.REGIMES if config.regime == "both" else (config.regime,)


def _resolve(selector: str) -> agency.AgencyCircuitSpec:
    """Built-in name or path to a circuit-spec JSON file."""
    try:
        return agency.get_builtin(selector)
    except KeyError as exc:
        path = Path(selector)
        if not (path.suffix == ".json" or path.exists()):
            raise UsageError(exc.args[0]) from None
    try:
        text = path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {selector}: {exc.strerror}") from None
    try:
        return serialize.load_spec(text)
    except serialize.SpecFormatError as exc:
        raise UsageError(f"{selector}: {exc}") from None


def _emit(config: RunConfig, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if config.out is None:
        sys.stdout.write(text)
        return
    try:
        Path(config.out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {config.out}: {exc.strerror}") from None


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


# reproduce-table

DIFF_FIELDS = ("circuit", "regime", "metric", "stat", "value", "reference",
               "deviation", "tolerance", "ok")


def _table_pretty(reports, diffs) -> str:
    lines = []
    by_circuit: dict[str, dict] = {}
    for r in reports:
        by_circuit.setdefault(r.circuit_name, {})[r.regime] = r
    for name, regs in by_circuit.items():
        head = "".join(f"{f'{s} ({reg})':>22}" for reg in regs for s in reference.STATS)
        lines.append(name)
        lines.append(f"{'':14}{head}")
        for metric in agency.METRICS:
            cells = "".join(f"{_fmt(regs[reg].cell(metric, s)):>22}"
                            for reg in regs for s in reference.STATS)
            lines.append(f"{metric:14}{cells}")
        lines.append("")
    bad = [d for d in diffs if not d.ok]
    worst = max(diffs, key=lambda d: d.deviation / d.tolerance)
    lines.append(f"diff: {len(diffs) - len(bad)}/{len(diffs)} cells within tolerance "
                 f"(largest deviation/tolerance {worst.deviation / worst.tolerance:.3g} "
                 f"at {worst.circuit} {worst.regime} {worst.metric} {worst.stat})")
    for d in diffs:
        flag = "ok" if d.ok else "BREACH"
        lines.append(f"  {d.circuit:10} {d.regime:7} {d.metric:13} {d.stat:8} "
                     f"{_fmt(d.value)} ref {_fmt(d.reference)} dev {d.deviation:.2e} "
                     f"tol {d.tolerance:.0e} {flag}")
    return "\n".join(lines)


def _diff_row(d) -> tuple:
    return (d.circuit, d.regime, d.metric, d.stat, repr(d.value), repr(d.reference),
            repr(d.deviation), repr(d.tolerance), str(d.ok).lower())


def parse_table_csv(text: str) -> list[dict]:
    """Read back a ``reproduce-table --format csv`` payload."""
    rows = list(csv.DictReader(io.StringIO(text)))
    for row in rows:
        for k in ("value", "reference", "deviation", "tolerance"):
            row[k] = float(row[k])
        row["ok"] = row["ok"] == "true"
    return rows


def cmd_reproduce_table(config: RunConfig) -> int:
    names = reference.circuits()
    if config.only is not None:
        try:
            names = (agency.resolve_builtin_name(config.only),)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    reports, diffs = [], []
    for name in names:
        spec = agency.get_builtin(name)
        for regime in _regimes(config):
            rep = agency.evaluate(spec, regime)
            reports.append(rep)
            diffs.extend(reference.compare(rep, config.copies_tol, config.clones_tol))
    ok = all(d.ok for d in diffs)
    if config.fmt == "csv":
        text = _csv([DIFF_FIELDS, *(_diff_row(d) for d in diffs)])
    elif config.fmt == "json":
        text = json.dumps({
            "schema_version": serialize.SCHEMA_VERSION,
            "cells": [dict(zip(DIFF_FIELDS, (d.circuit, d.regime, d.metric, d.stat, d.value,
                                             d.reference, d.deviation, d.tolerance, d.ok)))
                      for d in diffs],
            "all_within_tolerance": ok,
        }, indent=2)
    else:
        text = _table_pretty(reports, diffs)
    _emit(config, text)
    return OK if ok else FAIL


# eval

def _report_pretty(report) -> str:
    lines = [f"{report.circuit_name} ({report.regime})",
             f"{'':14}" + "".join(f"{s:>10}" for s in reference.STATS)]
    for metric in agency.METRICS:
        lines.append(f"{metric:14}" + "".join(f"{_fmt(report.cell(metric, s)):>10}"
                                              for s in reference.STATS))
    return "\n".join(lines)


def cmd_eval(config: RunConfig) -> int:
    if config.circuit is None:
        raise UsageError("eval needs --circuit")
    spec = _resolve(config.circuit)
    texts = []
    for regime in _regimes(config):
        rep = agency.evaluate(spec, regime)
        if config.fmt == "csv":
            texts.append(serialize.report_to_csv(rep))
        elif config.fmt == "json":
            texts.append(serialize.report_to_json(rep))
        else:
            texts.append(_report_pretty(rep))
    if config.fmt == "json" and len(texts) > 1:
        text = "[" + ",\n".join(texts) + "]"
    elif config.fmt == "csv":
        # one header, rows from every regime
        text = texts[0] + "".join(t.split("\n", 1)[1] for t in texts[1:])
    else:
        text = "\n\n".join(texts)
    _emit(config, text)
    return OK


# nogo

def cmd_nogo(config: RunConfig) -> int:
    if (config.alpha is None) != (config.beta is None):
        raise UsageError("--alpha and --beta must be given together")
    kwargs = {"grid": config.grid}
    if config.alpha is not None:
        kwargs.update(alpha=config.alpha, beta=config.beta)
    try:
        certs = nogo.default_certificates(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if config.fmt == "json":
        doc = serialize.certificates_to_dict(certs)
        serialize.validate(doc, "certificates")
        text = json.dumps(doc, indent=2)
    elif config.fmt == "csv":
        text = _csv([("claim_id", "violation_magnitude", "tolerance", "status", "passed"),
                     *((c.claim_id, repr(c.violation_magnitude), repr(c.tolerance),
                        c.status, str(c.passed).lower()) for c in certs)])
    else:
        text = "\n".join(f"{c.claim_id:22} magnitude {c.violation_magnitude:.10f} "
                         f"(tol {c.tolerance:.0e})  {c.status}\n{'':22} {c.witness}"
                         for c in certs)
    _emit(config, text)
    return OK if all(c.passed for c in certs) else FAIL


# optimize

def cmd_optimize(config: RunConfig) -> int:
    if config.circuit is None:
        raise UsageError("optimize needs --circuit")
    if config.budget < 0:
        raise UsageError("--budget must be >= 0")
    spec = _resolve(config.circuit)
    regime = "copies" if config.regime == "both" else config.regime
    try:
        space = optimizer.ParamSpace.from_spec(spec)
    except optimizer.InfeasibleEntryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL
    if space.dim == 0:
        print(f"error: nothing to optimize: {spec.name} has no superposed "
              "control-table entries", file=sys.stderr)
        return FAIL
    res = optimizer.optimize(space, regime, config.budget, config.seed,
                             statistic=config.objective)
    delta = res.best_value - res.baseline_value
    if config.fmt == "json":
        text = json.dumps({
            "schema_version": serialize.SCHEMA_VERSION,
            "circuit": spec.name, "regime": regime, "objective": config.objective,
            "budget": config.budget, "seed": config.seed,
            "baseline": res.baseline_value, "best": res.best_value, "delta": delta,
            "best_params": [float(t) for t in res.best_params],
            "best_spec": serialize.spec_to_dict(res.best_spec),
            "trace": [{"params": list(p), "value": v} for p, v in res.trace],
        }, indent=2)
    elif config.fmt == "csv":
        text = _csv([("circuit", "regime", "objective", "budget", "seed",
                      "baseline", "best", "delta"),
                     (spec.name, regime, config.objective, config.budget, config.seed,
                      repr(res.baseline_value), repr(res.best_value), repr(delta))])
    else:
        text = (f"{spec.name} ({regime}, {config.objective} fidelity, budget {config.budget}, "
                f"seed {config.seed})\n"
                f"baseline {_fmt(res.baseline_value)}\n"
                f"best     {_fmt(res.best_value)}\n"
                f"delta    {delta:+.5f}\n"
                f"evaluations {len(res.trace)}")
    _emit(config, text)
    return OK


# clone

def cmd_clone(config: RunConfig) -> int:
    v = np.asarray(config.bloch, dtype=float)
    if not math.isclose(float(np.linalg.norm(v)), 1.0, abs_tol=1e-9):
        raise UsageError(f"--bloch {tuple(config.bloch)} is not a unit vector")
    if not 2 <= config.m <= cloning.MAX_CLONES:
        raise UsageError(f"--m must be between 2 and {cloning.MAX_CLONES}")
    psi = pure_from_bloch(v / np.linalg.norm(v))
    ens = cloning.symmetric_clone(psi, config.m)
    rows = []
    for k in range(config.m):
        rho = ens.marginal(k)
        b = to_bloch(rho).as_array()
        rows.append((k, *b, fidelity(rho, psi), float(np.linalg.norm(b))))
    bound = cloning.universal_clone_fidelity(config.m)
    if config.fmt == "json":
        text = json.dumps({
            "schema_version": serialize.SCHEMA_VERSION, "m": config.m,
            "source_bloch": [float(c) for c in v], "optimal_fidelity": bound,
            "clones": [{"clone": k, "bloch": [x, y, z], "fidelity": f, "bloch_length": n}
                       for k, x, y, z, f, n in rows],
        }, indent=2)
    elif config.fmt == "csv":
        text = _csv([("clone", "bloch_x", "bloch_y", "bloch_z", "fidelity", "bloch_length"),
                     *((k, *map(repr, r)) for k, *r in rows)])
    else:
        text = "\n".join(
            [f"1 -> {config.m} universal cloner, optimal fidelity {_fmt(bound)}"]
            + [f"clone {k}: bloch ({_fmt(x)}, {_fmt(y)}, {_fmt(z)})  fidelity {_fmt(f)}  "
               f"length {_fmt(n)}" for k, x, y, z, f, n in rows])
    _emit(config, text)
    return OK


COMMANDS = {
    "reproduce-table": cmd_reproduce_table,
    "eval": cmd_eval,
    "nogo": cmd_nogo,
    "optimize": cmd_optimize,
    "clone": cmd_clone,
}


def _bloch_arg(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(p) for p in text.split(","))
    except ValueError:
        parts = ()
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected X,Y,Z, got {text!r}")
    return parts


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qagency", description="Quantum agency circuit experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, regime_default="both"):
        sp.add_argument("--format", dest="fmt", choices=FORMATS, default="pretty")
        sp.add_argument("--out", help="write to this file instead of stdout")
        sp.add_argument("--regime", choices=(*agency.REGIMES, "both"), default=regime_default)

    sp = sub.add_parser("reproduce-table", help="evaluate the built-ins against the reference table")
    common(sp)
    sp.add_argument("--only", metavar="NAME")
    sp.add_argument("--copies-tol", type=float, default=reference.COPIES_TOL)
    sp.add_argument("--clones-tol", type=float, default=reference.CLONES_TOL)

    sp = sub.add_parser("eval", help="evaluate a built-in or JSON circuit spec")
    common(sp)
    sp.add_argument("--circuit", required=True, metavar="NAME|PATH")

    sp = sub.add_parser("nogo", help="no-go certificates")
    sp.add_argument("--format", dest="fmt", choices=FORMATS, default="pretty")
    sp.add_argument("--out")
    sp.add_argument("--alpha", type=complex)
    sp.add_argument("--beta", type=complex)
    sp.add_argument("--grid", type=int, default=8)

    sp = sub.add_parser("optimize", help="search superposed control-table entries")
    common(sp, regime_default="copies")
    sp.add_argument("--circuit", required=True, metavar="NAME|PATH")
    sp.add_argument("--budget", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--objective", choices=optimizer.STATISTICS, default="average")

    sp = sub.add_parser("clone", help="single-clone states of the universal cloner")
    sp.add_argument("--format", dest="fmt", choices=FORMATS, default="pretty")
    sp.add_argument("--out")
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--bloch", type=_bloch_arg, default=(0.0, 0.0, 1.0))
    return p


def parse_config(argv) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in ns.items() if k in fields})


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
        return COMMANDS[config.command](config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
