"""JSON and CSV formats for circuit specs, reports and certificates.

Complex numbers are written as ``[re, im]`` pairs and matrices as lists of
rows. Floats go through ``repr`` so files round-trip bit-exactly.
"""
from __future__ import annotations

import csv
import io
import json
from functools import lru_cache
from importlib import resources

import jsonschema
import numpy as np

from .agency import (METRICS, AgencyCircuitSpec, Aggregate, EvaluationReport, StateRecord,
                     aggregate)
from .qstate import PureState

SCHEMA_VERSION = 1
CSV_FIELDS = ("schema_version", "circuit", "regime", "row",
              "bloch_x", "bloch_y", "bloch_z", *METRICS)
AGGREGATE_ROWS = ("worst", "average", "best")


class SpecFormatError(ValueError):
    """A circuit-spec document failed schema or semantic validation."""


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    text = resources.files("qagency").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc, name: str):
    jsonschema.validate(doc, load_schema(name))


def _complex_out(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m) -> list:
    return [[_complex_out(z) for z in row] for row in np.asarray(m)]


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def spec_to_dict(spec: AgencyCircuitSpec) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": spec.name,
        "deliberation_unitaries": [matrix_to_json(u) for u in spec.deliberation_unitaries],
        "control_table": {b: matrix_to_json(v) for b, v in spec.control_table.items()},
        "target_state": [_complex_out(z) for z in spec.target_state.amplitudes],
    }


def spec_from_dict(doc) -> AgencyCircuitSpec:
    try:
        validate(doc, "circuit_spec")
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SpecFormatError(f"schema error at {where}: {exc.message}") from None
    try:
        target = doc.get("target_state")
        kwargs = {}
        if target is not None:
            kwargs["target_state"] = PureState([complex(re, im) for re, im in target])
        return AgencyCircuitSpec(
            doc["name"],
            tuple(matrix_from_json(u) for u in doc["deliberation_unitaries"]),
            {b: matrix_from_json(v) for b, v in doc["control_table"].items()},
            **kwargs,
        )
    except ValueError as exc:
        raise SpecFormatError(str(exc)) from None


def dump_spec(spec: AgencyCircuitSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)


def load_spec(text: str) -> AgencyCircuitSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFormatError(f"invalid JSON: {exc}") from None
    return spec_from_dict(doc)


def report_to_dict(report: EvaluationReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "circuit": report.circuit_name,
        "regime": report.regime,
        "records": [
            {"index": r.index, "bloch": list(r.bloch), "fidelity": r.fidelity,
             "bloch_length": r.bloch_length, "angle_error": r.angle_error}
            for r in report.records
        ],
        "aggregates": {
            m: {s: getattr(report.aggregates[m], s) for s in AGGREGATE_ROWS}
            for m in METRICS
        },
    }


def report_from_dict(doc) -> EvaluationReport:
    validate(doc, "report")
    records = tuple(
        StateRecord(r["index"], tuple(r["bloch"]), r["fidelity"], r["bloch_length"],
                    r["angle_error"])
        for r in doc["records"]
    )
    aggs = {m: Aggregate(**doc["aggregates"][m]) for m in METRICS}
    return EvaluationReport(doc["circuit"], doc["regime"], records, aggs)


def report_to_json(report: EvaluationReport) -> str:
    return json.dumps(report_to_dict(report), indent=2)


def report_to_csv(report: EvaluationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    head = (SCHEMA_VERSION, report.circuit_name, report.regime)
    for r in report.records:
        w.writerow((*head, r.index, *map(repr, r.bloch),
                    *(repr(r.metric(m)) for m in METRICS)))
    for stat in AGGREGATE_ROWS:
        w.writerow((*head, stat, "", "", "",
                    *(repr(getattr(report.aggregates[m], stat)) for m in METRICS)))
    return buf.getvalue()


def report_from_csv(text: str) -> EvaluationReport:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty report")
    records, aggs = [], {m: {} for m in METRICS}
    for row in rows:
        if int(row["schema_version"]) != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {row['schema_version']}")
        if row["row"] in AGGREGATE_ROWS:
            for m in METRICS:
                aggs[m][row["row"]] = float(row[m])
        else:
            records.append(StateRecord(
                int(row["row"]),
                tuple(float(row[k]) for k in ("bloch_x", "bloch_y", "bloch_z")),
                *(float(row[m]) for m in METRICS)))
    aggregates = {m: Aggregate(**aggs[m]) for m in METRICS} if all(
        len(a) == 3 for a in aggs.values()) else aggregate(records)
    return EvaluationReport(rows[0]["circuit"], rows[0]["regime"], tuple(records), aggregates)


def certificates_to_dict(certs) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "certificates": [c.to_dict() for c in certs],
        "all_valid": all(c.valid for c in certs),
        "all_passed": all(c.passed for c in certs),
    }
