"""Plain-text correspondence files and the sweep CSV format.

Correspondence files are whitespace-separated decimal floats with ``#``
comments; the first meaningful line declares the kind:

    absolute            point xyz, bearing xyz, offset xyz   (9 fields/line)
    relative            dir1, moment1, dir2, moment2         (12 fields/line)

Bearings and directions are renormalized on load (moments rescale with
their direction so the line is unchanged). Relative records whose
direction-moment product exceeds 1e-6 are rejected; smaller violations
are projected out so downstream invariants hold exactly.

The sweep CSV stores one trial record per row with floats printed to 17
significant digits, so write -> read -> write is byte-identical.
"""

from __future__ import annotations

import io
from typing import Sequence

import numpy as np

from .absolute import PointRayCorrespondence
from .bench import TrialRecord
from .exceptions import ConstraintViolation, ParseError
from .geometry import ObservedRay, PlueckerLine
from .relative import RayCorrespondence

KIND_ABSOLUTE = "absolute"
KIND_RELATIVE = "relative"

CSV_HEADER = "noise,trial,solver,rot_err,trans_err,time_ns,iters,final_obj,converged"

_PLUECKER_TOL = 1e-6


def _fmt(x: float) -> str:
    return "%.17g" % x


def _load_line(direction, moment, lineno: int) -> PlueckerLine:
    d = np.asarray(direction, dtype=float)
    m = np.asarray(moment, dtype=float)
    n = float(np.linalg.norm(d))
    if n < 1e-12:
        raise ParseError(f"line {lineno}: zero direction vector")
    d = d / n
    m = m / n
    residual = float(d @ m)
    if abs(residual) > _PLUECKER_TOL:
        raise ConstraintViolation(
            f"line {lineno}: direction.moment = {residual:g} exceeds {_PLUECKER_TOL:g}")
    return PlueckerLine(d, m - residual * d)


def _parse_records(stream, path: str):
    kind = None
    records = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if kind is None:
            if line not in (KIND_ABSOLUTE, KIND_RELATIVE):
                raise ParseError(
                    f"line {lineno}: expected header '{KIND_ABSOLUTE}' or "
                    f"'{KIND_RELATIVE}', got {line!r}")
            kind = line
            continue
        tokens = line.split()
        try:
            values = [float(tok) for tok in tokens]
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric field") from None
        if kind == KIND_ABSOLUTE:
            if len(values) != 9:
                raise ParseError(
                    f"line {lineno}: expected 9 fields, got {len(values)}")
            bearing = np.array(values[3:6])
            if np.linalg.norm(bearing) < 1e-12:
                raise ParseError(f"line {lineno}: zero bearing vector")
            records.append(PointRayCorrespondence(
                np.array(values[0:3]),
                ObservedRay.from_direction(bearing, np.array(values[6:9]))))
        else:
            if len(values) != 12:
                raise ParseError(
                    f"line {lineno}: expected 12 fields, got {len(values)}")
            records.append(RayCorrespondence(
                _load_line(values[0:3], values[3:6], lineno),
                _load_line(values[6:9], values[9:12], lineno)))
    if kind is None:
        raise ParseError(f"{path}: missing kind header")
    return kind, records


def parse_correspondence_file(path):
    """-> (kind, correspondences). Errors carry the offending line number."""
    with open(path, "r", encoding="utf-8") as stream:
        return _parse_records(stream, str(path))


def write_correspondence_file(path, kind: str, corrs) -> None:
    """Inverse of parse_correspondence_file, lossless for float64 fields."""
    if kind not in (KIND_ABSOLUTE, KIND_RELATIVE):
        raise ValueError(f"unknown kind {kind!r}")
    with open(path, "w", encoding="utf-8") as stream:
        stream.write(kind + "\n")
        for corr in corrs:
            if kind == KIND_ABSOLUTE:
                fields = [*corr.point, *corr.ray.bearing, *corr.ray.offset]
            else:
                fields = [*corr.line1.direction, *corr.line1.moment,
                          *corr.line2.direction, *corr.line2.moment]
            stream.write(" ".join(_fmt(x) for x in fields) + "\n")


def record_to_csv_row(record: TrialRecord) -> str:
    return ",".join([
        _fmt(record.noise_sigma),
        str(record.trial_index),
        record.solver_name,
        _fmt(record.rot_err_frobenius),
        _fmt(record.trans_err_norm),
        str(record.wall_time_ns),
        str(record.outer_iterations),
        _fmt(record.final_objective),
        "1" if record.converged else "0",
    ])


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    lines = [CSV_HEADER]
    lines.extend(record_to_csv_row(r) for r in records)
    return "\n".join(lines) + "\n"


def write_sweep_csv(records: Sequence[TrialRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as stream:
        stream.write(records_to_csv(records))


def _parse_csv_row(row: str, lineno: int) -> TrialRecord:
    fields = row.split(",")
    if len(fields) != 9:
        raise ParseError(f"line {lineno}: expected 9 CSV fields, got {len(fields)}")
    try:
        return TrialRecord(
            noise_sigma=float(fields[0]),
            trial_index=int(fields[1]),
            solver_name=fields[2],
            rot_err_frobenius=float(fields[3]),
            trans_err_norm=float(fields[4]),
            wall_time_ns=int(fields[5]),
            outer_iterations=int(fields[6]),
            final_objective=float(fields[7]),
            converged=fields[8] == "1",
        )
    except ValueError:
        raise ParseError(f"line {lineno}: malformed CSV field") from None


def read_sweep_csv(source) -> list:
    """Parse a sweep CSV from a path or a file-like object."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as stream:
            text = stream.read()
    lines = text.splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ParseError("line 1: missing or unexpected CSV header")
    return [_parse_csv_row(row, lineno)
            for lineno, row in enumerate(lines[1:], start=2) if row]


def csv_round_trip(text: str) -> str:
    """Reserialize a sweep CSV; byte-identical for well-formed input."""
    return records_to_csv(read_sweep_csv(io.StringIO(text)))
