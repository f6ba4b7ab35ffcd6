"""Curve and signature CSV files, map JSON."""

from __future__ import annotations

import contextlib
import csv
import json
from pathlib import Path
from typing import IO, Union

import numpy as np

from .curve_model import SampledCurve
from .errors import AffineCurveError, ParseError
from .group import SpecialAffineMap
from .invariants import AffineSignature

CURVE_HEADER = ("t", "x", "y", "z")
SIGNATURE_HEADER = ("sigma", "chi1", "chi2")

Target = Union[str, Path, IO[str]]


def _opened(target: Target):
    # Streams are written in place and left open.
    if hasattr(target, "write"):
        return contextlib.nullcontext(target)
    return open(target, "w", newline="")


def _read_table(path: str | Path, header: tuple[str, ...]) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(cell.strip() for cell in row)]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: empty file")
    found = tuple(cell.strip() for cell in rows[0])
    if found != header:
        raise ParseError(f"{path}: expected header {','.join(header)}, got {','.join(found)}")
    data = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise ParseError(f"{path}: line {i + 2} has {len(row)} fields, expected {len(header)}")
        try:
            data[i] = [float(cell) for cell in row]
        except ValueError as exc:
            raise ParseError(f"{path}: line {i + 2}: {exc}") from exc
    if not np.all(np.isfinite(data)):
        raise ParseError(f"{path}: non-finite value")
    return data


def _write_table(path: Target, header: tuple[str, ...], columns: list[np.ndarray]) -> None:
    with _opened(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([repr(float(v)) for v in row])


def read_curve_csv(path: str | Path) -> SampledCurve:
    data = _read_table(path, CURVE_HEADER)
    try:
        return SampledCurve(data[:, 0], data[:, 1:])
    except AffineCurveError:
        raise
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_curve_csv(path: Target, curve: SampledCurve) -> None:
    p = curve.points
    _write_table(path, CURVE_HEADER, [curve.params, p[:, 0], p[:, 1], p[:, 2]])


def read_signature_csv(path: str | Path) -> AffineSignature:
    data = _read_table(path, SIGNATURE_HEADER)
    if len(data) == 0:
        raise ParseError(f"{path}: no samples")
    return AffineSignature(data[:, 0], data[:, 1], data[:, 2])


def write_signature_csv(path: Target, sig: AffineSignature) -> None:
    _write_table(path, SIGNATURE_HEADER, [sig.sigma, sig.chi1, sig.chi2])


def read_map_json(path: str | Path) -> SpecialAffineMap:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return SpecialAffineMap.from_dict(data)


def write_map_json(path: Target, m: SpecialAffineMap) -> None:
    with _opened(path) as fh:
        json.dump(m.to_dict(), fh)
        fh.write("\n")
