"""Parsers for the frontlab on-disk formats.

Only the documented artifact formats are read here (FLB1 snapshots and
the CSV/key-value text files); the producing package is never imported,
so the figures can be made anywhere the files land.

FLB1 layout: one ASCII header line `FLB1 <nx> <ny> <dx> <dy> <t>`,
then U and V as little-endian float64, each a C-ordered (ny, nx) block.
"""

import ast
from pathlib import Path

import numpy as np


class InputError(Exception):
    """Missing or corrupt input; the message always carries the path."""


def _open_bytes(path):
    path = Path(path)
    try:
        return path.read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None


def read_snapshot(path):
    """FLB1 file -> (t, dx, dy, U, V) with U, V shaped (ny, nx)."""
    raw = _open_bytes(path)
    eol = raw.find(b"\n")
    if eol < 0:
        raise InputError(f"{path}: no header line")
    header = raw[:eol].decode("ascii", errors="replace").split()
    if len(header) != 6 or header[0] != "FLB1":
        raise InputError(f"{path}: not an FLB1 snapshot (header {header!r})")
    try:
        nx, ny = int(header[1]), int(header[2])
        dx, dy, t = float(header[3]), float(header[4]), float(header[5])
    except ValueError:
        raise InputError(f"{path}: malformed FLB1 header fields {header[1:]!r}") from None
    payload = raw[eol + 1:]
    need = 2 * nx * ny * 8
    if len(payload) != need:
        raise InputError(f"{path}: payload holds {len(payload)} bytes, expected {need}")
    flat = np.frombuffer(payload, dtype="<f8")
    u = flat[: nx * ny].reshape(ny, nx).copy()
    v = flat[nx * ny:].reshape(ny, nx).copy()
    return t, dx, dy, u, v


def read_curve(path):
    """curve.csv -> float array of (ell, re_lambda, im_lambda) rows."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    if not lines or lines[0].split(",") != ["ell", "re_lambda", "im_lambda"]:
        raise InputError(f"{path}: unexpected curve header {lines[:1]!r}")
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise InputError(f"{path}: bad number on line {i}: {line!r}") from None
        if len(parts) != 3:
            raise InputError(f"{path}: expected 3 cells on line {i}, got {len(parts)}")
    return np.array(rows).reshape(-1, 3)


def read_meta(path):
    """Flat `key = repr(value)` sidecar -> dict."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    meta = {}
    for i, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        key, sep, value = line.partition(" = ")
        if not sep:
            raise InputError(f"{path}: line {i} is not `key = value`: {line!r}")
        try:
            meta[key.strip()] = ast.literal_eval(value)
        except (ValueError, SyntaxError):
            raise InputError(f"{path}: unparseable value on line {i}: {value!r}") from None
    return meta


def _cell(text):
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        return text  # verdict words and error class names stay as strings


def read_sweep(path):
    """sweep.csv -> (parameter_name, column_names, rows as dicts).

    Numeric cells become floats (nan included), empty cells None, and
    verdict-style words stay strings.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    if not lines or "," not in lines[0]:
        raise InputError(f"{path}: missing sweep header")
    columns = lines[0].split(",")
    pname = columns[0]
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise InputError(
                f"{path}: line {i} has {len(parts)} cells, header has {len(columns)}")
        rows.append({name: _cell(p) for name, p in zip(columns, parts)})
    return pname, columns, rows
