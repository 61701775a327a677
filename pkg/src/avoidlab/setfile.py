"""Plain-text set descriptions, GridSet files and CSV tables.

Set file (one record per line, ``#`` starts a comment)::

    bounds 0 8 0 8
    band 4 4.125
    band 0 0.0625

or ``box x_lo x_hi y_lo y_hi`` records instead of ``band c_lo c_hi``; a file
holds boxes or bands, never both.  Band files need a square ``bounds 0 R 0 R``.

GridSet file::

    gridset 12
    0 3
    5 7

All writes go to a temporary file in the target directory and are renamed
into place.
"""
from __future__ import annotations

import csv
import io
import os
import tempfile
from typing import Iterable, Sequence, Union

import numpy as np

from .constructions import BandSet
from .geometry import Box, BoxUnion
from .graham import GridSet


class SetFileError(ValueError):
    pass


def atomic_write_text(path, text: str) -> None:
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _num(v: float) -> str:
    return repr(float(v))


# --------------------------------------------------------------------------
# set descriptions

def format_set(S: Union[BoxUnion, BandSet]) -> str:
    lines = []
    if isinstance(S, BandSet):
        lines.append(f"bounds 0.0 {_num(S.R)} 0.0 {_num(S.R)}")
        lines += [f"band {_num(a)} {_num(b)}" for a, b in S.bands]
    elif isinstance(S, BoxUnion):
        bb = S.bounding
        lines.append(f"bounds {_num(bb.X.lo)} {_num(bb.X.hi)} {_num(bb.Y.lo)} {_num(bb.Y.hi)}")
        lines += ["box " + " ".join(_num(v) for v in b.as_tuple()) for b in S.boxes]
    else:
        raise TypeError(f"cannot format {type(S).__name__}")
    return "\n".join(lines) + "\n"


def parse_set(text: str) -> Union[BoxUnion, BandSet]:
    bounds, boxes, bands = None, [], []
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tag, *rest = line.split()
        try:
            vals = [float(v) for v in rest]
        except ValueError:
            raise SetFileError(f"line {k}: non-numeric field") from None
        want = {"bounds": 4, "box": 4, "band": 2}.get(tag)
        if want is None:
            raise SetFileError(f"line {k}: unknown record {tag!r}")
        if len(vals) != want:
            raise SetFileError(f"line {k}: {tag} needs {want} numbers")
        if tag == "bounds":
            if bounds is not None:
                raise SetFileError(f"line {k}: duplicate bounds")
            bounds = vals
        elif tag == "box":
            boxes.append(vals)
        else:
            bands.append(vals)
    if boxes and bands:
        raise SetFileError("file mixes box and band records")
    try:
        if bands:
            if bounds is None or bounds[0] != 0 or bounds[2] != 0 or bounds[1] != bounds[3]:
                raise SetFileError("band files need square bounds 0 R 0 R")
            return BandSet(bounds[1], [tuple(b) for b in bands])
        bb = Box.from_bounds(*bounds) if bounds is not None else None
        if bb is None and not boxes:
            raise SetFileError("empty set file without bounds")
        return BoxUnion.from_tuples(boxes, bounding=bb, normalize=False)
    except SetFileError:
        raise
    except ValueError as e:
        raise SetFileError(str(e)) from None


def read_set(path) -> Union[BoxUnion, BandSet]:
    with open(path, encoding="utf-8") as fh:
        return parse_set(fh.read())


def write_set(path, S) -> None:
    atomic_write_text(path, format_set(S))


# --------------------------------------------------------------------------
# GridSet files

def format_gridset(B: GridSet) -> str:
    lines = [f"gridset {B.n}"] + [f"{x} {y}" for x, y in B.points()]
    return "\n".join(lines) + "\n"


def parse_gridset(text: str) -> GridSet:
    n, pts = None, []
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "gridset":
                raise SetFileError(f"line {k}: expected 'gridset n'")
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise SetFileError(f"line {k}: expected 'x y'")
        try:
            pts.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise SetFileError(f"line {k}: coordinates must be integers") from None
    if n is None:
        raise SetFileError("missing 'gridset n' header")
    try:
        return GridSet.from_points(n, pts)
    except ValueError as e:
        raise SetFileError(str(e)) from None


def read_gridset(path) -> GridSet:
    with open(path, encoding="utf-8") as fh:
        return parse_gridset(fh.read())


def write_gridset(path, B: GridSet) -> None:
    atomic_write_text(path, format_gridset(B))


# --------------------------------------------------------------------------
# CSV

def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        if len(r) != len(header):
            raise ValueError("row length does not match header")
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    atomic_write_text(path, format_csv(header, rows))


def parse_csv(text: str, required: Sequence[str] = ()) -> tuple:
    """Return (header, rows) with rows as lists of strings; checks required columns."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise SetFileError("empty CSV")
    header, body = rows[0], [r for r in rows[1:] if r]
    missing = [c for c in required if c not in header]
    if missing:
        raise SetFileError(f"missing columns: {', '.join(missing)}")
    for k, r in enumerate(body, 2):
        if len(r) != len(header):
            raise SetFileError(f"line {k}: expected {len(header)} fields")
    return header, body


def read_csv(path, required: Sequence[str] = ()) -> tuple:
    with open(path, encoding="utf-8") as fh:
        return parse_csv(fh.read(), required)
