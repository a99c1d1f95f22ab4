"""Sample-file formats shared by the CLI subcommands.

Three interchangeable formats, all byte-deterministic for a given value
sequence:

* bin  -- 16-byte header (magic "GRNG", uint32 mode code, uint64 count,
  little-endian) followed by little-endian IEEE-754 payload: float64 in
  reference mode, float32 in pipeline mode.  Bit-exact interchange.
* csv  -- one value per line, printed with repr (shortest round-trip
  decimal), no header.
* json -- {"magic": "GRNG", "mode": ..., "count": ..., "values": [...]}.

Every generated sample file gets a sidecar metadata record at
"<path>.meta.json" describing the full generation config and the uniform
consumption, so runs are reproducible from the artifact alone.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

__all__ = [
    "FORMATS",
    "MAGIC",
    "ParseError",
    "read_samples",
    "read_sidecar",
    "sidecar_path",
    "write_samples",
    "write_sidecar",
]

MAGIC = b"GRNG"
FORMATS = ("csv", "json", "bin")

_MODE_CODES = {"reference": 0, "pipeline": 1}
_MODE_NAMES = {v: k for k, v in _MODE_CODES.items()}
_DTYPES = {"reference": "<f8", "pipeline": "<f4"}


class ParseError(ValueError):
    """Sample file is malformed or has an unknown format."""


def _dtype_for(mode):
    try:
        return np.dtype(_DTYPES[mode])
    except KeyError:
        raise ParseError(f"unknown mode {mode!r}") from None


def write_samples(path, values, mode, fmt):
    """Write a value sequence in the requested format; returns the Path."""
    path = Path(path)
    values = np.asarray(values)
    if fmt == "bin":
        header = MAGIC + struct.pack("<IQ", _MODE_CODES[mode], values.size)
        path.write_bytes(header + values.astype(_dtype_for(mode)).tobytes())
    elif fmt == "csv":
        lines = "\n".join(repr(float(v)) for v in values)
        path.write_text(lines + ("\n" if values.size else ""))
    elif fmt == "json":
        doc = {"magic": MAGIC.decode(), "mode": mode, "count": int(values.size),
               "values": [float(v) for v in values]}
        path.write_text(json.dumps(doc))
    else:
        raise ParseError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    return path


def _detect_format(path, data):
    suffix = path.suffix.lower().lstrip(".")
    if suffix in FORMATS:
        return suffix
    if data[:4] == MAGIC:
        return "bin"
    head = data[:64].lstrip()
    return "json" if head[:1] == b"{" else "csv"


def read_samples(path, fmt=None):
    """Read a sample file; returns (values, mode or None).

    Format is taken from `fmt`, else the file extension, else sniffed.
    csv files carry no mode, so mode comes back None for them.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    fmt = fmt or _detect_format(path, data)
    if fmt == "bin":
        if len(data) < 16 or data[:4] != MAGIC:
            raise ParseError(f"{path} is not a GRNG binary sample file")
        mode_code, count = struct.unpack("<IQ", data[4:16])
        if mode_code not in _MODE_NAMES:
            raise ParseError(f"unknown mode code {mode_code} in {path}")
        mode = _MODE_NAMES[mode_code]
        values = np.frombuffer(data[16:], dtype=_dtype_for(mode))
        if values.size != count:
            raise ParseError(
                f"{path}: header claims {count} values, payload has {values.size}"
            )
        return values.astype(np.float64), mode
    if fmt == "json":
        try:
            doc = json.loads(data)
            values = np.asarray(doc["values"], dtype=np.float64)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path} is not a GRNG json sample file: {exc}") from exc
        return values, doc.get("mode")
    if fmt == "csv":
        try:
            text = data.decode()
            values = np.array([float(line) for line in text.split()
                               if line.strip()], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(f"{path} is not a sample csv: {exc}") from exc
        return values, None
    raise ParseError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def sidecar_path(path):
    return Path(str(path) + ".meta.json")


def write_sidecar(path, meta):
    """Write deterministic JSON metadata next to a sample file."""
    out = sidecar_path(path)
    out.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return out


def read_sidecar(path):
    return json.loads(sidecar_path(path).read_text())
