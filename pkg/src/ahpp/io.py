"""Plain-text serialization of configurations, sequences and tables.

Every file starts with ``#``-prefixed header lines carrying the tool version
and a ``config.key=value`` echo of the run configuration.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from . import __version__
from .sampler import AhConfiguration, LatticeConfiguration


def header_lines(config: dict | None = None) -> list[str]:
    lines = [f"# ahpp {__version__}"]
    for key in sorted(config or {}):
        lines.append(f"# config.{key}={config[key]}")
    return lines


def _split_header(text: str) -> tuple[dict, list[str]]:
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            item = line[1:].strip()
            if "=" in item and not item.startswith("config."):
                k, v = item.split("=", 1)
                meta[k.strip()] = v.strip()
        elif line.strip():
            body.append(line)
    return meta, body


def configuration_to_text(cfg, fmt: str = "csv", config: dict | None = None) -> str:
    """Serialize a lattice or AH configuration.

    CSV lists one lattice index per line under an ``index`` column, with
    ``a``, ``shift``, ``offset`` and ``n_sites`` in the header.  JSON holds
    the same fields in one object.
    """
    base = cfg.base if isinstance(cfg, AhConfiguration) else cfg
    shift = cfg.shift if isinstance(cfg, AhConfiguration) else 0.0
    fields = {"a": base.a, "shift": shift, "offset": int(base.offset), "n_sites": int(base.n_sites)}
    if fmt == "json":
        doc = {"version": __version__, "config": dict(config or {}), **fields,
               "indices": base.indices.tolist()}
        return json.dumps(doc, indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    lines = header_lines(config)
    lines += [f"# {k}={repr(v) if isinstance(v, float) else v}" for k, v in fields.items()]
    lines.append("index")
    lines += [str(int(i)) for i in base.indices]
    return "\n".join(lines) + "\n"


def configuration_from_text(text: str, fmt: str = "csv"):
    if fmt == "json":
        doc = json.loads(text)
        a, shift = float(doc["a"]), float(doc["shift"])
        offset, n_sites, idx = int(doc["offset"]), int(doc["n_sites"]), doc["indices"]
    elif fmt == "csv":
        meta, body = _split_header(text)
        a, shift = float(meta["a"]), float(meta["shift"])
        offset, n_sites = int(meta["offset"]), int(meta["n_sites"])
        idx = [int(v) for v in body[1:]]
    else:
        raise ValueError(f"unknown format {fmt!r}")
    base = LatticeConfiguration(a, np.asarray(idx, dtype=np.int64), n_sites, offset)
    if a == 0.5 and shift:
        return AhConfiguration(base, shift)
    return base


def sequence_to_text(seq, config: dict | None = None) -> str:
    """One half-integer per line, e.g. ``3.5``."""
    lines = header_lines(config)
    lines += [f"{v // 2}.5" if v % 2 else f"{v // 2}" for v in seq.doubled.tolist()]
    return "\n".join(lines) + "\n"


def sequence_from_text(text: str) -> np.ndarray:
    """Doubled integer values of a sequence file."""
    _, body = _split_header(text)
    return np.array([int(round(2 * float(v))) for v in body], dtype=np.int64)


def table_to_text(rows: list[dict], fmt: str = "csv", config: dict | None = None) -> str:
    """Rows of equal keys as CSV (with header block) or JSON."""
    if fmt == "json":
        return json.dumps({"version": __version__, "config": dict(config or {}), "rows": rows},
                          indent=1) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    buf.write("\n".join(header_lines(config)) + "\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()


def write_text(text: str, path: str | Path | None, stream=None) -> None:
    """Write to ``path``, or to ``stream`` (stdout) when no path is given."""
    if path is None or str(path) == "-":
        stream.write(text)
    else:
        Path(path).write_text(text)
