"""File helpers shared by the CLI: CSV matrices, deterministic JSON, config hashes."""

from __future__ import annotations

import csv
import hashlib
import json
import os
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError


def config_hash(config: dict) -> str:
    """First 16 hex digits of the SHA-256 of the canonical JSON form."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def read_matrix(path) -> tuple[list[str], np.ndarray]:
    """CSV with a header row of variable names and one numeric row per sample.

    Lines starting with ``#`` are ignored.
    """
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    try:
        X = np.array([[float(c) for c in r] for r in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise ConfigError(f"{path}: non-numeric entry ({exc})") from exc
    if X.size == 0:
        raise ConfigError(f"{path} has a header but no rows")
    if X.ndim != 2 or X.shape[1] != len(header):
        raise ConfigError(f"{path}: every row needs {len(header)} values")
    if not np.all(np.isfinite(X)):
        raise ConfigError(f"{path} contains non-finite values")
    return header, X


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], chash: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if chash is not None:
            fh.write(f"# config_hash={chash}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(x) for x in row])


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_json(path, doc: dict, chash: str | None = None) -> None:
    if chash is not None:
        doc = dict(doc, config_hash=chash)
    with open(path, "w") as fh:
        fh.write(dumps(doc))


def read_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def ensure_dir(path) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from exc
    return str(path)
