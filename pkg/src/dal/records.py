"""Record files (one JSON object per line, header first) and the scan cache."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from .approx import ApproxVector
from .errors import PreconditionError

VERSION = 1
HEADER_KEYS = ("version", "spec", "n", "Qmax", "C", "lambda")


class RecordFileError(PreconditionError):
    pass


def created_stamp() -> str:
    """UTC timestamp from SOURCE_DATE_EPOCH (default 0) so reruns are byte-identical."""
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(epoch, timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def make_header(spec, n: int, qmax: int, C=None, lam=None, **extra) -> dict:
    h = {
        "version": VERSION,
        "spec": str(spec),
        "n": int(n),
        "Qmax": int(qmax),
        "C": None if C is None else str(C),
        "lambda": None if lam is None else str(lam),
        "created": created_stamp(),
    }
    h.update(extra)
    return h


def header_key(header: dict) -> tuple:
    return tuple(header.get(k) for k in HEADER_KEYS)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def render(header: dict, records) -> str:
    lines = [dumps({"header": header})]
    lines += [dumps(r.to_json() if isinstance(r, ApproxVector) else r) for r in records]
    return "\n".join(lines) + "\n"


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_records(path, header: dict, records) -> None:
    atomic_write(path, render(header, records))


def read_records(path) -> tuple[dict, list[ApproxVector]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise RecordFileError(f"cannot read {path}: {e}") from None
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise RecordFileError(f"{path}: empty file, header missing")
    try:
        first = json.loads(lines[0])
        header = first["header"]
        if not isinstance(header, dict) or header.get("version") is None:
            raise KeyError("version")
        recs = [ApproxVector.from_json(json.loads(ln)) for ln in lines[1:]]
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as e:
        raise RecordFileError(f"{path}: corrupt record file ({e})") from None
    if header["version"] != VERSION:
        raise RecordFileError(f"{path}: unsupported version {header['version']}")
    return header, recs


def cache_dir() -> Path:
    d = os.environ.get("DAL_CACHE_DIR")
    return Path(d) if d else Path.home() / ".cache" / "dal"


def cache_path(header: dict) -> Path:
    digest = hashlib.sha256(dumps(list(header_key(header))).encode()).hexdigest()[:32]
    return cache_dir() / f"{digest}.jsonl"


def cache_lookup(header: dict):
    """Cached (header, records) when the full header tuple matches, else None."""
    p = cache_path(header)
    if not p.exists():
        return None
    try:
        h, recs = read_records(p)
    except RecordFileError:
        return None
    if header_key(h) != header_key(header):
        return None
    return h, recs


def cache_store(header: dict, records) -> Path:
    p = cache_path(header)
    write_records(p, header, records)
    return p
