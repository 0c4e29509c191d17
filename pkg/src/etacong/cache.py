"""On-disk cache for expensive series, keyed by a canonical parameter hash."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import __version__
from .series import Series

ENV_VAR = "ETACONG_CACHE_DIR"


@dataclass(frozen=True)
class CacheEntry:
    key: str
    payload: bytes
    version: str = __version__


def cache_key(command: str, params: dict) -> str:
    canon = json.dumps({"command": command, "params": params}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def resolve_dir(explicit: str | None = None) -> Path | None:
    d = explicit or os.environ.get(ENV_VAR)
    return Path(d) if d else None


def _path(root: Path, key: str) -> Path:
    return root / f"{key}.qsc"


def store(root: Path, entry: CacheEntry) -> Path:
    header = {
        "key": entry.key,
        "version": entry.version,
        "sha256": hashlib.sha256(entry.payload).hexdigest(),
        "length": len(entry.payload),
    }
    path = _path(root, entry.key)
    try:
        root.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(json.dumps(header, sort_keys=True).encode() + b"\n" + entry.payload)
        tmp.replace(path)
    except OSError as exc:
        raise OSError(f"cannot write cache file {path}: {exc}") from exc
    return path


def load(root: Path, key: str, version: str = __version__) -> CacheEntry | None:
    """The stored entry, or ``None`` on a miss, a version change or a corrupt file."""
    path = _path(root, key)
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        return None
    except OSError as exc:
        raise OSError(f"cannot read cache file {path}: {exc}") from exc
    head, sep, payload = raw.partition(b"\n")
    if not sep:
        return None
    try:
        header = json.loads(head)
    except ValueError:
        return None
    if header.get("key") != key or header.get("version") != version:
        return None
    if header.get("length") != len(payload) or header.get("sha256") != hashlib.sha256(payload).hexdigest():
        return None
    return CacheEntry(key, payload, version)


def cache_roundtrip(root: Path, entry: CacheEntry) -> CacheEntry | None:
    store(root, entry)
    return load(root, entry.key, entry.version)


def cached_series(root: Path | None, command: str, params: dict, compute: Callable[[], Series]) -> Series:
    if root is None:
        return compute()
    key = cache_key(command, params)
    hit = load(root, key)
    if hit is not None:
        try:
            return Series.from_bytes(hit.payload)
        except ValueError:
            pass
    s = compute()
    store(root, CacheEntry(key, s.to_bytes()))
    return s
