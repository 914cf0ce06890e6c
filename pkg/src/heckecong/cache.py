"""On-disk JSON cache for space summaries and Hecke characteristic polynomials.

Layout: ``<root>/<N mod 256 as 2 hex digits>/<N>/<name>.json``.  Every file
carries a format version and a SHA-256 checksum of its payload; a file that
fails either check is ignored and recomputed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any

from .bounds import hecke_charpolys
from .modsym.hecke import AL_ORIENTATION
from .poly import IntPoly

FORMAT_VERSION = 1
log = logging.getLogger(__name__)


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def checksum(payload: Any) -> str:
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()


class ResultCache:
    """A directory of checksummed JSON records keyed by (N, name).

    With ``root=None`` the cache is disabled: loads miss and stores are dropped.
    """

    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root is not None else None

    @property
    def enabled(self) -> bool:
        return self.root is not None

    def path(self, N: int, name: str) -> Path:
        if self.root is None:
            raise RuntimeError("cache is disabled")
        return self.root / f"{N % 256:02x}" / str(N) / f"{name}.json"

    def load(self, N: int, name: str) -> dict | None:
        if self.root is None:
            return None
        path = self.path(N, name)
        try:
            record = json.loads(path.read_text())
        except FileNotFoundError:
            return None
        except (OSError, ValueError) as exc:
            log.warning("unreadable cache file %s (%s); recomputing", path, exc)
            return None
        if not isinstance(record, dict):
            log.warning("malformed cache file %s; recomputing", path)
            return None
        if record.get("format") != FORMAT_VERSION:
            log.info("cache file %s has format %r; recomputing", path, record.get("format"))
            return None
        payload = record.get("payload")
        if record.get("N") != N or record.get("name") != name or record.get("checksum") != checksum(payload):
            log.warning("checksum mismatch in %s; recomputing", path)
            return None
        return payload

    def store(self, N: int, name: str, payload: dict) -> None:
        if self.root is None:
            return
        path = self.path(N, name)
        path.parent.mkdir(parents=True, exist_ok=True)
        record = {
            "format": FORMAT_VERSION,
            "N": N,
            "name": name,
            "payload": payload,
            "checksum": checksum(payload),
        }
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(canonical_json(record))
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise


class CachedCharpolys:
    """A charpoly source for bounds/stats that reads and fills a ResultCache."""

    def __init__(self, cache: ResultCache):
        self.cache = cache

    def __call__(self, N: int, ell: int, size_cap: int) -> tuple[IntPoly, IntPoly]:
        name = f"charpoly_T{ell}"
        hit = self.cache.load(N, name)
        if hit is not None:
            return IntPoly(hit["plus"]), IntPoly(hit["minus"])
        plus, minus = hecke_charpolys(N, ell, size_cap)
        self.cache.store(N, name, {"ell": ell, "plus": list(plus.coeffs), "minus": list(minus.coeffs)})
        if self.cache.load(N, "space") is None:
            self.cache.store(N, "space", space_summary(N, plus.degree, minus.degree))
        return plus, minus


def space_summary(N: int, dim_plus: int, dim_minus: int) -> dict:
    return {
        "N": N,
        "cuspidal_dimension": dim_plus + dim_minus,
        "dim_plus": dim_plus,
        "dim_minus": dim_minus,
        "al_orientation": AL_ORIENTATION,
    }
