"""Content-addressed on-disk store for reduced Gröbner bases.

Entries are JSON files named by the canonical key.  Writes go to a temporary
file in the same directory followed by ``os.replace``, so readers never see
a partial entry.  A corrupt entry is reported, discarded and recomputed.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

log = logging.getLogger(__name__)

FORMAT = 1


def _checksum(key: str, basis) -> str:
    return hashlib.sha256(json.dumps([key, list(basis)]).encode()).hexdigest()


class DiskCache:
    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self.warnings: list[str] = []

    def path_for(self, key: str) -> Path:
        return self.directory / key[:2] / f"{key}.json"

    def get(self, key: str):
        path = self.path_for(key)
        try:
            raw = path.read_text()
        except FileNotFoundError:
            self.misses += 1
            return None
        try:
            entry = json.loads(raw)
            basis = entry["basis"]
            ok = (entry.get("format") == FORMAT and entry.get("key") == key
                  and isinstance(basis, list) and all(isinstance(b, str) for b in basis)
                  and entry.get("checksum") == _checksum(key, basis))
        except (ValueError, KeyError, TypeError):
            ok = False
        if not ok:
            msg = f"corrupt cache entry {path.name}; recomputed"
            log.warning(msg)
            self.warnings.append(msg)
            self.misses += 1
            try:
                path.unlink()
            except OSError:
                pass
            return None
        self.hits += 1
        return basis

    def put(self, key: str, basis) -> None:
        path = self.path_for(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {"format": FORMAT, "key": key, "basis": list(basis), "checksum": _checksum(key, basis)}
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(entry, fh)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise

    def stats(self) -> dict:
        return {"hits": self.hits, "misses": self.misses, "warnings": list(self.warnings)}
