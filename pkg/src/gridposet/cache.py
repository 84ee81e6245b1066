"""Append-only result cache for expensive CLI searches.

Line-delimited JSON records {"key", "ts", "value"}.  Keys embed the code
version, so stale entries are ignored after upgrades simply by never
matching.  Appends take an advisory exclusive lock; concurrent readers
need no lock because a torn trailing line is skipped with a warning.
"""

from __future__ import annotations

import json
import sys
import time
from typing import Optional

try:
    import fcntl
except ImportError:  # non-POSIX: locking degrades to best effort
    fcntl = None

CACHE_ENV_VAR = "GRIDPOSET_CACHE"


def make_key(command: str, params: dict, version: str) -> str:
    canonical = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return f"{command}|{canonical}|v{version}"


class ResultCache:
    def __init__(self, path: str):
        self.path = path

    def lookup(self, key: str) -> Optional[dict]:
        try:
            fh = open(self.path, "r", encoding="utf-8")
        except FileNotFoundError:
            return None
        with fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError:
                    print(f"warning: ignoring corrupt cache line {lineno} in {self.path}",
                          file=sys.stderr)
                    continue
                if record.get("key") == key:
                    return record.get("value")
        return None

    def store(self, key: str, value: dict) -> None:
        if self.lookup(key) is not None:
            return  # entries are immutable once written
        record = json.dumps({"key": key, "ts": time.time(), "value": value},
                            sort_keys=True, separators=(",", ":"))
        with open(self.path, "a", encoding="utf-8") as fh:
            if fcntl is not None:
                fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
            try:
                fh.write(record + "\n")
                fh.flush()
            finally:
                if fcntl is not None:
                    fcntl.flock(fh.fileno(), fcntl.LOCK_UN)
