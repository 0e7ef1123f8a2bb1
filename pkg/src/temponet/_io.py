"""Shared sink handling for the CSV/JSON writers."""

from __future__ import annotations

import sys
from contextlib import contextmanager


@contextmanager
def text_sink(target):
    """Yield a writable text handle for a path, file object, or None (stdout)."""
    if target is None:
        yield sys.stdout
    elif hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def write_comments(fh, metadata: dict | None) -> None:
    for key, value in (metadata or {}).items():
        fh.write(f"# {key}: {value}\n")
