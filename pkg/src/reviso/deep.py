"""Run deeply recursive work on a thread with a large stack."""

from __future__ import annotations

import sys
import threading
from typing import Callable, TypeVar

R = TypeVar("R")

_STACK = 512 * 1024 * 1024
_local = threading.local()
_lock = threading.Lock()


def run_deep(fn: Callable[..., R], *args, **kwargs) -> R:
    """Call ``fn`` where Python recursion may go hundreds of thousands deep."""
    if getattr(_local, "deep", False):
        return fn(*args, **kwargs)
    box: dict[str, object] = {}

    def target() -> None:
        _local.deep = True
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as e:  # re-raised in the caller
            box["error"] = e

    with _lock:
        if sys.getrecursionlimit() < 1_000_000:
            sys.setrecursionlimit(1_000_000)
        old = threading.stack_size(_STACK)
        try:
            th = threading.Thread(target=target, name="reviso-deep")
            th.start()
        finally:
            threading.stack_size(old)
    th.join()
    if "error" in box:
        raise box["error"]  # type: ignore[misc]
    return box["value"]  # type: ignore[return-value]
