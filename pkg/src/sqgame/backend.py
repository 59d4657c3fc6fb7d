"""Runtime knobs: kernel backend selection and the worker-count cap.

SQGAME_BACKEND selects the hot-kernel implementation:
    auto  (default) use numba if it imports, else pure numpy
    numba           require numba, fail loudly if missing
    numpy           force the pure-numpy einsum path

SQGAME_THREADS caps the worker count used for independent restarts and
probe batches (default 1, i.e. sequential). Results are deterministic for
any worker count: work items carry index-derived seeds and are merged with
order-independent reductions.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
U = TypeVar("U")

_VALID_BACKENDS = ("auto", "numba", "numpy")


def requested_backend() -> str:
    name = os.environ.get("SQGAME_BACKEND", "auto").strip().lower()
    if name not in _VALID_BACKENDS:
        raise ValueError(
            f"SQGAME_BACKEND must be one of {_VALID_BACKENDS}, got {name!r}"
        )
    return name


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def resolve_backend(name: str | None = None) -> str:
    """Map a requested backend name to the concrete one ('numba' or 'numpy')."""
    name = requested_backend() if name is None else name
    if name == "numpy":
        return "numpy"
    if name == "numba":
        if not numba_available():
            raise RuntimeError("SQGAME_BACKEND=numba but numba is not importable")
        return "numba"
    return "numba" if numba_available() else "numpy"


def worker_count() -> int:
    raw = os.environ.get("SQGAME_THREADS", "1").strip()
    n = int(raw)
    if n < 1:
        raise ValueError(f"SQGAME_THREADS must be >= 1, got {raw!r}")
    return n


def parallel_map(fn: Callable[[T], U], items: Iterable[T]) -> list[U]:
    """Order-preserving map, threaded when SQGAME_THREADS > 1."""
    seq: Sequence[T] = list(items)
    n = worker_count()
    if n <= 1 or len(seq) <= 1:
        return [fn(x) for x in seq]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, seq))
