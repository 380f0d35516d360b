"""Chunked, optionally threaded evaluation over Cartesian products of grid points."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 1 << 16


def phase_pairs(states: np.ndarray, momenta: np.ndarray, chunk: int):
    """Yield ``(x, p)`` batches covering the Cartesian product of the two point sets."""
    ns, npm = len(states), len(momenta)
    total = ns * npm
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        yield states[idx // npm], momenta[idx % npm]


def worker_count() -> int:
    raw = os.environ.get("ENTROFLOW_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, min(n, 32))


def map_pairs(fn, states: np.ndarray, momenta: np.ndarray, chunk: int = CHUNK):
    """Apply ``fn(x, p)`` to every batch of phase pairs; results keep grid order."""
    batches = list(phase_pairs(states, momenta, chunk))
    n = worker_count()
    if n == 1 or len(batches) == 1:
        return [fn(x, p) for x, p in batches], batches
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda b: fn(*b), batches)), batches


def chunked_max(fn, states: np.ndarray, momenta: np.ndarray, chunk: int = CHUNK) -> float:
    results, _ = map_pairs(fn, states, momenta, chunk)
    if not results:
        return 0.0
    return float(max(np.max(r) if np.size(r) else 0.0 for r in results))
