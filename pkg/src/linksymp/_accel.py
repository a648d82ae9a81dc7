"""Breadth-first distance search on the move lattice.

The hot loop (used heavily by exhaustive sweeps) is compiled with numba when
it is importable and ``LINKSYMP_NO_NUMBA`` is unset; otherwise a plain
Python BFS runs.  Both return the same integers.

States are packed into one int64 key: the first n-1 coordinates, offset
from the start vector, each get ``62 // (n-1)`` bits (the last coordinate
is fixed by the total).  A state leaving that window makes the kernel
report ``OUT_OF_RANGE`` and the caller falls back to the Python search.
"""

from __future__ import annotations

import os
from collections import deque

import numpy as np

NOT_FOUND = -1
OUT_OF_RANGE = -2

try:  # pragma: no cover - exercised implicitly when numba is present
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None


def numba_enabled() -> bool:
    return _numba is not None and os.environ.get("LINKSYMP_NO_NUMBA", "") not in ("1", "true", "yes")


if _numba is not None:

    @_numba.njit(cache=True)
    def _bfs_packed_nb(start, target, moves, cap, bits):  # pragma: no cover - compiled
        n = start.shape[0]
        k = n - 1
        half = np.int64(1) << (bits - 1)
        mask = (np.int64(1) << bits) - 1
        total = np.int64(0)
        for i in range(n):
            total += start[i]
        tkey = np.int64(0)
        for i in range(k):
            off = target[i] - start[i] + half
            if off < 1 or off >= mask:
                return OUT_OF_RANGE
            tkey |= off << (bits * i)
        skey = np.int64(0)
        for i in range(k):
            skey |= half << (bits * i)
        if skey == tkey:
            return 0
        seen = {skey}
        qkey = np.empty(cap + 1, dtype=np.int64)
        qdist = np.empty(cap + 1, dtype=np.int64)
        qkey[0] = skey
        qdist[0] = 0
        head = 0
        tail = 1
        x = np.empty(n, dtype=np.int64)
        while head < tail:
            key = qkey[head]
            dist = qdist[head]
            head += 1
            s = np.int64(0)
            for i in range(k):
                x[i] = ((key >> (bits * i)) & mask) - half + start[i]
                s += x[i]
            x[k] = total - s
            for m in range(moves.shape[0]):
                nk = np.int64(0)
                for i in range(k):
                    off = x[i] + moves[m, i] - start[i] + half
                    if off < 1 or off >= mask:
                        return OUT_OF_RANGE
                    nk |= off << (bits * i)
                if nk in seen:
                    continue
                if nk == tkey:
                    return dist + 1
                if tail >= cap:
                    return NOT_FOUND
                seen.add(nk)
                qkey[tail] = nk
                qdist[tail] = dist + 1
                tail += 1
        return NOT_FOUND

else:  # pragma: no cover
    _bfs_packed_nb = None


def bfs_distance_python(start, target, moves, cap: int) -> int:
    """Unpacked BFS over integer tuples; the reference implementation."""
    start = tuple(int(v) for v in start)
    target = tuple(int(v) for v in target)
    if start == target:
        return 0
    mv = [tuple(int(v) for v in row) for row in moves]
    seen = {start}
    queue = deque([(start, 0)])
    while queue:
        x, dist = queue.popleft()
        for m in mv:
            y = tuple(a + b for a, b in zip(x, m))
            if y in seen:
                continue
            if y == target:
                return dist + 1
            if len(seen) >= cap:
                return NOT_FOUND
            seen.add(y)
            queue.append((y, dist + 1))
    return NOT_FOUND


def bfs_distance(start, target, moves, cap: int) -> int:
    """Shortest number of moves from start to target, or NOT_FOUND past cap."""
    n = len(start)
    if n <= 1:
        return 0 if tuple(start) == tuple(target) else NOT_FOUND
    if numba_enabled():
        bits = 62 // (n - 1)
        if bits >= 4:
            s = np.asarray(start, dtype=np.int64)
            t = np.asarray(target, dtype=np.int64)
            m = np.asarray(moves, dtype=np.int64).reshape(len(moves), n)
            res = int(_bfs_packed_nb(s, t, m, int(cap), int(bits)))
            if res != OUT_OF_RANGE:
                return res
    return bfs_distance_python(start, target, moves, cap)
