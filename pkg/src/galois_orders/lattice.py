"""Integer lattices and bounded monoid membership for shift vectors."""

from __future__ import annotations

from collections import deque
from typing import Sequence


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of an integer matrix (zero rows dropped).

    Pivots are positive and entries above each pivot are reduced modulo it.
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    m = len(A[0])
    out: list[list[int]] = []
    col = 0
    while A and col < m:
        nz = [r for r in A if r[col] != 0]
        rest = [r for r in A if r[col] == 0]
        if not nz:
            col += 1
            continue
        # Euclid on column `col` across the non-zero rows
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            new = [piv]
            for r in nz[1:]:
                k = r[col] // piv[col]
                r = [a - k * b for a, b in zip(r, piv)]
                (new if r[col] != 0 else rest).append(r)
            nz = new
        piv = nz[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        out.append(piv)
        A = [r for r in rest if any(r)]
        col += 1
    # reduce entries above pivots
    for i, row in enumerate(out):
        c = next(j for j, a in enumerate(row) if a)
        for k in range(i):
            q = out[k][c] // row[c]
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], row)]
    return out


def lattice_is_full(rows: Sequence[Sequence[int]], dim: int) -> bool:
    """True iff the rows generate ``Z^dim`` as a group."""
    if dim == 0:
        return True
    H = hermite_normal_form(rows)
    if len(H) != dim:
        return False
    return all(H[i][i] == 1 for i in range(dim))


def lattice_contains(rows: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership of ``v`` in the lattice spanned by ``rows`` (via reduction against the HNF)."""
    H = hermite_normal_form(rows)
    v = list(v)
    for row in H:
        c = next(j for j, a in enumerate(row) if a)
        if v[c] % row[c]:
            return False
        k = v[c] // row[c]
        v = [a - k * b for a, b in zip(v, row)]
    return not any(v)


def monoid_witness(
    gens: Sequence[Sequence[int]], target: Sequence[int], bound: int = 8
) -> list[tuple[int, ...]] | None:
    """Express ``target`` as a sum of ``gens`` by BFS inside the box ``[-bound, bound]^d``.

    Returns the list of summands or ``None`` when the bounded search fails
    (which is inconclusive, not a proof of non-membership).
    """
    target = tuple(target)
    start = (0,) * len(target)
    if target == start:
        return []
    gens = [tuple(g) for g in gens if any(g)]
    parent: dict[tuple[int, ...], tuple[tuple[int, ...], tuple[int, ...]] | None] = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for g in gens:
            nxt = tuple(a + b for a, b in zip(cur, g))
            if nxt in parent or any(abs(a) > bound for a in nxt):
                continue
            parent[nxt] = (cur, g)
            if nxt == target:
                path = []
                node = nxt
                while parent[node] is not None:
                    prev, step = parent[node]
                    path.append(step)
                    node = prev
                return path[::-1]
            queue.append(nxt)
    return None
