"""Permutations of ``range(n)`` stored as tuples of images, and the
normalized Hamming metric on them."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Perm = tuple


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_perm(p: Sequence[int]) -> bool:
    n = len(p)
    return sorted(p) == list(range(n))


def compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    """``p ∘ q``: apply ``q`` first."""
    return tuple(p[x] for x in q)


def inverse(p: Sequence[int]) -> Perm:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def power(p: Sequence[int], k: int) -> Perm:
    result = identity(len(p))
    base = tuple(p)
    if k < 0:
        base, k = inverse(base), -k
    while k:
        if k & 1:
            result = compose(base, result)
        base = compose(base, base)
        k >>= 1
    return result


def transposition(n: int, a: int, b: int) -> Perm:
    p = list(range(n))
    p[a], p[b] = b, a
    return tuple(p)


def disagreements(p: Sequence[int], q: Sequence[int]) -> int:
    return sum(1 for a, b in zip(p, q) if a != b)


def moved(p: Sequence[int]) -> int:
    return sum(1 for x, y in enumerate(p) if x != y)


def hamming(p: Sequence[int], q: Sequence[int]) -> Fraction:
    """Normalized Hamming distance: fraction of points where ``p`` and ``q`` differ."""
    if len(p) != len(q):
        raise ValueError("permutations of different degree")
    if not p:
        return Fraction(0)
    return Fraction(disagreements(p, q), len(p))


def cycles(p: Sequence[int]) -> list[list[int]]:
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        x = start
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = p[x]
        out.append(cyc)
    return out


def order(p: Sequence[int]) -> int:
    from math import lcm

    result = 1
    for c in cycles(p):
        result = lcm(result, len(c))
    return result


def from_images(images: Iterable[int]) -> Perm:
    p = tuple(int(x) for x in images)
    if not is_perm(p):
        raise ValueError(f"not a permutation: {list(p)[:16]}")
    return p
