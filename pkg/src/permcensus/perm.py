"""Permutations on {0..n-1}, stored as image bytes.

A permutation of degree n is a ``bytes`` object b of length n with
b[i] = image of point i.  Subclassing bytes keeps permutations hashable,
immutable and compact, and lets composition run through the C-level
``bytes.translate``.  Degrees are capped at 255 (desk scale is <= 64).

Points are 0-based everywhere in code; cycle-notation text I/O is 1-based.
"""

from __future__ import annotations

import re
from math import lcm

_PAD = bytes(range(256))


class Perm(bytes):
    """A permutation given by its image tuple."""

    def __new__(cls, images):
        b = bytes(images)
        if sorted(b) != list(range(len(b))):
            raise ValueError(f"not a permutation of 0..{len(b) - 1}: {list(b)}")
        return super().__new__(cls, b)

    @property
    def degree(self) -> int:
        return len(self)

    def __mul__(self, other: "Perm") -> "Perm":
        """Product: apply self first, then other."""
        return _wrap(mul(self, other))

    def __invert__(self) -> "Perm":
        return _wrap(inv(self))

    def __pow__(self, k: int) -> "Perm":
        return _wrap(ppow(self, k))

    def __call__(self, point: int) -> int:
        return self[point]

    def order(self) -> int:
        return lcm(*(len(c) for c in self.cycles())) if self.cycles() else 1

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each rotated to start at its least point."""
        return cycles(self)

    def cycle_type(self) -> tuple[int, ...]:
        """Sorted cycle lengths including fixed points; a conjugacy invariant."""
        return cycle_type(self)

    def fixed_points(self) -> frozenset[int]:
        return frozenset(i for i, j in enumerate(self) if i == j)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self))

    def __repr__(self) -> str:
        return f"Perm({cycle_string(self)!r}, degree={len(self)})"

    def __str__(self) -> str:
        return cycle_string(self)


def _wrap(b: bytes) -> Perm:
    p = bytes.__new__(Perm, b)
    return p


def identity(n: int) -> bytes:
    return _PAD[:n]


def mul(p: bytes, q: bytes) -> bytes:
    """(p*q)[i] = q[p[i]]: apply p, then q."""
    return p.translate(q + _PAD[len(q):])


def inv(p: bytes) -> bytes:
    out = bytearray(len(p))
    for i, j in enumerate(p):
        out[j] = i
    return bytes(out)


def conj(p: bytes, g: bytes) -> bytes:
    """g^-1 * p * g, the conjugate of p by g (maps g[i] -> g[p[i]])."""
    return mul(mul(inv(g), p), g)


def ppow(p: bytes, k: int) -> bytes:
    n = len(p)
    if k < 0:
        p, k = inv(p), -k
    out = identity(n)
    while k:
        if k & 1:
            out = mul(out, p)
        p = mul(p, p)
        k >>= 1
    return out


def cycles(p: bytes) -> list[tuple[int, ...]]:
    seen = bytearray(len(p))
    out = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            continue
        c = [i]
        j = p[i]
        while j != i:
            seen[j] = 1
            c.append(j)
            j = p[j]
        out.append(tuple(c))
    return out


def cycle_type(p: bytes) -> tuple[int, ...]:
    lens = [len(c) for c in cycles(p)]
    lens += [1] * (len(p) - sum(lens))
    return tuple(sorted(lens))


def order(p: bytes) -> int:
    cs = cycles(p)
    return lcm(*(len(c) for c in cs)) if cs else 1


def fixed_points(p: bytes) -> frozenset[int]:
    return frozenset(i for i, j in enumerate(p) if i == j)


def is_identity(p: bytes) -> bool:
    return p == _PAD[:len(p)]


def cycle_string(p: bytes) -> str:
    """1-based cycle notation, identity printed as "()"."""
    cs = cycles(p)
    if not cs:
        return "()"
    return "".join("(" + " ".join(str(x + 1) for x in c) + ")" for c in cs)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, degree: int = 0) -> Perm:
    """Parse 1-based cycle notation like "(1 2 3)(4 5)".

    The degree is the larger of the given degree and the largest point
    mentioned.  Commas are tolerated as separators inside cycles.
    """
    stripped = text.strip()
    if not re.fullmatch(r"(\s*\([\d\s,]*\)\s*)+|\s*", stripped):
        raise ValueError(f"cannot parse permutation {text!r}")
    cyc = []
    for m in _CYCLE_RE.finditer(stripped):
        body = m.group(1).replace(",", " ").split()
        pts = [int(x) - 1 for x in body]
        if any(x < 0 for x in pts):
            raise ValueError(f"points must be positive in {text!r}")
        if len(set(pts)) != len(pts):
            raise ValueError(f"repeated point in cycle {m.group(0)!r}")
        if pts:
            cyc.append(pts)
    n = max([degree] + [max(c) + 1 for c in cyc if c])
    images = bytearray(identity(n))
    out = identity(n)
    for c in cyc:
        images = bytearray(identity(n))
        for a, b in zip(c, c[1:] + c[:1]):
            images[a] = b
        out = mul(out, bytes(images))
    return Perm(out)


def parse_perm_list(text: str, degree: int = 0) -> list[Perm]:
    """Parse a semicolon-separated list of cycle-notation permutations.

    All results are padded to a common degree.
    """
    parts = [s for s in text.split(";") if s.strip()]
    perms = [parse_perm(s, degree) for s in parts]
    n = max([degree] + [len(p) for p in perms])
    return [pad(p, n) for p in perms]


def pad(p: bytes, n: int) -> Perm:
    if len(p) > n:
        raise ValueError("cannot shrink a permutation")
    return _wrap(bytes(p) + _PAD[len(p):n])


def from_cycles(n: int, *cyc: tuple[int, ...]) -> Perm:
    """Build a degree-n permutation from 0-based cycles."""
    out = identity(n)
    for c in cyc:
        images = bytearray(identity(n))
        for a, b in zip(c, tuple(c[1:]) + (c[0],)):
            images[a] = b
        out = mul(out, bytes(images))
    return _wrap(out)
