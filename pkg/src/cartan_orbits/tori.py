"""
Canonical maximal tori t_r, torus coordinates, weights and the index.

Variables are 0-based.  For a kind with torus rank mu the first r basis
vectors use y_i = 1 + x_i and the rest use x_i:

    W:  y_i d_i (i < r),                      x_i d_i (r <= i < n)
    S:  y_i d_i - x_{n-1} d_{n-1} (i < r),    x_i d_i - x_{n-1} d_{n-1} (r <= i < n-1)
    H:  y_i d_i - x_{i+m} d_{i+m} (i < r),    x_i d_i - x_{i+m} d_{i+m} (r <= i < m)
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cartan import AlgebraKind, Derivation, bracket, member, p_power
from .gf import FieldDesc, FieldElem, MixedFields, RowSpace
from .trunc import TruncPoly, all_exponents, ring


class RangeError(ValueError):
    pass


class TorusInvariantFailed(ArithmeticError):
    pass


def _partner(kind: AlgebraKind, i: int) -> int | None:
    """Variable whose x d term is subtracted from the i-th basis vector."""
    if kind.tag == "W":
        return None
    if kind.tag == "S1":
        return kind.n - 1
    return i + kind.m


def _basis_vector(kind: AlgebraKind, r: int, i: int, desc: FieldDesc) -> Derivation:
    n = kind.n
    head = TruncPoly.y(desc, n, i) if i < r else TruncPoly.x(desc, n, i)
    d = Derivation.term(head, i)
    j = _partner(kind, i)
    if j is not None:
        d = d - Derivation.term(TruncPoly.x(desc, n, j), j)
    return d


@dataclass(frozen=True, eq=False)
class TorusDesc:
    kind: AlgebraKind
    r: int
    desc: FieldDesc
    basis: tuple

    @property
    def mu(self) -> int:
        return self.kind.mu

    @property
    def n(self) -> int:
        return self.kind.n

    def __eq__(self, other):
        if not isinstance(other, TorusDesc):
            return NotImplemented
        return (self.kind, self.r, self.desc) == (other.kind, other.r, other.desc)

    def __hash__(self):
        return hash((self.kind, self.r, self.desc))

    def realize(self, lam: Sequence) -> Derivation:
        if len(lam) != self.mu:
            raise RangeError(f"torus of rank {self.mu} needs {self.mu} coordinates")
        out = Derivation.zero(self.desc, self.n)
        for c, d in zip(lam, self.basis):
            c = self.desc.elem(c)
            if c:
                out = out + d.scale(c)
        return out

    def elem(self, lam: Sequence) -> "TorusElem":
        return TorusElem(self, tuple(self.desc.elem(c) for c in lam))

    def check(self) -> None:
        """Raise unless every basis vector is toral, in the algebra, and all commute."""
        for i, d in enumerate(self.basis):
            if p_power(d) != d:
                raise TorusInvariantFailed(f"basis vector {i} is not toral")
            if not member(self.kind, d):
                raise TorusInvariantFailed(f"basis vector {i} is not in {self.kind}")
            for e in self.basis[i + 1:]:
                if not bracket(d, e).is_zero():
                    raise TorusInvariantFailed("basis vectors do not commute")

    def __repr__(self):
        return f"TorusDesc({self.kind}, r={self.r}, {self.desc!r})"


_torus_cache: dict = {}
_torus_lock = threading.Lock()


def standard_torus(kind: AlgebraKind, r: int, desc: FieldDesc, check: bool = True) -> TorusDesc:
    """The torus t_r of the given kind over ``desc`` (validated once, then cached)."""
    if not 0 <= r <= kind.mu:
        raise RangeError(f"r={r} outside [0, {kind.mu}] for {kind}")
    key = (kind, r, desc)
    with _torus_lock:
        hit = _torus_cache.get(key)
    if hit is not None:
        return hit
    t = TorusDesc(kind, r, desc, tuple(_basis_vector(kind, r, i, desc) for i in range(kind.mu)))
    if check:
        t.check()
    with _torus_lock:
        _torus_cache.setdefault(key, t)
    return t


@dataclass(frozen=True)
class TorusElem:
    torus: TorusDesc
    lam: tuple

    def __post_init__(self):
        if len(self.lam) != self.torus.mu:
            raise RangeError(f"need {self.torus.mu} coordinates, got {len(self.lam)}")
        for c in self.lam:
            if not isinstance(c, FieldElem) or c.desc != self.torus.desc:
                raise MixedFields("coordinates must be elements of the torus field")

    @property
    def kind(self) -> AlgebraKind:
        return self.torus.kind

    @property
    def r(self) -> int:
        return self.torus.r

    @property
    def desc(self) -> FieldDesc:
        return self.torus.desc

    def realize(self) -> Derivation:
        return self.torus.realize(self.lam)

    def head(self) -> list[FieldElem]:
        return list(self.lam[: self.r])

    def tail(self) -> list[FieldElem]:
        return list(self.lam[self.r:])

    def to_json(self) -> dict:
        return {
            "kind": self.kind.to_json(),
            "r": self.r,
            "lambda": [c.to_json() for c in self.lam],
            "field": self.desc.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict, desc: FieldDesc | None = None) -> "TorusElem":
        if desc is None:
            if "field" not in obj:
                raise ValueError("torus element has no field; pass one explicitly")
            desc = FieldDesc.from_json(obj["field"])
        kind = AlgebraKind.from_json(obj["kind"])
        t = standard_torus(kind, int(obj["r"]), desc)
        return t.elem(obj["lambda"])

    def __repr__(self):
        return f"TorusElem({self.kind}, r={self.r}, {list(self.lam)})"


def make_elem(kind: AlgebraKind, r: int, lam: Sequence, desc: FieldDesc) -> TorusElem:
    return standard_torus(kind, r, desc).elem(lam)


def coords_in_torus(D: Derivation, t: TorusDesc) -> tuple[FieldElem, ...] | None:
    """Coordinates of D against the basis of t, or None if D is not in its span.

    Each basis vector d_i is the only one with a y_i d_i or x_i d_i term,
    so the candidate coordinate is read off there and the whole
    combination is then compared exactly.
    """
    if D.n != t.n or D.desc != t.desc:
        return None
    strides = ring(t.desc.p, t.n).strides
    lam = []
    for i in range(t.mu):
        idx = 0 if i < t.r else int(strides[i])
        lam.append(FieldElem(t.desc, int(D.c[i, idx])))
    if t.realize(lam) != D:
        return None
    return tuple(lam)


def is_semisimple(D: Derivation, max_iter: int | None = None) -> bool:
    """D lies in the span of D^[p], D^[p^2], ..."""
    space = RowSpace(D.desc, D.vector().size)
    cur = D
    limit = max_iter if max_iter is not None else D.vector().size + 1
    for _ in range(limit):
        cur = p_power(cur)
        if space.add(cur.vector()) == 0:
            break
    return space.contains(D.vector())


def _weight(kind: AlgebraKind, a: Sequence[FieldElem], exps: Sequence[int]) -> FieldElem:
    desc = a[0].desc if a else None
    acc = desc.zero
    for i, ai in enumerate(a):
        j = _partner(kind, i)
        le = exps[i] - (exps[j] if j is not None else 0)
        acc = acc + ai * (le % desc.p)
    return acc


def z_monomial(desc: FieldDesc, n: int, s: int, exps: Sequence[int]) -> TruncPoly:
    """prod z_i^{l_i} with z_i = y_i for i < s and x_i otherwise."""
    out = TruncPoly.one(desc, n)
    for i, e in enumerate(exps):
        if e:
            z = TruncPoly.y(desc, n, i) if i < s else TruncPoly.x(desc, n, i)
            out = out * z**e
    return out


def weight_decomposition(
    kind: AlgebraKind, s: int, a: Sequence, desc: FieldDesc, verify: bool = True
) -> dict[FieldElem, list[tuple[int, ...]]]:
    """Group the monomials z^l by their weight under sum a_i d_i of t_s.

    Returns weight -> list of exponent tuples l.  With ``verify`` every
    monomial is checked to be an eigenvector with that eigenvalue.
    """
    t = standard_torus(kind, s, desc)
    if len(a) != t.mu:
        raise RangeError(f"need {t.mu} coefficients, got {len(a)}")
    a = [desc.elem(c) for c in a]
    D = t.realize(a) if verify else None
    out: dict[FieldElem, list[tuple[int, ...]]] = {}
    for exps in all_exponents(desc.p, kind.n):
        w = _weight(kind, a, exps) if a else desc.zero
        if verify:
            z = z_monomial(desc, kind.n, s, exps)
            if D(z) != z.scale(w):
                raise TorusInvariantFailed(f"monomial {exps} is not a weight vector of weight {w!r}")
        out.setdefault(w, []).append(tuple(exps))
    return out


def index_of(e: TorusElem):
    """Lower e into the smallest possible standard torus.

    Returns (r_min, chain, final) where chain is a list of automorphisms
    whose composite (first element applied first) conjugates the
    realization of e onto the realization of final.
    """
    from .orbits import reduce_index

    return reduce_index(e)


def embed_elem(e: TorusElem, desc: FieldDesc) -> TorusElem:
    """The same element over a larger field (only from a prime field)."""
    if e.desc == desc:
        return e
    if e.desc.k != 1 or e.desc.p != desc.p:
        raise MixedFields(f"cannot embed {e.desc} into {desc}")
    return standard_torus(e.kind, e.r, desc).elem([int(c.v) for c in e.lam])


def random_elem(t: TorusDesc, rng: np.random.Generator) -> TorusElem:
    return t.elem([t.desc.random(rng) for _ in range(t.mu)])
