"""
The truncated polynomial algebra A(n) = k[x_0..x_{n-1}] / (x_i^p).

Polynomials are dense arrays of field codes of length p**n.  Monomial
``x^e`` lives at index ``sum(e[i] * p**i)`` (x_0 varies fastest), so two
exponent vectors with no carry add to the sum of their indices.
Variables are numbered from 0.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

import numpy as np

from .gf import FieldDesc, FieldElem, MixedFields


class Incompatible(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class NotAUnit(ValueError):
    pass


class _Ring:
    def __init__(self, p: int, n: int):
        self.p, self.n = p, n
        self.N = N = p**n
        self.strides = p ** np.arange(n, dtype=np.int64)
        idx = np.arange(N, dtype=np.int64)
        self.exps = (idx[:, None] // self.strides[None, :]) % p
        self.degrees = self.exps.sum(axis=1)
        self._pairs = None
        self.npairs = (p * (p + 1) // 2) ** n
        self.partials = []
        for i in range(n):
            src = np.flatnonzero(self.exps[:, i] > 0)
            self.partials.append((src, src - self.strides[i], self.exps[src, i]))

    @property
    def pairs(self):
        if self._pairs is None:
            I, J = [], []
            # pairs (a, b) whose exponent sum stays below p in every slot
            for a in range(self.N):
                ok = np.all(self.exps[a][None, :] + self.exps < self.p, axis=1)
                js = np.flatnonzero(ok)
                I.append(np.full(js.size, a, dtype=np.int64))
                J.append(js)
            I = np.concatenate(I)
            J = np.concatenate(J)
            self._pairs = (I, J, I + J)
        return self._pairs

    def index(self, exps: Sequence[int]) -> int:
        if len(exps) != self.n:
            raise IndexOutOfRange(f"expected {self.n} exponents")
        out = 0
        for e, s in zip(exps, self.strides):
            if not 0 <= e < self.p:
                raise IndexOutOfRange(f"exponent {e} outside [0, {self.p})")
            out += int(e) * int(s)
        return out


@lru_cache(maxsize=None)
def ring(p: int, n: int) -> _Ring:
    return _Ring(p, n)


# ---------------------------------------------------------------------------
# arithmetic on raw code arrays


def _field_sum(desc: FieldDesc, target: np.ndarray, vals: np.ndarray, size: int) -> np.ndarray:
    """Group-sum field codes ``vals`` into ``size`` buckets given by ``target``."""
    p = desc.p
    if desc.k == 1:
        s = np.bincount(target, weights=vals, minlength=size)
        return np.rint(s).astype(np.int64) % p
    t = desc.tables
    digits = t.digits[vals]
    out = np.zeros(size, dtype=np.int64)
    for c in range(desc.k):
        s = np.bincount(target, weights=digits[:, c], minlength=size)
        out += (np.rint(s).astype(np.int64) % p) * int(t.weights[c])
    return out


def add_codes(desc: FieldDesc, a, b):
    if desc.k == 1:
        return (a + b) % desc.p
    return desc.tables.add[a, b]


def sub_codes(desc: FieldDesc, a, b):
    if desc.k == 1:
        return (a - b) % desc.p
    return desc.tables.sub[a, b]


def neg_codes(desc: FieldDesc, a):
    if desc.k == 1:
        return (-a) % desc.p
    return desc.tables.neg[a]


def smul_codes(desc: FieldDesc, c: int, a):
    if desc.k == 1:
        return (c * a) % desc.p
    return desc.tables.mul[c, a]


def mul_codes(desc: FieldDesc, n: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    R = ring(desc.p, n)
    ia = np.flatnonzero(a)
    ib = np.flatnonzero(b)
    if ia.size == 0 or ib.size == 0:
        return np.zeros(R.N, dtype=np.int64)
    if ia.size == 1 and R.exps[ia[0]].sum() == 0:
        return smul_codes(desc, int(a[ia[0]]), b)
    if ib.size == 1 and R.exps[ib[0]].sum() == 0:
        return smul_codes(desc, int(b[ib[0]]), a)
    if ia.size * ib.size > R.npairs:
        I, J, K = R.pairs
        vals = desc.tables.mul[a[I], b[J]]
        keep = vals != 0
        return _field_sum(desc, K[keep], vals[keep], R.N)
    ex = R.exps[ia][:, None, :] + R.exps[ib][None, :, :]
    ai, bi = np.nonzero(np.all(ex < desc.p, axis=2))
    if ai.size == 0:
        return np.zeros(R.N, dtype=np.int64)
    ai = ia[ai]
    bi = ib[bi]
    vals = desc.tables.mul[a[ai], b[bi]]
    return _field_sum(desc, ai + bi, vals, R.N)


class TruncPoly:
    """Immutable element of A(n) over a finite field."""

    __slots__ = ("desc", "n", "c")

    def __init__(self, desc: FieldDesc, n: int, coeffs=None):
        self.desc = desc
        self.n = n
        N = desc.p**n
        if coeffs is None:
            c = np.zeros(N, dtype=np.int64)
        else:
            c = np.asarray(coeffs, dtype=np.int64)
            if c.shape != (N,):
                raise Incompatible(f"expected {N} coefficients, got shape {c.shape}")
        c.flags.writeable = False
        self.c = c

    # constructors --------------------------------------------------------

    @classmethod
    def zero(cls, desc: FieldDesc, n: int) -> "TruncPoly":
        return cls(desc, n)

    @classmethod
    def const(cls, desc: FieldDesc, n: int, value) -> "TruncPoly":
        c = np.zeros(desc.p**n, dtype=np.int64)
        c[0] = desc.code(value)
        return cls(desc, n, c)

    @classmethod
    def one(cls, desc: FieldDesc, n: int) -> "TruncPoly":
        return cls.const(desc, n, 1)

    @classmethod
    def monomial(cls, desc: FieldDesc, n: int, exps: Sequence[int], coeff=1) -> "TruncPoly":
        c = np.zeros(desc.p**n, dtype=np.int64)
        c[ring(desc.p, n).index(exps)] = desc.code(coeff)
        return cls(desc, n, c)

    @classmethod
    def x(cls, desc: FieldDesc, n: int, i: int) -> "TruncPoly":
        if not 0 <= i < n:
            raise IndexOutOfRange(f"variable {i} outside [0, {n})")
        e = [0] * n
        e[i] = 1
        return cls.monomial(desc, n, e)

    @classmethod
    def y(cls, desc: FieldDesc, n: int, i: int) -> "TruncPoly":
        """The unit 1 + x_i."""
        return cls.x(desc, n, i) + 1

    # helpers ---------------------------------------------------------------

    @property
    def ring(self) -> _Ring:
        return ring(self.desc.p, self.n)

    def _check(self, other: "TruncPoly") -> None:
        if other.n != self.n:
            raise Incompatible(f"A({self.n}) vs A({other.n})")
        if other.desc != self.desc:
            raise MixedFields(f"{self.desc} vs {other.desc}")

    def _lift(self, other) -> "TruncPoly":
        if isinstance(other, TruncPoly):
            self._check(other)
            return other
        return TruncPoly.const(self.desc, self.n, other)

    def _new(self, c) -> "TruncPoly":
        return TruncPoly(self.desc, self.n, c)

    # arithmetic ----------------------------------------------------------

    def __add__(self, other):
        o = self._lift(other)
        return self._new(add_codes(self.desc, self.c, o.c))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return self._new(sub_codes(self.desc, self.c, o.c))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return self._new(neg_codes(self.desc, self.c))

    def scale(self, value) -> "TruncPoly":
        return self._new(smul_codes(self.desc, self.desc.code(value), self.c))

    def __mul__(self, other):
        if not isinstance(other, TruncPoly):
            return self.scale(other)
        self._check(other)
        return self._new(mul_codes(self.desc, self.n, self.c, other.c))

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int) -> "TruncPoly":
        if e < 0:
            return self.inverse() ** (-e)
        out = TruncPoly.one(self.desc, self.n)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def partial(self, i: int) -> "TruncPoly":
        """Formal partial derivative in x_i."""
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"variable {i} outside [0, {self.n})")
        src, tgt, fac = self.ring.partials[i]
        c = np.zeros_like(self.c)
        vals = self.c[src]
        c[tgt] = self.desc.tables.mul[fac, vals]
        return self._new(c)

    def substitute(self, images: Sequence["TruncPoly"]) -> "TruncPoly":
        """The algebra homomorphism x_i -> images[i] applied to self.

        Images live in A(m) for any m; the result lives there too.
        """
        return substitute_all([self], images)[0]

    # queries -----------------------------------------------------------------

    def constant_term(self) -> FieldElem:
        return FieldElem(self.desc, self.c[0])

    def coeff(self, exps: Sequence[int]) -> FieldElem:
        return FieldElem(self.desc, self.c[self.ring.index(exps)])

    def is_zero(self) -> bool:
        return not self.c.any()

    def is_constant(self) -> bool:
        return not self.c[1:].any()

    def is_unit(self) -> bool:
        return self.c[0] != 0

    def inverse(self) -> "TruncPoly":
        """Inverse of a unit by the terminating Neumann series."""
        if not self.is_unit():
            raise NotAUnit("constant term is zero")
        c0 = self.constant_term()
        inv0 = c0.inverse()
        u = self.scale(inv0) - 1
        term = TruncPoly.one(self.desc, self.n)
        acc = term
        neg_u = -u
        for _ in range((self.desc.p - 1) * self.n + 1):
            term = term * neg_u
            if term.is_zero():
                break
            acc = acc + term
        return acc.scale(inv0)

    def degree(self) -> int:
        nz = np.flatnonzero(self.c)
        if nz.size == 0:
            return -1
        return int(self.ring.degrees[nz].max())

    def low_degree(self) -> int:
        nz = np.flatnonzero(self.c)
        if nz.size == 0:
            return -1
        return int(self.ring.degrees[nz].min())

    def homogeneous(self, d: int) -> "TruncPoly":
        c = np.where(self.ring.degrees == d, self.c, 0)
        return self._new(c)

    def terms(self) -> Iterator[tuple[tuple[int, ...], FieldElem]]:
        R = self.ring
        for idx in np.flatnonzero(self.c):
            yield tuple(int(e) for e in R.exps[idx]), FieldElem(self.desc, self.c[idx])

    def linear_coeffs(self) -> list[FieldElem]:
        return [FieldElem(self.desc, self.c[int(s)]) for s in self.ring.strides]

    def embed(self, desc: FieldDesc) -> "TruncPoly":
        """View a prime-field polynomial inside an extension of the same characteristic."""
        if desc == self.desc:
            return self
        if self.desc.k != 1 or self.desc.p != desc.p:
            raise MixedFields(f"cannot embed {self.desc} into {desc}")
        return TruncPoly(desc, self.n, self.c.copy())

    def __eq__(self, other):
        if not isinstance(other, TruncPoly):
            if isinstance(other, (int, FieldElem)):
                return self == self._lift(other)
            return NotImplemented
        return self.n == other.n and self.desc == other.desc and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash((self.desc, self.n, self.c.tobytes()))

    def to_json(self) -> dict:
        k = self.desc.k
        p = self.desc.p
        coeffs = [[(int(v) // p**j) % p for j in range(k)] for v in self.c]
        return {"n": self.n, "coeffs": coeffs}

    @classmethod
    def from_json(cls, desc: FieldDesc, obj: dict) -> "TruncPoly":
        n = int(obj["n"])
        coeffs = [desc.code(v if isinstance(v, int) else list(v)) for v in obj["coeffs"]]
        return cls(desc, n, coeffs)

    def __repr__(self):
        if self.is_zero():
            return "0"
        parts = []
        for exps, c in self.terms():
            mono = "*".join(
                (f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}") for i, e in enumerate(exps) if e
            )
            if not mono:
                parts.append(repr(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"({c!r})*{mono}" if self.desc.k > 1 else f"{c!r}*{mono}")
        return " + ".join(parts)


def substitute_all(polys: Sequence[TruncPoly], images: Sequence[TruncPoly]) -> list[TruncPoly]:
    """Substitute the same images into several polynomials, sharing the powers."""
    if not polys:
        return []
    first = polys[0]
    for f in polys:
        if f.n != first.n or f.desc != first.desc:
            raise Incompatible("polynomials must share one ring")
    if len(images) != first.n:
        raise Incompatible(f"need {first.n} images, got {len(images)}")
    if first.n == 0:
        return list(polys)
    m = images[0].n
    for g in images:
        if g.desc != first.desc:
            raise MixedFields(f"{first.desc} vs {g.desc}")
        if g.n != m:
            raise Incompatible("images must share one ring")
    p = first.desc.p
    pows = []
    for g in images:
        row = [TruncPoly.one(g.desc, m)]
        for _ in range(p - 1):
            row.append(row[-1] * g)
        pows.append(row)
    out = []
    for f in polys:
        arr = f.c.reshape((p,) * f.n, order="F")
        out.append(_horner(f.desc, arr, f.n - 1, pows, m))
    return out


def _horner(desc: FieldDesc, arr: np.ndarray, v: int, pows, m: int) -> TruncPoly:
    if v < 0:
        return TruncPoly.const(desc, m, int(arr))
    if v == 0:
        N = desc.p**m
        acc = np.zeros(N, dtype=np.int64)
        for e in np.flatnonzero(arr):
            acc = add_codes(desc, acc, smul_codes(desc, int(arr[e]), pows[0][e].c))
        return TruncPoly(desc, m, acc)
    acc = None
    for e in range(desc.p):
        sl = arr[..., e]
        if not sl.any():
            continue
        part = _horner(desc, sl, v - 1, pows, m)
        if e:
            part = part * pows[v][e]
        acc = part if acc is None else acc + part
    return acc if acc is not None else TruncPoly.zero(desc, m)


def all_exponents(p: int, n: int) -> Iterator[tuple[int, ...]]:
    """Exponent vectors in storage order (x_0 fastest)."""
    for e in product(range(p), repeat=n):
        yield tuple(reversed(e))


def poly_mul(f: TruncPoly, g: TruncPoly) -> TruncPoly:
    return f * g


def poly_partial(f: TruncPoly, i: int) -> TruncPoly:
    return f.partial(i)


def poly_substitute(f: TruncPoly, images: Sequence[TruncPoly]) -> TruncPoly:
    return f.substitute(images)


def poly_is_unit(f: TruncPoly) -> bool:
    return f.is_unit()


def poly_invert_unit(f: TruncPoly) -> TruncPoly:
    return f.inverse()


def ypow(desc: FieldDesc, n: int, exps: Sequence[int]) -> TruncPoly:
    """prod_i (1 + x_i)^exps[i] with exponents taken mod p (y_i^p = 1)."""
    out = TruncPoly.one(desc, n)
    for i, e in enumerate(exps):
        e = int(e) % desc.p
        if e:
            out = out * TruncPoly.y(desc, n, i) ** e
    return out
