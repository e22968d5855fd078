"""
The restricted Lie algebras W(n), S(n)^(1) and H(2m)^(2).

A derivation ``sum_i f_i d_i`` of A(n) is stored as the stacked
coefficient arrays of the f_i.  Everything is exact; the [p]-map is the
p-fold composition of the derivation as an operator on A(n).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import gf
from .gf import FieldDesc, MixedFields, RowSpace
from .trunc import (
    Incompatible,
    IndexOutOfRange,
    TruncPoly,
    add_codes,
    neg_codes,
    ring,
    smul_codes,
    sub_codes,
)


class NotADerivation(ArithmeticError):
    pass


class OddVariableCount(ValueError):
    pass


class InvalidKind(ValueError):
    pass


TAGS = ("W", "S1", "H2")


@dataclass(frozen=True)
class AlgebraKind:
    """One of W(n), S(n)^(1) or H(n)^(2) with n = 2m."""

    tag: str
    n: int

    def __post_init__(self):
        if self.tag not in TAGS:
            raise InvalidKind(f"unknown algebra tag {self.tag!r}")
        if self.n < 1:
            raise InvalidKind("need at least one variable")
        if self.tag == "S1" and self.n < 3:
            raise InvalidKind("S(n)^(1) needs n >= 3")
        if self.tag == "H2" and self.n % 2:
            raise InvalidKind("H needs an even number of variables")

    @property
    def m(self) -> int:
        return self.n // 2

    @property
    def mu(self) -> int:
        """Dimension of a maximal torus."""
        return {"W": self.n, "S1": self.n - 1, "H2": self.n // 2}[self.tag]

    def check_field(self, desc: FieldDesc) -> None:
        small = (self.tag == "W" and self.n == 1) or (self.tag == "H2" and self.n == 2)
        if small and desc.p < 5:
            raise InvalidKind(f"{self} requires p >= 5")

    def to_json(self) -> dict:
        return {"tag": self.tag, "n": self.n}

    @classmethod
    def from_json(cls, obj) -> "AlgebraKind":
        return cls(str(obj["tag"]), int(obj["n"]))

    def __str__(self):
        return {"W": f"W({self.n})", "S1": f"S({self.n})^(1)", "H2": f"H({self.n})^(2)"}[self.tag]


class Derivation:
    """Immutable element sum_i f_i d_i of W(n)."""

    __slots__ = ("desc", "n", "c")

    def __init__(self, desc: FieldDesc, n: int, coeffs=None):
        self.desc = desc
        self.n = n
        N = desc.p**n
        if coeffs is None:
            c = np.zeros((n, N), dtype=np.int64)
        elif isinstance(coeffs, np.ndarray):
            c = np.asarray(coeffs, dtype=np.int64).reshape(n, N)
        else:
            coeffs = list(coeffs)
            if len(coeffs) != n:
                raise Incompatible(f"need {n} coefficients")
            for f in coeffs:
                if f.n != n:
                    raise Incompatible(f"coefficient in A({f.n}), expected A({n})")
                if f.desc != desc:
                    raise MixedFields(f"{f.desc} vs {desc}")
            c = np.stack([f.c for f in coeffs]) if n else np.zeros((0, N), dtype=np.int64)
        c.flags.writeable = False
        self.c = c

    @classmethod
    def zero(cls, desc: FieldDesc, n: int) -> "Derivation":
        return cls(desc, n)

    @classmethod
    def term(cls, f: TruncPoly, j: int) -> "Derivation":
        """f d_j"""
        if not 0 <= j < f.n:
            raise IndexOutOfRange(f"variable {j} outside [0, {f.n})")
        c = np.zeros((f.n, f.c.size), dtype=np.int64)
        c[j] = f.c
        return cls(f.desc, f.n, c)

    @classmethod
    def partial(cls, desc: FieldDesc, n: int, j: int) -> "Derivation":
        return cls.term(TruncPoly.one(desc, n), j)

    @classmethod
    def from_vector(cls, desc: FieldDesc, n: int, vec) -> "Derivation":
        return cls(desc, n, np.asarray(vec, dtype=np.int64).reshape(n, desc.p**n))

    def coeff(self, i: int) -> TruncPoly:
        return TruncPoly(self.desc, self.n, self.c[i].copy())

    @property
    def coeffs(self) -> tuple[TruncPoly, ...]:
        return tuple(self.coeff(i) for i in range(self.n))

    def vector(self) -> np.ndarray:
        return self.c.reshape(-1)

    def _check(self, other: "Derivation") -> None:
        if not isinstance(other, Derivation):
            raise TypeError(f"expected a Derivation, got {type(other).__name__}")
        if other.n != self.n:
            raise Incompatible(f"W({self.n}) vs W({other.n})")
        if other.desc != self.desc:
            raise MixedFields(f"{self.desc} vs {other.desc}")

    def _new(self, c) -> "Derivation":
        return Derivation(self.desc, self.n, c)

    def __add__(self, other):
        self._check(other)
        return self._new(add_codes(self.desc, self.c, other.c))

    def __sub__(self, other):
        self._check(other)
        return self._new(sub_codes(self.desc, self.c, other.c))

    def __neg__(self):
        return self._new(neg_codes(self.desc, self.c))

    def scale(self, value) -> "Derivation":
        return self._new(smul_codes(self.desc, self.desc.code(value), self.c))

    def __mul__(self, value):
        return self.scale(value)

    __rmul__ = __mul__

    def __call__(self, f: TruncPoly) -> TruncPoly:
        """Apply the derivation to f."""
        if f.n != self.n or f.desc != self.desc:
            raise Incompatible("derivation and polynomial live in different rings")
        out = np.zeros(f.c.size, dtype=np.int64)
        for i in range(self.n):
            if not self.c[i].any():
                continue
            df = f.partial(i)
            if df.is_zero():
                continue
            out = add_codes(self.desc, out, (self.coeff(i) * df).c)
        return TruncPoly(self.desc, self.n, out)

    def bracket(self, other: "Derivation") -> "Derivation":
        return bracket(self, other)

    def is_zero(self) -> bool:
        return not self.c.any()

    def embed(self, desc: FieldDesc) -> "Derivation":
        if desc == self.desc:
            return self
        if self.desc.k != 1 or self.desc.p != desc.p:
            raise MixedFields(f"cannot embed {self.desc} into {desc}")
        return Derivation(desc, self.n, self.c.copy())

    def matrix(self) -> np.ndarray:
        """Operator matrix on the monomial basis (column j = image of monomial j)."""
        R = ring(self.desc.p, self.n)
        cols = []
        for idx in range(R.N):
            e = np.zeros(R.N, dtype=np.int64)
            e[idx] = 1
            cols.append(self(TruncPoly(self.desc, self.n, e)).c)
        return np.stack(cols, axis=1)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.n == other.n and self.desc == other.desc and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash((self.desc, self.n, self.c.tobytes()))

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": [self.coeff(i).to_json() for i in range(self.n)]}

    @classmethod
    def from_json(cls, desc: FieldDesc, obj: dict) -> "Derivation":
        n = int(obj["n"])
        return cls(desc, n, [TruncPoly.from_json(desc, f) for f in obj["coeffs"]])

    def __repr__(self):
        parts = []
        for i in range(self.n):
            f = self.coeff(i)
            if f.is_zero():
                continue
            parts.append(f"({f!r})d{i + 1}")
        return " + ".join(parts) if parts else "0"


def bracket(D: Derivation, E: Derivation) -> Derivation:
    """[D, E]; the i-th coefficient is D(E(x_i)) - E(D(x_i))."""
    D._check(E)
    out = np.zeros_like(D.c)
    for i in range(D.n):
        a = D(E.coeff(i)) if E.c[i].any() else None
        b = E(D.coeff(i)) if D.c[i].any() else None
        if a is not None:
            out[i] = a.c
        if b is not None:
            out[i] = sub_codes(D.desc, out[i], b.c)
    return Derivation(D.desc, D.n, out)


def p_power(D: Derivation, check: bool = False) -> Derivation:
    """D^[p]: the derivation agreeing with the p-th operator power of D.

    In characteristic p the p-th power of a derivation is again a
    derivation, so it is read off from its values on the generators.
    With ``check`` the full operator matrix power is compared as well.
    """
    p = D.desc.p
    out = []
    for j in range(D.n):
        g = TruncPoly.x(D.desc, D.n, j)
        for _ in range(p):
            g = D(g)
            if g.is_zero():
                break
        out.append(g)
    E = Derivation(D.desc, D.n, out)
    if check:
        M = D.matrix()
        P = np.eye(M.shape[0], dtype=np.int64)
        for _ in range(p):
            P = gf.matmul(D.desc, M, P)
        if not np.array_equal(P, E.matrix()):
            raise NotADerivation("p-th operator power disagrees with its generator values")
    return E


def divergence(D: Derivation) -> TruncPoly:
    acc = TruncPoly.zero(D.desc, D.n)
    for i in range(D.n):
        if D.c[i].any():
            acc = acc + D.coeff(i).partial(i)
    return acc


def sigma_index(i: int, m: int) -> int:
    """+1 on the first half of the 2m variables, -1 on the second (0-based)."""
    if not 0 <= i < 2 * m:
        raise IndexOutOfRange(f"index {i} outside [0, {2 * m})")
    return 1 if i < m else -1


def prime_index(i: int, m: int) -> int:
    """The partner variable i' (0-based)."""
    if not 0 <= i < 2 * m:
        raise IndexOutOfRange(f"index {i} outside [0, {2 * m})")
    return i + m if i < m else i - m


def d_h(f: TruncPoly, m: int | None = None) -> Derivation:
    """Hamiltonian derivation sum_i sigma(i) d_i(f) d_{i'}."""
    if m is None:
        m = f.n // 2
    if f.n != 2 * m:
        raise OddVariableCount(f"D_H needs 2m variables, got n={f.n}, m={m}")
    out = np.zeros((f.n, f.c.size), dtype=np.int64)
    for i in range(f.n):
        df = f.partial(i)
        if sigma_index(i, m) < 0:
            df = -df
        out[prime_index(i, m)] = df.c
    return Derivation(f.desc, f.n, out)


def poisson(f: TruncPoly, g: TruncPoly, m: int | None = None) -> TruncPoly:
    """{f, g} = D_H(f)(g)."""
    if m is None:
        m = f.n // 2
    if g.n != 2 * m:
        raise OddVariableCount(f"Poisson bracket needs 2m variables, got n={g.n}")
    return d_h(f, m)(g)


# ---------------------------------------------------------------------------
# membership


def _check_kind(kind: AlgebraKind, D: Derivation) -> None:
    if D.n != kind.n:
        raise Incompatible(f"{kind} has {kind.n} variables, derivation has {D.n}")


def _special_indices(p: int, n: int) -> list[int]:
    # x^(tau - (p-1) e_i): exponent p-1 everywhere except slot i
    R = ring(p, n)
    out = []
    for i in range(n):
        e = [p - 1] * n
        e[i] = 0
        out.append(R.index(e))
    return out


def in_special(D: Derivation) -> bool:
    """Closed-form test for S(n)^(1): divergence free, and f_i has no
    x^(tau - (p-1) e_i) term (these n elements span S(n) / S(n)^(1))."""
    if not divergence(D).is_zero():
        return False
    for i, idx in enumerate(_special_indices(D.desc.p, D.n)):
        if D.c[i, idx]:
            return False
    return True


def hamiltonian_potential(D: Derivation, m: int | None = None) -> TruncPoly | None:
    """f without constant term with D_H(f) = D, or None."""
    if m is None:
        m = D.n // 2
    if D.n != 2 * m:
        raise OddVariableCount(f"need 2m variables, got {D.n}")
    R = ring(D.desc.p, D.n)
    t = D.desc.tables
    # d_i f = sigma(i) g_{i'}
    grads = []
    for i in range(D.n):
        g = D.c[prime_index(i, m)]
        grads.append(g if sigma_index(i, m) > 0 else neg_codes(D.desc, g))
    f = np.zeros(R.N, dtype=np.int64)
    for a in range(1, R.N):
        e = R.exps[a]
        i = int(np.flatnonzero(e)[0])
        src = a - int(R.strides[i])
        f[a] = t.mul[t.inv[int(e[i])], grads[i][src]]
    pot = TruncPoly(D.desc, D.n, f)
    if d_h(pot, m) != D:
        return None
    return pot


def in_hamiltonian(D: Derivation) -> bool:
    """Closed-form test for H(2m)^(2): D = D_H(f) with f free of 1 and x^tau."""
    pot = hamiltonian_potential(D)
    if pot is None:
        return False
    return bool(pot.c[-1] == 0)


def member(kind: AlgebraKind, D: Derivation) -> bool:
    _check_kind(kind, D)
    if kind.tag == "W":
        return True
    if kind.tag == "S1":
        return in_special(D)
    return in_hamiltonian(D)


# ---------------------------------------------------------------------------
# bases


_basis_cache: dict = {}
_basis_lock = threading.Lock()


def _monomial_derivations(desc: FieldDesc, n: int) -> list[Derivation]:
    N = desc.p**n
    out = []
    for j in range(n):
        for idx in range(N):
            c = np.zeros((n, N), dtype=np.int64)
            c[j, idx] = 1
            out.append(Derivation(desc, n, c))
    return out


def _span_of_brackets(desc: FieldDesc, n: int, gens: Sequence[Derivation]) -> list[Derivation]:
    space = RowSpace(desc, n * desc.p**n)
    batch = []
    for D, E in combinations(gens, 2):
        v = bracket(D, E).vector()
        if v.any():
            batch.append(v)
        if len(batch) >= 256:
            space.add(np.array(batch))
            batch = []
    if batch:
        space.add(np.array(batch))
    return [Derivation.from_vector(desc, n, row) for row in space.basis]


def divergence_free_basis(desc: FieldDesc, n: int) -> list[Derivation]:
    """Basis of S(n) = ker(dv) over the given field."""
    cols = []
    for D in _monomial_derivations(desc, n):
        cols.append(divergence(D).c)
    dv = np.stack(cols, axis=1)  # N x nN
    ker = gf.nullspace(desc, dv)
    return [Derivation.from_vector(desc, n, row) for row in ker]


def algebra_basis(kind: AlgebraKind, p: int) -> list[Derivation]:
    """A basis over GF(p), computed from the definitions.

    W(n): monomial derivations.  S(n)^(1): span of brackets of a basis
    of ker(dv).  H(2m)^(2): span of [D_H(f), D_H(g)] over monomials.
    Results are cached per (kind, p).
    """
    key = (kind, p)
    with _basis_lock:
        if key in _basis_cache:
            return _basis_cache[key]
    desc = gf.field_make(p, 1)
    n = kind.n
    if kind.tag == "W":
        basis = _monomial_derivations(desc, n)
    elif kind.tag == "S1":
        basis = _span_of_brackets(desc, n, divergence_free_basis(desc, n))
    else:
        R = ring(p, n)
        gens = []
        for idx in range(1, R.N):
            e = np.zeros(R.N, dtype=np.int64)
            e[idx] = 1
            gens.append(d_h(TruncPoly(desc, n, e)))
        basis = _span_of_brackets(desc, n, gens)
    with _basis_lock:
        _basis_cache.setdefault(key, basis)
        return _basis_cache[key]


def in_span(basis: Sequence[Derivation], D: Derivation) -> bool:
    """Exact membership of D in the span of ``basis`` (over D's field)."""
    desc = D.desc
    space = RowSpace(desc, D.c.size)
    if basis:
        space.add(np.array([B.embed(desc).vector() for B in basis]))
    return space.contains(D.vector())


def member_by_span(kind: AlgebraKind, D: Derivation) -> bool:
    """Membership tested against the computed basis (slow, definitional)."""
    _check_kind(kind, D)
    return in_span(algebra_basis(kind, D.desc.p), D)


# ---------------------------------------------------------------------------
# grading


@dataclass(frozen=True)
class GradedDecomposition:
    components: dict

    def degrees(self) -> list[int]:
        return sorted(self.components)

    def total(self, desc: FieldDesc, n: int) -> Derivation:
        acc = Derivation.zero(desc, n)
        for D in self.components.values():
            acc = acc + D
        return acc


def degree_of(exps: Iterable[int]) -> int:
    return sum(exps) - 1


def graded_split(D: Derivation, kind: AlgebraKind | None = None) -> GradedDecomposition:
    """Split D by the degree |e| - 1 of its terms x^e d_j."""
    if kind is not None:
        _check_kind(kind, D)
    R = ring(D.desc.p, D.n)
    comps = {}
    for d in np.unique(R.degrees):
        mask = R.degrees == d
        part = np.where(mask[None, :], D.c, 0)
        if part.any():
            comps[int(d) - 1] = Derivation(D.desc, D.n, part)
    return GradedDecomposition(comps)


def filtration_degree(D: Derivation) -> int:
    """Largest i with D in g_(i); a large sentinel for 0."""
    parts = graded_split(D).components
    return min(parts) if parts else 10**9


def euler(desc: FieldDesc, n: int, coeffs: Sequence) -> Derivation:
    """sum_i c_i x_i d_i"""
    out = Derivation.zero(desc, n)
    for i, c in enumerate(coeffs):
        out = out + Derivation.term(TruncPoly.x(desc, n, i), i).scale(c)
    return out
