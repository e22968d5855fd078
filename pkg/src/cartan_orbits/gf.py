"""
Finite fields GF(p^k) and linear algebra over them.

Elements are encoded as integers ``c = sum(coords[i] * p**i)`` where
``coords`` are the coefficients against the power basis of the modulus.
The prime subfield therefore occupies the codes ``0..p-1``.  Arithmetic
is table driven so that whole numpy arrays of codes can be combined with
fancy indexing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

# q*q lookup tables get built per field; keep them small
MAX_ORDER = 2048


class FieldError(ValueError):
    pass


class NonPrime(FieldError):
    pass


class ReducibleModulus(FieldError):
    pass


class MixedFields(FieldError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    # little-endian coefficient lists, b monic
    a = [x % p for x in a]
    db = len(b) - 1
    while len(a) - 1 >= db and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < db:
            break
        c = a[-1]
        shift = len(a) - 1 - db
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= k/2."""
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        for tail in product(range(p), repeat=d):
            if not _poly_rem(list(modulus), list(tail) + [1], p):
                return False
    return True


@dataclass(frozen=True)
class FieldDesc:
    """GF(p^k) given by a monic irreducible modulus (little-endian, length k+1)."""

    p: int
    k: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.k

    @property
    def tables(self) -> "_Tables":
        return _tables(self.p, self.k, self.modulus)

    @property
    def prime_field(self) -> "FieldDesc":
        return field_make(self.p, 1)

    def __call__(self, value) -> "FieldElem":
        return self.elem(value)

    def elem(self, value) -> "FieldElem":
        """Build an element from an int (prime subfield), a coordinate list, or a FieldElem."""
        if isinstance(value, FieldElem):
            if value.desc == self:
                return value
            if value.desc.k == 1 and value.desc.p == self.p:
                return FieldElem(self, value.v)
            raise MixedFields(f"{value.desc} vs {self}")
        if isinstance(value, (int, np.integer)):
            return FieldElem(self, int(value) % self.p)
        coords = [int(c) for c in value]
        if len(coords) != self.k:
            raise FieldError(f"expected {self.k} coordinates, got {len(coords)}")
        return FieldElem(self, encode(coords, self.p))

    def code(self, value) -> int:
        if isinstance(value, FieldElem):
            if value.desc != self and not (value.desc.k == 1 and value.desc.p == self.p):
                raise MixedFields(f"{value.desc} vs {self}")
            return value.v
        if isinstance(value, (int, np.integer)):
            return int(value) % self.p
        return self.elem(value).v

    @property
    def zero(self) -> "FieldElem":
        return FieldElem(self, 0)

    @property
    def one(self) -> "FieldElem":
        return FieldElem(self, 1)

    @property
    def theta(self) -> "FieldElem":
        """The class of x modulo the modulus (equals 0 for the prime field)."""
        if self.k == 1:
            return FieldElem(self, (-self.modulus[0]) % self.p)
        return FieldElem(self, self.p)

    def elements(self) -> list["FieldElem"]:
        return [FieldElem(self, c) for c in range(self.q)]

    def random(self, rng) -> "FieldElem":
        return FieldElem(self, int(rng.integers(self.q)))

    def to_json(self) -> dict:
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldDesc":
        mod = obj.get("modulus")
        return field_make(int(obj["p"]), int(obj.get("k", 1)), mod)

    def __repr__(self) -> str:
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k}; {list(self.modulus)})"


def encode(coords: Sequence[int], p: int) -> int:
    v = 0
    for c in reversed(coords):
        v = v * p + (int(c) % p)
    return v


def decode(v: int, p: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        out.append(v % p)
        v //= p
    return tuple(out)


def field_make(p: int, k: int = 1, modulus: Sequence[int] | None = None) -> FieldDesc:
    """Validated field descriptor.

    Without a modulus the lexicographically smallest monic irreducible
    polynomial is used, comparing coefficient lists ``[c0, .., c_{k-1}]``.
    A modulus may be passed with or without its leading 1.
    """
    if not is_prime(p) or p < 3:
        raise NonPrime(f"characteristic must be an odd prime, got {p}")
    if k < 1:
        raise FieldError("extension degree must be >= 1")
    if p**k > MAX_ORDER:
        raise FieldError(f"field of order {p**k} exceeds MAX_ORDER={MAX_ORDER}")
    if k == 1 and modulus is None:
        return FieldDesc(p, 1, (0, 1))
    if modulus is None:
        # product() enumerates [c0, c1, ..] in lexicographic order
        for cand in product(range(p), repeat=k):
            if cand[0] == 0:
                continue
            if is_irreducible(cand + (1,), p):
                return FieldDesc(p, k, cand + (1,))
        raise ReducibleModulus(f"no irreducible polynomial of degree {k} over GF({p})")
    mod = [int(c) % p for c in modulus]
    if len(mod) == k:
        mod = mod + [1]
    if len(mod) != k + 1 or mod[-1] != 1:
        raise FieldError(f"modulus must be monic of degree {k}")
    if k == 1:
        return FieldDesc(p, 1, (0, 1))
    if not is_irreducible(mod, p):
        raise ReducibleModulus(f"{mod} is reducible over GF({p})")
    return FieldDesc(p, k, tuple(mod))


class _Tables:
    def __init__(self, p: int, k: int, modulus: tuple[int, ...]):
        q = p**k
        self.p, self.k, self.q = p, k, q
        digits = np.array([decode(c, p, k) for c in range(q)], dtype=np.int64).reshape(q, k)
        weights = p ** np.arange(k, dtype=np.int64)
        self.digits = digits
        self.weights = weights
        add = (digits[:, None, :] + digits[None, :, :]) % p
        self.add = add @ weights
        self.neg = ((-digits) % p) @ weights
        self.sub = self.add[:, self.neg]
        # theta^s for s < 2k-1 in the power basis
        red = np.zeros((2 * k - 1, k), dtype=np.int64)
        cur = np.zeros(k, dtype=np.int64)
        cur[0] = 1
        low = np.array(modulus[:k], dtype=np.int64)
        for s in range(2 * k - 1):
            red[s] = cur
            top = cur[-1]
            cur = np.concatenate([[0], cur[:-1]])
            cur = (cur - top * low) % p
        prod = np.zeros((q, q, k), dtype=np.int64)
        for i in range(k):
            prod += digits[:, i][:, None, None] * (digits @ red[i : i + k])[None, :, :]
        self.mul = (prod % p) @ weights
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            b = int(np.flatnonzero(self.mul[a] == 1)[0])
            inv[a] = b
        self.inv = inv


@lru_cache(maxsize=None)
def _tables(p: int, k: int, modulus: tuple[int, ...]) -> _Tables:
    return _Tables(p, k, modulus)


class FieldElem:
    """Immutable element of a FieldDesc."""

    __slots__ = ("desc", "v")

    def __init__(self, desc: FieldDesc, v: int):
        self.desc = desc
        self.v = int(v)

    def _other(self, other) -> int:
        return self.desc.code(other)

    def __add__(self, other):
        return FieldElem(self.desc, self.desc.tables.add[self.v, self._other(other)])

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.desc, self.desc.tables.sub[self.v, self._other(other)])

    def __rsub__(self, other):
        return FieldElem(self.desc, self.desc.tables.sub[self._other(other), self.v])

    def __neg__(self):
        return FieldElem(self.desc, self.desc.tables.neg[self.v])

    def __mul__(self, other):
        return FieldElem(self.desc, self.desc.tables.mul[self.v, self._other(other)])

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if self.v == 0:
            raise ZeroDivisionError("zero has no inverse")
        return FieldElem(self.desc, self.desc.tables.inv[self.v])

    def __truediv__(self, other):
        return self * FieldElem(self.desc, self._other(other)).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out, base = self.desc.one, self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.desc == other.desc and self.v == other.v
        if isinstance(other, (int, np.integer)):
            return self.v == int(other) % self.desc.p
        return NotImplemented

    def __hash__(self):
        return hash((self.desc, self.v))

    def __bool__(self):
        return self.v != 0

    @property
    def coords(self) -> tuple[int, ...]:
        return decode(self.v, self.desc.p, self.desc.k)

    def in_prime_field(self) -> bool:
        return self.v < self.desc.p

    def sort_key(self) -> tuple[int, ...]:
        return self.coords

    def to_json(self) -> list[int]:
        return list(self.coords)

    def __repr__(self):
        if self.desc.k == 1:
            return str(self.v)
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                terms.append(f"{c}{mono}" if c != 1 or not mono else mono)
        return "+".join(terms) if terms else "0"


def _check_same(elems: Sequence[FieldElem]) -> FieldDesc | None:
    if not elems:
        return None
    d = elems[0].desc
    for e in elems[1:]:
        if e.desc != d:
            raise MixedFields(f"{e.desc} vs {d}")
    return d


# ---------------------------------------------------------------------------
# Gaussian elimination over GF(q) on arrays of codes


def rref(desc: FieldDesc, mat) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; pivot columns are scanned left to right."""
    t = desc.tables
    p = desc.p
    R = np.array(mat, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = R.shape
    pivots: list[int] = []
    i = 0
    prime = desc.k == 1
    for j in range(cols):
        if i == rows:
            break
        nz = np.flatnonzero(R[i:, j])
        if nz.size == 0:
            continue
        piv = i + int(nz[0])
        if piv != i:
            R[[i, piv]] = R[[piv, i]]
        if R[i, j] != 1:
            R[i] = t.mul[t.inv[R[i, j]], R[i]]
        others = np.flatnonzero(R[:, j])
        others = others[others != i]
        if others.size:
            f = R[others, j]
            if prime:
                R[others] = (R[others] - f[:, None] * R[i][None, :]) % p
            else:
                R[others] = t.sub[R[others], t.mul[f[:, None], R[i][None, :]]]
        pivots.append(j)
        i += 1
    return R[:i], pivots


def reduce_against(desc: FieldDesc, basis: np.ndarray, pivots: Sequence[int], vecs) -> np.ndarray:
    """Reduce the rows of ``vecs`` modulo the row space of an RREF ``basis``."""
    t = desc.tables
    V = np.array(vecs, dtype=np.int64, copy=True)
    if V.ndim == 1:
        return reduce_against(desc, basis, pivots, V[None, :])[0]
    for row, j in zip(basis, pivots):
        f = V[:, j]
        hit = np.flatnonzero(f)
        if hit.size:
            if desc.k == 1:
                V[hit] = (V[hit] - f[hit, None] * row[None, :]) % desc.p
            else:
                V[hit] = t.sub[V[hit], t.mul[f[hit, None], row[None, :]]]
    return V


class RowSpace:
    """Incrementally grown row space kept in RREF."""

    def __init__(self, desc: FieldDesc, width: int):
        self.desc = desc
        self.width = width
        self.basis = np.zeros((0, width), dtype=np.int64)
        self.pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, vecs) -> np.ndarray:
        return reduce_against(self.desc, self.basis, self.pivots, vecs)

    def contains(self, vec) -> bool:
        return not self.reduce(np.asarray(vec)[None, :]).any()

    def add(self, vecs) -> int:
        """Add rows; returns the number of new dimensions."""
        V = np.atleast_2d(np.asarray(vecs, dtype=np.int64))
        if V.shape[0] == 0:
            return 0
        V = self.reduce(V)
        V = V[V.any(axis=1)]
        if V.shape[0] == 0:
            return 0
        before = self.dim
        R, piv = rref(self.desc, np.vstack([self.basis, V]))
        self.basis, self.pivots = R, piv
        return self.dim - before


def solve(desc: FieldDesc, A, b) -> np.ndarray | None:
    """One solution x of A x = b, or None when inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    rows, cols = A.shape
    aug = np.hstack([A, b.reshape(rows, 1)])
    R, piv = rref(desc, aug)
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for row, j in zip(R, piv):
        x[j] = row[cols]
    return x


def nullspace(desc: FieldDesc, A) -> np.ndarray:
    """Basis (as rows) of the right kernel of A."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    R, piv = rref(desc, A)
    free = [j for j in range(cols) if j not in set(piv)]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for r, f in enumerate(free):
        out[r, f] = 1
        for row, j in zip(R, piv):
            out[r, j] = desc.tables.neg[row[f]]
    return out


def inverse(desc: FieldDesc, M) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("square matrix required")
    R, piv = rref(desc, np.hstack([M, np.eye(n, dtype=np.int64)]))
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R[:, n:]


def matmul(desc: FieldDesc, A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if desc.k == 1:
        return (A @ B) % desc.p
    t = desc.tables
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for s in range(A.shape[1]):
        out = t.add[out, t.mul[A[:, s][:, None], B[s][None, :]]]
    return out


def rank(desc: FieldDesc, mat) -> int:
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    return len(rref(desc, mat)[1])


# ---------------------------------------------------------------------------
# F_p-linear structure of GF(p^k)


def _coord_matrix(elems: Sequence[FieldElem]) -> np.ndarray:
    d = elems[0].desc
    return np.array([e.coords for e in elems], dtype=np.int64).reshape(len(elems), d.k)


def fp_independent(elems: Sequence[FieldElem]) -> bool:
    """True iff the elements are linearly independent over the prime field."""
    d = _check_same(elems)
    if d is None:
        return True
    if len(elems) > d.k:
        return False
    return rank(d.prime_field, _coord_matrix(elems)) == len(elems)


def fp_rref(
    elems: Sequence[FieldElem],
    desc: FieldDesc | None = None,
) -> tuple[list[FieldElem], list[int], Callable[[FieldElem], FieldElem]]:
    """RREF basis of the F_p-span plus the coset reducer.

    The reducer sends v to the unique element of v + span whose
    coordinates vanish at every pivot position.
    """
    d = _check_same(elems) or desc
    if d is None:
        return [], [], lambda v: v
    fp = d.prime_field
    if elems:
        R, piv = rref(fp, _coord_matrix(elems))
    else:
        R, piv = np.zeros((0, d.k), dtype=np.int64), []
    basis = [FieldElem(d, encode(row, d.p)) for row in R]

    def reducer(v: FieldElem) -> FieldElem:
        if v.desc != d:
            raise MixedFields(f"{v.desc} vs {d}")
        if not piv:
            return v
        red = reduce_against(fp, R, piv, np.array(v.coords, dtype=np.int64))
        return FieldElem(d, encode(red, d.p))

    return basis, list(piv), reducer


def fp_solve(basis: Sequence[FieldElem], target: FieldElem) -> list[int] | None:
    """Integer coefficients u (in [0,p)) with sum u_i basis_i = target, if any."""
    d = target.desc
    if not basis:
        return [] if target.v == 0 else None
    A = _coord_matrix(list(basis)).T
    x = solve(d.prime_field, A, np.array(target.coords, dtype=np.int64))
    return None if x is None else [int(c) for c in x]


def fp_span(elems: Iterable[FieldElem]) -> set[FieldElem]:
    """Enumerate the F_p-span (small fields only)."""
    elems = list(elems)
    if not elems:
        return set()
    d = elems[0].desc
    out = set()
    for coeffs in product(range(d.p), repeat=len(elems)):
        acc = d.zero
        for c, e in zip(coeffs, elems):
            acc = acc + e * c
        out.add(acc)
    return out
