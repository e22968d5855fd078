"""
Index lowering, normalizer conjugators, Weyl group actions and orbit labels.

Conventions (0-based).  A Weyl element is the block matrix
M = [[A, B], [0, C]] over F_p acting on row vectors of torus
coordinates, beta = alpha M, where A is r x r and invertible, B is
r x (mu - r) and C[perm[j], j] = signs[j] (signs are all +1 except for H).
Concretely

    beta[l]     = sum_i alpha[i] A[i, l]                               (l < r)
    beta[r + j] = sum_i alpha[i] B[i, j] + signs[j] alpha[r + perm[j]]

The automorphism psi = normalizer_conjugator(w) satisfies
sigma_psi(realize(w . alpha)) = realize(alpha).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import gf
from .aut import AutoMap, apply_sigma, aut_compose, aut_invert, compose_chain, is_aut_H, is_aut_S
from .cartan import AlgebraKind, Derivation
from .gf import FieldDesc, FieldElem, fp_independent, fp_rref, fp_solve
from .tori import TorusDesc, TorusElem, coords_in_torus, standard_torus
from .trunc import TruncPoly, ypow


class DependencyViolated(ValueError):
    pass


class ConstructionFailed(ArithmeticError):
    pass


class IndexMismatch(ValueError):
    pass


class KindMismatch(ValueError):
    pass


class ShapeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Weyl elements


@dataclass(frozen=True)
class WeylElem:
    kind: AlgebraKind
    r: int
    p: int
    A: tuple  # r x r, entries in [0, p)
    B: tuple  # r x (mu - r)
    perm: tuple  # length mu - r
    signs: tuple  # length mu - r, entries +-1

    @classmethod
    def make(cls, kind, r, p, A=None, B=None, perm=None, signs=None) -> "WeylElem":
        mu = kind.mu
        t = mu - r
        A = np.eye(r, dtype=np.int64) if A is None else np.asarray(A, dtype=np.int64).reshape(r, r)
        B = np.zeros((r, t), dtype=np.int64) if B is None else np.asarray(B, dtype=np.int64).reshape(r, t)
        perm = tuple(range(t)) if perm is None else tuple(int(v) for v in perm)
        signs = (1,) * t if signs is None else tuple(int(s) for s in signs)
        w = cls(
            kind,
            r,
            p,
            tuple(tuple(int(v) % p for v in row) for row in A),
            tuple(tuple(int(v) % p for v in row) for row in B),
            perm,
            signs,
        )
        if not weyl_contains(kind, r, w):
            raise ShapeError(f"not an element of the Weyl group of t_{r} in {kind}")
        return w

    @classmethod
    def identity(cls, kind, r, p) -> "WeylElem":
        return cls.make(kind, r, p)

    def A_array(self) -> np.ndarray:
        return np.array(self.A, dtype=np.int64).reshape(self.r, self.r)

    def B_array(self) -> np.ndarray:
        return np.array(self.B, dtype=np.int64).reshape(self.r, self.kind.mu - self.r)

    def matrix(self) -> np.ndarray:
        """The full mu x mu matrix M with beta = alpha M, entries mod p."""
        mu, r = self.kind.mu, self.r
        M = np.zeros((mu, mu), dtype=np.int64)
        M[:r, :r] = self.A_array()
        M[:r, r:] = self.B_array()
        for j, (k, s) in enumerate(zip(self.perm, self.signs)):
            M[r + k, r + j] = s % self.p
        return M

    def to_json(self) -> dict:
        return {
            "kind": self.kind.to_json(),
            "r": self.r,
            "A": [list(row) for row in self.A],
            "B": [list(row) for row in self.B],
            "perm": list(self.perm),
            "signs": list(self.signs),
        }

    @classmethod
    def from_json(cls, obj: dict, p: int) -> "WeylElem":
        kind = AlgebraKind.from_json(obj["kind"])
        return cls.make(kind, int(obj["r"]), p, obj["A"], obj["B"], obj["perm"], obj.get("signs"))


def weyl_contains(kind: AlgebraKind, r: int, w: WeylElem) -> bool:
    """Structural membership test for the Weyl group of t_r."""
    mu = kind.mu
    t = mu - r
    if w.kind != kind or w.r != r or not 0 <= r <= mu:
        return False
    if len(w.A) != r or any(len(row) != r for row in w.A):
        return False
    if len(w.B) != r or any(len(row) != t for row in w.B):
        return False
    if sorted(w.perm) != list(range(t)) or len(w.signs) != t:
        return False
    if any(s not in (1, -1) for s in w.signs):
        return False
    if kind.tag != "H2" and any(s != 1 for s in w.signs):
        return False
    if r:
        fp = gf.field_make(w.p)
        if gf.rank(fp, w.A_array()) != r:
            return False
    return True


def weyl_apply(w: WeylElem, lam: Sequence[FieldElem]) -> tuple[FieldElem, ...]:
    mu, r = w.kind.mu, w.r
    if len(lam) != mu:
        raise ShapeError(f"need {mu} coordinates, got {len(lam)}")
    desc = lam[0].desc if lam else None
    out = []
    for l in range(r):
        acc = desc.zero
        for i in range(r):
            if w.A[i][l]:
                acc = acc + lam[i] * w.A[i][l]
        out.append(acc)
    for j in range(mu - r):
        acc = lam[r + w.perm[j]] * w.signs[j]
        for i in range(r):
            if w.B[i][j]:
                acc = acc + lam[i] * w.B[i][j]
        out.append(acc)
    return tuple(out)


def weyl_compose(w1: WeylElem, w2: WeylElem) -> WeylElem:
    """w1 o w2 (apply w2 first); its matrix is M2 M1."""
    return weyl_from_matrix(w1.kind, w1.r, w1.p, (w2.matrix() @ w1.matrix()) % w1.p)


def weyl_from_matrix(kind: AlgebraKind, r: int, p: int, M) -> WeylElem:
    M = np.asarray(M, dtype=np.int64) % p
    mu = kind.mu
    if M.shape != (mu, mu):
        raise ShapeError(f"expected a {mu} x {mu} matrix")
    if M[r:, :r].any():
        raise ShapeError("lower-left block must vanish")
    C = M[r:, r:]
    perm, signs = [], []
    for j in range(mu - r):
        nz = np.flatnonzero(C[:, j])
        if nz.size != 1:
            raise ShapeError("tail block is not a signed permutation")
        v = int(C[nz[0], j])
        if v == 1:
            signs.append(1)
        elif v == p - 1:
            signs.append(-1)
        else:
            raise ShapeError("tail block has an entry other than +-1")
        perm.append(int(nz[0]))
    return WeylElem.make(kind, r, p, M[:r, :r], M[:r, r:], perm, signs)


def weyl_inverse(w: WeylElem) -> WeylElem:
    fp = gf.field_make(w.p)
    return weyl_from_matrix(w.kind, w.r, w.p, gf.inverse(fp, w.matrix()))


def random_weyl(kind: AlgebraKind, r: int, p: int, rng: np.random.Generator) -> WeylElem:
    fp = gf.field_make(p)
    t = kind.mu - r
    while True:
        A = rng.integers(0, p, size=(r, r))
        if r == 0 or gf.rank(fp, A) == r:
            break
    B = rng.integers(0, p, size=(r, t))
    perm = rng.permutation(t)
    signs = rng.choice([1, -1], size=t) if kind.tag == "H2" else np.ones(t, dtype=np.int64)
    return WeylElem.make(kind, r, p, A, B, perm, signs)


# ---------------------------------------------------------------------------
# verification helpers


def intertwines(phi: AutoMap, D: Derivation, E: Derivation) -> bool:
    """sigma_phi(D) == E, tested as phi(D(x_j)) == E(phi(x_j)) for every j."""
    n = phi.n
    xs = [TruncPoly.x(phi.desc, n, j) for j in range(n)]
    lhs = phi.apply_all([D(x) for x in xs])
    return all(a == E(b) for a, b in zip(lhs, phi.images))


def kind_automorphism(kind: AlgebraKind, phi: AutoMap) -> bool:
    """phi (through sigma_phi) is an automorphism of the algebra of this kind."""
    if kind.tag == "W":
        return True
    if kind.tag == "S1":
        return is_aut_S(phi)
    return is_aut_H(phi, kind.m)[0]


# ---------------------------------------------------------------------------
# lowering the index


def lower_index(kind: AlgebraKind, r: int, lam: Sequence[FieldElem], u: Sequence[int], verify: bool = True) -> AutoMap:
    """Automorphism moving sum lam_i d_i of t_r into t_{r-1}.

    Requires lam[r-1] = sum_{i<r-1} u_i lam[i] with u_i in F_p.  The
    coordinates of the image against t_{r-1} are again ``lam``.
    """
    if not 1 <= r <= kind.mu:
        raise DependencyViolated(f"r={r} outside [1, {kind.mu}]")
    lam = list(lam)
    if len(lam) != kind.mu:
        raise ShapeError(f"need {kind.mu} coordinates")
    u = [int(c) for c in u]
    if len(u) != r - 1:
        raise DependencyViolated(f"need {r - 1} dependency coefficients, got {len(u)}")
    desc = lam[0].desc
    p = desc.p
    rhs = desc.zero
    for ui, li in zip(u, lam):
        rhs = rhs + li * ui
    if rhs != lam[r - 1]:
        raise DependencyViolated("lam[r-1] is not the given F_p-combination of the earlier coordinates")

    n = kind.n
    xs = [TruncPoly.x(desc, n, i) for i in range(n)]
    Y = ypow(desc, n, u)
    images = list(xs)
    images[r - 1] = xs[r - 1] + Y - 1
    if kind.tag == "H2":
        m = kind.m
        for i in range(r - 1):
            if u[i] % p:
                exps = list(u)
                exps[i] -= 1
                images[m + i] = xs[m + i] - (ypow(desc, n, exps) * xs[m + r - 1]).scale(u[i])
    phi = AutoMap(images)
    if verify:
        _verify_step(kind, phi, standard_torus(kind, r, desc), lam, standard_torus(kind, r - 1, desc), lam)
    return phi


def _verify_step(kind, phi, t_from: TorusDesc, lam_from, t_to: TorusDesc, lam_to) -> None:
    if not kind_automorphism(kind, phi):
        raise ConstructionFailed(f"constructed map is not an automorphism of {kind}")
    if not intertwines(phi, t_from.realize(lam_from), t_to.realize(lam_to)):
        raise ConstructionFailed("constructed map does not land where expected")


def _find_dependent(head: Sequence[FieldElem]) -> tuple[int, list[int]] | None:
    """Largest j with head[j] in the F_p-span of the others, and the coefficients."""
    for j in range(len(head) - 1, -1, -1):
        others = list(head[:j]) + list(head[j + 1:])
        sol = fp_solve(others, head[j])
        if sol is not None:
            return j, sol
    return None


def reduce_index(e: TorusElem, verify: bool = True):
    """See tori.index_of."""
    r, chain, steps = index_trace(e, verify)
    return r, list(chain), steps[-1]


@lru_cache(maxsize=4096)
def index_trace(e: TorusElem, verify: bool = True):
    """Like index_of, but also returns the element reached after each step.

    The result is (r_min, chain, steps) with steps[0] == e and
    sigma_{chain[i]}(steps[i]) == steps[i + 1] for every i.
    """
    kind, desc = e.kind, e.desc
    lam = list(e.lam)
    r = e.r
    chain: list[AutoMap] = []
    steps = [e]
    while r > 0 and not fp_independent(lam[:r]):
        found = _find_dependent(lam[:r])
        if found is None:  # pragma: no cover - a dependent family always has such j
            raise ConstructionFailed("no dependent coordinate found")
        j, coeffs = found
        if j != r - 1:
            # move the dependent coordinate to the last head slot
            P = np.eye(r, dtype=np.int64)
            P[[j, r - 1]] = P[[r - 1, j]]
            psi = normalizer_conjugator(kind, r, P, None, None, None, desc, verify=False)
            swapped = list(lam)
            swapped[j], swapped[r - 1] = lam[r - 1], lam[j]
            if verify:
                t = standard_torus(kind, r, desc)
                _verify_step(kind, psi, t, lam, t, swapped)
            chain.append(psi)
            lam = swapped
            steps.append(standard_torus(kind, r, desc).elem(lam))
            # coeffs are listed for the other positions in increasing order;
            # after the swap position j holds the old lam[r-1]
            u_map = dict(zip([i for i in range(r) if i != j], coeffs))
            u = [u_map.get(i, 0) for i in range(r - 1)]
            u[j] = u_map[r - 1]
        else:
            u = coeffs
        chain.append(lower_index(kind, r, lam, u, verify=verify))
        r -= 1
        steps.append(standard_torus(kind, r, desc).elem(lam))
    return r, tuple(chain), tuple(steps)


# ---------------------------------------------------------------------------
# normalizer conjugators


def normalizer_conjugator(
    kind: AlgebraKind,
    r: int,
    A,
    B,
    perm,
    signs,
    desc: FieldDesc,
    verify: bool = True,
) -> AutoMap:
    """Automorphism psi normalizing t_r and inducing the Weyl element (A, B, perm, signs).

    With w the corresponding WeylElem, sigma_psi(realize(w . alpha)) = realize(alpha).
    """
    p = desc.p
    w = WeylElem.make(kind, r, p, A, B, perm, signs)
    A, B = w.A_array(), w.B_array()
    n, mu = kind.n, kind.mu
    t = mu - r
    xs = [TruncPoly.x(desc, n, i) for i in range(n)]
    pad = n - r

    def Y(col):
        return ypow(desc, n, list(col) + [0] * pad)

    images = [None] * n
    for l in range(r):
        images[l] = Y(A[:, l]) - 1
    if kind.tag in ("W", "S1"):
        for j in range(t):
            images[r + j] = Y(B[:, j]) * xs[r + w.perm[j]]
        if kind.tag == "S1":
            e = [(1 - int(A[i].sum()) - int(B[i].sum())) % p for i in range(r)]
            images[n - 1] = Y(e) * xs[n - 1]
    else:
        m = kind.m
        us, vs = [], []
        for j in range(t):
            s = r + w.perm[j]
            if w.signs[j] == 1:
                u_j = Y(B[:, j]) * xs[s]
                v_j = Y(-B[:, j]) * xs[m + s]
            else:
                u_j = Y(B[:, j]) * xs[m + s]
                v_j = -(Y(-B[:, j]) * xs[s])
            images[r + j] = u_j
            images[m + r + j] = v_j
            us.append(u_j)
            vs.append(v_j)
        fp = gf.field_make(p)
        N = gf.inverse(fp, A) if r else np.zeros((0, 0), dtype=np.int64)
        moms = []
        for k in range(r):
            P = TruncPoly.y(desc, n, k) * xs[m + k]
            for j in range(t):
                if B[k, j]:
                    P = P - (us[j] * vs[j]).scale(int(B[k, j]))
            moms.append(P)
        for l in range(r):
            acc = TruncPoly.zero(desc, n)
            for k in range(r):
                if N[l, k]:
                    acc = acc + moms[k].scale(int(N[l, k]))
            images[m + l] = Y(-A[:, l]) * acc
    psi = AutoMap(images)
    if verify:
        tor = standard_torus(kind, r, desc)
        if not kind_automorphism(kind, psi):
            raise ConstructionFailed(f"conjugator is not an automorphism of {kind}")
        for i in range(mu):
            # sigma_psi(realize(w . e_i)) must be d_i
            e_i = [desc.one if k == i else desc.zero for k in range(mu)]
            if not intertwines(psi, tor.realize(weyl_apply(w, e_i)), tor.basis[i]):
                raise ConstructionFailed("conjugator does not induce the requested Weyl element")
    return psi


def conjugator_for(w: WeylElem, desc: FieldDesc, verify: bool = True) -> AutoMap:
    return normalizer_conjugator(w.kind, w.r, w.A_array(), w.B_array(), w.perm, w.signs, desc, verify)


def induced_weyl(phi: AutoMap, kind: AlgebraKind, r: int) -> WeylElem:
    """The Weyl element w with sigma_phi(realize(w . alpha)) = realize(alpha).

    Raises ConstructionFailed if phi does not normalize t_r or the induced
    matrix is not of Weyl shape.
    """
    desc = phi.desc
    tor = standard_torus(kind, r, desc)
    rows = []
    for d in tor.basis:
        c = coords_in_torus(apply_sigma(phi, d), tor)
        if c is None:
            raise ConstructionFailed("automorphism does not normalize the torus")
        if not all(v.in_prime_field() for v in c):
            raise ConstructionFailed("induced matrix is not defined over F_p")
        rows.append([int(v.v) for v in c])
    fp = gf.field_make(desc.p)
    T = np.array(rows, dtype=np.int64).reshape(kind.mu, kind.mu)
    try:
        return weyl_from_matrix(kind, r, desc.p, gf.inverse(fp, T))
    except (ShapeError, ZeroDivisionError) as exc:
        raise ConstructionFailed(str(exc)) from None


# ---------------------------------------------------------------------------
# labels and classification


@dataclass(frozen=True)
class OrbitLabel:
    kind: AlgebraKind
    r: int
    vbasis: tuple  # tuple of coordinate tuples
    tail: tuple  # sorted tuple of coordinate tuples

    def to_json(self) -> dict:
        return {
            "kind": self.kind.to_json(),
            "r": self.r,
            "vbasis": [list(v) for v in self.vbasis],
            "tail": [list(v) for v in self.tail],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "OrbitLabel":
        return cls(
            AlgebraKind.from_json(obj["kind"]),
            int(obj["r"]),
            tuple(tuple(v) for v in obj["vbasis"]),
            tuple(tuple(v) for v in obj["tail"]),
        )


def _tail_class(v: FieldElem, reducer, signed: bool) -> tuple[int, ...]:
    a = reducer(v).coords
    if not signed:
        return a
    return min(a, reducer(-v).coords)


def orbit_label(e: TorusElem) -> OrbitLabel:
    """Canonical invariant of the orbit of an element whose index is its torus rank."""
    head = e.head()
    if not fp_independent(head):
        raise IndexMismatch("leading coordinates are F_p-dependent; reduce with index_of first")
    basis, _, reducer = fp_rref(head, e.desc)
    signed = e.kind.tag == "H2"
    tail = sorted(_tail_class(v, reducer, signed) for v in e.tail())
    return OrbitLabel(e.kind, e.r, tuple(b.coords for b in basis), tuple(tail))


def label_of(e: TorusElem) -> OrbitLabel:
    """orbit_label after lowering to the index."""
    return orbit_label(reduce_index(e)[2])


def _matching_weyl(f1: TorusElem, f2: TorusElem) -> WeylElem | None:
    """w with weyl_apply(w, f2.lam) == f1.lam, built from equal labels."""
    kind, r, desc = f1.kind, f1.r, f1.desc
    p = desc.p
    h1, h2 = f1.head(), f2.head()
    A = np.zeros((r, r), dtype=np.int64)
    for l in range(r):
        col = fp_solve(h2, h1[l])
        if col is None:
            return None
        A[:, l] = col
    _, _, reducer = fp_rref(h2, desc)
    t1, t2 = f1.tail(), f2.tail()
    used = [False] * len(t2)
    perm, signs = [], []
    B = np.zeros((r, len(t1)), dtype=np.int64)
    sign_choices = (1, -1) if kind.tag == "H2" else (1,)
    for j, v in enumerate(t1):
        rv = reducer(v)
        hit = None
        for k, wv in enumerate(t2):
            if used[k]:
                continue
            for s in sign_choices:
                if reducer(wv * s) == rv:
                    hit = (k, s)
                    break
            if hit:
                break
        if hit is None:
            return None
        k, s = hit
        used[k] = True
        perm.append(k)
        signs.append(s)
        coeffs = fp_solve(h2, v - wv * s) if r else []
        if coeffs is None:
            return None
        if r:
            B[:, j] = coeffs
    return WeylElem.make(kind, r, p, A, B, perm, signs)


def same_orbit(e1: TorusElem, e2: TorusElem, verify: bool = True):
    """Decide whether e1, e2 are conjugate; return (bool, witness).

    The witness phi satisfies sigma_phi(realize(e1)) == realize(e2).
    """
    if e1.kind != e2.kind:
        raise KindMismatch(f"{e1.kind} vs {e2.kind}")
    if e1.desc != e2.desc:
        raise KindMismatch(f"different fields {e1.desc!r} vs {e2.desc!r}")
    kind, desc = e1.kind, e1.desc
    r1, c1, f1 = reduce_index(e1)
    r2, c2, f2 = reduce_index(e2)
    if r1 != r2:
        return False, None
    if orbit_label(f1) != orbit_label(f2):
        return False, None
    w = _matching_weyl(f1, f2)
    if w is None:
        raise ConstructionFailed("equal labels but no matching Weyl element")
    psi = conjugator_for(w, desc, verify=False)
    C1 = compose_chain(c1, desc, kind.n)
    C2 = compose_chain(c2, desc, kind.n)
    witness = aut_compose(aut_invert(C2), aut_compose(psi, C1))
    if verify:
        if not kind_automorphism(kind, witness):
            raise ConstructionFailed("witness is not an automorphism of the algebra")
        if not intertwines(witness, e1.realize(), e2.realize()):
            raise ConstructionFailed("witness does not conjugate e1 onto e2")
    return True, witness


def chain_composite(chain, desc: FieldDesc, n: int) -> AutoMap:
    """Composite of an index_of chain (first element applied first)."""
    return compose_chain(chain, desc, n)
