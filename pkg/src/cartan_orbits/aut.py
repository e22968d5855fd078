"""
Automorphisms of A(n) and the induced automorphisms of W(n).

An automorphism phi is given by the images phi(x_i).  It acts on
derivations by conjugation, sigma_phi(D) = phi o D o phi^-1.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import gf
from .cartan import Derivation, poisson, prime_index, sigma_index
from .gf import FieldDesc, FieldElem, MixedFields
from .trunc import Incompatible, TruncPoly, ring, substitute_all


class NotAnAutomorphism(ValueError):
    pass


class AutoMap:
    """Automorphism of A(n) determined by the images of the generators."""

    def __init__(self, images: Sequence[TruncPoly], _checked: bool = False):
        images = tuple(images)
        if not images:
            raise NotAnAutomorphism("need at least one generator image")
        desc, n = images[0].desc, images[0].n
        if len(images) != n:
            raise Incompatible(f"A({n}) needs {n} images, got {len(images)}")
        for f in images:
            if f.n != n:
                raise Incompatible("images must share one ring")
            if f.desc != desc:
                raise MixedFields(f"{f.desc} vs {desc}")
        self.desc: FieldDesc = desc
        self.n: int = n
        self.images = images
        self._inv_images = None
        self._matrix = None
        self._inverse_matrix = None
        if not _checked:
            self._validate()

    def _validate(self) -> None:
        for i, f in enumerate(self.images):
            if f.c[0]:
                raise NotAnAutomorphism(f"image of x{i + 1} has a nonzero constant term")
        try:
            self._linv = gf.inverse(self.desc, self.linear_part())
        except ZeroDivisionError:
            raise NotAnAutomorphism("linear part is singular") from None

    def linear_part(self) -> np.ndarray:
        """L[i, j] = coefficient of x_j in phi(x_i)."""
        strides = ring(self.desc.p, self.n).strides
        return np.array([[f.c[int(s)] for s in strides] for f in self.images], dtype=np.int64)

    def __call__(self, f: TruncPoly) -> TruncPoly:
        return f.substitute(self.images)

    def apply_all(self, polys: Sequence[TruncPoly]) -> list[TruncPoly]:
        return substitute_all(polys, self.images)

    @property
    def inverse_images(self) -> tuple[TruncPoly, ...]:
        if self._inv_images is None:
            self._inv_images = _invert_images(self)
        return self._inv_images

    @property
    def matrix(self) -> np.ndarray:
        """Matrix of phi on the monomial basis; column j is phi(monomial j)."""
        if self._matrix is None:
            R = ring(self.desc.p, self.n)
            cols = []
            for idx in range(R.N):
                e = np.zeros(R.N, dtype=np.int64)
                e[idx] = 1
                cols.append(TruncPoly(self.desc, self.n, e))
            self._matrix = np.stack([g.c for g in self.apply_all(cols)], axis=1)
        return self._matrix

    @property
    def inverse_matrix(self) -> np.ndarray:
        if self._inverse_matrix is None:
            self._inverse_matrix = gf.inverse(self.desc, self.matrix)
        return self._inverse_matrix

    def is_identity(self) -> bool:
        return all(f == TruncPoly.x(self.desc, self.n, i) for i, f in enumerate(self.images))

    def __eq__(self, other):
        if not isinstance(other, AutoMap):
            return NotImplemented
        return self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def to_json(self) -> dict:
        return {"n": self.n, "images": [f.to_json() for f in self.images]}

    @classmethod
    def from_json(cls, desc: FieldDesc, obj: dict) -> "AutoMap":
        return aut_make([TruncPoly.from_json(desc, f) for f in obj["images"]])

    def __repr__(self):
        body = ", ".join(f"x{i + 1} -> {f!r}" for i, f in enumerate(self.images))
        return f"AutoMap({body})"


def _invert_images(phi: AutoMap) -> tuple[TruncPoly, ...]:
    # Newton-type iteration psi <- psi - L^-1 (phi(x)(psi) - x); each round
    # raises the order of the error by one, so it stops after n(p-1)+1 rounds
    desc, n = phi.desc, phi.n
    linv = phi._linv if hasattr(phi, "_linv") else gf.inverse(desc, phi.linear_part())
    xs = [TruncPoly.x(desc, n, i) for i in range(n)]

    def combine(vecs):
        out = []
        for j in range(n):
            acc = TruncPoly.zero(desc, n)
            for i in range(n):
                if linv[j, i]:
                    acc = acc + vecs[i].scale(FieldElem(desc, int(linv[j, i])))
            out.append(acc)
        return out

    psi = combine(xs)
    for _ in range(n * (desc.p - 1) + 2):
        err = [g - x for g, x in zip(substitute_all(list(phi.images), psi), xs)]
        if all(e.is_zero() for e in err):
            return tuple(psi)
        corr = combine(err)
        psi = [a - b for a, b in zip(psi, corr)]
    raise NotAnAutomorphism("inverse iteration did not converge")


def aut_make(images: Sequence[TruncPoly]) -> AutoMap:
    """Validated automorphism of A(n) from the images of x_0..x_{n-1}."""
    return AutoMap(images)


def identity(desc: FieldDesc, n: int) -> AutoMap:
    return AutoMap([TruncPoly.x(desc, n, i) for i in range(n)])


def aut_compose(phi: AutoMap, psi: AutoMap) -> AutoMap:
    """phi o psi, so that sigma_{phi o psi} = sigma_phi o sigma_psi."""
    if phi.n != psi.n or phi.desc != psi.desc:
        raise Incompatible("automorphisms of different rings")
    return AutoMap(phi.apply_all(list(psi.images)))


def aut_invert(phi: AutoMap) -> AutoMap:
    out = AutoMap(phi.inverse_images, _checked=True)
    out._linv = phi.linear_part()
    out._inv_images = phi.images
    return out


def compose_chain(chain: Sequence[AutoMap], desc: FieldDesc, n: int) -> AutoMap:
    """chain[-1] o ... o chain[0]: apply chain[0] first."""
    out = identity(desc, n)
    for phi in chain:
        out = aut_compose(phi, out)
    return out


def apply_sigma(phi: AutoMap, D: Derivation) -> Derivation:
    """phi o D o phi^-1, read off on the generators."""
    if D.n != phi.n or D.desc != phi.desc:
        raise Incompatible("derivation and automorphism live in different rings")
    inner = [D(g) for g in phi.inverse_images]
    return Derivation(phi.desc, phi.n, phi.apply_all(inner))


def apply_sigma_matrix(phi: AutoMap, D: Derivation) -> Derivation:
    """Same as apply_sigma but through the monomial-basis matrices (slow)."""
    M = gf.matmul(phi.desc, gf.matmul(phi.desc, phi.matrix, D.matrix()), phi.inverse_matrix)
    R = ring(phi.desc.p, phi.n)
    return Derivation(phi.desc, phi.n, M[:, R.strides].T.copy())


def jacobian(phi: AutoMap) -> list[list[TruncPoly]]:
    """J[i][j] = d_i phi(x_j)."""
    return [[f.partial(i) for f in phi.images] for i in range(phi.n)]


def jacobian_det(phi: AutoMap) -> TruncPoly:
    """Determinant of the Jacobian over A(n), by elimination with unit pivots."""
    M = jacobian(phi)
    n = phi.n
    det = TruncPoly.one(phi.desc, n)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col].is_unit()), None)
        if piv is None:
            # the linear part of an automorphism is invertible, so this
            # only happens for non-automorphisms
            raise NotAnAutomorphism("Jacobian is not invertible at 0")
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        p_inv = M[col][col].inverse()
        det = det * M[col][col]
        for r in range(col + 1, n):
            if M[r][col].is_zero():
                continue
            f = M[r][col] * p_inv
            M[r] = [a - f * b for a, b in zip(M[r], M[col])]
    return det


def is_aut_S(phi: AutoMap, strict: bool = True) -> bool:
    """Jacobian determinant test for automorphisms of S(n)^(1).

    Strict: the determinant is a nonzero constant.  Relaxed: any unit.
    """
    det = jacobian_det(phi)
    if strict:
        return det.is_constant() and det.is_unit()
    return det.is_unit()


def is_aut_H(phi: AutoMap, m: int | None = None) -> tuple[bool, FieldElem | None]:
    """Find a in k* with {phi(x_i), phi(x_j)} = a sigma(i) delta_{i',j} for all i, j."""
    if m is None:
        m = phi.n // 2
    if phi.n != 2 * m:
        return False, None
    f = phi.images
    a_poly = poisson(f[0], f[m], m)
    if not a_poly.is_constant() or not a_poly.is_unit():
        return False, None
    a = a_poly.constant_term()
    for i in range(2 * m):
        for j in range(i + 1, 2 * m):
            val = poisson(f[i], f[j], m)
            if j == prime_index(i, m):
                want = a * sigma_index(i, m)
                if not (val.is_constant() and val.constant_term() == want):
                    return False, None
            elif not val.is_zero():
                return False, None
    return True, a


def poisson_table(images: Sequence[TruncPoly], m: int) -> list[list[TruncPoly]]:
    return [[poisson(f, g, m) for g in images] for f in images]
