"""
Normalizer and centralizer of the standard torus t_r in Aut W(n).

An automorphism of the form

    phi(x_j)     = prod_{i<r} y_i^{M[i, j]} - 1                  (j < r)
    phi(x_{r+j}) = a_j x_{r+sigma[j]} prod_{l<r} y_l^{E[l, j]}   (j < n - r)

with M invertible over F_p and all a_j nonzero normalizes t_r.  Membership
is decided directly by conjugating the torus basis; the shape above is
checked independently by ``matches_form_star``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import gf
from .aut import AutoMap, apply_sigma
from .cartan import AlgebraKind
from .gf import FieldDesc, FieldElem
from .orbits import ConstructionFailed, induced_weyl, intertwines
from .tori import coords_in_torus, standard_torus
from .trunc import TruncPoly, ring, ypow


@dataclass(frozen=True)
class NormalizerParamsW:
    n: int
    r: int
    M: tuple
    a: tuple  # FieldElem scalars, length n - r
    sigma: tuple
    E: tuple

    @classmethod
    def make(cls, n, r, M, a, sigma, E, desc: FieldDesc) -> "NormalizerParamsW":
        p = desc.p
        M = np.asarray(M, dtype=np.int64).reshape(r, r) % p
        E = np.asarray(E, dtype=np.int64).reshape(r, n - r) % p
        a = tuple(desc.elem(c) for c in a)
        sigma = tuple(int(s) for s in sigma)
        if len(a) != n - r or any(not c for c in a):
            raise ConstructionFailed("need n - r nonzero scalars")
        if sorted(sigma) != list(range(n - r)):
            raise ConstructionFailed("sigma must permute the tail")
        if r and gf.rank(gf.field_make(p), M) != r:
            raise ConstructionFailed("M must be invertible over F_p")
        return cls(n, r, tuple(map(tuple, M.tolist())), a, sigma, tuple(map(tuple, E.tolist())))

    def M_array(self):
        return np.array(self.M, dtype=np.int64).reshape(self.r, self.r)

    def E_array(self):
        return np.array(self.E, dtype=np.int64).reshape(self.r, self.n - self.r)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "M": [list(row) for row in self.M],
            "a": [c.to_json() for c in self.a],
            "sigma": list(self.sigma),
            "E": [list(row) for row in self.E],
        }

    @classmethod
    def from_json(cls, obj: dict, n: int, desc: FieldDesc) -> "NormalizerParamsW":
        return cls.make(n, int(obj["r"]), obj["M"], obj["a"], obj["sigma"], obj["E"], desc)


def _shape_images(desc: FieldDesc, n: int, r: int, M, a, sigma, E) -> list[TruncPoly]:
    pad = [0] * (n - r)
    images = []
    for j in range(r):
        images.append(ypow(desc, n, list(M[:, j]) + pad) - 1)
    for j in range(n - r):
        x = TruncPoly.x(desc, n, r + sigma[j])
        images.append((ypow(desc, n, list(E[:, j]) + pad) * x).scale(a[j]))
    return images


def normalizer_element_W(params: NormalizerParamsW, desc: FieldDesc, verify: bool = True) -> AutoMap:
    n, r = params.n, params.r
    images = _shape_images(desc, n, r, params.M_array(), params.a, params.sigma, params.E_array())
    phi = AutoMap(images)
    if verify and not is_in_normalizer_W(phi, r):
        raise ConstructionFailed("normalizer-shaped element does not normalize the torus")
    return phi


def is_in_normalizer_W(phi: AutoMap, r: int) -> bool:
    """sigma_phi maps every basis vector of t_r into the span of t_r."""
    tor = standard_torus(AlgebraKind("W", phi.n), r, phi.desc)
    for d in tor.basis:
        if coords_in_torus(apply_sigma(phi, d), tor) is None:
            return False
    return True


def matches_form_star(phi: AutoMap, r: int) -> NormalizerParamsW | None:
    """Recover the parameters if phi has the normalizer shape, else None.

    The parameters are read off the linear and bilinear coefficients and
    the candidate is rebuilt and compared coefficient by coefficient.
    """
    desc, n = phi.desc, phi.n
    p = desc.p
    R = ring(p, n)
    L = phi.linear_part()
    M = np.zeros((r, r), dtype=np.int64)
    for j in range(r):
        row = L[j]
        if row[r:].any():
            return None
        for i in range(r):
            c = FieldElem(desc, int(row[i]))
            if not c.in_prime_field():
                return None
            M[i, j] = c.v
    sigma, a = [], []
    E = np.zeros((r, n - r), dtype=np.int64)
    for j in range(n - r):
        row = L[r + j]
        if row[:r].any():
            return None
        nz = np.flatnonzero(row[r:])
        if nz.size != 1:
            return None
        s = int(nz[0])
        aj = FieldElem(desc, int(row[r + s]))
        sigma.append(s)
        a.append(aj)
        inv = aj.inverse()
        f = phi.images[r + j]
        for l in range(r):
            e = [0] * n
            e[l] += 1
            e[r + s] += 1
            idx = R.index(e)
            c = FieldElem(desc, int(f.c[idx])) * inv
            if not c.in_prime_field():
                return None
            E[l, j] = c.v
    if sorted(sigma) != list(range(n - r)):
        return None
    if r and gf.rank(gf.field_make(p), M) != r:
        return None
    cand = _shape_images(desc, n, r, M, a, sigma, E)
    if tuple(cand) != tuple(phi.images):
        return None
    return NormalizerParamsW.make(n, r, M, a, sigma, E, desc)


def centralizer_element_W(n: int, r: int, c: Sequence, desc: FieldDesc, verify: bool = True) -> AutoMap:
    """Normalizer-shaped element with M = I, sigma = id, E = 0 and scalars c; fixes t_r pointwise."""
    params = NormalizerParamsW.make(n, r, np.eye(r, dtype=np.int64), c, range(n - r), np.zeros((r, n - r)), desc)
    phi = normalizer_element_W(params, desc, verify=False)
    if verify:
        tor = standard_torus(AlgebraKind("W", n), r, desc)
        for d in tor.basis:
            if not intertwines(phi, d, d):
                raise ConstructionFailed("centralizer element moves a torus basis vector")
    return phi


def fixes_torus(phi: AutoMap, r: int) -> bool:
    tor = standard_torus(AlgebraKind("W", phi.n), r, phi.desc)
    return all(intertwines(phi, d, d) for d in tor.basis)


def random_params(n: int, r: int, desc: FieldDesc, rng: np.random.Generator) -> NormalizerParamsW:
    p = desc.p
    fp = gf.field_make(p)
    while True:
        M = rng.integers(0, p, size=(r, r))
        if r == 0 or gf.rank(fp, M) == r:
            break
    a = [int(rng.integers(1, desc.q)) for _ in range(n - r)]
    a = [FieldElem(desc, v) for v in a]
    sigma = rng.permutation(n - r)
    E = rng.integers(0, p, size=(r, n - r))
    return NormalizerParamsW.make(n, r, M, a, sigma, E, desc)


def induced_weyl_W(phi: AutoMap, r: int):
    return induced_weyl(phi, AlgebraKind("W", phi.n), r)
