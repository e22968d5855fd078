"""
Brute-force ground truth: enumerate Aut A(n) over a small field and search
for conjugating automorphisms directly.
"""

from __future__ import annotations

import itertools
import os
from typing import Iterable, Iterator

import numpy as np

from .aut import AutoMap, NotAnAutomorphism, apply_sigma
from .cartan import AlgebraKind, Derivation
from .gf import FieldDesc
from .orbits import kind_automorphism, intertwines, label_of, same_orbit
from .tori import TorusElem, standard_torus
from .trunc import TruncPoly, ring

DEFAULT_MAX_ENUM = 200_000


class TooLarge(RuntimeError):
    pass


def max_enum() -> int:
    raw = os.environ.get("CARTAN_ORBITS_MAX_ENUM")
    return int(raw) if raw else DEFAULT_MAX_ENUM


def aut_count(n: int, desc: FieldDesc) -> int:
    """Number of automorphisms of A(1) over the field (n = 1 only)."""
    if n != 1:
        raise TooLarge("exhaustive enumeration is only supported for n = 1")
    q, p = desc.q, desc.p
    return (q - 1) * q ** (p - 2)


def enumerate_aut(n: int, desc: FieldDesc, limit: int | None = None) -> Iterator[AutoMap]:
    """Every automorphism of A(1) over ``desc``.

    Images are a_1 x + a_2 x^2 + ... + a_{p-1} x^{p-1} with a_1 != 0,
    enumerated in mixed radix with a_1 outermost.
    """
    total = aut_count(n, desc)
    cap = max_enum() if limit is None else limit
    if total > cap:
        raise TooLarge(f"{total} automorphisms exceed the cap {cap} (set CARTAN_ORBITS_MAX_ENUM)")
    p, q = desc.p, desc.q
    for a1 in range(1, q):
        for rest in itertools.product(range(q), repeat=p - 2):
            c = np.zeros(p, dtype=np.int64)
            c[1] = a1
            c[2:] = rest
            yield AutoMap([TruncPoly(desc, 1, c)])


def sample_aut(n: int, desc: FieldDesc, count: int, rng: np.random.Generator, degree_bound: int | None = None) -> Iterator[AutoMap]:
    """Random automorphisms with images of total degree <= degree_bound."""
    R = ring(desc.p, n)
    mask = (R.degrees >= 1) & (R.degrees <= (degree_bound or n * (desc.p - 1)))
    made = 0
    while made < count:
        c = np.where(mask[None, :], rng.integers(0, desc.q, size=(n, R.N)), 0)
        try:
            phi = AutoMap([TruncPoly(desc, n, row) for row in c])
        except NotAnAutomorphism:
            continue
        made += 1
        yield phi


def brute_same_orbit(D1: Derivation, D2: Derivation, kind: AlgebraKind, auts: Iterable[AutoMap]):
    """First phi in the stream with sigma_phi(D1) == D2, or (False, None)."""
    for phi in auts:
        if kind.tag != "W" and not kind_automorphism(kind, phi):
            continue
        if intertwines(phi, D1, D2):
            return True, phi
    return False, None


def w1_elements(desc: FieldDesc) -> list[TorusElem]:
    """lam x d for all lam, and lam (1+x) d for lam != 0."""
    kind = AlgebraKind("W", 1)
    t0 = standard_torus(kind, 0, desc)
    t1 = standard_torus(kind, 1, desc)
    out = [t0.elem([c]) for c in desc.elements()]
    out += [t1.elem([c]) for c in desc.elements() if c]
    return out


def oracle_report(desc: FieldDesc, kind: AlgebraKind | None = None) -> dict:
    """Compare brute-force conjugacy with same_orbit on all pairs of t_0 and t_1 elements of W(1)."""
    kind = kind or AlgebraKind("W", 1)
    if kind.tag != "W" or kind.n != 1:
        raise TooLarge("the oracle report covers W(1) only")
    elems = w1_elements(desc)
    reals = [e.realize() for e in elems]
    where = {D: i for i, D in enumerate(reals)}
    k = len(elems)
    # first witness (enumeration order) for every reachable pair, from the orbit
    # of each element under the whole group
    first: dict[tuple[int, int], AutoMap] = {}
    auts = list(enumerate_aut(1, desc))
    for phi in auts:
        for i, D in enumerate(reals):
            j = where.get(apply_sigma(phi, D))
            if j is not None and (i, j) not in first:
                first[(i, j)] = phi
    pairs = []
    disagreements = 0
    for i in range(k):
        for j in range(k):
            brute = (i, j) in first
            if brute and not intertwines(first[(i, j)], reals[i], reals[j]):
                raise AssertionError("brute witness failed re-verification")
            fast, wit = same_orbit(elems[i], elems[j])
            agree = brute == fast
            disagreements += not agree
            entry = {
                "d1": elems[i].to_json(),
                "d2": elems[j].to_json(),
                "brute": "conjugate" if brute else "no witness over this field",
                "same_orbit": fast,
                "agree": agree,
            }
            if brute:
                entry["witness"] = first[(i, j)].to_json()
            pairs.append(entry)
    brute_classes = _classes(k, lambda i, j: (i, j) in first)
    label_classes = _classes(k, lambda i, j: label_of(elems[i]) == label_of(elems[j]))
    return {
        "field": desc.to_json(),
        "kind": kind.to_json(),
        "automorphisms": len(auts),
        "pairs": pairs,
        "disagreements": disagreements,
        "brute_classes": brute_classes,
        "label_classes": label_classes,
        "partitions_match": brute_classes == label_classes,
    }


def _classes(k: int, rel) -> list[list[int]]:
    seen = [False] * k
    out = []
    for i in range(k):
        if seen[i]:
            continue
        cls = [j for j in range(k) if rel(i, j)]
        for j in cls:
            seen[j] = True
        out.append(cls)
    return out
