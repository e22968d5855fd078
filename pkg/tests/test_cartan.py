import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan_orbits.cartan import (
    AlgebraKind,
    Derivation,
    InvalidKind,
    OddVariableCount,
    algebra_basis,
    bracket,
    d_h,
    divergence,
    graded_split,
    member,
    member_by_span,
    p_power,
    poisson,
    prime_index,
    sigma_index,
)
from cartan_orbits.gf import field_make
from cartan_orbits.trunc import IndexOutOfRange, TruncPoly


def rand_der(desc, n, rng):
    return Derivation(desc, n, rng.integers(0, desc.q, size=(n, desc.p**n)))


def X(desc, n, i):
    return TruncPoly.x(desc, n, i)


def term(f, j):
    return Derivation.term(f, j)


def test_bracket_examples(F5):
    x1, x2 = X(F5, 2, 0), X(F5, 2, 1)
    one = TruncPoly.one(F5, 2)
    assert bracket(term(x1, 0), term(x1, 0)).is_zero()
    assert bracket(term(one, 0), term(x1, 0)) == term(one, 0)
    assert bracket(term(x1, 1), term(x2, 0)) == term(x1, 0) - term(x2, 1)


def test_p_power_examples(F5):
    x = X(F5, 1, 0)
    assert p_power(term(x, 0), check=True) == term(x, 0)
    assert p_power(term(1 + x, 0), check=True) == term(1 + x, 0)
    assert p_power(Derivation.partial(F5, 1, 0), check=True).is_zero()


def test_p_power_matches_matrix_power(F9, rng):
    for _ in range(5):
        p_power(rand_der(F9, 2, rng), check=True)


def test_divergence_examples(F5):
    x1 = X(F5, 3, 0)
    assert divergence(term(x1, 0)) == TruncPoly.one(F5, 3)
    assert divergence(term(x1, 1)).is_zero()
    euler = sum((term(X(F5, 3, i), i) for i in range(1, 3)), term(x1, 0))
    assert divergence(euler) == TruncPoly.const(F5, 3, 3)


def test_sigma_and_prime_index():
    assert sigma_index(0, 2) == 1 and prime_index(0, 2) == 2
    assert sigma_index(2, 2) == -1 and prime_index(2, 2) == 0
    assert all(prime_index(prime_index(i, 3), 3) == i for i in range(6))
    with pytest.raises(IndexOutOfRange):
        sigma_index(4, 2)


def test_d_h_examples(F5):
    x1, x2 = X(F5, 2, 0), X(F5, 2, 1)
    assert d_h(x1 * x2) == term(x2, 1) - term(x1, 0)
    assert d_h(TruncPoly.one(F5, 2)).is_zero()
    assert d_h(x1) == Derivation.partial(F5, 2, 1)
    with pytest.raises(OddVariableCount):
        d_h(X(F5, 3, 0))


def test_poisson_examples(F5):
    x1, x2 = X(F5, 2, 0), X(F5, 2, 1)
    assert poisson(x1, x2) == TruncPoly.one(F5, 2)
    assert poisson(x1, x1).is_zero()
    assert poisson(x2, x1) == -TruncPoly.one(F5, 2)


def test_poisson_jacobi(F3, rng):
    def rp():
        return TruncPoly(F3, 2, rng.integers(0, 3, size=9))

    for _ in range(20):
        f, g, h = rp(), rp(), rp()
        assert poisson(f, g) == -poisson(g, f)
        lhs = poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g))
        assert lhs.is_zero()


def test_kind_validation():
    with pytest.raises(InvalidKind):
        AlgebraKind("S1", 2)
    with pytest.raises(InvalidKind):
        AlgebraKind("H2", 3)
    with pytest.raises(InvalidKind):
        AlgebraKind("K", 3)
    assert AlgebraKind("H2", 4).mu == 2 and AlgebraKind("S1", 4).mu == 3
    with pytest.raises(InvalidKind):
        AlgebraKind("W", 1).check_field(field_make(3))


def test_membership_examples(F3, F5):
    W2 = AlgebraKind("W", 2)
    assert member(W2, term(X(F3, 2, 0), 1))
    S3 = AlgebraKind("S1", 3)
    D = term(X(F3, 3, 0), 0) - term(X(F3, 3, 2), 2)
    assert member(S3, D) and member_by_span(S3, D)
    H2 = AlgebraKind("H2", 2)
    x1, x2 = X(F5, 2, 0), X(F5, 2, 1)
    assert member(H2, d_h(x1 * x2))
    # d_1 = -D_H(x_2) lies in H(2)^(2)
    assert member(H2, Derivation.partial(F5, 2, 0)) == member_by_span(H2, Derivation.partial(F5, 2, 0))
    # D_H(x^tau) is in H(2) but not in H(2)^(2)
    top = x1**4 * x2**4
    assert not member(H2, d_h(top)) and not member_by_span(H2, d_h(top))
    assert not member(H2, term(x1, 0))


def test_closed_form_membership_agrees_with_spans(F3, rng):
    for kind in (AlgebraKind("S1", 3), AlgebraKind("H2", 4)):
        basis = algebra_basis(kind, 3)
        for _ in range(15):
            coeffs = rng.integers(0, 3, size=len(basis))
            D = Derivation.zero(F3, kind.n)
            for c, b in zip(coeffs, basis):
                D = D + b.scale(int(c))
            assert member(kind, D)
            E = D + rand_der(F3, kind.n, rng)
            assert member(kind, E) == member_by_span(kind, E)


@pytest.mark.parametrize(
    "kind,p,dim",
    [
        (AlgebraKind("W", 1), 5, 5),
        (AlgebraKind("W", 2), 3, 18),
        (AlgebraKind("S1", 3), 3, 52),
        (AlgebraKind("H2", 2), 5, 23),
        (AlgebraKind("H2", 2), 3, 7),
    ],
)
def test_basis_dimensions(kind, p, dim):
    assert len(algebra_basis(kind, p)) == dim


def test_jacobi_on_w1_basis(F3):
    basis = algebra_basis(AlgebraKind("W", 1), 3)
    for a, b, c in itertools.product(basis, repeat=3):
        j = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
        assert j.is_zero()


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_lie_identities(seed):
    F = field_make(3, 2)
    rng = np.random.default_rng(seed)
    D, E, G = (rand_der(F, 2, rng) for _ in range(3))
    assert bracket(D, E) == -bracket(E, D)
    j = bracket(D, bracket(E, G)) + bracket(E, bracket(G, D)) + bracket(G, bracket(D, E))
    assert j.is_zero()
    assert divergence(bracket(D, E)) == D(divergence(E)) - E(divergence(D))
    c = F.random(rng)
    assert p_power(D.scale(c)) == p_power(D).scale(c**3)
    ad = E
    for _ in range(3):
        ad = bracket(D, ad)
    assert bracket(p_power(D), E) == ad


def test_graded_split_examples(F3):
    x1, x2 = X(F3, 2, 0), X(F3, 2, 1)
    assert graded_split(Derivation.partial(F3, 2, 0)).degrees() == [-1]
    assert graded_split(term(x1, 0)).degrees() == [0]
    D = term(x1 * x2, 0) + Derivation.partial(F3, 2, 1)
    g = graded_split(D)
    assert g.degrees() == [-1, 1]
    assert g.total(F3, 2) == D


def test_grading_is_compatible_with_bracket(F3):
    basis = algebra_basis(AlgebraKind("W", 2), 3)
    for a, b in itertools.product(basis, repeat=2):
        da, db = graded_split(a).degrees()[0], graded_split(b).degrees()[0]
        c = bracket(a, b)
        if not c.is_zero():
            assert graded_split(c).degrees() == [da + db]


def test_hamiltonian_brackets_are_members(F3, rng):
    kind = AlgebraKind("H2", 2)
    for _ in range(20):
        f = TruncPoly(F3, 2, rng.integers(0, 3, size=9))
        g = TruncPoly(F3, 2, rng.integers(0, 3, size=9))
        assert member(kind, bracket(d_h(f), d_h(g)))


def test_json_roundtrip(F9, rng):
    D = rand_der(F9, 2, rng)
    assert Derivation.from_json(F9, D.to_json()) == D
    assert AlgebraKind.from_json(AlgebraKind("H2", 4).to_json()) == AlgebraKind("H2", 4)
