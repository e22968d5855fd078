import pytest

from cartan_orbits.aut import apply_sigma, aut_invert, is_aut_H
from cartan_orbits.cartan import AlgebraKind, prime_index, sigma_index, poisson
from cartan_orbits.gf import field_make
from cartan_orbits.orbits import (
    DependencyViolated,
    IndexMismatch,
    KindMismatch,
    OrbitLabel,
    ShapeError,
    WeylElem,
    conjugator_for,
    induced_weyl,
    intertwines,
    label_of,
    lower_index,
    normalizer_conjugator,
    orbit_label,
    random_weyl,
    same_orbit,
    weyl_apply,
    weyl_compose,
    weyl_contains,
    weyl_inverse,
)
from cartan_orbits.tori import coords_in_torus, index_of, standard_torus
from cartan_orbits.trunc import TruncPoly, ypow

KINDS = [AlgebraKind("W", 3), AlgebraKind("S1", 4), AlgebraKind("H2", 4)]


def test_lower_index_w_example(F3):
    kind = AlgebraKind("W", 2)
    lam = [F3(1), F3(2)]
    phi = lower_index(kind, 2, lam, [2])
    x2 = TruncPoly.x(F3, 2, 1)
    assert phi.images[1] == x2 + ypow(F3, 2, [2, 0]) - 1
    target = standard_torus(kind, 1, F3).realize(lam)
    assert apply_sigma(phi, standard_torus(kind, 2, F3).realize(lam)) == target


def test_lower_index_degenerate_cases(F3, F5):
    phi = lower_index(AlgebraKind("S1", 3), 1, [F3(0), F3(1)], [])
    assert phi.is_identity()
    phi = lower_index(AlgebraKind("H2", 2), 1, [F5(0)], [])
    assert phi.is_identity()
    with pytest.raises(DependencyViolated):
        lower_index(AlgebraKind("W", 2), 2, [F3(1), F3(1)], [2])


def test_lower_index_h_poisson(F9):
    kind = AlgebraKind("H2", 4)
    t = F9.theta
    phi = lower_index(kind, 2, [t, t * 2], [2])
    f = phi.images
    for i in range(4):
        for j in range(4):
            want = sigma_index(i, 2) if j == prime_index(i, 2) else 0
            assert poisson(f[i], f[j], 2) == TruncPoly.const(F9, 4, want)


def test_weyl_apply_examples(F5):
    kind = AlgebraKind("W", 2)
    a, b = F5(2), F5(3)
    assert weyl_apply(WeylElem.identity(kind, 1, 5), (a, b)) == (a, b)
    assert weyl_apply(WeylElem.make(kind, 0, 5, perm=[1, 0]), (a, b)) == (b, a)
    hk = AlgebraKind("H2", 4)
    assert weyl_apply(WeylElem.make(hk, 0, 5, signs=[-1, 1]), (a, b)) == (-a, b)


def test_weyl_contains(F3):
    kind = AlgebraKind("W", 2)
    with pytest.raises(ShapeError):
        WeylElem.make(kind, 1, 3, A=[[0]])
    with pytest.raises(ShapeError):
        WeylElem.make(kind, 0, 3, signs=[-1, 1])
    w = WeylElem.make(kind, 1, 3, A=[[2]], B=[[1]])
    assert weyl_contains(kind, 1, w) and not weyl_contains(kind, 0, w)


def test_weyl_group_laws(F9, rng):
    for kind in KINDS:
        for r in range(kind.mu + 1):
            w1, w2 = random_weyl(kind, r, 3, rng), random_weyl(kind, r, 3, rng)
            lam = tuple(F9.random(rng) for _ in range(kind.mu))
            assert weyl_apply(weyl_compose(w1, w2), lam) == weyl_apply(w1, weyl_apply(w2, lam))
            assert weyl_apply(weyl_inverse(w1), weyl_apply(w1, lam)) == lam


def test_conjugator_examples(F3):
    kind = AlgebraKind("W", 2)
    assert normalizer_conjugator(kind, 1, [[1]], [[0]], [0], [1], F3).is_identity()
    psi = normalizer_conjugator(kind, 1, [[2]], [[0]], [0], [1], F3)
    assert psi.images[0] == ypow(F3, 2, [2, 0]) - 1
    assert psi.images[1] == TruncPoly.x(F3, 2, 1)
    assert induced_weyl(psi, kind, 1).A == ((2,),)
    hk = AlgebraKind("H2", 4)
    psi = normalizer_conjugator(hk, 1, [[1]], [[0]], [0], [-1], F3)
    assert is_aut_H(psi)[0]
    w = induced_weyl(psi, hk, 1)
    assert w.signs == (-1,)


@pytest.mark.parametrize("kind", KINDS + [AlgebraKind("H2", 6)])
def test_conjugators_induce_requested_element(kind, F9, rng):
    for _ in range(6):
        r = int(rng.integers(0, kind.mu + 1))
        w = random_weyl(kind, r, 3, rng)
        psi = conjugator_for(w, F9)
        assert induced_weyl(psi, kind, r) == w


def test_label_examples(F5, F9):
    e = standard_torus(AlgebraKind("W", 1), 1, F5).elem([2])
    assert orbit_label(e) == OrbitLabel(AlgebraKind("W", 1), 1, ((1,),), ())
    t = F9.theta
    e = standard_torus(AlgebraKind("W", 2), 1, F9).elem([t, t + 1])
    lab = orbit_label(e)
    assert lab.vbasis == (t.coords,) and lab.tail == (F9.one.coords,)
    e = standard_torus(AlgebraKind("H2", 2), 0, field_make(3)).elem([2])
    assert orbit_label(e).tail == ((1,),)
    with pytest.raises(IndexMismatch):
        orbit_label(standard_torus(AlgebraKind("W", 2), 2, F9).elem([1, 2]))


def test_label_json(F9):
    e = standard_torus(AlgebraKind("H2", 4), 1, F9).elem([F9.theta, 2])
    lab = orbit_label(e)
    assert OrbitLabel.from_json(lab.to_json()) == lab


@pytest.mark.parametrize("kind", KINDS)
def test_label_invariance(kind, F25, rng):
    for _ in range(10):
        r = int(rng.integers(0, kind.mu + 1))
        e = standard_torus(kind, r, F25).elem([F25.random(rng) for _ in range(kind.mu)])
        _, _, f = index_of(e)
        w = random_weyl(kind, f.r, 5, rng)
        g = standard_torus(kind, f.r, F25).elem(weyl_apply(w, f.lam))
        assert orbit_label(g) == orbit_label(f)


def test_same_orbit_examples(F5):
    kind = AlgebraKind("W", 1)
    t1 = standard_torus(kind, 1, F5)
    t0 = standard_torus(kind, 0, F5)
    e = t1.elem([2])
    ok, wit = same_orbit(e, e)
    assert ok and wit.is_identity()
    ok, wit = same_orbit(t1.elem([2]), t1.elem([3]))
    assert ok and apply_sigma(wit, t1.realize([2])) == t1.realize([3])
    ok, wit = same_orbit(t1.elem([1]), t0.elem([1]))
    assert not ok and wit is None
    with pytest.raises(KindMismatch):
        same_orbit(e, standard_torus(AlgebraKind("W", 2), 0, F5).elem([1, 1]))


@pytest.mark.parametrize("kind", KINDS)
def test_same_orbit_witnesses(kind, F9, rng):
    for _ in range(6):
        r = int(rng.integers(0, kind.mu + 1))
        e = standard_torus(kind, r, F9).elem([F9.random(rng) for _ in range(kind.mu)])
        _, _, f = index_of(e)
        w = random_weyl(kind, f.r, 3, rng)
        g = standard_torus(kind, f.r, F9).elem(weyl_apply(w, f.lam))
        ok, wit = same_orbit(e, g)
        assert ok
        assert apply_sigma(wit, e.realize()) == g.realize()
        back, wit2 = same_orbit(g, e)
        assert back and intertwines(aut_invert(wit), g.realize(), e.realize())


def test_index_invariant_under_conjugators(F9, rng):
    kind = AlgebraKind("H2", 4)
    for _ in range(5):
        w = random_weyl(kind, 1, 3, rng)
        psi = conjugator_for(w, F9)
        lam = [F9.random(rng) for _ in range(2)]
        e = standard_torus(kind, 1, F9).elem(lam)
        image = apply_sigma(psi, e.realize())
        coords = coords_in_torus(image, standard_torus(kind, 1, F9))
        f = standard_torus(kind, 1, F9).elem(coords)
        assert index_of(f)[0] == index_of(e)[0]
        assert label_of(f) == label_of(e)
