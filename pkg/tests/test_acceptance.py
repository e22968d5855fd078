"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (also repeated in the pytest
terminal summary) and enforces its runtime bound.
"""

import itertools
import time

import numpy as np

from cartan_orbits import cartan
from cartan_orbits.aut import AutoMap, NotAnAutomorphism, apply_sigma, aut_compose, aut_invert
from cartan_orbits.cartan import AlgebraKind, algebra_basis, bracket, member, p_power, poisson, prime_index, sigma_index
from cartan_orbits.gf import FieldElem, field_make, fp_independent
from cartan_orbits.normw import (
    NormalizerParamsW,
    centralizer_element_W,
    fixes_torus,
    induced_weyl_W,
    is_in_normalizer_W,
    matches_form_star,
    normalizer_element_W,
    random_params,
)
from cartan_orbits.oracle import brute_same_orbit, enumerate_aut, oracle_report, sample_aut, w1_elements
from cartan_orbits.orbits import (
    index_trace,
    induced_weyl,
    intertwines,
    kind_automorphism,
    lower_index,
    normalizer_conjugator,
    orbit_label,
    random_weyl,
    same_orbit,
    weyl_apply,
)
from cartan_orbits.tori import _basis_vector, coords_in_torus, index_of, standard_torus
from cartan_orbits.trunc import TruncPoly, ring, ypow

from conftest import record_acceptance

MAIN_KINDS = [AlgebraKind("W", 3), AlgebraKind("S1", 4), AlgebraKind("H2", 4)]


def finish(number, ok, detail, elapsed, bound):
    ok = ok and elapsed < bound
    record_acceptance(number, ok, f"{detail} ({elapsed:.1f}s, bound {bound}s)")
    return ok


def random_lam(desc, mu, rng):
    """Coordinates with a good share of F_p-dependent prefixes."""
    p = desc.p
    base = [desc.random(rng) for _ in range(2)]
    out = []
    for _ in range(mu):
        mode = rng.integers(4)
        if mode == 0:
            out.append(desc.random(rng))
        elif mode == 1:
            out.append(desc(int(rng.integers(p))))
        else:
            out.append(base[0] * int(rng.integers(p)) + base[1] * int(rng.integers(p)))
    return out


def test_criterion_1_tori():
    t0 = time.perf_counter()
    kinds = [AlgebraKind("W", n) for n in range(1, 5)]
    kinds += [AlgebraKind("S1", 3), AlgebraKind("S1", 4), AlgebraKind("H2", 2), AlgebraKind("H2", 4)]
    expected_mu = {"W": lambda n: n, "S1": lambda n: n - 1, "H2": lambda n: n // 2}
    failures = []
    checked = 0
    for p in (3, 5):
        desc = field_make(p)
        for kind in kinds:
            if kind.mu != expected_mu[kind.tag](kind.n):
                failures.append(f"mu {kind}")
            for r in range(kind.mu + 1):
                # built directly, bypassing the validated cache
                basis = [_basis_vector(kind, r, i, desc) for i in range(kind.mu)]
                for i, d in enumerate(basis):
                    checked += 1
                    if p_power(d) != d or not member(kind, d):
                        failures.append(f"{kind} p={p} r={r} d{i}")
                    for e in basis[i + 1:]:
                        if not bracket(d, e).is_zero():
                            failures.append(f"{kind} p={p} r={r} bracket")
    elapsed = time.perf_counter() - t0
    ok = finish(1, not failures, f"{checked} torus basis vectors checked, {len(failures)} failures", elapsed, 10)
    assert ok, failures[:5]


def test_criterion_2_index_law():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    fields = [field_make(3, 2), field_make(5, 2)]
    failures = []
    total = 0
    steps_checked = 0
    for kind in MAIN_KINDS:
        for trial in range(500):
            desc = fields[trial % 2]
            r = int(rng.integers(0, kind.mu + 1))
            e = standard_torus(kind, r, desc).elem(random_lam(desc, kind.mu, rng))
            index_trace.cache_clear()
            r_min, chain, steps = index_trace(e)
            total += 1
            if (r_min == r) != fp_independent(e.head()):
                failures.append(("law", e))
            if not fp_independent(steps[-1].head()) or steps[-1].r != r_min:
                failures.append(("final", e))
            for phi, a, b in zip(chain, steps, steps[1:]):
                steps_checked += 1
                if not kind_automorphism(kind, phi) or not intertwines(phi, a.realize(), b.realize()):
                    failures.append(("step", e))
    elapsed = time.perf_counter() - t0
    ok = finish(2, not failures, f"{total} elements, {steps_checked} conjugation steps, {len(failures)} failures", elapsed, 60)
    assert ok, failures[:5]


def test_criterion_3_hamiltonian_poisson():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    desc = field_make(3, 2)
    failures = 0
    for trial in range(100):
        m = 2 + trial % 2
        kind = AlgebraKind("H2", 2 * m)
        r = int(rng.integers(2, m + 1))
        u = [int(v) for v in rng.integers(0, 3, size=r - 1)]
        if not any(u):
            u[0] = 1
        lam = [desc.random(rng) for _ in range(m)]
        lam[r - 1] = sum((lam[i] * u[i] for i in range(r - 1)), desc.zero)
        phi = lower_index(kind, r, lam, u)
        f = phi.images
        one = TruncPoly.one(desc, 2 * m)
        for i, j in itertools.product(range(2 * m), repeat=2):
            want = one.scale(sigma_index(i, m)) if j == prime_index(i, m) else one.scale(0)
            if poisson(f[i], f[j], m) != want:
                failures += 1
    elapsed = time.perf_counter() - t0
    ok = finish(3, failures == 0, f"100 index-lowering maps for H(4), H(6); {failures} Poisson failures", elapsed, 30)
    assert ok


def test_criterion_4_conjugators():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    desc = field_make(3)
    failures = 0
    for kind in MAIN_KINDS:
        for _ in range(200):
            r = int(rng.integers(0, kind.mu + 1))
            w = random_weyl(kind, r, 3, rng)
            psi = normalizer_conjugator(kind, r, w.A_array(), w.B_array(), w.perm, w.signs, desc, verify=False)
            tor = standard_torus(kind, r, desc)
            normalizes = all(coords_in_torus(apply_sigma(psi, d), tor) is not None for d in tor.basis)
            alpha = [desc.random(rng) for _ in range(kind.mu)]
            lands = apply_sigma(psi, tor.realize(weyl_apply(w, alpha))) == tor.realize(alpha)
            if not (normalizes and lands and kind_automorphism(kind, psi) and induced_weyl(psi, kind, r) == w):
                failures += 1
    elapsed = time.perf_counter() - t0
    ok = finish(4, failures == 0, f"600 conjugators over W(3), S(4), H(4); {failures} failures", elapsed, 60)
    assert ok


def test_criterion_5_classification():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    desc = field_make(3, 2)
    failures = []
    positives = 0
    for kind in MAIN_KINDS:
        # label invariance under random Weyl actions
        for _ in range(200):
            r = int(rng.integers(0, kind.mu + 1))
            _, _, f = index_of(standard_torus(kind, r, desc).elem(random_lam(desc, kind.mu, rng)))
            w = random_weyl(kind, f.r, 3, rng)
            g = standard_torus(kind, f.r, desc).elem(weyl_apply(w, f.lam))
            if orbit_label(g) != orbit_label(f):
                failures.append(("label", kind))
        # a 50-element sample made of 10 seeds and 4 relatives each
        sample = []
        for _ in range(10):
            r = int(rng.integers(0, kind.mu + 1))
            e = standard_torus(kind, r, desc).elem(random_lam(desc, kind.mu, rng))
            sample.append(e)
            _, _, f = index_of(e)
            for _ in range(4):
                if rng.random() < 0.75:
                    w = random_weyl(kind, f.r, 3, rng)
                    sample.append(standard_torus(kind, f.r, desc).elem(weyl_apply(w, f.lam)))
                else:
                    s = int(rng.integers(0, kind.mu + 1))
                    sample.append(standard_torus(kind, s, desc).elem(random_lam(desc, kind.mu, rng)))
        k = len(sample)
        rel = np.zeros((k, k), dtype=bool)
        wit = {}
        for i, j in itertools.product(range(k), repeat=2):
            ok, phi = same_orbit(sample[i], sample[j], verify=False)
            rel[i, j] = ok
            if ok:
                positives += 1
                wit[i, j] = phi
                if not (kind_automorphism(kind, phi) and intertwines(phi, sample[i].realize(), sample[j].realize())):
                    failures.append(("witness", kind))
        if not rel.diagonal().all():
            failures.append(("reflexive", kind))
        if not (rel == rel.T).all():
            failures.append(("symmetric", kind))
        closure = (rel.astype(int) @ rel.astype(int)) > 0
        if (closure & ~rel).any():
            failures.append(("transitive", kind))
        # symmetry by inversion and transitivity by composition, on a subset
        pairs = [(i, j) for (i, j) in wit if i != j][:40]
        for i, j in pairs:
            if not intertwines(aut_invert(wit[i, j]), sample[j].realize(), sample[i].realize()):
                failures.append(("inverse", kind))
            for l in range(k):
                if (j, l) in wit and l != i:
                    comp = aut_compose(wit[j, l], wit[i, j])
                    if not intertwines(comp, sample[i].realize(), sample[l].realize()):
                        failures.append(("compose", kind))
                    break
    elapsed = time.perf_counter() - t0
    ok = finish(5, not failures, f"600 label checks, 7500 same_orbit calls ({positives} positive), {len(failures)} failures", elapsed, 60)
    assert ok, failures[:5]


def test_criterion_6_oracle():
    t0 = time.perf_counter()
    desc = field_make(5)
    report = oracle_report(desc)
    # independent pass with the plain brute-force search
    auts = list(enumerate_aut(1, desc))
    elems = w1_elements(desc)
    kind = AlgebraKind("W", 1)
    brute_mismatch = 0
    for a, b in itertools.product(elems, repeat=2):
        brute, _ = brute_same_orbit(a.realize(), b.realize(), kind, auts)
        fast, _ = same_orbit(a, b)
        brute_mismatch += brute != fast
    elapsed = time.perf_counter() - t0
    ok = (
        report["automorphisms"] == 500
        and report["disagreements"] == 0
        and report["partitions_match"]
        and brute_mismatch == 0
    )
    detail = (
        f"{report['automorphisms']} automorphisms, {len(report['pairs'])} pairs, "
        f"{report['disagreements']} + {brute_mismatch} disagreements, {len(report['brute_classes'])} classes"
    )
    ok = finish(6, ok, detail, elapsed, 30)
    assert ok


def _perturbed(phi, rng):
    """A normalizer-shaped element with one extra random term; may or may not normalize."""
    desc, n = phi.desc, phi.n
    R = ring(desc.p, n)
    while True:
        i = int(rng.integers(n))
        idx = int(rng.integers(1, R.N))
        c = np.array(phi.images[i].c)
        c[idx] = int(rng.integers(desc.q))
        images = list(phi.images)
        images[i] = TruncPoly(desc, n, c)
        try:
            return AutoMap(images)
        except NotAnAutomorphism:
            continue


def test_criterion_7_normalizers():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    desc = field_make(3)
    n = 2
    exceptions = 0
    in_normalizer = 0
    generic = iter(sample_aut(n, desc, 10**4, rng, degree_bound=3))
    for trial in range(10**4):
        r = trial % (n + 1)
        mode = trial % 3
        if mode == 0:
            phi = next(generic)
        else:
            phi = normalizer_element_W(random_params(n, r, desc, rng), desc, verify=False)
            if mode == 2:
                phi = _perturbed(phi, rng)
        a = is_in_normalizer_W(phi, r)
        b = matches_form_star(phi, r) is not None
        in_normalizer += a
        exceptions += a != b
    # centralizer elements fix the torus pointwise
    cent_fail = 0
    f9 = field_make(3, 2)
    for r in range(n + 1):
        for _ in range(20):
            c = [FieldElem(f9, int(v)) for v in rng.integers(1, 9, size=n - r)]
            if not fixes_torus(centralizer_element_W(n, r, c, f9), r):
                cent_fail += 1
    # r = 0: a permutation of the tail, scalars act trivially on t_0
    shape_fail = 0
    for _ in range(20):
        params = random_params(n, 0, f9, rng)
        w = induced_weyl_W(normalizer_element_W(params, f9), 0)
        plain = NormalizerParamsW.make(n, 0, np.zeros((0, 0)), [f9.one] * n, params.sigma, np.zeros((0, n)), f9)
        w_plain = induced_weyl_W(normalizer_element_W(plain, f9), 0)
        if w != w_plain or set(w.signs) != {1}:
            shape_fail += 1
    # r = n: every image is prod y_i^{m_ij} - 1
    for _ in range(20):
        params = random_params(n, n, f9, rng)
        phi = normalizer_element_W(params, f9)
        M = params.M_array()
        for j in range(n):
            if phi.images[j] != ypow(f9, n, M[:, j]) - 1:
                shape_fail += 1
    elapsed = time.perf_counter() - t0
    ok = exceptions == 0 and cent_fail == 0 and shape_fail == 0
    detail = (
        f"10000 samples ({in_normalizer} in the normalizer), {exceptions} disagreements; "
        f"{cent_fail} centralizer and {shape_fail} shape failures"
    )
    ok = finish(7, ok, detail, elapsed, 120)
    assert ok


def test_criterion_8_dimensions():
    with cartan._basis_lock:
        cartan._basis_cache.clear()
    t0 = time.perf_counter()
    p = 3
    got = {
        "W(3)": (len(algebra_basis(AlgebraKind("W", 3), p)), 3 * p**3),
        "S(3)^(1)": (len(algebra_basis(AlgebraKind("S1", 3), p)), 2 * (p**3 - 1)),
        "H(2)^(2)": (len(algebra_basis(AlgebraKind("H2", 2), p)), p**2 - 2),
        "H(4)^(2)": (len(algebra_basis(AlgebraKind("H2", 4), p)), p**4 - 2),
    }
    elapsed = time.perf_counter() - t0
    ok = all(a == b for a, b in got.values())
    detail = ", ".join(f"{name}={a} (expected {b})" for name, (a, b) in got.items())
    ok = finish(8, ok, detail, elapsed, 30)
    assert ok
