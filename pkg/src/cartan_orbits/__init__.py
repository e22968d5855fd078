"""Exact computations with the restricted Cartan-type Lie algebras W(n),
S(n)^(1) and H(2m)^(2) over finite fields, and classification of their
semisimple elements up to automorphism."""

__version__ = "0.1.0"

from .gf import FieldDesc, FieldElem, field_make, fp_independent, fp_rref
from .trunc import TruncPoly, poly_invert_unit, poly_is_unit, poly_mul, poly_partial, poly_substitute
from .cartan import (
    AlgebraKind,
    Derivation,
    GradedDecomposition,
    algebra_basis,
    bracket,
    d_h,
    divergence,
    graded_split,
    member,
    p_power,
    poisson,
    prime_index,
    sigma_index,
)
from .aut import AutoMap, apply_sigma, aut_compose, aut_invert, aut_make, is_aut_H, is_aut_S, jacobian_det
from .tori import (
    TorusDesc,
    TorusElem,
    coords_in_torus,
    index_of,
    is_semisimple,
    standard_torus,
    weight_decomposition,
)
from .orbits import (
    OrbitLabel,
    WeylElem,
    lower_index,
    normalizer_conjugator,
    orbit_label,
    same_orbit,
    weyl_apply,
    weyl_contains,
)
from .normw import NormalizerParamsW, centralizer_element_W, is_in_normalizer_W, normalizer_element_W
from .oracle import brute_same_orbit, enumerate_aut

__all__ = [
    "FieldDesc",
    "FieldElem",
    "field_make",
    "fp_independent",
    "fp_rref",
    "TruncPoly",
    "poly_invert_unit",
    "poly_is_unit",
    "poly_mul",
    "poly_partial",
    "poly_substitute",
    "AlgebraKind",
    "Derivation",
    "GradedDecomposition",
    "algebra_basis",
    "bracket",
    "d_h",
    "divergence",
    "graded_split",
    "member",
    "p_power",
    "poisson",
    "prime_index",
    "sigma_index",
    "AutoMap",
    "apply_sigma",
    "aut_compose",
    "aut_invert",
    "aut_make",
    "is_aut_H",
    "is_aut_S",
    "jacobian_det",
    "TorusDesc",
    "TorusElem",
    "coords_in_torus",
    "index_of",
    "is_semisimple",
    "standard_torus",
    "weight_decomposition",
    "OrbitLabel",
    "WeylElem",
    "lower_index",
    "normalizer_conjugator",
    "orbit_label",
    "same_orbit",
    "weyl_apply",
    "weyl_contains",
    "NormalizerParamsW",
    "centralizer_element_W",
    "is_in_normalizer_W",
    "normalizer_element_W",
    "brute_same_orbit",
    "enumerate_aut",
]
