#!/usr/bin/env python3
"""
Tests for truncated graded Artin algebras, quotients, tensor products and ring maps.
"""

import os
import sys

import pytest
from dotenv import load_dotenv
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Load environment variables
load_dotenv()

from app.services.exact_linalg import ONE, Scalar, Subspace
from app.services.graded_artin import (
    GradedArtinAlgebra,
    RingMorphism,
    check_algebra,
    maximal_ideal_power,
    multiply,
    quotient_by_ideal,
    quotient_cone,
    saturate_ideal,
    sym_truncated,
    tensor,
    tensor_factor_ideal,
    weight_filtration,
)
from app.utils.errors import ShapeMismatchError


def test_sym_truncated_dims_and_monomial_order():
    a = sym_truncated(2, 3)
    assert a.dims == (1, 2, 3, 4)
    assert a.monomials[2] == ((2, 0), (1, 1), (0, 2))
    assert a.basis_labels()[:6] == ["1", "t1", "t2", "t1^2", "t1*t2", "t2^2"]
    assert check_algebra(a).passed


def test_sym_truncated_genus_two_cone_dims():
    assert sym_truncated(4, 3).dims == (1, 4, 10, 20)


def test_generator_types_add():
    a = sym_truncated(2, 2, [(-1, 0), (0, -1)])
    assert a.types[2] == ((-2, 0), (-1, -1), (0, -2))


def test_multiply_and_truncation():
    a = sym_truncated(2, 2)
    assert multiply(a, a.generator(0), a.generator(1)) == a.basis_element(2, 1)
    t1_sq = multiply(a, a.generator(0), a.generator(0))
    assert multiply(a, t1_sq, a.generator(0)) == a.zero()


def test_quotient_by_ideal_kills_product():
    free = sym_truncated(2, 3)
    q, ideal, qmap = quotient_by_ideal(free, {2: [(0, 1, 0)]})
    assert q.dims == (1, 2, 2, 2)
    assert ideal.in_degree(3, free).dim == 2
    assert multiply(q, q.generator(0), q.generator(1)) == q.zero()
    assert q.basis_labels() == ["1", "t1", "t2", "t1^2", "t2^2", "t1^3", "t2^3"]
    assert ideal.check_closed(free).passed
    assert qmap.project(free.basis_element(2, 1)) == q.zero()
    assert qmap.lift(q.basis_element(2, 1)) == free.basis_element(2, 2)
    assert check_algebra(q).passed


def test_saturate_rejects_low_degree_generators():
    with pytest.raises(ValueError):
        saturate_ideal(sym_truncated(2, 2), {1: [(1, 0)]})


def test_quotient_cone_matches_explicit_quotient():
    i2 = Subspace.span(3, [(0, 1, 0)])
    cone = quotient_cone(2, i2, 2)
    assert cone.dims == (1, 2, 2)
    with pytest.raises(ShapeMismatchError):
        quotient_cone(3, i2, 2)


def test_weight_filtration_is_powers_of_maximal_ideal():
    a = sym_truncated(2, 2)
    steps = weight_filtration(a)
    assert [s.dim for s in steps] == [6, 5, 3, 0]
    for k, step in enumerate(steps):
        assert maximal_ideal_power(a, k).equals(step)


def test_tensor_product_labels():
    s = sym_truncated(1, 2)
    t = tensor(s, s, 2)
    assert t.dims == (1, 2, 3)
    assert t.factor_labels[1] == ((0, 0, 0), (1, 0, 0))
    assert check_algebra(t).passed
    assert tensor_factor_ideal(t, second_factor=True).in_degree(1, t).dim == 1
    assert tensor_factor_ideal(t, second_factor=False).in_degree(2, t).dim == 2


def test_from_tables_dual_numbers_squared():
    a = GradedArtinAlgebra.from_tables(2, [1, 1, 1], {(1, 1): [[[(0, 1)]]]})
    assert multiply(a, a.generator(0), a.generator(0)) == a.basis_element(2, 0)
    assert check_algebra(a).passed


def test_not_generated_in_degree_one():
    a = GradedArtinAlgebra.from_tables(2, [1, 1, 1], {(1, 1): [[[]]]})
    report = check_algebra(a)
    assert not report.passed
    assert any(v.identity == "generated in degree one" for v in report.violations)


def test_missing_table_raises():
    with pytest.raises(ShapeMismatchError):
        GradedArtinAlgebra.from_tables(2, [1, 1, 1], {})


# Ring maps

def _shear(a):
    t1_plus = tuple(x + y for x, y in zip(a.generator(0), a.basis_element(2, 1)))
    return RingMorphism(a, a, (t1_plus, a.generator(1)))


def test_ring_morphism_identity_on_gr1():
    a = sym_truncated(2, 2)
    phi = _shear(a)
    assert phi.is_identity_on_gr1()
    assert not phi.is_identity()
    assert phi.check_multiplicative().passed
    assert phi.apply(a.basis_element(2, 0)) == a.basis_element(2, 0)
    assert RingMorphism.identity(a).is_identity()


def test_ring_morphism_compose():
    a = sym_truncated(2, 2)
    phi = _shear(a)
    twice = phi.compose(phi)
    expected = tuple(x + Scalar(2) * y for x, y in zip(a.generator(0), a.basis_element(2, 1)))
    assert twice.generator_images[0] == expected
    assert twice.generator_images[1] == a.generator(1)


def test_ring_morphism_rejects_constant_term():
    a = sym_truncated(1, 1)
    with pytest.raises(ValueError):
        RingMorphism(a, a, ((ONE, ONE),))


def test_ring_morphism_json_uses_monomial_labels():
    a = sym_truncated(2, 2)
    data = _shear(a).to_json()
    assert data["t1"] == {"t1": "1/1", "t1*t2": "1/1"}


# Properties

def elements(a):
    return st.lists(st.integers(-2, 2), min_size=a.total_dim, max_size=a.total_dim).map(
        lambda cs: tuple(Scalar(c) for c in cs))


CUBIC = sym_truncated(2, 3)


@settings(max_examples=30, deadline=None)
@given(elements(CUBIC), elements(CUBIC), elements(CUBIC))
def test_multiplication_is_commutative_and_associative(x, y, z):
    assert multiply(CUBIC, x, y) == multiply(CUBIC, y, x)
    assert multiply(CUBIC, multiply(CUBIC, x, y), z) == multiply(CUBIC, x, multiply(CUBIC, y, z))


@settings(max_examples=30, deadline=None)
@given(elements(CUBIC))
def test_unit_is_neutral(x):
    assert multiply(CUBIC, CUBIC.unit(), x) == tuple(x)
