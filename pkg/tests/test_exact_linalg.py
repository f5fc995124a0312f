#!/usr/bin/env python3
"""
Tests for exact scalars, matrices, row reduction and subspace arithmetic.
"""

import os
import sys
from fractions import Fraction

import pytest
from dotenv import load_dotenv
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Load environment variables
load_dotenv()

from app.services.exact_linalg import (
    I,
    ONE,
    ZERO,
    Matrix,
    Scalar,
    Subspace,
    complement_projector,
    hermitian_pairing,
    is_positive_definite_hermitian,
    kernel_basis,
    rank,
    rref,
    solve_columns,
    solve_particular,
    split_complement,
    unit_vector,
)
from app.utils.errors import ContainmentError, ShapeMismatchError


def small_matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    ).map(Matrix.from_rows)


# Scalars

def test_parse_serialized_forms():
    assert Scalar.parse("1/3+0/1*i") == Scalar(Fraction(1, 3))
    assert Scalar.parse("-1/2-3/4*i") == Scalar(Fraction(-1, 2), Fraction(-3, 4))
    assert Scalar.parse("2*i") == Scalar(0, 2)
    assert Scalar.parse("-2*i") == Scalar(0, -2)
    assert Scalar.parse("7") == Scalar(7)


def test_str_is_exact_and_parses_back():
    x = Scalar(Fraction(-5, 6), Fraction(2, 3))
    assert str(x) == "-5/6+2/3*i"
    assert Scalar.parse(str(x)) == x
    assert str(Scalar(3)) == "3/1"


@pytest.mark.parametrize("text", ["1.5", "abc", "1+2", "1/0", "1 2*i"])
def test_parse_rejects_malformed(text):
    with pytest.raises(ValueError):
        Scalar.parse(text)


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        Scalar(0.5)
    with pytest.raises(TypeError):
        Scalar.coerce(1.0)


def test_gaussian_arithmetic():
    assert I * I == Scalar(-1)
    assert (ONE + I) / (ONE - I) == I
    assert (Scalar(3, 4) * Scalar(3, 4).conj()) == Scalar(25)
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


# Matrices

def test_determinant_and_inverse():
    m = Matrix.from_rows([[1, 2], [3, 4]])
    assert m.determinant() == Scalar(-2)
    assert (m @ m.inverse()).is_identity()
    with pytest.raises(ValueError):
        Matrix.from_rows([[1, 2], [2, 4]]).inverse()


def test_complex_inverse():
    m = Matrix.from_rows([[ONE, I], [ZERO, ONE]])
    assert m.inverse() == Matrix.from_rows([[ONE, -I], [ZERO, ONE]])


def test_shape_mismatch_raises():
    with pytest.raises(ShapeMismatchError):
        Matrix.from_rows([[1, 2]]) @ Matrix.from_rows([[1, 2]])
    with pytest.raises(ShapeMismatchError):
        Matrix.from_rows([[1, 2], [3]])


def test_matrix_exp_nilpotent():
    n = Matrix.from_rows([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    expected = Matrix.from_rows([[1, 1, Fraction(1, 2)], [0, 1, 1], [0, 0, 1]])
    assert n.matrix_exp_nilpotent() == expected
    with pytest.raises(ValueError):
        Matrix.from_rows([[1]]).matrix_exp_nilpotent()


def test_kron_index_convention():
    a = Matrix.from_rows([[1, 2], [3, 4]])
    b = Matrix.identity(2)
    k = a.kron(b)
    assert k.shape == (4, 4)
    assert k[0, 2] == Scalar(2)
    assert k[3, 1] == Scalar(3)
    assert k[1, 0] == ZERO


def test_json_keeps_exact_strings():
    m = Matrix.from_rows([[Fraction(1, 3), I]])
    assert m.to_json() == [["1/3", "0/1+1/1*i"]]
    assert Matrix.from_json(m.to_json()) == m


# Row reduction and solving

def test_rref_pivots():
    reduced, pivots = rref(Matrix.from_rows([[2, 4, 2], [1, 2, 3]]))
    assert pivots == [0, 2]
    assert reduced == Matrix.from_rows([[1, 2, 0], [0, 0, 1]])


def test_kernel_basis_free_columns():
    k = kernel_basis(Matrix.from_rows([[1, 2, 3]]))
    assert k.dim == 2
    assert k.vectors()[0] == (Scalar(-2), ONE, ZERO)
    assert k.vectors()[1] == (Scalar(-3), ZERO, ONE)
    for v in k.vectors():
        assert Matrix.from_rows([[1, 2, 3]]).apply(v) == (ZERO,)


def test_solve_particular_uses_pivot_coordinates():
    m = Matrix.from_rows([[1, 1], [0, 0]])
    assert solve_particular(m, (Scalar(2), ZERO)) == (Scalar(2), ZERO)
    assert solve_particular(m, (ZERO, ONE)) is None


def test_solve_columns_matches_single_solves():
    m = Matrix.from_rows([[1, 0, 1], [0, 1, 1]])
    rhs = [(ONE, ZERO), (ZERO, ONE), (Scalar(3), Scalar(-1))]
    assert solve_columns(m, rhs) == [solve_particular(m, b) for b in rhs]


# Subspaces

def test_intersection_and_sum():
    u = Subspace.span(3, [unit_vector(3, 0), unit_vector(3, 1)])
    v = Subspace.span(3, [unit_vector(3, 1), unit_vector(3, 2)])
    meet = u.intersect(v)
    assert meet.dim == 1
    assert meet.contains(unit_vector(3, 1))
    assert u.sum(v).equals(Subspace.full(3))


def test_preimage():
    m = Matrix.from_rows([[1, 1, 0], [0, 0, 1]])
    target = Subspace.span(2, [unit_vector(2, 0)])
    pre = target.preimage(m)
    assert pre.dim == 2
    assert pre.contains((ONE, Scalar(-1), ZERO))
    assert pre.contains(unit_vector(3, 0))


def test_split_complement():
    sub = Subspace.span(3, [(1, 1, 0)])
    comp = split_complement(sub, Subspace.full(3))
    assert comp.dim == 2
    assert sub.sum(comp).equals(Subspace.full(3))
    with pytest.raises(ContainmentError):
        split_complement(Subspace.full(3), sub)


def test_complement_projector_reconstructs():
    sub = Subspace.span(2, [(1, 1)])
    comp = Subspace.span(2, [(1, -1)])
    p_sub, p_comp = complement_projector(sub, comp)
    v = (Scalar(3), Scalar(1))
    assert p_sub.apply(v) == (Scalar(2),)
    assert p_comp.apply(v) == (ONE,)


def test_hermitian_helpers():
    s = Matrix.from_rows([[2, I], [-I, 2]])
    assert s.is_hermitian()
    assert is_positive_definite_hermitian(s)
    assert not is_positive_definite_hermitian(Matrix.from_rows([[1, 2], [2, 1]]))
    assert hermitian_pairing((I,), Matrix.identity(1), (I,)) == ONE


# Properties

@settings(max_examples=40, deadline=None)
@given(small_matrices())
def test_rank_nullity(m):
    k = kernel_basis(m)
    assert rank(m) + k.dim == m.cols
    for v in k.vectors():
        assert not any(m.apply(v))


@settings(max_examples=40, deadline=None)
@given(small_matrices(3, 3).filter(lambda m: m.rows == m.cols))
def test_inverse_when_determinant_nonzero(m):
    if m.determinant():
        assert (m @ m.inverse()).is_identity()
        assert (m.inverse() @ m).is_identity()
    else:
        assert rank(m) < m.rows


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), max_size=3),
       st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), max_size=3))
def test_dimension_formula(us, vs):
    u = Subspace.span(4, us)
    v = Subspace.span(4, vs)
    assert u.sum(v).dim + u.intersect(v).dim == u.dim + v.dim
    assert u.contains_subspace(u.intersect(v))
    assert u.sum(v).contains_subspace(v)
