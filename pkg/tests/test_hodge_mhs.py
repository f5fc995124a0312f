#!/usr/bin/env python3
"""
Tests for filtrations, Hodge and mixed Hodge structures, twists and
mixed Hodge structures on graded Artin algebras.
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

from app.services.deformation import preferred_gm_product
from app.services.dgla_core import Splitting, bracket_on_cohomology, cohomology
from app.services.exact_linalg import Matrix, Subspace, unit_vector
from app.services.graded_artin import RingMorphism, quotient_by_ideal, quotient_cone, sym_truncated
from app.services.hodge_mhs import (
    Filtration,
    PolarizationForm,
    TripleFiltered,
    check_mhs,
    check_pure_hs,
    dual_mhs,
    lemma_4f_check,
    mhalg_assemble,
    mhs_on_orho,
    same_graded,
    split_mhs_on_cone,
    sym_power_mhs,
    tensor_mhs,
    twist,
)
from app.utils.errors import TwistPreconditionError, TypeCompatibilityError

PURE_TYPES = [(1, 0), (0, 1)]


@pytest.fixture
def mixed():
    """e0 of type (0,0) in weight 0, e1 of type (-1,-1) in weight -2."""
    return TripleFiltered.from_types([(0, 0), (-1, -1)], [0, -2])


def test_filtration_lookup_outside_steps():
    f = Filtration(2, {0: Subspace.full(2), 2: Subspace.span(2, [unit_vector(2, 0)])})
    assert f.at(1).equals(Subspace.span(2, [unit_vector(2, 0)]))
    assert f.at(3).dim == 0
    assert f.at(-5).dim == 2
    assert not f.problems()


def test_filtration_not_nested():
    f = Filtration(2, {0: Subspace.span(2, [unit_vector(2, 0)]), 1: Subspace.span(2, [unit_vector(2, 1)])})
    assert "steps 0 and 1 are not nested" in f.problems()


def test_pure_hodge_structure_and_polarization():
    v = TripleFiltered.pure(PURE_TYPES, 1)
    report = check_pure_hs(v, 1)
    assert report.passed
    assert report.details["hodge_numbers"] == {"0,1": 1, "1,0": 1}
    polarized = check_pure_hs(v, 1, PolarizationForm(Matrix.from_rows([[1, 0], [0, -1]])))
    assert polarized.passed
    assert polarized.details["polarized"]
    wrong = check_pure_hs(v, 1, PolarizationForm(Matrix.identity(2)))
    assert not wrong.passed


def test_coinciding_filtrations_are_not_a_hodge_structure():
    line = Filtration.from_labels([1])
    v = TripleFiltered(1, Filtration.trivial(1, 1, decreasing=False), line, line)
    assert not check_pure_hs(v, 1).passed


def test_mixed_structure_graded_pieces(mixed):
    report = check_mhs(mixed)
    assert report.passed
    assert report.details["graded_dims"] == {"-2": 1, "0": 1}


def test_twist_moves_g_but_keeps_gr(mixed):
    twisted = twist(mixed, Matrix.from_rows([[1, 0], [1, 1]]))
    assert check_mhs(twisted).passed
    assert not twisted.G.equals(mixed.G)
    assert twisted.F.equals(mixed.F)


def test_twist_precondition(mixed):
    with pytest.raises(TwistPreconditionError) as info:
        twist(mixed, Matrix.from_rows([[1, 1], [0, 1]]))
    assert info.value.weight == -2


def test_four_filtrations(mixed):
    report = lemma_4f_check(mixed, Filtration.from_labels([0, 1]))
    assert report.passed
    assert report.details["hypothesis"]
    assert report.details["conclusion"]


def test_dual_and_symmetric_square():
    v = TripleFiltered.pure(PURE_TYPES, 1)
    assert check_mhs(dual_mhs(v)).passed
    square = sym_power_mhs(v, 2)
    assert square.dim == 3
    assert check_mhs(square).passed


def test_mhalg_on_free_algebra():
    a = sym_truncated(2, 2)
    gr1 = TripleFiltered.pure([(-1, 0), (0, -1)], -1)
    assembled, report = mhalg_assemble(a, gr1, Subspace.zero(3))
    assert report.passed
    assert assembled is not None
    assert assembled.dim == a.total_dim


def test_mhalg_rejects_non_hodge_kernel():
    a = quotient_cone(2, Subspace.span(3, [(1, 1, 0)]), 2)
    gr1 = TripleFiltered.pure([(-1, 0), (0, -1)], -1)
    k_sub = Subspace.span(3, [(1, 1, 0)])
    assembled, report = mhalg_assemble(a, gr1, k_sub)
    assert assembled is None
    assert any(v.identity.startswith("(3) K") for v in report.violations)


def test_split_mhs_on_heisenberg_cone(heisenberg):
    obs = bracket_on_cohomology(heisenberg, cohomology(heisenberg))
    cone = split_mhs_on_cone(PURE_TYPES, [(1, 1)], obs, 2)
    assert cone.algebra.dims == (1, 2, 2)
    assert cone.weights == (0, -1, -1, -2, -2)
    with pytest.raises(TypeCompatibilityError):
        split_mhs_on_cone(PURE_TYPES, [(2, 0)], obs, 2)


def test_mhs_on_framed_product(heisenberg, heisenberg_aug):
    product = preferred_gm_product(heisenberg, heisenberg_aug, Splitting.zero(heisenberg), 2)
    result, report = mhs_on_orho(product, [(0, 0)], PURE_TYPES, [(1, 1)])
    assert report.passed
    assert len(result.weights) == 9
    assert min(result.weights) == -2
    with pytest.raises(TypeCompatibilityError):
        mhs_on_orho(product, [(1, 0)], PURE_TYPES, [(1, 1)])


def test_dual_of_pure_structure_has_opposite_weight():
    v = TripleFiltered.pure(PURE_TYPES, 1)
    report = check_pure_hs(dual_mhs(v), -1)
    assert report.passed
    assert report.details["hodge_numbers"] == {"-1,0": 1, "0,-1": 1}


def test_tensor_square_is_pure_of_weight_two():
    v = TripleFiltered.pure(PURE_TYPES, 1)
    square = tensor_mhs(v, v)
    assert square.dim == 4
    assert check_mhs(square).passed
    assert check_pure_hs(square, 2).details["hodge_numbers"] == {"0,2": 1, "1,1": 2, "2,0": 1}


def test_transport_along_identity_keeps_the_filtrations(heisenberg, heisenberg_aug):
    product = preferred_gm_product(heisenberg, heisenberg_aug, Splitting.zero(heisenberg), 2)
    plain, _ = mhs_on_orho(product, [(0, 0)], PURE_TYPES, [(1, 1)])
    moved, _ = mhs_on_orho(product, [(0, 0)], PURE_TYPES, [(1, 1)],
                           automorphism=RingMorphism.identity(product.algebra))
    assert moved.mhs.F.equals(plain.mhs.F)
    assert moved.mhs.G.equals(plain.mhs.G)
    assert moved.weights == plain.weights


@st.composite
def split_with_unipotent(draw):
    """Split structure over several weights and a u with u - Id lowering W."""
    n = draw(st.integers(2, 4))
    weights = sorted(draw(st.lists(st.integers(-2, 1), min_size=n, max_size=n)), reverse=True)
    types = []
    for w in weights:
        p = draw(st.integers(-2, 2))
        types.append((p, w - p))
    # basis sorted by descending weight, so the admissible entries sit below the diagonal
    entries = [[1 if i == j else (draw(st.integers(-2, 2)) if weights[i] < weights[j] else 0)
                for j in range(n)] for i in range(n)]
    return TripleFiltered.from_types(types, weights), Matrix.from_rows(entries)


@st.composite
def filtered_spaces(draw):
    """Trivially weighted space with split F and a unipotent image of a split G."""
    n = draw(st.integers(1, 3))
    labels = st.lists(st.integers(-1, 2), min_size=n, max_size=n)
    f = Filtration.from_labels(draw(labels))
    g = Filtration.from_labels(draw(labels))
    u = Matrix.from_rows([[1 if i == j else (draw(st.integers(-1, 1)) if i > j else 0)
                           for j in range(n)] for i in range(n)])
    w = draw(st.integers(-1, 3))
    return TripleFiltered(n, Filtration.trivial(n, w, decreasing=False), f, g.image(u)), w


@settings(max_examples=30, deadline=None)
@given(split_with_unipotent())
def test_twist_of_split_structure_is_mixed(case):
    v, u = case
    assert check_mhs(v).passed
    twisted = twist(v, u)
    assert check_mhs(twisted).passed
    assert twisted.F.equals(v.F)
    assert same_graded(v, twisted).passed


@settings(max_examples=40, deadline=None)
@given(filtered_spaces())
def test_pure_hs_iff_dual_is_pure(case):
    v, w = case
    assert check_pure_hs(v, w).passed == check_pure_hs(dual_mhs(v), -w).passed


def test_mhalg_rejects_relation_outside_degree_two():
    # C[t]/(t^3) truncated at 3: ker mu^3 is not generated by ker mu^2 = 0
    a, _, _ = quotient_by_ideal(sym_truncated(1, 3), {3: [(1,)]})
    assert a.dims == (1, 1, 1, 0)
    gr1 = TripleFiltered.pure([(-1, -1)], -2)
    assembled, report = mhalg_assemble(a, gr1, Subspace.zero(1))
    assert assembled is None
    assert any(v.identity == "(1) ker mu^k is generated by K" for v in report.violations)


def test_mhalg_rejects_gr1_that_is_not_mixed():
    line = Filtration.from_labels([0])
    gr1 = TripleFiltered(1, Filtration.trivial(1, -1, decreasing=False), line, line)
    assembled, report = mhalg_assemble(sym_truncated(1, 2), gr1, Subspace.zero(1))
    assert assembled is None
    assert any(v.identity.startswith("(2) Gr^1") for v in report.violations)


def test_mhalg_compares_given_structure():
    a = sym_truncated(2, 2)
    gr1 = TripleFiltered.pure([(-1, 0), (0, -1)], -1)
    assembled, _ = mhalg_assemble(a, gr1, Subspace.zero(3))
    same, report = mhalg_assemble(a, gr1, Subspace.zero(3), given=assembled)
    assert report.passed
    assert same is not None
    swapped = TripleFiltered(assembled.dim, assembled.W, assembled.G, assembled.F)
    rejected, report = mhalg_assemble(a, gr1, Subspace.zero(3), given=swapped)
    assert rejected is None
    flagged = [v for v in report.violations if v.identity == "(4) mu^k strictly preserves the filtrations"]
    assert {v.witness["filtration"] for v in flagged} == {"F", "G"}
    assert {v.witness["degree"] for v in flagged} == {1, 2}
