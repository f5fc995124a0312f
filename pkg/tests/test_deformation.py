#!/usr/bin/env python3
"""
Tests for MC elements, gauge action, the Kuranishi hull, the framed product
and the order-two brute force.
"""

import importlib
import os
import sys
from fractions import Fraction

import pytest
from dotenv import load_dotenv
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Load environment variables
load_dotenv()

from app.services.deformation import (
    CoefficientRing,
    MCElement,
    TensorElement,
    ambiguity_act,
    augmentation_splitting,
    bch_gauge,
    brute_force_iso_classes,
    exp_ad,
    functor_points_match,
    gauge_act,
    gauge_fix,
    ideal_generated_in_degree_two,
    kuranishi,
    mc_defect,
    preferred_gm_product,
)
import app.config.config as config_module
from app.services.dgla_core import Augmentation, Splitting, check_splitting, cohomology, make_dgla, validate
from app.services.exact_linalg import ONE, ZERO, Matrix, Subspace
from app.services.graded_artin import quotient_cone, sym_truncated
from app.services.group_cohomology import rep_cohomology, to_formal_dgla
from app.utils.errors import (
    AugmentationNotInjectiveError,
    InputValidationError,
    ShapeMismatchError,
    SplittingViolationError,
    TruncationOrderError,
)

HALF = Fraction(1, 2)


def weighted_heisenberg():
    """L^0 = <g> acting with weights 1, -1 on L^1 = <e1, e2>; [e1, e2] = f."""
    return make_dgla(
        [1, 2, 1],
        brackets=[(0, 0, 1, 0, [1, 0]), (0, 0, 1, 1, [0, -1]), (1, 0, 1, 1, [1])],
    )


def solvable_pair():
    """L^0 = <g, n> with [g, n] = n acting on L^1 = <e1, e2> by g = diag(1, 0), n(e2) = e1."""
    return make_dgla(
        [2, 2],
        brackets=[(0, 0, 0, 1, [0, 1]), (0, 0, 1, 0, [1, 0]), (0, 1, 1, 1, [1, 0])],
    )


def affine_line():
    """L^0 = <g>, L^1 = <e, u>, dg = u and g acts by 1 on both; H^0 = 0."""
    return make_dgla([1, 2], d=[Matrix.from_rows([[0], [1]])],
                     brackets=[(0, 0, 1, 0, [1, 0]), (0, 0, 1, 1, [0, 1])])


WEIGHTED = weighted_heisenberg()
WEIGHTED_AUG = Augmentation(1, {}, Matrix.from_rows([[1]]))
SOLVABLE = solvable_pair()
SOLVABLE_AUG = Augmentation(3, {(0, 1): ((1, ONE),), (1, 0): ((1, -ONE),)},
                            Matrix.from_rows([[1, 0], [0, 1], [0, 0]]))
AFFINE = affine_line()
AFFINE_SPLITTING = Splitting.from_maps(AFFINE, {1: Matrix.from_rows([[0, 1]])})

FRAMED_CASES = [
    (WEIGHTED, WEIGHTED_AUG, augmentation_splitting(WEIGHTED, WEIGHTED_AUG, Splitting.zero(WEIGHTED))[0]),
    (SOLVABLE, SOLVABLE_AUG, augmentation_splitting(SOLVABLE, SOLVABLE_AUG, Splitting.zero(SOLVABLE),
                                                    transversal=[(ZERO, ZERO, ONE)])[0]),
]

RING = CoefficientRing(sym_truncated(2, 3))


def tensors(degree, rows):
    """Elements of L^degree ⊗ m over RING with small integer entries."""
    width = RING.total_dim - 1
    row = st.lists(st.integers(-2, 2), min_size=width, max_size=width)
    return st.lists(row, min_size=rows, max_size=rows).map(
        lambda rs: TensorElement(degree, Matrix.from_rows([[0] + r for r in rs], cols=RING.total_dim)))


def framed_elements(l, aug):
    return st.builds(MCElement, tensors(1, l.dims[1]), tensors(0, aug.g_dim))


def test_heisenberg_hull_is_cut_by_t1_t2(heisenberg):
    kur = kuranishi(heisenberg, Splitting.zero(heisenberg), n=2)
    assert kur.ring.dims == (1, 2, 2)
    assert kur.generators == {2: ((ZERO, ONE, ZERO),)}
    ring = CoefficientRing(kur.ring)
    assert mc_defect(heisenberg, ring, kur.universal).is_zero()


def test_heisenberg_hull_at_order_three(heisenberg):
    kur = kuranishi(heisenberg, Splitting.zero(heisenberg), n=3)
    assert kur.ring.dims == (1, 2, 2, 2)
    assert ideal_generated_in_degree_two(kur)


def test_respect_grading_report(heisenberg):
    kur = kuranishi(heisenberg, Splitting.zero(heisenberg), n=2, respect_grading=True)
    assert kur.grading_report.passed
    assert kur.free.types[1] == ((-1, 0), (0, -1))


def test_genus_two_formal_hull_is_free(genus2_trivial):
    p, r = genus2_trivial
    l, aug = to_formal_dgla(rep_cohomology(p, r))
    kur = kuranishi(l, Splitting.zero(l), aug, n=3)
    assert kur.ring.dims == (1, 4, 10, 20)
    assert not kur.generators


def test_ddbar_universal_element(ddbar_model, ddbar_splitting):
    kur = kuranishi(ddbar_model, ddbar_splitting, n=2)
    assert kur.ring.dims == (1, 2, 3)
    ring = CoefficientRing(kur.ring)
    assert kur.universal.value.component(ring, 1) == Matrix.from_rows([[1, 0], [0, 1], [0, 0], [0, 0]])
    assert kur.universal.value.component(ring, 2) == Matrix.from_rows(
        [[0, 0, 0], [0, 0, 0], [0, HALF, 0], [0, -HALF, 0]])


def test_gauge_action_and_fixing(ddbar_model, ddbar_splitting):
    kur = kuranishi(ddbar_model, ddbar_splitting, n=2)
    ring = CoefficientRing(kur.ring)
    lam = TensorElement.from_components(0, 1, ring, {1: Matrix.from_rows([[1, 0]])})
    moved = gauge_act(ddbar_model, ring, lam, kur.universal)
    shift = TensorElement.from_components(1, 4, ring, {1: Matrix.from_rows([[0, 0], [0, 0], [1, 0], [1, 0]])})
    assert moved.value == kur.universal.value - shift
    assert mc_defect(ddbar_model, ring, moved).is_zero()

    fixed, trans = gauge_fix(ddbar_model, ring, ddbar_splitting, moved)
    assert fixed.value == kur.universal.value
    assert trans == -lam


def test_bch_on_abelian_gauge_algebra(ddbar_model):
    ring = CoefficientRing(sym_truncated(2, 2))
    x = TensorElement.from_components(0, 1, ring, {1: Matrix.from_rows([[1, 2]])})
    y = TensorElement.from_components(0, 1, ring, {2: Matrix.from_rows([[0, 3, 0]])})
    assert bch_gauge(ddbar_model, ring, x, y) == x + y


def test_element_with_constant_term_rejected(heisenberg):
    ring = CoefficientRing(sym_truncated(2, 2))
    bad = TensorElement(1, Matrix.from_rows([[1, 0, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0]]))
    with pytest.raises(ShapeMismatchError):
        mc_defect(heisenberg, ring, MCElement(bad))


def test_preferred_product(heisenberg, heisenberg_aug):
    product = preferred_gm_product(heisenberg, heisenberg_aug, Splitting.zero(heisenberg), 2)
    assert product.transversal.vectors() == [(ZERO, ONE)]
    assert product.algebra.dims == (1, 3, 5)
    assert product.s1.dims == (1, 1, 1)
    assert [w.dim for w in product.j_filtration()] == [9, 6, 2, 0]
    ring = CoefficientRing(product.algebra)
    assert mc_defect(heisenberg, ring, product.universal).is_zero()
    assert product.splitting.delta_g == Matrix.from_rows([[1, 0]])


def test_preferred_product_needs_injective_eps(heisenberg):
    flat = Augmentation(2, {}, Matrix.zeros(2, 1))
    with pytest.raises(AugmentationNotInjectiveError):
        preferred_gm_product(heisenberg, flat, Splitting.zero(heisenberg), 2)


def test_brute_force_over_dual_numbers_squared(heisenberg, heisenberg_aug):
    a = sym_truncated(1, 2)
    brute = brute_force_iso_classes(heisenberg, heisenberg_aug, a)
    assert brute.variables == 2
    assert brute.quadrics.dim == 1
    assert brute.quadrics.vectors() == [(ZERO, ONE, ZERO)]
    assert brute.tangent_params == 2
    assert brute.second_order_params == 2
    assert brute.framed_tangent_params == 3
    assert brute.framed_second_order_params == 3
    assert brute.stabilizer_dim == 2


def test_functor_points_match(heisenberg, heisenberg_aug):
    s = Splitting.zero(heisenberg)
    product = preferred_gm_product(heisenberg, heisenberg_aug, s, 2)
    brute = brute_force_iso_classes(heisenberg, heisenberg_aug, sym_truncated(1, 2))
    assert functor_points_match(product.kuranishi, brute).passed
    report = functor_points_match(product.kuranishi, brute, product)
    assert report.passed
    assert report.details["quadric_rank"] == {"kuranishi": 1, "brute": 1}


def test_brute_force_limited_to_order_two(heisenberg):
    with pytest.raises(TruncationOrderError):
        brute_force_iso_classes(heisenberg, None, sym_truncated(1, 3))


def test_ambiguity_from_h0_is_trivial(heisenberg):
    kur = kuranishi(heisenberg, Splitting.zero(heisenberg), n=2)
    ring = CoefficientRing(kur.ring)
    h = TensorElement.from_components(0, 1, ring, {2: Matrix.from_rows([[1, 0]])})
    assert ambiguity_act(heisenberg, kur, h).is_identity()
    low = TensorElement.from_components(0, 1, ring, {1: Matrix.from_rows([[1, 0]])})
    with pytest.raises(InputValidationError):
        ambiguity_act(heisenberg, kur, low)


def test_truncation_order_cap():
    with pytest.raises(TruncationOrderError):
        CoefficientRing(sym_truncated(1, 5))


def test_kuranishi_rejects_bad_splitting():
    l = make_dgla([1, 1], d=[Matrix.from_rows([[1]])])
    with pytest.raises(SplittingViolationError):
        kuranishi(l, Splitting.zero(l), n=2)


def test_truncation_cap_never_exceeds_bch_order(monkeypatch):
    try:
        monkeypatch.setenv("MAX_TRUNCATION_ORDER", "9")
        assert importlib.reload(config_module).MAX_TRUNCATION_ORDER == config_module.BCH_MAX_ORDER
        monkeypatch.setenv("MAX_TRUNCATION_ORDER", "3")
        assert importlib.reload(config_module).MAX_TRUNCATION_ORDER == 3
    finally:
        monkeypatch.delenv("MAX_TRUNCATION_ORDER", raising=False)
        importlib.reload(config_module)


def test_gauge_models_are_valid():
    for l in (WEIGHTED, SOLVABLE, AFFINE):
        assert validate(l).passed
    assert check_splitting(AFFINE, AFFINE_SPLITTING).passed


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_gauge_action_composes_through_bch(data):
    l, aug, _ = data.draw(st.sampled_from(FRAMED_CASES))
    lam = data.draw(tensors(0, l.dims[0]))
    mu = data.draw(tensors(0, l.dims[0]))
    x = data.draw(framed_elements(l, aug))
    composed = gauge_act(l, RING, bch_gauge(l, RING, lam, mu), x, aug)
    assert composed == gauge_act(l, RING, lam, gauge_act(l, RING, mu, x, aug), aug)


@settings(max_examples=15, deadline=None)
@given(tensors(0, 1), tensors(0, 1), tensors(1, 2))
def test_unframed_gauge_action_composes_through_bch(lam, mu, alpha):
    x = MCElement(alpha)
    composed = gauge_act(AFFINE, RING, bch_gauge(AFFINE, RING, lam, mu), x)
    assert composed == gauge_act(AFFINE, RING, lam, gauge_act(AFFINE, RING, mu, x))


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_framed_gauge_fix_is_constant_on_orbits(data):
    l, aug, s = data.draw(st.sampled_from(FRAMED_CASES))
    x = data.draw(framed_elements(l, aug))
    lam = data.draw(tensors(0, l.dims[0]))
    fixed, trans = gauge_fix(l, RING, s, x, aug)
    assert gauge_act(l, RING, trans, x, aug) == fixed
    moved, _ = gauge_fix(l, RING, s, gauge_act(l, RING, lam, x, aug), aug)
    assert moved == fixed


@settings(max_examples=15, deadline=None)
@given(st.data())
def test_framed_gauge_fix_is_idempotent(data):
    l, aug, s = data.draw(st.sampled_from(FRAMED_CASES))
    fixed, _ = gauge_fix(l, RING, s, data.draw(framed_elements(l, aug)), aug)
    again, trans = gauge_fix(l, RING, s, fixed, aug)
    assert again == fixed
    assert trans.is_zero()


@settings(max_examples=15, deadline=None)
@given(tensors(1, 2), tensors(0, 1))
def test_unframed_gauge_fix_without_h0(alpha, lam):
    x = MCElement(alpha)
    fixed, trans = gauge_fix(AFFINE, RING, AFFINE_SPLITTING, x)
    assert gauge_act(AFFINE, RING, trans, x) == fixed
    assert fixed.value.coeffs.row(1) == (ZERO,) * RING.total_dim
    moved, _ = gauge_fix(AFFINE, RING, AFFINE_SPLITTING, gauge_act(AFFINE, RING, lam, x))
    assert moved == fixed
    again, back = gauge_fix(AFFINE, RING, AFFINE_SPLITTING, fixed)
    assert again == fixed and back.is_zero()


@settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(tensors(1, 4), tensors(0, 1))
def test_ddbar_gauge_fix_is_constant_on_orbits(ddbar_model, ddbar_splitting, alpha, lam):
    x = MCElement(alpha)
    fixed, _ = gauge_fix(ddbar_model, RING, ddbar_splitting, x)
    moved, _ = gauge_fix(ddbar_model, RING, ddbar_splitting, gauge_act(ddbar_model, RING, lam, x))
    assert moved == fixed


@settings(max_examples=15, deadline=None)
@given(tensors(0, 1), tensors(1, 2))
def test_defect_is_equivariant(lam, alpha):
    x = MCElement(alpha)
    moved = gauge_act(WEIGHTED, RING, lam, x)
    assert mc_defect(WEIGHTED, RING, moved) == exp_ad(WEIGHTED, RING, lam, mc_defect(WEIGHTED, RING, x))


@settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(tensors(0, 1), tensors(1, 4))
def test_ddbar_defect_is_gauge_invariant(ddbar_model, lam, alpha):
    x = MCElement(alpha)
    moved = gauge_act(ddbar_model, RING, lam, x)
    assert mc_defect(ddbar_model, RING, moved) == mc_defect(ddbar_model, RING, x)


def test_ambiguity_first_moves_gr3():
    kur = kuranishi(WEIGHTED, Splitting.zero(WEIGHTED), n=3)
    assert kur.ring.dims == (1, 2, 2, 2)
    assert kur.ring.monomials[2] == ((2, 0), (0, 2))
    assert kur.ring.monomials[3] == ((3, 0), (0, 3))
    ring = CoefficientRing(kur.ring)
    h = TensorElement.from_components(0, 1, ring, {2: Matrix.from_rows([[1, 0]])})
    phi = ambiguity_act(WEIGHTED, kur, h)
    assert phi.is_identity_on_gr1()
    assert not phi.is_identity()
    # t1 -> t1 + t1^3, t2 fixed
    t1_cubed = kur.ring.flat_index(3, 0)
    expected = [ZERO] * kur.ring.total_dim
    expected[kur.ring.flat_index(1, 0)] = ONE
    expected[t1_cubed] = ONE
    assert phi.generator_images[0] == tuple(expected)
    assert phi.generator_images[1] == kur.ring.generator(1)


@st.composite
def split_dglas(draw):
    """
    L = <g> ⊕ L^1 ⊕ L^2 with d^0 = 0, d^1 of rank r in a shuffled basis,
    a random symmetric bracket L^1 x L^1 -> L^2 and the matching splitting.
    Returns (dgla, splitting, dim H^1).
    """
    m = draw(st.integers(1, 3))
    p = draw(st.integers(1, 2))
    r = draw(st.integers(0, min(m - 1, p)))
    d1 = Matrix.from_rows([[1 if i < r and j == m - r + i else 0 for j in range(m)] for i in range(p)])
    u = Matrix.from_rows([[1 if i == j else (draw(st.integers(-1, 1)) if i > j else 0)
                           for j in range(m)] for i in range(m)])
    values = st.lists(st.integers(-1, 1), min_size=p, max_size=p)
    brackets = [(1, a, 1, b, draw(values)) for a in range(m) for b in range(a, m)]
    l = make_dgla([1, m, p], d=[Matrix.zeros(m, 1), d1 @ u.inverse()], brackets=brackets)
    return l, Splitting.from_maps(l, {2: u @ d1.transpose()}), m - r


@st.composite
def cone_algebras(draw):
    """sym_truncated(k, 2) for k <= 3, or its quotient by a few random quadrics."""
    k = draw(st.integers(1, 3))
    n2 = sym_truncated(k, 2).dims[2]
    quadrics = draw(st.lists(st.lists(st.integers(-1, 1), min_size=n2, max_size=n2), max_size=2))
    return quotient_cone(k, Subspace.span(n2, quadrics), 2)


@settings(max_examples=20, deadline=None)
@given(split_dglas(), cone_algebras())
def test_tangent_space_and_points_on_random_models(case, a):
    l, s, h1 = case
    assert validate(l).passed
    assert check_splitting(l, s).passed
    kur = kuranishi(l, s, n=2)
    assert kur.ring.dims[1] == h1 == cohomology(l, s).dims[1]
    assert functor_points_match(kur, brute_force_iso_classes(l, None, a)).passed


@settings(max_examples=20, deadline=None)
@given(cone_algebras())
def test_points_of_weighted_hull(a):
    kur = kuranishi(WEIGHTED, Splitting.zero(WEIGHTED), n=2)
    assert functor_points_match(kur, brute_force_iso_classes(WEIGHTED, None, a)).passed


TEST_ALGEBRAS = [
    sym_truncated(1, 2),
    sym_truncated(2, 2),
    sym_truncated(3, 2),
    quotient_cone(1, Subspace.span(1, [(1,)]), 2),
    quotient_cone(2, Subspace.span(3, [(0, 1, 0)]), 2),
    quotient_cone(2, Subspace.span(3, [(1, 0, 1)]), 2),
    quotient_cone(3, Subspace.span(6, [(1, 0, 0, 0, 0, 0), (0, 0, 0, 0, 1, 0)]), 2),
]


def _model(request, name):
    """(dgla, splitting) for a fixture name; group fixtures go through the formal dgla."""
    if name == "weighted":
        return WEIGHTED, Splitting.zero(WEIGHTED)
    if name == "ddbar_model":
        return request.getfixturevalue(name), request.getfixturevalue("ddbar_splitting")
    if name in ("genus2_trivial", "torus_gl2"):
        l, _ = to_formal_dgla(rep_cohomology(*request.getfixturevalue(name)))
    else:
        l = request.getfixturevalue(name)
    return l, Splitting.zero(l)


@pytest.mark.parametrize("name", ["heisenberg", "weighted", "ddbar_model", "genus2_trivial", "torus_gl2"])
@pytest.mark.parametrize("a", TEST_ALGEBRAS, ids=lambda a: "x".join(map(str, a.dims)))
def test_functor_points_across_models(request, name, a):
    l, s = _model(request, name)
    kur = kuranishi(l, s, n=2)
    brute = brute_force_iso_classes(l, None, a)
    assert brute.tangent_params == kur.ring.dims[1] * a.dims[1]
    assert functor_points_match(kur, brute).passed


@pytest.mark.parametrize("name, n", [("heisenberg", 3), ("weighted", 3), ("genus2_trivial", 3), ("torus_gl2", 2)])
def test_formal_hull_is_the_quadratic_cone(request, name, n):
    l, s = _model(request, name)
    kur = kuranishi(l, s, n=n)
    i2 = kur.obstruction.i2_subspace()
    assert kur.ring.dims == quotient_cone(kur.ring.dims[1], i2, n).dims
    assert kur.ideal.in_degree(2, kur.free).equals(i2)
    assert ideal_generated_in_degree_two(kur)
    ring = CoefficientRing(kur.ring)
    assert all(kur.universal.value.component(ring, k).is_zero() for k in range(2, n + 1))


def test_torus_hull_has_commuting_quadrics(torus_gl2):
    l, _ = to_formal_dgla(rep_cohomology(*torus_gl2))
    kur = kuranishi(l, Splitting.zero(l), n=2)
    # [X, Y] = 0 on gl_2 x gl_2 cuts three independent quadrics
    assert kur.ring.dims == (1, 8, 33)
