#!/usr/bin/env python3
"""
Tests for the connection series on a d'd''-dgla, their flatness and Hodge
types, the gauge comparison and the mixed Hodge structure on the fiber.
"""

import os
import sys

import pytest
from dotenv import load_dotenv

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Load environment variables
load_dotenv()

from app.services.dgla_core import Splitting, make_dgla
from app.services.exact_linalg import Matrix
from app.services.mc_vmhs import (
    alpha_recursion,
    alpha_v_recursion,
    build_formality_model,
    check_fiber_action,
    connection_operator,
    fiber_vmhs_check,
    flatness_check,
    gauge_compare,
    hodge_type_check,
    split_fiber_structure,
)
from app.utils.errors import DdbarViolationError

TRIVIAL_FIBER = [(0, 0)]
SCALAR_ACTION = [Matrix.from_rows([[1]])]


@pytest.fixture
def model(ddbar_model, ddbar_splitting):
    return build_formality_model(ddbar_model, ddbar_splitting, TRIVIAL_FIBER, SCALAR_ACTION, 2)


def test_series_in_degree_two(model):
    primed = alpha_recursion(model)
    mirror = alpha_v_recursion(model)
    ring = model.ring
    assert primed.gammas[2].component(ring, 2) == Matrix.from_rows([[0, 2, 0]])
    assert primed.alpha(2).component(ring, 2) == Matrix.from_rows([[0, 0, 0], [0, 0, 0], [0, 1, 0], [0, 0, 0]])
    assert mirror.alpha(2).component(ring, 2) == Matrix.from_rows([[0, 0, 0], [0, 0, 0], [0, 0, 0], [0, -1, 0]])


def test_both_series_are_flat(model):
    assert flatness_check(model, alpha_recursion(model)).passed
    assert flatness_check(model, alpha_v_recursion(model)).passed


def test_hodge_types_of_the_series(model):
    primed = hodge_type_check(model, alpha_recursion(model))
    assert primed.passed
    assert primed.details["alpha_2"]["types"] == [[0, -1]]
    assert primed.details["griffiths_transversal"]
    mirror = hodge_type_check(model, alpha_v_recursion(model))
    assert mirror.passed
    assert mirror.details["alpha_2"]["types"] == [[-1, 0]]
    assert mirror.details["griffiths_antitransversal"]


def test_gauge_comparison_in_degree_two(model):
    comparison = gauge_compare(model, alpha_recursion(model), alpha_v_recursion(model))
    assert comparison.method == "explicit"
    assert comparison.sign == "1/2"
    assert comparison.phi.is_identity()
    assert comparison.g.component(model.ring, 2) == Matrix.from_rows([[0, 1, 0]])
    assert comparison.report.passed


def test_gauge_comparison_in_degree_three(ddbar_model, ddbar_splitting):
    m = build_formality_model(ddbar_model, ddbar_splitting, TRIVIAL_FIBER, SCALAR_ACTION, 3)
    primed = alpha_recursion(m)
    assert primed.alpha(3).is_zero()
    comparison = gauge_compare(m, primed, alpha_v_recursion(m))
    assert comparison.method == "solver"
    assert comparison.phi.is_identity()
    assert comparison.g.component(m.ring, 2) == Matrix.from_rows([[0, 1, 0]])
    assert comparison.g.component(m.ring, 3).is_zero()


def test_fiber_structure_is_mixed(model):
    primed = alpha_recursion(model)
    split = split_fiber_structure(model)
    assert split.dim == 6
    assert fiber_vmhs_check(model, primed).passed
    comparison = gauge_compare(model, primed, alpha_v_recursion(model))
    report = fiber_vmhs_check(model, primed, g=comparison.g)
    assert report.passed
    assert report.details["fiber_dim"] == 6


def test_connection_operator_is_nilpotent(model):
    comparison = gauge_compare(model, alpha_recursion(model), alpha_v_recursion(model))
    n = connection_operator(model, comparison.g)
    assert not n.is_zero()
    assert (n @ n).is_zero()


def test_fiber_action_must_respect_types(ddbar_model):
    report = check_fiber_action(ddbar_model, [(0, 0), (1, 0)], [Matrix.from_rows([[0, 1], [0, 0]])])
    assert not report.passed
    assert report.violations[0].identity == "action adds types"


def test_formality_model_needs_ddbar():
    e = make_dgla([1, 1], d1=[Matrix.from_rows([[1]])], d2=[Matrix.from_rows([[0]])],
                  types=[[(0, 0)], [(1, 0)]])
    with pytest.raises(DdbarViolationError):
        build_formality_model(e, Splitting.zero(e), TRIVIAL_FIBER, SCALAR_ACTION, 2)


@pytest.fixture
def cubic(ddbar_cubic, ddbar_cubic_splitting):
    # g2 has type (1,-1) and must act by zero on a (0,0) fiber
    return build_formality_model(ddbar_cubic, ddbar_cubic_splitting, TRIVIAL_FIBER,
                                 [Matrix.from_rows([[1]]), Matrix.from_rows([[0]])], 4)


def test_third_term_of_the_series(cubic):
    ring = cubic.ring
    assert cubic.kuranishi.ring.dims == (1, 2, 3, 4, 5)
    primed = alpha_recursion(cubic)
    assert primed.gammas[3].component(ring, 3) == Matrix.from_rows([[0, 0, 0, 0], [0, 1, 0, 0]])
    # a2 ⊗ t1^2 t2
    expected = [[0] * 4 for _ in range(6)]
    expected[4][1] = 1
    assert primed.alpha(3).component(ring, 3) == Matrix.from_rows(expected)
    assert primed.alpha(4).is_zero()
    mirror = alpha_v_recursion(cubic)
    assert mirror.alpha(3).is_zero()


def test_cubic_series_are_flat_and_typed(cubic):
    primed = alpha_recursion(cubic)
    mirror = alpha_v_recursion(cubic)
    assert flatness_check(cubic, primed).passed
    assert flatness_check(cubic, mirror).passed
    types = hodge_type_check(cubic, primed)
    assert types.passed
    assert types.details["alpha_2"]["types"] == [[0, -1]]
    assert types.details["alpha_3"]["types"] == [[0, -2]]
    assert hodge_type_check(cubic, mirror).passed


def test_gauge_comparison_in_degree_four(cubic):
    comparison = gauge_compare(cubic, alpha_recursion(cubic), alpha_v_recursion(cubic))
    ring = cubic.ring
    assert comparison.method == "solver"
    assert comparison.report.passed
    assert comparison.phi.is_identity()
    assert comparison.g.component(ring, 2) == Matrix.from_rows([[0, 1, 0], [0, 0, 0]])
    assert comparison.g.component(ring, 3) == Matrix.from_rows([[0, 0, 0, 0], [0, 1, 0, 0]])
    assert comparison.g.component(ring, 4).is_zero()
