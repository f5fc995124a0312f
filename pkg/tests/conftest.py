#!/usr/bin/env python3
"""
Shared fixtures: small hand-checked dglas, splittings and representations.
"""

import os
import sys
from fractions import Fraction

import pytest
from dotenv import load_dotenv

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Load environment variables
load_dotenv()

from app.services.dgla_core import Augmentation, Splitting, make_dgla
from app.services.exact_linalg import Matrix
from app.services.group_cohomology import Representation, surface_presentation

HALF = Fraction(1, 2)


@pytest.fixture
def heisenberg():
    """
    L^0 = <g>, L^1 = <e1, e2>, L^2 = <f>, d = 0, [e1, e2] = f.
    Types (0,0); (1,0), (0,1); (1,1).
    """
    return make_dgla(
        [1, 2, 1],
        brackets=[(1, 0, 1, 1, [1])],
        types=[[(0, 0)], [(1, 0), (0, 1)], [(1, 1)]],
    )


@pytest.fixture
def heisenberg_aug():
    """g = C^2 abelian, eps(g) = first basis vector."""
    return Augmentation(2, {}, Matrix.from_rows([[1], [0]]))


@pytest.fixture
def ddbar_model():
    """
    E^0 = <g>, E^1 = <h1, h2, a, b>, E^2 = <c> with
    D'g = a, D''g = b, D'b = c, D''a = -c and [h1, h2] = c.
    H^1 is spanned by h1 (1,0) and h2 (0,1); [h1, h2] = D'D''g.
    """
    d1 = [Matrix.from_rows([[0], [0], [1], [0]]), Matrix.from_rows([[0, 0, 0, 1]])]
    d2 = [Matrix.from_rows([[0], [0], [0], [1]]), Matrix.from_rows([[0, 0, -1, 0]])]
    return make_dgla(
        [1, 4, 1],
        brackets=[(1, 0, 1, 1, [1])],
        d1=d1,
        d2=d2,
        types=[[(0, 0)], [(1, 0), (0, 1), (1, 0), (0, 1)], [(1, 1)]],
    )


@pytest.fixture
def ddbar_splitting(ddbar_model):
    """delta(a) = delta(b) = g/2 and delta(c) = (b - a)/2."""
    return Splitting.from_maps(ddbar_model, {
        1: Matrix.from_rows([[0, 0, HALF, HALF]]),
        2: Matrix.from_rows([[0], [0], [-HALF], [HALF]]),
    })


@pytest.fixture
def genus2_trivial():
    """Trivial rank-one representation of the genus-2 surface group."""
    p = surface_presentation(2)
    return p, Representation(tuple(Matrix.identity(1) for _ in range(4)))


@pytest.fixture
def torus_gl2():
    """Trivial representation of Z^2 = <a, b | [a, b]> in GL_2."""
    p = surface_presentation(1)
    return p, Representation((Matrix.identity(2), Matrix.identity(2)))


@pytest.fixture
def ddbar_cubic():
    """
    Two copies of the ddbar block: E^0 = <g, g2>, E^1 = <h1, h2, a, b, a2, b2>,
    E^2 = <c, c2> with D'g = a, D''g = b, D'b = c, D''a = -c and likewise
    for g2. Brackets [h1, h2] = c, [g, h1] = b2 and [a, h1] = c2, so
    [alpha_1, alpha_2] is nonzero and alpha_3 = a2 ⊗ t1^2 t2.
    """
    d1 = [Matrix.from_rows([[0, 0], [0, 0], [1, 0], [0, 0], [0, 1], [0, 0]]),
          Matrix.from_rows([[0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 0, 1]])]
    d2 = [Matrix.from_rows([[0, 0], [0, 0], [0, 0], [1, 0], [0, 0], [0, 1]]),
          Matrix.from_rows([[0, 0, -1, 0, 0, 0], [0, 0, 0, 0, -1, 0]])]
    return make_dgla(
        [2, 6, 2],
        brackets=[(1, 0, 1, 1, [1, 0]), (0, 0, 1, 0, [0, 0, 0, 0, 0, 1]), (1, 2, 1, 0, [0, 1])],
        d1=d1,
        d2=d2,
        types=[[(0, 0), (1, -1)],
               [(1, 0), (0, 1), (1, 0), (0, 1), (2, -1), (1, 0)],
               [(1, 1), (2, 0)]],
    )


@pytest.fixture
def ddbar_cubic_splitting(ddbar_cubic):
    """The ddbar_splitting formulas on each block."""
    return Splitting.from_maps(ddbar_cubic, {
        1: Matrix.from_rows([[0, 0, HALF, HALF, 0, 0], [0, 0, 0, 0, HALF, HALF]]),
        2: Matrix.from_rows([[0, 0], [0, 0], [-HALF, 0], [HALF, 0], [0, -HALF], [0, HALF]]),
    })
