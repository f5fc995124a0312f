"""
Group Cohomology

Cohomology of a finitely presented group with coefficients in ad(rho),
computed on the presentation 2-complex through Fox derivatives, together
with the cup-product obstruction map and the formal dgla (H^0, H^1, H^2)
it defines.

Words are tuples of signed 1-based letters (2 = x_2, -2 = x_2^-1);
generator arguments of the API are 0-based.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from app.services.dgla_core import Augmentation, Dgla, QuadraticMap, make_dgla, validate
from app.services.exact_linalg import (
    Matrix, Scalar, Subspace, Vector, kernel_basis, solve_columns, solve_particular,
    split_complement, unit_vector, vec_add, zero_vector,
)
from app.services.graded_artin import HodgeType
from app.utils.check_report import CheckReport
from app.utils.errors import InputValidationError, ModelInconsistencyError, TypeCompatibilityError
from app.utils.logging.component_loggers import get_cohomology_logger, log_check_event, log_function_calls

logger = get_cohomology_logger(__name__)

Word = Tuple[int, ...]
HALF = Scalar(Fraction(1, 2))


def free_reduce(word: Sequence[int]) -> Word:
    out: List[int] = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


@dataclass(frozen=True)
class Presentation:
    """Generators x_1..x_k and relation words."""
    generator_count: int
    relations: Tuple[Word, ...]

    def __post_init__(self):
        for r, word in enumerate(self.relations):
            for letter in word:
                if letter == 0 or abs(letter) > self.generator_count:
                    raise InputValidationError(f"letter {letter} outside generators 1..{self.generator_count}",
                                               pointer=f"/presentation/relations/{r}")
            if free_reduce(word) != tuple(word):
                raise InputValidationError("relation word is not freely reduced",
                                           pointer=f"/presentation/relations/{r}")


def surface_presentation(genus: int) -> Presentation:
    """<a_1, b_1, ..., a_g, b_g | [a_1, b_1] ... [a_g, b_g]>."""
    word: List[int] = []
    for i in range(genus):
        a, b = 2 * i + 1, 2 * i + 2
        word.extend([a, b, -a, -b])
    return Presentation(2 * genus, (tuple(word),) if genus else ())


def free_presentation(k: int) -> Presentation:
    return Presentation(k, ())


@dataclass(frozen=True, eq=False)
class Representation:
    """
    One invertible N x N matrix per generator; lie_subalgebra, when
    given, is a subspace of N x N matrices in row-major coordinates.
    """
    images: Tuple[Matrix, ...]
    lie_subalgebra: Optional[Subspace] = None

    @property
    def size(self) -> int:
        return self.images[0].rows if self.images else 0

    @cached_property
    def inverses(self) -> Tuple[Matrix, ...]:
        return tuple(m.inverse() for m in self.images)

    def letter(self, letter: int) -> Matrix:
        return self.images[letter - 1] if letter > 0 else self.inverses[-letter - 1]

    def evaluate(self, word: Sequence[int]) -> Matrix:
        result = Matrix.identity(self.size)
        for letter in word:
            result = result @ self.letter(letter)
        return result


def commutator(x: Matrix, y: Matrix) -> Matrix:
    return x @ y - y @ x


def _vec_matrix(v: Sequence[Scalar], n: int) -> Matrix:
    return Matrix(n, n, v)


@dataclass(frozen=True, eq=False)
class CoefficientModule:
    """
    End(V) or a Lie subalgebra g ⊆ gl_N under the adjoint action; elements
    are coordinate vectors over `basis` (columns are N^2 row-major vectors).
    """
    n: int
    basis: Matrix

    @classmethod
    def for_representation(cls, r: Representation) -> "CoefficientModule":
        n = r.size
        if r.lie_subalgebra is None:
            return cls(n, Matrix.identity(n * n))
        return cls(n, r.lie_subalgebra.basis.transpose())

    @property
    def dim(self) -> int:
        return self.basis.cols

    def to_matrix(self, u: Sequence[Scalar]) -> Matrix:
        return _vec_matrix(self.basis.apply(u), self.n)

    def from_matrix(self, x: Matrix) -> Vector:
        coords = solve_particular(self.basis, x.entries)
        if coords is None:
            raise ModelInconsistencyError("matrix leaves the coefficient Lie algebra")
        return coords

    def ad(self, g: Matrix) -> Matrix:
        """Ad(g): X -> g X g^-1 in module coordinates."""
        full = g.kron(g.inverse().transpose())
        if self.basis.is_identity():
            return full
        columns = (full @ self.basis).column_vectors()
        coords = solve_columns(self.basis, columns)
        if any(c is None for c in coords):
            raise ModelInconsistencyError("coefficient Lie algebra is not Ad-invariant")
        return Matrix.from_columns(coords, rows=self.dim)

    def bracket(self, u: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
        return self.from_matrix(commutator(self.to_matrix(u), self.to_matrix(v)))

    @cached_property
    def structure_constants(self) -> Dict[Tuple[int, int], Tuple[Tuple[int, Scalar], ...]]:
        out = {}
        for a in range(self.dim):
            for b in range(self.dim):
                val = self.bracket(unit_vector(self.dim, a), unit_vector(self.dim, b))
                out[(a, b)] = tuple((i, c) for i, c in enumerate(val) if c)
        return out


class _AdCache:
    """Adjoint matrices of generators and their inverses."""

    def __init__(self, module: CoefficientModule, r: Representation):
        self.module = module
        self.pos = [module.ad(m) for m in r.images]
        self.neg = [m.inverse() for m in self.pos]

    def letter(self, letter: int) -> Matrix:
        return self.pos[letter - 1] if letter > 0 else self.neg[-letter - 1]


def validate_rep(p: Presentation, r: Representation) -> CheckReport:
    """Relations evaluate to the identity; the Lie subalgebra is closed and Ad-invariant."""
    report = CheckReport("representation")
    if len(r.images) != p.generator_count:
        report.fail("one matrix per generator", {"generators": p.generator_count, "matrices": len(r.images)})
        return report
    n = r.size
    for i, m in enumerate(r.images):
        if m.shape != (n, n) or not m.determinant():
            report.fail("generator images are invertible N x N matrices", {"generator": i})
    if not report.passed:
        return report
    for idx, word in enumerate(p.relations):
        if not r.evaluate(word).is_identity():
            report.fail("relation evaluates to the identity", {"relation": idx})
    if r.lie_subalgebra is not None:
        module = CoefficientModule.for_representation(r)
        for a in range(module.dim):
            for b in range(a + 1, module.dim):
                x = commutator(module.to_matrix(unit_vector(module.dim, a)),
                               module.to_matrix(unit_vector(module.dim, b)))
                if solve_particular(module.basis, x.entries) is None:
                    report.fail("Lie subalgebra is bracket-closed", {"pair": [a, b]})
        for i, m in enumerate(r.images):
            full = m.kron(m.inverse().transpose())
            for col in (full @ module.basis).column_vectors():
                if solve_particular(module.basis, col) is None:
                    report.fail("Lie subalgebra is Ad-invariant", {"generator": i})
                    break
    log_check_event(logger, "representation", report.passed, action="validate_rep")
    return report


def fox_derivative(w: Sequence[int], gen: int, r: Representation,
                   module: Optional[CoefficientModule] = None) -> Matrix:
    """
    ∂w/∂x_gen evaluated through Ad(rho): a positive letter x contributes
    Ad(prefix before it), an inverse letter x^-1 contributes -Ad(prefix
    including it).
    """
    module = module or CoefficientModule.for_representation(r)
    return _fox_with_cache(w, gen, _AdCache(module, r))


def _fox_with_cache(w: Sequence[int], gen: int, ads: _AdCache) -> Matrix:
    m = ads.module.dim
    total = Matrix.zeros(m, m)
    prefix = Matrix.identity(m)
    for letter in w:
        if letter == gen + 1:
            total = total + prefix
            prefix = prefix @ ads.letter(letter)
        elif letter == -(gen + 1):
            prefix = prefix @ ads.letter(letter)
            total = total - prefix
        else:
            prefix = prefix @ ads.letter(letter)
    return total


@dataclass(frozen=True, eq=False)
class CochainComplex:
    """C^0 = M, C^1 = M^k, C^2 = M^rels with the Fox differentials."""
    module: CoefficientModule
    d0: Matrix
    d1: Matrix
    generator_count: int
    relation_count: int


def cochain_complex(p: Presentation, r: Representation) -> CochainComplex:
    """
    d0(u)(x_i) = Ad(x_i)u - u and d1(z)(w) = Σ_j (∂w/∂x_j) z(x_j).

    Raises:
        ModelInconsistencyError: d1 d0 != 0
    """
    module = CoefficientModule.for_representation(r)
    ads = _AdCache(module, r)
    m = module.dim
    k = p.generator_count
    ident = Matrix.identity(m)
    d0 = Matrix.zeros(0, m)
    for i in range(k):
        d0 = d0.vstack(ads.pos[i] - ident)
    rows = []
    for w in p.relations:
        block = Matrix.zeros(m, 0)
        for j in range(k):
            block = block.hstack(_fox_with_cache(w, j, ads))
        rows.append(block)
    d1 = Matrix.zeros(0, m * k)
    for block in rows:
        d1 = d1.vstack(block)
    if d1.rows and d0.cols and not (d1 @ d0).is_zero():
        raise ModelInconsistencyError("d1 d0 != 0; the representation violates a relation")
    return CochainComplex(module, d0, d1, k, len(p.relations))


@dataclass(frozen=True, eq=False)
class RepCohomology:
    """H^0, H^1, H^2 of the presentation complex with canonical-complement bases."""
    presentation: Presentation
    representation: Representation
    complex: CochainComplex
    h0: Subspace
    z1: Subspace
    b1: Subspace
    h1: Subspace
    b2: Subspace
    h2: Subspace

    @property
    def dims(self) -> Tuple[int, int, int]:
        return (self.h0.dim, self.h1.dim, self.h2.dim)

    @property
    def module(self) -> CoefficientModule:
        return self.complex.module

    def h1_coordinates(self, z: Sequence[Scalar]) -> Optional[Vector]:
        """Class of a 1-cocycle in the H^1 basis (None if z is not closed)."""
        if not self.z1.contains(z):
            return None
        if self.h1.dim == 0:
            return ()
        stacked = self.h1.basis.vstack(self.b1.basis).transpose()
        sol = solve_particular(stacked, z)
        return tuple(sol[:self.h1.dim]) if sol is not None else None

    def h2_coordinates(self, c: Sequence[Scalar]) -> Vector:
        """Class of a 2-cochain modulo im d1 in the H^2 basis."""
        if self.h2.dim == 0:
            return ()
        stacked = self.h2.basis.vstack(self.b2.basis).transpose()
        sol = solve_particular(stacked, c)
        return tuple(sol[:self.h2.dim])

    def euler_check(self) -> bool:
        m = self.module.dim
        lhs = self.h0.dim - self.h1.dim + self.h2.dim
        rhs = (1 - self.complex.generator_count + self.complex.relation_count) * m
        return lhs == rhs

    def to_json(self) -> Dict:
        return {"dims": list(self.dims), "h0": self.h0.to_json(), "h1": self.h1.to_json(),
                "h2": self.h2.to_json(), "euler_characteristic_ok": self.euler_check()}


@log_function_calls(logger)
def rep_cohomology(p: Presentation, r: Representation) -> RepCohomology:
    """Cohomology of the cochain complex; H^1 and H^2 bases are greedy complements."""
    cx = cochain_complex(p, r)
    m = cx.module.dim
    k = p.generator_count
    h0 = kernel_basis(cx.d0) if k else Subspace.full(m)
    if cx.relation_count:
        z1 = kernel_basis(cx.d1)
    else:
        z1 = Subspace.full(m * k)
    b1 = Subspace.span(m * k, cx.d0.column_vectors())
    h1 = split_complement(b1, z1)
    b2 = Subspace.span(m * cx.relation_count, cx.d1.column_vectors())
    h2 = split_complement(b2, Subspace.full(m * cx.relation_count))
    result = RepCohomology(p, r, cx, h0, z1, b1, h1, b2, h2)
    logger.info(f"Representation cohomology dims {result.dims}", extra={'action': 'rep_cohomology'})
    return result


def _cocycle_on_letters(z: Sequence[Scalar], m: int, ads: _AdCache) -> Dict[int, Vector]:
    """z on generators and their inverses: z(x^-1) = -Ad(x)^-1 z(x)."""
    out: Dict[int, Vector] = {}
    for j in range(len(ads.pos)):
        zj = tuple(z[j * m:(j + 1) * m])
        out[j + 1] = zj
        out[-(j + 1)] = tuple(-c for c in ads.neg[j].apply(zj))
    return out


def cup_cochain(coh: RepCohomology, u: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
    """
    2-cochain u ∪ v on the relation cells:
    Σ_i [u(p_i), Ad(p_i) v(y_(i+1))] over the prefixes of each relation,
    plus Ad(p_(i+1))[u(x), v(x)] for every inverse letter y_(i+1) = x^-1.
    """
    module = coh.module
    m = module.dim
    ads = _AdCache(module, coh.representation)
    u_let = _cocycle_on_letters(u, m, ads)
    v_let = _cocycle_on_letters(v, m, ads)
    out: List[Scalar] = []
    for word in coh.presentation.relations:
        total = zero_vector(m)
        u_prefix = zero_vector(m)
        ad_prefix = Matrix.identity(m)
        for pos, letter in enumerate(word):
            if pos > 0:
                total = vec_add(total, module.bracket(u_prefix, ad_prefix.apply(v_let[letter])))
            u_prefix = vec_add(u_prefix, ad_prefix.apply(u_let[letter]))
            ad_prefix = ad_prefix @ ads.letter(letter)
            if letter < 0:
                x = -letter
                total = vec_add(total, ad_prefix.apply(module.bracket(u_let[x], v_let[x])))
        out.extend(total)
    return tuple(out)


def bar_oracle_cup(coh: RepCohomology, u: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
    """
    Independent evaluation of the same bar chain: every prefix value u(p_i)
    comes from Fox derivatives of the prefix word and every Ad(p_i) from
    the evaluated prefix matrix.
    """
    module = coh.module
    m = module.dim
    r = coh.representation
    k = coh.presentation.generator_count
    out: List[Scalar] = []
    for word in coh.presentation.relations:
        total = zero_vector(m)
        for pos in range(len(word)):
            prefix = word[:pos + 1]
            ad_after = module.ad(r.evaluate(prefix))
            letter = word[pos]
            if pos + 1 < len(word):
                nxt = word[pos + 1]
                u_p = zero_vector(m)
                for j in range(k):
                    u_p = vec_add(u_p, fox_derivative(prefix, j, r, module).apply(tuple(u[j * m:(j + 1) * m])))
                v_next = fox_derivative((nxt,), abs(nxt) - 1, r, module).apply(
                    tuple(v[(abs(nxt) - 1) * m:abs(nxt) * m]))
                total = vec_add(total, module.bracket(u_p, ad_after.apply(v_next)))
            if letter < 0:
                x = -letter - 1
                ux = tuple(u[x * m:(x + 1) * m])
                vx = tuple(v[x * m:(x + 1) * m])
                total = vec_add(total, ad_after.apply(module.bracket(ux, vx)))
        out.extend(total)
    return tuple(out)


@log_function_calls(logger)
def cup_obstruction(coh: RepCohomology) -> QuadraticMap:
    """Symmetrized cup product on the H^1 basis; q(u) = class(u ∪ u)."""
    basis = coh.h1.vectors()
    values = {}
    for i in range(len(basis)):
        for j in range(i, len(basis)):
            uv = coh.h2_coordinates(cup_cochain(coh, basis[i], basis[j]))
            vu = coh.h2_coordinates(cup_cochain(coh, basis[j], basis[i]))
            values[(i, j)] = tuple(HALF * (a + b) for a, b in zip(uv, vu))
    return QuadraticMap(len(basis), coh.h2.dim, values)


def quadratic_class(coh: RepCohomology, u: Sequence[Scalar]) -> Vector:
    """H^2 class of u ∪ u for a 1-cocycle u."""
    return coh.h2_coordinates(cup_cochain(coh, u, u))


def _pointwise(module: CoefficientModule, h: Sequence[Scalar], cochain: Sequence[Scalar]) -> Vector:
    m = module.dim
    out: List[Scalar] = []
    for start in range(0, len(cochain), m):
        out.extend(module.bracket(h, tuple(cochain[start:start + m])))
    return tuple(out)


@log_function_calls(logger)
def to_formal_dgla(coh: RepCohomology,
                   types: Optional[Dict[int, Sequence[HodgeType]]] = None) -> Tuple[Dgla, Augmentation]:
    """
    Formal dgla (H^0, H^1, H^2; d = 0) with the brackets induced on
    cohomology and the augmentation eps: H^0 -> g = M given by inclusion.

    Args:
        coh: output of rep_cohomology
        types: optional Hodge types for the H^1 and H^2 bases (H^0 is (0,0))

    Raises:
        TypeCompatibilityError: the bracket does not respect the supplied types
        ModelInconsistencyError: a bracket of basis classes has no coordinates
    """
    module = coh.module
    h0 = coh.h0.vectors()
    h1 = coh.h1.vectors()
    dims = coh.dims
    brackets = []
    for a, x in enumerate(h0):
        for b, y in enumerate(h0):
            coords = coh.h0.coordinates(module.bracket(x, y))
            brackets.append((0, a, 0, b, coords))
        for b, z in enumerate(h1):
            brackets.append((0, a, 1, b, coh.h1_coordinates(_pointwise(module, x, z))))
        for b in range(dims[2]):
            c = coh.h2.vectors()[b]
            brackets.append((0, a, 2, b, coh.h2_coordinates(_pointwise(module, x, c))))
    obs = cup_obstruction(coh)
    for i in range(len(h1)):
        for j in range(i, len(h1)):
            brackets.append((1, i, 1, j, obs.values[(i, j)]))
    hodge = None
    if types is not None:
        hodge = [[(0, 0)] * dims[0], list(types.get(1, [])), list(types.get(2, []))]
    missing = [list(b[:4]) for b in brackets if b[4] is None]
    if missing:
        raise ModelInconsistencyError("bracket leaves the cohomology basis", {"brackets": missing})
    l = make_dgla(list(dims), brackets=brackets, types=hodge)
    if hodge is not None:
        report = validate(l)
        type_failures = [v for v in report.violations if "type" in v.identity]
        if type_failures:
            raise TypeCompatibilityError("bracket does not respect the supplied Hodge types",
                                         [v.to_dict() for v in type_failures])
    eps = Matrix.from_columns(h0, rows=module.dim) if h0 else Matrix.zeros(module.dim, 0)
    aug = Augmentation(module.dim, module.structure_constants, eps)
    return l, aug
