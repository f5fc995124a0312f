"""
Deformation

Maurer-Cartan elements with coefficients in a truncated graded Artin
algebra: defects, the nilpotent gauge action, gauge fixing along a
splitting, the Kuranishi construction of the hull and its obstruction
ideal, the product decomposition attached to a transversal, the
order-two brute-force comparison and the H^0 ⊗ m^2 ambiguity action.

An element of L^i ⊗ m is stored as a matrix with one row per basis
vector of L^i and one column per flat basis element of the algebra;
the column of the unit is always zero.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from app.config import (
    BCH_MAX_ORDER, BRUTE_FORCE_MAX_ORDER, GAUGE_FIX_EXTRA_STEPS, MAX_TRUNCATION_ORDER,
)
from app.services.dgla_core import (
    Augmentation, Dgla, DglaCohomology, QuadraticMap, Splitting, bracket_on_cohomology,
    check_augmentation, check_splitting, cohomology, graded_basis, harmonic_projector,
    splitting_shifts_weight, sym2_index,
)
from app.services.exact_linalg import (
    ZERO, Matrix, Scalar, Subspace, Vector, kernel_basis, rank, unit_vector,
)
from app.services.graded_artin import (
    GradedArtinAlgebra, IdealData, RingMorphism, SparseVec, quotient_by_ideal, saturate_ideal,
    sym_truncated, tensor, tensor_factor_ideal,
)
from app.utils.check_report import CheckReport
from app.utils.errors import (
    AugmentationNotInjectiveError, InputValidationError, ModelInconsistencyError, ShapeMismatchError,
    SplittingViolationError, TruncationOrderError, TypeCompatibilityError,
)
from app.utils.logging.component_loggers import (
    get_deformation_logger, log_check_event, log_function_calls,
)

logger = get_deformation_logger(__name__)

HALF = Scalar(Fraction(1, 2))


@dataclass(frozen=True, eq=False)
class CoefficientRing:
    """A truncated graded Artin algebra (A, m) with m^(n+1) = 0."""
    algebra: GradedArtinAlgebra

    def __post_init__(self):
        if self.algebra.order > MAX_TRUNCATION_ORDER:
            raise TruncationOrderError(
                f"truncation order {self.algebra.order} exceeds the supported maximum {MAX_TRUNCATION_ORDER}")

    @property
    def order(self) -> int:
        return self.algebra.order

    @property
    def total_dim(self) -> int:
        return self.algebra.total_dim

    @property
    def maximal_ideal_degrees(self) -> range:
        return range(1, self.order + 1)

    def columns(self, k: int) -> range:
        """Flat indices of Gr^k."""
        return range(self.algebra.offset(k), self.algebra.offset(k + 1))

    @cached_property
    def flat_products(self) -> Dict[Tuple[int, int], SparseVec]:
        """Products of flat basis elements of m, as sparse flat vectors."""
        a = self.algebra
        labels = a.degree_of_index
        out: Dict[Tuple[int, int], SparseVec] = {}
        for p in range(1, a.total_dim):
            j, ia = labels[p]
            for q in range(1, a.total_dim):
                k, ib = labels[q]
                if j + k > a.order:
                    continue
                base = a.offset(j + k)
                entries = tuple((base + idx, c) for idx, c in a.mult[(j, k)][ia][ib])
                if entries:
                    out[(p, q)] = entries
        return out


@dataclass(frozen=True)
class TensorElement:
    """degree is the dgla degree (0 for L^0 and for g)."""
    degree: int
    coeffs: Matrix

    @classmethod
    def zero(cls, degree: int, rows: int, ring: CoefficientRing) -> "TensorElement":
        return cls(degree, Matrix.zeros(rows, ring.total_dim))

    @classmethod
    def from_components(cls, degree: int, rows: int, ring: CoefficientRing,
                        components: Dict[int, Matrix]) -> "TensorElement":
        """Assemble from per-degree blocks of shape rows x dim Gr^k."""
        entries = [[ZERO] * ring.total_dim for _ in range(rows)]
        for k, block in components.items():
            if k < 1 or k > ring.order:
                raise ShapeMismatchError(f"component in m-degree {k} outside 1..{ring.order}")
            if block.shape != (rows, ring.algebra.dims[k]):
                raise ShapeMismatchError(f"component of degree {k} has shape {block.shape}")
            start = ring.algebra.offset(k)
            for r in range(rows):
                for c in range(block.cols):
                    entries[r][start + c] = block[r, c]
        return cls(degree, Matrix.from_rows(entries, cols=ring.total_dim))

    @property
    def rows(self) -> int:
        return self.coeffs.rows

    def component(self, ring: CoefficientRing, k: int) -> Matrix:
        return self.coeffs.submatrix(list(range(self.rows)), list(ring.columns(k)))

    def only_degree(self, ring: CoefficientRing, k: int) -> "TensorElement":
        return TensorElement.from_components(self.degree, self.rows, ring, {k: self.component(ring, k)})

    def __add__(self, other: "TensorElement") -> "TensorElement":
        return TensorElement(self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return TensorElement(self.degree, self.coeffs - other.coeffs)

    def __neg__(self) -> "TensorElement":
        return TensorElement(self.degree, -self.coeffs)

    def scale(self, c) -> "TensorElement":
        return TensorElement(self.degree, self.coeffs.scale(c))

    def is_zero(self) -> bool:
        return self.coeffs.is_zero()

    def lowest_degree(self, ring: CoefficientRing) -> Optional[int]:
        for k in ring.maximal_ideal_degrees:
            if not self.component(ring, k).is_zero():
                return k
        return None

    def to_json(self, ring: CoefficientRing) -> Dict:
        return {"degree": self.degree,
                "components": {str(k): self.component(ring, k).to_json()
                               for k in ring.maximal_ideal_degrees}}

    @classmethod
    def from_json(cls, data: Dict, rows: int, ring: CoefficientRing) -> "TensorElement":
        components = {int(k): Matrix.from_json(v, cols=ring.algebra.dims[int(k)]) if v else
                      Matrix.zeros(rows, ring.algebra.dims[int(k)])
                      for k, v in data.get("components", {}).items()}
        return cls.from_components(int(data.get("degree", 1)), rows, ring, components)


@dataclass(frozen=True)
class MCElement:
    """alpha in L^1 ⊗ m with an optional framing r in g ⊗ m."""
    value: TensorElement
    framing: Optional[TensorElement] = None

    def to_json(self, ring: CoefficientRing) -> Dict:
        data = {"value": self.value.to_json(ring)}
        if self.framing is not None:
            data["framing"] = self.framing.to_json(ring)
        return data


GaugeElement = TensorElement


def _check_element(ring: CoefficientRing, x: TensorElement, rows: int, what: str) -> None:
    if x.coeffs.shape != (rows, ring.total_dim):
        raise ShapeMismatchError(f"{what} has shape {x.coeffs.shape}, expected {(rows, ring.total_dim)}")
    if any(x.coeffs.column(0)):
        raise ShapeMismatchError(f"{what} has a component in m-degree 0")


# Operations on L ⊗ m

def _bilinear_columns(ring: CoefficientRing, x: Matrix, y: Matrix, rows_out: int,
                      pair: Callable[[Vector, Vector], Vector]) -> Matrix:
    columns = [[ZERO] * rows_out for _ in range(ring.total_dim)]
    xcols = [(p, x.column(p)) for p in range(1, ring.total_dim) if any(x.column(p))]
    ycols = [(q, y.column(q)) for q in range(1, ring.total_dim) if any(y.column(q))]
    products = ring.flat_products
    for p, u in xcols:
        for q, v in ycols:
            prod = products.get((p, q))
            if not prod:
                continue
            value = pair(u, v)
            if not any(value):
                continue
            for r, c in prod:
                col = columns[r]
                for idx, b in enumerate(value):
                    if b:
                        col[idx] = col[idx] + c * b
    return Matrix.from_columns(columns, rows=rows_out)


def bracket_tensor(l: Dgla, ring: CoefficientRing, x: TensorElement, y: TensorElement) -> TensorElement:
    """[u ⊗ a, v ⊗ b] = [u, v] ⊗ ab."""
    rows = l.dim(x.degree + y.degree)
    coeffs = _bilinear_columns(ring, x.coeffs, y.coeffs, rows,
                               lambda u, v: l.bracket_vectors(x.degree, u, y.degree, v))
    return TensorElement(x.degree + y.degree, coeffs)


def d_tensor(l: Dgla, x: TensorElement) -> TensorElement:
    return TensorElement(x.degree + 1, l.d_from(x.degree) @ x.coeffs)


def delta_tensor(l: Dgla, s: Splitting, x: TensorElement) -> TensorElement:
    return TensorElement(x.degree - 1, s.from_degree(x.degree, l) @ x.coeffs)


def g_bracket_tensor(aug: Augmentation, ring: CoefficientRing,
                     x: TensorElement, y: TensorElement) -> TensorElement:
    return TensorElement(0, _bilinear_columns(ring, x.coeffs, y.coeffs, aug.g_dim, aug.bracket))


def eps_tensor(aug: Augmentation, lam: TensorElement) -> TensorElement:
    return TensorElement(0, aug.eps @ lam.coeffs)


def apply_ring_map(x: TensorElement, phi: RingMorphism) -> TensorElement:
    """(id ⊗ phi)(x) for a local algebra map phi."""
    images = Matrix.from_columns(phi.basis_images, rows=phi.target.total_dim)
    return TensorElement(x.degree, x.coeffs @ images.transpose())


def tautological_element(l: Dgla, ring: CoefficientRing, basis: Sequence[Vector]) -> TensorElement:
    """h = Σ η_i ⊗ t_i over the degree-one generators of the ring."""
    if len(basis) != ring.algebra.dims[1]:
        raise ShapeMismatchError(f"{len(basis)} cohomology vectors for {ring.algebra.dims[1]} generators")
    block = Matrix.from_columns(basis, rows=l.dims[1]) if basis else Matrix.zeros(l.dims[1], 0)
    return TensorElement.from_components(1, l.dims[1], ring, {1: block})


def bch(bracket: Callable[[TensorElement, TensorElement], TensorElement],
        x: TensorElement, y: TensorElement, order: int) -> TensorElement:
    """
    log(e^x e^y) in a Lie algebra nilpotent of the given order, through
    brackets of length four.

    Raises:
        TruncationOrderError: order above BCH_MAX_ORDER
    """
    if order > BCH_MAX_ORDER:
        raise TruncationOrderError(f"BCH is available through order {BCH_MAX_ORDER}, not {order}")
    xy = bracket(x, y)
    z = x + y + xy.scale(HALF)
    if order >= 3:
        x_xy = bracket(x, xy)
        y_xy = bracket(y, xy)
        z = z + x_xy.scale(Fraction(1, 12)) - y_xy.scale(Fraction(1, 12))
        if order >= 4:
            z = z - bracket(y, x_xy).scale(Fraction(1, 24))
    return z


def bch_gauge(l: Dgla, ring: CoefficientRing, x: TensorElement, y: TensorElement) -> TensorElement:
    """Composition in exp(L^0 ⊗ m): e^x e^y = e^bch(x, y)."""
    return bch(lambda a, b: bracket_tensor(l, ring, a, b), x, y, ring.order)


def exp_ad(l: Dgla, ring: CoefficientRing, lam: TensorElement, y: TensorElement) -> TensorElement:
    """e^(ad λ) y as a finite sum."""
    result = y
    term = y
    k = 0
    while True:
        term = bracket_tensor(l, ring, lam, term)
        if term.is_zero():
            return result
        k += 1
        result = result + term.scale(Fraction(1, factorial(k)))


def mc_defect(l: Dgla, ring: CoefficientRing, x: MCElement) -> TensorElement:
    """dα + ½[α, α] in L^2 ⊗ m."""
    _check_element(ring, x.value, l.dims[1], "MC element")
    alpha = x.value
    return d_tensor(l, alpha) + bracket_tensor(l, ring, alpha, alpha).scale(HALF)


def gauge_act(l: Dgla, ring: CoefficientRing, lam: TensorElement, x: MCElement,
              aug: Optional[Augmentation] = None) -> MCElement:
    """
    e^λ · α = α + Σ_(k>=0) ad_λ^k / (k+1)! ([λ, α] - dλ); a framing r
    becomes bch(ε(λ), r).
    """
    _check_element(ring, lam, l.dims[0], "gauge element")
    _check_element(ring, x.value, l.dims[1], "MC element")
    alpha = x.value
    term = bracket_tensor(l, ring, lam, alpha) - d_tensor(l, lam)
    result = alpha
    k = 0
    while not term.is_zero():
        k += 1
        result = result + term.scale(Fraction(1, factorial(k)))
        term = bracket_tensor(l, ring, lam, term)
    framing = None
    if x.framing is not None:
        if aug is None:
            raise InputValidationError("a framed MC element needs the augmentation", pointer="/augmentation")
        framing = bch(lambda a, b: g_bracket_tensor(aug, ring, a, b), eps_tensor(aug, lam), x.framing, ring.order)
    return MCElement(result, framing)


def _is_gauge_fixed(l: Dgla, s: Splitting, x: MCElement) -> bool:
    if not delta_tensor(l, s, x.value).is_zero():
        return False
    if x.framing is not None and not (s.delta_g @ x.framing.coeffs).is_zero():
        return False
    return True


@log_function_calls(logger)
def gauge_fix(l: Dgla, ring: CoefficientRing, s: Splitting, x: MCElement,
              aug: Optional[Augmentation] = None) -> Tuple[MCElement, TensorElement]:
    """
    The gauge-equivalent element with δ(ζ) = 0 (and δ_g(z) = 0 when framed).

    Degree by degree the step λ_k = δ(ζ_k) - δ_g(z_k + ε δ(ζ_k)) kills the
    m-degree k parts of δ(ζ) and δ_g(z) without touching lower degrees.

    Returns:
        (fixed element, λ) with e^λ · x = fixed

    Raises:
        SplittingViolationError: the iteration does not settle
    """
    framed = x.framing is not None
    if framed and (aug is None or s.delta_g is None):
        raise InputValidationError("framed gauge fixing needs an augmentation and delta_g",
                                   pointer="/splitting/delta_g")
    current = x
    trans = TensorElement.zero(0, l.dims[0], ring)
    for sweep in range(GAUGE_FIX_EXTRA_STEPS + 1):
        for k in ring.maximal_ideal_degrees:
            zeta_k = current.value.only_degree(ring, k)
            lam = delta_tensor(l, s, zeta_k)
            if framed:
                z_k = current.framing.only_degree(ring, k) + eps_tensor(aug, lam)
                lam = lam - TensorElement(0, s.delta_g @ z_k.coeffs)
            if lam.is_zero():
                continue
            current = gauge_act(l, ring, lam, current, aug)
            trans = bch_gauge(l, ring, lam, trans)
        if _is_gauge_fixed(l, s, current):
            logger.debug(f"Gauge fixed after {sweep + 1} sweep(s)", extra={'action': 'gauge_fix', 'order': ring.order})
            return current, trans
    raise SplittingViolationError("gauge fixing did not settle; the splitting axioms fail",
                                  {"residual": delta_tensor(l, s, current.value).to_json(ring)})


def augmentation_splitting(l: Dgla, aug: Augmentation, s: Splitting,
                           transversal: Optional[Sequence[Sequence[Scalar]]] = None,
                           pairing: Optional[Matrix] = None) -> Tuple[Splitting, Subspace]:
    """
    δ_g: g -> H^0 from g = ε(H^0) ⊕ t, where t is the supplied transversal
    or the orthogonal complement of ε(H^0) under a hermitian pairing
    (identity by default).

    Raises:
        AugmentationNotInjectiveError: ε is not injective on H^0
        SplittingViolationError: the transversal is not a complement
    """
    g = aug.g_dim
    h0 = kernel_basis(l.d_from(0)).vectors()
    image = [aug.eps.apply(v) for v in h0]
    if Subspace.span(g, image).dim != len(h0):
        raise AugmentationNotInjectiveError("eps is not injective on H^0", {"h0_dim": len(h0)})
    if transversal is not None:
        t = Subspace.span(g, transversal)
    else:
        form = pairing if pairing is not None else Matrix.identity(g)
        if not form.is_hermitian():
            raise InputValidationError("transversal pairing is not hermitian", pointer="/pairing")
        rows = [tuple(c.conj() for c in form.transpose().apply(x)) for x in image]
        t = kernel_basis(Matrix.from_rows(rows, cols=g)) if rows else Subspace.full(g)
    if t.dim + len(h0) != g or Subspace.span(g, image + t.vectors()).dim != g:
        raise SplittingViolationError("transversal is not a complement of eps(H^0)",
                                      {"transversal_dim": t.dim, "h0_dim": len(h0), "g_dim": g})
    if g == 0:
        delta_g = Matrix.zeros(l.dims[0], 0)
    else:
        change = Matrix.from_columns(image + t.vectors(), rows=g).inverse()
        h0_coords = change.submatrix(list(range(len(h0))), list(range(g)))
        h0_mat = Matrix.from_columns(h0, rows=l.dims[0]) if h0 else Matrix.zeros(l.dims[0], 0)
        delta_g = h0_mat @ h0_coords
    return Splitting(s.delta, delta_g), t


# Kuranishi construction

@dataclass(frozen=True, eq=False)
class KuranishiResult:
    """Hull ring, its presentation as a quotient of Sym(H^1*) and the universal MC element."""
    free: GradedArtinAlgebra
    ring: GradedArtinAlgebra
    ideal: IdealData
    generators: Dict[int, Tuple[Vector, ...]]
    universal: MCElement
    cohomology: DglaCohomology
    obstruction: QuadraticMap
    splitting: Splitting
    grading_report: Optional[CheckReport] = None

    def to_json(self) -> Dict:
        data = {
            "ring": self.ring.to_json(),
            "free_dims": list(self.free.dims),
            "ideal": self.ideal.to_json(),
            "generators": {str(k): [[str(c) for c in v] for v in vs] for k, vs in sorted(self.generators.items())},
            "universal": self.universal.to_json(CoefficientRing(self.ring)),
            "cohomology": self.cohomology.to_json(),
            "obstruction": self.obstruction.to_json(),
        }
        if self.grading_report is not None:
            data["grading"] = self.grading_report.to_dict()
        return data


def _project_rows(m: Matrix, qmap, target: GradedArtinAlgebra) -> Matrix:
    return Matrix.from_rows([qmap.project(r) for r in m.row_vectors()], cols=target.total_dim)


def _lift_block(block: Matrix, free: GradedArtinAlgebra, k: int, kept: Sequence[int]) -> Matrix:
    """Place a block over the quotient basis of Gr^k at the kept columns of the free algebra."""
    rows = [[ZERO] * free.total_dim for _ in range(block.rows)]
    start = free.offset(k)
    for r in range(block.rows):
        for pos, idx in enumerate(kept):
            rows[r][start + idx] = block[r, pos]
    return Matrix.from_rows(rows, cols=free.total_dim)


def _grading_report(l: Dgla, s: Splitting, coh: DglaCohomology,
                    free: GradedArtinAlgebra, ideal: IdealData) -> CheckReport:
    report = CheckReport("kuranishi_grading")
    if not splitting_shifts_weight(l, s):
        report.fail("delta lowers the total Hodge weight by one")
    if coh.harmonic_types is None or coh.harmonic_types[1] is None:
        report.fail("harmonic H^1 basis is type-pure")
    for d, piece in sorted(ideal.generators_by_degree.items()):
        if not piece.dim:
            continue
        types = free.types[d]
        if graded_basis(piece, list(types)) is None:
            report.fail("obstruction ideal is bigraded", {"degree": d})
        if graded_basis(piece, [p + q for p, q in types]) is None:
            report.fail("obstruction ideal is weight-homogeneous", {"degree": d})
    report.details["generator_types"] = [list(t) for t in free.types[1]] if free.order >= 1 else []
    return report


@log_function_calls(logger)
def kuranishi(l: Dgla, s: Splitting, aug: Optional[Augmentation] = None, n: int = 2,
              respect_grading: bool = False) -> KuranishiResult:
    """
    Universal gauge-fixed MC element over the hull Sym(H^1*)/J truncated at n.

    ζ solves ζ = h - ½ δ[ζ, ζ] degree by degree; the m-degree k part of
    P^2([ζ, ζ])/2 contributes one generator of J per harmonic H^2 basis
    vector. The MC defect of the result is verified, not assumed.

    Raises:
        TruncationOrderError: n outside 0..MAX_TRUNCATION_ORDER
        SplittingViolationError: the splitting axioms fail
        AugmentationNotInjectiveError: ε is not injective on H^0
        ModelInconsistencyError: the universal element has a nonzero defect
    """
    if not 0 <= n <= MAX_TRUNCATION_ORDER:
        raise TruncationOrderError(f"truncation order {n} outside 0..{MAX_TRUNCATION_ORDER}")
    split_report = check_splitting(l, s)
    if not split_report.passed:
        raise SplittingViolationError("splitting axioms fail", [v.to_dict() for v in split_report.violations])
    if aug is not None:
        aug_report = check_augmentation(l, aug)
        if not aug_report.details.get("injective_on_h0"):
            raise AugmentationNotInjectiveError("eps is not injective on H^0", aug_report.to_dict())
    if respect_grading and l.types is None:
        raise TypeCompatibilityError("respect_grading needs Hodge types on the dgla")

    coh = cohomology(l, s, pure_types=respect_grading)
    h1 = coh.basis(1)
    gen_types = None
    if respect_grading:
        gen_types = [(-p, -q) for p, q in coh.harmonic_types[1]]
    free = sym_truncated(len(h1), n, gen_types)
    free_ring = CoefficientRing(free)
    has_h2 = l.max_degree >= 2 and coh.dims[2] > 0
    p2 = harmonic_projector(l, s, 2) if has_h2 else None
    delta2 = s.from_degree(2, l)

    zeta = tautological_element(l, free_ring, h1).coeffs if n >= 1 else Matrix.zeros(l.dims[1], free.total_dim)
    gens: Dict[int, List[Vector]] = {}
    for k in range(2, n + 1):
        ring_k, _, qmap = quotient_by_ideal(free, gens)
        cring = CoefficientRing(ring_k)
        z = TensorElement(1, _project_rows(zeta, qmap, ring_k))
        br_k = bracket_tensor(l, cring, z, z).component(cring, k)
        kept = qmap.kept[k]
        if has_h2:
            coords = []
            for col in br_k.column_vectors():
                c = coh.harmonic[2].coordinates(p2.apply(col))
                if c is None:
                    raise ModelInconsistencyError("harmonic projection leaves the harmonic space", {"degree": k})
                coords.append(c)
            new = []
            for c in range(coh.dims[2]):
                quotient_vec = [HALF * col[c] for col in coords]
                if not any(quotient_vec):
                    continue
                lifted = [ZERO] * free.dims[k]
                for pos, idx in enumerate(kept):
                    lifted[idx] = quotient_vec[pos]
                new.append(tuple(lifted))
            if new:
                gens[k] = new
        if br_k.rows and delta2.cols:
            step = (delta2 @ br_k).scale(-HALF)
            zeta = zeta + _lift_block(step, free, k, kept)
        logger.debug(f"Kuranishi step {k}: {len(gens.get(k, []))} generator(s)",
                     extra={'action': 'kuranishi_step', 'order': k})

    ring, ideal, qmap = quotient_by_ideal(free, gens)
    target = CoefficientRing(ring)
    universal = MCElement(TensorElement(1, _project_rows(zeta, qmap, ring)))
    defect = mc_defect(l, target, universal)
    if not defect.is_zero():
        raise ModelInconsistencyError("universal element has a nonzero MC defect", defect.to_json(target))
    grading = _grading_report(l, s, coh, free, ideal) if respect_grading else None
    if grading is not None:
        log_check_event(logger, "kuranishi grading", grading.passed, action="kuranishi", order=n)
    logger.info(f"Kuranishi ring dims {ring.dims}", extra={'action': 'kuranishi', 'order': n})
    return KuranishiResult(free, ring, ideal, {k: tuple(v) for k, v in gens.items()}, universal,
                           coh, bracket_on_cohomology(l, coh), s, grading)


def ideal_generated_in_degree_two(result: KuranishiResult) -> bool:
    """True when the degree-two generators alone saturate to the whole obstruction ideal."""
    quadratic = saturate_ideal(result.free, {2: list(result.generators.get(2, ()))})
    return all(quadratic.in_degree(d, result.free).equals(result.ideal.in_degree(d, result.free))
               for d in range(result.free.order + 1))


# Product decomposition attached to a transversal

@dataclass(frozen=True, eq=False)
class GMProduct:
    """S1 ⊗ S2 with S1 free on the transversal and S2 the Kuranishi ring."""
    algebra: GradedArtinAlgebra
    s1: GradedArtinAlgebra
    kuranishi: KuranishiResult
    transversal: Subspace
    splitting: Splitting
    ideal_j: IdealData
    ideal_q: IdealData
    universal: MCElement

    def j_filtration(self) -> List[Subspace]:
        """W_{-k} = image of j^k, k = 0..order+1."""
        a = self.algebra
        steps = []
        for k in range(a.order + 2):
            vecs = [unit_vector(a.total_dim, a.flat_index(d, idx))
                    for d in range(a.order + 1)
                    for idx, (i, _, _) in enumerate(a.factor_labels[d]) if d - i >= k]
            steps.append(Subspace.span(a.total_dim, vecs))
        return steps

    def to_json(self) -> Dict:
        ring = CoefficientRing(self.algebra)
        return {
            "algebra": self.algebra.to_json(),
            "s1_dims": list(self.s1.dims),
            "s2_dims": list(self.kuranishi.ring.dims),
            "transversal": self.transversal.to_json(),
            "ideal_j": self.ideal_j.to_json(),
            "ideal_q": self.ideal_q.to_json(),
            "j_filtration_dims": [w.dim for w in self.j_filtration()],
            "universal": self.universal.to_json(ring),
        }


@log_function_calls(logger)
def preferred_gm_product(l: Dgla, aug: Augmentation, s: Splitting, n: int,
                         transversal: Optional[Sequence[Sequence[Scalar]]] = None,
                         pairing: Optional[Matrix] = None,
                         respect_grading: bool = False) -> GMProduct:
    """
    The local ring of the framed deformation functor as S1 ⊗ S2 together
    with the images of j = S1 ⊗ m2 and q = m1 ⊗ S2.

    The universal framed element is (ζ, e^z) with ζ from the Kuranishi
    ring and z = Σ τ_j ⊗ s_j over the transversal basis τ_j.
    """
    full_split, t = augmentation_splitting(l, aug, s, transversal, pairing)
    kur = kuranishi(l, full_split, aug, n, respect_grading)
    s1_types = [(0, 0)] * t.dim if kur.ring.types is not None else None
    s1 = sym_truncated(t.dim, n, s1_types)
    product = tensor(s1, kur.ring, n)
    ideal_j = tensor_factor_ideal(product, second_factor=True)
    ideal_q = tensor_factor_ideal(product, second_factor=False)

    ring2 = CoefficientRing(kur.ring)
    zeta = [[ZERO] * product.total_dim for _ in range(l.dims[1])]
    for d in ring2.maximal_ideal_degrees:
        index = {lab: pos for pos, lab in enumerate(product.factor_labels[d])}
        block = kur.universal.value.component(ring2, d)
        for ib in range(kur.ring.dims[d]):
            col = product.flat_index(d, index[(0, 0, ib)])
            for r in range(l.dims[1]):
                zeta[r][col] = block[r, ib]
    framing = [[ZERO] * product.total_dim for _ in range(aug.g_dim)]
    if n >= 1:
        index1 = {lab: pos for pos, lab in enumerate(product.factor_labels[1])}
        for j, tau in enumerate(t.vectors()):
            col = product.flat_index(1, index1[(1, j, 0)])
            for r in range(aug.g_dim):
                framing[r][col] = tau[r]
    universal = MCElement(TensorElement(1, Matrix.from_rows(zeta, cols=product.total_dim)),
                          TensorElement(0, Matrix.from_rows(framing, cols=product.total_dim)))
    logger.info(f"GM product dims {product.dims} (S1 on {t.dim} generators)",
                extra={'action': 'preferred_gm_product', 'order': n})
    return GMProduct(product, s1, kur, t, full_split, ideal_j, ideal_q, universal)


# Order-two brute force

@dataclass(frozen=True, eq=False)
class BruteForceClasses:
    """
    Iso classes of DGM(L, ε; A) for m^3 = 0, described by the order-two
    solvability quadrics on Z^1 ⊗ Gr^1 and linear parameter counts.
    """
    algebra: GradedArtinAlgebra
    cocycles: Subspace
    variables: int
    quadrics: Subspace
    tangent_params: int
    second_order_params: int
    framed_tangent_params: Optional[int]
    framed_second_order_params: Optional[int]
    stabilizer_dim: int

    def to_json(self) -> Dict:
        return {
            "algebra_dims": list(self.algebra.dims),
            "variables": self.variables,
            "quadric_rank": self.quadrics.dim,
            "tangent_params": self.tangent_params,
            "second_order_params": self.second_order_params,
            "framed_tangent_params": self.framed_tangent_params,
            "framed_second_order_params": self.framed_second_order_params,
            "stabilizer_dim": self.stabilizer_dim,
        }


def _quadric(variables: int, index: Dict[Tuple[int, int], int],
             bilinear: Callable[[int, int], Scalar]) -> Vector:
    """Coefficients on w_p w_q (p <= q) of Σ B(p, q) w_p w_q."""
    out = [ZERO] * len(index)
    for p in range(variables):
        for q in range(p, variables):
            c = bilinear(p, q) if p == q else bilinear(p, q) + bilinear(q, p)
            if c:
                out[index[(p, q)]] = c
    return tuple(out)


def _linear_counts(l: Dgla, aug: Optional[Augmentation], g_k: int) -> Tuple[int, int, Optional[int], int]:
    ident = Matrix.identity(g_k)
    d0 = l.d_from(0).kron(ident)
    d1 = l.d_from(1).kron(ident)
    cocycles = kernel_basis(d1).dim
    boundaries = rank(d0)
    stabilizer = l.dims[0] * g_k - boundaries
    framed = None
    if aug is not None:
        stacked = l.d_from(0).vstack(aug.eps).kron(ident)
        framed = cocycles + aug.g_dim * g_k - rank(stacked)
    return cocycles, boundaries, framed, stabilizer


@log_function_calls(logger)
def brute_force_iso_classes(l: Dgla, aug: Optional[Augmentation], a: GradedArtinAlgebra) -> BruteForceClasses:
    """
    Direct description of MC elements modulo gauge over A with m^3 = 0.

    Degree one: α_1 ∈ Z^1 ⊗ Gr^1 modulo B^1 ⊗ Gr^1. Degree two: α_2 exists
    iff ½[α_1, α_1] is exact in L^2 ⊗ Gr^2, a quadric per (H^2, Gr^2)
    basis pair in the coordinates of α_1; the free part is Z^1 ⊗ Gr^2
    modulo B^1 ⊗ Gr^2.

    Raises:
        TruncationOrderError: A has order above BRUTE_FORCE_MAX_ORDER
    """
    if a.order > BRUTE_FORCE_MAX_ORDER:
        raise TruncationOrderError(f"brute force supports m^3 = 0 only, got order {a.order}")
    z1 = kernel_basis(l.d_from(1))
    g1 = a.dims[1] if a.order >= 1 else 0
    g2 = a.dims[2] if a.order >= 2 else 0
    z_1, b_1, framed_1, stab_1 = _linear_counts(l, aug, g1)
    z_2, b_2, framed_2, stab_2 = _linear_counts(l, aug, g2)
    variables = z1.dim * g1
    index = sym2_index(variables) if variables else {}
    quadrics: List[Vector] = []
    if g2 and l.max_degree >= 2 and variables:
        coh = cohomology(l)
        zv = z1.vectors()
        classes: Dict[Tuple[int, int], Vector] = {}
        for i in range(len(zv)):
            for j in range(i, len(zv)):
                cls = coh.class_coordinates(2, l.bracket_vectors(1, zv[i], 1, zv[j]))
                if cls is None:
                    raise ModelInconsistencyError("bracket of cocycles is not closed", {"pair": [i, j]})
                classes[(i, j)] = cls
        products = a.mult[(1, 1)]
        for c in range(coh.dims[2]):
            for gi in range(g2):
                def bilinear(p: int, q: int, c=c, gi=gi) -> Scalar:
                    zi, ea = divmod(p, g1)
                    zj, eb = divmod(q, g1)
                    coeff = next((v for idx, v in products[ea][eb] if idx == gi), ZERO)
                    if not coeff:
                        return ZERO
                    return HALF * classes[(min(zi, zj), max(zi, zj))][c] * coeff
                quadrics.append(_quadric(variables, index, bilinear))
    result = BruteForceClasses(
        a, z1, variables, Subspace.span(len(index), quadrics),
        z_1 - b_1, z_2 - b_2,
        framed_1, framed_2,
        stab_1 + stab_2,
    )
    logger.info(f"Brute-force classes over dims {a.dims}: quadric rank {result.quadrics.dim}",
                extra={'action': 'brute_force', 'order': a.order})
    return result


def functor_points_match(kur: KuranishiResult, brute: BruteForceClasses,
                         product: Optional[GMProduct] = None) -> CheckReport:
    """
    Compare Hom(R, A) with the brute-force classes over the same A: equal
    quadric spans after pulling the degree-two part of J back to Z^1 ⊗ Gr^1,
    and equal linear parameter counts.
    """
    report = CheckReport("functor_points")
    a = brute.algebra
    g1 = a.dims[1] if a.order >= 1 else 0
    g2 = a.dims[2] if a.order >= 2 else 0
    h1 = kur.ring.dims[1] if kur.ring.order >= 1 else 0
    if kur.free.order < a.order:
        report.fail("Kuranishi truncation covers the test algebra",
                    {"kuranishi_order": kur.free.order, "algebra_order": a.order})
        return report
    if brute.tangent_params != h1 * g1:
        report.fail("tangent parameters agree", {"brute": brute.tangent_params, "kuranishi": h1 * g1})
    if brute.second_order_params != h1 * g2:
        report.fail("second-order parameters agree", {"brute": brute.second_order_params, "kuranishi": h1 * g2})
    if product is not None:
        p1 = product.algebra.dims[1] if product.algebra.order >= 1 else 0
        if brute.framed_tangent_params != p1 * g1:
            report.fail("framed tangent parameters agree",
                        {"brute": brute.framed_tangent_params, "product": p1 * g1})
        if brute.framed_second_order_params != p1 * g2:
            report.fail("framed second-order parameters agree",
                        {"brute": brute.framed_second_order_params, "product": p1 * g2})

    if g2 and brute.variables:
        zv = brute.cocycles.vectors()
        class_map = [kur.cohomology.class_coordinates(1, z) for z in zv]
        index = sym2_index(brute.variables)
        products = a.mult[(1, 1)]
        pulled: List[Vector] = []
        j2 = kur.ideal.in_degree(2, kur.free).vectors() if kur.free.order >= 2 else []
        monomials = kur.free.monomials[2] if kur.free.order >= 2 else ()
        pairs = []
        for exps in monomials:
            support = [k for k, e in enumerate(exps) for _ in range(e)]
            pairs.append((support[0], support[1]))
        for q in j2:
            sym: Dict[Tuple[int, int], Scalar] = {}
            for pos, (i, j) in enumerate(pairs):
                if not q[pos]:
                    continue
                if i == j:
                    sym[(i, i)] = sym.get((i, i), ZERO) + q[pos]
                else:
                    sym[(i, j)] = sym.get((i, j), ZERO) + HALF * q[pos]
                    sym[(j, i)] = sym.get((j, i), ZERO) + HALF * q[pos]
            for gi in range(g2):
                def bilinear(p: int, r: int, sym=sym, gi=gi) -> Scalar:
                    zi, ea = divmod(p, g1)
                    zj, eb = divmod(r, g1)
                    coeff = next((v for idx, v in products[ea][eb] if idx == gi), ZERO)
                    if not coeff:
                        return ZERO
                    total = ZERO
                    for (i, j), c in sym.items():
                        total = total + c * class_map[zi][i] * class_map[zj][j]
                    return total * coeff
                pulled.append(_quadric(brute.variables, index, bilinear))
        pulled_span = Subspace.span(len(index), pulled)
        report.details["quadric_rank"] = {"kuranishi": pulled_span.dim, "brute": brute.quadrics.dim}
        if not pulled_span.equals(brute.quadrics):
            report.fail("order-two quadrics span the same space",
                        {"kuranishi": pulled_span.dim, "brute": brute.quadrics.dim})
    log_check_event(logger, "functor of points", report.passed, action="functor_points_match", order=a.order)
    return report


# Ambiguity group

@log_function_calls(logger)
def ambiguity_act(l: Dgla, kur: KuranishiResult, h: TensorElement,
                  aug: Optional[Augmentation] = None) -> RingMorphism:
    """
    Substitution on the hull induced by exp(h), h ∈ H^0 ⊗ m^2: move the
    universal element by e^h, gauge fix again and read off the generator
    images from the harmonic part. The result is the identity on Gr^1.

    Raises:
        InputValidationError: h is not in H^0 ⊗ m^2
        ModelInconsistencyError: the induced substitution does not carry
            the universal element to the re-fixed one
    """
    ring = CoefficientRing(kur.ring)
    _check_element(ring, h, l.dims[0], "ambiguity parameter")
    if ring.order >= 1 and not h.component(ring, 1).is_zero():
        raise InputValidationError("ambiguity parameter must lie in H^0 ⊗ m^2", pointer="/h")
    if not d_tensor(l, h).is_zero():
        raise InputValidationError("ambiguity parameter is not d-closed", pointer="/h")
    if aug is not None:
        aug_report = check_augmentation(l, aug)
        if not aug_report.details.get("injective_on_h0"):
            raise AugmentationNotInjectiveError("eps is not injective on H^0", aug_report.to_dict())
    moved = gauge_act(l, ring, h, kur.universal)
    fixed, _ = gauge_fix(l, ring, kur.splitting, moved)
    p1 = harmonic_projector(l, kur.splitting, 1)
    harmonic = kur.cohomology.harmonic[1]
    images = [[ZERO] * ring.total_dim for _ in range(harmonic.dim)]
    for col in range(1, ring.total_dim):
        v = fixed.value.coeffs.column(col)
        if not any(v):
            continue
        coords = harmonic.coordinates(p1.apply(v))
        if coords is None:
            raise ModelInconsistencyError("harmonic projection leaves the harmonic space", {"column": col})
        for i, c in enumerate(coords):
            images[i][col] = c
    phi = RingMorphism(kur.ring, kur.ring, tuple(tuple(img) for img in images))
    if apply_ring_map(kur.universal.value, phi) != fixed.value:
        raise ModelInconsistencyError("substitution does not reproduce the re-fixed universal element")
    logger.info(f"Ambiguity substitution is {'the identity' if phi.is_identity() else 'nontrivial'}",
                extra={'action': 'ambiguity_act', 'order': ring.order})
    return phi
