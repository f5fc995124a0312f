"""
Connections and Variations of Mixed Hodge Structure

Works on a bigraded dgla E with D = D' + D'' satisfying the D'D''-lemma.
Builds the universal connection series α_k over the quadratic cone ring
by solving D'D''γ_k = β_k degree by degree, its D''-exact mirror α^v_k,
checks flatness and Hodge types, finds a gauge transformation and ring
automorphism comparing the two series, and checks the mixed Hodge
structure on the fiber V ⊗ ring after twisting the split filtrations.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from app.config import GAUGE_SIGN_CANDIDATES
from app.services.deformation import (
    HALF, CoefficientRing, GaugeElement, KuranishiResult, MCElement, TensorElement, apply_ring_map,
    bracket_tensor, d_tensor, gauge_act, ideal_generated_in_degree_two, kuranishi, mc_defect,
    tautological_element,
)
from app.services.dgla_core import Dgla, Splitting, check_ddbar, validate
from app.services.exact_linalg import Matrix, Scalar, solve_columns, unit_vector
from app.services.graded_artin import HodgeType, RingMorphism, multiply
from app.services.hodge_mhs import TripleFiltered, check_mhs, twist_precondition
from app.utils.check_report import CheckReport
from app.utils.errors import (
    DdbarViolationError, ModelInconsistencyError, ObstructionError, ShapeMismatchError,
    TypeCompatibilityError,
)
from app.utils.logging.component_loggers import get_mc_logger, log_check_event, log_function_calls

logger = get_mc_logger(__name__)

PRIMED = "primed"
VARIANT_V = "v"


@dataclass(frozen=True, eq=False)
class FormalityModel:
    """
    A ddbar dgla with its Kuranishi ring and a fiber V on which E^0 acts
    through matrices (one per basis vector of E^0).
    """
    e: Dgla
    splitting: Splitting
    fiber_types: Tuple[HodgeType, ...]
    action: Tuple[Matrix, ...]
    kuranishi: KuranishiResult
    ring: CoefficientRing

    @property
    def fiber_dim(self) -> int:
        return len(self.fiber_types)

    @property
    def order(self) -> int:
        return self.ring.order

    def to_json(self) -> Dict:
        return {
            "order": self.order,
            "fiber_types": [list(t) for t in self.fiber_types],
            "action": [m.to_json() for m in self.action],
            "ring": self.kuranishi.ring.to_json(),
        }


@dataclass(frozen=True, eq=False)
class ConnectionSeries:
    """α_1..α_n with α_k in E^1 ⊗ Π_k; gammas[k] solves D'D''γ_k = β_k."""
    variant: str
    alphas: Tuple[TensorElement, ...]
    gammas: Dict[int, TensorElement]

    def total(self, upto: Optional[int] = None) -> TensorElement:
        chosen = self.alphas if upto is None else self.alphas[:upto]
        acc = chosen[0]
        for a in chosen[1:]:
            acc = acc + a
        return acc

    def alpha(self, k: int) -> TensorElement:
        return self.alphas[k - 1]

    def to_json(self, ring: CoefficientRing) -> Dict:
        return {
            "variant": self.variant,
            "alphas": {str(k + 1): a.component(ring, k + 1).to_json() for k, a in enumerate(self.alphas)},
            "gammas": {str(k): g.component(ring, k).to_json() for k, g in sorted(self.gammas.items())},
        }


def _d1_tensor(e: Dgla, x: TensorElement) -> TensorElement:
    return TensorElement(x.degree + 1, e.d1_from(x.degree) @ x.coeffs)


def _d2_tensor(e: Dgla, x: TensorElement) -> TensorElement:
    return TensorElement(x.degree + 1, e.d2_from(x.degree) @ x.coeffs)


def check_fiber_action(e: Dgla, fiber_types: Sequence[HodgeType], action: Sequence[Matrix]) -> CheckReport:
    """E^0 -> End(V) is a Lie map and adds Hodge types."""
    report = CheckReport("fiber_action")
    n = len(fiber_types)
    if len(action) != e.dims[0]:
        report.fail("one matrix per basis vector of E^0", {"matrices": len(action), "dim": e.dims[0]})
        return report
    for a, m in enumerate(action):
        if m.shape != (n, n):
            report.fail("action matrices act on the fiber", {"basis": a, "shape": list(m.shape)})
    if not report.passed:
        return report
    for a in range(e.dims[0]):
        for b in range(e.dims[0]):
            lhs = Matrix.zeros(n, n)
            for idx, c in e.basis_bracket(0, a, 0, b):
                lhs = lhs + action[idx].scale(c)
            rhs = action[a] @ action[b] - action[b] @ action[a]
            if lhs != rhs:
                report.fail("action preserves brackets", {"x": a, "y": b})
    if e.types is not None:
        for a, m in enumerate(action):
            p, q = e.types[0][a]
            for i in range(n):
                for j in range(n):
                    if m[i, j] and tuple(fiber_types[i]) != (fiber_types[j][0] + p, fiber_types[j][1] + q):
                        report.fail("action adds types", {"basis": a, "row": i, "column": j})
    return report


@log_function_calls(logger)
def build_formality_model(e: Dgla, splitting: Splitting, fiber_types: Sequence[HodgeType],
                          action: Sequence[Matrix], n: int) -> FormalityModel:
    """
    Raises:
        DdbarViolationError: the D'D''-lemma fails
        ModelInconsistencyError: the dgla axioms or the fiber action fail
    """
    ddbar = check_ddbar(e)
    if not ddbar.passed:
        raise DdbarViolationError("D'D''-lemma fails", [v.to_dict() for v in ddbar.violations])
    if e.types is None:
        raise TypeCompatibilityError("formality models need a Hodge bigrading")
    axioms = validate(e)
    if not axioms.passed:
        raise ModelInconsistencyError("dgla axioms fail", [v.to_dict() for v in axioms.violations])
    fiber = check_fiber_action(e, fiber_types, action)
    if not fiber.passed:
        raise ModelInconsistencyError("fiber action is not a type-compatible Lie map",
                                      [v.to_dict() for v in fiber.violations])
    kur = kuranishi(e, splitting, n=n, respect_grading=True)
    if not ideal_generated_in_degree_two(kur):
        logger.warning("Kuranishi ideal needs generators above degree two",
                       extra={'action': 'build_formality_model', 'order': n})
    return FormalityModel(e, splitting, tuple(tuple(t) for t in fiber_types), tuple(action), kur,
                          CoefficientRing(kur.ring))


def alpha_one(m: FormalityModel) -> TensorElement:
    """
    α_1 = Σ η_i ⊗ t_i over the type-pure harmonic basis.

    Raises:
        TypeCompatibilityError: the harmonic basis is not type-pure
        ModelInconsistencyError: α_1 is not D'- and D''-closed
    """
    coh = m.kuranishi.cohomology
    if coh.harmonic_types is None or coh.harmonic_types[1] is None:
        raise TypeCompatibilityError("harmonic H^1 basis is not type-pure")
    alpha = tautological_element(m.e, m.ring, coh.basis(1))
    if not (_d1_tensor(m.e, alpha).is_zero() and _d2_tensor(m.e, alpha).is_zero()):
        raise ModelInconsistencyError("alpha_1 is not D'- and D''-closed")
    return alpha


def _solve_ddbar(m: FormalityModel, beta: Matrix, k: int) -> Matrix:
    """Canonical γ with D'D''γ = β, column by column."""
    e = m.e
    if e.max_degree < 2 or beta.is_zero():
        return Matrix.zeros(e.dims[0], beta.cols)
    ddbar = e.d1_from(1) @ e.d2_from(0)
    solutions = solve_columns(ddbar, beta.column_vectors())
    for j, sol in enumerate(solutions):
        if sol is None:
            raise DdbarViolationError(f"beta_{k} is not D'D''-exact", {"degree": k, "column": j})
    return Matrix.from_columns(solutions, rows=e.dims[0])


def _recursion(m: FormalityModel, n: int, variant: str) -> ConnectionSeries:
    e, ring = m.e, m.ring
    n = min(n, ring.order)
    alphas: List[TensorElement] = [alpha_one(m)] if n >= 1 else []
    gammas: Dict[int, TensorElement] = {}
    for k in range(2, n + 1):
        partial = alphas[0]
        for a in alphas[1:]:
            partial = partial + a
        bracket_k = bracket_tensor(e, ring, partial, partial).component(ring, k)
        beta = bracket_k if k == 2 else bracket_k.scale(HALF)
        gamma = TensorElement.from_components(0, e.dims[0], ring, {k: _solve_ddbar(m, beta, k)})
        gammas[k] = gamma
        if variant == PRIMED:
            step = _d1_tensor(e, gamma)
        else:
            step = -_d2_tensor(e, gamma)
        alphas.append(step.scale(HALF) if k == 2 else step)
        differential = _d1_tensor(e, alphas[-1]) if variant == VARIANT_V else d_tensor(e, alphas[-1])
        if not (differential.component(ring, k) + bracket_k.scale(HALF)).is_zero():
            raise ModelInconsistencyError(f"recursion identity fails in degree {k}", {"variant": variant, "degree": k})
        logger.debug(f"alpha_{k} ({variant}) computed", extra={'action': 'alpha_recursion', 'order': k})
    return ConnectionSeries(variant, tuple(alphas), gammas)


@log_function_calls(logger)
def alpha_recursion(m: FormalityModel, n: Optional[int] = None) -> ConnectionSeries:
    """
    D'-exact series: α_2 = ½ D'γ_2 with D'D''γ_2 = [α_1, α_1], and for
    k >= 3 α_k = D'γ_k with D'D''γ_k = ½ Σ_(i+j=k) [α_i, α_j]. Each step
    re-verifies D α_k + ½ Σ [α_i, α_j] = 0 in E^2 ⊗ Π_k.
    """
    return _recursion(m, m.order if n is None else n, PRIMED)


@log_function_calls(logger)
def alpha_v_recursion(m: FormalityModel, n: Optional[int] = None) -> ConnectionSeries:
    """D''-exact mirror: α^v_2 = -½ D''γ_2 and α^v_k = -D''γ_k, satisfying the D'-recursion."""
    return _recursion(m, m.order if n is None else n, VARIANT_V)


def flatness_check(m: FormalityModel, c: ConnectionSeries) -> CheckReport:
    """D(Σα) + ½[Σα, Σα] = 0; for the v-series also D'(Σα) + ½[Σα, Σα] = 0."""
    report = CheckReport(f"flatness_{c.variant}")
    if not c.alphas:
        return report
    total = c.total()
    defect = mc_defect(m.e, m.ring, MCElement(total))
    bad = [k for k in m.ring.maximal_ideal_degrees if not defect.component(m.ring, k).is_zero()]
    report.details["defect_degrees"] = bad
    if bad:
        report.fail("D A + ½[A, A] = 0", {"degrees": bad})
    if c.variant == VARIANT_V:
        shifted = _d1_tensor(m.e, total) + bracket_tensor(m.e, m.ring, total, total).scale(HALF)
        if not shifted.is_zero():
            report.fail("D' A + ½[A, A] = 0")
    log_check_event(logger, "connection flatness", report.passed, action="flatness_check", order=m.order)
    return report


def hodge_type_check(m: FormalityModel, c: ConnectionSeries) -> CheckReport:
    """
    Types of the components of each α_k in E^1 ⊗ Π_k. The primed series
    must be of type (0, 1-k), the v-series of type (1-k, 0); the minimal
    p (resp. q) over all components bounds how far A moves F (resp. G).
    """
    report = CheckReport(f"hodge_types_{c.variant}")
    e_types = m.e.types[1]
    ring_types = m.kuranishi.ring.types
    f_shifts, g_shifts = [], []
    for k, alpha in enumerate(c.alphas, start=1):
        block = alpha.component(m.ring, k)
        seen = set()
        for a in range(block.rows):
            for j in range(block.cols):
                if block[a, j]:
                    seen.add((e_types[a][0] + ring_types[k][j][0], e_types[a][1] + ring_types[k][j][1]))
        expected = (0, 1 - k) if c.variant == PRIMED else (1 - k, 0)
        entry = {"types": [list(t) for t in sorted(seen)], "expected": list(expected)}
        if seen:
            entry["F_shift"] = min(t[0] for t in seen)
            entry["G_shift"] = min(t[1] for t in seen)
            f_shifts.append(entry["F_shift"])
            g_shifts.append(entry["G_shift"])
        report.details[f"alpha_{k}"] = entry
        if seen - {expected}:
            report.fail(f"alpha_{k} is of type {expected}", entry)
    report.details["griffiths_transversal"] = all(s >= 0 for s in f_shifts)
    report.details["griffiths_antitransversal"] = all(s >= 0 for s in g_shifts)
    return report


@dataclass(frozen=True, eq=False)
class GaugeComparison:
    """e^g · (id ⊗ φ)(A') = A'' with g in E^0 ⊗ m^2 and φ the identity on m/m^2."""
    g: GaugeElement
    phi: RingMorphism
    method: str
    sign: Optional[str]
    report: CheckReport

    def to_json(self, ring: CoefficientRing) -> Dict:
        return {
            "g": self.g.to_json(ring),
            "phi": self.phi.to_json(),
            "method": self.method,
            "sign": self.sign,
            "report": self.report.to_dict(),
        }


def _conjugate(m: FormalityModel, lam: TensorElement, phi: RingMorphism, a_primed: TensorElement) -> TensorElement:
    return gauge_act(m.e, m.ring, lam, MCElement(apply_ring_map(a_primed, phi))).value


def _comparison_report(m: FormalityModel, lam: TensorElement, phi: RingMorphism,
                       a_primed: TensorElement, a_v: TensorElement) -> CheckReport:
    report = CheckReport("gauge_comparison")
    if _conjugate(m, lam, phi, a_primed).coeffs != a_v.coeffs:
        report.fail("D + A'' = g φ (D + A') φ^-1 g^-1")
    if m.order >= 1 and not lam.component(m.ring, 1).is_zero():
        report.fail("g lies in E^0 ⊗ m^2")
    if not phi.is_identity_on_gr1():
        report.fail("φ is the identity on m/m^2")
    multiplicative = phi.check_multiplicative()
    report.merge(multiplicative, prefix="phi")
    return report


def _solve_comparison(m: FormalityModel, a_primed: TensorElement, a_v: TensorElement
                      ) -> Tuple[TensorElement, RingMorphism]:
    """Order by order: -Dλ_k + Σ η_i ⊗ φ_k(t_i) equals the degree-k residual."""
    e, ring = m.e, m.ring
    alg = ring.algebra
    basis = m.kuranishi.cohomology.basis(1)
    lam = TensorElement.zero(0, e.dims[0], ring)
    images = [list(alg.generator(i)) for i in range(alg.dims[1])]
    harmonic = Matrix.from_columns(basis, rows=e.dims[1]) if basis else Matrix.zeros(e.dims[1], 0)
    system = (-e.d_from(0)).hstack(harmonic)
    for k in range(2, ring.order + 1):
        phi = RingMorphism(alg, alg, tuple(tuple(v) for v in images))
        residual = (a_v - _conjugate(m, lam, phi, a_primed)).component(ring, k)
        if residual.is_zero():
            continue
        solutions = solve_columns(system, residual.column_vectors())
        if any(sol is None for sol in solutions):
            raise ObstructionError(f"no gauge comparison in degree {k}",
                                   {"degree": k, "residual": residual.to_json()})
        lam_block = Matrix.from_columns([sol[:e.dims[0]] for sol in solutions], rows=e.dims[0])
        lam = lam + TensorElement.from_components(0, e.dims[0], ring, {k: lam_block})
        for i in range(alg.dims[1]):
            for j, sol in enumerate(solutions):
                c = sol[e.dims[0] + i]
                if c:
                    pos = alg.flat_index(k, j)
                    images[i][pos] = images[i][pos] + c
        logger.debug(f"Gauge comparison solved in degree {k}", extra={'action': 'gauge_compare', 'order': k})
    return lam, RingMorphism(alg, alg, tuple(tuple(v) for v in images))


@log_function_calls(logger)
def gauge_compare(m: FormalityModel, c_primed: ConnectionSeries, c_v: ConnectionSeries,
                  n: Optional[int] = None) -> GaugeComparison:
    """
    g and φ with D + A'' = g (id ⊗ φ)(D + A')(id ⊗ φ)^-1 g^-1.

    Up to order two g is a multiple of γ_2 and φ = id, the multiple fixed
    by verification; above order two a linear solve per degree finds
    (g, φ) jointly.

    Raises:
        ObstructionError: some degree has no solution
        ModelInconsistencyError: the solved pair fails verification
    """
    n = m.order if n is None else n
    if n != m.order:
        raise ShapeMismatchError(f"model is truncated at {m.order}, not {n}")
    for name, c in (("primed", c_primed), ("v", c_v)):
        flat = flatness_check(m, c)
        if not flat.passed:
            raise ModelInconsistencyError(f"{name} series is not flat", flat.to_dict())
    ring = m.ring
    identity = RingMorphism.identity(m.kuranishi.ring)
    zero = TensorElement.zero(0, m.e.dims[0], ring)
    if not c_primed.alphas:
        return GaugeComparison(zero, identity, "identity", None, CheckReport("gauge_comparison"))
    a_primed, a_v = c_primed.total(), c_v.total()

    if n <= 1:
        report = _comparison_report(m, zero, identity, a_primed, a_v)
        return GaugeComparison(zero, identity, "identity", None, report)
    if n == 2:
        gamma = c_primed.gammas.get(2, zero)
        for sign in GAUGE_SIGN_CANDIDATES:
            lam = gamma.scale(Scalar.parse(sign))
            report = _comparison_report(m, lam, identity, a_primed, a_v)
            if report.passed:
                log_check_event(logger, "gauge comparison", True, action="gauge_compare", order=n, sign=sign)
                return GaugeComparison(lam, identity, "explicit", sign, report)
        logger.info("No multiple of gamma_2 compares the series; solving", extra={'action': 'gauge_compare', 'order': n})

    lam, phi = _solve_comparison(m, a_primed, a_v)
    report = _comparison_report(m, lam, phi, a_primed, a_v)
    if not report.passed:
        raise ModelInconsistencyError("solved gauge comparison fails verification", report.to_dict())
    log_check_event(logger, "gauge comparison", True, action="gauge_compare", order=n)
    return GaugeComparison(lam, phi, "solver", None, report)


# Fiber V ⊗ ring

def _multiplication_matrix(m: FormalityModel, p: int) -> Matrix:
    alg = m.kuranishi.ring
    n = alg.total_dim
    x = unit_vector(n, p)
    return Matrix.from_columns([multiply(alg, x, unit_vector(n, q)) for q in range(n)], rows=n)


def connection_operator(m: FormalityModel, x: GaugeElement) -> Matrix:
    """N(x) = Σ x[a, p] act(e_a) ⊗ (multiplication by r_p) on V ⊗ ring, Kronecker-ordered."""
    if x.degree != 0 or x.rows != m.e.dims[0]:
        raise ShapeMismatchError("connection operators come from E^0 ⊗ m")
    size = m.fiber_dim * m.ring.total_dim
    out = Matrix.zeros(size, size)
    for p in range(1, m.ring.total_dim):
        column = x.coeffs.column(p)
        if not any(column):
            continue
        fiber = Matrix.zeros(m.fiber_dim, m.fiber_dim)
        for a, c in enumerate(column):
            if c:
                fiber = fiber + m.action[a].scale(c)
        out = out + fiber.kron(_multiplication_matrix(m, p))
    return out


def split_fiber_structure(m: FormalityModel) -> TripleFiltered:
    """sW, sF, sG on V ⊗ ring: types add, weight of v ⊗ r is p+q of v minus the degree of r."""
    alg = m.kuranishi.ring
    ring_types = [t for piece in alg.types for t in piece]
    degrees = [d for d in range(alg.order + 1) for _ in range(alg.dims[d])]
    types, weights = [], []
    for t in m.fiber_types:
        for rt, d in zip(ring_types, degrees):
            types.append((t[0] + rt[0], t[1] + rt[1]))
            weights.append(t[0] + t[1] - d)
    return TripleFiltered.from_types(types, weights)


def _unipotent(m: FormalityModel, x: Optional[GaugeElement]) -> Matrix:
    size = m.fiber_dim * m.ring.total_dim
    if x is None:
        return Matrix.identity(size)
    return (-connection_operator(m, x)).matrix_exp_nilpotent()


@log_function_calls(logger)
def fiber_vmhs_check(m: FormalityModel, c: ConnectionSeries, f: Optional[GaugeElement] = None,
                     g: Optional[GaugeElement] = None, w: Optional[GaugeElement] = None) -> CheckReport:
    """
    F = e^-f(sF), G = e^-g(sG), W = e^-w(sW) on the fiber V ⊗ ring, then
    check_mhs. Flatness and Hodge types of c are re-checked first.

    Raises:
        TwistPreconditionError: some e^-x is not unipotent relative to sW
    """
    report = CheckReport("fiber_vmhs")
    report.merge(flatness_check(m, c))
    report.merge(hodge_type_check(m, c))
    split = split_fiber_structure(m)
    twists = {}
    for name, x in (("f", f), ("g", g), ("w", w)):
        u = _unipotent(m, x)
        twist_precondition(split, u)
        twists[name] = u
    twisted = TripleFiltered(split.dim, split.W.image(twists["w"]),
                             split.F.image(twists["f"]), split.G.image(twists["g"]))
    report.merge(check_mhs(twisted), prefix="fiber")
    report.details["fiber_dim"] = split.dim
    log_check_event(logger, "fiber MHS", report.passed, action="fiber_vmhs_check", order=m.order)
    return report
