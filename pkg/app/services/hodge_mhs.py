"""
Hodge and Mixed Hodge Structures

Filtered linear algebra over Q(i): complex Hodge structures given by two
opposed decreasing filtrations, mixed Hodge structures with a weight
filtration, polarizations, unipotent twists, the four-filtration lemma,
the assembly of a mixed Hodge structure on a graded Artin algebra from
its degree-one piece, and the split structures on the quadratic cone and
on the framed product ring.

A filtration is an explicit flag of subspaces; everything else, including
splittings, is derived from it.
"""

from dataclasses import dataclass
from itertools import combinations_with_replacement, product as cartesian_product
from typing import Dict, List, Optional, Sequence, Tuple

from app.services.deformation import GMProduct
from app.services.dgla_core import QuadraticMap
from app.services.exact_linalg import (
    Matrix, Scalar, Subspace, Vector, complement_projector, hermitian_pairing,
    is_positive_definite_hermitian, kernel_basis, split_complement,
)
from app.services.graded_artin import (
    GradedArtinAlgebra, HodgeType, RingMorphism, multiply, quotient_cone, saturate_ideal,
    sym_truncated, tensor,
)
from app.utils.check_report import CheckReport
from app.utils.errors import (
    InputValidationError, ModelInconsistencyError, ShapeMismatchError, TwistPreconditionError,
    TypeCompatibilityError,
)
from app.utils.logging.component_loggers import get_hodge_logger, log_check_event, log_function_calls

logger = get_hodge_logger(__name__)


@dataclass(frozen=True, eq=False)
class Filtration:
    """
    Flag of subspaces indexed by integers.

    Decreasing: F^p = steps at the first stored index >= p, the whole
    space below the range and 0 above it. Increasing: W_k = steps at the
    last stored index <= k, 0 below the range and the whole space above.
    """
    dim: int
    steps: Dict[int, Subspace]
    decreasing: bool = True

    @classmethod
    def trivial(cls, dim: int, index: int = 0, decreasing: bool = True) -> "Filtration":
        return cls(dim, {index: Subspace.full(dim)}, decreasing)

    @classmethod
    def from_labels(cls, labels: Sequence[int], decreasing: bool = True) -> "Filtration":
        """Split filtration of a basis labelled by integers."""
        n = len(labels)
        if not n:
            return cls.trivial(0, 0, decreasing)
        steps = {}
        for k in range(min(labels), max(labels) + 1):
            if decreasing:
                idx = [i for i, lab in enumerate(labels) if lab >= k]
            else:
                idx = [i for i, lab in enumerate(labels) if lab <= k]
            steps[k] = Subspace(n, Matrix.from_rows([[1 if j == i else 0 for j in range(n)] for i in idx], cols=n))
        return cls(n, steps, decreasing)

    @classmethod
    def from_json(cls, dim: int, data: Dict[str, Sequence[Sequence[str]]], decreasing: bool = True) -> "Filtration":
        steps = {}
        for key, rows in data.items():
            basis = Matrix.from_json(rows, cols=dim) if rows else Matrix.zeros(0, dim)
            steps[int(key)] = Subspace.span(dim, basis.row_vectors())
        if not steps:
            steps = {0: Subspace.full(dim)}
        return cls(dim, steps, decreasing)

    @property
    def lo(self) -> int:
        return min(self.steps)

    @property
    def hi(self) -> int:
        return max(self.steps)

    def indices(self) -> range:
        """Indices where the flag can jump, with one step of margin on each side."""
        return range(self.lo - 1, self.hi + 2)

    def at(self, k: int) -> Subspace:
        if self.decreasing:
            if k <= self.lo:
                return self.steps[self.lo]
            if k > self.hi:
                return Subspace.zero(self.dim)
            return self.steps[min(i for i in self.steps if i >= k)]
        if k >= self.hi:
            return self.steps[self.hi]
        if k < self.lo:
            return Subspace.zero(self.dim)
        return self.steps[max(i for i in self.steps if i <= k)]

    def problems(self) -> List[str]:
        out = []
        for k, s in self.steps.items():
            if s.ambient_dim != self.dim:
                out.append(f"step {k} lives in dimension {s.ambient_dim}")
                return out
        keys = sorted(self.steps)
        for a, b in zip(keys, keys[1:]):
            small, big = (self.steps[b], self.steps[a]) if self.decreasing else (self.steps[a], self.steps[b])
            if not big.contains_subspace(small):
                out.append(f"steps {a} and {b} are not nested")
        end = self.steps[keys[0]] if self.decreasing else self.steps[keys[-1]]
        if end.dim != self.dim:
            out.append("filtration does not exhaust the space")
        return out

    def restrict(self, sub: Subspace) -> "Filtration":
        """Induced filtration on sub, in the coordinates of sub's basis."""
        steps = {}
        for k, s in self.steps.items():
            meet = s.intersect(sub)
            steps[k] = Subspace.span(sub.dim, [sub.coordinates(v) for v in meet.vectors()])
        return Filtration(sub.dim, steps, self.decreasing)

    def image(self, m: Matrix) -> "Filtration":
        """Filtration m(F) on the target of m."""
        if m.cols != self.dim:
            raise ShapeMismatchError(f"{m.shape} map applied to a filtration of dimension {self.dim}")
        return Filtration(m.rows, {k: s.image(m) for k, s in self.steps.items()}, self.decreasing)

    def equals(self, other: "Filtration") -> bool:
        if self.dim != other.dim or self.decreasing != other.decreasing:
            return False
        lo = min(self.lo, other.lo) - 1
        hi = max(self.hi, other.hi) + 1
        return all(self.at(k).equals(other.at(k)) for k in range(lo, hi + 1))

    def to_json(self) -> Dict[str, List[List[str]]]:
        return {str(k): s.to_json() for k, s in sorted(self.steps.items())}


def direct_sum_filtrations(pieces: Sequence[Filtration]) -> Filtration:
    total = sum(f.dim for f in pieces)
    decreasing = pieces[0].decreasing if pieces else True
    live = [f for f in pieces if f.dim]
    if not live:
        return Filtration.trivial(total, 0, decreasing)
    lo = min(f.lo for f in live)
    hi = max(f.hi for f in live)
    steps = {}
    for k in range(lo, hi + 1):
        vecs = []
        offset = 0
        for f in pieces:
            for v in f.at(k).vectors():
                vecs.append((0,) * offset + tuple(v) + (0,) * (total - offset - f.dim))
            offset += f.dim
        steps[k] = Subspace.span(total, vecs)
    return Filtration(total, steps, decreasing)


def quotient_projector(sub: Subspace) -> Matrix:
    """Coordinates on V/sub through the canonical complement of sub."""
    n = sub.ambient_dim
    if sub.dim == 0:
        return Matrix.identity(n)
    if sub.dim == n:
        return Matrix.zeros(0, n)
    complement = split_complement(sub, Subspace.full(n))
    return complement_projector(sub, complement)[1]


@dataclass(frozen=True, eq=False)
class TripleFiltered:
    """V with increasing W and decreasing F, G."""
    dim: int
    W: Filtration
    F: Filtration
    G: Filtration

    @classmethod
    def from_types(cls, types: Sequence[HodgeType], weights: Sequence[int]) -> "TripleFiltered":
        """Split structure: basis vector i has type types[i] and weight weights[i]."""
        if len(types) != len(weights):
            raise ShapeMismatchError(f"{len(types)} types for {len(weights)} weights")
        return cls(len(types), Filtration.from_labels(list(weights), decreasing=False),
                   Filtration.from_labels([t[0] for t in types]),
                   Filtration.from_labels([t[1] for t in types]))

    @classmethod
    def pure(cls, types: Sequence[HodgeType], weight: Optional[int] = None) -> "TripleFiltered":
        w = weight if weight is not None else (sum(types[0]) if types else 0)
        return cls.from_types(types, [w] * len(types))

    def restrict(self, sub: Subspace) -> "TripleFiltered":
        return TripleFiltered(sub.dim, self.W.restrict(sub), self.F.restrict(sub), self.G.restrict(sub))

    def project(self, m: Matrix) -> "TripleFiltered":
        return TripleFiltered(m.rows, self.W.image(m), self.F.image(m), self.G.image(m))

    def map(self, u: Matrix) -> "TripleFiltered":
        return self.project(u)

    def subquotient(self, top: Subspace, bottom: Subspace) -> "TripleFiltered":
        """Induced filtrations on top/bottom (bottom ⊆ top)."""
        inner = self.restrict(top)
        bottom_coords = Subspace.span(top.dim, [top.coordinates(v) for v in bottom.vectors()])
        return inner.project(quotient_projector(bottom_coords))

    def gr_w(self, k: int) -> "TripleFiltered":
        return self.subquotient(self.W.at(k), self.W.at(k - 1))

    def check_filtrations(self) -> CheckReport:
        report = CheckReport("filtrations")
        for name, f, decreasing in (("W", self.W, False), ("F", self.F, True), ("G", self.G, True)):
            if f.dim != self.dim:
                report.fail(f"{name} lives in dimension {self.dim}", {"dim": f.dim})
                continue
            if f.decreasing != decreasing:
                report.fail(f"{name} is {'decreasing' if decreasing else 'increasing'}")
            for problem in f.problems():
                report.fail(f"{name}: {problem}")
        return report

    def to_json(self) -> Dict:
        return {"dim": self.dim, "W": self.W.to_json(), "F": self.F.to_json(), "G": self.G.to_json()}


@dataclass(frozen=True, eq=False)
class PolarizationForm:
    """Hermitian nondegenerate form S, pairing x, y as x^T S conj(y)."""
    matrix: Matrix

    def __post_init__(self):
        if not self.matrix.is_hermitian():
            raise InputValidationError("polarization form is not hermitian", pointer="/polarization")
        if not self.matrix.determinant():
            raise InputValidationError("polarization form is degenerate", pointer="/polarization")

    def pair(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Scalar:
        return hermitian_pairing(x, self.matrix, y)


def hodge_pieces(v: TripleFiltered, w: int) -> Dict[Tuple[int, int], Subspace]:
    """H^{p,q} = F^p ∩ G^q for p + q = w."""
    pieces = {}
    for p in range(min(v.F.lo, w - v.G.hi), v.F.hi + 1):
        h = v.F.at(p).intersect(v.G.at(w - p))
        if h.dim:
            pieces[(p, w - p)] = h
    return pieces


def check_pure_hs(v: TripleFiltered, w: int, s: Optional[PolarizationForm] = None) -> CheckReport:
    """
    V = ⊕_(p+q=w) F^p ∩ G^q; with s, distinct pieces are s-orthogonal and
    (-1)^(p+w) s is positive definite on H^{p,q}.
    """
    report = CheckReport(f"pure_hs_weight_{w}")
    pieces = hodge_pieces(v, w)
    total = sum(h.dim for h in pieces.values())
    spanned = Subspace.span(v.dim, [x for h in pieces.values() for x in h.vectors()])
    report.details["hodge_numbers"] = {f"{p},{q}": h.dim for (p, q), h in sorted(pieces.items())}
    if total != v.dim or spanned.dim != v.dim:
        report.fail("V = ⊕ F^p ∩ G^(w-p)", {"weight": w, "sum_of_pieces": total, "dim": v.dim})
    if s is not None and not report.violations:
        if s.matrix.shape != (v.dim, v.dim):
            raise ShapeMismatchError(f"polarization of shape {s.matrix.shape} on a space of dimension {v.dim}")
        keys = sorted(pieces)
        for i, a in enumerate(keys):
            for b in keys[i + 1:]:
                if any(s.pair(x, y) for x in pieces[a].vectors() for y in pieces[b].vectors()):
                    report.fail("H^{p,q} are orthogonal", {"pieces": [list(a), list(b)]})
        for (p, q), h in sorted(pieces.items()):
            basis = h.vectors()
            sign = Scalar(1 if (p + w) % 2 == 0 else -1)
            gram = Matrix.from_rows([[sign * s.pair(x, y) for y in basis] for x in basis], cols=len(basis))
            if not is_positive_definite_hermitian(gram):
                report.fail("(-1)^(p+w) S is positive definite on H^{p,q}", {"type": [p, q]})
        report.details["polarized"] = report.passed
    return report


def check_mhs(v: TripleFiltered, polarizations: Optional[Dict[int, PolarizationForm]] = None) -> CheckReport:
    """Every Gr^W_k with the induced F, G is a Hodge structure of weight k."""
    report = CheckReport("mhs")
    report.merge(v.check_filtrations())
    if not report.passed:
        return report
    weights = {}
    for k in range(v.W.lo, v.W.hi + 1):
        piece = v.gr_w(k)
        if not piece.dim:
            continue
        weights[str(k)] = piece.dim
        pol = polarizations.get(k) if polarizations else None
        report.merge(check_pure_hs(piece, k, pol), prefix=f"Gr^W_{k}")
    report.details["graded_dims"] = weights
    log_check_event(logger, "mhs", report.passed, action="check_mhs")
    return report


def same_graded(a: TripleFiltered, b: TripleFiltered) -> CheckReport:
    """Gr^W of a and b agree with their induced F and G (same W assumed)."""
    report = CheckReport("same_graded")
    if not a.W.equals(b.W):
        report.fail("weight filtrations agree")
        return report
    for k in range(a.W.lo, a.W.hi + 1):
        pa, pb = a.gr_w(k), b.gr_w(k)
        if not (pa.F.equals(pb.F) and pa.G.equals(pb.G)):
            report.fail("Gr^W pieces agree", {"weight": k})
    return report


def twist_precondition(v: TripleFiltered, u: Matrix) -> None:
    """
    Raises:
        TwistPreconditionError: u moves some W_k or is not the identity on Gr^W_k
    """
    if u.shape != (v.dim, v.dim) or (v.dim and not u.determinant()):
        raise TwistPreconditionError("twist must be an invertible endomorphism", witness={"shape": list(u.shape)})
    shift = u - Matrix.identity(v.dim)
    for k in range(v.W.lo, v.W.hi + 1):
        wk = v.W.at(k)
        below = v.W.at(k - 1)
        for x in wk.vectors():
            if not wk.contains(u.apply(x)):
                raise TwistPreconditionError(f"u does not preserve W_{k}", weight=k, witness={"weight": k})
            if not below.contains(shift.apply(x)):
                raise TwistPreconditionError(f"u is not the identity on Gr^W_{k}", weight=k, witness={"weight": k})


def twist(v: TripleFiltered, u: Matrix) -> TripleFiltered:
    """
    (V, F, u(G), W) for u with u - Id ∈ W_{-1} End(V).

    Raises:
        TwistPreconditionError: u moves some W_k or is not the identity on Gr^W_k
    """
    twist_precondition(v, u)
    result = TripleFiltered(v.dim, v.W, v.F, v.G.image(u))
    post = same_graded(v, result)
    if not post.passed:
        raise ModelInconsistencyError("twist changed Gr^W", post.to_dict())
    return result


def lemma_4f_check(v: TripleFiltered, u: Filtration) -> CheckReport:
    """
    Hypothesis: every Gr_U with induced W, F, G is a MHS. Conclusion: v is
    a MHS. Passes when the implication holds; both verdicts are in details.
    """
    report = CheckReport("four_filtrations")
    hypothesis = True
    for r in range(u.lo, u.hi + 1):
        if u.decreasing:
            top, bottom = u.at(r), u.at(r + 1)
        else:
            top, bottom = u.at(r), u.at(r - 1)
        if top.dim == bottom.dim:
            continue
        piece = check_mhs(v.subquotient(top, bottom))
        report.details[f"Gr_U_{r}"] = piece.passed
        hypothesis = hypothesis and piece.passed
    conclusion = check_mhs(v)
    report.details["hypothesis"] = hypothesis
    report.details["conclusion"] = conclusion.passed
    if hypothesis and not conclusion.passed:
        report.fail("Gr_U pieces are MHS but V is not", [x.to_dict() for x in conclusion.violations])
    return report


def dual_mhs(v: TripleFiltered) -> TripleFiltered:
    """V* in the dual basis: W*_k = ann W_(-k-1), F*^p = ann F^(1-p), G*^q = ann G^(1-q)."""
    def ann(s: Subspace) -> Subspace:
        return kernel_basis(s.basis) if s.dim else Subspace.full(v.dim)

    w_steps = {k: ann(v.W.at(-k - 1)) for k in range(-v.W.hi - 1, -v.W.lo + 2)}
    f_steps = {p: ann(v.F.at(1 - p)) for p in range(-v.F.hi, 2 - v.F.lo)}
    g_steps = {q: ann(v.G.at(1 - q)) for q in range(-v.G.hi, 2 - v.G.lo)}
    return TripleFiltered(v.dim, Filtration(v.dim, w_steps, False),
                          Filtration(v.dim, f_steps), Filtration(v.dim, g_steps))


def _kron_vectors(x: Sequence[Scalar], y: Sequence[Scalar]) -> Vector:
    return tuple(a * b for a in x for b in y)


def _tensor_filtration(f1: Filtration, f2: Filtration) -> Filtration:
    n = f1.dim * f2.dim
    steps = {}
    for k in range(f1.lo + f2.lo - 1, f1.hi + f2.hi + 2):
        vecs = []
        for a in f1.indices():
            for x in f1.at(a).vectors():
                for y in f2.at(k - a).vectors():
                    vecs.append(_kron_vectors(x, y))
        steps[k] = Subspace.span(n, vecs)
    return Filtration(n, steps, f1.decreasing)


def tensor_mhs(a: TripleFiltered, b: TripleFiltered) -> TripleFiltered:
    """A ⊗ B with Kronecker-ordered basis and convolved filtrations."""
    return TripleFiltered(a.dim * b.dim, _tensor_filtration(a.W, b.W),
                          _tensor_filtration(a.F, b.F), _tensor_filtration(a.G, b.G))


# Graded Artin algebras with Hodge data

def _sym_filtration(f: Filtration, k: int, free: GradedArtinAlgebra) -> Filtration:
    """Symmetric power of a filtration inside Gr^k of the free algebra on its space."""
    n = free.dims[k]
    contributions: Dict[int, List[Vector]] = {}
    idx = list(range(f.lo, f.hi + 1))
    for combo in combinations_with_replacement(idx, k):
        bases = [f.at(i).vectors() for i in combo]
        if any(not b for b in bases):
            continue
        for vecs in cartesian_product(*bases):
            acc = free.unit()
            for x in vecs:
                acc = multiply(free, acc, free.embed(1, x))
            contributions.setdefault(sum(combo), []).append(free.component(acc, k))
    steps = {}
    keys = sorted(contributions)
    for s in keys:
        chosen = [v for t in keys if (t >= s if f.decreasing else t <= s) for v in contributions[t]]
        steps[s] = Subspace.span(n, chosen)
    if not steps:
        steps = {0: Subspace.full(n)}
    return Filtration(n, steps, f.decreasing)


def sym_power_mhs(v: TripleFiltered, k: int, free: Optional[GradedArtinAlgebra] = None) -> TripleFiltered:
    """Sym^k V with the product filtrations, in the monomial basis of sym_truncated."""
    free = free or sym_truncated(v.dim, k)
    if k == 0:
        return TripleFiltered.pure([(0, 0)], 0)
    return TripleFiltered(free.dims[k], _sym_filtration(v.W, k, free),
                          _sym_filtration(v.F, k, free), _sym_filtration(v.G, k, free))


def algebra_piece(v: TripleFiltered, a: GradedArtinAlgebra, k: int) -> TripleFiltered:
    """Induced filtrations on M^k/M^(k+1) = Gr^k of a structure on the flat algebra."""
    n = a.total_dim
    top = Subspace.span(n, [tuple(1 if j == i else 0 for j in range(n)) for i in range(a.offset(k), n)])
    bottom = Subspace.span(n, [tuple(1 if j == i else 0 for j in range(n)) for i in range(a.offset(k + 1), n)])
    return v.subquotient(top, bottom)


def multiplication_maps(a: GradedArtinAlgebra) -> Tuple[GradedArtinAlgebra, List[Matrix]]:
    """μ^k: Sym^k(Gr^1) -> Gr^k as matrices, with the free algebra they start from."""
    free = sym_truncated(a.dims[1] if a.order >= 1 else 0, a.order)
    phi = RingMorphism(free, a, tuple(a.generator(i) for i in range(a.dims[1]))) if a.order >= 1 else None
    maps = []
    for k in range(a.order + 1):
        if phi is None or k == 0:
            maps.append(Matrix.identity(1))
            continue
        cols = [a.component(phi.basis_images[free.flat_index(k, m)], k) for m in range(free.dims[k])]
        maps.append(Matrix.from_columns(cols, rows=a.dims[k]))
    return free, maps


def multiplication_kernel(a: GradedArtinAlgebra, k: int = 2) -> Subspace:
    _, maps = multiplication_maps(a)
    return kernel_basis(maps[k])


@log_function_calls(logger)
def mhalg_assemble(a: GradedArtinAlgebra, v_mhs: TripleFiltered, k_sub: Subspace,
                   given: Optional[TripleFiltered] = None) -> Tuple[Optional[TripleFiltered], CheckReport]:
    """
    Mixed Hodge structure on a from one on Gr^1.

    Conditions: (1) a is a quadratic cone truncation: ker μ^k is generated
    by K = ker μ^2; (2) v_mhs is a MHS; (3) K is a sub-MHS of Sym^2;
    (4) the filtrations on each Gr^k are the quotient filtrations from
    Sym^k (compared with `given` when supplied). On success the assembled
    structure and the sub-MHS chain M^k are checked as well.
    """
    report = CheckReport("mhalg")
    if a.order >= 1 and a.dims[1] != v_mhs.dim:
        raise ShapeMismatchError(f"MHS of dimension {v_mhs.dim} on Gr^1 of dimension {a.dims[1]}")
    try:
        free, maps = multiplication_maps(a)
    except ValueError as e:
        report.fail("(1) generated in degree one", str(e))
        return None, report

    kernel2 = kernel_basis(maps[2]) if a.order >= 2 else Subspace.zero(0)
    if a.order >= 2:
        if not k_sub.equals(kernel2):
            report.fail("(1) K is the kernel of mu^2", {"k_dim": k_sub.dim, "kernel_dim": kernel2.dim})
        ideal = saturate_ideal(free, {2: kernel2.vectors()})
        for k in range(3, a.order + 1):
            if not ideal.in_degree(k, free).equals(kernel_basis(maps[k])):
                report.fail("(1) ker mu^k is generated by K", {"degree": k})

    report.merge(check_mhs(v_mhs), prefix="(2) Gr^1")

    sym_pieces = [TripleFiltered.pure([(0, 0)], 0)]
    for k in range(1, a.order + 1):
        sym_pieces.append(sym_power_mhs(v_mhs, k, free))
    if a.order >= 2:
        report.merge(check_mhs(sym_pieces[2].restrict(k_sub)), prefix="(3) K")

    graded = [sym_pieces[0]]
    for k in range(1, a.order + 1):
        quotient = sym_pieces[k].project(maps[k])
        graded.append(quotient)
        if given is not None:
            induced = algebra_piece(given, a, k)
            for name in ("W", "F", "G"):
                if not getattr(induced, name).equals(getattr(quotient, name)):
                    report.fail("(4) mu^k strictly preserves the filtrations", {"degree": k, "filtration": name})
    if not report.passed:
        log_check_event(logger, "mhalg conditions", False, action="mhalg_assemble", order=a.order)
        return None, report

    assembled = TripleFiltered(a.total_dim,
                               direct_sum_filtrations([p.W for p in graded]),
                               direct_sum_filtrations([p.F for p in graded]),
                               direct_sum_filtrations([p.G for p in graded]))
    report.merge(check_mhs(assembled), prefix="assembled")
    n = a.total_dim
    for k in range(1, a.order + 1):
        mk = Subspace.span(n, [tuple(1 if j == i else 0 for j in range(n)) for i in range(a.offset(k), n)])
        report.merge(check_mhs(assembled.restrict(mk)), prefix=f"M^{k}")
    log_check_event(logger, "mhalg assembly", report.passed, action="mhalg_assemble", order=a.order)
    return (assembled if report.passed else None), report


@dataclass(frozen=True, eq=False)
class HodgeAlgebra:
    """Graded Artin algebra with a split MHS on its flat basis."""
    algebra: GradedArtinAlgebra
    mhs: TripleFiltered
    weights: Tuple[int, ...]

    def to_json(self) -> Dict:
        return {"algebra": self.algebra.to_json(), "mhs": self.mhs.to_json(), "weights": list(self.weights)}


def check_obstruction_types(h1_types: Sequence[HodgeType], h2_types: Sequence[HodgeType],
                            obs: QuadraticMap) -> CheckReport:
    report = CheckReport("obstruction_types")
    for (i, j), value in sorted(obs.values.items()):
        expected = (h1_types[i][0] + h1_types[j][0], h1_types[i][1] + h1_types[j][1])
        for c, coeff in enumerate(value):
            if coeff and tuple(h2_types[c]) != expected:
                report.fail("obs maps H^{p,q} x H^{p',q'} into H^{p+p',q+q'}",
                            {"pair": [i, j], "target": c, "expected": list(expected)})
    return report


@log_function_calls(logger)
def split_mhs_on_cone(h1_types: Sequence[HodgeType], h2_types: Sequence[HodgeType],
                      obs: QuadraticMap, n: int) -> HodgeAlgebra:
    """
    The quadratic cone truncated at n with its split MHS: generators dual to
    H^1 carry negated types, Gr^k is pure of weight -k and W_{-k} = m^k.

    Raises:
        TypeCompatibilityError: obs does not respect the bigradings
    """
    if len(h1_types) != obs.h1_dim or len(h2_types) != obs.h2_dim:
        raise ShapeMismatchError("Hodge types do not match the obstruction map dimensions")
    report = check_obstruction_types(h1_types, h2_types, obs)
    if not report.passed:
        raise TypeCompatibilityError("obstruction map is not type-compatible", report.to_dict())
    gen_types = [(-p, -q) for p, q in h1_types]
    alg = quotient_cone(len(h1_types), obs.i2_subspace(), n, gen_types)
    types = [t for piece in alg.types for t in piece]
    weights = [-k for k in range(alg.order + 1) for _ in range(alg.dims[k])]
    mhs = TripleFiltered.from_types(types, weights)
    verdict = check_mhs(mhs)
    if not verdict.passed:
        raise ModelInconsistencyError("split cone structure is not a MHS", verdict.to_dict())
    return HodgeAlgebra(alg, mhs, tuple(weights))


@log_function_calls(logger)
def mhs_on_orho(product: GMProduct, h0_types: Sequence[HodgeType], h1_types: Sequence[HodgeType],
                h2_types: Sequence[HodgeType], n: Optional[int] = None,
                s1_types: Optional[Sequence[HodgeType]] = None,
                automorphism: Optional[RingMorphism] = None) -> Tuple[HodgeAlgebra, CheckReport]:
    """
    Split MHS on S1 ⊗ Π with W given by powers of j = S1 ⊗ m2; with an
    automorphism, F and G are transported along it and the result is
    re-checked through mhalg_assemble.

    S1 generators default to type (0, 0); H^0 and any supplied S1 types
    must all be of weight 0.

    Raises:
        TypeCompatibilityError: a generator or H^0 type is not of weight 0
        ModelInconsistencyError: the Kuranishi ring is not the quadratic cone
    """
    ring = product.algebra
    n = ring.order if n is None else n
    if n != ring.order:
        raise ShapeMismatchError(f"product ring is truncated at {ring.order}, not {n}")
    for t in h0_types:
        if t[0] + t[1] != 0:
            raise TypeCompatibilityError("H^0 must be pure of weight 0", {"type": list(t)})
    s1_dim = product.s1.dims[1] if product.s1.order >= 1 else 0
    s1_types = list(s1_types) if s1_types is not None else [(0, 0)] * s1_dim
    if len(s1_types) != s1_dim:
        raise ShapeMismatchError(f"{len(s1_types)} S1 types for {s1_dim} generators")
    for t in s1_types:
        if t[0] + t[1] != 0:
            raise TypeCompatibilityError("S1 generators must have weight 0", {"type": list(t)})

    kur = product.kuranishi
    cone = split_mhs_on_cone(h1_types, h2_types, kur.obstruction, n)
    if cone.algebra.dims != kur.ring.dims:
        raise ModelInconsistencyError("Kuranishi ring is not the quadratic cone",
                                      {"kuranishi": list(kur.ring.dims), "cone": list(cone.algebra.dims)})
    typed = tensor(sym_truncated(s1_dim, n, s1_types), cone.algebra, n)
    if typed.dims != ring.dims:
        raise ModelInconsistencyError("product ring does not match S1 ⊗ Π",
                                      {"product": list(ring.dims), "expected": list(typed.dims)})
    types = [t for piece in typed.types for t in piece]
    weights = [-(d - i) for d in range(typed.order + 1) for (i, _, _) in typed.factor_labels[d]]
    split = TripleFiltered.from_types(types, weights)

    report = CheckReport("orho_mhs")
    report.merge(check_mhs(split), prefix="split")
    for k, step in enumerate(product.j_filtration()):
        if not split.W.at(-k).equals(step):
            report.fail("W_{-k} is the image of j^k", {"k": k})
    result = HodgeAlgebra(ring, split, tuple(weights))
    if automorphism is not None:
        images = Matrix.from_columns(automorphism.basis_images, rows=ring.total_dim)
        transported = TripleFiltered(split.dim, split.W, split.F.image(images), split.G.image(images))
        k_sub = multiplication_kernel(ring, 2) if ring.order >= 2 else Subspace.zero(0)
        _, assembled = mhalg_assemble(ring, algebra_piece(transported, ring, 1), k_sub, given=transported)
        report.merge(assembled, prefix="transported")
        result = HodgeAlgebra(ring, transported, tuple(weights))
    log_check_event(logger, "MHS on O_rho", report.passed, action="mhs_on_orho", order=n)
    return result, report
