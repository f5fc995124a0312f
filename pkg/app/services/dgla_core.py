"""
DGLA Core

Finite-dimensional differential graded Lie algebras (degrees 0..3) with
optional double differential d = d1 + d2 and Hodge bigrading, splittings
delta, augmentations eps: L^0 -> g, cohomology with harmonic
representatives, the d'd''-lemma check and the quadratic obstruction map
induced by the bracket on H^1.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.config import MAX_DGLA_DEGREE
from app.services.exact_linalg import (
    ZERO, Matrix, Scalar, Subspace, Vector, block_diagonal, kernel_basis, solve_particular,
    split_complement, unit_vector,
)
from app.services.graded_artin import HodgeType, SparseVec, sym_truncated
from app.utils.check_report import CheckReport
from app.utils.errors import ModelInconsistencyError, ShapeMismatchError
from app.utils.logging.component_loggers import get_dgla_logger, log_check_event

logger = get_dgla_logger(__name__)

BracketTable = Dict[Tuple[int, int], Dict[Tuple[int, int], SparseVec]]


def koszul(i: int, j: int) -> int:
    """(-1)^(ij)"""
    return -1 if (i * j) % 2 else 1


def _sparse_from_vector(v: Sequence[Scalar]) -> SparseVec:
    return tuple((idx, c) for idx, c in enumerate(v) if c)


def _dense(sparse: SparseVec, n: int) -> List[Scalar]:
    out = [ZERO] * n
    for idx, c in sparse:
        out[idx] = out[idx] + c
    return out


@dataclass(frozen=True, eq=False)
class Dgla:
    """
    Graded Lie algebra L^0 ⊕ ... ⊕ L^max with differential.

    d[i] maps L^i to L^(i+1) and has shape (dims[i+1], dims[i]).
    bracket[(i, j)][(a, b)] is [e_a, e_b] for e_a in L^i, e_b in L^j.
    When d1 and d2 are present, d = d1 + d2.
    """
    dims: Tuple[int, ...]
    d: Tuple[Matrix, ...]
    bracket: BracketTable
    d1: Optional[Tuple[Matrix, ...]] = None
    d2: Optional[Tuple[Matrix, ...]] = None
    types: Optional[Tuple[Tuple[HodgeType, ...], ...]] = None

    def __post_init__(self):
        if not 1 <= len(self.dims) <= MAX_DGLA_DEGREE + 1:
            raise ShapeMismatchError(f"degrees 0..{len(self.dims) - 1} outside the supported range 0..{MAX_DGLA_DEGREE}")
        if len(self.d) != self.max_degree:
            raise ShapeMismatchError(f"{len(self.d)} differentials for maximal degree {self.max_degree}")
        for i, m in enumerate(self.d):
            if m.shape != (self.dims[i + 1], self.dims[i]):
                raise ShapeMismatchError(f"d in degree {i} has shape {m.shape}, expected {(self.dims[i + 1], self.dims[i])}")
        if self.types is not None:
            for i, piece in enumerate(self.types):
                if len(piece) != self.dims[i]:
                    raise ShapeMismatchError(f"{len(piece)} Hodge types for L^{i} of dimension {self.dims[i]}")

    @property
    def max_degree(self) -> int:
        return len(self.dims) - 1

    @property
    def has_double(self) -> bool:
        return self.d1 is not None and self.d2 is not None

    def dim(self, i: int) -> int:
        return self.dims[i] if 0 <= i <= self.max_degree else 0

    def d_from(self, i: int) -> Matrix:
        """d: L^i -> L^(i+1), with zero maps at the ends."""
        if i < 0:
            return Matrix.zeros(self.dim(0), 0)
        if i >= self.max_degree:
            return Matrix.zeros(0, self.dim(i))
        return self.d[i]

    def _double_from(self, maps: Optional[Tuple[Matrix, ...]], i: int) -> Matrix:
        if i < 0:
            return Matrix.zeros(self.dim(0), 0)
        if i >= self.max_degree:
            return Matrix.zeros(0, self.dim(i))
        return maps[i]

    def d1_from(self, i: int) -> Matrix:
        return self._double_from(self.d1, i)

    def d2_from(self, i: int) -> Matrix:
        return self._double_from(self.d2, i)

    def basis_bracket(self, i: int, a: int, j: int, b: int) -> SparseVec:
        if i + j > self.max_degree:
            return ()
        return self.bracket.get((i, j), {}).get((a, b), ())

    def bracket_vectors(self, i: int, x: Sequence[Scalar], j: int, y: Sequence[Scalar]) -> Vector:
        """[x, y] for x in L^i, y in L^j; empty tuple beyond the top degree."""
        if i + j > self.max_degree:
            return ()
        out = [ZERO] * self.dims[i + j]
        table = self.bracket.get((i, j), {})
        nz_y = [(b, cy) for b, cy in enumerate(y) if cy]
        for a, cx in enumerate(x):
            if not cx:
                continue
            for b, cy in nz_y:
                entry = table.get((a, b))
                if not entry:
                    continue
                coeff = cx * cy
                for idx, c in entry:
                    out[idx] = out[idx] + coeff * c
        return tuple(out)

    def to_json(self) -> Dict:
        data = {
            "dims": list(self.dims),
            "d": [m.to_json() for m in self.d],
            "bracket": [
                {"degrees": [i, j], "basis": [a, b], "value": {str(idx): str(c) for idx, c in entry}}
                for (i, j), table in sorted(self.bracket.items())
                for (a, b), entry in sorted(table.items()) if entry
            ],
        }
        if self.has_double:
            data["d1"] = [m.to_json() for m in self.d1]
            data["d2"] = [m.to_json() for m in self.d2]
        if self.types is not None:
            data["types"] = [[list(t) for t in piece] for piece in self.types]
        return data


def make_dgla(dims: Sequence[int],
              d: Optional[Sequence[Matrix]] = None,
              brackets: Iterable[Tuple[int, int, int, int, Sequence]] = (),
              d1: Optional[Sequence[Matrix]] = None,
              d2: Optional[Sequence[Matrix]] = None,
              types: Optional[Sequence[Sequence[HodgeType]]] = None,
              complete_antisymmetry: bool = True) -> Dgla:
    """
    Build a Dgla from dense pieces.

    Args:
        dims: dimension of each degree
        d: differentials (zero when omitted; d1 + d2 when both are given)
        brackets: (i, a, j, b, value) with value a dense vector or a
            sparse list of (index, coefficient) pairs
        d1, d2: optional double differential
        types: optional Hodge type per basis vector
        complete_antisymmetry: fill [y, x] = -(-1)^(|x||y|)[x, y] where missing

    Returns:
        The Dgla; axioms are not checked here, call validate()
    """
    dims = tuple(dims)
    top = len(dims) - 1
    if d1 is not None and d2 is not None:
        d1 = tuple(d1)
        d2 = tuple(d2)
        if d is None:
            d = tuple(a + b for a, b in zip(d1, d2))
    if d is None:
        d = tuple(Matrix.zeros(dims[i + 1], dims[i]) for i in range(top))
    table: BracketTable = {}
    explicit = set()
    for i, a, j, b, value in brackets:
        if i + j > top:
            continue
        if value and isinstance(value[0], (tuple, list)):
            sparse = tuple(sorted((int(idx), Scalar.coerce(c)) for idx, c in value if Scalar.coerce(c)))
        else:
            sparse = _sparse_from_vector([Scalar.coerce(c) for c in value])
        table.setdefault((i, j), {})[(a, b)] = sparse
        explicit.add((i, a, j, b))
    if complete_antisymmetry:
        for (i, a, j, b) in list(explicit):
            if (j, b, i, a) in explicit:
                continue
            sign = Scalar(-koszul(i, j))
            mirrored = tuple((idx, sign * c) for idx, c in table[(i, j)][(a, b)])
            table.setdefault((j, i), {})[(b, a)] = mirrored
    return Dgla(dims, tuple(d), table,
                d1 if d1 is None else tuple(d1),
                d2 if d2 is None else tuple(d2),
                tuple(tuple(tuple(t) for t in piece) for piece in types) if types is not None else None)


def direct_sum(a: Dgla, b: Dgla) -> Dgla:
    """Direct sum of two dglas with the same degree range; brackets between summands vanish."""
    if a.max_degree != b.max_degree:
        raise ShapeMismatchError("direct sum needs equal degree ranges")
    dims = tuple(x + y for x, y in zip(a.dims, b.dims))
    d = tuple(block_diagonal([ma, mb]) for ma, mb in zip(a.d, b.d))
    table: BracketTable = {}
    for src, off in ((a, (0,) * len(a.dims)), (b, a.dims)):
        for (i, j), entries in src.bracket.items():
            target = table.setdefault((i, j), {})
            for (x, y), value in entries.items():
                target[(x + off[i], y + off[j])] = tuple((idx + off[i + j], c) for idx, c in value)
    d1 = d2 = None
    if a.has_double and b.has_double:
        d1 = tuple(block_diagonal([ma, mb]) for ma, mb in zip(a.d1, b.d1))
        d2 = tuple(block_diagonal([ma, mb]) for ma, mb in zip(a.d2, b.d2))
    types = None
    if a.types is not None and b.types is not None:
        types = tuple(ta + tb for ta, tb in zip(a.types, b.types))
    return Dgla(dims, d, table, d1, d2, types)


def validate(l: Dgla) -> CheckReport:
    """Exhaustive check of d^2 = 0, antisymmetry, Jacobi, Leibniz and type rules."""
    report = CheckReport("dgla")
    top = l.max_degree
    for i in range(top - 1):
        if not (l.d[i + 1] @ l.d[i]).is_zero():
            report.fail(f"d^2 = 0 on L^{i}")
    if l.has_double:
        for i in range(top):
            if l.d1[i] + l.d2[i] != l.d[i]:
                report.fail(f"d = d1 + d2 on L^{i}")
        for i in range(top - 1):
            if not (l.d1[i + 1] @ l.d1[i]).is_zero():
                report.fail(f"d1^2 = 0 on L^{i}")
            if not (l.d2[i + 1] @ l.d2[i]).is_zero():
                report.fail(f"d2^2 = 0 on L^{i}")
            if not (l.d1[i + 1] @ l.d2[i] + l.d2[i + 1] @ l.d1[i]).is_zero():
                report.fail(f"d1 d2 + d2 d1 = 0 on L^{i}")

    units = [[unit_vector(l.dims[i], a) for a in range(l.dims[i])] for i in range(top + 1)]

    for i in range(top + 1):
        for j in range(top + 1 - i):
            for a in range(l.dims[i]):
                for b in range(l.dims[j]):
                    xy = l.bracket_vectors(i, units[i][a], j, units[j][b])
                    yx = l.bracket_vectors(j, units[j][b], i, units[i][a])
                    sign = koszul(i, j)
                    if any(p + sign * q for p, q in zip(xy, yx)):
                        report.fail("[x,y] = -(-1)^(|x||y|)[y,x]", {"x": [i, a], "y": [j, b]})

    for i in range(top + 1):
        for j in range(top + 1 - i):
            for k in range(top + 1 - i - j):
                s = i + j + k
                for a in range(l.dims[i]):
                    x = units[i][a]
                    for b in range(l.dims[j]):
                        y = units[j][b]
                        xy = l.bracket_vectors(i, x, j, y)
                        for c in range(l.dims[k]):
                            z = units[k][c]
                            t1 = l.bracket_vectors(i, x, j + k, l.bracket_vectors(j, y, k, z))
                            t2 = l.bracket_vectors(j, y, k + i, l.bracket_vectors(k, z, i, x))
                            t3 = l.bracket_vectors(k, z, i + j, xy)
                            total = [koszul(i, k) * p + koszul(j, i) * q + koszul(k, j) * r
                                     for p, q, r in zip(t1, t2, t3)]
                            if any(total):
                                report.fail("graded Jacobi", {"x": [i, a], "y": [j, b], "z": [k, c], "degree": s})

    for i in range(top + 1):
        for j in range(top - i):
            for a in range(l.dims[i]):
                x = units[i][a]
                dx = l.d_from(i).apply(x)
                for b in range(l.dims[j]):
                    y = units[j][b]
                    dy = l.d_from(j).apply(y)
                    lhs = l.d_from(i + j).apply(l.bracket_vectors(i, x, j, y))
                    r1 = l.bracket_vectors(i + 1, dx, j, y)
                    r2 = l.bracket_vectors(i, x, j + 1, dy)
                    sign = -1 if i % 2 else 1
                    if any(p - q - sign * r for p, q, r in zip(lhs, r1, r2)):
                        report.fail("d[x,y] = [dx,y] + (-1)^|x|[x,dy]", {"x": [i, a], "y": [j, b]})

    if l.types is not None:
        _check_types(l, report)
    log_check_event(logger, "dgla axioms", report.passed, action="validate",
                    witness=[v.identity for v in report.violations[:5]])
    return report


def _check_types(l: Dgla, report: CheckReport) -> None:
    types = l.types
    maps = [("d1", l.d1, (1, 0)), ("d2", l.d2, (0, 1))] if l.has_double else []
    for name, seq, shift in maps:
        for i, m in enumerate(seq):
            for a in range(l.dims[i]):
                p, q = types[i][a]
                for r in range(l.dims[i + 1]):
                    if m[r, a] and types[i + 1][r] != (p + shift[0], q + shift[1]):
                        report.fail(f"{name} has type {shift}", {"degree": i, "basis": a, "target": r})
    if not l.has_double:
        for i, m in enumerate(l.d):
            for a in range(l.dims[i]):
                p, q = types[i][a]
                for r in range(l.dims[i + 1]):
                    if m[r, a] and types[i + 1][r] not in ((p + 1, q), (p, q + 1)):
                        report.fail("d has type (1,0) + (0,1)", {"degree": i, "basis": a, "target": r})
    for (i, j), table in l.bracket.items():
        for (a, b), entry in table.items():
            expected = (types[i][a][0] + types[j][b][0], types[i][a][1] + types[j][b][1])
            for idx, _ in entry:
                if types[i + j][idx] != expected:
                    report.fail("bracket adds types", {"x": [i, a], "y": [j, b], "target": idx})


@dataclass(frozen=True, eq=False)
class Splitting:
    """
    delta[i] maps L^i to L^(i-1) (delta[0] is the empty map).
    delta_g, when present, maps g into H^0 ⊆ L^0 (shape dims[0] x g_dim).
    """
    delta: Tuple[Matrix, ...]
    delta_g: Optional[Matrix] = None

    @classmethod
    def from_maps(cls, l: Dgla, maps: Dict[int, Matrix], delta_g: Optional[Matrix] = None) -> "Splitting":
        delta = [Matrix.zeros(0, l.dims[0])]
        for i in range(1, l.max_degree + 1):
            m = maps.get(i, Matrix.zeros(l.dims[i - 1], l.dims[i]))
            if m.shape != (l.dims[i - 1], l.dims[i]):
                raise ShapeMismatchError(f"delta in degree {i} has shape {m.shape}")
            delta.append(m)
        return cls(tuple(delta), delta_g)

    @classmethod
    def zero(cls, l: Dgla) -> "Splitting":
        return cls.from_maps(l, {})

    def from_degree(self, i: int, l: Dgla) -> Matrix:
        """delta: L^i -> L^(i-1), zero outside the range."""
        if i <= 0 or i > l.max_degree:
            return Matrix.zeros(l.dim(i - 1), l.dim(i))
        return self.delta[i]

    def to_json(self) -> Dict:
        data = {"delta": {str(i): m.to_json() for i, m in enumerate(self.delta) if i > 0}}
        if self.delta_g is not None:
            data["delta_g"] = self.delta_g.to_json()
        return data


def harmonic_projector(l: Dgla, s: Splitting, i: int) -> Matrix:
    """P = id - d delta - delta d on L^i."""
    n = l.dims[i]
    d_in = l.d_from(i - 1)
    delta_in = s.from_degree(i, l)
    d_out = l.d_from(i)
    delta_out = s.from_degree(i + 1, l)
    result = Matrix.identity(n)
    if d_in.cols and delta_in.rows:
        result = result - d_in @ delta_in
    if d_out.rows and delta_out.cols:
        result = result - delta_out @ d_out
    return result


def check_splitting(l: Dgla, s: Splitting) -> CheckReport:
    """delta^2 = 0, d = d delta d, delta = delta d delta, and L = im d ⊕ im delta ⊕ harmonic."""
    report = CheckReport("splitting")
    top = l.max_degree
    for i in range(2, top + 1):
        if not (s.delta[i - 1] @ s.delta[i]).is_zero():
            report.fail(f"delta^2 = 0 on L^{i}")
    for i in range(top):
        if l.d[i] @ s.delta[i + 1] @ l.d[i] != l.d[i]:
            report.fail(f"d = d delta d on L^{i}")
    for i in range(1, top + 1):
        if s.delta[i] @ l.d[i - 1] @ s.delta[i] != s.delta[i]:
            report.fail(f"delta = delta d delta on L^{i}")
    for i in range(top + 1):
        n = l.dims[i]
        exact = Subspace.span(n, l.d_from(i - 1).column_vectors())
        coexact = Subspace.span(n, s.from_degree(i + 1, l).column_vectors())
        stacked = l.d_from(i).vstack(s.from_degree(i, l))
        harmonic = kernel_basis(stacked)
        total = exact.sum(coexact).sum(harmonic)
        if exact.dim + coexact.dim + harmonic.dim != n or total.dim != n:
            report.fail(f"L^{i} = im d ⊕ im delta ⊕ harmonic",
                        {"im_d": exact.dim, "im_delta": coexact.dim, "harmonic": harmonic.dim, "dim": n})
        for name, u, v in (("im d ∩ im delta", exact, coexact), ("im d ∩ harmonic", exact, harmonic),
                           ("im delta ∩ harmonic", coexact, harmonic)):
            if u.intersect(v).dim:
                report.fail(f"{name} = 0 in L^{i}")
    log_check_event(logger, "splitting axioms", report.passed, action="check_splitting")
    return report


def splitting_shifts_weight(l: Dgla, s: Splitting) -> bool:
    """True when delta lowers the total Hodge weight p+q by exactly one."""
    if l.types is None:
        return False
    for i in range(1, l.max_degree + 1):
        m = s.delta[i]
        for a in range(l.dims[i]):
            w = sum(l.types[i][a])
            for r in range(l.dims[i - 1]):
                if m[r, a] and sum(l.types[i - 1][r]) != w - 1:
                    return False
    return True


@dataclass(frozen=True, eq=False)
class DglaCohomology:
    """Cohomology dimensions with harmonic representatives per degree."""
    dims: Tuple[int, ...]
    harmonic: Tuple[Subspace, ...]
    cocycles: Tuple[Subspace, ...]
    coboundaries: Tuple[Subspace, ...]
    harmonic_types: Optional[Tuple[Optional[Tuple[HodgeType, ...]], ...]] = None

    def basis(self, i: int) -> List[Vector]:
        return self.harmonic[i].vectors()

    def class_coordinates(self, i: int, v: Sequence[Scalar]) -> Optional[Vector]:
        """Coordinates of the class of cocycle v in the harmonic basis, None if v is not closed."""
        if not self.cocycles[i].contains(v):
            return None
        h = self.harmonic[i]
        b = self.coboundaries[i]
        if h.dim == 0:
            return ()
        stacked = h.basis.vstack(b.basis).transpose()
        sol = solve_particular(stacked, v)
        if sol is None:
            return None
        return tuple(sol[:h.dim])

    def to_json(self) -> Dict:
        data = {"dims": list(self.dims),
                "harmonic_basis": {str(i): s.to_json() for i, s in enumerate(self.harmonic)}}
        if self.harmonic_types is not None:
            data["harmonic_types"] = {str(i): [list(t) for t in ts] for i, ts in enumerate(self.harmonic_types) if ts}
        return data


def graded_basis(sub: Subspace, labels: Sequence) -> Optional[Tuple[List[Vector], List]]:
    """
    Basis of sub made of label-pure vectors (labels per ambient basis
    vector), or None when sub is not spanned by its label-pure parts.
    """
    n = sub.ambient_dim
    pieces = []
    for lab in sorted(set(labels)):
        coords = [unit_vector(n, k) for k in range(n) if labels[k] == lab]
        part = sub.intersect(Subspace.span(n, coords))
        for v in part.vectors():
            pieces.append((v, lab))
    if len(pieces) != sub.dim:
        return None
    pieces.sort(key=lambda item: next(k for k, c in enumerate(item[0]) if c))
    return [v for v, _ in pieces], [lab for _, lab in pieces]


def cohomology(l: Dgla, splitting: Optional[Splitting] = None, pure_types: bool = False) -> DglaCohomology:
    """
    H^i = ker d / im d with harmonic representatives ker d ∩ ker delta
    when a splitting is supplied, else canonical complements of im d in
    ker d. With pure_types the representatives are chosen type-pure.
    """
    harmonic, cocycles, coboundaries, types_out = [], [], [], []
    for i in range(l.max_degree + 1):
        n = l.dims[i]
        z = kernel_basis(l.d_from(i))
        b = Subspace.span(n, l.d_from(i - 1).column_vectors())
        if splitting is not None:
            h = kernel_basis(l.d_from(i).vstack(splitting.from_degree(i, l)))
        else:
            h = split_complement(b, z)
        h_types = None
        if pure_types:
            vectors, h_types = pure_harmonic_basis(l, i, splitting)
            h = Subspace(n, Matrix.from_rows(vectors, cols=n))
        elif l.types is not None:
            graded = graded_basis(h, l.types[i])
            if graded is not None:
                h = Subspace(n, Matrix.from_rows(graded[0], cols=n))
                h_types = tuple(graded[1])
        harmonic.append(h)
        cocycles.append(z)
        coboundaries.append(b)
        types_out.append(tuple(h_types) if h_types is not None else None)
    dims = tuple(h.dim for h in harmonic)
    logger.debug(f"Cohomology dims {dims}", extra={'action': 'cohomology'})
    return DglaCohomology(dims, tuple(harmonic), tuple(cocycles), tuple(coboundaries),
                          tuple(types_out) if l.types is not None else None)


def pure_harmonic_basis(l: Dgla, i: int, splitting: Optional[Splitting] = None
                        ) -> Tuple[List[Vector], List[HodgeType]]:
    """
    Type-pure cohomology representatives in degree i.

    With a splitting: a type-pure basis of ker d ∩ ker delta. Without:
    per type, a complement of im(d1 d2) inside ker d1 ∩ ker d2.

    Raises:
        ModelInconsistencyError: no type-pure basis exists
    """
    if l.types is None:
        raise ModelInconsistencyError("type-pure representatives need a Hodge bigrading")
    n = l.dims[i]
    if splitting is not None:
        h = kernel_basis(l.d_from(i).vstack(splitting.from_degree(i, l)))
        graded = graded_basis(h, l.types[i])
        if graded is None:
            raise ModelInconsistencyError(f"harmonic space in degree {i} is not spanned by type-pure vectors")
        return graded[0], list(graded[1])
    if not l.has_double:
        raise ModelInconsistencyError("type-pure representatives without a splitting need d1 and d2")
    closed = kernel_basis(l.d1_from(i).vstack(l.d2_from(i)))
    if i >= 2:
        dd = l.d1_from(i - 1) @ l.d2_from(i - 2)
        exact = Subspace.span(n, dd.column_vectors())
    else:
        exact = Subspace.zero(n)
    vectors, labels = [], []
    for t in sorted(set(l.types[i])):
        span_t = Subspace.span(n, [unit_vector(n, k) for k in range(n) if l.types[i][k] == t])
        closed_t = closed.intersect(span_t)
        exact_t = exact.intersect(span_t)
        for v in split_complement(exact_t, closed_t).vectors():
            vectors.append(v)
            labels.append(t)
    order = sorted(range(len(vectors)), key=lambda k: next(j for j, c in enumerate(vectors[k]) if c))
    return [vectors[k] for k in order], [labels[k] for k in order]


def check_ddbar(l: Dgla) -> CheckReport:
    """ker d1 ∩ ker d2 ∩ (im d1 + im d2) = im(d1 d2) in every degree; witness on failure."""
    report = CheckReport("ddbar_lemma")
    if not l.has_double:
        report.fail("double differential present")
        return report
    for i in range(l.max_degree + 1):
        n = l.dims[i]
        closed = kernel_basis(l.d1_from(i).vstack(l.d2_from(i)))
        images = Subspace.span(n, l.d1_from(i - 1).column_vectors() + l.d2_from(i - 1).column_vectors())
        lhs = closed.intersect(images)
        if i >= 2:
            rhs = Subspace.span(n, (l.d1_from(i - 1) @ l.d2_from(i - 2)).column_vectors())
        else:
            rhs = Subspace.zero(n)
        for v in lhs.vectors():
            if not rhs.contains(v):
                report.fail(f"ker d1 ∩ ker d2 ∩ (im d1 + im d2) ⊆ im d1d2 in degree {i}",
                            {"degree": i, "vector": [str(c) for c in v]})
                break
    log_check_event(logger, "d'd''-lemma", report.passed, action="check_ddbar")
    return report


def sym2_index(h1_dim: int) -> Dict[Tuple[int, int], int]:
    """Index of t_i t_j (i <= j) in the degree-two monomial basis."""
    monomials = sym_truncated(h1_dim, 2).monomials[2]
    out = {}
    for idx, exps in enumerate(monomials):
        support = [k for k, e in enumerate(exps) for _ in range(e)]
        out[(support[0], support[1])] = idx
    return out


@dataclass(frozen=True, eq=False)
class QuadraticMap:
    """Symmetric bilinear map Sym^2 H^1 -> H^2 through its values on basis pairs i <= j."""
    h1_dim: int
    h2_dim: int
    values: Dict[Tuple[int, int], Vector]

    def pair(self, i: int, j: int) -> Vector:
        return self.values[(min(i, j), max(i, j))]

    def evaluate(self, u: Sequence[Scalar], v: Sequence[Scalar]) -> Vector:
        out = [ZERO] * self.h2_dim
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if b:
                    for c, val in enumerate(self.pair(i, j)):
                        out[c] = out[c] + a * b * val
        return tuple(out)

    def quadratic(self, u: Sequence[Scalar]) -> Vector:
        return self.evaluate(u, u)

    def is_zero(self) -> bool:
        return not any(any(v) for v in self.values.values())

    def ideal_generators(self) -> List[Vector]:
        """
        One quadric per H^2 coordinate c: coefficient obs_ij[c] on t_i t_j
        (i < j) and obs_ii[c]/2 on t_i^2, i.e. the c-th coordinate of
        (1/2)[Σ η_i t_i, Σ η_j t_j].
        """
        index = sym2_index(self.h1_dim)
        half = Scalar(Fraction(1, 2))
        gens = []
        for c in range(self.h2_dim):
            q = [ZERO] * len(index)
            for (i, j), pos in index.items():
                val = self.values[(i, j)][c]
                q[pos] = val * half if i == j else val
            gens.append(tuple(q))
        return gens

    def i2_subspace(self) -> Subspace:
        """I_2 = image of the transpose of obs_2 inside Sym^2."""
        return Subspace.span(len(sym2_index(self.h1_dim)), self.ideal_generators())

    def to_json(self) -> Dict:
        return {"h1_dim": self.h1_dim, "h2_dim": self.h2_dim,
                "values": {f"{i},{j}": [str(c) for c in v] for (i, j), v in sorted(self.values.items())}}


def bracket_on_cohomology(l: Dgla, coh: DglaCohomology,
                          representatives: Optional[Sequence[Sequence[Scalar]]] = None) -> QuadraticMap:
    """
    obs_2(η_i, η_j) = class of [η_i, η_j] in the harmonic basis of H^2.

    representatives overrides the harmonic H^1 cocycles (same classes).
    """
    reps = [tuple(v) for v in (representatives if representatives is not None else coh.basis(1))]
    h2_dim = coh.dims[2] if l.max_degree >= 2 else 0
    values = {}
    for i in range(len(reps)):
        for j in range(i, len(reps)):
            if h2_dim == 0:
                values[(i, j)] = ()
                continue
            br = l.bracket_vectors(1, reps[i], 1, reps[j])
            coords = coh.class_coordinates(2, br)
            if coords is None:
                raise ModelInconsistencyError("bracket of 1-cocycles is not closed",
                                              {"pair": [i, j]})
            values[(i, j)] = coords
    return QuadraticMap(len(reps), h2_dim, values)


@dataclass(frozen=True, eq=False)
class Augmentation:
    """Lie algebra g with structure constants and a map eps: L^0 -> g (shape g_dim x dims[0])."""
    g_dim: int
    g_bracket: Dict[Tuple[int, int], SparseVec]
    eps: Matrix

    def bracket(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> Vector:
        out = [ZERO] * self.g_dim
        for a, cx in enumerate(x):
            if not cx:
                continue
            for b, cy in enumerate(y):
                if not cy:
                    continue
                for idx, c in self.g_bracket.get((a, b), ()):
                    out[idx] = out[idx] + cx * cy * c
        return tuple(out)

    def to_json(self) -> Dict:
        return {"g_dim": self.g_dim, "eps": self.eps.to_json(),
                "g_bracket": [{"basis": [a, b], "value": {str(i): str(c) for i, c in v}}
                              for (a, b), v in sorted(self.g_bracket.items()) if v]}


def check_augmentation(l: Dgla, aug: Augmentation) -> CheckReport:
    """eps is a Lie map on L^0, g is a Lie algebra, and whether eps is injective on H^0."""
    report = CheckReport("augmentation")
    g = aug.g_dim
    if aug.eps.shape != (g, l.dims[0]):
        report.fail("eps has shape g_dim x dim L^0", {"shape": list(aug.eps.shape)})
        return report
    gu = [unit_vector(g, a) for a in range(g)]
    for a in range(g):
        for b in range(g):
            if any(p + q for p, q in zip(aug.bracket(gu[a], gu[b]), aug.bracket(gu[b], gu[a]))):
                report.fail("g bracket antisymmetric", {"x": a, "y": b})
            for c in range(g):
                t1 = aug.bracket(gu[a], aug.bracket(gu[b], gu[c]))
                t2 = aug.bracket(gu[b], aug.bracket(gu[c], gu[a]))
                t3 = aug.bracket(gu[c], aug.bracket(gu[a], gu[b]))
                if any(p + q + r for p, q, r in zip(t1, t2, t3)):
                    report.fail("g Jacobi", {"x": a, "y": b, "z": c})
    lu = [unit_vector(l.dims[0], a) for a in range(l.dims[0])]
    for a in range(l.dims[0]):
        for b in range(l.dims[0]):
            lhs = aug.eps.apply(l.bracket_vectors(0, lu[a], 0, lu[b]))
            rhs = aug.bracket(aug.eps.apply(lu[a]), aug.eps.apply(lu[b]))
            if lhs != rhs:
                report.fail("eps[x,y] = [eps x, eps y]", {"x": a, "y": b})
    h0 = kernel_basis(l.d_from(0))
    image = Subspace.span(g, [aug.eps.apply(v) for v in h0.vectors()])
    injective = image.dim == h0.dim
    report.details["injective_on_h0"] = injective
    report.details["h0_dim"] = h0.dim
    if not injective:
        report.fail("eps injective on H^0", {"h0_dim": h0.dim, "image_dim": image.dim})
    log_check_event(logger, "augmentation", report.passed, action="check_augmentation")
    return report


def check_quasi_isomorphism(sub: Dgla, ambient: Dgla, inclusion: Sequence[Matrix]) -> CheckReport:
    """
    A declared inclusion of dglas commutes with d and brackets and induces
    isomorphisms on cohomology in every degree.
    """
    report = CheckReport("quasi_isomorphism")
    top = min(sub.max_degree, ambient.max_degree)
    for i in range(top):
        if ambient.d[i] @ inclusion[i] != inclusion[i + 1] @ sub.d[i]:
            report.fail(f"inclusion commutes with d on degree {i}")
    for (i, j), table in sub.bracket.items():
        for (a, b), entry in table.items():
            if i + j > top:
                continue
            lhs = inclusion[i + j].apply(tuple(_dense(entry, sub.dims[i + j])))
            rhs = ambient.bracket_vectors(i, inclusion[i].column(a), j, inclusion[j].column(b))
            if lhs != rhs:
                report.fail("inclusion preserves brackets", {"x": [i, a], "y": [j, b]})
    h_sub = cohomology(sub)
    h_amb = cohomology(ambient)
    for i in range(top + 1):
        images = [h_amb.class_coordinates(i, inclusion[i].apply(v)) for v in h_sub.basis(i)]
        if any(c is None for c in images):
            report.fail(f"inclusion maps cocycles to cocycles in degree {i}")
            continue
        rank = Subspace.span(h_amb.dims[i], images).dim if images else 0
        if h_sub.dims[i] != h_amb.dims[i] or rank != h_amb.dims[i]:
            report.fail(f"isomorphism on H^{i}", {"sub": h_sub.dims[i], "ambient": h_amb.dims[i], "rank": rank})
    return report
