"""
Graded Artin Algebras

Truncated graded-local algebras Gr^0 ⊕ ... ⊕ Gr^n stored through their
multiplication tensors: truncated symmetric algebras, quotients by graded
ideals, weight filtrations by powers of the maximal ideal, tensor
products and ring morphisms.

Elements are flat coefficient vectors over the concatenated graded
bases; offsets(k) gives where Gr^k starts.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Dict, List, Optional, Sequence, Tuple

from app.services.exact_linalg import (
    ONE, ZERO, Matrix, Scalar, Subspace, Vector, solve_columns, unit_vector, zero_vector,
)
from app.utils.check_report import CheckReport
from app.utils.errors import ShapeMismatchError
from app.utils.logging.component_loggers import get_artin_logger

logger = get_artin_logger(__name__)

SparseVec = Tuple[Tuple[int, Scalar], ...]
HodgeType = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class GradedArtinAlgebra:
    """
    Commutative graded algebra truncated above degree `order`.

    mult[(j, k)][a][b] is the product of basis element a of Gr^j with
    basis element b of Gr^k, a sparse vector in Gr^(j+k).
    """
    order: int
    dims: Tuple[int, ...]
    mult: Dict[Tuple[int, int], Tuple[Tuple[SparseVec, ...], ...]]
    monomials: Optional[Tuple[Tuple[Tuple[int, ...], ...], ...]] = None
    types: Optional[Tuple[Tuple[HodgeType, ...], ...]] = None
    factor_labels: Optional[Tuple[Tuple[Tuple[int, int, int], ...], ...]] = None

    def __post_init__(self):
        if len(self.dims) != self.order + 1:
            raise ShapeMismatchError(f"{len(self.dims)} graded pieces for truncation order {self.order}")
        if self.dims[0] != 1:
            raise ShapeMismatchError("Gr^0 must be one-dimensional")

    @cached_property
    def _offsets(self) -> Tuple[int, ...]:
        out, acc = [], 0
        for d in self.dims:
            out.append(acc)
            acc += d
        out.append(acc)
        return tuple(out)

    @property
    def total_dim(self) -> int:
        return self._offsets[-1]

    def offset(self, k: int) -> int:
        return self._offsets[k]

    def flat_index(self, k: int, a: int) -> int:
        return self._offsets[k] + a

    @cached_property
    def degree_of_index(self) -> Tuple[Tuple[int, int], ...]:
        """(degree, index within Gr^degree) for every flat index."""
        return tuple((k, a) for k in range(self.order + 1) for a in range(self.dims[k]))

    def unit(self) -> Vector:
        return unit_vector(self.total_dim, 0)

    def zero(self) -> Vector:
        return zero_vector(self.total_dim)

    def basis_element(self, k: int, a: int) -> Vector:
        return unit_vector(self.total_dim, self.flat_index(k, a))

    def generator(self, i: int) -> Vector:
        return self.basis_element(1, i)

    def component(self, x: Sequence[Scalar], k: int) -> Vector:
        """Coordinates of the degree-k part of x."""
        return tuple(x[self._offsets[k]:self._offsets[k + 1]])

    def embed(self, k: int, coords: Sequence[Scalar]) -> Vector:
        """Flat vector of a homogeneous element of degree k."""
        if len(coords) != self.dims[k]:
            raise ShapeMismatchError(f"{len(coords)} coordinates for Gr^{k} of dimension {self.dims[k]}")
        out = [ZERO] * self.total_dim
        out[self._offsets[k]:self._offsets[k + 1]] = list(coords)
        return tuple(out)

    def type_of(self, k: int, a: int) -> Optional[HodgeType]:
        return self.types[k][a] if self.types is not None else None

    def basis_product(self, j: int, a: int, k: int, b: int) -> SparseVec:
        if j + k > self.order:
            return ()
        return self.mult[(j, k)][a][b]

    def basis_labels(self) -> List[str]:
        labels = []
        for k in range(self.order + 1):
            for a in range(self.dims[k]):
                labels.append(self._label(k, a))
        return labels

    def _label(self, k: int, a: int) -> str:
        if self.monomials is None:
            return "1" if k == 0 else f"e{k}_{a}"
        exps = self.monomials[k][a]
        parts = [f"t{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e]
        return "*".join(parts) if parts else "1"

    @cached_property
    def generation_data(self) -> Tuple[Tuple[Tuple[Tuple[int, int, Scalar], ...], ...], ...]:
        """
        For each degree k >= 2 and basis element a of Gr^k, a decomposition
        sum c * (generator i) * (basis b of Gr^(k-1)) as (i, b, c) triples.

        Raises:
            ValueError: the algebra is not generated in degree one
        """
        data: List[Tuple] = [(), ()]
        for k in range(2, self.order + 1):
            columns, keys = [], []
            for i in range(self.dims[1]):
                for b in range(self.dims[k - 1]):
                    col = [ZERO] * self.dims[k]
                    for idx, c in self.mult[(1, k - 1)][i][b]:
                        col[idx] = col[idx] + c
                    columns.append(col)
                    keys.append((i, b))
            products = Matrix.from_columns(columns, rows=self.dims[k])
            solutions = solve_columns(products, [unit_vector(self.dims[k], a) for a in range(self.dims[k])])
            per_degree = []
            for a, sol in enumerate(solutions):
                if sol is None:
                    raise ValueError(f"basis element {a} of Gr^{k} is not a product of degree-one elements")
                per_degree.append(tuple((keys[j][0], keys[j][1], c) for j, c in enumerate(sol) if c))
            data.append(tuple(per_degree))
        return tuple(data)

    def to_json(self) -> Dict:
        mult_json = {}
        for (j, k), table in sorted(self.mult.items()):
            mult_json[f"{j},{k}"] = [[[[idx, str(c)] for idx, c in entry] for entry in row] for row in table]
        data = {"order": self.order, "dims": list(self.dims), "mult": mult_json,
                "basis": self.basis_labels()}
        if self.types is not None:
            data["types"] = [[list(t) for t in piece] for piece in self.types]
        return data

    @classmethod
    def from_tables(cls, order: int, dims: Sequence[int],
                    products: Dict[Tuple[int, int], Sequence[Sequence[Sequence[Tuple[int, Scalar]]]]],
                    types: Optional[Sequence[Sequence[HodgeType]]] = None) -> "GradedArtinAlgebra":
        """
        Build from user tables for j, k >= 1; products with Gr^0 are
        filled in as scalar multiplication.
        """
        mult: Dict = {}
        for j in range(order + 1):
            for k in range(order + 1 - j):
                if j == 0:
                    mult[(j, k)] = (tuple(((b, ONE),) for b in range(dims[k])),)
                elif k == 0:
                    mult[(j, k)] = tuple((((a, ONE),),) for a in range(dims[j]))
                else:
                    table = products.get((j, k))
                    if table is None:
                        raise ShapeMismatchError(f"missing multiplication table for degrees ({j},{k})")
                    mult[(j, k)] = tuple(tuple(_clean_sparse(entry) for entry in row) for row in table)
        return cls(order, tuple(dims), mult,
                   types=tuple(tuple(tuple(t) for t in piece) for piece in types) if types else None)


def _clean_sparse(entries) -> SparseVec:
    acc: Dict[int, Scalar] = {}
    for idx, c in entries:
        acc[idx] = acc.get(idx, ZERO) + Scalar.coerce(c)
    return tuple((idx, c) for idx, c in sorted(acc.items()) if c)


def multiply(a: GradedArtinAlgebra, x: Sequence[Scalar], y: Sequence[Scalar]) -> Vector:
    """Bilinear product of flat elements, truncated above the order."""
    if len(x) != a.total_dim or len(y) != a.total_dim:
        raise ShapeMismatchError(f"elements of length {len(x)}, {len(y)} in an algebra of dimension {a.total_dim}")
    out = [ZERO] * a.total_dim
    labels = a.degree_of_index
    nz_y = [(jy, c) for jy, c in enumerate(y) if c]
    for ix, cx in enumerate(x):
        if not cx:
            continue
        j, ia = labels[ix]
        for jy, cy in nz_y:
            k, ib = labels[jy]
            if j + k > a.order:
                continue
            coeff = cx * cy
            base = a.offset(j + k)
            for idx, c in a.mult[(j, k)][ia][ib]:
                out[base + idx] = out[base + idx] + coeff * c
    return tuple(out)


def power(a: GradedArtinAlgebra, x: Sequence[Scalar], e: int) -> Vector:
    result = a.unit()
    for _ in range(e):
        result = multiply(a, result, x)
    return result


def sym_truncated(v_dim: int, n: int,
                  generator_types: Optional[Sequence[HodgeType]] = None) -> GradedArtinAlgebra:
    """
    Truncated symmetric algebra on v_dim degree-one generators.

    Monomials of each degree are ordered lexicographically by descending
    exponent vector: t1^2, t1*t2, t2^2.
    """
    if v_dim < 0 or n < 0:
        raise ValueError("generator count and truncation order must be non-negative")
    monomials: List[Tuple[Tuple[int, ...], ...]] = []
    lookup: List[Dict[Tuple[int, ...], int]] = []
    for k in range(n + 1):
        piece = []
        for combo in combinations_with_replacement(range(v_dim), k):
            exps = [0] * v_dim
            for i in combo:
                exps[i] += 1
            piece.append(tuple(exps))
        monomials.append(tuple(piece))
        lookup.append({m: idx for idx, m in enumerate(piece)})
    mult: Dict = {}
    for j in range(n + 1):
        for k in range(n + 1 - j):
            table = []
            for ma in monomials[j]:
                row = []
                for mb in monomials[k]:
                    prod = tuple(x + y for x, y in zip(ma, mb))
                    row.append(((lookup[j + k][prod], ONE),))
                table.append(tuple(row))
            mult[(j, k)] = tuple(table)
    types = None
    if generator_types is not None:
        if len(generator_types) != v_dim:
            raise ShapeMismatchError(f"{len(generator_types)} generator types for {v_dim} generators")
        types = tuple(
            tuple(_monomial_type(m, generator_types) for m in piece) for piece in monomials
        )
    return GradedArtinAlgebra(n, tuple(len(p) for p in monomials), mult, tuple(monomials), types)


def _monomial_type(exps: Sequence[int], generator_types: Sequence[HodgeType]) -> HodgeType:
    p = sum(e * t[0] for e, t in zip(exps, generator_types))
    q = sum(e * t[1] for e, t in zip(exps, generator_types))
    return (p, q)


@dataclass(frozen=True, eq=False)
class IdealData:
    """Graded ideal given by one subspace of Gr^d per degree d."""
    generators_by_degree: Dict[int, Subspace]

    def in_degree(self, d: int, algebra: GradedArtinAlgebra) -> Subspace:
        return self.generators_by_degree.get(d, Subspace.zero(algebra.dims[d]))

    def check_closed(self, algebra: GradedArtinAlgebra) -> CheckReport:
        """Gr^1 · J_d ⊆ J_(d+1) for every degree."""
        report = CheckReport("ideal_closure")
        for d in range(algebra.order):
            j_d = self.in_degree(d, algebra)
            j_next = self.in_degree(d + 1, algebra)
            for v in j_d.vectors():
                x = algebra.embed(d, v)
                for i in range(algebra.dims[1]):
                    prod = algebra.component(multiply(algebra, algebra.generator(i), x), d + 1)
                    if not j_next.contains(prod):
                        report.fail(f"t{i + 1} * J_{d} not in J_{d + 1}", [str(c) for c in prod])
        return report

    def to_json(self) -> Dict[str, List[List[str]]]:
        return {str(d): s.to_json() for d, s in sorted(self.generators_by_degree.items()) if s.dim}


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """Projection from an algebra onto its quotient by a saturated ideal."""
    source: GradedArtinAlgebra
    target: GradedArtinAlgebra
    reduced_rows: Tuple[Tuple[Tuple[int, Vector], ...], ...]
    kept: Tuple[Tuple[int, ...], ...]

    def project_degree(self, k: int, v: Sequence[Scalar]) -> Vector:
        w = list(v)
        for p, row in self.reduced_rows[k]:
            f = w[p]
            if f:
                w = [a - f * b if b else a for a, b in zip(w, row)]
        return tuple(w[i] for i in self.kept[k])

    def project(self, x: Sequence[Scalar]) -> Vector:
        out: List[Scalar] = []
        for k in range(self.source.order + 1):
            out.extend(self.project_degree(k, self.source.component(x, k)))
        return tuple(out)

    def lift(self, y: Sequence[Scalar]) -> Vector:
        """Section sending each quotient basis element to its representative monomial."""
        out = [ZERO] * self.source.total_dim
        for k in range(self.target.order + 1):
            coords = self.target.component(y, k)
            for pos, idx in enumerate(self.kept[k]):
                out[self.source.flat_index(k, idx)] = coords[pos]
        return tuple(out)


def saturate_ideal(alg: GradedArtinAlgebra,
                   generators_by_degree: Dict[int, Sequence[Sequence[Scalar]]]) -> IdealData:
    """J_d = span(generators_d ∪ Gr^j · J_(d-j)) for d = 2..order."""
    for d, gens in generators_by_degree.items():
        if d < 2 and any(any(v) for v in gens):
            raise ValueError(f"ideal generators in degree {d} would change the tangent space")
    pieces: Dict[int, Subspace] = {}
    for d in range(2, alg.order + 1):
        vectors = [tuple(Scalar.coerce(c) for c in v) for v in generators_by_degree.get(d, [])]
        for j in range(1, d - 1):
            prev = pieces.get(d - j)
            if prev is None or prev.dim == 0:
                continue
            for a in range(alg.dims[j]):
                for v in prev.vectors():
                    prod = multiply(alg, alg.basis_element(j, a), alg.embed(d - j, v))
                    vectors.append(alg.component(prod, d))
        pieces[d] = Subspace.span(alg.dims[d], vectors)
    return IdealData(pieces)


def quotient_by_ideal(alg: GradedArtinAlgebra,
                      generators_by_degree: Dict[int, Sequence[Sequence[Scalar]]]
                      ) -> Tuple[GradedArtinAlgebra, IdealData, QuotientMap]:
    """
    Quotient of alg by the graded ideal generated by the given vectors.

    The quotient basis of Gr^d is the set of non-pivot basis elements of
    the reduced ideal piece J_d.
    """
    ideal = saturate_ideal(alg, generators_by_degree)
    reduced_rows, kept = [], []
    for d in range(alg.order + 1):
        piece = ideal.generators_by_degree.get(d)
        if piece is None or piece.dim == 0:
            reduced_rows.append(())
            kept.append(tuple(range(alg.dims[d])))
            continue
        rows = piece.vectors()
        pivots = [next(i for i, c in enumerate(r) if c) for r in rows]
        reduced_rows.append(tuple(zip(pivots, rows)))
        pivot_set = set(pivots)
        kept.append(tuple(i for i in range(alg.dims[d]) if i not in pivot_set))

    dims = tuple(len(k) for k in kept)
    partial = QuotientMap(alg, None, tuple(reduced_rows), tuple(kept))  # type: ignore[arg-type]
    mult: Dict = {}
    for j in range(alg.order + 1):
        for k in range(alg.order + 1 - j):
            table = []
            for a in kept[j]:
                row = []
                for b in kept[k]:
                    full = [ZERO] * alg.dims[j + k]
                    for idx, c in alg.mult[(j, k)][a][b]:
                        full[idx] = c
                    reduced = partial.project_degree(j + k, full)
                    row.append(tuple((i, c) for i, c in enumerate(reduced) if c))
                table.append(tuple(row))
            mult[(j, k)] = tuple(table)
    monomials = None
    if alg.monomials is not None:
        monomials = tuple(tuple(alg.monomials[d][i] for i in kept[d]) for d in range(alg.order + 1))
    types = None
    if alg.types is not None:
        types = tuple(tuple(alg.types[d][i] for i in kept[d]) for d in range(alg.order + 1))
    factor_labels = None
    if alg.factor_labels is not None:
        factor_labels = tuple(tuple(alg.factor_labels[d][i] for i in kept[d]) for d in range(alg.order + 1))
    quotient = GradedArtinAlgebra(alg.order, dims, mult, monomials, types, factor_labels)
    qmap = QuotientMap(alg, quotient, tuple(reduced_rows), tuple(kept))
    logger.debug(f"Quotient dims {dims} from {alg.dims}", extra={'action': 'quotient', 'order': alg.order})
    return quotient, ideal, qmap


def quotient_cone(h1_dim: int, i2: Subspace, n: int,
                  generator_types: Optional[Sequence[HodgeType]] = None) -> GradedArtinAlgebra:
    """Π = Sym(H^1*)/I with I_k = I_2 · Sym^(k-2), truncated at n."""
    free = sym_truncated(h1_dim, n, generator_types)
    if n < 2:
        return free
    if i2.ambient_dim != free.dims[2]:
        raise ShapeMismatchError(f"I_2 lives in dimension {i2.ambient_dim}, Sym^2 has dimension {free.dims[2]}")
    quotient, _, _ = quotient_by_ideal(free, {2: i2.vectors()})
    return quotient


def weight_filtration(a: GradedArtinAlgebra) -> List[Subspace]:
    """W_{-k} = ⊕_{j >= k} Gr^j for k = 0..order+1, listed by k."""
    steps = []
    for k in range(a.order + 2):
        start = a.offset(min(k, a.order + 1))
        steps.append(Subspace.span(a.total_dim,
                                   [unit_vector(a.total_dim, i) for i in range(start, a.total_dim)]))
    return steps


def maximal_ideal_power(a: GradedArtinAlgebra, k: int) -> Subspace:
    """m^k by iterated multiplication of spanning sets."""
    m = [unit_vector(a.total_dim, i) for i in range(a.offset(1), a.total_dim)]
    if k == 0:
        return Subspace.full(a.total_dim)
    current = Subspace.span(a.total_dim, m)
    for _ in range(k - 1):
        products = [multiply(a, x, y) for x in current.vectors() for y in m]
        current = Subspace.span(a.total_dim, products)
    return current


def tensor(a: GradedArtinAlgebra, b: GradedArtinAlgebra, n: int) -> GradedArtinAlgebra:
    """
    a ⊗ b truncated at total degree n.

    Basis of degree d: pairs (i, ia, ib) with A-degree i, ordered by i,
    then ia, then ib. factor_labels records these triples.
    """
    labels: List[List[Tuple[int, int, int]]] = []
    for d in range(n + 1):
        piece = []
        for i in range(0, min(d, a.order) + 1):
            if d - i > b.order:
                continue
            for ia in range(a.dims[i]):
                for ib in range(b.dims[d - i]):
                    piece.append((i, ia, ib))
        labels.append(piece)
    index = [{lab: idx for idx, lab in enumerate(piece)} for piece in labels]

    mult: Dict = {}
    for d in range(n + 1):
        for e in range(n + 1 - d):
            table = []
            for (i, ia, ib) in labels[d]:
                row = []
                for (j, ja, jb) in labels[e]:
                    if i + j > a.order or (d - i) + (e - j) > b.order:
                        row.append(())
                        continue
                    acc: Dict[int, Scalar] = {}
                    for xa, ca in a.mult[(i, j)][ia][ja]:
                        for xb, cb in b.mult[(d - i, e - j)][ib][jb]:
                            pos = index[d + e][(i + j, xa, xb)]
                            acc[pos] = acc.get(pos, ZERO) + ca * cb
                    row.append(tuple((p, c) for p, c in sorted(acc.items()) if c))
                table.append(tuple(row))
            mult[(d, e)] = tuple(table)

    monomials = None
    if a.monomials is not None and b.monomials is not None:
        monomials = tuple(
            tuple(a.monomials[i][ia] + b.monomials[d - i][ib] for (i, ia, ib) in labels[d])
            for d in range(n + 1)
        )
    types = None
    if a.types is not None and b.types is not None:
        types = tuple(
            tuple((a.types[i][ia][0] + b.types[d - i][ib][0], a.types[i][ia][1] + b.types[d - i][ib][1])
                  for (i, ia, ib) in labels[d])
            for d in range(n + 1)
        )
    return GradedArtinAlgebra(n, tuple(len(p) for p in labels), mult, monomials, types,
                              tuple(tuple(p) for p in labels))


def tensor_factor_ideal(t: GradedArtinAlgebra, second_factor: bool) -> IdealData:
    """
    Image of m_2 (second_factor=True, i.e. S1 ⊗ m2) or of m_1
    (S1's maximal ideal tensored with S2) inside a tensor product.
    """
    if t.factor_labels is None:
        raise ValueError("algebra is not a tensor product")
    pieces = {}
    for d in range(t.order + 1):
        vecs = []
        for idx, (i, _, _) in enumerate(t.factor_labels[d]):
            in_ideal = (d - i) >= 1 if second_factor else i >= 1
            if in_ideal:
                vecs.append(unit_vector(t.dims[d], idx))
        pieces[d] = Subspace.span(t.dims[d], vecs)
    return IdealData(pieces)


def check_algebra(a: GradedArtinAlgebra) -> CheckReport:
    """Exhaustive unit, commutativity, associativity and generation checks."""
    report = CheckReport("graded_artin_algebra")
    basis = [(k, i) for k in range(a.order + 1) for i in range(a.dims[k])]
    elements = {(k, i): a.basis_element(k, i) for (k, i) in basis}
    one = a.unit()
    for key, x in elements.items():
        if multiply(a, one, x) != x:
            report.fail("1 * x = x", {"basis": list(key)})
    for p, (kx, ix) in enumerate(basis):
        for (ky, iy) in basis[p:]:
            if kx + ky > a.order:
                continue
            xy = multiply(a, elements[(kx, ix)], elements[(ky, iy)])
            yx = multiply(a, elements[(ky, iy)], elements[(kx, ix)])
            if xy != yx:
                report.fail("xy = yx", {"x": [kx, ix], "y": [ky, iy]})
    for (kx, ix) in basis:
        if kx == 0:
            continue
        for (ky, iy) in basis:
            if ky == 0 or kx + ky > a.order:
                continue
            xy = multiply(a, elements[(kx, ix)], elements[(ky, iy)])
            for (kz, iz) in basis:
                if kz == 0 or kx + ky + kz > a.order:
                    continue
                left = multiply(a, xy, elements[(kz, iz)])
                right = multiply(a, elements[(kx, ix)], multiply(a, elements[(ky, iy)], elements[(kz, iz)]))
                if left != right:
                    report.fail("(xy)z = x(yz)", {"x": [kx, ix], "y": [ky, iy], "z": [kz, iz]})
    try:
        a.generation_data
    except ValueError as e:
        report.fail("generated in degree one", str(e))
    report.details["dims"] = list(a.dims)
    return report


@dataclass(frozen=True, eq=False)
class RingMorphism:
    """
    Local algebra map determined by the images of the Gr^1 basis.

    generator_images[i] is a flat element of target with no degree-0 part.
    """
    source: GradedArtinAlgebra
    target: GradedArtinAlgebra
    generator_images: Tuple[Vector, ...]

    def __post_init__(self):
        if len(self.generator_images) != self.source.dims[1]:
            raise ShapeMismatchError(
                f"{len(self.generator_images)} generator images for {self.source.dims[1]} generators")
        for img in self.generator_images:
            if len(img) != self.target.total_dim:
                raise ShapeMismatchError("generator image has the wrong length")
            if img[0]:
                raise ValueError("generator image has a constant term; local maps send m into m")

    @classmethod
    def identity(cls, a: GradedArtinAlgebra) -> "RingMorphism":
        return cls(a, a, tuple(a.generator(i) for i in range(a.dims[1])))

    @cached_property
    def basis_images(self) -> Tuple[Vector, ...]:
        """Images of every source basis element, by flat index."""
        src, tgt = self.source, self.target
        images: List[List[Vector]] = [[tgt.unit()]]
        if src.order >= 1:
            images.append(list(self.generator_images))
        decomposition = src.generation_data
        for k in range(2, src.order + 1):
            piece = []
            for a in range(src.dims[k]):
                acc = tgt.zero()
                for i, b, c in decomposition[k][a]:
                    prod = multiply(tgt, images[1][i], images[k - 1][b])
                    acc = tuple(x + c * y for x, y in zip(acc, prod))
                piece.append(acc)
            images.append(piece)
        return tuple(img for piece in images for img in piece)

    def apply(self, x: Sequence[Scalar]) -> Vector:
        if len(x) != self.source.total_dim:
            raise ShapeMismatchError("element does not belong to the source algebra")
        out = [ZERO] * self.target.total_dim
        for c, img in zip(x, self.basis_images):
            if c:
                for j, v in enumerate(img):
                    if v:
                        out[j] = out[j] + c * v
        return tuple(out)

    def compose(self, first: "RingMorphism") -> "RingMorphism":
        """self ∘ first."""
        return RingMorphism(first.source, self.target,
                            tuple(self.apply(img) for img in first.generator_images))

    def is_identity_on_gr1(self) -> bool:
        if self.source.dims != self.target.dims:
            return False
        for i, img in enumerate(self.generator_images):
            if self.target.component(img, 1) != unit_vector(self.target.dims[1], i):
                return False
        return True

    def is_identity(self) -> bool:
        return (self.source.dims == self.target.dims
                and all(img == self.target.generator(i) for i, img in enumerate(self.generator_images)))

    def check_multiplicative(self) -> CheckReport:
        """φ(xy) = φ(x)φ(y) on all pairs of basis elements."""
        report = CheckReport("ring_morphism")
        src = self.source
        images = self.basis_images
        for x in range(1, src.total_dim):
            kx, _ = src.degree_of_index[x]
            for y in range(x, src.total_dim):
                ky, _ = src.degree_of_index[y]
                lhs = self.apply(multiply(src, unit_vector(src.total_dim, x), unit_vector(src.total_dim, y)))
                rhs = multiply(self.target, images[x], images[y])
                if lhs != rhs:
                    report.fail("phi(xy) = phi(x)phi(y)", {"x": x, "y": y, "degrees": [kx, ky]})
        return report

    def to_json(self) -> Dict:
        labels = self.target.basis_labels()
        out = {}
        for i, img in enumerate(self.generator_images):
            out[f"t{i + 1}"] = {labels[j]: str(c) for j, c in enumerate(img) if c}
        return out
