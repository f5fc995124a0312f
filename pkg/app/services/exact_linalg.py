"""
Exact Linear Algebra

Gaussian-rational scalars, dense matrices, row reduction, kernels,
canonical particular solutions and subspace arithmetic. Every other
service module computes on top of these types.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from app.utils.errors import ContainmentError, ShapeMismatchError
from app.utils.logging.component_loggers import get_linalg_logger

logger = get_linalg_logger(__name__)

_SCALAR_PATTERN = re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)?"
    r"(?:\s*(?P<sign>[+-])?\s*(?P<im>\d+(?:/\d+)?)\s*\*\s*i)?\s*$"
)


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("floating-point values are not exact; pass a Fraction or a string")
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


class Scalar:
    """An element re + im*i of Q(i). Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re_part=0, im_part=0):
        object.__setattr__(self, "re", _to_fraction(re_part))
        object.__setattr__(self, "im", _to_fraction(im_part))

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @classmethod
    def coerce(cls, value) -> "Scalar":
        """Convert ints, Fractions and serialized strings to a Scalar."""
        if isinstance(value, Scalar):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        return cls(_to_fraction(value))

    @classmethod
    def parse(cls, text: str) -> "Scalar":
        """
        Parse "a/b", "a/b+c/d*i" or "c/d*i".

        Raises:
            ValueError: malformed text or zero denominator
        """
        match = _SCALAR_PATTERN.match(text)
        if not match or (match.group("re") is None and match.group("im") is None):
            raise ValueError(f"malformed scalar: {text!r}")
        re_text, sign, im_text = match.group("re"), match.group("sign"), match.group("im")
        if re_text is not None and im_text is not None and sign is None:
            raise ValueError(f"malformed scalar (missing sign before imaginary part): {text!r}")
        try:
            re_part = Fraction(re_text) if re_text is not None else Fraction(0)
            im_part = Fraction(im_text) if im_text is not None else Fraction(0)
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in scalar: {text!r}")
        if sign == "-":
            im_part = -im_part
        return cls(re_part, im_part)

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        other = _maybe_scalar(other)
        if other is None:
            return NotImplemented
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _maybe_scalar(other)
        if other is None:
            return NotImplemented
        return Scalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _maybe_scalar(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _maybe_scalar(other)
        if other is None:
            return NotImplemented
        if not self.im and not other.im:
            return Scalar(self.re * other.re)
        return Scalar(self.re * other.re - self.im * other.im,
                      self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _maybe_scalar(other)
        if other is None:
            return NotImplemented
        if not other:
            raise ZeroDivisionError("division by zero scalar")
        if not other.im:
            return Scalar(self.re / other.re, self.im / other.re)
        norm = other.re * other.re + other.im * other.im
        num = self * other.conj()
        return Scalar(num.re / norm, num.im / norm)

    def __rtruediv__(self, other):
        other = _maybe_scalar(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _maybe_scalar(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __str__(self):
        text = f"{self.re.numerator}/{self.re.denominator}"
        if self.im:
            sign = "+" if self.im > 0 else "-"
            im_abs = abs(self.im)
            text += f"{sign}{im_abs.numerator}/{im_abs.denominator}*i"
        return text

    def __repr__(self):
        return f"Scalar({str(self)!r})"


def _maybe_scalar(value) -> Optional[Scalar]:
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction)):
        return Scalar(value)
    return None


ZERO = Scalar(0)
ONE = Scalar(1)
I = Scalar(0, 1)

Vector = Tuple[Scalar, ...]
ScalarLike = Union[Scalar, int, Fraction, str]


# Vector helpers

def vector(values: Iterable[ScalarLike]) -> Vector:
    return tuple(Scalar.coerce(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(ONE if k == i else ZERO for k in range(n))


def vec_add(x: Sequence[Scalar], y: Sequence[Scalar]) -> Vector:
    if len(x) != len(y):
        raise ShapeMismatchError(f"vector lengths {len(x)} and {len(y)} differ")
    return tuple(a + b for a, b in zip(x, y))


def vec_sub(x: Sequence[Scalar], y: Sequence[Scalar]) -> Vector:
    if len(x) != len(y):
        raise ShapeMismatchError(f"vector lengths {len(x)} and {len(y)} differ")
    return tuple(a - b for a, b in zip(x, y))


def vec_scale(c: ScalarLike, x: Sequence[Scalar]) -> Vector:
    c = Scalar.coerce(c)
    if not c:
        return zero_vector(len(x))
    return tuple(c * a for a in x)


def is_zero_vector(x: Sequence[Scalar]) -> bool:
    return not any(x)


def vec_to_json(x: Sequence[Scalar]) -> List[str]:
    return [str(a) for a in x]


def vec_from_json(data: Sequence) -> Vector:
    return vector(data)


def hermitian_pairing(x: Sequence[Scalar], form: "Matrix", y: Sequence[Scalar]) -> Scalar:
    """S(x, y) = x^T S conj(y)."""
    return sum((a * b for a, b in zip(x, form.apply(tuple(c.conj() for c in y)))), ZERO)


class Matrix:
    """Dense row-major matrix over Q(i), acting on column vectors."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[ScalarLike]):
        entries = tuple(Scalar.coerce(e) for e in entries)
        if rows < 0 or cols < 0 or len(entries) != rows * cols:
            raise ShapeMismatchError(
                f"{len(entries)} entries cannot fill a {rows}x{cols} matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # Constructors

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[ScalarLike]], cols: Optional[int] = None) -> "Matrix":
        rows = list(rows)
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        for r in rows:
            if len(r) != width:
                raise ShapeMismatchError(f"row of length {len(r)} in a matrix of width {width}")
        return cls(len(rows), width, [e for r in rows for e in r])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[ScalarLike]], rows: Optional[int] = None) -> "Matrix":
        columns = list(columns)
        height = rows if rows is not None else (len(columns[0]) if columns else 0)
        return cls.from_rows(columns, cols=height).transpose() if columns else cls.zeros(height, 0)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, (ZERO,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence[ScalarLike]) -> "Matrix":
        n = len(values)
        return cls(n, n, [values[i] if i == j else ZERO for i in range(n) for j in range(n)])

    # Access

    def __getitem__(self, index: Tuple[int, int]) -> Scalar:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> List[List[Scalar]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def row_vectors(self) -> List[Vector]:
        return [self.row(i) for i in range(self.rows)]

    def column_vectors(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    # Arithmetic

    def transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      [self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)])

    def conj_transpose(self) -> "Matrix":
        return Matrix(self.cols, self.rows,
                      [self.entries[i * self.cols + j].conj() for j in range(self.cols) for i in range(self.rows)])

    def _check_same_shape(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise ShapeMismatchError(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols, [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        return Matrix(self.rows, self.cols, [a - b for a, b in zip(self.entries, other.entries)])

    def __neg__(self) -> "Matrix":
        return Matrix(self.rows, self.cols, [-a for a in self.entries])

    def scale(self, c: ScalarLike) -> "Matrix":
        c = Scalar.coerce(c)
        return Matrix(self.rows, self.cols, [c * a for a in self.entries])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ShapeMismatchError(f"cannot multiply {self.shape} by {other.shape}")
        out = [[ZERO] * other.cols for _ in range(self.rows)]
        other_rows = other.to_rows()
        for i in range(self.rows):
            acc = out[i]
            for k, a in enumerate(self.row(i)):
                if not a:
                    continue
                for j, b in enumerate(other_rows[k]):
                    if b:
                        acc[j] = acc[j] + a * b
        return Matrix.from_rows(out, cols=other.cols)

    def apply(self, v: Sequence[Scalar]) -> Vector:
        if len(v) != self.cols:
            raise ShapeMismatchError(f"vector of length {len(v)} for a {self.shape} matrix")
        result = []
        for i in range(self.rows):
            acc = ZERO
            for a, b in zip(self.row(i), v):
                if a and b:
                    acc = acc + a * b
            result.append(acc)
        return tuple(result)

    def power(self, k: int) -> "Matrix":
        result = Matrix.identity(self.rows)
        for _ in range(k):
            result = result @ self
        return result

    def hstack(self, *others: "Matrix") -> "Matrix":
        rows = self.to_rows()
        for o in others:
            if o.rows != self.rows:
                raise ShapeMismatchError("hstack needs equal row counts")
            for i in range(self.rows):
                rows[i].extend(o.row(i))
        return Matrix.from_rows(rows, cols=self.cols + sum(o.cols for o in others))

    def vstack(self, *others: "Matrix") -> "Matrix":
        entries = list(self.entries)
        rows = self.rows
        for o in others:
            if o.cols != self.cols:
                raise ShapeMismatchError("vstack needs equal column counts")
            entries.extend(o.entries)
            rows += o.rows
        return Matrix(rows, self.cols, entries)

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> "Matrix":
        return Matrix(len(row_indices), len(col_indices),
                      [self[i, j] for i in row_indices for j in col_indices])

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product; index (i*other.rows + k, j*other.cols + l)."""
        rows = self.rows * other.rows
        cols = self.cols * other.cols
        entries = [ZERO] * (rows * cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self[i, j]
                if not a:
                    continue
                for k in range(other.rows):
                    for l in range(other.cols):
                        b = other[k, l]
                        if b:
                            entries[(i * other.rows + k) * cols + j * other.cols + l] = a * b
        return Matrix(rows, cols, entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == Matrix.identity(self.rows)

    def is_hermitian(self) -> bool:
        return self.rows == self.cols and self == self.conj_transpose()

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"

    # Serialization

    def to_json(self) -> List[List[str]]:
        return [[str(a) for a in self.row(i)] for i in range(self.rows)]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[str]], cols: Optional[int] = None) -> "Matrix":
        return cls.from_rows([[Scalar.coerce(a) for a in r] for r in data], cols=cols)

    # Derived quantities

    def rank(self) -> int:
        return rref_rank(self)[1]

    def determinant(self) -> Scalar:
        if self.rows != self.cols:
            raise ShapeMismatchError("determinant of a non-square matrix")
        rows = self.to_rows()
        n = self.rows
        det = ONE
        for c in range(n):
            piv = next((r for r in range(c, n) if rows[r][c]), None)
            if piv is None:
                return ZERO
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                det = -det
            p = rows[c][c]
            det = det * p
            for r in range(c + 1, n):
                f = rows[r][c]
                if f:
                    f = f / p
                    rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
        return det

    def inverse(self) -> "Matrix":
        """Raises ValueError on a singular matrix."""
        if self.rows != self.cols:
            raise ShapeMismatchError("inverse of a non-square matrix")
        n = self.rows
        work = self.hstack(Matrix.identity(n)).to_rows()
        pivots = _reduce(work, n)
        if len(pivots) != n:
            raise ValueError("matrix is singular")
        return Matrix.from_rows([r[n:] for r in work], cols=n)

    def matrix_exp_nilpotent(self) -> "Matrix":
        """exp(N) for nilpotent N as the finite series sum N^k/k!."""
        if self.rows != self.cols:
            raise ShapeMismatchError("exponential of a non-square matrix")
        n = self.rows
        result = Matrix.identity(n)
        term = Matrix.identity(n)
        for k in range(1, n + 1):
            term = (term @ self).scale(Scalar(Fraction(1, k)))
            if term.is_zero():
                return result
            result = result + term
        if not (term @ self).is_zero():
            raise ValueError("matrix is not nilpotent")
        return result


def kron(a: Matrix, b: Matrix) -> Matrix:
    return a.kron(b)


def block_diagonal(blocks: Sequence[Matrix]) -> Matrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    entries = [ZERO] * (rows * cols)
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                entries[(r0 + i) * cols + c0 + j] = b[i, j]
        r0 += b.rows
        c0 += b.cols
    return Matrix(rows, cols, entries)


# Row reduction

def _reduce(rows: List[List[Scalar]], pivot_limit: int) -> List[int]:
    """
    In-place Gauss-Jordan elimination searching pivots only in the first
    pivot_limit columns. Returns the pivot columns.
    """
    pivots: List[int] = []
    r = 0
    nrows = len(rows)
    for c in range(pivot_limit):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][c]
        if lead != ONE:
            inv = ONE / lead
            rows[r] = [x * inv if x else x for x in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    rows[i] = [a - f * b if b else a for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return pivots


def rref(m: Matrix) -> Tuple[Matrix, List[int]]:
    """Reduced row-echelon form and its pivot columns."""
    work = m.to_rows()
    pivots = _reduce(work, m.cols)
    return Matrix.from_rows(work, cols=m.cols), pivots


def rref_rank(m: Matrix) -> Tuple[Matrix, int]:
    """Reduced row-echelon form and rank."""
    reduced, pivots = rref(m)
    return reduced, len(pivots)


def rank(m: Matrix) -> int:
    return rref_rank(m)[1]


def kernel_basis(m: Matrix) -> "Subspace":
    """
    Basis of {v : m v = 0}: one vector per free column f with v[f] = 1
    and v[pivot_r] = -R[r][f].
    """
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    basis = []
    for f in range(m.cols):
        if f in pivot_set:
            continue
        v = [ZERO] * m.cols
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -reduced[r, f]
        basis.append(v)
    return Subspace(m.cols, Matrix.from_rows(basis, cols=m.cols))


def solve_particular(m: Matrix, b: Sequence[Scalar]) -> Optional[Vector]:
    """
    Canonical particular solution of m x = b with zeros in every
    non-pivot coordinate, or None when the system is inconsistent.
    """
    if len(b) != m.rows:
        raise ShapeMismatchError(f"right-hand side of length {len(b)} for {m.rows} equations")
    return solve_columns(m, [b])[0]


def solve_columns(m: Matrix, rhs: Sequence[Sequence[Scalar]]) -> List[Optional[Vector]]:
    """Canonical particular solutions for several right-hand sides at once."""
    k = len(rhs)
    for b in rhs:
        if len(b) != m.rows:
            raise ShapeMismatchError(f"right-hand side of length {len(b)} for {m.rows} equations")
    work = [list(m.row(i)) + [Scalar.coerce(b[i]) for b in rhs] for i in range(m.rows)]
    pivots = _reduce(work, m.cols)
    rk = len(pivots)
    solutions: List[Optional[Vector]] = []
    for col in range(k):
        if any(work[r][m.cols + col] for r in range(rk, m.rows)):
            solutions.append(None)
            continue
        x = [ZERO] * m.cols
        for r, p in enumerate(pivots):
            x[p] = work[r][m.cols + col]
        solutions.append(tuple(x))
    return solutions


class _EchelonBuilder:
    """Incremental echelon basis; add() reports whether a vector was new."""

    def __init__(self, n: int):
        self.n = n
        self.rows: List[Tuple[int, List[Scalar]]] = []

    def reduce(self, v: Sequence[Scalar]) -> List[Scalar]:
        w = list(v)
        for p, row in self.rows:
            f = w[p]
            if f:
                w = [a - f * b if b else a for a, b in zip(w, row)]
        return w

    def add(self, v: Sequence[Scalar]) -> bool:
        w = self.reduce(v)
        p = next((i for i, a in enumerate(w) if a), None)
        if p is None:
            return False
        inv = ONE / w[p]
        self.rows.append((p, [a * inv for a in w]))
        return True

    def __len__(self):
        return len(self.rows)


@dataclass(frozen=True, eq=False)
class Subspace:
    """
    Subspace of Q(i)^ambient_dim spanned by the rows of basis.

    The rows are linearly independent; use span() for arbitrary generators.
    """
    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.cols != self.ambient_dim:
            raise ShapeMismatchError(
                f"basis vectors of length {self.basis.cols} in ambient dimension {self.ambient_dim}")

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Sequence[ScalarLike]]) -> "Subspace":
        """Canonical basis: the nonzero rows of the reduced row-echelon form."""
        rows = [list(vector(v)) for v in vectors]
        if not rows:
            return cls.zero(ambient_dim)
        pivots = _reduce(rows, ambient_dim)
        return cls(ambient_dim, Matrix.from_rows(rows[:len(pivots)], cols=ambient_dim))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.zeros(0, ambient_dim))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.identity(ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> List[Vector]:
        return self.basis.row_vectors()

    def coordinates(self, v: Sequence[Scalar]) -> Optional[Vector]:
        """Coordinates of v in this basis, or None when v is outside."""
        if len(v) != self.ambient_dim:
            raise ShapeMismatchError(f"vector of length {len(v)} in ambient dimension {self.ambient_dim}")
        if self.dim == 0:
            return () if is_zero_vector(v) else None
        return solve_particular(self.basis.transpose(), v)

    def contains(self, v: Sequence[Scalar]) -> bool:
        return self.coordinates(v) is not None

    def contains_subspace(self, other: "Subspace") -> bool:
        if other.dim == 0:
            return True
        if self.dim == 0:
            return False
        solutions = solve_columns(self.basis.transpose(), other.vectors())
        return all(s is not None for s in solutions)

    def equals(self, other: "Subspace") -> bool:
        return (self.ambient_dim == other.ambient_dim and self.dim == other.dim
                and self.contains_subspace(other))

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.ambient_dim, self.vectors() + other.vectors())

    def intersect(self, other: "Subspace") -> "Subspace":
        """U ∩ V from the kernel of [U^T | -V^T]."""
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        stacked = self.basis.transpose().hstack(-other.basis.transpose())
        kernel = kernel_basis(stacked)
        vecs = []
        for coeffs in kernel.vectors():
            u_part = coeffs[:self.dim]
            vecs.append(self.basis.transpose().apply(u_part))
        return Subspace.span(self.ambient_dim, vecs)

    def image(self, m: Matrix) -> "Subspace":
        if m.cols != self.ambient_dim:
            raise ShapeMismatchError(f"{m.shape} matrix applied to ambient dimension {self.ambient_dim}")
        return Subspace.span(m.rows, [m.apply(v) for v in self.vectors()])

    def preimage(self, m: Matrix) -> "Subspace":
        """{v : m v in self}."""
        if m.rows != self.ambient_dim:
            raise ShapeMismatchError(f"{m.shape} matrix into ambient dimension {self.ambient_dim}")
        if self.dim == 0:
            return kernel_basis(m)
        stacked = m.hstack(-self.basis.transpose())
        kernel = kernel_basis(stacked)
        return Subspace.span(m.cols, [k[:m.cols] for k in kernel.vectors()])

    def to_json(self) -> List[List[str]]:
        return self.basis.to_json()

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def split_complement(sub: Subspace, inside: Subspace) -> Subspace:
    """
    Deterministic complement C with sub ⊕ C = inside.

    Candidates are the standard basis vectors when inside is the whole
    space, otherwise the canonical basis of inside; the earliest ones
    independent of what is already chosen are kept.

    Raises:
        ContainmentError: sub is not contained in inside
    """
    if sub.ambient_dim != inside.ambient_dim:
        raise ShapeMismatchError("subspaces live in different ambient spaces")
    if not inside.contains_subspace(sub):
        raise ContainmentError("subspace is not contained in the enclosing space",
                               witness={"sub_dim": sub.dim, "inside_dim": inside.dim})
    n = sub.ambient_dim
    if inside.dim == n:
        candidates = [unit_vector(n, i) for i in range(n)]
    else:
        candidates = Subspace.span(n, inside.vectors()).vectors()
    builder = _EchelonBuilder(n)
    for v in sub.vectors():
        builder.add(v)
    chosen = []
    target = inside.dim
    for c in candidates:
        if len(builder) == target:
            break
        if builder.add(c):
            chosen.append(c)
    return Subspace(n, Matrix.from_rows(chosen, cols=n))


def complement_projector(sub: Subspace, complement: Subspace) -> Tuple[Matrix, Matrix]:
    """
    For V = sub ⊕ complement (both spanning the ambient space), the
    coordinate maps onto the sub basis and onto the complement basis.
    """
    n = sub.ambient_dim
    if sub.dim + complement.dim != n:
        raise ShapeMismatchError("subspace and complement do not span the ambient space")
    change = sub.basis.vstack(complement.basis).transpose()
    coords = change.inverse()
    sub_rows = list(range(sub.dim))
    comp_rows = list(range(sub.dim, n))
    return coords.submatrix(sub_rows, list(range(n))), coords.submatrix(comp_rows, list(range(n)))


def leading_principal_minors(m: Matrix) -> List[Scalar]:
    """Determinants of the k x k leading principal submatrices, k = 1..n."""
    return [m.submatrix(list(range(k)), list(range(k))).determinant() for k in range(1, m.rows + 1)]


def is_positive_definite_hermitian(m: Matrix) -> bool:
    """Sylvester's criterion on an exact hermitian matrix."""
    if not m.is_hermitian():
        return False
    for minor in leading_principal_minors(m):
        if not minor.is_real or minor.re <= 0:
            return False
    return True
