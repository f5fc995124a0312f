"""
Input Models

pydantic models for job documents and the command-line job spec. Scalars
arrive as exact strings ("a/b", "a/b+c/d*i") or integers; floats are
rejected. Each section builds its domain object and reports problems as
InputValidationError with a JSON pointer into the document.
"""

from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictInt, StrictStr, ValidationError, field_validator

from app.config.config import COMMANDS, MAX_DGLA_DEGREE, DEFAULT_OUTPUT_DIR, DEFAULT_OUTPUT_FORMAT, DETERMINISTIC_DEFAULT
from app.services.deformation import CoefficientRing, TensorElement
from app.services.dgla_core import Augmentation, Dgla, Splitting, make_dgla
from app.services.exact_linalg import Matrix, Scalar, Subspace, Vector
from app.services.graded_artin import GradedArtinAlgebra, HodgeType, quotient_by_ideal, sym_truncated
from app.services.group_cohomology import Presentation, Representation, surface_presentation
from app.services.hodge_mhs import Filtration, PolarizationForm, TripleFiltered
from app.utils.errors import InputValidationError, ShapeMismatchError

ScalarIn = Union[StrictInt, StrictStr]
MatrixIn = List[List[ScalarIn]]
TypeIn = Tuple[int, int]


def pointer_from_loc(loc: Sequence[Any]) -> str:
    return "".join(f"/{part}" for part in loc)


def validation_error_to_input_error(error: ValidationError) -> InputValidationError:
    """First pydantic error as an InputValidationError; the rest go to the witness."""
    problems = [{"pointer": pointer_from_loc(e["loc"]), "message": e["msg"]} for e in error.errors()]
    first = problems[0] if problems else {"pointer": "", "message": str(error)}
    return InputValidationError(first["message"], pointer=first["pointer"], witness=problems)


def parse_scalar(value: ScalarIn, pointer: str) -> Scalar:
    try:
        return Scalar.coerce(value)
    except (ValueError, TypeError) as e:
        raise InputValidationError(str(e), pointer=pointer)


def parse_vector(values: Sequence[ScalarIn], pointer: str, length: Optional[int] = None) -> Vector:
    if length is not None and len(values) != length:
        raise InputValidationError(f"expected {length} entries, got {len(values)}", pointer=pointer)
    return tuple(parse_scalar(v, f"{pointer}/{i}") for i, v in enumerate(values))


def parse_matrix(rows: MatrixIn, pointer: str, shape: Optional[Tuple[int, int]] = None) -> Matrix:
    """
    Dense matrix from a list of rows; shape = (rows, cols) is enforced when given.
    An empty row list is read as a 0 x cols matrix.
    """
    if shape is not None and len(rows) != shape[0]:
        raise InputValidationError(f"expected {shape[0]} rows, got {len(rows)}", pointer=pointer)
    cols = shape[1] if shape is not None else (len(rows[0]) if rows else 0)
    parsed = [parse_vector(row, f"{pointer}/{r}", cols) for r, row in enumerate(rows)]
    return Matrix.from_rows(parsed, cols=cols)


def parse_index(key: str, pointer: str) -> int:
    try:
        return int(key)
    except ValueError:
        raise InputValidationError(f"index {key!r} is not an integer", pointer=pointer)


def parse_sparse(value: Dict[str, ScalarIn], pointer: str, length: int) -> List[Tuple[int, Scalar]]:
    entries = []
    for key, c in sorted(value.items(), key=lambda kv: kv[0]):
        try:
            idx = int(key)
        except ValueError:
            raise InputValidationError(f"index {key!r} is not an integer", pointer=f"{pointer}/{key}")
        if not 0 <= idx < length:
            raise InputValidationError(f"index {idx} outside 0..{length - 1}", pointer=f"{pointer}/{key}")
        entries.append((idx, parse_scalar(c, f"{pointer}/{key}")))
    return entries


class InputModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PresentationInput(InputModel):
    generators: Optional[int] = Field(default=None, ge=0)
    relations: List[List[int]] = []
    surface_genus: Optional[int] = Field(default=None, ge=0)

    def build(self) -> Presentation:
        if self.surface_genus is not None:
            return surface_presentation(self.surface_genus)
        if self.generators is None:
            raise InputValidationError("either generators or surface_genus is required",
                                       pointer="/presentation")
        return Presentation(self.generators, tuple(tuple(word) for word in self.relations))


class RepresentationInput(InputModel):
    matrices: List[MatrixIn]
    subalgebra: Optional[List[MatrixIn]] = None

    def build(self, p: Presentation) -> Representation:
        if len(self.matrices) != p.generator_count:
            raise InputValidationError(f"{len(self.matrices)} matrices for {p.generator_count} generators",
                                       pointer="/representation/matrices")
        size = len(self.matrices[0]) if self.matrices else 0
        images = []
        for g, rows in enumerate(self.matrices):
            m = parse_matrix(rows, f"/representation/matrices/{g}", (size, size))
            if not m.determinant():
                raise InputValidationError("matrix is not invertible", pointer=f"/representation/matrices/{g}")
            images.append(m)
        lie = None
        if self.subalgebra is not None:
            flat = []
            for b, rows in enumerate(self.subalgebra):
                m = parse_matrix(rows, f"/representation/subalgebra/{b}", (size, size))
                flat.append(tuple(c for row in m.to_rows() for c in row))
            lie = Subspace.span(size * size, flat)
        return Representation(tuple(images), lie)


class BracketEntry(InputModel):
    degrees: Tuple[int, int]
    basis: Tuple[int, int]
    value: Dict[str, ScalarIn]


class DglaInput(InputModel):
    dims: List[int] = Field(min_length=1)
    d: Optional[List[MatrixIn]] = None
    d1: Optional[List[MatrixIn]] = None
    d2: Optional[List[MatrixIn]] = None
    bracket: List[BracketEntry] = []
    types: Optional[List[List[TypeIn]]] = None
    complete_antisymmetry: bool = True

    @field_validator("dims")
    @classmethod
    def _dims_non_negative(cls, dims: List[int]) -> List[int]:
        if any(d < 0 for d in dims):
            raise ValueError("dimensions must be non-negative")
        if len(dims) - 1 > MAX_DGLA_DEGREE:
            raise ValueError(f"degrees above {MAX_DGLA_DEGREE} are not supported")
        return dims

    def _differentials(self, name: str) -> Optional[List[Matrix]]:
        maps = getattr(self, name)
        if maps is None:
            return None
        if len(maps) != len(self.dims) - 1:
            raise InputValidationError(f"{name} needs one matrix per degree below the top", pointer=f"/dgla/{name}")
        return [parse_matrix(rows, f"/dgla/{name}/{i}", (self.dims[i + 1], self.dims[i]))
                for i, rows in enumerate(maps)]

    def build(self) -> Dgla:
        d = self._differentials("d")
        d1 = self._differentials("d1")
        d2 = self._differentials("d2")
        if (d1 is None) != (d2 is None):
            raise InputValidationError("d1 and d2 must be given together", pointer="/dgla")
        top = len(self.dims) - 1
        brackets = []
        for n, entry in enumerate(self.bracket):
            pointer = f"/dgla/bracket/{n}"
            i, j = entry.degrees
            a, b = entry.basis
            if not (0 <= i <= top and 0 <= j <= top and 0 <= a < self.dims[i] and 0 <= b < self.dims[j]):
                raise InputValidationError("bracket entry outside the basis", pointer=pointer)
            if i + j > top:
                raise InputValidationError(f"bracket lands in degree {i + j} above the top", pointer=pointer)
            brackets.append((i, a, j, b, parse_sparse(entry.value, f"{pointer}/value", self.dims[i + j])))
        if self.types is not None:
            if [len(piece) for piece in self.types] != list(self.dims):
                raise InputValidationError("one Hodge type per basis vector is required", pointer="/dgla/types")
        return make_dgla(self.dims, d, brackets, d1, d2, self.types, self.complete_antisymmetry)


class SplittingInput(InputModel):
    delta: Dict[str, MatrixIn] = {}
    delta_g: Optional[MatrixIn] = None

    def build(self, l: Dgla, g_dim: Optional[int] = None) -> Splitting:
        maps = {}
        for key, rows in self.delta.items():
            pointer = f"/splitting/delta/{key}"
            try:
                i = int(key)
            except ValueError:
                raise InputValidationError(f"degree {key!r} is not an integer", pointer=pointer)
            if not 1 <= i <= l.max_degree:
                raise InputValidationError(f"degree {i} outside 1..{l.max_degree}", pointer=pointer)
            maps[i] = parse_matrix(rows, pointer, (l.dims[i - 1], l.dims[i]))
        delta_g = None
        if self.delta_g is not None:
            if g_dim is None:
                raise InputValidationError("delta_g needs an augmentation section", pointer="/splitting/delta_g")
            delta_g = parse_matrix(self.delta_g, "/splitting/delta_g", (l.dims[0], g_dim))
        return Splitting.from_maps(l, maps, delta_g)


class GBracketEntry(InputModel):
    basis: Tuple[int, int]
    value: Dict[str, ScalarIn]


class AugmentationInput(InputModel):
    g_dim: int = Field(ge=0)
    g_bracket: List[GBracketEntry] = []
    eps: MatrixIn

    def build(self, l: Dgla) -> Augmentation:
        table = {}
        for n, entry in enumerate(self.g_bracket):
            pointer = f"/augmentation/g_bracket/{n}"
            a, b = entry.basis
            if not (0 <= a < self.g_dim and 0 <= b < self.g_dim):
                raise InputValidationError("bracket entry outside g", pointer=pointer)
            value = tuple(parse_sparse(entry.value, f"{pointer}/value", self.g_dim))
            table[(a, b)] = value
            if (b, a) not in table:
                table[(b, a)] = tuple((idx, -c) for idx, c in value)
        eps = parse_matrix(self.eps, "/augmentation/eps", (self.g_dim, l.dims[0]))
        return Augmentation(self.g_dim, table, eps)


class AlgebraInput(InputModel):
    """
    Either a quotient of the truncated symmetric algebra (generators, ideal)
    or explicit multiplication tables (dims, products keyed "j,k").
    """
    order: int = Field(ge=0)
    generators: Optional[int] = Field(default=None, ge=0)
    generator_types: Optional[List[TypeIn]] = None
    ideal: Dict[str, List[List[ScalarIn]]] = {}
    dims: Optional[List[int]] = None
    products: Dict[str, List[List[List[Tuple[int, ScalarIn]]]]] = {}
    types: Optional[List[List[TypeIn]]] = None

    def build(self) -> GradedArtinAlgebra:
        if self.generators is not None:
            free = sym_truncated(self.generators, self.order, self.generator_types)
            gens = {}
            for key, vecs in self.ideal.items():
                pointer = f"/algebra/ideal/{key}"
                d = int(key) if key.isdigit() else -1
                if not 2 <= d <= self.order:
                    raise InputValidationError(f"ideal degree {key!r} outside 2..{self.order}", pointer=pointer)
                gens[d] = [parse_vector(v, f"{pointer}/{i}", free.dims[d]) for i, v in enumerate(vecs)]
            if not gens:
                return free
            quotient, _, _ = quotient_by_ideal(free, gens)
            return quotient
        if self.dims is None:
            raise InputValidationError("either generators or dims is required", pointer="/algebra")
        if len(self.dims) != self.order + 1 or (self.dims and self.dims[0] != 1):
            raise InputValidationError("dims must list Gr^0..Gr^order with Gr^0 of dimension 1",
                                       pointer="/algebra/dims")
        products = {}
        for key, table in self.products.items():
            pointer = f"/algebra/products/{key}"
            try:
                j, k = (int(part) for part in key.split(","))
            except ValueError:
                raise InputValidationError(f"product key {key!r} is not 'j,k'", pointer=pointer)
            if j + k > self.order or j < 1 or k < 1:
                raise InputValidationError(f"product degrees ({j},{k}) outside the truncation", pointer=pointer)
            products[(j, k)] = [[[(idx, parse_scalar(c, f"{pointer}/{a}/{b}")) for idx, c in entry]
                                 for b, entry in enumerate(row)] for a, row in enumerate(table)]
        try:
            return GradedArtinAlgebra.from_tables(self.order, self.dims, products, self.types)
        except ShapeMismatchError as e:
            raise InputValidationError(str(e), pointer="/algebra/products")


class TripleInput(InputModel):
    dim: int = Field(ge=0)
    W: Dict[str, List[List[ScalarIn]]] = {}
    F: Dict[str, List[List[ScalarIn]]] = {}
    G: Dict[str, List[List[ScalarIn]]] = {}

    def build(self, pointer: str) -> TripleFiltered:
        def flag(name: str, decreasing: bool) -> Filtration:
            steps = {}
            for key, rows in getattr(self, name).items():
                try:
                    k = int(key)
                except ValueError:
                    raise InputValidationError(f"filtration index {key!r} is not an integer",
                                               pointer=f"{pointer}/{name}/{key}")
                vecs = [parse_vector(v, f"{pointer}/{name}/{key}/{i}", self.dim) for i, v in enumerate(rows)]
                steps[k] = Subspace.span(self.dim, vecs)
            return Filtration(self.dim, steps or {0: Subspace.full(self.dim)}, decreasing)

        return TripleFiltered(self.dim, flag("W", False), flag("F", True), flag("G", True))


class FiltrationInput(InputModel):
    decreasing: bool = True
    steps: Dict[str, List[List[ScalarIn]]]

    def build(self, dim: int, pointer: str) -> Filtration:
        steps = {}
        for key, rows in self.steps.items():
            vecs = [parse_vector(v, f"{pointer}/steps/{key}/{i}", dim) for i, v in enumerate(rows)]
            steps[parse_index(key, f"{pointer}/steps/{key}")] = Subspace.span(dim, vecs)
        return Filtration(dim, steps, self.decreasing)


class MhsInput(InputModel):
    """Sections for mhs-check: a triple to test, and/or an MHS on Gr^1 of the algebra section."""
    structure: Optional[TripleInput] = None
    polarizations: Dict[str, MatrixIn] = {}
    u_filtration: Optional[FiltrationInput] = None
    twist: Optional[MatrixIn] = None
    gr1: Optional[TripleInput] = None
    k_sub: Optional[List[List[ScalarIn]]] = None
    given: Optional[TripleInput] = None
    automorphism: Optional[List[List[ScalarIn]]] = None

    def polarization_forms(self, v: TripleFiltered) -> Dict[int, PolarizationForm]:
        forms = {}
        for key, rows in self.polarizations.items():
            pointer = f"/mhs/polarizations/{key}"
            k = parse_index(key, pointer)
            dim = v.gr_w(k).dim
            try:
                forms[k] = PolarizationForm(parse_matrix(rows, pointer, (dim, dim)))
            except InputValidationError as e:
                raise InputValidationError(str(e), pointer=pointer)
        return forms


class FiberInput(InputModel):
    types: List[TypeIn]
    action: List[MatrixIn]

    def build(self, e: Dgla) -> Tuple[List[HodgeType], List[Matrix]]:
        n = len(self.types)
        if len(self.action) != e.dims[0]:
            raise InputValidationError(f"{len(self.action)} action matrices for dim E^0 = {e.dims[0]}",
                                       pointer="/fiber/action")
        action = [parse_matrix(rows, f"/fiber/action/{a}", (n, n)) for a, rows in enumerate(self.action)]
        return [tuple(t) for t in self.types], action


class HodgeInput(InputModel):
    h0_types: List[TypeIn] = []
    h1_types: List[TypeIn] = []
    h2_types: List[TypeIn] = []
    s1_types: Optional[List[TypeIn]] = None


class TensorInput(InputModel):
    degree: int = 0
    components: Dict[str, MatrixIn] = {}

    def build(self, rows: int, ring: CoefficientRing, pointer: str) -> TensorElement:
        blocks = {}
        for key, block in self.components.items():
            k = parse_index(key, f"{pointer}/components/{key}")
            if k not in ring.maximal_ideal_degrees:
                raise InputValidationError(f"component degree {k} outside 1..{ring.order}",
                                           pointer=f"{pointer}/components/{key}")
            blocks[k] = parse_matrix(block, f"{pointer}/components/{key}", (rows, ring.algebra.dims[k]))
        return TensorElement.from_components(self.degree, rows, ring, blocks)


class FramingsInput(InputModel):
    f: Optional[TensorInput] = None
    g: Optional[TensorInput] = None
    w: Optional[TensorInput] = None


class JobDocument(InputModel):
    """Top-level input document; each command reads the sections it needs."""
    presentation: Optional[PresentationInput] = None
    representation: Optional[RepresentationInput] = None
    dgla: Optional[DglaInput] = None
    splitting: Optional[SplittingInput] = None
    augmentation: Optional[AugmentationInput] = None
    algebra: Optional[AlgebraInput] = None
    mhs: Optional[MhsInput] = None
    fiber: Optional[FiberInput] = None
    hodge: Optional[HodgeInput] = None
    framings: Optional[FramingsInput] = None
    pairing: Optional[MatrixIn] = None


class JobSpec(BaseModel):
    """One CLI invocation."""
    command: Literal["cohomology", "cone", "artin", "mhs-check", "mc", "vmhs", "compare-gauge"]
    input_path: str
    order: int = Field(default=2, ge=0)
    respect_grading: bool = False
    transversal: str = "hodge"
    deterministic: bool = DETERMINISTIC_DEFAULT
    out: str = DEFAULT_OUTPUT_DIR
    output_format: Literal["json", "text"] = DEFAULT_OUTPUT_FORMAT
    log_level: Optional[str] = None

    @field_validator("command")
    @classmethod
    def _known_command(cls, command: str) -> str:
        if command not in COMMANDS:
            raise ValueError(f"unknown command {command!r}")
        return command

    @field_validator("transversal")
    @classmethod
    def _transversal_choice(cls, value: str) -> str:
        if value != "hodge" and not (value.startswith("file:") and len(value) > len("file:")):
            raise ValueError("transversal must be 'hodge' or 'file:PATH'")
        return value

    @property
    def transversal_file(self) -> Optional[str]:
        return self.transversal[len("file:"):] if self.transversal.startswith("file:") else None
