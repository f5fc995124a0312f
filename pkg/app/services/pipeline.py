"""
Job Pipeline

Builds the domain objects a command needs from a job document, runs the
command's computations and collects their check reports. Composition
across commands happens through report files, not shared state.
"""

import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from app.config.config import BRUTE_FORCE_MAX_ORDER, EXIT_CHECK_FAILED, EXIT_IO_ERROR, EXIT_OK
from app.models import (
    JobDocument,
    JobSpec,
    parse_matrix,
    parse_vector,
    validation_error_to_input_error,
)
from app.services.deformation import (
    GMProduct,
    KuranishiResult,
    brute_force_iso_classes,
    functor_points_match,
    ideal_generated_in_degree_two,
    kuranishi,
    preferred_gm_product,
)
from app.services.dgla_core import (
    Augmentation,
    Dgla,
    Splitting,
    check_augmentation,
    check_splitting,
    cohomology,
    validate,
)
from app.services.exact_linalg import Matrix, Subspace
from app.services.graded_artin import (
    GradedArtinAlgebra,
    RingMorphism,
    check_algebra,
    maximal_ideal_power,
    weight_filtration,
)
from app.services.group_cohomology import (
    Presentation,
    RepCohomology,
    Representation,
    bar_oracle_cup,
    cup_cochain,
    cup_obstruction,
    rep_cohomology,
    to_formal_dgla,
    validate_rep,
)
from app.services.hodge_mhs import (
    TripleFiltered,
    check_mhs,
    lemma_4f_check,
    mhalg_assemble,
    mhs_on_orho,
    multiplication_kernel,
    same_graded,
    split_mhs_on_cone,
    twist,
)
from app.services.mc_vmhs import (
    FormalityModel,
    alpha_recursion,
    alpha_v_recursion,
    build_formality_model,
    fiber_vmhs_check,
    flatness_check,
    gauge_compare,
    hodge_type_check,
)
from app.services.report_writer import build_report, emit_report
from app.utils.check_report import CheckReport
from app.utils.errors import DeformationError, InputValidationError, ModelHypothesisError
from app.utils.file_handlers import read_json_document, validate_input_file
from app.utils.logging.component_loggers import get_cli_logger, log_function_calls, log_performance_event

logger = get_cli_logger(__name__)


@dataclass
class ParsedInput:
    """Validated domain objects for every section present in the document."""
    document: JobDocument
    presentation: Optional[Presentation] = None
    representation: Optional[Representation] = None
    dgla: Optional[Dgla] = None
    splitting: Optional[Splitting] = None
    augmentation: Optional[Augmentation] = None
    algebra: Optional[GradedArtinAlgebra] = None
    structure: Optional[TripleFiltered] = None
    gr1: Optional[TripleFiltered] = None
    given: Optional[TripleFiltered] = None
    fiber_types: Optional[List[Tuple[int, int]]] = None
    fiber_action: Optional[List[Matrix]] = None


@dataclass
class CommandResult:
    """Results of one command: JSON-ready data, checks and short summary lines."""
    results: Dict[str, Any] = field(default_factory=dict)
    checks: List[CheckReport] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _require_valid(report: CheckReport, pointer: str, deferred: Tuple[str, ...] = ()) -> None:
    """Raise on the first violation, skipping identities a later stage reports as model hypotheses."""
    blocking = [v for v in report.violations if v.identity not in deferred]
    if blocking:
        first = blocking[0]
        raise InputValidationError(f"{report.name}: {first.identity}", pointer=pointer, witness=report.to_dict())


def parse_input(path: str) -> ParsedInput:
    """
    Read and validate a job document. Every section present is converted and
    its invariants are checked before any computation runs.

    Raises:
        OSError: the file is missing or unreadable
        InputValidationError: schema or invariant violation, with a JSON pointer
    """
    is_valid, message = validate_input_file(path)
    if not is_valid:
        raise FileNotFoundError(message)
    raw = read_json_document(path)
    try:
        doc = JobDocument.model_validate(raw)
    except ValidationError as e:
        raise validation_error_to_input_error(e)

    parsed = ParsedInput(doc)
    if doc.presentation is not None:
        parsed.presentation = doc.presentation.build()
    if doc.representation is not None:
        if parsed.presentation is None:
            raise InputValidationError("a representation needs a presentation", pointer="/representation")
        parsed.representation = doc.representation.build(parsed.presentation)
        report = validate_rep(parsed.presentation, parsed.representation)
        if not report.passed:
            witness = report.violations[0].witness or {}
            relation = witness.get("relation") if isinstance(witness, dict) else None
            pointer = f"/presentation/relations/{relation}" if relation is not None else "/representation"
            _require_valid(report, pointer)
    if doc.dgla is not None:
        parsed.dgla = doc.dgla.build()
        _require_valid(validate(parsed.dgla), "/dgla")
        if doc.augmentation is not None:
            parsed.augmentation = doc.augmentation.build(parsed.dgla)
            _require_valid(check_augmentation(parsed.dgla, parsed.augmentation), "/augmentation",
                           deferred=("eps injective on H^0",))
        if doc.splitting is not None:
            g_dim = parsed.augmentation.g_dim if parsed.augmentation is not None else None
            parsed.splitting = doc.splitting.build(parsed.dgla, g_dim)
            _require_valid(check_splitting(parsed.dgla, parsed.splitting), "/splitting")
        if doc.fiber is not None:
            parsed.fiber_types, parsed.fiber_action = doc.fiber.build(parsed.dgla)
    elif doc.splitting is not None or doc.augmentation is not None or doc.fiber is not None:
        raise InputValidationError("splitting, augmentation and fiber sections need a dgla section",
                                   pointer="/dgla")
    if doc.algebra is not None:
        parsed.algebra = doc.algebra.build()
    if doc.mhs is not None:
        if doc.mhs.structure is not None:
            parsed.structure = doc.mhs.structure.build("/mhs/structure")
            _require_valid(parsed.structure.check_filtrations(), "/mhs/structure")
        if doc.mhs.gr1 is not None:
            parsed.gr1 = doc.mhs.gr1.build("/mhs/gr1")
            _require_valid(parsed.gr1.check_filtrations(), "/mhs/gr1")
        if doc.mhs.given is not None:
            parsed.given = doc.mhs.given.build("/mhs/given")
            _require_valid(parsed.given.check_filtrations(), "/mhs/given")
    return parsed


def load_job(args: Any) -> JobSpec:
    """JobSpec from parsed command-line arguments."""
    try:
        return JobSpec(command=args.command, input_path=args.input, order=args.order,
                       respect_grading=args.respect_grading, transversal=args.transversal,
                       deterministic=args.deterministic, out=args.out, output_format=args.format,
                       log_level=args.log_level)
    except ValidationError as e:
        raise validation_error_to_input_error(e)


# Shared builders

def _hodge_types(parsed: ParsedInput) -> Optional[Dict[int, List[Tuple[int, int]]]]:
    hodge = parsed.document.hodge
    if hodge is None:
        return None
    return {1: [tuple(t) for t in hodge.h1_types], 2: [tuple(t) for t in hodge.h2_types]}


def _rep_cohomology(parsed: ParsedInput) -> RepCohomology:
    if parsed.presentation is None or parsed.representation is None:
        raise InputValidationError("presentation and representation sections are required", pointer="/representation")
    return rep_cohomology(parsed.presentation, parsed.representation)


def _model(parsed: ParsedInput) -> Tuple[Dgla, Splitting, Optional[Augmentation], Optional[RepCohomology]]:
    """The dgla section, or the formal dgla on the cohomology of a representation."""
    if parsed.dgla is not None:
        splitting = parsed.splitting or Splitting.zero(parsed.dgla)
        return parsed.dgla, splitting, parsed.augmentation, None
    coh = _rep_cohomology(parsed)
    l, aug = to_formal_dgla(coh, _hodge_types(parsed))
    return l, Splitting.zero(l), aug, coh


def _transversal(job: JobSpec, g_dim: int) -> Optional[List[Tuple]]:
    path = job.transversal_file
    if path is None:
        return None
    is_valid, message = validate_input_file(path)
    if not is_valid:
        raise FileNotFoundError(message)
    data = read_json_document(path)
    vectors = data.get("transversal") if isinstance(data, dict) else data
    if not isinstance(vectors, list):
        raise InputValidationError("transversal file must hold a list of vectors", pointer="/transversal")
    return [parse_vector(v, f"/transversal/{i}", g_dim) for i, v in enumerate(vectors)]


def _pairing(parsed: ParsedInput, g_dim: int) -> Optional[Matrix]:
    if parsed.document.pairing is None:
        return None
    return parse_matrix(parsed.document.pairing, "/pairing", (g_dim, g_dim))


def _weight_report(a: GradedArtinAlgebra) -> CheckReport:
    report = CheckReport("weight_filtration")
    for k, step in enumerate(weight_filtration(a)):
        if not maximal_ideal_power(a, k).equals(step):
            report.fail("W_{-k} = m^k", {"k": k})
    return report


def _kuranishi_or_product(job: JobSpec, parsed: ParsedInput, l: Dgla, s: Splitting,
                          aug: Optional[Augmentation]) -> Tuple[KuranishiResult, Optional[GMProduct]]:
    if aug is None:
        return kuranishi(l, s, None, job.order, job.respect_grading), None
    product = preferred_gm_product(l, aug, s, job.order, _transversal(job, aug.g_dim),
                                   _pairing(parsed, aug.g_dim), job.respect_grading)
    return product.kuranishi, product


# Commands

def run_cohomology(job: JobSpec, parsed: ParsedInput) -> CommandResult:
    out = CommandResult()
    if parsed.dgla is not None:
        coh = cohomology(parsed.dgla, parsed.splitting, pure_types=parsed.dgla.types is not None)
        out.results["cohomology"] = coh.to_json()
        out.summary["dims"] = list(coh.dims)
        return out
    coh = _rep_cohomology(parsed)
    out.results["cohomology"] = coh.to_json()
    out.results["obstruction"] = cup_obstruction(coh).to_json()
    euler = CheckReport("euler_characteristic")
    if not coh.euler_check():
        euler.fail("dim H^0 - dim H^1 + dim H^2 = chi(presentation) * dim g", {"dims": list(coh.dims)})
    out.checks.append(euler)
    oracle = CheckReport("cup_oracle")
    basis = coh.h1.vectors()
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            if coh.h2_coordinates(cup_cochain(coh, u, v)) != coh.h2_coordinates(bar_oracle_cup(coh, u, v)):
                oracle.fail("cup product agrees with the bar-resolution evaluation", {"pair": [i, j]})
    out.checks.append(oracle)
    out.summary["dims"] = list(coh.dims)
    return out


def run_cone(job: JobSpec, parsed: ParsedInput) -> CommandResult:
    out = CommandResult()
    l, s, aug, _ = _model(parsed)
    kur, product = _kuranishi_or_product(job, parsed, l, s, aug)
    out.results["kuranishi"] = kur.to_json()
    out.results["ideal_generated_in_degree_two"] = ideal_generated_in_degree_two(kur)
    if product is not None:
        out.results["product"] = product.to_json()
        out.summary["product_dims"] = list(product.algebra.dims)
    if kur.grading_report is not None:
        out.checks.append(kur.grading_report)
    out.checks.append(_weight_report(kur.ring))
    test_algebra = parsed.algebra
    if test_algebra is not None and test_algebra.order <= BRUTE_FORCE_MAX_ORDER:
        brute = brute_force_iso_classes(l, aug, test_algebra)
        out.results["brute_force"] = brute.to_json()
        out.checks.append(functor_points_match(kur, brute, product))
    out.summary["ring_dims"] = list(kur.ring.dims)
    out.summary["free_dims"] = list(kur.free.dims)
    return out


def run_artin(job: JobSpec, parsed: ParsedInput) -> CommandResult:
    if parsed.algebra is None:
        raise InputValidationError("the artin command needs an algebra section", pointer="/algebra")
    out = CommandResult()
    a = parsed.algebra
    out.results["algebra"] = a.to_json()
    out.checks.append(check_algebra(a))
    out.checks.append(_weight_report(a))
    out.summary["dims"] = list(a.dims)
    return out


def run_mhs_check(job: JobSpec, parsed: ParsedInput) -> CommandResult:
    out = CommandResult()
    mhs = parsed.document.mhs
    if parsed.structure is not None:
        v = parsed.structure
        verdict = check_mhs(v, mhs.polarization_forms(v) if mhs.polarizations else None)
        out.checks.append(verdict)
        out.results["structure"] = verdict.to_dict()
        if mhs.u_filtration is not None:
            u = mhs.u_filtration.build(v.dim, "/mhs/u_filtration")
            out.checks.append(lemma_4f_check(v, u))
        if mhs.twist is not None:
            twisted = twist(v, parse_matrix(mhs.twist, "/mhs/twist", (v.dim, v.dim)))
            twisted_report = check_mhs(twisted)
            twisted_report.name = "twisted_mhs"
            out.checks.append(twisted_report)
            out.checks.append(same_graded(v, twisted))
            out.results["twisted"] = twisted.to_json()
    if parsed.gr1 is not None:
        if parsed.algebra is None:
            raise InputValidationError("an MHS on Gr^1 needs an algebra section", pointer="/algebra")
        a = parsed.algebra
        if mhs.k_sub is not None:
            free_dim2 = a.dims[1] * (a.dims[1] + 1) // 2
            k_sub = Subspace.span(free_dim2, [parse_vector(v, f"/mhs/k_sub/{i}", free_dim2)
                                              for i, v in enumerate(mhs.k_sub)])
        else:
            k_sub = multiplication_kernel(a, 2) if a.order >= 2 else Subspace.zero(0)
        assembled, report = mhalg_assemble(a, parsed.gr1, k_sub, parsed.given)
        out.checks.append(report)
        if assembled is not None:
            out.results["assembled"] = assembled.to_json()
    hodge = parsed.document.hodge
    if hodge is not None and (parsed.dgla is not None or parsed.representation is not None):
        l, s, aug, coh = _model(parsed)
        obstruction = cup_obstruction(coh) if coh is not None else kuranishi(l, s, None, 2).obstruction
        cone = split_mhs_on_cone([tuple(t) for t in hodge.h1_types], [tuple(t) for t in hodge.h2_types],
                                 obstruction, job.order)
        cone_report = check_mhs(cone.mhs)
        cone_report.name = "cone_mhs"
        out.checks.append(cone_report)
        out.results["cone"] = cone.to_json()
        out.summary["cone_dims"] = list(cone.algebra.dims)
        if aug is not None:
            _, product = _kuranishi_or_product(job, parsed, l, s, aug)
            automorphism = None
            if mhs is not None and mhs.automorphism is not None:
                ring = product.algebra
                images = tuple(parse_vector(v, f"/mhs/automorphism/{i}", ring.total_dim)
                               for i, v in enumerate(mhs.automorphism))
                automorphism = RingMorphism(ring, ring, images)
            orho, report = mhs_on_orho(product, [tuple(t) for t in hodge.h0_types],
                                       [tuple(t) for t in hodge.h1_types], [tuple(t) for t in hodge.h2_types],
                                       job.order,
                                       [tuple(t) for t in hodge.s1_types] if hodge.s1_types is not None else None,
                                       automorphism)
            out.checks.append(report)
            out.results["orho"] = orho.to_json()
    if not out.checks:
        raise InputValidationError("mhs-check found nothing to check", pointer="/mhs")
    return out


def _formality_model(job: JobSpec, parsed: ParsedInput) -> FormalityModel:
    if parsed.dgla is None:
        raise InputValidationError("the command needs a dgla section", pointer="/dgla")
    if parsed.fiber_types is None:
        raise InputValidationError("the command needs a fiber section", pointer="/fiber")
    splitting = parsed.splitting or Splitting.zero(parsed.dgla)
    return build_formality_model(parsed.dgla, splitting, parsed.fiber_types, parsed.fiber_action, job.order)


def _record_primed(out: CommandResult, m: FormalityModel, series) -> None:
    out.results["model"] = m.to_json()
    out.results["series"] = series.to_json(m.ring)
    flat = flatness_check(m, series)
    out.checks.append(flat)
    out.checks.append(hodge_type_check(m, series))
    out.summary["flat"] = flat.passed
    out.summary["nonzero_alpha_degrees"] = [k for k in range(1, len(series.alphas) + 1)
                                            if not series.alpha(k).is_zero()]


def run_mc(job: JobSpec, parsed: ParsedInput) -> CommandResult:
    out = CommandResult()
    m = _formality_model(job, parsed)
    _record_primed(out, m, alpha_recursion(m, job.order))
    return out


def _framing(parsed: ParsedInput, m: FormalityModel, name: str):
    framings = parsed.document.framings
    section = getattr(framings, name) if framings is not None else None
    if section is None:
        return None
    return section.build(m.e.dims[0], m.ring, f"/framings/{name}")


def run_vmhs(job: JobSpec, parsed: ParsedInput) -> CommandResult:
    out = CommandResult()
    m = _formality_model(job, parsed)
    primed = alpha_recursion(m, job.order)
    _record_primed(out, m, primed)
    v_series = alpha_v_recursion(m, job.order)
    out.results["series_v"] = v_series.to_json(m.ring)
    v_flat = flatness_check(m, v_series)
    v_flat.name = "flatness_v"
    out.checks.append(v_flat)
    v_types = hodge_type_check(m, v_series)
    v_types.name = "hodge_types_v"
    out.checks.append(v_types)
    comparison = gauge_compare(m, primed, v_series)
    out.results["comparison"] = comparison.to_json(m.ring)
    out.checks.append(comparison.report)
    out.checks.append(fiber_vmhs_check(m, primed, _framing(parsed, m, "f"), _framing(parsed, m, "g"),
                                       _framing(parsed, m, "w")))
    out.summary["comparison_method"] = comparison.method
    return out


def run_compare_gauge(job: JobSpec, parsed: ParsedInput) -> CommandResult:
    out = CommandResult()
    m = _formality_model(job, parsed)
    comparison = gauge_compare(m, alpha_recursion(m, job.order), alpha_v_recursion(m, job.order))
    out.results["comparison"] = comparison.to_json(m.ring)
    out.checks.append(comparison.report)
    out.summary["comparison_method"] = comparison.method
    out.summary["sign"] = comparison.sign
    out.summary["phi_is_identity"] = comparison.phi.is_identity()
    return out


COMMAND_HANDLERS: Dict[str, Callable[[JobSpec, ParsedInput], CommandResult]] = {
    "cohomology": run_cohomology,
    "cone": run_cone,
    "artin": run_artin,
    "mhs-check": run_mhs_check,
    "mc": run_mc,
    "vmhs": run_vmhs,
    "compare-gauge": run_compare_gauge,
}


def _error_result(error: DeformationError) -> CommandResult:
    report = CheckReport(type(error).__name__)
    witness = error.witness
    pointer = getattr(error, "pointer", None)
    if pointer is not None:
        witness = {"pointer": pointer, "witness": witness}
    report.fail(str(error), witness)
    return CommandResult(checks=[report])


@log_function_calls(logger)
def run(job: JobSpec) -> Tuple[int, Dict[str, Any]]:
    """
    Run one job and write its reports.

    Returns:
        (exit status, report): 0 when every check passes, 2 for failed
        checks and model-hypothesis failures, 1 for I/O and input errors
    """
    start = time.time()
    status = EXIT_OK
    try:
        parsed = parse_input(job.input_path)
        outcome = COMMAND_HANDLERS[job.command](job, parsed)
        if not outcome.passed:
            status = EXIT_CHECK_FAILED
    except ModelHypothesisError as e:
        logger.warning(f"Model hypothesis failed: {e}", extra={'command': job.command, 'witness': e.witness})
        outcome = _error_result(e)
        status = EXIT_CHECK_FAILED
    except DeformationError as e:
        logger.error(f"Job failed: {e}", extra={'command': job.command, 'witness': e.witness})
        outcome = _error_result(e)
        status = EXIT_IO_ERROR

    report = build_report(job, outcome.results, outcome.checks, outcome.summary)
    emit_report(report, job.out, job.output_format, Path(job.input_path).stem)
    log_performance_event(logger, f"Command {job.command} finished with status {status}",
                          time.time() - start, command=job.command, order=job.order)
    return status, report
