import sys
from typing import List, Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

import argparse

from app.config.config import (
    COMMANDS,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_OUTPUT_FORMAT,
    DETERMINISTIC_DEFAULT,
    EXIT_IO_ERROR,
)
from app.services.pipeline import load_job, run
from app.services.report_writer import render_json, render_text
from app.utils.errors import InputValidationError
from app.utils.logging.component_loggers import get_cli_logger
from app.utils.logging.logging_config import setup_logging_from_env

logger = get_cli_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m app.main",
        description="Deformation theory toolkit: cohomology, Kuranishi cones, mixed Hodge structures "
                    "and Maurer-Cartan recursions in exact arithmetic",
    )
    parser.add_argument("command", choices=COMMANDS, help="Pipeline to run")
    parser.add_argument("--input", required=True, help="JSON input document")
    parser.add_argument("--order", type=int, default=2, help="Truncation order n")
    parser.add_argument("--respect-grading", action="store_true",
                        help="Require the Kuranishi construction to respect the Hodge bigrading")
    parser.add_argument("--transversal", default="hodge",
                        help="'hodge' (orthogonal complement) or file:PATH with a transversal basis")
    parser.add_argument("--deterministic", action="store_true", default=DETERMINISTIC_DEFAULT,
                        help="Omit the timestamp so reruns are byte-identical")
    parser.add_argument("--out", default=DEFAULT_OUTPUT_DIR, help="Report directory")
    parser.add_argument("--format", choices=("json", "text"), default=DEFAULT_OUTPUT_FORMAT,
                        help="Rendering printed to stdout")
    parser.add_argument("--log-level", default=None, help="Overrides LOG_LEVEL")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the job and return the exit status."""
    args = build_parser().parse_args(argv)
    setup_logging_from_env(args.log_level)
    try:
        job = load_job(args)
        status, report = run(job)
    except InputValidationError as e:
        logger.error(f"Invalid job: {e} at {e.pointer or '/'}", extra={'command': args.command, 'witness': e.witness})
        return EXIT_IO_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}", extra={'command': args.command})
        return EXIT_IO_ERROR

    print(render_json(report) if job.output_format == "json" else render_text(report), end="")
    return status


if __name__ == "__main__":
    sys.exit(main())


#python -m app.main cone --input genus2.json --order 3 --deterministic
#python -m app.main mc --input model.json --order 4 --format text
