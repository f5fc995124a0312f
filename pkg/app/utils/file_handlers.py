"""
File Handling Utilities

Reading job documents and writing report files.
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Optional

from app.utils.errors import InputValidationError

MAX_INPUT_MB = 50
MAX_INPUT_BYTES = MAX_INPUT_MB * 1024 * 1024


def validate_input_file(path: str) -> tuple[bool, str]:
    """
    Validate that a job input file can be read.

    Args:
        path: Path to the JSON input document

    Returns:
        Tuple of (is_valid, error_message)
    """
    if not path:
        return False, "No input path given"

    file_path = Path(path)
    if not file_path.exists():
        return False, f"Input file not found: {path}"
    if not file_path.is_file():
        return False, f"Input path is not a file: {path}"
    if file_path.suffix.lower() != '.json':
        return False, f"Unsupported input type: {file_path.suffix or 'no extension'}"

    size = file_path.stat().st_size
    if size > MAX_INPUT_BYTES:
        return False, f"Input file exceeds {MAX_INPUT_MB} MB limit"

    return True, ""


def read_json_document(path: str) -> Any:
    """
    Load a JSON document.

    Raises:
        OSError: the file cannot be read
        InputValidationError: the file is not valid JSON
    """
    text = Path(path).read_text(encoding='utf-8')
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputValidationError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}",
                                   pointer="")


def atomic_write_text(path: str, text: str) -> None:
    """
    Write text to path via a temp file in the same directory and os.replace,
    leaving no partial report behind on failure.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=str(target.parent))
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(temp_path, target)
    except Exception:
        cleanup_temp_file(temp_path)
        raise


def cleanup_temp_file(path: Optional[str]) -> bool:
    """
    Remove a temporary file if it exists.

    Returns:
        True if a file was removed
    """
    if not path:
        return False
    try:
        os.remove(path)
        return True
    except FileNotFoundError:
        return False
