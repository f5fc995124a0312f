"""
Component loggers for the library areas and helpers for check verdicts,
timings and call tracing.
"""

import logging
import time
from functools import partial, wraps
from typing import Any, Dict, Optional


class ComponentLoggerAdapter(logging.LoggerAdapter):
    """Adds the component name, and any fixed context, to every record."""

    def __init__(self, logger, component: str, extra_context: Optional[Dict[str, Any]] = None):
        self.component = component
        self.extra_context = dict(extra_context or {})
        super().__init__(logger, {})

    def process(self, msg, kwargs):
        # per-call extra wins over the fixed context
        kwargs['extra'] = {**self.extra_context, 'component': self.component, **kwargs.get('extra', {})}
        return msg, kwargs


def get_component_logger(component_name: str, module_name: Optional[str] = None,
                         **extra_context) -> ComponentLoggerAdapter:
    """
    Get a logger for one area of the toolkit.

    Args:
        component_name: Area name as shown in console lines, e.g. 'dgla'
        module_name: Underlying logger name (defaults to app.<component>)
        **extra_context: Fields attached to every record

    Returns:
        ComponentLoggerAdapter for the area
    """
    return ComponentLoggerAdapter(logging.getLogger(module_name or f"app.{component_name}"),
                                  component_name, extra_context)


get_linalg_logger = partial(get_component_logger, 'linalg')
get_artin_logger = partial(get_component_logger, 'artin')
get_dgla_logger = partial(get_component_logger, 'dgla')
get_deformation_logger = partial(get_component_logger, 'deformation')
get_hodge_logger = partial(get_component_logger, 'hodge')
get_mc_logger = partial(get_component_logger, 'mc')
get_cohomology_logger = partial(get_component_logger, 'cohomology')
get_cli_logger = partial(get_component_logger, 'cli')


def log_check_event(logger, message: str, passed: bool, **context):
    """
    Log a check verdict. Failures go out at WARNING.

    Args:
        logger: Component logger
        message: What was checked
        passed: Verdict
        **context: action, order, degree, witness, ...
    """
    context.setdefault('action', 'check')
    verdict = 'pass' if passed else 'FAIL'
    logger.log(logging.INFO if passed else logging.WARNING, f"{message}: {verdict}", extra=context)


def log_performance_event(logger, message: str, duration: float, level: str = "INFO", **context):
    """Log message with duration (seconds) recorded as duration_ms."""
    context['duration_ms'] = round(duration * 1000, 2)
    logger.log(getattr(logging, level.upper()), message, extra=context)


def log_function_calls(logger, component: Optional[str] = None):
    """
    Decorator tracing entry, completion and failure of a computation.

    The truncation order is attached when the call passes it as ``n``.
    Exceptions are re-raised after logging their witness.
    """
    def decorator(func):
        name = func.__name__

        def context(stage: str, started: Optional[float] = None, **fields) -> Dict[str, Any]:
            extra = {'action': f"{name}_{stage}", **fields}
            if started is not None:
                extra['duration_ms'] = round((time.perf_counter() - started) * 1000, 2)
            if component:
                extra['component'] = component
            return extra

        @wraps(func)
        def wrapper(*args, **kwargs):
            order = {'order': kwargs['n']} if 'n' in kwargs else {}
            started = time.perf_counter()
            logger.debug(f"Starting {name}", extra=context('start', **order))
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                extra = context('error', started, error_type=type(e).__name__,
                                witness=getattr(e, 'witness', None), **order)
                logger.error(f"Error in {name}: {e}", extra=extra)
                raise
            extra = context('complete', started, **order)
            logger.info(f"Completed {name} in {extra['duration_ms']}ms", extra=extra)
            return result

        return wrapper
    return decorator
