import functools
import time
import traceback
from collections.abc import Callable
from typing import Any, TypeVar, cast

from src.utils.enums import ExitCode
from src.utils.exceptions import ConfigError
from src.utils.logging import get_logger

logger = get_logger(__name__)

F = TypeVar("F", bound=Callable[..., Any])


def cli_command(func: Callable[..., ExitCode]) -> Callable[..., ExitCode]:
    """Decorator mapping exceptions raised by a command onto the exit-code contract.

    ConfigError means bad usage or configuration and yields ExitCode.USAGE; any other
    exception is logged with its traceback and yields ExitCode.FAILURE.

    Args:
        func: The command function to decorate.

    Returns:
        The decorated function.
    """

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> ExitCode:
        try:
            return func(*args, **kwargs)
        except ConfigError as e:
            logger.error(f"Invalid configuration for {func.__name__}: {e}")
            return ExitCode.USAGE
        except Exception as e:
            tb = traceback.format_exc()
            logger.error(f"Error in {func.__name__}: {e}\n{tb}")
            return ExitCode.FAILURE

    return wrapper


def logged_check(name: str) -> Callable[[F], F]:
    """Decorator that times a verification check and logs its outcome.

    The wrapped function must return an object with `value`, `threshold` and `passed`
    attributes. An exception inside the check is logged and re-raised.
    """

    def decorate(func: F) -> F:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            started = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.error(f"Check {name} raised: {e}", exc_info=True)
                raise
            elapsed = time.perf_counter() - started
            status = "passed" if result.passed else "FAILED"
            logger.info(f"Check {name} {status}: value={result.value:.6g} threshold={result.threshold} ({elapsed:.2f}s)")
            return result

        wrapper.check_name = name  # type: ignore[attr-defined]
        return cast(F, wrapper)

    return decorate
