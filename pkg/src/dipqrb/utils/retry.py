"""Retry with exponential backoff for connection attempts."""

from __future__ import annotations

import asyncio
import logging
import random
from collections.abc import Callable
from functools import wraps

from dipqrb.settings import settings

logger = logging.getLogger(__name__)


class RetryError(Exception):
    """Raised when all retry attempts are exhausted."""

    def __init__(self, message: str, last_exception: Exception | None = None):
        super().__init__(message)
        self.last_exception = last_exception


def backoff_delay(
    attempt: int,
    base_delay: float,
    max_delay: float,
    exponential_base: float = 2.0,
    jitter: bool = True,
) -> float:
    """Delay before retry number ``attempt`` (1-based)."""
    delay = min(base_delay * exponential_base ** (attempt - 1), max_delay)
    # Jitter only affects timing, never protocol randomness
    return delay * (0.5 + random.random()) if jitter else delay


def retry_async(
    max_attempts: int | None = None,
    base_delay: float | None = None,
    max_delay: float = 5.0,
    exponential_base: float = 2.0,
    jitter: bool = True,
    retryable_exceptions: tuple[type[Exception], ...] = (ConnectionError, OSError),
    on_retry: Callable[[Exception, int], None] | None = None,
):
    """Decorator for async functions with exponential backoff retry.

    ``max_attempts`` and ``base_delay`` default to ``settings.connect_attempts``
    and ``settings.connect_base_delay``, read on every call so that
    environment overrides loaded after import still apply.

    Args:
        max_attempts: Maximum number of attempts
        base_delay: Initial delay in seconds
        max_delay: Maximum delay between retries
        exponential_base: Base for exponential backoff
        jitter: Add random jitter to delays
        retryable_exceptions: Exceptions that trigger retry
        on_retry: Callback on each retry (exception, attempt_number)

    Returns:
        Decorated function
    """

    def decorator(func: Callable):
        @wraps(func)
        async def wrapper(*args, **kwargs):
            attempts = max_attempts or settings.connect_attempts
            base = settings.connect_base_delay if base_delay is None else base_delay

            for attempt in range(1, attempts + 1):
                try:
                    return await func(*args, **kwargs)
                except retryable_exceptions as e:
                    if attempt >= attempts:
                        logger.error(f"{func.__name__} failed after {attempts} attempts: {e}")
                        raise RetryError(
                            f"Max retries ({attempts}) exceeded", last_exception=e
                        ) from e

                    delay = backoff_delay(attempt, base, max_delay, exponential_base, jitter)
                    logger.warning(
                        f"{func.__name__} attempt {attempt} failed: {e}. "
                        f"Retrying in {delay:.2f}s..."
                    )
                    if on_retry:
                        on_retry(e, attempt)
                    await asyncio.sleep(delay)

            raise RetryError(f"{func.__name__} was not attempted (max_attempts={attempts})")

        return wrapper

    return decorator
