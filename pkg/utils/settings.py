"""
Settings Module
===============

Runtime configuration for the toolkit.

Settings come from environment variables with sensible defaults:
- MOEBIUS_PRECISION_BITS: mpmath working precision in bits (default 128)
- MOEBIUS_LOG_LEVEL: logging level name (default WARNING)
"""

import logging
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Optional

import mpmath


DEFAULT_PRECISION_BITS = 128
MIN_PRECISION_BITS = 64
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Tolerances:
    """Geometric tolerances used by the band model"""
    PERP = 1e-8             # T-pattern detection, perpendicularity
    PLANE = 1e-8            # T-pattern detection, carrier-plane distance
    REFINED = 1e-12         # refined T-pattern output
    ISO = 1e-9              # facet isometry
    CLOSE = 1e-9            # closure of a folded band
    PARAM = 1e-10           # parameter-space refinement of pattern roots
    SLOPE = 1e-9            # slope-zero bisection
    VERTICAL = 1e-9         # projection length below which a bend is vertical
    INTERIOR_SAMPLES = 32   # interior bend samples per facet


@dataclass(frozen=True)
class Settings:
    """Resolved runtime settings"""
    precision_bits: int = DEFAULT_PRECISION_BITS
    log_level: str = "WARNING"
    digits: int = 12
    tolerances: type = field(default=Tolerances)


def _read_precision(env) -> int:
    raw = env.get("MOEBIUS_PRECISION_BITS")
    if raw is None or raw.strip() == "":
        return DEFAULT_PRECISION_BITS
    try:
        bits = int(raw)
    except ValueError:
        raise ValueError(f"MOEBIUS_PRECISION_BITS must be an integer, got {raw!r}")
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"MOEBIUS_PRECISION_BITS must be at least {MIN_PRECISION_BITS}, got {bits}")
    return bits


def get_settings(env: Optional[dict] = None) -> Settings:
    """
    Build settings from the environment

    Args:
        env: Mapping to read instead of os.environ (tests)

    Returns:
        Settings instance
    """
    env = os.environ if env is None else env
    level = env.get("MOEBIUS_LOG_LEVEL", "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ValueError(f"MOEBIUS_LOG_LEVEL is not a logging level: {level!r}")
    return Settings(precision_bits=_read_precision(env), log_level=level)


def configure_logging(level: str = "WARNING") -> None:
    """Install one stream handler on the root logger"""
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level)


@contextmanager
def working_precision(bits: Optional[int] = None) -> Iterator[int]:
    """
    Run a block at the given mpmath precision

    Args:
        bits: Precision in bits; defaults to the configured precision

    Yields:
        The precision in effect
    """
    bits = bits or get_settings().precision_bits
    saved_mp, saved_iv = mpmath.mp.prec, mpmath.iv.prec
    mpmath.mp.prec = bits
    mpmath.iv.prec = bits
    try:
        yield bits
    finally:
        mpmath.mp.prec = saved_mp
        mpmath.iv.prec = saved_iv
