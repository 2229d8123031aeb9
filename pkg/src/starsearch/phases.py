"""Reflection-phase values: parsing, wrapping into (-pi, pi], unit factors.

Phases written as rational multiples of pi (``2pi/3``, ``-pi``, ``pi/2``) are
parsed through :class:`fractions.Fraction` so that class phases carry no
decimal round-trip error. Plain decimals (``0.5``) are taken as radians.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "parse_phase",
    "parse_phase_classes",
    "wrap_phase",
    "phase_factor",
    "phase_factors",
    "format_phase",
]

_PI_RE = re.compile(
    r"""^\s*(?P<sign>[+-]?)\s*
        (?P<num>\d+(?:\.\d+)?)?\s*\*?\s*
        pi\s*
        (?:/\s*(?P<den>\d+))?\s*$""",
    re.VERBOSE | re.IGNORECASE,
)


def _pi_fraction(text: str) -> Fraction | None:
    m = _PI_RE.match(text.replace("π", "pi"))
    if m is None:
        return None
    num = Fraction(m.group("num")) if m.group("num") else Fraction(1)
    den = int(m.group("den")) if m.group("den") else 1
    if den == 0:
        raise InvalidArgumentError(f"zero denominator in phase {text!r}")
    frac = num / den
    return -frac if m.group("sign") == "-" else frac


def _wrap_fraction(frac: Fraction) -> Fraction:
    # representative in (-1, 1] (units of pi)
    frac = frac % 2
    return frac - 2 if frac > 1 else frac


def parse_phase(text: str) -> float:
    """Parse ``"2pi/3"``, ``"-pi"``, ``"0"`` or ``"1.25"`` into radians in (-pi, pi]."""
    text = text.strip()
    if not text:
        raise InvalidArgumentError("empty phase")
    frac = _pi_fraction(text)
    if frac is not None:
        return float(_wrap_fraction(frac)) * math.pi
    try:
        value = float(text)
    except ValueError:
        raise InvalidArgumentError(f"cannot parse phase {text!r}") from None
    if not math.isfinite(value):
        raise InvalidArgumentError(f"phase must be finite, got {text!r}")
    return wrap_phase(value)


def parse_phase_classes(text: str) -> list[tuple[float, int]]:
    """Parse a ``phase:count`` list such as ``"2pi/3:50,-2pi/3:50,0:1"``."""
    classes = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        phase_text, sep, count_text = item.rpartition(":")
        if not sep:
            raise InvalidArgumentError(f"expected phase:count, got {item!r}")
        try:
            count = int(count_text)
        except ValueError:
            raise InvalidArgumentError(f"bad count in {item!r}") from None
        if count < 1:
            raise InvalidArgumentError(f"class count must be positive in {item!r}")
        classes.append((parse_phase(phase_text), count))
    if not classes:
        raise InvalidArgumentError("no phase classes given")
    return classes


def wrap_phase(phi: float) -> float:
    """Map an angle to the half-open interval (-pi, pi]."""
    wrapped = math.remainder(phi, 2 * math.pi)  # in [-pi, pi]
    if wrapped <= -math.pi:
        wrapped += 2 * math.pi
    return wrapped


def phase_factor(phi: float) -> complex:
    """Return exp(i*phi), exact on the quarter turns 0, pi/2, pi, -pi/2."""
    quarter = phi / (math.pi / 2)
    q = round(quarter)
    if abs(quarter - q) < 1e-15:
        return (1 + 0j, 1j, -1 + 0j, -1j)[q % 4]
    return complex(math.cos(phi), math.sin(phi))


def phase_factors(phases) -> np.ndarray:
    return np.array([phase_factor(float(p)) for p in phases], dtype=np.complex128)


def format_phase(phi: float, max_den: int = 24) -> str:
    """Render a phase as a multiple of pi when it is one with a small denominator."""
    frac = Fraction(phi / math.pi).limit_denominator(max_den)
    if abs(float(frac) * math.pi - phi) > 1e-12:
        return f"{phi:.6g}"
    if frac == 0:
        return "0"
    num, den = frac.numerator, frac.denominator
    head = "-" if num < 0 else ""
    num = abs(num)
    body = "pi" if num == 1 else f"{num}pi"
    return head + body + (f"/{den}" if den != 1 else "")
