"""Expectation-value encoding of reals in [-1, 1] as single-qubit rotations."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .circuit import Circuit, Gate


class DomainError(ValueError):
    """A numeric input lies outside the interval an operation accepts."""


def check_unit(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x) or abs(x) > 1.0:
        raise DomainError(f"{name}={x!r} lies outside [-1, 1]")
    return x


def encode_angle(x: float) -> float:
    """Ry angle whose |0> image has <Z> = x. No clamping."""
    return math.acos(check_unit(x))


@dataclass(frozen=True)
class EncodedInput:
    values: tuple[float, ...]
    thetas: tuple[float, ...]

    @classmethod
    def of(cls, xs: Sequence[float]) -> "EncodedInput":
        vals = tuple(check_unit(x) for x in xs)
        return cls(vals, tuple(math.acos(v) for v in vals))


def encode_layer(xs: Sequence[float]) -> Circuit:
    """One Ry(arccos x_i) per qubit, qubit i carrying ``xs[i]``."""
    enc = EncodedInput.of(xs)
    if not enc.values:
        raise DomainError("cannot encode an empty input list")
    return Circuit(len(enc.values), tuple(Gate.ry(i, t) for i, t in enumerate(enc.thetas)))


def decode_sigma(ev: float, shots: int) -> float:
    """Binomial standard error of a +-1 mean estimated from ``shots`` samples."""
    if shots < 1:
        raise DomainError("shots must be >= 1")
    ev = check_unit(ev, "ev")
    return math.sqrt((1.0 - ev * ev) / shots)


def required_shots(d: int, eps: float, ev: float = 0.0) -> int:
    """Shots keeping the rescaled estimate's standard error at ``eps``.

    A degree-d circuit reports P(x)/(d+1), so undoing the attenuation
    multiplies the standard error by d+1.
    """
    if eps <= 0:
        raise DomainError("eps must be positive")
    return math.ceil((d + 1) ** 2 * (1.0 - ev * ev) / eps**2)
