"""Classical preprocessing: weights, signs, least-squares fits and rescaling."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .encoding import DomainError, check_unit

TARGETS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "relu_halfx": lambda x: np.maximum(0.0, x / 2),
    "arctan5x": lambda x: np.arctan(5 * x),
    "x2_over3": lambda x: x**2 / 3,
    "exp2x": lambda x: np.exp(2 * x),
    "gauss9x2": lambda x: np.exp(-9 * x**2),
}


def cascade_weights(a: Sequence[float], tol: float = 1e-9) -> list[float]:
    """Weights of nested two-input sums realising the convex combination ``a``.

    The nesting is ``s_0 = x_0`` and ``s_j = w_{j-1} s_{j-1} + (1 - w_{j-1}) x_j``,
    so ``w_{j-1} = m_{j-1} / m_j`` with ``m_j`` the prefix mass of ``a``.
    A zero prefix mass gives weight 0.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise DomainError("need a non-empty 1-D weight vector")
    if np.any(a < -tol):
        raise DomainError("cascade inputs must be nonnegative")
    if abs(a.sum() - 1.0) > tol:
        raise DomainError(f"cascade inputs sum to {a.sum()!r}, not 1")
    m = np.cumsum(np.clip(a, 0.0, None))
    return [float(min(1.0, m[j - 1] / m[j])) if m[j] > 0 else 0.0 for j in range(1, a.size)]


def expand_cascade(w: Sequence[float]) -> np.ndarray:
    """Inverse of :func:`cascade_weights`: the coefficient each input ends up with."""
    coef = np.array([1.0])
    for wj in w:
        coef = np.append(coef * wj, 1.0 - wj)
    return coef


def split_signs(c: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    c = np.asarray(c, dtype=float)
    signs = np.where(c < 0, -1, 1)
    return np.abs(c), signs


@dataclass(frozen=True)
class PolySpec:
    """Circuit-ready polynomial: ``P(x) = sum c_i x^i`` with ``c_i = scale * a_i``."""

    degree: int
    raw_coeffs: tuple[float, ...]
    scale: float
    a: tuple[float, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if self.degree < 0 or len(self.raw_coeffs) != self.degree + 1:
            raise DomainError("need degree+1 coefficients")
        if max(abs(v) for v in self.a) > 1.0 + 1e-12:
            raise DomainError("normalised coefficients must lie in [-1, 1]")

    @property
    def attenuation(self) -> float:
        return 1.0 / (self.degree + 1)

    @property
    def magnitudes(self) -> tuple[float, ...]:
        return tuple(min(1.0, abs(v)) for v in self.a)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[float]) -> "PolySpec":
        """Rescale raw power-basis coefficients (lowest order first)."""
        c = np.asarray(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise DomainError("coefficients must be a non-empty finite vector")
        s = max(1.0, float(np.max(np.abs(c))))
        a = c / s
        _, signs = split_signs(a)
        return cls(c.size - 1, tuple(c.tolist()), s, tuple(a.tolist()),
                   tuple(int(v) for v in signs))

    @classmethod
    def from_normalized(cls, a: Sequence[float]) -> "PolySpec":
        """Spec with scale 1 whose circuit coefficients are ``a`` themselves."""
        for v in a:
            check_unit(v, "coefficient")
        return cls.from_coeffs(a)

    def to_json(self) -> str:
        return json.dumps({"degree": self.degree, "raw_coeffs": list(self.raw_coeffs),
                           "scale": self.scale, "a": list(self.a),
                           "signs": list(self.signs), "attenuation": self.attenuation},
                          indent=1)

    @classmethod
    def from_json(cls, text: str) -> "PolySpec":
        doc = json.loads(text)
        spec = cls.from_coeffs(doc["raw_coeffs"])
        if spec.degree != doc.get("degree", spec.degree):
            raise DomainError("degree does not match coefficient count")
        return spec


@dataclass(frozen=True)
class FitReport:
    spec: PolySpec
    max_abs_err: float
    grid_points: int
    target: str = ""


def horner(coeffs: Sequence[float], x):
    """Evaluate ``sum coeffs[i] * x**i``."""
    acc = np.zeros_like(np.asarray(x, dtype=float))
    for c in reversed(list(coeffs)):
        acc = acc * x + c
    return acc


def attenuated_value(spec: PolySpec, x):
    """What an ideal circuit for ``spec`` reads out at ``x``."""
    return horner(spec.a, x) / (spec.degree + 1)


def fit_polynomial(target: str | Sequence[float], d: int, grid_n: int = 201) -> FitReport:
    """Least-squares degree-``d`` fit of a named target on a uniform grid.

    ``target`` may also be a coefficient sequence, which is used directly
    (padded or checked against ``d``).
    """
    if d < 0:
        raise DomainError("degree must be >= 0")
    if grid_n < d + 1:
        raise DomainError("grid needs at least degree+1 points")
    grid = np.linspace(-1.0, 1.0, grid_n)
    if isinstance(target, str):
        if target not in TARGETS:
            raise DomainError(f"unknown target {target!r}; choose from {sorted(TARGETS)}")
        y = TARGETS[target](grid)
        coeffs = np.polynomial.polynomial.polyfit(grid, y, d)
        name = target
    else:
        coeffs = np.zeros(d + 1)
        given = np.asarray(target, dtype=float)
        if given.size > d + 1 and np.any(given[d + 1:] != 0):
            raise DomainError("custom coefficients exceed the requested degree")
        coeffs[: min(given.size, d + 1)] = given[: d + 1]
        y = horner(coeffs, grid)
        name = "custom"
    spec = PolySpec.from_coeffs(coeffs)
    err = float(np.max(np.abs(horner(spec.raw_coeffs, grid) - y)))
    return FitReport(spec, err, grid_n, name)


def predict(spec: PolySpec, ev: float) -> float:
    """Undo attenuation and rescaling: ``(d+1) * scale * ev``."""
    return (spec.degree + 1) * spec.scale * check_unit(ev, "ev")


def target_values(name: str, x) -> np.ndarray:
    return TARGETS[name](np.asarray(x, dtype=float))

