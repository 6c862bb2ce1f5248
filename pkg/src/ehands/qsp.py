"""Quantum signal processing reference circuits, for comparison with EHands.

``S(phi) = exp(i phi Z)`` is emitted as ``Rz(-2 phi)`` and the signal
operator ``W(x)`` as ``Rx(-2 arccos x)``; both identities hold without a
global phase, so controlled versions are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate
from .encoding import check_unit


@dataclass(frozen=True)
class QspPhases:
    phases: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))
        if not self.phases:
            raise ValueError("need at least one phase")
        if not all(math.isfinite(p) for p in self.phases):
            raise ValueError("phases must be finite")

    @property
    def degree(self) -> int:
        return len(self.phases) - 1

    @classmethod
    def zeros(cls, d: int) -> "QspPhases":
        return cls((0.0,) * (d + 1))


def _as_phases(p) -> QspPhases:
    return p if isinstance(p, QspPhases) else QspPhases(tuple(p))


def signal_matrix(x: float) -> np.ndarray:
    r = math.sqrt(1.0 - x * x)
    return np.array([[x, 1j * r], [1j * r, x]])


def phase_matrix(phi: float) -> np.ndarray:
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def qsp_unitary(phases: QspPhases | Sequence[float], x: float) -> np.ndarray:
    """``S(phi_d) W S(phi_{d-1}) ... W S(phi_0)``; ``S(phi_0)`` acts first."""
    ph = _as_phases(phases).phases
    w = signal_matrix(check_unit(x))
    u = phase_matrix(ph[0])
    for phi in ph[1:]:
        u = phase_matrix(phi) @ w @ u
    return u


def qsp_value(phases: QspPhases | Sequence[float], x: float) -> complex:
    return complex(qsp_unitary(phases, x)[0, 0])


def _sequence(phases: QspPhases, x: float, target: int, controls: tuple[int, ...],
              state: tuple[int, ...]) -> list[Gate]:
    signal = -2.0 * math.acos(check_unit(x))
    gates = [Gate("Rz", (target,), -2.0 * phases.phases[0], controls, state)]
    for phi in phases.phases[1:]:
        gates.append(Gate("Rx", (target,), signal, controls, state))
        gates.append(Gate("Rz", (target,), -2.0 * phi, controls, state))
    return gates


def _hadamard_block(phases, x, ctl, target, sel=(), sel_state=()) -> list[Gate]:
    h = Gate("H", (ctl,), None, sel, sel_state)
    return [h, *_sequence(phases, x, target, sel + (ctl,), sel_state + (1,)), h]


def hadamard_test_circuit(phases: QspPhases | Sequence[float], x: float) -> Circuit:
    """Qubit 0 reads ``Re <0|U_phi(x)|0>`` in Z; qubit 1 carries the signal."""
    gates = _hadamard_block(_as_phases(phases), x, 0, 1)
    return Circuit(2, tuple(gates), 0, "Z")


def lcu_circuit(even: QspPhases | Sequence[float], odd: QspPhases | Sequence[float],
                x: float) -> Circuit:
    """Selector on qubit 0 picks the even (|0>) or odd (|1>) Hadamard test.

    The middle qubit then reads ``(Re P_even + Re P_odd) / 2``.
    """
    gates = [Gate.h(0)]
    gates += _hadamard_block(_as_phases(even), x, 1, 2, (0,), (0,))
    gates += _hadamard_block(_as_phases(odd), x, 1, 2, (0,), (1,))
    return Circuit(3, tuple(gates), 1, "Z")


def qsp_resource_estimate(d: int) -> int:
    """Published CNOT estimate for the transpiled LCU circuit (not a count)."""
    if d < 1:
        raise ValueError("degree must be >= 1")
    return 12 * d + 6


def ehands_two_qubit_count(d: int) -> int:
    return 5 * d - 2
