"""The four arithmetic primitives as append operations on circuits.

Every block assumes its inputs are EVEN-encoded single qubits. After
``append_product(c, q0, q1)`` qubit ``q1`` reads ``x0*x1`` and ``q0`` still
reads ``x0``. After ``append_weighted_sum(c, q0, q1, w)`` qubit ``q0`` reads
``w*x0 + (1-w)*x1`` and ``q1`` reads ``x0*x1``.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .circuit import Circuit, CircuitError, Gate
from .encoding import DomainError, check_unit, encode_layer
from .simulator import run_exact


def _distinct(*qs: int) -> None:
    if len(set(qs)) != len(qs):
        raise CircuitError(f"block qubits must be distinct, got {qs}")


def sum_angle(w: float) -> float:
    """alpha = arccos(1 - 2w) for a weight in [0, 1]."""
    w = float(w)
    if not 0.0 <= w <= 1.0:
        raise DomainError(f"weight {w!r} outside [0, 1]")
    return math.acos(1.0 - 2.0 * w)


def product_gates(q0: int, q1: int) -> list[Gate]:
    _distinct(q0, q1)
    return [Gate.rz(q1, math.pi / 2), Gate.cnot(q0, q1)]


def weighted_sum_gates(q0: int, q1: int, w: float) -> list[Gate]:
    alpha = sum_angle(w)
    return product_gates(q0, q1) + [
        Gate.ry(q0, alpha / 2), Gate.cnot(q1, q0), Gate.ry(q0, -alpha / 2)]


def parity_flip_gates(target: int, ancilla: int) -> list[Gate]:
    _distinct(target, ancilla)
    return [Gate.h(ancilla), Gate.cz(ancilla, target)]


def append_product(c: Circuit, q0: int, q1: int) -> Circuit:
    return c.extend(product_gates(q0, q1))


def append_weighted_sum(c: Circuit, q0: int, q1: int, w: float) -> Circuit:
    return c.extend(weighted_sum_gates(q0, q1, w))


def append_negation(c: Circuit, q: int) -> Circuit:
    return c.append(Gate.x(q))


def append_parity_flip(c: Circuit, target: int, ancilla: int) -> Circuit:
    """Dephase ``target`` using ``ancilla``, which must still be in |0>."""
    return c.extend(parity_flip_gates(target, ancilla))


def append_cascade(c: Circuit, qubits: Sequence[int], weights: Sequence[float],
                   ancillas: Sequence[int] = (), flip: bool = True) -> Circuit:
    """Nested weighted sums accumulating onto ``qubits[0]``.

    Step j combines the running result with ``qubits[j+1]`` at weight
    ``weights[j]``. With ``flip`` every step after the first dephases the
    incoming input first, which needs ``len(qubits) - 2`` fresh ancillas.
    """
    qubits = list(qubits)
    if len(weights) != len(qubits) - 1:
        raise CircuitError("need one weight per input after the first")
    if flip and len(ancillas) < max(0, len(qubits) - 2):
        raise CircuitError("not enough ancillas for the parity flips")
    _distinct(*qubits, *(ancillas if flip else ()))
    acc = qubits[0]
    for j, (q, w) in enumerate(zip(qubits[1:], weights)):
        if flip and j > 0:
            c = append_parity_flip(c, q, ancillas[j - 1])
        c = append_weighted_sum(c, acc, q, w)
    return c


def u_sum_matrix(w: float) -> np.ndarray:
    """Closed-form 4x4 matrix of the weighted-sum block (q0 most significant)."""
    sw, sv = math.sqrt(w), math.sqrt(1.0 - w)
    m = np.array([[1, 0, 0, 0],
                  [0, 1j * sw, sv, 0],
                  [0, 0, 0, 1j],
                  [0, 1j * sv, -sw, 0]], dtype=complex)
    return np.exp(-0.25j * math.pi) * m


def basis_table(x0: float, x1: float, w: float, which: str, basis: str) -> float:
    """Closed-form single-qubit expectation after the weighted-sum block."""
    r0, r1 = math.sqrt(max(0.0, 1 - x0 * x0)), math.sqrt(max(0.0, 1 - x1 * x1))
    table = {
        ("q0", "X"): math.sqrt(w * (1 - w)) * (x0 - x1),
        ("q0", "Y"): r0 * r1,
        ("q0", "Z"): w * x0 + (1 - w) * x1,
        ("q1", "X"): math.sqrt(1 - w) * r0,
        ("q1", "Y"): math.sqrt(w) * r1,
        ("q1", "Z"): x0 * x1,
    }
    return table[(which, basis)]


def basis_ev(x0: float, x1: float, w: float, which: str, basis: str) -> float:
    """Simulate the two-input weighted sum and read one qubit in one basis."""
    if which not in ("q0", "q1"):
        raise CircuitError("which must be 'q0' or 'q1'")
    c = append_weighted_sum(encode_layer([check_unit(x0), check_unit(x1)]), 0, 1, w)
    return run_exact(c.with_output(0 if which == "q0" else 1, basis)).ev
