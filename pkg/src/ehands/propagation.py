"""Exact expectation values by Heisenberg-picture Pauli propagation.

State-vector cost doubles per qubit, which makes sweeps over 15-25 qubit
polynomial circuits slow. This evaluator instead pushes the measured Pauli
backwards through the circuit as a real-weighted sum of Pauli strings.

Each qubit's life is split into *slots*: one starting at the circuit's
start and one after every Reset. The one-qubit gates that follow a slot
start before the qubit's first multi-qubit gate form that slot's
preparation, which only fixes a Bloch vector. Everything else (the *core*)
is propagated once; a circuit family that shares a core and differs only in
its preparations (the same builder over many inputs) is then evaluated as
``sum_t c_t prod_s bloch[s, letter_{t,s}]`` for all members at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate, basis_change_gates
from .simulator import gate_matrix

_P = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
_DROP = 1e-14


def gate_unitary(g: Gate) -> np.ndarray:
    """Full matrix of ``g`` on ``g.all_qubits`` (first listed = most significant)."""
    if g.kind == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if g.kind == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    u = gate_matrix(g)
    k = len(g.controls)
    if not k:
        return u
    dim = 2 ** (k + 1)
    full = np.eye(dim, dtype=complex)
    sel = int("".join(map(str, g.ctrl_state)), 2)
    full[2 * sel:2 * sel + 2, 2 * sel:2 * sel + 2] = u
    return full


def _pauli_string(letters: Sequence[int]) -> np.ndarray:
    m = np.ones((1, 1), dtype=complex)
    for a in letters:
        m = np.kron(m, _P[a])
    return m


def heisenberg_ptm(u: np.ndarray) -> np.ndarray:
    """``R[a, b]`` with ``U^dag P_a U = sum_b R[a, b] P_b`` over k-qubit Paulis."""
    k = int(round(np.log2(u.shape[0])))
    strings = [_pauli_string(np.unravel_index(i, (4,) * k)) for i in range(4**k)]
    r = np.empty((4**k, 4**k))
    for a, pa in enumerate(strings):
        conj = u.conj().T @ pa @ u
        for b, pb in enumerate(strings):
            r[a, b] = np.real(np.trace(pb @ conj)) / 2**k
    r[np.abs(r) < 1e-13] = 0.0
    return r


@lru_cache(maxsize=None)
def _cached_ptm(key: tuple) -> np.ndarray:
    kind, angle, nctl, state = key
    g = Gate(kind, (nctl,), angle, tuple(range(nctl)), state) if nctl and kind not in ("CNOT", "CZ") \
        else Gate(kind, (0, 1) if kind in ("CNOT", "CZ") else (0,), angle)
    return heisenberg_ptm(gate_unitary(g))


def gate_ptm(g: Gate) -> np.ndarray:
    return _cached_ptm((g.kind, g.angle, len(g.controls), g.ctrl_state))


@dataclass(frozen=True)
class Split:
    """A circuit separated into per-slot preparations and a shared core.

    ``core`` items are ``("gate", gate, opened)`` or ``("reset", qubit, slot)``,
    where ``opened`` lists the ``(qubit, slot)`` pairs whose first core gate
    this is. Slots whose preparation has no rotation are *fixed*: their Bloch
    vectors belong to the core and are folded in during propagation.
    """

    n_slots: int
    core: tuple[tuple, ...]
    initial_slot: tuple[int, ...]
    preps: tuple[tuple[Gate, ...], ...]
    output_qubit: int

    @property
    def fixed(self) -> tuple[tuple[int, tuple[Gate, ...]], ...]:
        return tuple((s, p) for s, p in enumerate(self.preps)
                     if not any(g.kind in ("Ry", "Rz", "Rx") for g in p))


def split_circuit(c: Circuit) -> Split:
    gates = [g for g in c.gates if g.kind != "MeasureZ"]
    gates += basis_change_gates(c.output_qubit, c.output_basis)
    slot_of = list(range(c.n_qubits))
    preps: list[list[Gate]] = [[] for _ in range(c.n_qubits)]
    open_prep = [True] * c.n_qubits
    core: list[tuple] = []
    for g in gates:
        if g.kind == "Reset":
            q = g.qubits[0]
            slot_of[q] = len(preps)
            preps.append([])
            open_prep[q] = True
            core.append(("reset", q, slot_of[q]))
        elif g.arity == 1 and open_prep[g.qubits[0]]:
            preps[slot_of[g.qubits[0]]].append(g)
        else:
            opened = tuple((q, slot_of[q]) for q in g.all_qubits if open_prep[q])
            for q in g.all_qubits:
                open_prep[q] = False
            core.append(("gate", g, opened))
    return Split(len(preps), tuple(core), tuple(range(c.n_qubits)),
                 tuple(tuple(p) for p in preps), c.output_qubit)


@dataclass(frozen=True)
class PauliTable:
    """Propagated observable: ``coeffs[t] * prod_s bloch[s, letters[t, s]]``."""

    coeffs: np.ndarray
    letters: np.ndarray  # (terms, slots) int8, 0=I 1=X 2=Y 3=Z


def _apply(coeffs, letters, cols, ptm):
    k = len(cols)
    idx = np.zeros(len(coeffs), dtype=np.int64)
    for c in cols:
        idx = idx * 4 + letters[:, c]
    rows = ptm[idx]                       # (T, 4^k)
    t, b = np.nonzero(np.abs(rows) > 0)
    new_c = coeffs[t] * rows[t, b]
    new_l = letters[t].copy()
    digits = np.array(np.unravel_index(b, (4,) * k)).T if k else np.zeros((len(b), 0))
    for j, c in enumerate(cols):
        new_l[:, c] = digits[:, j]
    return _merge(new_c, new_l)


def _merge(coeffs, letters):
    if len(coeffs) == 0:
        return coeffs, letters
    uniq, inv = np.unique(letters, axis=0, return_inverse=True)
    summed = np.zeros(len(uniq))
    np.add.at(summed, inv.reshape(-1), coeffs)
    keep = np.abs(summed) > _DROP
    return summed[keep], uniq[keep]


def propagate(split: Split, n_qubits: int) -> PauliTable:
    """Push Z on the output qubit back through the core.

    Columns ``0..n-1`` track live qubits, ``n + s`` the letter absorbed by
    slot ``s``. A slot is absorbed as soon as its earliest core gate has been
    crossed; fixed slots are evaluated right away so vanishing terms drop out.
    """
    width = n_qubits + split.n_slots
    letters = np.zeros((1, width), dtype=np.int8)
    letters[0, split.output_qubit] = 3
    coeffs = np.array([1.0])
    fixed = {s: _bloch(p) for s, p in split.fixed}

    def absorb(q, slot):
        nonlocal coeffs, letters
        col = n_qubits + slot
        letters[:, col] += letters[:, q]
        letters[:, q] = 0
        if slot in fixed:
            coeffs = coeffs * fixed[slot][letters[:, col]]
            letters[:, col] = 0
            keep = np.abs(coeffs) > _DROP
            coeffs, letters = _merge(coeffs[keep], letters[keep])

    for item in reversed(split.core):
        if item[0] == "gate":
            _, g, opened = item
            coeffs, letters = _apply(coeffs, letters, list(g.all_qubits), gate_ptm(g))
            for q, slot in opened:
                absorb(q, slot)
        else:
            absorb(item[1], item[2])
    for q, slot in enumerate(split.initial_slot):
        absorb(q, slot)
    coeffs, letters = _merge(coeffs, letters)
    return PauliTable(coeffs, letters[:, n_qubits:].astype(np.int8))


def _bloch(prep: Sequence[Gate]) -> np.ndarray:
    psi = np.array([1.0, 0.0], dtype=complex)
    for g in prep:
        psi = gate_matrix(g) @ psi
    return np.array([1.0] + [np.real(np.vdot(psi, _P[a] @ psi)) for a in (1, 2, 3)])


def _core_key(c: Circuit, split: Split) -> tuple:
    return (c.n_qubits, split.core, split.output_qubit, split.fixed)


class PauliEvaluator:
    """Caches one propagated table per distinct core."""

    def __init__(self):
        self._tables: dict[tuple, PauliTable] = {}

    def table(self, c: Circuit) -> tuple[Split, PauliTable]:
        split = split_circuit(c)
        key = _core_key(c, split)
        if key not in self._tables:
            self._tables[key] = propagate(split, c.n_qubits)
        return split, self._tables[key]

    def evaluate(self, c: Circuit) -> float:
        return float(self.evaluate_many([c])[0])

    def evaluate_many(self, circuits: Sequence[Circuit], chunk: int = 64) -> np.ndarray:
        """Exact expectation values; circuits may mix several cores."""
        out = np.empty(len(circuits))
        groups: dict[tuple, list[int]] = {}
        splits = []
        for i, c in enumerate(circuits):
            split, _ = self.table(c)
            splits.append(split)
            groups.setdefault(_core_key(c, split), []).append(i)
        for key, members in groups.items():
            tab = self._tables[key]
            bloch = np.array([[_bloch(p) for p in splits[i].preps] for i in members])
            slots = np.arange(tab.letters.shape[1])
            for lo in range(0, len(members), chunk):
                b = bloch[lo:lo + chunk]                  # (m, S, 4)
                factors = b[:, slots[None, :], tab.letters]  # (m, T, S)
                vals = np.prod(factors, axis=2) @ tab.coeffs
                out[np.array(members[lo:lo + chunk])] = vals
        return out


_DEFAULT = PauliEvaluator()


def pauli_expectation(c: Circuit) -> float:
    return _DEFAULT.evaluate(c)


def pauli_expectations(circuits: Sequence[Circuit]) -> np.ndarray:
    return _DEFAULT.evaluate_many(circuits)
