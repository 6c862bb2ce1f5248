"""State-vector simulation of circuits, exact and shot-sampled.

Exact mode keeps a stack of unnormalised branch vectors, one per reset
outcome history, so the final expectation is the Kraus-channel average.
Whenever the stack grows past the Hilbert-space dimension it is compressed
with a QR factorisation, which leaves ``sum_b |b><b|`` unchanged.

Shot mode has two samplers with the same outcome distribution:

* ``"grouped"`` carries shot *counts* through the circuit and splits them
  binomially/multinomially at every reset and every noise location.
* ``"trajectory"`` simulates one pure state per shot; shot ``k`` draws from
  its own stream seeded by ``(seed, k)``, so any split of the shot range
  over workers yields identical counts.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, basis_change_gates

DEFAULT_BRANCH_CAP = 20
MAX_STATEVECTOR_QUBITS = 22
_PRUNE = 1e-28

_S2 = 1 / math.sqrt(2)
_FIXED = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "Sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "CNOT": np.array([[0, 1], [1, 0]], dtype=complex),
    "CZ": np.diag([1.0, -1.0]).astype(complex),
}
_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.diag([1.0, -1.0]).astype(complex),
)


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class EvalResult:
    ev: float
    sigma: float = 0.0
    shots: int = 0


@dataclass(frozen=True)
class NoiseModel:
    """Two-qubit depolarizing noise: after each entangling gate, with
    probability ``p`` one of the 15 non-identity Pauli pairs is applied."""

    two_qubit_depolarizing_p: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.two_qubit_depolarizing_p <= 1.0:
            raise ValueError("depolarizing probability must lie in [0, 1]")

    @property
    def p(self) -> float:
        return self.two_qubit_depolarizing_p


NOISELESS = NoiseModel()


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 matrix acted on the target of ``g`` (controls handled separately)."""
    if g.kind == "Ry":
        c, s = math.cos(g.angle / 2), math.sin(g.angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if g.kind == "Rz":
        return np.diag([np.exp(-0.5j * g.angle), np.exp(0.5j * g.angle)])
    if g.kind == "Rx":
        c, s = math.cos(g.angle / 2), math.sin(g.angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    return _FIXED[g.kind]


def _split(g: Gate) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """(controls, control values, target) with CNOT/CZ viewed as controlled X/Z."""
    if g.kind in ("CNOT", "CZ"):
        return (g.qubits[0],), (1,), g.qubits[1]
    return g.controls, g.ctrl_state, g.qubits[0]


def _apply_matrix(v: np.ndarray, n: int, u: np.ndarray, target: int,
                  controls=(), ctrl_state=()) -> None:
    """In-place update of ``v`` with shape ``(batch,) + (2,)*n``."""
    idx = [slice(None)] * (n + 1)
    for c, s in zip(controls, ctrl_state):
        idx[c + 1] = s
    i0 = list(idx)
    i1 = list(idx)
    i0[target + 1] = 0
    i1[target + 1] = 1
    i0, i1 = tuple(i0), tuple(i1)
    u00, u01, u10, u11 = u[0, 0], u[0, 1], u[1, 0], u[1, 1]
    if u01 == 0 and u10 == 0:
        if u00 != 1:
            v[i0] *= u00
        if u11 != 1:
            v[i1] *= u11
        return
    a = v[i0].copy()
    b = v[i1]
    if u00 == 0 and u11 == 0:
        v[i0] = u01 * b
        v[i1] = u10 * a
        return
    v[i0] = u00 * a + u01 * b
    v[i1] = u10 * a + u11 * b


def apply_gate_inplace(v: np.ndarray, n: int, g: Gate) -> None:
    controls, states, target = _split(g)
    _apply_matrix(v, n, gate_matrix(g), target, controls, states)


def zero_state(n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    return psi


def apply_gate(s: np.ndarray, g: Gate) -> np.ndarray:
    """Return a new state vector with unitary ``g`` applied."""
    if not g.is_unitary:
        raise SimulationError(f"{g.kind} is not unitary; use run_exact/run_shots")
    s = np.asarray(s, dtype=complex)
    n = int(round(math.log2(s.size)))
    if 2**n != s.size:
        raise SimulationError("state dimension must be a power of two")
    if max(g.all_qubits) >= n:
        raise SimulationError(f"gate {g.kind} touches qubit outside 0..{n - 1}")
    out = s.copy().reshape((1,) + (2,) * n)
    apply_gate_inplace(out, n, g)
    return out.reshape(-1)


def simulate_unitary(c: Circuit) -> np.ndarray:
    """Pure state of a reset-free circuit (trailing MeasureZ ignored)."""
    v = zero_state(c.n_qubits).reshape((1,) + (2,) * c.n_qubits)
    for g in c.gates:
        if g.kind == "MeasureZ":
            continue
        if g.kind == "Reset":
            raise SimulationError("circuit contains resets; use run_exact")
        apply_gate_inplace(v, c.n_qubits, g)
    return v.reshape(-1)


def expectation_z(s: np.ndarray, q: int) -> float:
    s = np.asarray(s)
    n = int(round(math.log2(s.shape[-1])))
    if not 0 <= q < n:
        raise SimulationError(f"qubit {q} out of range")
    p = np.abs(s.reshape((-1, 2**q, 2, 2 ** (n - q - 1)))) ** 2
    return float(p[:, :, 0].sum() - p[:, :, 1].sum())


def _readout_gates(c: Circuit) -> list[Gate]:
    body = [g for g in c.gates if g.kind != "MeasureZ"]
    return body + basis_change_gates(c.output_qubit, c.output_basis)


def _reset_rows(v: np.ndarray, n: int, q: int) -> np.ndarray:
    """Split every branch into its q=0 and q=1 parts, both re-seated on q=0."""
    idx0 = [slice(None)] * (n + 1)
    idx1 = list(idx0)
    idx0[q + 1] = 0
    idx1[q + 1] = 1
    zero = np.zeros_like(v)
    one = np.zeros_like(v)
    zero[tuple(idx0)] = v[tuple(idx0)]
    one[tuple(idx0)] = v[tuple(idx1)]
    both = np.concatenate([zero, one])
    flat = both.reshape(both.shape[0], -1)
    keep = np.einsum("ij,ij->i", flat.conj(), flat).real > _PRUNE
    return both[keep]


def _compress(v: np.ndarray, n: int) -> np.ndarray:
    dim = 2**n
    if v.shape[0] <= dim:
        return v
    r = np.linalg.qr(v.reshape(v.shape[0], dim), mode="r")
    return np.ascontiguousarray(r).reshape((dim,) + (2,) * n)


def run_exact(c: Circuit, branch_cap: int = DEFAULT_BRANCH_CAP) -> EvalResult:
    n = c.n_qubits
    n_resets = sum(g.kind == "Reset" for g in c.gates)
    if n_resets > branch_cap:
        raise SimulationError(f"{n_resets} resets exceed the branch cap of {branch_cap}")
    v = zero_state(n).reshape((1,) + (2,) * n)
    for g in _readout_gates(c):
        if g.kind == "Reset":
            v = _compress(_reset_rows(v, n, g.qubits[0]), n)
        else:
            apply_gate_inplace(v, n, g)
    return EvalResult(expectation_z(v.reshape(v.shape[0], -1), c.output_qubit))


# ---------------------------------------------------------------- shots


def shot_sigma(ev: float, shots: int) -> float:
    return math.sqrt(max(0.0, 1.0 - ev * ev) / shots)


def _prob_one(psi: np.ndarray, n: int, q: int) -> float:
    p = np.abs(psi.reshape(2**q, 2, -1)) ** 2
    tot = p.sum()
    return float(p[:, 1].sum() / tot) if tot > 0 else 0.0


def _collapse_reset(psi: np.ndarray, n: int, q: int, outcome: int) -> np.ndarray:
    v = psi.reshape(2**q, 2, -1)
    out = np.zeros_like(v)
    out[:, 0] = v[:, outcome]
    out = out.reshape(-1)
    return out / np.linalg.norm(out)


def _apply_pauli_pair(psi: np.ndarray, n: int, qubits, k: int) -> np.ndarray:
    """Apply non-identity Pauli pair number ``k`` in 1..15 (base-4 digits)."""
    v = psi.reshape((1,) + (2,) * n)
    for q, letter in zip(qubits, (k // 4, k % 4)):
        if letter:
            _apply_matrix(v, n, _PAULIS[letter], q)
    return v.reshape(-1)


def _noise_sites(g: Gate) -> tuple[int, int] | None:
    return tuple(g.all_qubits) if g.arity == 2 else None


def _grouped_counts(c: Circuit, shots: int, rng: np.random.Generator,
                    noise: NoiseModel) -> int:
    n = c.n_qubits
    gates = _readout_gates(c)
    # each group: (gate index to resume from, state, shot count)
    stack = [(0, zero_state(n), shots)]
    n_plus = 0
    while stack:
        start, psi, count = stack.pop()
        psi = psi.copy()
        i = start
        while i < len(gates):
            g = gates[i]
            i += 1
            if g.kind == "Reset":
                q = g.qubits[0]
                p1 = _prob_one(psi, n, q)
                n1 = int(rng.binomial(count, min(1.0, max(0.0, p1))))
                if n1 and n1 < count:
                    stack.append((i, _collapse_reset(psi, n, q, 1), n1))
                    psi = _collapse_reset(psi, n, q, 0)
                    count -= n1
                else:
                    psi = _collapse_reset(psi, n, q, 1 if n1 else 0)
                continue
            v = psi.reshape((1,) + (2,) * n)
            apply_gate_inplace(v, n, g)
            sites = _noise_sites(g) if noise.p > 0 else None
            if sites is not None:
                n_err = int(rng.binomial(count, noise.p))
                if n_err:
                    per = rng.multinomial(n_err, [1 / 15] * 15)
                    for k, m in enumerate(per, start=1):
                        if m:
                            stack.append((i, _apply_pauli_pair(psi.copy(), n, sites, k), int(m)))
                    count -= n_err
                    if count == 0:
                        break
        else:
            p_plus = 1.0 - _prob_one(psi, n, c.output_qubit)
            n_plus += int(rng.binomial(count, min(1.0, max(0.0, p_plus))))
    return n_plus


def _trajectory_shot(gates, n: int, out_q: int, seed: int, k: int, noise: NoiseModel) -> int:
    rng = np.random.default_rng([seed, k])
    psi = zero_state(n)
    for g in gates:
        if g.kind == "Reset":
            q = g.qubits[0]
            outcome = int(rng.random() < _prob_one(psi, n, q))
            psi = _collapse_reset(psi, n, q, outcome)
            continue
        v = psi.reshape((1,) + (2,) * n)
        apply_gate_inplace(v, n, g)
        if noise.p > 0 and g.arity == 2 and rng.random() < noise.p:
            psi = _apply_pauli_pair(psi, n, g.all_qubits, int(rng.integers(1, 16)))
    return int(rng.random() >= _prob_one(psi, n, out_q))


def trajectory_counts(c: Circuit, shot_indices, seed: int,
                      noise: NoiseModel = NOISELESS) -> int:
    """Number of +1 outcomes among the given per-shot trajectories."""
    gates = _readout_gates(c)
    return sum(_trajectory_shot(gates, c.n_qubits, c.output_qubit, seed, int(k), noise)
               for k in shot_indices)


def run_shots(c: Circuit, shots: int, seed: int, noise: NoiseModel = NOISELESS,
              method: str = "grouped", workers: int = 1) -> EvalResult:
    """Sample ``shots`` executions and return the mean of the +-1 outcomes.

    A noiseless reset-free circuit ends in one pure state, so all shots share
    one Bernoulli parameter. Above ``MAX_STATEVECTOR_QUBITS`` the grouped
    sampler takes that parameter from Pauli propagation instead of a state
    vector.
    """
    shots = int(shots)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    big = (c.n_qubits > MAX_STATEVECTOR_QUBITS and noise.p == 0
           and not any(g.kind == "Reset" for g in c.gates))
    if method == "grouped" and big:
        from .propagation import pauli_expectation

        p_plus = min(1.0, max(0.0, (1.0 + pauli_expectation(c)) / 2))
        n_plus = int(np.random.default_rng(seed).binomial(shots, p_plus))
    elif method == "grouped":
        n_plus = _grouped_counts(c, shots, np.random.default_rng(seed), noise)
    elif method == "trajectory":
        chunks = np.array_split(np.arange(shots), max(1, workers))
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                parts = pool.map(lambda ks: trajectory_counts(c, ks, seed, noise), chunks)
                n_plus = sum(parts)
        else:
            n_plus = trajectory_counts(c, chunks[0], seed, noise)
    else:
        raise ValueError(f"unknown sampling method {method!r}")
    ev = (2 * n_plus - shots) / shots
    return EvalResult(ev, shot_sigma(ev, shots), shots)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense unitary of a reset-free circuit, qubit 0 most significant."""
    n = c.n_qubits
    v = np.eye(2**n, dtype=complex).reshape((2**n,) + (2,) * n)
    for g in c.gates:
        if g.kind == "MeasureZ":
            continue
        if g.kind == "Reset":
            raise SimulationError("a circuit with resets has no unitary")
        apply_gate_inplace(v, n, g)
    return v.reshape(2**n, 2**n).T
