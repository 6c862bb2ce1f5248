"""Independent dense-matrix oracles and random-circuit generators."""
import math

import numpy as np
import pytest

from ehands.circuit import Circuit, Gate, basis_change_gates

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
SDG = np.diag([1, -1j])


def local_matrix(g):
    """Textbook 2x2 matrices, written out independently of the package."""
    t = g.angle
    if g.kind == "Ry":
        return np.array([[math.cos(t / 2), -math.sin(t / 2)], [math.sin(t / 2), math.cos(t / 2)]])
    if g.kind == "Rz":
        return np.array([[np.exp(-1j * t / 2), 0], [0, np.exp(1j * t / 2)]])
    if g.kind == "Rx":
        return math.cos(t / 2) * I2 - 1j * math.sin(t / 2) * X
    return {"X": X, "H": H, "Sdg": SDG, "CNOT": X, "CZ": Z}[g.kind]


def dense_op(g, n):
    """Full 2^n operator built by looping over computational basis states."""
    if g.kind in ("CNOT", "CZ"):
        controls, state, target = (g.qubits[0],), (1,), g.qubits[1]
    else:
        controls, state, target = g.controls, g.ctrl_state, g.qubits[0]
    u = local_matrix(g)
    dim = 2**n
    op = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        if any(bits[c] != s for c, s in zip(controls, state)):
            op[col, col] = 1
            continue
        for out_bit in (0, 1):
            nb = list(bits)
            nb[target] = out_bit
            row = sum(b << (n - 1 - q) for q, b in enumerate(nb))
            op[row, col] += u[out_bit, bits[target]]
    return op


def density_ev(c: Circuit) -> float:
    """Density-matrix oracle; resets are the trace-and-reprepare channel."""
    n = c.n_qubits
    rho = np.zeros((2**n, 2**n), dtype=complex)
    rho[0, 0] = 1
    gates = [g for g in c.gates if g.kind != "MeasureZ"]
    gates += basis_change_gates(c.output_qubit, c.output_basis)
    for g in gates:
        if g.kind == "Reset":
            q = g.qubits[0]
            p0 = np.kron(np.kron(np.eye(2**q), np.diag([1, 0])), np.eye(2 ** (n - q - 1)))
            lower = np.kron(np.kron(np.eye(2**q), np.array([[0, 1], [0, 0]])), np.eye(2 ** (n - q - 1)))
            rho = p0 @ rho @ p0 + lower @ rho @ lower.conj().T
        else:
            u = dense_op(g, n)
            rho = u @ rho @ u.conj().T
    q = c.output_qubit
    zq = np.kron(np.kron(np.eye(2**q), Z), np.eye(2 ** (n - q - 1)))
    return float(np.real(np.trace(rho @ zq)))


def random_circuit(rng, n, n_gates, resets=True, bases=("X", "Y", "Z")):
    gates = []
    for _ in range(n_gates):
        r = rng.random()
        if r < 0.35:
            kind = rng.choice(["Ry", "Rz", "Rx"])
            gates.append(Gate(str(kind), (int(rng.integers(n)),), float(rng.uniform(-np.pi, np.pi))))
        elif r < 0.5:
            gates.append(Gate(str(rng.choice(["X", "H", "Sdg"])), (int(rng.integers(n)),)))
        elif r < 0.9 and n > 1:
            a, b = rng.choice(n, 2, replace=False)
            gates.append(Gate(str(rng.choice(["CNOT", "CZ"])), (int(a), int(b))))
        elif resets:
            gates.append(Gate.reset(int(rng.integers(n))))
    return Circuit(n, tuple(gates), int(rng.integers(n)), str(rng.choice(bases)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
