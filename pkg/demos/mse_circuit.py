"""Mean squared error of two short vectors with a single readout qubit.

Run: python demos/mse_circuit.py
"""
import numpy as np

from ehands.circuit import resource_report
from ehands.compiler import build_mse, mse_value
from ehands.propagation import pauli_expectation
from ehands.simulator import run_shots

rng = np.random.default_rng(3)
for n in (2, 4, 8):
    xs, ys = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    c = build_mse(xs, ys)
    r = resource_report(c)
    ev = pauli_expectation(c)
    shot = run_shots(c, 100_000, seed=n)
    print(f"N={n}: classical {mse_value(xs, ys):.5f}  exact 4*EV {4 * ev:.5f}  "
          f"shots {4 * shot.ev:.4f} +- {4 * shot.sigma:.4f}  "
          f"[{r.n_qubits} qubits, {r.n_two_qubit_gates} two-qubit, depth {r.two_qubit_depth}]")
