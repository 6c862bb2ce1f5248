"""Chebyshev polynomials from signal processing, and what they cost.

Run: python demos/qsp_comparison.py
"""
import math

import numpy as np

from ehands.qsp import QspPhases, hadamard_test_circuit, lcu_circuit, qsp_resource_estimate
from ehands.simulator import run_exact

for d in (2, 3, 5):
    xs = np.linspace(-1, 1, 5)
    vals = [run_exact(hadamard_test_circuit(QspPhases.zeros(d), x)).ev for x in xs]
    cheb = [math.cos(d * math.acos(x)) for x in xs]
    print(f"T_{d}: circuit {np.round(vals, 6)}  closed form {np.round(cheb, 6)}")

x = 0.5
mix = run_exact(lcu_circuit(QspPhases.zeros(2), QspPhases.zeros(1), x)).ev
print(f"\nLCU mix of T_2 and T_1 at x={x}: {mix:+.6f}")

print("\ntwo-qubit gates    QSP+LCU (estimate)   EHands")
for d in (1, 3, 5, 10):
    print(f"  d={d:<3}{qsp_resource_estimate(d):>24}{5 * d - 2:>9}")
