"""Fit exp(2x) with a quintic, compile it three ways and sample each circuit.

Run: python demos/polynomial_sweep.py
"""
import numpy as np

from ehands.circuit import resource_report
from ehands.cli import sweep_rows
from ehands.compiler import BUILDERS
from ehands.fitting import fit_polynomial

report = fit_polynomial("exp2x", 5)
spec = report.spec
print(f"fit max error {report.max_abs_err:.4f}, scale {spec.scale:.3f}")
print("normalised coefficients:", np.round(spec.a, 4))

print("\nresources at d=5")
for name, build in BUILDERS.items():
    r = resource_report(build(spec, 0.0))
    print(f"  {name:<14} qubits={r.n_qubits:>2} resets={r.n_resets:>2} "
          f"two-qubit={r.n_two_qubit_gates} depth={r.two_qubit_depth}")

rows = sweep_rows(spec, "exp2x", "reversible", 11, shots=200_000, seed=7, noise_p=0.0)
print("\n     x   exact EV   shot EV    sigma   predicted    exp(2x)")
for x, ev, shot, sigma, pred, tgt in rows:
    print(f"{x:6.2f} {ev:10.5f} {shot:9.5f} {sigma:8.5f} {pred:11.4f} {tgt:10.4f}")

noisy = sweep_rows(spec, "exp2x", "reversible", 5, shots=20_000, seed=7, noise_p=0.01)
print("\nwith 1% two-qubit depolarizing noise the signal shrinks toward zero:")
for x, ev, shot, sigma, *_ in noisy:
    print(f"  x={x:+.1f}  exact {ev:+.4f}  noisy {shot:+.4f} +- {sigma:.4f}")
