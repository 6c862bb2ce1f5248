"""Multiply and average two numbers stored in qubit expectation values.

Run: python demos/primitives_tour.py
"""
from ehands.blocks import append_product, append_weighted_sum, basis_ev
from ehands.circuit import export_qasm
from ehands.encoding import encode_layer
from ehands.simulator import run_exact, run_shots

x0, x1 = 0.5, -0.6
inputs = encode_layer([x0, x1])

prod = append_product(inputs, 0, 1)
print(f"product on q1:   {run_exact(prod.with_output(1)).ev:+.6f}  (x0*x1 = {x0 * x1:+.6f})")
print(f"memory on q0:    {run_exact(prod).ev:+.6f}  (x0 = {x0:+.6f})")

w = 0.25
summed = append_weighted_sum(inputs, 0, 1, w)
print(f"weighted sum:    {run_exact(summed).ev:+.6f}  (w*x0+(1-w)*x1 = {w * x0 + (1 - w) * x1:+.6f})")

# a finite number of shots only estimates the value
r = run_shots(summed, 10_000, seed=1)
print(f"10k shots:       {r.ev:+.4f} +- {r.sigma:.4f}")

print("\nother readouts of the same two-qubit state:")
for which in ("q0", "q1"):
    print(which, "  ".join(f"{b}={basis_ev(x0, x1, w, which, b):+.4f}" for b in "XYZ"))

print("\nOpenQASM for the sum block:\n")
print(export_qasm(summed))
