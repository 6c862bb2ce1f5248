"""Polynomial, multivariable and mean-squared-error circuit builders.

Every polynomial builder returns a circuit whose output reads
``(a_0 + a_1 x + ... + a_d x^d) / (d + 1)`` for the normalised coefficients
``spec.a``.

Two gate-placement rules keep chained sums exact:

* The constant coefficient wire gets the same ``Rz(pi/2)`` that a product
  leaves on its target. Every sum leaf then carries the same relative phase.
* A sum whose inputs are not both leaves is preceded by a parity flip on its
  second input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .blocks import parity_flip_gates, product_gates, weighted_sum_gates
from .circuit import Circuit, Gate
from .encoding import DomainError, check_unit
from .fitting import PolySpec


class _Wires:
    """Grow-only qubit allocator that remembers each wire's role."""

    def __init__(self):
        self.labels: list[str] = []

    def new(self, role: str) -> int:
        self.labels.append(role)
        return len(self.labels) - 1

    def many(self, role: str, k: int) -> list[int]:
        return [self.new(role) for _ in range(k)]


def encode_gates(q: int, value: float) -> list[Gate]:
    """EVEN preparation of a signed value: optional X, then Ry(arccos|value|)."""
    value = check_unit(value)
    gates = [Gate.x(q)] if value < 0 else []
    return gates + [Gate.ry(q, math.acos(abs(value)))]


def _coeff_gates(q: int, spec: PolySpec, i: int) -> list[Gate]:
    gates = [Gate.x(q)] if spec.signs[i] < 0 else []
    return gates + [Gate.ry(q, math.acos(spec.magnitudes[i]))]


def _check(spec: PolySpec, x: float) -> float:
    if spec.degree < 1:
        raise DomainError("circuit builders need degree >= 1")
    return check_unit(x)


def build_reversible(spec: PolySpec, x: float) -> Circuit:
    """3d-qubit ancilla-preserving circuit; no resets."""
    x = _check(spec, x)
    d = spec.degree
    theta = math.acos(x)
    # interleaved layout a0 d0 a1 d1 ... a_{d-1} d_{d-1} a_d, then ancillas
    a = [2 * k for k in range(d + 1)]
    data = [2 * k + 1 for k in range(d)]
    anc = list(range(2 * d + 1, 3 * d))
    labels = ["coeff" if q % 2 == 0 else "data" for q in range(2 * d + 1)] + ["ancilla"] * (d - 1)

    gates: list[Gate] = []
    for k in range(d + 1):
        gates += _coeff_gates(a[k], spec, k)
    gates += [Gate.ry(q, theta) for q in data]
    gates.append(Gate.rz(a[0], math.pi / 2))
    for k in range(1, d):
        gates += product_gates(data[k - 1], data[k])
    for k in range(1, d + 1):
        gates += product_gates(data[k - 1], a[k])
    acc = a[d]
    for step, k in enumerate(range(d - 1, -1, -1)):
        if step:
            gates += parity_flip_gates(acc, anc[step - 1])
        gates += weighted_sum_gates(a[k], acc, 1.0 / (d - k + 1))
        acc = a[k]
    return Circuit(3 * d, tuple(gates), a[0], "Z", tuple(labels), "limited")


def build_nonreversible(spec: PolySpec, x: float) -> Circuit:
    """(d+1)-qubit circuit that recycles wires through 2d-1 resets."""
    x = _check(spec, x)
    d = spec.degree
    theta = math.acos(x)
    w = list(range(d + 1))

    gates: list[Gate] = [Gate.ry(q, theta) for q in w[:d]]
    gates += _coeff_gates(w[d], spec, d)
    for k in range(1, d):
        gates += product_gates(w[k - 1], w[k])
    gates += product_gates(w[d - 1], w[d])
    acc, free = w[d], None
    for k in range(d - 1, -1, -1):
        gates.append(Gate.reset(w[k]))
        gates += _coeff_gates(w[k], spec, k)
        if k:
            gates += product_gates(w[k - 1], w[k])
        else:
            gates.append(Gate.rz(w[0], math.pi / 2))
        if free is not None:
            gates.append(Gate.reset(free))
            gates += parity_flip_gates(acc, free)
        gates += weighted_sum_gates(w[k], acc, 1.0 / (d - k + 1))
        free, acc = acc, w[k]
    labels = ["data"] * d + ["coeff"]
    return Circuit(d + 1, tuple(gates), w[0], "Z", tuple(labels), "linear")


def build_shallow(spec: PolySpec, x: float) -> Circuit:
    """Logarithmic-depth variant: power tree, parallel products, balanced sums.

    Powers double level by level: ``x^k = x^(k-c) * x^c`` with ``c = 2^(l-1)``,
    where each factor ``x^c`` is grown on its own wire by a balanced product
    tree over ``c`` fresh copies of ``x``. With ``L = ceil(log2 d)`` and
    ``S = ceil(log2(d+1))`` the two-qubit depth is at most ``2L + 1 + 3S``.
    """
    x = _check(spec, x)
    d = spec.degree
    theta = math.acos(x)
    wires = _Wires()
    prep: list[Gate] = []
    body: list[Gate] = []

    def fresh_x() -> int:
        q = wires.new("data")
        prep.append(Gate.ry(q, theta))
        return q

    def power_tree(c: int) -> int:
        # balanced product tree over c copies; returns the wire holding x^c
        level = [fresh_x() for _ in range(c)]
        while len(level) > 1:
            nxt = []
            for i in range(0, len(level) - 1, 2):
                body.extend(product_gates(level[i], level[i + 1]))
                nxt.append(level[i + 1])
            if len(level) % 2:
                nxt.append(level[-1])
            level = nxt
        return level[0]

    power = {1: fresh_x()}
    c = 1
    while c < d:
        for k in range(c + 1, min(2 * c, d) + 1):
            scratch = power_tree(c)
            body.extend(product_gates(power[k - c], scratch))
            power[k] = scratch
        c *= 2

    coeff = []
    for k in range(d + 1):
        q = wires.new("coeff")
        prep.extend(_coeff_gates(q, spec, k))
        coeff.append(q)
    prep.append(Gate.rz(coeff[0], math.pi / 2))
    for k in range(1, d + 1):
        body.extend(product_gates(power[k], coeff[k]))

    def tree(leaves: list[int]) -> int:
        if len(leaves) == 1:
            return leaves[0]
        half = (len(leaves) + 1) // 2
        left, right = tree(leaves[:half]), tree(leaves[half:])
        if half > 1 or len(leaves) - half > 1:
            body.extend(parity_flip_gates(right, wires.new("ancilla")))
        body.extend(weighted_sum_gates(left, right, half / len(leaves)))
        return left

    out = tree(coeff)
    return Circuit(len(wires.labels), tuple(prep + body), out, "Z",
                   tuple(wires.labels), "tree")


@dataclass(frozen=True)
class MonomialTerm:
    """``coefficient * prod_j x_j ** exponents[j]``."""

    coefficient: float
    exponents: tuple[int, ...] = field(default=())

    def __post_init__(self):
        check_unit(self.coefficient, "coefficient")
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if any(e < 0 for e in self.exponents):
            raise DomainError("exponents must be nonnegative")

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def value(self, xs: Sequence[float]) -> float:
        return self.coefficient * math.prod(x**e for x, e in zip(xs, self.exponents))


def multivariable_value(terms: Sequence[MonomialTerm], xs: Sequence[float]) -> float:
    """Classical value the multivariable circuit reads out (mean of the terms)."""
    return sum(t.value(xs) for t in terms) / len(terms)


def build_multivariable(terms: Sequence[MonomialTerm], xs: Sequence[float]) -> Circuit:
    """Mean of monomials, each built by a product chain over fresh input copies."""
    if not terms:
        raise DomainError("need at least one monomial term")
    xs = [check_unit(v) for v in xs]
    for t in terms:
        if len(t.exponents) > len(xs):
            raise DomainError("term references more variables than were given")
    wires = _Wires()
    prep: list[Gate] = []
    body: list[Gate] = []
    outs = []
    for t in terms:
        q = wires.new("coeff")
        prep.extend(encode_gates(q, t.coefficient))
        chain = []
        for j, e in enumerate(t.exponents):
            for _ in range(e):
                v = wires.new("data")
                prep.append(Gate.ry(v, math.acos(xs[j])))
                chain.append(v)
        if chain:
            for u, v in zip(chain, chain[1:]):
                body.extend(product_gates(u, v))
            body.extend(product_gates(chain[-1], q))
        else:
            prep.append(Gate.rz(q, math.pi / 2))
        outs.append(q)
    acc = outs[0]
    for j, q in enumerate(outs[1:], start=1):
        if j > 1:
            body.extend(parity_flip_gates(q, wires.new("ancilla")))
        body.extend(weighted_sum_gates(acc, q, j / (j + 1)))
    return Circuit(len(wires.labels), tuple(prep + body), acc, "Z", tuple(wires.labels))


def mse_value(xs: Sequence[float], ys: Sequence[float]) -> float:
    return sum((y - x) ** 2 for x, y in zip(xs, ys)) / len(xs)


def build_mse(xs: Sequence[float], ys: Sequence[float]) -> Circuit:
    """Circuit reading out ``mean((y - x)^2) / 4``.

    Each pair uses four wires: ``-x, y`` averaged into ``(y - x)/2`` twice,
    and the two copies multiplied. The squared halves are averaged by a
    balanced sum tree whose node weights follow the leaf counts, so any N
    works without padding.
    """
    if len(xs) != len(ys):
        raise DomainError("x and y must have the same length")
    if len(xs) == 0:
        raise DomainError("need at least one pair")
    wires = _Wires()
    prep: list[Gate] = []
    body: list[Gate] = []
    leaves = []
    for x, y in zip(xs, ys):
        x, y = check_unit(x), check_unit(y)
        xa, ya, xb, yb = wires.many("data", 4)
        tx, ty = math.acos(x), math.acos(y)
        prep += [Gate.ry(xa, tx), Gate.x(xa), Gate.ry(ya, ty),
                 Gate.ry(xb, tx), Gate.x(xb), Gate.ry(yb, ty)]
        body += weighted_sum_gates(ya, xa, 0.5)
        body += weighted_sum_gates(xb, yb, 0.5)
        body += product_gates(ya, xb)
        leaves.append(xb)

    def tree(nodes: list[int]) -> int:
        if len(nodes) == 1:
            return nodes[0]
        half = (len(nodes) + 1) // 2
        left, right = tree(nodes[:half]), tree(nodes[half:])
        body.extend(parity_flip_gates(right, wires.new("ancilla")))
        body.extend(weighted_sum_gates(left, right, half / len(nodes)))
        return left

    out = tree(leaves)
    return Circuit(len(wires.labels), tuple(prep + body), out, "Z", tuple(wires.labels))


BUILDERS = {
    "reversible": build_reversible,
    "nonreversible": build_nonreversible,
    "shallow": build_shallow,
}
