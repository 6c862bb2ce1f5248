"""Gate-level circuit representation, resource accounting, twirling and export.

Qubit 0 is the most significant (leftmost) tensor factor, so a basis state
``|q0 q1 ... q_{n-1}>`` has index ``q0 * 2**(n-1) + ... + q_{n-1}``.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

import numpy as np

ONE_QUBIT_KINDS = frozenset({"Ry", "Rz", "Rx", "X", "H", "Sdg"})
TWO_QUBIT_KINDS = frozenset({"CNOT", "CZ"})
CHANNEL_KINDS = frozenset({"Reset", "MeasureZ"})
GATE_KINDS = ONE_QUBIT_KINDS | TWO_QUBIT_KINDS | CHANNEL_KINDS
ROTATIONS = frozenset({"Ry", "Rz", "Rx"})
BASES = ("X", "Y", "Z")
ROLES = ("data", "coeff", "ancilla")


class CircuitError(ValueError):
    """Raised for structurally invalid gates or circuits."""


@dataclass(frozen=True)
class Gate:
    """One gate record.

    ``controls``/``ctrl_state`` turn a one-qubit kind into a (multi-)controlled
    gate; only the QSP reference circuits use them. ``ctrl_state`` bit 1 means
    the gate fires when that control is ``|1>``.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    controls: tuple[int, ...] = ()
    ctrl_state: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        if self.controls and not self.ctrl_state:
            object.__setattr__(self, "ctrl_state", (1,) * len(self.controls))
        object.__setattr__(self, "ctrl_state", tuple(int(s) for s in self.ctrl_state))
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.qubits) != want:
            raise CircuitError(f"{self.kind} takes {want} qubit(s), got {self.qubits}")
        if len(set(self.all_qubits)) != len(self.all_qubits):
            raise CircuitError(f"repeated qubit index in {self.kind} {self.all_qubits}")
        if any(q < 0 for q in self.all_qubits):
            raise CircuitError("negative qubit index")
        if self.kind in ROTATIONS:
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError(f"{self.kind} needs a finite angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise CircuitError(f"{self.kind} takes no angle")
        if self.controls:
            if self.kind not in ONE_QUBIT_KINDS:
                raise CircuitError("only one-qubit kinds may carry controls")
            if len(self.ctrl_state) != len(self.controls) or set(self.ctrl_state) - {0, 1}:
                raise CircuitError("ctrl_state must be one bit per control")

    @property
    def all_qubits(self) -> tuple[int, ...]:
        return self.controls + self.qubits

    @property
    def is_unitary(self) -> bool:
        return self.kind not in CHANNEL_KINDS

    @property
    def arity(self) -> int:
        return len(self.all_qubits)

    # convenience constructors
    @classmethod
    def ry(cls, q: int, theta: float) -> "Gate":
        return cls("Ry", (q,), theta)

    @classmethod
    def rz(cls, q: int, theta: float) -> "Gate":
        return cls("Rz", (q,), theta)

    @classmethod
    def rx(cls, q: int, theta: float) -> "Gate":
        return cls("Rx", (q,), theta)

    @classmethod
    def x(cls, q: int) -> "Gate":
        return cls("X", (q,))

    @classmethod
    def h(cls, q: int) -> "Gate":
        return cls("H", (q,))

    @classmethod
    def sdg(cls, q: int) -> "Gate":
        return cls("Sdg", (q,))

    @classmethod
    def cnot(cls, control: int, target: int) -> "Gate":
        return cls("CNOT", (control, target))

    @classmethod
    def cz(cls, a: int, b: int) -> "Gate":
        return cls("CZ", (a, b))

    @classmethod
    def reset(cls, q: int) -> "Gate":
        return cls("Reset", (q,))

    @classmethod
    def measure(cls, q: int) -> "Gate":
        return cls("MeasureZ", (q,))


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered gate list plus a single-qubit Pauli readout."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    output_qubit: int = 0
    output_basis: str = "Z"
    labels: tuple[str, ...] | None = None
    connectivity: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        self.validate()

    def validate(self) -> None:
        n = self.n_qubits
        if n < 1:
            raise CircuitError("a circuit needs at least one qubit")
        if not 0 <= self.output_qubit < n:
            raise CircuitError(f"output qubit {self.output_qubit} out of range")
        if self.output_basis not in BASES:
            raise CircuitError(f"output basis must be one of {BASES}")
        if self.labels is not None:
            if len(self.labels) != n:
                raise CircuitError("need one label per qubit")
            if set(self.labels) - set(ROLES):
                raise CircuitError(f"labels must come from {ROLES}")
        for i, g in enumerate(self.gates):
            if max(g.all_qubits) >= n:
                raise CircuitError(f"gate {i} ({g.kind}) touches qubit >= {n}")
            if g.kind == "MeasureZ":
                if i != len(self.gates) - 1:
                    raise CircuitError("MeasureZ must be the last gate")
                if g.qubits[0] != self.output_qubit:
                    raise CircuitError("MeasureZ must act on the output qubit")

    def append(self, *gates: Gate) -> "Circuit":
        return replace(self, gates=self.gates + tuple(gates))

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        return replace(self, gates=self.gates + tuple(gates))

    def with_output(self, qubit: int, basis: str = "Z") -> "Circuit":
        return replace(self, output_qubit=qubit, output_basis=basis)

    def __len__(self) -> int:
        return len(self.gates)


def new_circuit(n_qubits: int) -> Circuit:
    if n_qubits < 1:
        raise CircuitError("n_qubits must be >= 1")
    return Circuit(n_qubits)


# ---------------------------------------------------------------- resources


@dataclass(frozen=True)
class ResourceReport:
    n_qubits: int = 0
    n_ancilla: int = 0
    n_resets: int = 0
    n_two_qubit_gates: int = 0
    two_qubit_depth: int = 0
    connectivity: str | None = field(default=None, compare=False)

    def as_row(self) -> tuple[int, int, int, int, int]:
        return (self.n_qubits, self.n_ancilla, self.n_resets,
                self.n_two_qubit_gates, self.two_qubit_depth)


def resource_report(c: Circuit | None) -> ResourceReport:
    """Count qubits, ancillas, resets and entangling gates of ``c``.

    Every gate acting on two or more qubits counts as one entangling gate.
    Depth is ASAP layering of the entangling gates alone; one-qubit gates
    and resets do not occupy a layer.
    """
    if c is None or (not c.gates and c.labels is None):
        return ResourceReport()
    level = [0] * c.n_qubits
    n2 = resets = 0
    for g in c.gates:
        if g.kind == "Reset":
            resets += 1
        elif g.arity >= 2:
            n2 += 1
            layer = max(level[q] for q in g.all_qubits) + 1
            for q in g.all_qubits:
                level[q] = layer
    ancilla = sum(1 for lab in (c.labels or ()) if lab == "ancilla")
    return ResourceReport(c.n_qubits, ancilla, resets, n2, max(level), c.connectivity)


# ---------------------------------------------------------------- twirling

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.diag([1.0, -1.0]).astype(complex),
}
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def _cnot_twirl_table() -> list[tuple[str, str, str, str]]:
    table = []
    for a in "IXYZ":
        for b in "IXYZ":
            conj = _CNOT @ np.kron(_PAULI[a], _PAULI[b]) @ _CNOT
            for c in "IXYZ":
                for d in "IXYZ":
                    if abs(abs(np.vdot(np.kron(_PAULI[c], _PAULI[d]), conj)) - 4) < 1e-9:
                        table.append((a, b, c, d))
    assert len(table) == 16
    return table


TWIRL_SET = tuple(_cnot_twirl_table())


def pauli_gates(p: str, q: int) -> list[Gate]:
    """Gate-set realisation of a Pauli, exact up to a global phase."""
    if p == "I":
        return []
    if p == "X":
        return [Gate.x(q)]
    if p == "Y":
        return [Gate.ry(q, math.pi)]
    if p == "Z":
        return [Gate.rz(q, math.pi)]
    raise ValueError(p)


def pauli_twirl(c: Circuit, seed: int) -> Circuit:
    """Wrap every CNOT in a random Pauli frame that leaves its action unchanged."""
    rng = np.random.default_rng(seed)
    out: list[Gate] = []
    for g in c.gates:
        if g.kind == "CNOT" and not g.controls:
            a, b, pc, pd = TWIRL_SET[int(rng.integers(len(TWIRL_SET)))]
            ctl, tgt = g.qubits
            out += pauli_gates(a, ctl) + pauli_gates(b, tgt)
            out.append(g)
            out += pauli_gates(pc, ctl) + pauli_gates(pd, tgt)
        else:
            out.append(g)
    return replace(c, gates=tuple(out))


# ---------------------------------------------------------------- QASM / JSON

_QASM_NAMES = {"Ry": "ry", "Rz": "rz", "Rx": "rx", "X": "x", "H": "h", "Sdg": "sdg",
               "CNOT": "cx", "CZ": "cz"}


def format_angle(theta: float) -> str:
    """Render ``theta`` as a rational multiple of pi when it is one."""
    frac = Fraction(theta / math.pi).limit_denominator(64)
    if abs(float(frac) * math.pi - theta) < 1e-12:
        if frac == 0:
            return "0"
        num, den = frac.numerator, frac.denominator
        sign = "-" if num < 0 else ""
        num = abs(num)
        head = "pi" if num == 1 else f"{num}*pi"
        return f"{sign}{head}" if den == 1 else f"{sign}{head}/{den}"
    return repr(float(theta))


def _gate_qasm(g: Gate) -> str:
    name = _QASM_NAMES[g.kind]
    if g.angle is not None:
        name += f"({format_angle(g.angle)})"
    mods = "".join("ctrl @ " if s else "negctrl @ " for s in g.ctrl_state)
    args = ", ".join(f"q[{q}]" for q in g.all_qubits)
    return f"{mods}{name} {args};"


def basis_change_gates(qubit: int, basis: str) -> list[Gate]:
    if basis == "Z":
        return []
    if basis == "X":
        return [Gate.h(qubit)]
    if basis == "Y":
        return [Gate.sdg(qubit), Gate.h(qubit)]
    raise CircuitError(f"unknown basis {basis!r}")


def export_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 3.0;", 'include "stdgates.inc";',
             f"qubit[{c.n_qubits}] q;", "bit[1] c;"]
    for g in c.gates:
        if g.kind == "Reset":
            lines.append(f"reset q[{g.qubits[0]}];")
        elif g.kind == "MeasureZ":
            continue
        else:
            lines.append(_gate_qasm(g))
    for g in basis_change_gates(c.output_qubit, c.output_basis):
        lines.append(_gate_qasm(g))
    lines.append(f"c[0] = measure q[{c.output_qubit}];")
    return "\n".join(lines) + "\n"


_ANGLE_RE = re.compile(r"^(-?)(?:(\d+)\*)?pi(?:/(\d+))?$")
_LINE_RE = re.compile(r"^((?:(?:neg)?ctrl @ )*)(\w+)(?:\(([^)]*)\))? (.+);$")
_INV_NAMES = {v: k for k, v in _QASM_NAMES.items()}


def _parse_angle(text: str) -> float:
    text = text.strip()
    m = _ANGLE_RE.match(text)
    if m:
        sign, num, den = m.groups()
        val = int(num or 1) * math.pi / int(den or 1)
        return -val if sign else val
    return float(text)


def parse_qasm(text: str) -> Circuit:
    """Read back the subset of OpenQASM 3 written by :func:`export_qasm`.

    Trailing basis-change gates are folded into ``output_basis``.
    """
    n = None
    gates: list[Gate] = []
    out_q = 0
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("OPENQASM", "include", "bit[")):
            continue
        if line.startswith("qubit["):
            n = int(line[6:line.index("]")])
            continue
        if line.startswith("reset "):
            gates.append(Gate.reset(int(re.findall(r"\d+", line)[0])))
            continue
        if "measure" in line:
            out_q = int(re.findall(r"q\[(\d+)\]", line)[0])
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise CircuitError(f"cannot parse QASM line {line!r}")
        mods, name, arg, qargs = m.groups()
        qs = [int(v) for v in re.findall(r"q\[(\d+)\]", qargs)]
        states = tuple(0 if tok == "negctrl" else 1 for tok in re.findall(r"(negctrl|ctrl)", mods))
        kind = _INV_NAMES[name]
        angle = _parse_angle(arg) if arg is not None else None
        k = len(states)
        gates.append(Gate(kind, tuple(qs[k:]), angle, tuple(qs[:k]), states))
    if n is None:
        raise CircuitError("QASM text declares no qubit register")
    basis = "Z"
    tail = [(g.kind, g.qubits) for g in gates[-2:]]
    if tail == [("Sdg", (out_q,)), ("H", (out_q,))]:
        basis, gates = "Y", gates[:-2]
    elif tail and tail[-1] == ("H", (out_q,)):
        basis, gates = "X", gates[:-1]
    return Circuit(n, tuple(gates), out_q, basis)


def to_json(c: Circuit) -> str:
    """Stable JSON dump (gate kind, qubit array, angle) for golden files."""
    gates = []
    for g in c.gates:
        rec: dict = {"kind": g.kind, "qubits": list(g.qubits), "angle": g.angle}
        if g.controls:
            rec["controls"] = list(g.controls)
            rec["ctrl_state"] = list(g.ctrl_state)
        gates.append(rec)
    doc = {"n_qubits": c.n_qubits, "output_qubit": c.output_qubit,
           "output_basis": c.output_basis,
           "labels": list(c.labels) if c.labels is not None else None,
           "connectivity": c.connectivity, "gates": gates}
    return json.dumps(doc, indent=1, sort_keys=True)


def from_json(text: str) -> Circuit:
    doc = json.loads(text)
    gates = tuple(
        Gate(r["kind"], tuple(r["qubits"]), r.get("angle"),
             tuple(r.get("controls", ())), tuple(r.get("ctrl_state", ())))
        for r in doc["gates"]
    )
    labels = doc.get("labels")
    return Circuit(doc["n_qubits"], gates, doc["output_qubit"], doc["output_basis"],
                   tuple(labels) if labels is not None else None, doc.get("connectivity"))

