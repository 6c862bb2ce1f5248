import math

import numpy as np
import pytest

from conftest import random_circuit
from ehands.circuit import (TWIRL_SET, Circuit, CircuitError, Gate, ResourceReport,
                            export_qasm, format_angle, from_json, new_circuit, parse_qasm,
                            pauli_twirl, resource_report, to_json)
from ehands.compiler import build_nonreversible, build_reversible
from ehands.fitting import PolySpec
from ehands.simulator import run_exact


def spec(d):
    return PolySpec.from_normalized(np.linspace(-0.9, 0.8, d + 1))


@pytest.mark.parametrize("n", [1, 5, 12])
def test_new_circuit_is_empty(n):
    c = new_circuit(n)
    assert c.n_qubits == n and len(c) == 0
    assert (c.output_qubit, c.output_basis) == (0, "Z")


def test_new_circuit_rejects_zero():
    with pytest.raises(CircuitError):
        new_circuit(0)


@pytest.mark.parametrize("bad", [
    lambda: Gate("CNOT", (1, 1)),
    lambda: Gate("CNOT", (0,)),
    lambda: Gate("Ry", (0,), float("nan")),
    lambda: Gate("Ry", (0,)),
    lambda: Gate("H", (0,), 0.3),
    lambda: Gate("Reset", (0, 1)),
    lambda: Gate("Toffoli", (0, 1)),
])
def test_gate_invariants(bad):
    with pytest.raises(CircuitError):
        bad()


def test_circuit_invariants():
    with pytest.raises(CircuitError):
        Circuit(2, (Gate.x(2),))
    with pytest.raises(CircuitError):
        Circuit(2, (Gate.measure(0), Gate.x(1)))
    with pytest.raises(CircuitError):
        Circuit(2, (Gate.measure(1),), output_qubit=0)
    with pytest.raises(CircuitError):
        Circuit(2, output_basis="W")
    ok = Circuit(2, (Gate.h(0), Gate.measure(0)))
    assert len(ok) == 2


def test_append_returns_new_circuit():
    c = new_circuit(2)
    c2 = c.append(Gate.h(0))
    assert len(c) == 0 and len(c2) == 1


def test_empty_report_is_zero():
    assert resource_report(new_circuit(3)) == ResourceReport()


def test_report_counts_and_depth():
    c = Circuit(4, (Gate.cnot(0, 1), Gate.cz(2, 3), Gate.h(1), Gate.cnot(1, 2),
                    Gate.reset(0)), labels=("data", "data", "coeff", "ancilla"))
    r = resource_report(c)
    assert r.as_row() == (4, 1, 1, 3, 2)
    assert r.two_qubit_depth <= r.n_two_qubit_gates


@pytest.mark.parametrize("d", range(1, 11))
def test_table_one_counts(d):
    rev = resource_report(build_reversible(spec(d), 0.3))
    non = resource_report(build_nonreversible(spec(d), 0.3))
    assert (rev.n_qubits, rev.n_ancilla, rev.n_resets, rev.n_two_qubit_gates) == (3 * d, d - 1, 0, 5 * d - 2)
    assert (non.n_qubits, non.n_ancilla, non.n_resets, non.n_two_qubit_gates) == (d + 1, 0, 2 * d - 1, 5 * d - 2)
    assert rev.connectivity == "limited" and non.connectivity == "linear"


def test_fig2_footprints():
    assert build_reversible(spec(4), 0.1).n_qubits == 12
    assert build_nonreversible(spec(4), 0.1).n_qubits == 5


def test_twirl_set_is_sixteen_valid_frames():
    assert len(TWIRL_SET) == 16
    assert len({(a, b) for a, b, _, _ in TWIRL_SET}) == 16


def test_twirl_preserves_expectation(rng):
    for _ in range(20):
        c = random_circuit(rng, int(rng.integers(1, 7)), 25)
        t = pauli_twirl(c, int(rng.integers(1 << 30)))
        assert abs(run_exact(t).ev - run_exact(c).ev) < 1e-9


def test_twirl_seeds_differ_but_agree():
    c = build_reversible(spec(3), -0.4)
    a, b = pauli_twirl(c, 1), pauli_twirl(c, 2)
    assert a.gates != b.gates
    assert abs(run_exact(a).ev - run_exact(b).ev) < 1e-9


def test_twirl_without_cnots_is_noop():
    c = Circuit(2, (Gate.h(0), Gate.cz(0, 1)))
    assert pauli_twirl(c, 5).gates == c.gates


@pytest.mark.parametrize("theta,text", [
    (math.pi / 2, "pi/2"), (-3 * math.pi / 4, "-3*pi/4"), (0.0, "0"), (math.pi, "pi"), (0.1234, "0.1234"),
])
def test_format_angle(theta, text):
    assert format_angle(theta) == text


def test_qasm_single_ry():
    text = export_qasm(Circuit(1, (Gate.ry(0, math.pi / 2),)))
    assert text.splitlines().count("ry(pi/2) q[0];") == 1


def test_qasm_golden():
    c = Circuit(2, (Gate.ry(0, math.pi / 3), Gate.x(1), Gate.cnot(0, 1), Gate.reset(1)),
                output_qubit=1, output_basis="Y")
    assert export_qasm(c) == (
        'OPENQASM 3.0;\ninclude "stdgates.inc";\nqubit[2] q;\nbit[1] c;\n'
        "ry(pi/3) q[0];\nx q[1];\ncx q[0], q[1];\nreset q[1];\n"
        "sdg q[1];\nh q[1];\nc[0] = measure q[1];\n")


def test_qasm_resets_nonreversible():
    text = export_qasm(build_nonreversible(spec(2), 0.2))
    assert sum(line.startswith("reset") for line in text.splitlines()) == 3


def test_qasm_x_basis_has_trailing_h():
    c = Circuit(1, (Gate.ry(0, 0.4),), output_basis="X")
    lines = export_qasm(c).splitlines()
    assert lines[-2] == "h q[0];" and lines[-1].endswith("measure q[0];")


def test_qasm_roundtrip_and_determinism(rng):
    for _ in range(10):
        c = random_circuit(rng, 4, 30)
        text = export_qasm(c)
        assert text == export_qasm(c)
        back = parse_qasm(text)
        assert back.output_qubit == c.output_qubit and back.output_basis == c.output_basis
        assert len(back.gates) == len(c.gates)
        for g, h in zip(c.gates, back.gates):
            assert (g.kind, g.qubits, g.controls) == (h.kind, h.qubits, h.controls)
            assert g.angle == pytest.approx(h.angle, abs=1e-12) if g.angle is not None else h.angle is None


def test_json_roundtrip():
    c = build_reversible(spec(2), 0.7)
    back = from_json(to_json(c))
    assert back.gates == c.gates and back.labels == c.labels
    assert to_json(c) == to_json(back)
