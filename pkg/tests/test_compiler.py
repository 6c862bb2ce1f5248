import math

import numpy as np
import pytest

from ehands.circuit import resource_report
from ehands.compiler import (MonomialTerm, build_mse, build_multivariable, build_nonreversible,
                             build_reversible, build_shallow, mse_value, multivariable_value)
from ehands.encoding import DomainError
from ehands.fitting import PolySpec, attenuated_value
from ehands.propagation import pauli_expectation
from ehands.simulator import run_exact


def random_spec(rng, d):
    return PolySpec.from_normalized(rng.uniform(-1, 1, d + 1))


def test_reversible_d1_half_x():
    c = build_reversible(PolySpec.from_normalized([0, 1]), 0.5)
    assert run_exact(c).ev == pytest.approx(0.25, abs=1e-12)


def test_reversible_layout_d4():
    c = build_reversible(random_spec(np.random.default_rng(0), 4), 0.3)
    assert c.labels.count("data") == 4 and c.labels.count("coeff") == 5
    assert c.labels.count("ancilla") == 3
    assert c.output_qubit == 0 and c.output_basis == "Z"


def test_reversible_d3_counts():
    r = resource_report(build_reversible(random_spec(np.random.default_rng(0), 3), 0.3))
    assert (r.n_qubits, r.n_two_qubit_gates) == (9, 13)


def test_nonreversible_d1():
    r = resource_report(build_nonreversible(PolySpec.from_normalized([0.3, 0.4]), 0.1))
    assert (r.n_qubits, r.n_resets) == (2, 1)


@pytest.mark.parametrize("d", range(1, 5))
def test_builders_match_horner_statevector(d):
    rng = np.random.default_rng(d)
    for _ in range(6):
        s, x = random_spec(rng, d), rng.uniform(-1, 1)
        want = attenuated_value(s, x)
        for build in (build_reversible, build_nonreversible, build_shallow):
            c = build(s, x)
            if c.n_qubits <= 16:
                assert abs(run_exact(c).ev - want) < 1e-9


def test_negative_coefficients_use_x_gate():
    s = PolySpec.from_normalized([-0.5, 0.25, -1.0])
    c = build_reversible(s, 0.4)
    assert sum(g.kind == "X" for g in c.gates) == 2
    assert run_exact(c).ev == pytest.approx(attenuated_value(s, 0.4), abs=1e-12)


def test_signed_horner_random_masks(rng):
    for d in (2, 3, 5):
        for _ in range(5):
            s = random_spec(rng, d)
            x = rng.uniform(-1, 1)
            assert abs(pauli_expectation(build_reversible(s, x)) - attenuated_value(s, x)) < 1e-9


def test_shallow_d6():
    rng = np.random.default_rng(6)
    s, x = random_spec(rng, 6), 0.37
    assert abs(pauli_expectation(build_shallow(s, x)) - attenuated_value(s, x)) < 1e-9


def test_shallow_d1_is_one_product_one_sum():
    c = build_shallow(PolySpec.from_normalized([0.2, 0.9]), 0.5)
    r = resource_report(c)
    assert r.n_two_qubit_gates == 3 and r.n_ancilla == 0


@pytest.mark.parametrize("d", [2, 4, 8, 16])
def test_shallow_depth_logarithmic(d):
    s = PolySpec.from_normalized([0.5] * (d + 1))
    depth = resource_report(build_shallow(s, 0.1)).two_qubit_depth
    bound = 2 * math.ceil(math.log2(d)) + 1 + 3 * math.ceil(math.log2(d + 1))
    assert depth <= bound
    assert depth / math.log2(d) <= 10


def test_shallow_beats_linear_at_d8():
    s = PolySpec.from_normalized([0.5] * 9)
    assert resource_report(build_shallow(s, 0.1)).two_qubit_depth < \
        resource_report(build_reversible(s, 0.1)).two_qubit_depth


def test_builders_reject_bad_input():
    s = PolySpec.from_normalized([0.1, 0.2])
    with pytest.raises(DomainError):
        build_reversible(s, 1.2)
    with pytest.raises(DomainError):
        build_nonreversible(PolySpec.from_normalized([0.3]), 0.1)


@pytest.mark.parametrize("terms,xs,want", [
    ([MonomialTerm(1.0, (1, 1))], (0.5, -0.6), -0.3),
    ([MonomialTerm(1.0, (1, 0)), MonomialTerm(1.0, (0, 1))], (0.4, -0.8), -0.2),
    ([MonomialTerm(0.5, (2, 1))], (0.8, 0.5), 0.16),
])
def test_multivariable_examples(terms, xs, want):
    assert run_exact(build_multivariable(terms, xs)).ev == pytest.approx(want, abs=1e-12)


def test_multivariable_random(rng):
    for _ in range(10):
        terms = [MonomialTerm(rng.uniform(-1, 1), tuple(rng.integers(0, 3, 3)))
                 for _ in range(int(rng.integers(1, 5)))]
        xs = rng.uniform(-1, 1, 3)
        c = build_multivariable(terms, xs)
        assert abs(pauli_expectation(c) - multivariable_value(terms, xs)) < 1e-9


def test_multivariable_errors():
    with pytest.raises(DomainError):
        build_multivariable([], [0.1])
    with pytest.raises(DomainError):
        MonomialTerm(1.5, (1,))
    with pytest.raises(DomainError):
        build_multivariable([MonomialTerm(0.5, (1, 1))], [0.3])


def test_mse_examples():
    assert run_exact(build_mse([0.2, -0.4, 0.9, 0.1], [0.2, -0.4, 0.9, 0.1])).ev == pytest.approx(0, abs=1e-12)
    assert pauli_expectation(build_mse([-1] * 4, [1] * 4)) == pytest.approx(1, abs=1e-12)


def test_mse_n4_resources():
    r = resource_report(build_mse([0.1, 0.2, 0.3, 0.4], [0.0, -0.2, 0.5, 0.9]))
    assert (r.n_two_qubit_gates, r.two_qubit_depth) == (29, 9)
    assert r.n_qubits == 4 * 4 + 3


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8])
def test_mse_random(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        xs, ys = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
        assert abs(pauli_expectation(build_mse(xs, ys)) - mse_value(xs, ys) / 4) < 1e-9


def test_mse_length_mismatch():
    with pytest.raises(DomainError):
        build_mse([0.1, 0.2], [0.3])
