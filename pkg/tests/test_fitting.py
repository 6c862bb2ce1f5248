import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ehands.compiler import build_reversible
from ehands.encoding import DomainError
from ehands.fitting import (PolySpec, cascade_weights, expand_cascade, fit_polynomial, horner,
                            predict, split_signs)
from ehands.simulator import run_exact


@pytest.mark.parametrize("a,w", [
    ([1 / 3] * 3, [0.5, 2 / 3]),
    ([1, 0, 0], [1, 1]),
    ([0.2] * 5, [1 / 2, 2 / 3, 3 / 4, 4 / 5]),
    ([0, 0, 1], [0, 0]),
    ([0.5, 0.5], [0.5]),
])
def test_cascade_weights_examples(a, w):
    assert cascade_weights(a) == pytest.approx(w)


def test_cascade_weights_errors():
    with pytest.raises(DomainError):
        cascade_weights([0.5, -0.1, 0.6])
    with pytest.raises(DomainError):
        cascade_weights([0.5, 0.4])


def test_cascade_roundtrip():
    rng = np.random.default_rng(1)
    for _ in range(500):
        k = int(rng.integers(2, 9))
        a = rng.dirichlet(np.ones(k))
        a[rng.random(k) < 0.2] = 0
        if a.sum() == 0:
            continue
        a /= a.sum()
        w = cascade_weights(a)
        assert all(0 <= v <= 1 for v in w)
        assert np.max(np.abs(expand_cascade(w) - a)) < 1e-9


@pytest.mark.parametrize("c,mag,sig", [
    ([0.5, -0.3], [0.5, 0.3], [1, -1]),
    ([0.0, 0.0], [0, 0], [1, 1]),
    ([-1.0], [1.0], [-1]),
])
def test_split_signs(c, mag, sig):
    m, s = split_signs(c)
    assert np.allclose(m, mag) and list(s) == sig
    assert np.allclose(m * s, c)


def test_fit_exact_polynomial_target():
    rep = fit_polynomial("x2_over3", 2)
    assert np.allclose(rep.spec.raw_coeffs, [0, 0, 1 / 3], atol=1e-9)
    assert rep.spec.scale == 1 and rep.grid_points == 201


def test_fit_gauss_is_even():
    c = fit_polynomial("gauss9x2", 6).spec.raw_coeffs
    assert max(abs(v) for v in c[1::2]) < 1e-9


@pytest.mark.parametrize("target,d", [("relu_halfx", 3), ("arctan5x", 3), ("x2_over3", 2),
                                      ("exp2x", 5), ("arctan5x", 5), ("gauss9x2", 6)])
def test_fit_quality_and_scaling(target, d):
    rep = fit_polynomial(target, d)
    s = rep.spec
    assert rep.max_abs_err < 0.1
    assert max(abs(v) for v in s.a) <= 1
    assert np.allclose(np.array(s.a) * s.scale, s.raw_coeffs, atol=1e-12)
    assert s.attenuation == pytest.approx(1 / (d + 1))
    assert s.scale == max(1.0, max(abs(v) for v in s.raw_coeffs))


def test_relu_fit_shape():
    spec = fit_polynomial("relu_halfx", 3).spec
    xs = np.linspace(-1, 1, 21)
    ys = horner(spec.raw_coeffs, xs)
    assert ys[-1] == pytest.approx(0.5, abs=0.08) and abs(ys[0]) < 0.08
    assert np.all(np.diff(ys[10:]) > 0)


def test_fit_errors():
    with pytest.raises(DomainError):
        fit_polynomial("exp2x", -1)
    with pytest.raises(DomainError):
        fit_polynomial("exp2x", 5, grid_n=4)
    with pytest.raises(DomainError):
        fit_polynomial("sin", 2)


def test_custom_coefficients():
    rep = fit_polynomial([0.5, 2.0, -1.0], 2)
    assert rep.spec.scale == 2.0 and rep.max_abs_err == 0
    assert rep.spec.signs == (1, 1, -1)


def test_predict_examples():
    s4 = PolySpec.from_normalized([0.1] * 5)
    assert predict(s4, 0.1) == pytest.approx(0.5)
    assert predict(s4, 0.0) == 0
    spec = fit_polynomial("x2_over3", 2).spec
    ev = run_exact(build_reversible(spec, 0.9)).ev
    assert predict(spec, ev) == pytest.approx(0.27, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=8), st.floats(-1, 1))
def test_predict_inverts_attenuation(coeffs, x):
    spec = PolySpec.from_coeffs(coeffs)
    assert max(abs(v) for v in spec.a) <= 1
    ev = horner(spec.a, x) / (spec.degree + 1)
    if abs(ev) <= 1:
        assert predict(spec, ev) == pytest.approx(horner(coeffs, x), abs=1e-12 * (1 + spec.scale))


def test_spec_json_roundtrip():
    spec = fit_polynomial("arctan5x", 5).spec
    back = PolySpec.from_json(spec.to_json())
    assert back == spec
