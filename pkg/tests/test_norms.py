import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from wasserlab.base import init_norm
from wasserlab.exceptions import ConfigurationError, DomainError, InputError
from wasserlab.norms import (CustomNorm, EuclideanNorm, L1Norm, LinfNorm, LqNorm, norm_eval,
                             norm_from_json, norm_grad, norm_hessian, sphere_sample,
                             strict_convexity_diagnostic)

coords = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vectors = st.lists(coords, min_size=2, max_size=4).map(np.array)
away = st.one_of(st.floats(0.1, 3.0), st.floats(-3.0, -0.1))
off_axis = st.lists(away, min_size=2, max_size=4).map(np.array)
smooth = st.sampled_from([EuclideanNorm(), LqNorm(1.5), LqNorm(3), LqNorm(4)])
exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0])


def test_values():
    assert norm_eval(EuclideanNorm(), [3, 4]) == pytest.approx(5.0)
    assert norm_eval(LqNorm(3), [1, 1]) == pytest.approx(2 ** (1 / 3))
    assert norm_eval(LinfNorm(), [-3, 2]) == 3.0
    assert norm_eval(L1Norm(), [-3, 2]) == 5.0


def test_lq2_matches_euclidean(rng):
    x = rng.standard_normal((20, 3))
    assert_allclose(LqNorm(2).value(x), EuclideanNorm().value(x), rtol=1e-14)


def test_lq_value_does_not_overflow():
    assert norm_eval(LqNorm(8), [1e60, 1e60]) == pytest.approx(1e60 * 2 ** (1 / 8))


def test_flags():
    assert LqNorm(4).strictly_convex and EuclideanNorm().strictly_convex
    assert not LinfNorm().strictly_convex and not L1Norm().strictly_convex
    assert EuclideanNorm().smoothness_order == 2


def test_euclidean_square_gradient_and_hessian():
    assert_allclose(norm_grad(EuclideanNorm(), 2, [1, 2]), [2, 4])
    assert_allclose(norm_hessian(EuclideanNorm(), 2, [0.3, -1.2]), 2 * np.eye(2), atol=1e-14)


def test_gradient_at_origin():
    assert_allclose(norm_grad(LqNorm(3), 2.0, [0, 0]), [0, 0])
    with pytest.raises(DomainError):
        norm_grad(LqNorm(3), 1.5, [0, 0])


def test_hessian_at_origin_rejected():
    with pytest.raises(DomainError):
        norm_hessian(EuclideanNorm(), 2, [0, 0])


def test_lq_hessian_on_axis():
    h = norm_hessian(LqNorm(4), 2, [1, 0])
    assert_allclose(h, [[2, 0], [0, 0]], atol=1e-12)


@pytest.mark.parametrize('q', [2.5, 3.0, 4.0])
def test_lq_hessian_matches_finite_differences(q, rng):
    spec = LqNorm(q)
    fd = CustomNorm(value_fn=lambda x: float(spec.value(x)),
                    gradient_fn=lambda x, p: spec.power_gradient(x, p), smoothness_order=2)
    for _ in range(10):
        x = rng.uniform(0.2, 2.0, 3) * rng.choice([-1.0, 1.0], 3)
        exact = spec.power_hessian(x, 2.0)
        assert_allclose(fd.power_hessian(x, 2.0), exact, rtol=1e-5, atol=1e-6 * np.abs(exact).max())


def test_custom_norm_without_hessian():
    spec = CustomNorm(value_fn=lambda x: float(np.abs(x).max()))
    assert not spec.has_analytic_hessian
    with pytest.raises(DomainError):
        spec.power_hessian(np.array([1.0, 2.0]), 2.0, allow_fd=False)


def test_vectorised_shapes(rng):
    x = rng.standard_normal((5, 4, 3))
    spec = LqNorm(3)
    assert spec.value(x).shape == (5, 4)
    assert spec.power_gradient(x, 2).shape == (5, 4, 3)
    assert spec.power_hessian(x, 2).shape == (5, 4, 3, 3)


def test_bad_configuration():
    with pytest.raises(ConfigurationError):
        LqNorm(1.0)
    with pytest.raises(ConfigurationError):
        CustomNorm()
    with pytest.raises(ConfigurationError):
        init_norm({'kind': 'l7'})
    with pytest.raises(ConfigurationError, match=r"\['r'\]"):
        init_norm({'kind': 'lq', 'r': 3})
    with pytest.raises(ConfigurationError):
        init_norm({'kind': 'lq', 'q': 'abc'})
    with pytest.raises(ConfigurationError):
        norm_from_json({'kind': 'custom'})


def test_norm_from_json():
    assert norm_from_json('{"kind": "lq", "q": 4}') == LqNorm(4)
    assert isinstance(norm_from_json({'kind': 'linf'}), LinfNorm)
    with pytest.raises(InputError):
        norm_from_json('{"kind": ')


def test_sphere_sample():
    pts = sphere_sample(2, 4, seed=0)
    assert len(pts) == 4
    assert_allclose([np.linalg.norm(p) for p in pts], 1.0, atol=1e-12)
    again = sphere_sample(2, 4, seed=0)
    assert all(np.array_equal(a, b) for a, b in zip(pts, again))
    on_l4 = sphere_sample(3, 10, seed=1, spec=LqNorm(4))
    assert_allclose(LqNorm(4).value(np.array(on_l4)), 1.0, atol=1e-12)
    with pytest.raises(DomainError):
        sphere_sample(0, 3)


def test_strict_convexity_diagnostic():
    assert strict_convexity_diagnostic(LqNorm(3)) == 1.0
    assert strict_convexity_diagnostic(EuclideanNorm()) == 1.0
    assert strict_convexity_diagnostic(LinfNorm()) < 1.0
    assert strict_convexity_diagnostic(L1Norm()) < 1.0


@given(vectors, st.floats(-5, 5, allow_nan=False))
def test_homogeneity(x, lam):
    for spec in (EuclideanNorm(), LqNorm(3), LinfNorm(), L1Norm()):
        assert math.isclose(float(spec.value(lam * x)), abs(lam) * float(spec.value(x)),
                            rel_tol=1e-12, abs_tol=1e-12)


@given(vectors, vectors)
def test_triangle_inequality(x, y):
    if x.size != y.size:
        return
    for spec in (EuclideanNorm(), LqNorm(1.5), LqNorm(4), LinfNorm(), L1Norm()):
        assert spec.value(x + y) <= spec.value(x) + spec.value(y) + 1e-9


@settings(max_examples=50)
@given(smooth, exponents, off_axis)
def test_gradient_matches_central_differences(spec, p, x):
    fd = CustomNorm(value_fn=lambda y: float(spec.value(y)))
    exact = spec.power_gradient(x, p)
    assert np.linalg.norm(fd.power_gradient(x, p) - exact) <= 1e-5 * np.linalg.norm(exact)


@given(smooth, exponents, off_axis)
def test_hessian_symmetric_psd(spec, p, x):
    h = spec.power_hessian(x, p)
    scale = max(1.0, float(np.abs(h).max()))
    assert np.abs(h - h.T).max() <= 1e-9
    assert np.linalg.eigvalsh(h).min() >= -1e-8 * scale


@given(smooth, exponents, off_axis, st.floats(0.1, 10.0))
def test_hessian_homogeneity(spec, p, x, lam):
    scaled = spec.power_hessian(lam * x, p)
    expected = lam ** (p - 2) * spec.power_hessian(x, p)
    assert_allclose(scaled, expected, rtol=1e-8, atol=1e-8 * np.abs(expected).max())
