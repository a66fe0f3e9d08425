import numpy as np
import pytest
from numpy.testing import assert_allclose

from wasserlab.exceptions import DomainError
from wasserlab.measures import DiscreteMeasure, affine_image, dirac, measures_close
from wasserlab.norms import EuclideanNorm, LinfNorm, LqNorm
from wasserlab.potentials import (HessianPairing, atom_estimate, direction_search,
                                  integrated_T, pairing_T, potential_eval, potential_grid,
                                  potentials_agree, second_diff_bound, second_diff_G,
                                  support_in_translate_check)
from wasserlab.projections import AffineSubspace

MU = DiscreteMeasure([[0.0, 0.0], [1.0, 1.0]], [0.3, 0.7])
DIAG = np.array([1.0, 1.0]) / np.sqrt(2)


def test_potential_of_dirac():
    assert potential_eval(dirac([1, 0]), EuclideanNorm(), 2, [0, 0]) == pytest.approx(1.0)
    assert potential_eval(MU, LinfNorm(), 1, [1, 0]) == pytest.approx(0.3 + 0.7)


def test_potential_grid_orientation():
    xs, ys = [0.0, 1.0, 2.0], [-1.0, 0.5]
    grid = potential_grid(MU, LqNorm(3), 1.5, xs, ys)
    assert grid.shape == (2, 3)
    assert grid[1, 2] == pytest.approx(potential_eval(MU, LqNorm(3), 1.5, [2.0, 0.5]))
    with pytest.raises(DomainError):
        potential_grid(dirac([0, 0, 0]), LqNorm(3), 1.5, xs, ys)


def test_max_norm_potentials_coincide():
    mu = DiscreteMeasure([[0, 1], [0, -1]], [0.5, 0.5])
    nu = DiscreteMeasure([[0, 1], [0, -1], [1, 0], [-1, 0]], [0.25] * 4)
    ticks = np.linspace(-3, 3, 61)
    gx, gy = np.meshgrid(ticks, ticks)
    ok, gap = potentials_agree(mu, nu, LinfNorm(), 1, np.stack([gx.ravel(), gy.ravel()], axis=1))
    assert ok and gap <= 1e-12
    assert not measures_close(mu, nu)
    ok, _ = potentials_agree(mu, nu, LqNorm(3), 1, [[0.5, 0.2]])
    assert not ok


def test_potential_commutes_with_euclidean_isometries(rng):
    theta = 0.7
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    shift = np.array([0.4, -1.0])
    moved = affine_image(MU, rot, shift)
    for x in rng.uniform(-2, 2, (10, 2)):
        assert potential_eval(moved, EuclideanNorm(), 1.5, rot @ x + shift) == pytest.approx(
            potential_eval(MU, EuclideanNorm(), 1.5, x), abs=1e-9)


def test_second_difference_of_euclidean_square_is_one(rng):
    for _ in range(5):
        x, h = rng.standard_normal(2), rng.standard_normal(2)
        assert second_diff_G(EuclideanNorm(), 2, x, h) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        second_diff_G(EuclideanNorm(), 2, [1, 0], [0, 0])


def test_second_difference_at_origin_is_one():
    assert second_diff_G(LqNorm(3), 1.5, [0, 0], [0.3, -0.2]) == pytest.approx(1.0)


def test_second_difference_bound_is_finite():
    bound = second_diff_bound(LqNorm(3), 1.5, samples=20)
    assert 0 < bound < np.inf


def test_atom_recovery():
    at_a = atom_estimate(MU, LqNorm(3), 1.5, [0, 0], DIAG)
    at_b = atom_estimate(MU, LqNorm(3), 1.5, [1, 1], DIAG)
    mid = atom_estimate(MU, LqNorm(3), 1.5, [0.5, 0.5], DIAG)
    assert at_a.estimate == pytest.approx(0.3, abs=1e-3)
    assert at_b.estimate == pytest.approx(0.7, abs=1e-3)
    assert mid.estimate == pytest.approx(0.0, abs=1e-3)
    assert at_a.converged and at_b.converged and mid.converged
    assert len(at_a.h_sequence) == 21
    assert at_a.h_sequence[-1][0] == pytest.approx(2.0 ** -20)


def test_atom_estimate_preconditions():
    with pytest.raises(DomainError):
        atom_estimate(MU, LqNorm(3), 2.0, [0, 0], DIAG)
    with pytest.raises(DomainError):
        atom_estimate(MU, LqNorm(3), 1.5, [0, 0], DIAG, steps=3)
    with pytest.raises(DomainError):
        atom_estimate(MU, LqNorm(3), 1.5, [0, 0], [1.0, 1.0])


def test_pairing_validation():
    with pytest.raises(DomainError):
        HessianPairing(np.array([1.0, 1.0]), np.array([1.0, 0.0]), EuclideanNorm(), 2)
    with pytest.raises(DomainError):
        HessianPairing(np.array([1.0, 0.0]), np.array([1.0, 0.0]), EuclideanNorm(), 1.5)


def test_pairing_values():
    e1, e2 = np.eye(2)
    orth = HessianPairing(e1, e2, EuclideanNorm(), 2)
    assert pairing_T(orth, [0.3, 0.8]) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(DomainError):
        pairing_T(orth, [0, 0])
    assert pairing_T(HessianPairing(e1, e1, EuclideanNorm(), 4), [0, 0]) == 0.0
    axis = HessianPairing(e1, e1, LqNorm(4), 2)
    assert pairing_T(axis, [0.0, 1.7]) == pytest.approx(0.0, abs=1e-12)
    assert pairing_T(axis, [1.0, 0.0]) == pytest.approx(2.0)


def test_integrated_pairing_excludes_atom_for_p2():
    e1 = np.array([1.0, 0.0])
    pairing = HessianPairing(e1, e1, EuclideanNorm(), 2)
    res = integrated_T(MU, pairing, [0, 0])
    assert res.excluded
    assert res.value == pytest.approx(0.7 * 2)
    assert not integrated_T(MU, pairing, [0.5, 2.0]).excluded


def test_direction_search():
    assert direction_search(EuclideanNorm(), 2, 2) is None
    assert direction_search(EuclideanNorm(), 4, 2) is not None
    found = direction_search(LqNorm(4), 2, 3)
    assert found is not None and found.nonconstant
    assert found.min_value == pytest.approx(0.0, abs=1e-8)
    axis = int(np.argmax(np.abs(found.v1)))
    assert abs(found.v1[axis]) == pytest.approx(1.0) and abs(found.v2[axis]) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        direction_search(LqNorm(4), 2, 3, grid=8)


def test_support_in_translate():
    e1 = np.array([1.0, 0.0])
    pairing = HessianPairing(e1, e1, LqNorm(4), 2)
    y_axis = AffineSubspace.span([0.0, 1.0])
    on_axis = DiscreteMeasure([[0.0, 1.0], [0.0, -2.0]], [0.5, 0.5])
    assert support_in_translate_check(on_axis, pairing, y_axis)
    assert not support_in_translate_check(MU, pairing, y_axis)
