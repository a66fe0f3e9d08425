import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wasserlab.exceptions import DomainError
from wasserlab.measures import (DiscreteMeasure, TwoPointParams, barycenter, dirac,
                                kloeckner_two_point, measures_close, random_measure)
from wasserlab.norms import EuclideanNorm, L1Norm, LinfNorm, LqNorm
from wasserlab.projections import AffineSubspace
from wasserlab.rigidity import (IsometryCandidate, alignment_check, apply_candidate,
                                commutation_check, convexity_gap, dirac_align_construct,
                                isometry_certificate, l1_escape_construct, midpoint_witness,
                                segment_test)
from wasserlab.transport import wasserstein

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def test_alignment_of_diracs():
    report = alignment_check(dirac([0, 0]), dirac(E1), dirac(-E1), EuclideanNorm(), 2)
    assert not report.aligned
    assert report.defect == pytest.approx(2.0)
    with pytest.raises(DomainError):
        alignment_check(dirac([0, 0]), dirac([0, 0]), dirac(E1), EuclideanNorm(), 2)


@pytest.mark.parametrize('spec', [EuclideanNorm(), LqNorm(3), LinfNorm(), L1Norm()])
@pytest.mark.parametrize('p', [1.0, 1.5, 3.0])
def test_dirac_dilation_is_aligned(spec, p, rng):
    x = rng.uniform(-2, 2, 2)
    nu = random_measure(rng, 2, 3)
    eta = dirac_align_construct(x, nu, spec, p)
    report = alignment_check(dirac(x), nu, eta, spec, p)
    assert report.aligned
    assert report.d_mu_eta == pytest.approx(2 * report.d_mu_nu, abs=1e-9)


def test_dilation_of_dirac_itself_rejected():
    with pytest.raises(DomainError):
        dirac_align_construct([1.0, 2.0], dirac([1.0, 2.0]))


def test_l1_escape():
    mu = DiscreteMeasure([[0, 0], [1, 0]], [0.5, 0.5])
    eta = l1_escape_construct(mu, [0, 1])
    assert measures_close(eta, dirac([0, 2.5]))
    report = alignment_check(mu, dirac([0, 1]), eta, L1Norm(), 1)
    assert report.d_mu_nu == pytest.approx(1.5, abs=1e-10)
    assert report.d_nu_eta == pytest.approx(1.5, abs=1e-10)
    assert report.d_mu_eta == pytest.approx(3.0, abs=1e-10)
    assert report.aligned
    with pytest.raises(DomainError):
        l1_escape_construct(DiscreteMeasure([[0, 2], [1, 0]], [0.5, 0.5]), [0, 1])


def test_segment_test():
    assert segment_test([0, 0], [1, 1], [2, 2], LqNorm(3))
    assert not segment_test([0, 0], [1, 0], [1, 1], LqNorm(3))
    with pytest.raises(DomainError):
        segment_test([0, 0], [1, 0], [1, 1], LinfNorm())


def test_midpoint_witness():
    mu = DiscreteMeasure([[0, 0], [1, 0]], [0.5, 0.5])
    witness = midpoint_witness(mu, LqNorm(3))
    assert_allclose(witness.midpoint, [0.5, 0.0])
    assert witness.etas_tried > 0
    assert witness.min_defect > 0
    with pytest.raises(DomainError):
        midpoint_witness(dirac([0, 0]), LqNorm(3))
    with pytest.raises(DomainError):
        midpoint_witness(mu, L1Norm())


def test_phi_t_shifts_parameter():
    mu0 = kloeckner_two_point(TwoPointParams(E1, np.zeros(2), 0.0, 1.0, 0.0))
    image = apply_candidate(IsometryCandidate.phi_t(math.log(2), E1), mu0)
    assert measures_close(image, DiscreteMeasure([[-2, 0], [0.5, 0]], [0.2, 0.8]))
    assert apply_candidate(IsometryCandidate.phi_t(1.0, E1), dirac([3, 4])) == dirac([3, 4])


def test_phi_t_distances_for_q3():
    spec = LqNorm(3)
    mu0 = DiscreteMeasure([-E1, E1], [0.5, 0.5])
    cand = IsometryCandidate.phi_t(math.log(2), E1)
    before = wasserstein(mu0, dirac(E2), spec, 2) ** 2
    after = wasserstein(apply_candidate(cand, mu0), dirac(E2), spec, 2) ** 2
    assert before == pytest.approx(2 ** (2 / 3), abs=1e-8)
    assert after == pytest.approx(1.73070, abs=1e-5)
    cert = isometry_certificate(cand, [(mu0, dirac(E2))], spec, 2)
    assert not cert.preserved and cert.witness == 0


def test_phi_t_preserves_euclidean_distances_to_diracs(rng):
    cand = IsometryCandidate.phi_t(0.8, E1)
    probes = []
    for _ in range(5):
        params = TwoPointParams(E1, np.zeros(2), rng.uniform(-1, 1), rng.uniform(0.2, 2),
                                rng.uniform(-1, 1))
        probes.append((kloeckner_two_point(params), dirac(rng.uniform(-2, 2, 2))))
    cert = isometry_certificate(cand, probes, EuclideanNorm(), 2, tol=1e-9)
    assert cert.preserved and cert.probes == 5


def test_phi_star_for_q3():
    spec = LqNorm(3)
    mu1 = DiscreteMeasure([-E1, 2 * E1], [2 / 3, 1 / 3])
    image = apply_candidate(IsometryCandidate.phi_star(E1), mu1)
    assert measures_close(image, DiscreteMeasure([-2 * E1, E1], [1 / 3, 2 / 3]))
    nu = dirac([1, 1])
    assert wasserstein(mu1, nu, spec, 2) ** 2 == pytest.approx(3.41363, abs=1e-5)
    assert wasserstein(image, nu, spec, 2) ** 2 == pytest.approx(3.74029, abs=1e-5)


def test_two_point_maps_reject_larger_measures():
    mu = DiscreteMeasure([[0, 0], [1, 0], [2, 0]], [0.2, 0.3, 0.5])
    with pytest.raises(DomainError):
        apply_candidate(IsometryCandidate.phi_star(E1), mu)


def test_convexity_gap():
    for A in (1.5, 2.0, 4.0):
        assert convexity_gap(3, A) < 0
        assert convexity_gap(1.5, A) > 0
    assert convexity_gap(3, 1.0) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(DomainError):
        convexity_gap(0, 2.0)


def test_rotation_rigid_for_euclidean_not_for_l4(rng):
    cand = IsometryCandidate.rotation(math.pi / 4)
    pairs = [(random_measure(rng, 2, 3), random_measure(rng, 2, 2)) for _ in range(10)]
    assert isometry_certificate(cand, pairs, EuclideanNorm(), 2).preserved
    spread = DiscreteMeasure([[-1, 0], [1, 0]], [0.5, 0.5])
    cert = isometry_certificate(cand, [(spread, dirac([0, 0]))], LqNorm(4), 2)
    assert cert.rhs == pytest.approx(1.0)
    assert cert.lhs == pytest.approx(0.5 ** 0.25)
    assert cert.max_violation > 1e-3


def test_rotation_keeps_barycenter(rng):
    mu = random_measure(rng, 2, 4)
    rotated = apply_candidate(IsometryCandidate.rotation(1.1), mu)
    assert_allclose(barycenter(rotated), barycenter(mu), atol=1e-12)


def test_commutation():
    x_axis = AffineSubspace.span(E1)
    mu = DiscreteMeasure([[0, 0], [1, 1]], [0.5, 0.5])
    shift = IsometryCandidate.pushforward(lambda x: x + 2 * E1, label='shift')
    assert commutation_check(shift, mu, x_axis, EuclideanNorm(), 2)
    assert not commutation_check(IsometryCandidate.rotation(math.pi / 4), mu, x_axis,
                                 EuclideanNorm(), 2)


def test_candidate_json():
    assert IsometryCandidate.phi_t(0.5, E1).to_json() == {'kind': 'phi_t', 't': 0.5,
                                                          'axis': [1.0, 0.0]}
    assert IsometryCandidate.rotation(1.0).to_json() == {'kind': 'rotation', 'angle': 1.0}
