"""Scenario corpus: named, tolerance-tagged numerical checks of the rigidity toolkit.

Each scenario is registered under its id and follows the
``Scenario(cfg).call(params) -> ScenarioResult`` protocol.
"""
import logging
import math
import multiprocessing as mp
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from .base import SCENARIO_REGISTRY, init_scenario, register_scenario
from .exceptions import ConfigurationError, WasserlabError
from .measures import (DiscreteMeasure, TwoPointParams, dirac, kloeckner_two_point,
                       measures_close, random_measure)
from .norms import CustomNorm, EuclideanNorm, L1Norm, LinfNorm, LqNorm
from .potentials import HessianPairing, atom_estimate, direction_search, pairing_T, potentials_agree
from .projections import (AffineSubspace, family_F_check, fingerprint, fingerprints_close,
                          kernel_membership, max_subspace_in_kernel, perturbation_grid,
                          perturbation_triple, project_measure, project_point,
                          random_measure_on)
from .rigidity import (IsometryCandidate, alignment_check, apply_candidate, commutation_check,
                       convexity_gap, dirac_align_construct, isometry_certificate,
                       l1_escape_construct, midpoint_witness)
from .transport import cyclical_monotonicity_check, wasserstein

logger = logging.getLogger(__name__)

RELATIONS = {
    'eq': lambda obs, exp, tol: abs(obs - exp) <= tol,
    'le': lambda obs, exp, tol: obs <= exp + tol,
    'ge': lambda obs, exp, tol: obs >= exp - tol,
    'lt': lambda obs, exp, tol: obs < exp,
    'gt': lambda obs, exp, tol: obs > exp,
}


@dataclass(frozen=True)
class Check:
    name: str
    observed: float
    expected: float
    tol: float = 0.0
    relation: str = 'eq'

    @property
    def passed(self) -> bool:
        obs = float(self.observed)
        return not math.isnan(obs) and RELATIONS[self.relation](obs, self.expected, self.tol)


@dataclass
class ScenarioResult:
    scenario_id: str
    status: str
    anchor: str
    seed: int
    checks: List[Check] = field(default_factory=list)
    message: str = ''

    def to_json(self) -> Dict:
        return {
            'scenario_id': self.scenario_id,
            'status': self.status,
            'anchor': self.anchor,
            'seed': self.seed,
            'observed': {c.name: float(c.observed) for c in self.checks},
            'expected': {c.name: {'value': float(c.expected), 'tol': float(c.tol),
                                  'relation': c.relation, 'passed': c.passed}
                         for c in self.checks},
            'message': self.message,
        }


class Scenario:
    scenario_id = ''
    anchor = ''

    def __init__(self, cfg: Optional[Dict] = None):
        cfg = cfg or {}
        self.cfg = cfg
        self.seed = int(cfg.get('seed', 0))
        self.transport_cfg = cfg.get('transport')
        self.projection_cfg = cfg.get('projection')
        self.potentials_cfg = cfg.get('potentials') or {}

    def checks(self, params: Dict) -> List[Check]:
        raise NotImplementedError

    def call(self, params: Optional[Dict] = None) -> ScenarioResult:
        try:
            checks = self.checks(params or {})
        except WasserlabError as e:
            logger.error('scenario %s raised %s: %s', self.scenario_id, type(e).__name__, e)
            return ScenarioResult(self.scenario_id, 'fail', self.anchor, self.seed,
                                  message=f'{type(e).__name__}: {e}')
        failed = [c.name for c in checks if not c.passed]
        status = 'fail' if failed else 'pass'
        message = 'failed: ' + ', '.join(failed) if failed else ''
        return ScenarioResult(self.scenario_id, status, self.anchor, self.seed, checks, message)

    def d(self, mu, nu, spec, p):
        return wasserstein(mu, nu, spec, p, self.transport_cfg)


@register_scenario('dirac_dilation_alignment')
class DiracDilationAlignment(Scenario):
    anchor = 'Dirac characterization for p > 1: dilation of nu about x'

    def checks(self, params):
        rng = np.random.default_rng(self.seed)
        instances = int(params.get('instances', 100))
        norms = [EuclideanNorm(), LqNorm(3), LqNorm(4), LinfNorm(), L1Norm()]
        exponents = [1.0, 1.5, 2.0, 3.0]
        worst_defect = worst_ratio = 0.0
        for _ in range(instances):
            dim = int(rng.integers(2, 4))
            spec = norms[int(rng.integers(len(norms)))]
            p = exponents[int(rng.integers(len(exponents)))]
            x = rng.uniform(-2, 2, dim)
            nu = random_measure(rng, dim, int(rng.integers(1, 4)))
            eta = dirac_align_construct(x, nu)
            report = alignment_check(dirac(x), nu, eta, spec, p, cfg=self.transport_cfg)
            worst_defect = max(worst_defect, abs(report.defect))
            worst_ratio = max(worst_ratio, abs(report.d_mu_eta - 2 * report.d_mu_nu))
        return [Check('max_defect', worst_defect, 0.0, 1e-8),
                Check('max_double_distance_gap', worst_ratio, 0.0, 1e-9)]


@register_scenario('l1_aligned_nondirac')
class L1AlignedNonDirac(Scenario):
    anchor = 'l1 norm, p = 1: aligned triple with a non-Dirac first measure'

    def checks(self, params):
        spec = L1Norm()
        mu = DiscreteMeasure([[0.0, 0.0], [1.0, 0.0]], [0.5, 0.5])
        y = np.array(params.get('y', [0.0, 1.0]), dtype=float)
        eta = l1_escape_construct(mu, y)
        report = alignment_check(mu, dirac(y), eta, spec, 1.0, cfg=self.transport_cfg)
        witness = midpoint_witness(mu, LqNorm(3))
        return [Check('d_mu_nu', report.d_mu_nu, 1.5, 1e-10),
                Check('d_nu_eta', report.d_nu_eta, 1.5, 1e-10),
                Check('d_mu_eta', report.d_mu_eta, 3.0, 1e-10),
                Check('defect', report.defect, 0.0, 1e-10),
                Check('strictly_convex_min_defect', witness.min_defect, 1e-6, relation='gt')]


@register_scenario('maxnorm_potential_equality')
class MaxNormPotentialEquality(Scenario):
    anchor = 'max-norm example: equal potentials of different measures'

    def checks(self, params):
        spec = LinfNorm()
        mu = DiscreteMeasure([[0, 1], [0, -1]], [0.5, 0.5])
        nu = DiscreteMeasure([[0, 1], [0, -1], [1, 0], [-1, 0]], [0.25] * 4)
        size = int(params.get('grid', 61))
        ticks = np.round(np.linspace(-3.0, 3.0, size), 12)
        gx, gy = np.meshgrid(ticks, ticks)
        points = np.stack([gx.ravel(), gy.ravel()], axis=1)
        _, gap = potentials_agree(mu, nu, spec, 1.0, points)
        return [Check('max_potential_gap', gap, 0.0, 1e-12),
                Check('grid_points', len(points), size * size, 0),
                Check('measures_equal', float(measures_close(mu, nu)), 0.0, 0)]


@register_scenario('l4_kernel_surface')
class L4KernelSurface(Scenario):
    anchor = 'l4 projection onto the diagonal: kernel set x^3 + y^3 + z^3 = 0'

    def checks(self, params):
        spec = LqNorm(4)
        p = 2.0
        L = AffineSubspace.span([1.0, 1.0, 1.0])
        rng = np.random.default_rng(self.seed)
        count = int(params.get('points', 100))
        xy = rng.uniform(-1, 1, (count, 2))
        surface = np.column_stack([xy, -np.cbrt(xy[:, 0] ** 3 + xy[:, 1] ** 3)])
        cfg = self.projection_cfg
        inside = sum(kernel_membership(x, L, spec, p, cfg) for x in surface)
        outside = sum(not kernel_membership(x + 0.2, L, spec, p, cfg) for x in surface)
        span = max_subspace_in_kernel(L, spec, p, [[1.0, -1.0, 0.0]], cfg)
        return [Check('surface_points_in_kernel', inside, count, 0),
                Check('shifted_points_outside', outside, count, 0),
                Check('witness_1_-1_0', float(kernel_membership([1, -1, 0], L, spec, p, cfg)), 1.0),
                Check('witness_0_-1_1', float(kernel_membership([0, -1, 1], L, spec, p, cfg)), 1.0),
                Check('witness_1_-2_1', float(kernel_membership([1, -2, 1], L, spec, p, cfg)), 0.0),
                Check('kernel_span_dimension', span.rank, 1, 0)]


@register_scenario('projection_homogeneity')
class ProjectionHomogeneity(Scenario):
    anchor = 'projection is homogeneous and commutes with translations along the subspace'

    def checks(self, params):
        spec = LqNorm(float(params.get('q', 3.0)))
        p = float(params.get('p', 2.0))
        rng = np.random.default_rng(self.seed)
        samples = int(params.get('samples', 100))
        cfg = self.projection_cfg
        homog = trans = affine = idem = 0.0
        for _ in range(samples):
            dirs = rng.standard_normal((int(rng.integers(1, 3)), 3))
            L = AffineSubspace(np.zeros(3), dirs)
            x = rng.uniform(-2, 2, 3)
            lam = rng.uniform(-3, 3)
            k = L.point(rng.uniform(-2, 2, L.rank))
            px = project_point(x, L, spec, p, cfg)
            homog = max(homog, np.abs(project_point(lam * x + k, L, spec, p, cfg)
                                      - (lam * px + k)).max())
            v0 = rng.uniform(-2, 2, 3)
            v = rng.uniform(-2, 2, 3)
            shifted = AffineSubspace(v0, dirs)
            moved = AffineSubspace(v0 - v, dirs)
            trans = max(trans, np.abs(project_point(x, moved, spec, p, cfg)
                                      - (project_point(x + v, shifted, spec, p, cfg) - v)).max())
            xhat = project_point(x, shifted, spec, p, cfg)
            lam_pos = rng.uniform(0, 3)
            target = xhat + lam_pos * (x - xhat) + k
            affine = max(affine, np.abs(project_point(target, shifted, spec, p, cfg)
                                        - (xhat + k)).max())
            idem = max(idem, np.abs(project_point(px, L, spec, p, cfg) - px).max())
        return [Check('homogeneity', homog, 0.0, 1e-8),
                Check('translation', trans, 0.0, 1e-8),
                Check('affine_homogeneity', affine, 0.0, 1e-8),
                Check('idempotence', idem, 0.0, 1e-9)]


@register_scenario('measure_projection_minimality')
class MeasureProjectionMinimality(Scenario):
    anchor = 'projection of a measure is the closest measure on the subspace'

    def checks(self, params):
        spec = LqNorm(float(params.get('q', 3.0)))
        p = float(params.get('p', 2.0))
        rng = np.random.default_rng(self.seed)
        L = AffineSubspace([0.0, 0.5], [[1.0, 0.4]])
        margin = np.inf
        monotone = True
        for _ in range(int(params.get('measures', 5))):
            mu = random_measure(rng, 2, 3)
            proj = project_measure(mu, L, spec, p, self.projection_cfg)
            d_proj = self.d(mu, proj, spec, p)
            for _ in range(int(params.get('competitors', 20))):
                rival = random_measure_on(L, rng, int(rng.integers(1, 4)))
                margin = min(margin, self.d(mu, rival, spec, p) - d_proj)
            pairs = [(x, project_point(x, L, spec, p, self.projection_cfg)) for x in mu.points]
            monotone &= cyclical_monotonicity_check(pairs, spec, p, max_cycle=3).monotone
        return [Check('min_competitor_margin', margin, 0.0, relation='gt'),
                Check('projection_graph_monotone', float(monotone), 1.0)]


def _coordinate_pair(dim: int = 2):
    eye = np.eye(dim)
    return AffineSubspace.span(eye[0]), AffineSubspace(np.zeros(dim), eye[1:])


@register_scenario('fingerprint_injectivity_on_F')
class FingerprintInjectivity(Scenario):
    anchor = 'fingerprint (P_L#, P_H#) is injective on the family F'

    def checks(self, params):
        spec = LqNorm(3)
        p = 2.0
        L, H = _coordinate_pair()
        rng = np.random.default_rng(self.seed)
        cfg = self.projection_cfg
        members: List[DiscreteMeasure] = []
        while len(members) < int(params.get('measures', 30)):
            mu = random_measure(rng, 2, int(rng.integers(1, 4)))
            if family_F_check(mu, L, H, spec, p, cfg).ok:
                members.append(mu)
        prints = [fingerprint(mu, L, H, spec, p, cfg) for mu in members]
        collisions = 0
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if fingerprints_close(prints[i], prints[j]) and not measures_close(members[i], members[j]):
                    collisions += 1
        equal_weights = DiscreteMeasure([[0.0, 0.0], [1.0, 2.0]], [0.5, 0.5])
        return [Check('collisions', collisions, 0, 0),
                Check('equal_weights_in_F', float(family_F_check(equal_weights, L, H, spec, p, cfg).ok),
                      0.0)]


@register_scenario('perturbation_distance_identity')
class PerturbationDistanceIdentity(Scenario):
    anchor = 'perturbed measures mu\', nu1\', nu2\' at distance a0^(1/p) h0'

    def checks(self, params):
        spec = LqNorm(float(params.get('q', 3.0)))
        rng = np.random.default_rng(self.seed)
        L, H = _coordinate_pair()
        cfg = self.projection_cfg
        worst = 0.0
        mismatched = 0
        built = 0
        exponents = params.get('exponents', [1.5, 3.0])
        per_exponent = int(params.get('measures', 10))
        for p in exponents:
            done = 0
            while done < per_exponent:
                mu = random_measure(rng, 2, 3)
                if not family_F_check(mu, L, H, spec, p, cfg).ok:
                    continue
                _, h = perturbation_grid(mu, H, spec, p, cfg)
                triple = perturbation_triple(mu, L, H, spec, p, 0.25 * h, cfg=cfg)
                target = triple.a0 ** (1 / p) * triple.h0
                nu = triple.nu
                for a, b in ((mu, triple.mu_prime), (nu, triple.nu1_prime), (nu, triple.nu2_prime)):
                    worst = max(worst, abs(self.d(a, b, spec, p) - target))
                ref = fingerprint(triple.mu_prime, L, H, spec, p, cfg)
                for other in (triple.nu1_prime, triple.nu2_prime):
                    if not fingerprints_close(ref, fingerprint(other, L, H, spec, p, cfg)):
                        mismatched += 1
                done += 1
                built += 1
        return [Check('max_distance_error', worst, 0.0, 1e-8),
                Check('fingerprint_mismatches', mismatched, 0, 0),
                Check('triples_built', built, per_exponent * len(exponents), 0)]


@register_scenario('atom_recovery_p15')
class AtomRecovery(Scenario):
    anchor = 'second differences of the potential recover atom weights for p < 2'

    def checks(self, params):
        spec = LqNorm(3)
        p = 1.5
        mu = DiscreteMeasure([[0.0, 0.0], [1.0, 1.0]], [0.3, 0.7])
        u = np.array([1.0, 1.0]) / math.sqrt(2)
        cfg = self.potentials_cfg
        kwargs = dict(h0=float(cfg.get('h0', 1.0)), shrink=float(cfg.get('shrink', 0.5)),
                      steps=int(params.get('steps', cfg.get('steps', 21))),
                      window_tol=float(cfg.get('window_tol', 5e-4)))
        at_a = atom_estimate(mu, spec, p, [0.0, 0.0], u, **kwargs)
        at_b = atom_estimate(mu, spec, p, [1.0, 1.0], u, **kwargs)
        mid = atom_estimate(mu, spec, p, [0.5, 0.5], u, **kwargs)
        return [Check('estimate_at_a', at_a.estimate, 0.3, 1e-3),
                Check('estimate_at_b', at_b.estimate, 0.7, 1e-3),
                Check('estimate_at_midpoint', mid.estimate, 0.0, 1e-3),
                Check('all_converged', float(at_a.converged and at_b.converged and mid.converged), 1.0),
                Check('total_mass', at_a.estimate + at_b.estimate, 1.0, 5e-3)]


@register_scenario('direction_search_lq')
class DirectionSearchLq(Scenario):
    anchor = 'non-constant Hessian pairing with minimum 0; l_q coordinate pairs'

    def checks(self, params):
        spec = LqNorm(4)
        dim = 3
        found = direction_search(spec, 2.0, dim, seed=self.seed, cfg=self.potentials_cfg)
        checks = [Check('lq4_found', float(found is not None), 1.0)]
        if found is not None:
            axis = int(np.argmax(np.abs(found.v1)))
            alignment = min(abs(found.v1[axis]), abs(found.v2[axis]))
            pairing = HessianPairing(found.v1, found.v2, spec, 2.0)
            rng = np.random.default_rng(self.seed)
            probes = rng.uniform(-2, 2, (20, dim))
            probes[:, axis] = 0.0
            kernel = max(abs(pairing_T(pairing, x)) for x in probes)
            checks += [Check('coordinate_alignment', alignment, 1.0, 1e-6),
                       Check('kernel_probe_max', kernel, 0.0, 1e-10)]
        euclid2 = direction_search(EuclideanNorm(), 2.0, 2, seed=self.seed, cfg=self.potentials_cfg)
        euclid4 = direction_search(EuclideanNorm(), 4.0, 2, seed=self.seed, cfg=self.potentials_cfg)
        return checks + [Check('euclidean_p2_found', float(euclid2 is not None), 0.0),
                         Check('euclidean_p4_found', float(euclid4 is not None), 1.0)]


def _lq_hessian_diagonal(q: float, x: np.ndarray) -> np.ndarray:
    n = np.sum(np.abs(x) ** q) ** (1 / q)
    a = np.abs(x)
    return 2 * (2 - q) * n ** (2 - 2 * q) * a ** (2 * q - 2) + 2 * (q - 1) * n ** (2 - q) * a ** (q - 2)


@register_scenario('lq_hessian_formula')
class LqHessianFormula(Scenario):
    anchor = 'second derivatives of N_q^2'

    def checks(self, params):
        rng = np.random.default_rng(self.seed)
        worst_fd = worst_diag = 0.0
        for q in params.get('q_values', [2.5, 3.0, 4.0]):
            spec = LqNorm(q)
            fd_spec = CustomNorm(value_fn=lambda x, s=spec: float(s.value(x)),
                                 gradient_fn=lambda x, e, s=spec: s.power_gradient(x, e),
                                 strictly_convex=True, smoothness_order=2)
            for _ in range(int(params.get('points', 50))):
                x = rng.uniform(0.1, 2.0, 3) * rng.choice([-1.0, 1.0], 3)
                exact = spec.power_hessian(x, 2.0)
                approx = fd_spec.power_hessian(x, 2.0)
                worst_fd = max(worst_fd, np.abs(exact - approx).max() / np.abs(exact).max())
                diag = _lq_hessian_diagonal(q, x)
                worst_diag = max(worst_diag, np.abs(np.diag(exact) - diag).max() / np.abs(diag).max())
        e1 = LqNorm(4).power_hessian(np.array([1.0, 0.0]), 2.0)
        return [Check('max_rel_fd_error', worst_fd, 0.0, 1e-5),
                Check('max_rel_formula_error', worst_diag, 0.0, 1e-12),
                Check('l4_e1_d11', e1[0, 0], 2.0, 1e-12),
                Check('l4_e1_d22', e1[1, 1], 0.0, 1e-12)]


def _phi_t_closed_form(t: float, q: float) -> float:
    lo = math.exp(-t) / (math.exp(t) + math.exp(-t))
    hi = math.exp(t) / (math.exp(t) + math.exp(-t))
    return lo * (math.exp(t * q) + 1) ** (2 / q) + hi * (math.exp(-t * q) + 1) ** (2 / q)


@register_scenario('phi_t_noniso_q3')
class PhiTNonIsometry(Scenario):
    anchor = 'phi_t shifts the two-point parameter; not an isometry of W_2 over l_3'

    def checks(self, params):
        q = float(params.get('q', 3.0))
        t = float(params.get('t', math.log(2)))
        spec = LqNorm(q)
        e1, e2 = np.eye(2)
        mu0 = kloeckner_two_point(TwoPointParams(e1, np.zeros(2), 0.0, 1.0, 0.0))
        nu = dirac(e2)
        cand = IsometryCandidate.phi_t(t, e1)
        cert = isometry_certificate(cand, [(mu0, nu)], spec, 2.0, cfg=self.transport_cfg)
        before = self.d(mu0, nu, spec, 2.0) ** 2
        after = self.d(apply_candidate(cand, mu0), nu, spec, 2.0) ** 2

        rng = np.random.default_rng(self.seed)
        probes = []
        for _ in range(int(params.get('euclidean_probes', 10))):
            params_ = TwoPointParams(e1, np.zeros(2), rng.uniform(-1, 1), rng.uniform(0.2, 2),
                                     rng.uniform(-1, 1))
            probes.append((kloeckner_two_point(params_), dirac(rng.uniform(-2, 2, 2))))
            probes.append((dirac(rng.uniform(-2, 2) * e1), dirac(rng.uniform(-2, 2, 2))))
        euclid = isometry_certificate(cand, probes, EuclideanNorm(), 2.0, 1e-9, self.transport_cfg)
        return [Check('d2_mu0_nu', before, 2 ** (2 / q), 1e-8),
                Check('d2_phi_mu0_nu', after, _phi_t_closed_form(t, q), 1e-8),
                Check('violation', cert.max_violation, 0.01, relation='gt'),
                Check('lq_preserved', float(cert.preserved), 0.0),
                Check('euclidean_violation', euclid.max_violation, 0.0, 1e-9)]


@register_scenario('phi_star_noniso_q3')
class PhiStarNonIsometry(Scenario):
    anchor = 'phi_star flips the two-point parameter; not an isometry of W_2 over l_3'

    def checks(self, params):
        q = float(params.get('q', 3.0))
        spec = LqNorm(q)
        e1 = np.array([1.0, 0.0])
        mu1 = DiscreteMeasure([-e1, 2 * e1], [2 / 3, 1 / 3])
        nu = dirac([1.0, 1.0])
        cand = IsometryCandidate.phi_star(e1)
        image = apply_candidate(cand, mu1)
        expected_image = DiscreteMeasure([-2 * e1, e1], [1 / 3, 2 / 3])
        before = self.d(mu1, nu, spec, 2.0) ** 2
        after = self.d(image, nu, spec, 2.0) ** 2
        closed_before = (2 * (2 ** q + 1) ** (2 / q) + 2 ** (2 / q)) / 3
        closed_after = (2 + (3 ** q + 1) ** (2 / q)) / 3
        cert = isometry_certificate(cand, [(mu1, nu)], spec, 2.0, cfg=self.transport_cfg)
        return [Check('image_matches', float(measures_close(image, expected_image)), 1.0),
                Check('d2_mu1_nu', before, closed_before, 1e-8),
                Check('d2_phi_mu1_nu', after, closed_after, 1e-8),
                Check('d2_gap', after - before, 0.05, relation='gt'),
                Check('preserved', float(cert.preserved), 0.0)]


@register_scenario('convexity_gap_sign')
class ConvexityGapSign(Scenario):
    anchor = 'sign of the convexity gap of s -> s^(q/2)'

    def checks(self, params):
        checks = []
        for A in params.get('A_values', [1.5, 2.0, 4.0]):
            checks.append(Check(f'q3_A{A:g}', convexity_gap(3.0, A), 0.0, relation='lt'))
            checks.append(Check(f'q1.5_A{A:g}', convexity_gap(1.5, A), 0.0, relation='gt'))
        for q in (1.5, 3.0, 4.0):
            checks.append(Check(f'q{q:g}_A1', convexity_gap(q, 1.0), 0.0, 1e-14))
        return checks


@register_scenario('euclidean_rotation_isometry_p2')
class EuclideanRotationIsometry(Scenario):
    anchor = 'barycentric rotation: isometry of Euclidean W_2, not of l_4 W_2'

    def checks(self, params):
        rng = np.random.default_rng(self.seed)
        cand = IsometryCandidate.rotation(float(params.get('angle', math.pi / 4)))
        pairs = [(random_measure(rng, 2, int(rng.integers(1, 4))),
                  random_measure(rng, 2, int(rng.integers(1, 4))))
                 for _ in range(int(params.get('pairs', 50)))]
        euclid = isometry_certificate(cand, pairs, EuclideanNorm(), 2.0, 1e-8, self.transport_cfg)
        spread = DiscreteMeasure([[-1.0, 0.0], [1.0, 0.0]], [0.5, 0.5])
        lq_pairs = [(spread, dirac([0.0, 0.0]))] + pairs
        lq = isometry_certificate(cand, lq_pairs, LqNorm(4), 2.0, 1e-8, self.transport_cfg)
        tilted = DiscreteMeasure([[0.0, 0.0], [1.0, 1.0]], [0.5, 0.5])
        x_axis = AffineSubspace.span([1.0, 0.0])
        commutes = commutation_check(cand, tilted, x_axis, EuclideanNorm(), 2.0,
                                     cfg=self.projection_cfg)
        return [Check('euclidean_violation', euclid.max_violation, 0.0, 1e-8),
                Check('lq4_violation', lq.max_violation, 1e-3, relation='gt'),
                Check('rotation_commutes_with_projection', float(commutes), 0.0)]


class ScenarioRunner:
    """Runs scenarios in order, or one process per scenario when workers > 1."""

    def __init__(self, cfg: Optional[Dict] = None, progress: bool = True):
        self.cfg = cfg or {}
        self.progress = progress
        section = self.cfg.get('scenarios', {})
        self.workers = int(section.get('workers', 1))
        self.params = section.get('params') or {}
        self.scenario_cfg = {
            'seed': int(section.get('seed', 0)),
            'transport': self.cfg.get('transport'),
            'projection': self.cfg.get('projection'),
            'potentials': self.cfg.get('potentials'),
        }

    def resolve(self, ids) -> List[str]:
        if ids in (None, 'all', ['all']):
            return SCENARIO_REGISTRY.names()
        if isinstance(ids, str):
            ids = [ids]
        unknown = [sid for sid in ids if sid not in SCENARIO_REGISTRY]
        if unknown:
            raise ConfigurationError(f'unknown scenario ids: {", ".join(unknown)}')
        return sorted(set(ids))

    def call_scenario(self, sid: str, return_dict=None) -> ScenarioResult:
        scenario = init_scenario(sid, self.scenario_cfg)
        result = scenario.call(self.params.get(sid, {}))
        logger.info('scenario %s: %s', sid, result.status)
        if return_dict is not None:
            return_dict[sid] = result
        return result

    def call(self, ids=None) -> List[ScenarioResult]:
        ids = self.resolve(ids)
        if self.workers <= 1 or len(ids) == 1:
            return [self.call_scenario(sid) for sid in tqdm(ids, disable=not self.progress)]

        ctx = mp.get_context('spawn')
        manager = ctx.Manager()
        return_dict = manager.dict()
        with tqdm(total=len(ids), disable=not self.progress) as bar:
            for start in range(0, len(ids), self.workers):
                processes = []
                for sid in ids[start:start + self.workers]:
                    proc = ctx.Process(target=self.call_scenario, args=(sid, return_dict))
                    processes.append(proc)
                    proc.start()
                for proc in processes:
                    proc.join()
                    bar.update(1)
        results = []
        for sid in ids:
            if sid in return_dict:
                results.append(return_dict[sid])
            else:
                results.append(ScenarioResult(sid, 'fail', SCENARIO_REGISTRY[sid].anchor,
                                              self.scenario_cfg['seed'],
                                              message='worker process died'))
        manager.shutdown()
        return results


def run_scenarios(ids=None, cfg: Optional[Dict] = None, progress: bool = True) -> List[ScenarioResult]:
    return ScenarioRunner(cfg, progress).call(ids)


def summary_rows(results: Sequence[ScenarioResult]) -> List[List]:
    return [[r.scenario_id, r.status, len(r.checks), sum(c.passed for c in r.checks)] for r in results]
