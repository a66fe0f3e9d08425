"""W_p-alignment, candidate isometries of W_p and certificates against them."""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DomainError, VerificationError
from .measures import (DiscreteMeasure, TwoPointParams, affine_image, barycenter, dilate,
                       dirac, kloeckner_two_point, measures_close, pushforward, two_point_params)
from .norms import NormSpec, as_vector
from .projections import AffineSubspace, project_measure
from .transport import wasserstein

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlignmentReport:
    d_mu_nu: float
    d_nu_eta: float
    d_mu_eta: float
    defect: float
    aligned: bool


@dataclass(frozen=True, eq=False)
class IsometryCandidate:
    """A map on measures: push-forward, phi_t, phi_star or barycentric rotation.

    phi_t and phi_star act on two-atom measures on the line origin + R*axis
    and fix every Dirac mass.
    """

    kind: str
    t: float = 0.0
    axis: Optional[np.ndarray] = None
    origin: Optional[np.ndarray] = None
    angle: float = 0.0
    fn: Optional[Callable] = None
    label: str = ''

    @classmethod
    def pushforward(cls, fn: Callable, label: str = 'map') -> 'IsometryCandidate':
        return cls('pushforward', fn=fn, label=label)

    @classmethod
    def phi_t(cls, t: float, axis, origin=None) -> 'IsometryCandidate':
        return cls('phi_t', t=float(t), axis=as_vector(axis),
                   origin=None if origin is None else as_vector(origin))

    @classmethod
    def phi_star(cls, axis, origin=None) -> 'IsometryCandidate':
        return cls('phi_star', axis=as_vector(axis),
                   origin=None if origin is None else as_vector(origin))

    @classmethod
    def rotation(cls, angle: float) -> 'IsometryCandidate':
        return cls('rotation', angle=float(angle))

    def to_json(self) -> Dict:
        out = {'kind': self.kind}
        if self.kind == 'phi_t':
            out['t'] = self.t
        if self.kind in ('phi_t', 'phi_star'):
            out['axis'] = self.axis.tolist()
        if self.kind == 'rotation':
            out['angle'] = self.angle
        if self.kind == 'pushforward':
            out['label'] = self.label
        return out


@dataclass(frozen=True)
class Certificate:
    candidate: Dict
    preserved: bool
    max_violation: float
    witness: Optional[int]
    lhs: float
    rhs: float
    probes: int
    note: str = 'checked on a finite probe set only'


@dataclass(frozen=True, eq=False)
class MidpointWitness:
    nu: DiscreteMeasure
    midpoint: np.ndarray
    min_defect: float
    etas_tried: int
    reports: List[AlignmentReport] = field(default_factory=list)


def alignment_check(mu: DiscreteMeasure, nu: DiscreteMeasure, eta: DiscreteMeasure,
                    spec: NormSpec, p: float, tol: float = 1e-8,
                    cfg: Optional[Dict] = None) -> AlignmentReport:
    """Triangle defect d(mu, nu) + d(nu, eta) - d(mu, eta) of three distinct measures."""
    for a, b, names in ((mu, nu, 'mu, nu'), (nu, eta, 'nu, eta'), (mu, eta, 'mu, eta')):
        if measures_close(a, b):
            raise DomainError(f'aligned triples need distinct measures ({names} coincide)')
    d_mu_nu = wasserstein(mu, nu, spec, p, cfg)
    d_nu_eta = wasserstein(nu, eta, spec, p, cfg)
    d_mu_eta = wasserstein(mu, eta, spec, p, cfg)
    defect = d_mu_nu + d_nu_eta - d_mu_eta
    if defect < -1e-9:
        logger.warning('negative alignment defect %.3g', defect)
    return AlignmentReport(d_mu_nu, d_nu_eta, d_mu_eta, defect, abs(defect) <= tol)


def dirac_align_construct(x, nu: DiscreteMeasure, spec: Optional[NormSpec] = None,
                          p: Optional[float] = None, tol: float = 1e-8) -> DiscreteMeasure:
    """(D_x)_# nu with D_x(y) = x + 2(y - x).

    With `spec` and `p` the triple (delta_x, nu, eta) is checked to be aligned.
    """
    x = as_vector(x)
    if nu.is_dirac() and np.array_equal(nu.points[0], x):
        raise DomainError('nu must differ from delta_x')
    eta = dilate(nu, x, 2.0)
    if spec is not None and p is not None:
        report = alignment_check(dirac(x), nu, eta, spec, p, tol)
        if not report.aligned:
            raise VerificationError(f'dilation triple is not aligned, defect {report.defect:.3g}')
    return eta


def l1_escape_construct(mu: DiscreteMeasure, y) -> DiscreteMeasure:
    """delta_z with z = y + d_1(mu, delta_y) e_2 for the l1 norm and p = 1.

    Needs every atom of mu at or below y in the second coordinate; then
    (mu, delta_y, delta_z) is W_1-aligned even when mu is not a Dirac mass.
    """
    y = as_vector(y)
    if mu.dimension < 2 or y.size != mu.dimension:
        raise DomainError('the l1 construction needs dimension >= 2')
    if np.any(mu.points[:, 1] > y[1]):
        raise DomainError('all atoms must lie at or below y in the second coordinate')
    t0 = float(mu.weights @ np.abs(mu.points - y).sum(axis=1))
    if t0 == 0:
        raise DomainError('mu coincides with delta_y')
    e2 = np.zeros(y.size)
    e2[1] = 1.0
    return dirac(y + t0 * e2)


def segment_test(x, y, z, spec: NormSpec, tol: float = 1e-10) -> bool:
    """N(x-y) + N(y-z) = N(x-z), i.e. y on the segment [x, z] for strictly convex N."""
    if not spec.strictly_convex:
        raise DomainError(f'{spec.kind} norm is not strictly convex')
    x, y, z = as_vector(x), as_vector(y), as_vector(z)
    lhs = float(spec.value(x - y) + spec.value(y - z))
    rhs = float(spec.value(x - z))
    return abs(lhs - rhs) <= tol * (1 + rhs)


def midpoint_witness(mu: DiscreteMeasure, spec: NormSpec,
                     radii: Sequence[float] = (0.5, 1.0, 2.0), tol: float = 1e-8) -> MidpointWitness:
    """nu = delta at the midpoint of two atoms of a non-Dirac mu, with probe etas.

    For p = 1 and strictly convex N no eta aligns (mu, nu, eta); the probes
    are the Diracs on the two half-lines beyond the midpoint and the
    reflection of mu through it; none of them may align.
    """
    if mu.is_dirac():
        raise DomainError('midpoint witness needs a measure with two atoms')
    if not spec.strictly_convex:
        raise DomainError(f'{spec.kind} norm is not strictly convex')
    x1, x2 = mu.points[0], mu.points[1]
    y = 0.5 * (x1 + x2)
    nu = dirac(y)
    etas = [dirac(y + r * (y - x)) for x in (x1, x2) for r in radii]
    etas.append(affine_image(mu, -np.eye(mu.dimension), 2 * y))
    reports = []
    for eta in etas:
        if measures_close(eta, mu) or measures_close(eta, nu):
            continue
        reports.append(alignment_check(mu, nu, eta, spec, 1.0, tol))
    min_defect = min(r.defect for r in reports)
    return MidpointWitness(nu=nu, midpoint=y, min_defect=float(min_defect),
                           etas_tried=len(reports), reports=reports)


def _two_point_map(cand: IsometryCandidate, mu: DiscreteMeasure,
                   new_param: Callable[[float], float]) -> DiscreteMeasure:
    if mu.is_dirac():
        return mu
    if mu.size != 2:
        raise DomainError(f'{cand.kind} acts on Diracs and two-atom measures, got {mu.size} atoms')
    params = two_point_params(mu, cand.axis, cand.origin)
    moved = TwoPointParams(axis=params.axis, origin=params.origin, x=params.x,
                           sigma=params.sigma, p_param=new_param(params.p_param))
    return kloeckner_two_point(moved)


def apply_candidate(cand: IsometryCandidate, mu: DiscreteMeasure) -> DiscreteMeasure:
    if cand.kind == 'pushforward':
        return pushforward(mu, cand.fn)
    if cand.kind == 'phi_t':
        return _two_point_map(cand, mu, lambda s: s + cand.t)
    if cand.kind == 'phi_star':
        return _two_point_map(cand, mu, lambda s: -s)
    if cand.kind == 'rotation':
        if mu.dimension != 2:
            raise DomainError('barycentric rotation is planar')
        c, s = math.cos(cand.angle), math.sin(cand.angle)
        rot = np.array([[c, -s], [s, c]])
        center = barycenter(mu)
        return affine_image(mu, rot, center - rot @ center)
    raise DomainError(f'unknown candidate kind {cand.kind!r}')


def isometry_certificate(cand: IsometryCandidate,
                         probes: Sequence[Tuple[DiscreteMeasure, DiscreteMeasure]],
                         spec: NormSpec, p: float, tol: float = 1e-8,
                         cfg: Optional[Dict] = None) -> Certificate:
    """Largest |d(F mu, F nu) - d(mu, nu)| over the probe pairs."""
    worst = (-1.0, None, math.nan, math.nan)
    for i, (mu, nu) in enumerate(probes):
        rhs = wasserstein(mu, nu, spec, p, cfg)
        lhs = wasserstein(apply_candidate(cand, mu), apply_candidate(cand, nu), spec, p, cfg)
        violation = abs(lhs - rhs)
        if violation > worst[0]:
            worst = (violation, i, lhs, rhs)
    violation, idx, lhs, rhs = worst
    violation = max(violation, 0.0)
    return Certificate(candidate=cand.to_json(), preserved=violation <= tol,
                       max_violation=float(violation), witness=idx, lhs=float(lhs),
                       rhs=float(rhs), probes=len(probes))


def convexity_gap(q: float, A: float) -> float:
    """(A^(2/q) + A^(-2/q)) / 2 - ((A + 1/A) / 2)^(2/q)."""
    if q <= 0 or A <= 0:
        raise DomainError(f'need q > 0 and A > 0, got q={q}, A={A}')
    e = 2.0 / q
    return 0.5 * A ** e + 0.5 * A ** -e - (0.5 * A + 0.5 / A) ** e


def commutation_check(cand: IsometryCandidate, mu: DiscreteMeasure, sub: AffineSubspace,
                      spec: NormSpec, p: float, tol: float = 1e-8,
                      cfg: Optional[Dict] = None) -> bool:
    """Whether projecting onto `sub` commutes with the candidate on mu."""
    after = project_measure(apply_candidate(cand, mu), sub, spec, p, cfg, verify=False)
    before = apply_candidate(cand, project_measure(mu, sub, spec, p, cfg, verify=False))
    return measures_close(after, before, tol)
