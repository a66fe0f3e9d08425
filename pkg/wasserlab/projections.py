"""Norm projections onto affine subspaces and the constructions built on them."""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import DomainError, InputError, SolverError, VerificationError
from .measures import MATCH_TOL, DiscreteMeasure, measures_close, merge_atoms, shift_weight
from .norms import NormSpec, as_vector, sphere_sample
from .transport import wasserstein

logger = logging.getLogger(__name__)

INDEPENDENCE_TOL = 1e-10
KERNEL_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """base + span(directions); `full` allows the whole space."""

    base: np.ndarray
    directions: np.ndarray
    full: bool = False

    def __post_init__(self):
        base = as_vector(self.base)
        dirs = np.array(self.directions, dtype=float)
        if dirs.size == 0:
            dirs = np.zeros((0, base.size))
        if dirs.ndim != 2 or dirs.shape[1] != base.size:
            raise InputError(f'directions must have shape (r, {base.size}), got {dirs.shape}')
        if len(dirs):
            unit = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
            if np.linalg.svd(unit, compute_uv=False).min() <= INDEPENDENCE_TOL:
                raise DomainError('subspace directions are linearly dependent')
        if len(dirs) >= base.size and not self.full:
            raise DomainError('subspace is the whole space; pass full=True to allow it')
        dirs.flags.writeable = False
        object.__setattr__(self, 'base', base)
        object.__setattr__(self, 'directions', dirs)

    @property
    def dimension(self) -> int:
        return self.base.size

    @property
    def rank(self) -> int:
        return self.directions.shape[0]

    @property
    def through_origin(self) -> bool:
        return bool(np.all(self.base == 0)) or self.contains(np.zeros(self.dimension), 0.0)

    def point(self, coeffs) -> np.ndarray:
        return self.base + np.asarray(coeffs, dtype=float) @ self.directions

    def distance(self, x) -> float:
        """Euclidean distance from x to the subspace."""
        r = np.asarray(x, dtype=float) - self.base
        if self.rank == 0:
            return float(np.linalg.norm(r))
        t, *_ = np.linalg.lstsq(self.directions.T, r, rcond=None)
        return float(np.linalg.norm(r - t @ self.directions))

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.distance(x) <= tol

    def to_json(self) -> Dict:
        return {'base': self.base.tolist(), 'directions': self.directions.tolist()}

    @classmethod
    def from_json(cls, obj: Dict) -> 'AffineSubspace':
        try:
            base = obj['base']
            directions = obj.get('directions', [])
        except (KeyError, AttributeError, TypeError) as e:
            raise InputError(f'malformed subspace description: {obj!r}') from e
        return cls(base, directions, full=bool(obj.get('full', False)))

    @classmethod
    def span(cls, *directions, base=None) -> 'AffineSubspace':
        dirs = np.array([as_vector(d) for d in directions])
        origin = np.zeros(dirs.shape[1]) if base is None else base
        return cls(origin, dirs)


@dataclass(frozen=True, eq=False)
class Fingerprint:
    proj_L: DiscreteMeasure
    proj_H: DiscreteMeasure


@dataclass(frozen=True)
class FamilyCheck:
    ok: bool
    reason: str


@dataclass(frozen=True, eq=False)
class PerturbationTriple:
    mu_prime: DiscreteMeasure
    nu1_prime: DiscreteMeasure
    nu2_prime: DiscreteMeasure
    nu: DiscreteMeasure
    grid: np.ndarray
    x0: np.ndarray
    a0: float
    h0: float
    h: float


def _require_strict(spec: NormSpec):
    if not spec.strictly_convex:
        raise DomainError(f'{spec.kind} norm is not strictly convex; its projections are set valued')


class NormProjector:
    """Minimiser of t -> N(x - base - t @ directions).

    Damped Newton on N^s with s = max(p, 2) when the norm has an analytic
    Hessian, golden-section coordinate descent otherwise.

    cfg keys: grad_tol, max_iter, armijo, levenberg, golden_sweeps.
    """

    def __init__(self, spec: NormSpec, p: float, cfg: Optional[Dict] = None):
        _require_strict(spec)
        if p < 1:
            raise DomainError(f'p must be >= 1, got {p}')
        cfg = cfg or {}
        self.spec = spec
        self.s = max(float(p), 2.0)
        self.grad_tol = float(cfg.get('grad_tol', 1e-11))
        self.max_iter = int(cfg.get('max_iter', 200))
        self.armijo = float(cfg.get('armijo', 1e-4))
        self.levenberg = float(cfg.get('levenberg', 1e-14))
        self.golden_sweeps = int(cfg.get('golden_sweeps', 200))

    def _objective(self, r, basis, t):
        return float(self.spec.power(r - t @ basis, self.s))

    def _newton(self, r, basis, t, scale):
        tol = self.grad_tol * scale
        f = self._objective(r, basis, t)
        for it in range(self.max_iter):
            y = r - t @ basis
            if not np.any(y):
                return t
            grad = -basis @ self.spec.power_gradient(y, self.s)
            if np.linalg.norm(grad) <= tol:
                logger.debug('projection converged',
                             extra={'iterations': it, 'grad_norm': float(np.linalg.norm(grad))})
                return t
            hess = basis @ self.spec.power_hessian(y, self.s) @ basis.T
            lam = self.levenberg * max(1.0, float(np.trace(hess)))
            while True:
                try:
                    chol = np.linalg.cholesky(hess + lam * np.eye(len(t)))
                    break
                except np.linalg.LinAlgError:
                    lam = max(10 * lam, 1e-12)
            step = -np.linalg.solve(chol.T, np.linalg.solve(chol, grad))
            slope = float(grad @ step)
            alpha = 1.0
            for _ in range(60):
                f_new = self._objective(r, basis, t + alpha * step)
                if f_new <= f + self.armijo * alpha * slope:
                    break
                alpha *= 0.5
            else:
                logger.debug('line search stalled at |grad| = %.3g', np.linalg.norm(grad))
                return t
            t = t + alpha * step
            f = f_new
        raise SolverError(f'projection Newton did not converge in {self.max_iter} iterations')

    def _golden(self, r, basis, t, scale):
        tol = self.grad_tol * scale
        for _ in range(self.golden_sweeps):
            before = t.copy()
            for i in range(len(t)):
                def line(s, i=i):
                    trial = t.copy()
                    trial[i] = s
                    return float(self.spec.value(r - trial @ basis))
                res = minimize_scalar(line, bracket=(t[i] - 1.0, t[i] + 1.0), method='golden',
                                      tol=1e-12)
                t[i] = res.x
            if np.linalg.norm(t - before) <= tol:
                return t
        logger.warning('golden-section projection stopped after %d sweeps', self.golden_sweeps)
        return t

    def call(self, x, sub: AffineSubspace) -> np.ndarray:
        x = as_vector(x)
        if x.size != sub.dimension:
            raise InputError(f'point of dimension {x.size} vs subspace in R^{sub.dimension}')
        if sub.rank == 0:
            return sub.base.copy()
        basis = sub.directions
        r = x - sub.base
        t, *_ = np.linalg.lstsq(basis.T, r, rcond=None)
        scale = 1.0 + float(np.linalg.norm(x))
        if self.spec.has_analytic_hessian:
            t = self._newton(r, basis, t, scale)
        else:
            t = self._golden(r, basis, t, scale)
        return sub.point(t)


def project_point(x, sub: AffineSubspace, spec: NormSpec, p: float,
                  cfg: Optional[Dict] = None) -> np.ndarray:
    """The unique nearest point of `sub` to x in the norm N."""
    return NormProjector(spec, p, cfg).call(x, sub)


def project_measure(mu: DiscreteMeasure, sub: AffineSubspace, spec: NormSpec, p: float,
                    cfg: Optional[Dict] = None, verify: bool = True) -> DiscreteMeasure:
    """Push-forward of mu by the projection onto `sub`.

    With `verify`, the transport distance from mu to its projection must
    equal (sum w N^p(x - P x))^(1/p).
    """
    projector = NormProjector(spec, p, cfg)
    images = np.array([projector.call(x, sub) for x in mu.points])
    pts, w = merge_atoms(images, mu.weights)
    projected = DiscreteMeasure(pts, w / w.sum())
    if verify:
        direct = float(mu.weights @ spec.power(mu.points - images, p)) ** (1.0 / p)
        solved = wasserstein(mu, projected, spec, p, (cfg or {}).get('transport'))
        if abs(direct - solved) > 1e-8 * (1.0 + direct):
            raise VerificationError(f'projection distance {direct:.12g} but solver gives {solved:.12g}')
    return projected


def kernel_membership(x, sub: AffineSubspace, spec: NormSpec, p: float,
                      cfg: Optional[Dict] = None) -> bool:
    """Whether x lies in the preimage of 0 under the projection onto `sub`."""
    if not sub.through_origin:
        raise DomainError('kernel membership needs a linear subspace (base 0)')
    x = as_vector(x)
    image = project_point(x, sub, spec, p, cfg)
    return bool(np.linalg.norm(image) <= KERNEL_TOL * (1.0 + np.linalg.norm(x)))


def _probe_span(basis: np.ndarray, rng: np.random.Generator, directions: int,
                radii: Sequence[float]) -> np.ndarray:
    coeffs = rng.standard_normal((directions, len(basis)))
    coeffs /= np.linalg.norm(coeffs, axis=1, keepdims=True)
    unit = coeffs @ basis
    unit /= np.linalg.norm(unit, axis=1, keepdims=True)
    return np.concatenate([r * unit for r in radii])


def max_subspace_in_kernel(sub: AffineSubspace, spec: NormSpec, p: float,
                           seeds: Sequence, cfg: Optional[Dict] = None) -> AffineSubspace:
    """Greedy linear span inside the kernel set of `sub` (heuristic).

    Candidates are the seeds, then y - P(y) for seeded sphere samples y; a
    candidate extends the span when every point of a probe grid of the
    enlarged span is in the kernel set.
    """
    cfg = cfg or {}
    probe_dirs = int(cfg.get('probe_directions', 15))
    radii = tuple(cfg.get('probe_radii', (0.5, 2.0)))
    samples = int(cfg.get('candidate_samples', 40))
    seed = int(cfg.get('seed', 0))
    rng = np.random.default_rng(seed)
    in_kernel = [as_vector(s) for s in seeds
                 if np.any(s) and kernel_membership(s, sub, spec, p, cfg)]
    if not in_kernel:
        raise DomainError('no seed lies in the kernel set')
    n = sub.dimension
    target = n - sub.rank
    basis = [in_kernel[0] / np.linalg.norm(in_kernel[0])]
    projector = NormProjector(spec, p, cfg)
    sampled = (y - projector.call(y, sub) for y in sphere_sample(n, samples, seed=seed + 1))
    candidates = list(in_kernel[1:])
    for y in candidates + list(sampled):
        if len(basis) >= target:
            break
        b = np.array(basis)
        resid = y - (b @ y) @ b
        if np.linalg.norm(resid) <= 1e-8 * (1 + np.linalg.norm(y)):
            continue
        trial = np.vstack([b, resid / np.linalg.norm(resid)])
        probes = _probe_span(trial, rng, probe_dirs, radii)
        if all(kernel_membership(z, sub, spec, p, cfg) for z in probes):
            basis.append(trial[-1])
            logger.debug('kernel span extended to dimension %d', len(basis))
    return AffineSubspace(np.zeros(n), np.array(basis), full=len(basis) >= n)


def fingerprint(mu: DiscreteMeasure, L: AffineSubspace, H: AffineSubspace, spec: NormSpec,
                p: float, cfg: Optional[Dict] = None) -> Fingerprint:
    return Fingerprint(proj_L=project_measure(mu, L, spec, p, cfg, verify=False),
                       proj_H=project_measure(mu, H, spec, p, cfg, verify=False))


def _merged(mu: DiscreteMeasure, tol: float) -> DiscreteMeasure:
    pts, w = merge_atoms(mu.points, mu.weights, tol)
    return DiscreteMeasure(pts, w / w.sum())


def fingerprints_close(a: Fingerprint, b: Fingerprint, tol: float = MATCH_TOL) -> bool:
    """Equality of fingerprints; atoms closer than `tol` count as one."""
    return (measures_close(_merged(a.proj_L, tol), _merged(b.proj_L, tol), tol)
            and measures_close(_merged(a.proj_H, tol), _merged(b.proj_H, tol), tol))


def _min_gap(values: np.ndarray) -> float:
    if len(values) < 2:
        return np.inf
    diff = values[:, None] - values[None, :]
    dist = np.linalg.norm(diff.reshape(len(values), len(values), -1), axis=-1)
    np.fill_diagonal(dist, np.inf)
    return float(dist.min())


def family_F_check(mu: DiscreteMeasure, L: AffineSubspace, H: AffineSubspace, spec: NormSpec,
                   p: float, cfg: Optional[Dict] = None, gap: float = 1e-9) -> FamilyCheck:
    """Distinct weights, and pairwise distinct projections onto L and onto H."""
    if _min_gap(mu.weights) <= gap:
        return FamilyCheck(False, 'weights are not pairwise distinct')
    projector = NormProjector(spec, p, cfg)
    for name, sub in (('L', L), ('H', H)):
        images = np.array([projector.call(x, sub) for x in mu.points])
        if _min_gap(images) <= gap:
            return FamilyCheck(False, f'projections onto {name} are not pairwise distinct')
    return FamilyCheck(True, 'ok')


def perturbation_grid(mu: DiscreteMeasure, H: AffineSubspace, spec: NormSpec, p: float,
                      cfg: Optional[Dict] = None) -> Tuple[np.ndarray, float]:
    """Grid x[k, k'] = x_k + P_H(x_k') - P_H(x_k) and its smallest pairwise N-distance h."""
    if not H.through_origin:
        raise DomainError('H must be a linear subspace')
    projector = NormProjector(spec, p, cfg)
    proj_H = np.array([projector.call(x, H) for x in mu.points])
    grid = mu.points[:, None, :] + proj_H[None, :, :] - proj_H[:, None, :]
    flat = grid.reshape(mu.size * mu.size, -1)
    if len(flat) == 1:
        return grid, np.inf
    pair_dist = spec.value(flat[:, None, :] - flat[None, :, :])
    np.fill_diagonal(pair_dist, np.inf)
    return grid, float(pair_dist.min())


def perturbation_triple(mu: DiscreteMeasure, L: AffineSubspace, H: AffineSubspace,
                        spec: NormSpec, p: float, h0: float,
                        indices: Tuple[int, int, int] = (0, 0, 1),
                        plan_weights: Optional[np.ndarray] = None,
                        cfg: Optional[Dict] = None) -> PerturbationTriple:
    """mu', nu1', nu2' sharing one fingerprint, each at distance a0^(1/p) h0.

    Grid points x[k, k'] = x_k + P_H(x_k') - P_H(x_k) carry the weights
    b[k, k'] of nu; b must be a coupling of the weights of mu with
    themselves. mu' moves a0 from x_k0 to x0 = x_k0 + h0 n, n the N-unit
    normal x_k0 - P_L(x_k0); nu_i' moves a0 from x[k_i, k0] by the same
    vector h0 n.
    """
    check = family_F_check(mu, L, H, spec, p, cfg)
    if not check.ok:
        raise DomainError(f'measure is not in the family F: {check.reason}')
    m = mu.size
    k0, k1, k2 = indices
    if not all(0 <= k < m for k in indices) or k1 == k2:
        raise DomainError(f'bad indices {indices} for a measure with {m} atoms')
    a = mu.weights
    b = np.outer(a, a) if plan_weights is None else np.asarray(plan_weights, dtype=float)
    if b.shape != (m, m) or np.any(b < 0):
        raise DomainError(f'plan weights must be a nonnegative {m}x{m} table')
    if (np.abs(b.sum(axis=1) - a).max() > 1e-9 or np.abs(b.sum(axis=0) - a).max() > 1e-9):
        raise DomainError('plan weights must have row and column sums equal to the weights of mu')
    if b[k1, k0] <= 0 or b[k2, k0] <= 0:
        raise DomainError('the perturbed grid points carry no mass')

    projector = NormProjector(spec, p, cfg)
    xk0 = mu.points[k0]
    normal = xk0 - projector.call(xk0, L)
    n_len = float(spec.value(normal))
    if n_len <= 1e-12 * (1 + np.linalg.norm(xk0)):
        raise DomainError('x_k0 lies in L; the normal direction is undefined')
    grid, h = perturbation_grid(mu, H, spec, p, cfg)
    flat = grid.reshape(m * m, -1)
    if not 0 < h0 < h / 2:
        raise DomainError(f'h0 = {h0} must lie in (0, {h / 2})')

    shift = h0 * normal / n_len
    x0 = xk0 + shift
    a0 = 0.5 * min(b[k1, k0], b[k2, k0])
    mu_prime = shift_weight(mu, k0, x0, a0)

    keep = b.reshape(-1) > 0
    nu = DiscreteMeasure(flat[keep], b.reshape(-1)[keep])
    position = np.cumsum(keep) - 1

    def perturbed(k):
        idx = int(position[k * m + k0])
        return shift_weight(nu, idx, grid[k, k0] + shift, a0)

    return PerturbationTriple(mu_prime=mu_prime, nu1_prime=perturbed(k1), nu2_prime=perturbed(k2),
                              nu=nu, grid=grid, x0=x0, a0=float(a0), h0=float(h0), h=h)


def random_measure_on(sub: AffineSubspace, rng: np.random.Generator, n_atoms: int,
                      scale: float = 2.0) -> DiscreteMeasure:
    """Random measure supported on `sub`."""
    coeffs = rng.uniform(-scale, scale, size=(n_atoms, sub.rank))
    pts = sub.base + coeffs @ sub.directions if sub.rank else sub.base[None, :]
    pts, w = merge_atoms(np.atleast_2d(pts), rng.uniform(0.2, 1.0, size=len(np.atleast_2d(pts))))
    return DiscreteMeasure(pts, w / w.sum())

