"""Potentials x -> d^p(mu, delta_x), atom recovery and Hessian pairings."""
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize

from .exceptions import DomainError
from .measures import DiscreteMeasure
from .norms import NormSpec, as_vector, sphere_sample
from .projections import AffineSubspace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AtomEstimate:
    location: np.ndarray
    estimate: float
    h_sequence: List[Tuple[float, float]]
    converged: bool


@dataclass(frozen=True)
class HessianPairing:
    """x -> v2^T Hess(N^p)(x) v1."""

    v1: np.ndarray
    v2: np.ndarray
    spec: NormSpec
    p: float

    def __post_init__(self):
        for name in ('v1', 'v2'):
            v = as_vector(getattr(self, name))
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise DomainError(f'{name} must be a unit vector, |{name}| = {np.linalg.norm(v)}')
            object.__setattr__(self, name, v)
        if self.v1.size != self.v2.size:
            raise DomainError('v1 and v2 have different dimensions')
        if self.p < 2:
            raise DomainError(f'Hessian pairing needs p >= 2, got {self.p}')

    def values(self, xs: np.ndarray) -> np.ndarray:
        """Pairing at each row of xs (no row may be 0)."""
        hess = self.spec.power_hessian(np.atleast_2d(xs), self.p)
        return np.einsum('i,sij,j->s', self.v2, hess, self.v1)


@dataclass(frozen=True)
class IntegratedT:
    value: float
    excluded: bool


@dataclass(frozen=True)
class DirectionPair:
    v1: np.ndarray
    v2: np.ndarray
    min_value: float
    max_value: float
    argmin: np.ndarray
    nonconstant: bool


def potential_eval(mu: DiscreteMeasure, spec: NormSpec, p: float, x) -> float:
    """sum_i w_i N(x - x_i)^p."""
    x = as_vector(x)
    return float(mu.weights @ spec.power(x - mu.points, p))


def _potentials(mu: DiscreteMeasure, spec: NormSpec, p: float, xs: np.ndarray) -> np.ndarray:
    diff = xs[..., None, :] - mu.points
    return spec.power(diff, p) @ mu.weights


def potential_grid(mu: DiscreteMeasure, spec: NormSpec, p: float, xs: Sequence[float],
                   ys: Sequence[float]) -> np.ndarray:
    """Potential of a planar measure on the grid; entry [j, i] is at (xs[i], ys[j])."""
    if mu.dimension != 2:
        raise DomainError('grid scans are planar')
    gx, gy = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float))
    return _potentials(mu, spec, p, np.stack([gx, gy], axis=-1))


def potentials_agree(mu: DiscreteMeasure, nu: DiscreteMeasure, spec: NormSpec, p: float,
                     points: np.ndarray, tol: float = 1e-12) -> Tuple[bool, float]:
    pts = np.atleast_2d(np.asarray(points, float))
    gap = float(np.abs(_potentials(mu, spec, p, pts) - _potentials(nu, spec, p, pts)).max())
    return gap <= tol, gap


def second_diff_G(spec: NormSpec, p: float, x, h) -> float:
    """(N^p(x+h) - 2N^p(x) + N^p(x-h)) / (2N^p(h))."""
    x, h = as_vector(x), as_vector(h)
    if not np.any(h):
        raise DomainError('second difference needs h != 0')
    num = spec.power(x + h, p) - 2 * spec.power(x, p) + spec.power(x - h, p)
    return float(num / (2 * spec.power(h, p)))


def second_diff_bound(spec: NormSpec, p: float, dim: int = 2, samples: int = 50,
                      seed: int = 0) -> float:
    """max |G(x, h)| over a samples x samples grid with N(x) <= 1, 0 < N(h) <= 1."""
    rng = np.random.default_rng(seed)
    xs = np.array(sphere_sample(dim, samples, seed=seed, spec=spec))
    hs = np.array(sphere_sample(dim, samples, seed=seed + 1, spec=spec))
    xs = xs * rng.uniform(0, 1, (samples, 1))
    hs = hs * rng.uniform(1e-3, 1, (samples, 1))
    x = xs[:, None, :]
    h = hs[None, :, :]
    num = spec.power(x + h, p) - 2 * spec.power(x, p) + spec.power(x - h, p)
    g = num / (2 * spec.power(h, p))
    return float(np.abs(g).max())


def _measure_second_diff(mu, spec, p, x, h):
    pts = np.stack([x + h, x, x - h])
    t_plus, t_mid, t_minus = _potentials(mu, spec, p, pts)
    return float((t_plus - 2 * t_mid + t_minus) / (2 * spec.power(h, p)))


def atom_estimate(mu: DiscreteMeasure, spec: NormSpec, p: float, x, direction,
                  h0: float = 1.0, shrink: float = 0.5, steps: int = 21,
                  window_tol: float = 5e-4) -> AtomEstimate:
    """Estimate mu({x}) from measure-level second differences, h_k = h0 shrink^k direction."""
    if not 1 <= p < 2:
        raise DomainError(f'atom recovery needs 1 <= p < 2, got {p}')
    if steps < 4:
        raise DomainError(f'need at least 4 steps, got {steps}')
    if not (0 < shrink < 1 and h0 > 0):
        raise DomainError(f'need h0 > 0 and shrink in (0, 1), got {h0}, {shrink}')
    x = as_vector(x)
    u = as_vector(direction)
    if abs(np.linalg.norm(u) - 1.0) > 1e-9:
        raise DomainError('direction must be a unit vector')
    seq = []
    for k in range(steps):
        h = h0 * shrink ** k
        seq.append((h, _measure_second_diff(mu, spec, p, x, h * u)))
    tail = [g for _, g in seq[-3:]]
    converged = max(tail) - min(tail) <= window_tol
    if not converged:
        logger.debug('atom estimate at %s did not settle: last values %s', x, tail)
    return AtomEstimate(location=x, estimate=seq[-1][1], h_sequence=seq, converged=converged)


def pairing_T(pairing: HessianPairing, x) -> float:
    x = as_vector(x)
    if not np.any(x):
        if pairing.p == 2:
            raise DomainError('the pairing is undefined at 0 for p = 2')
        return 0.0
    return float(pairing.values(x)[0])


def integrated_T(mu: DiscreteMeasure, pairing: HessianPairing, x) -> IntegratedT:
    """sum_i w_i T(x - x_i); for p = 2 an atom at x is left out and flagged."""
    diff = as_vector(x) - mu.points
    at_x = ~np.any(diff != 0, axis=1)
    excluded = bool(at_x.any()) and pairing.p == 2
    keep = ~at_x
    if not keep.any():
        return IntegratedT(0.0, excluded)
    value = float(mu.weights[keep] @ pairing.values(diff[keep]))
    return IntegratedT(value, excluded)


class DirectionSearch:
    """Search unit pairs (v1, v2) whose pairing is >= 0, non-constant and has minimum 0.

    cfg keys: samples, min_tol, max_tol, neg_tol.
    """

    def __init__(self, spec: NormSpec, p: float, cfg: Optional[Dict] = None):
        cfg = cfg or {}
        self.spec = spec
        self.p = p
        self.samples = int(cfg.get('samples', 400))
        self.min_tol = float(cfg.get('min_tol', 1e-8))
        self.max_tol = float(cfg.get('max_tol', 1e-4))
        self.neg_tol = float(cfg.get('neg_tol', 1e-8))
        self._points = None
        self._hess = None

    def _sampled(self, v1, v2):
        return np.einsum('i,sij,j->s', v2, self._hess, v1)

    def _polished_min(self, v1, v2, start):
        def objective(y):
            n = float(self.spec.value(y))
            if n < 1e-12:
                return np.inf
            return float(np.einsum('i,ij,j->', v2, self.spec.power_hessian(y / n, self.p), v1))

        res = minimize(objective, start, method='Nelder-Mead',
                       options={'xatol': 1e-12, 'fatol': 1e-14, 'maxiter': 4000})
        n = float(self.spec.value(res.x))
        return float(res.fun), res.x / n

    def _evaluate(self, v1, v2):
        vals = self._sampled(v1, v2)
        start = self._points[int(np.argmin(vals))]
        low, at = self._polished_min(v1, v2, start)
        if low > vals.min():
            low, at = float(vals.min()), start
        return vals, low, at

    def _accept(self, v1, v2, vals, low, at) -> Optional[DirectionPair]:
        high = float(vals.max())
        if abs(low) <= self.min_tol and vals.min() >= -self.neg_tol and high >= self.max_tol:
            return DirectionPair(v1=v1, v2=v2, min_value=low, max_value=high, argmin=at,
                                 nonconstant=True)
        return None

    @staticmethod
    def _constant(vals):
        return np.ptp(vals) <= 1e-10 * (1 + np.abs(vals).max())

    def call(self, dim: int, grid: int = 16, seed: int = 0) -> Optional[DirectionPair]:
        if grid < 16:
            raise DomainError(f'grid must be >= 16, got {grid}')
        self._points = np.array(sphere_sample(dim, self.samples, seed=seed + 1, spec=self.spec))
        self._hess = self.spec.power_hessian(self._points, self.p)
        candidates = [np.eye(dim)[i] for i in range(dim)] + sphere_sample(dim, grid, seed=seed)

        diagonal = {}
        for i, v in enumerate(candidates):
            vals, low, at = self._evaluate(v, v)
            diagonal[i] = (vals, low)
            found = self._accept(v, v, vals, low, at)
            if found is not None:
                return found

        for i, v1 in enumerate(candidates):
            vals11, low11 = diagonal[i]
            if low11 <= 0:
                continue
            for j, v2 in enumerate(candidates):
                if i == j or v1 @ v2 < -0.99:
                    continue
                vals12 = self._sampled(v1, v2)
                if self._constant(vals11) and self._constant(vals12):
                    continue
                if vals12.min() >= -self.neg_tol:
                    continue
                found = self._bisect(v1, v2)
                if found is not None:
                    return found
        logger.info('no direction pair found', extra={'dim': dim, 'grid': grid, 'kind': self.spec.kind})
        return None

    def _bisect(self, v1, v2) -> Optional[DirectionPair]:
        def direction(s):
            w = (1 - s) * v1 + s * v2
            return w / np.linalg.norm(w)

        def g(s):
            return self._evaluate(v1, direction(s))[1]

        if not (g(0.0) > 0 > g(1.0)):
            return None
        s = brentq(g, 0.0, 1.0, xtol=1e-14)
        w = direction(s)
        vals, low, at = self._evaluate(v1, w)
        if self._constant(vals):
            return None
        return self._accept(v1, w, vals, low, at)


def direction_search(spec: NormSpec, p: float, dim: int, grid: int = 16, seed: int = 0,
                     cfg: Optional[Dict] = None) -> Optional[DirectionPair]:
    """First pair (v1, v2) with min over S_N of the pairing 0, all values >= 0, not constant."""
    return DirectionSearch(spec, p, cfg).call(dim, grid, seed)


def support_in_translate_check(mu: DiscreteMeasure, pairing: HessianPairing,
                               sub: AffineSubspace, tol: float = 1e-8) -> bool:
    if not all(sub.contains(x, 1e-9) for x in mu.points):
        return False
    return all(abs(integrated_T(mu, pairing, x).value) <= tol for x in mu.points)
