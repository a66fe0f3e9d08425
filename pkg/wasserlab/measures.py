"""Finitely supported probability measures and the maps acting on them."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import DomainError, InputError, MeasureError
from .norms import as_vector

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-12
MERGE_TOL = 1e-12
MATCH_TOL = 1e-9
# e^(-2 * 300) is still a normal double
TWO_POINT_PARAM_MAX = 300.0


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """sum_i weights[i] * delta_{points[i]}; atom order carries no meaning."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if pts.ndim != 2 or pts.shape[0] != w.size or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise MeasureError(f'need m >= 1 points of shape (m, n) and m weights, '
                               f'got {pts.shape} and {w.shape}')
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise MeasureError('measure has non-finite points or weights')
        if np.any(w <= 0):
            raise MeasureError(f'weights must be strictly positive, got {w}')
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise MeasureError(f'weights sum to {w.sum():.17g}, not 1')
        if len(pts) > 1:
            diff = pts[:, None, :] - pts[None, :, :]
            dist = np.linalg.norm(diff, axis=-1)
            np.fill_diagonal(dist, np.inf)
            if dist.min() <= 0:
                raise MeasureError('atom points must be pairwise distinct')
        pts.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, 'points', pts)
        object.__setattr__(self, 'weights', w)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def atoms(self) -> List[Tuple[np.ndarray, float]]:
        return [(p, float(w)) for p, w in zip(self.points, self.weights)]

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (np.array_equal(self.points, other.points)
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.points.tobytes(), self.weights.tobytes()))

    def is_dirac(self) -> bool:
        return self.size == 1

    def __repr__(self):
        terms = ' + '.join(f'{w:.6g}*d{tuple(np.round(p, 6))}' for p, w in self.atoms)
        return f'DiscreteMeasure({terms})'


@dataclass(frozen=True)
class TwoPointParams:
    """Parameters (x, sigma, p) of a two-atom measure on origin + R*axis."""

    axis: np.ndarray
    origin: np.ndarray
    x: float
    sigma: float
    p_param: float


def _normalised(points, weights) -> DiscreteMeasure:
    w = np.asarray(weights, dtype=float)
    return DiscreteMeasure(points, w / w.sum())


def dirac(point) -> DiscreteMeasure:
    return DiscreteMeasure(as_vector(point)[None, :], [1.0])


def merge_atoms(points: np.ndarray, weights: np.ndarray, tol: float = MERGE_TOL):
    """Merge points closer than `tol` (Euclidean), summing their weights."""
    merged_pts: List[np.ndarray] = []
    merged_w: List[float] = []
    for p, w in zip(points, weights):
        for k, q in enumerate(merged_pts):
            if np.linalg.norm(p - q) < tol:
                merged_w[k] += w
                break
        else:
            merged_pts.append(np.array(p, dtype=float))
            merged_w.append(float(w))
    return np.array(merged_pts), np.array(merged_w)


def pushforward(mu: DiscreteMeasure, fn: Callable) -> DiscreteMeasure:
    images = np.array([as_vector(fn(p)) for p in mu.points])
    pts, w = merge_atoms(images, mu.weights)
    return _normalised(pts, w)


def affine_image(mu: DiscreteMeasure, matrix, offset=None) -> DiscreteMeasure:
    """Push-forward by x -> matrix @ x + offset."""
    a = np.asarray(matrix, dtype=float)
    b = np.zeros(a.shape[0]) if offset is None else np.asarray(offset, dtype=float)
    pts, w = merge_atoms(mu.points @ a.T + b, mu.weights)
    return _normalised(pts, w)


def translate(mu: DiscreteMeasure, v) -> DiscreteMeasure:
    return DiscreteMeasure(mu.points + as_vector(v), mu.weights)


def dilate(mu: DiscreteMeasure, center, factor: float) -> DiscreteMeasure:
    """Each atom y goes to center + factor * (y - center)."""
    c = as_vector(center)
    pts, w = merge_atoms(c + factor * (mu.points - c), mu.weights)
    return _normalised(pts, w)


def barycenter(mu: DiscreteMeasure) -> np.ndarray:
    return mu.weights @ mu.points


def _unit_axis(axis) -> np.ndarray:
    e = as_vector(axis)
    if abs(np.linalg.norm(e) - 1.0) > 1e-9:
        raise DomainError(f'axis must be a unit vector, |axis| = {np.linalg.norm(e)}')
    return e


def kloeckner_two_point(params: TwoPointParams) -> DiscreteMeasure:
    """mu(x, sigma, p): weight e^-p/(e^-p+e^p) at x - sigma e^p and
    e^p/(e^-p+e^p) at x + sigma e^-p along the axis."""
    if not params.sigma > 0:
        raise DomainError(f'sigma must be positive, got {params.sigma}')
    if not abs(params.p_param) <= TWO_POINT_PARAM_MAX:
        raise DomainError(f'two-point parameter must lie in [-{TWO_POINT_PARAM_MAX:g}, '
                          f'{TWO_POINT_PARAM_MAX:g}], got {params.p_param}')
    e = _unit_axis(params.axis)
    o = as_vector(params.origin)
    t = params.p_param
    w_left = 1.0 / (1.0 + np.exp(2 * t))
    w_right = 1.0 / (1.0 + np.exp(-2 * t))
    s_left = params.x - params.sigma * np.exp(t)
    s_right = params.x + params.sigma * np.exp(-t)
    return DiscreteMeasure([o + s_left * e, o + s_right * e], [w_left, w_right])


def two_point_params(mu: DiscreteMeasure, axis, origin=None, tol: float = 1e-9) -> TwoPointParams:
    """Recover (x, sigma, p) from a two-atom measure on origin + R*axis."""
    e = _unit_axis(axis)
    o = np.zeros(mu.dimension) if origin is None else as_vector(origin)
    if mu.size != 2:
        raise DomainError(f'two-point family needs exactly 2 atoms, got {mu.size}')
    rel = mu.points - o
    s = rel @ e
    off_line = np.linalg.norm(rel - s[:, None] * e, axis=1)
    if np.any(off_line > tol * (1 + np.abs(s))):
        raise DomainError('atoms are not on the axis line')
    order = np.argsort(s)
    (s_left, s_right), (w_left, w_right) = s[order], mu.weights[order]
    t = 0.5 * np.log(w_right / w_left)
    sigma = (s_right - s_left) / (np.exp(t) + np.exp(-t))
    x = w_left * s_left + w_right * s_right
    return TwoPointParams(axis=e, origin=o, x=float(x), sigma=float(sigma), p_param=float(t))


def shift_weight(mu: DiscreteMeasure, from_atom: int, to_point, mass: float) -> DiscreteMeasure:
    """Move `mass` from atom `from_atom` to a new atom at `to_point`."""
    target = as_vector(to_point)
    if not 0 <= from_atom < mu.size:
        raise DomainError(f'atom index {from_atom} out of range')
    if not 0 < mass < mu.weights[from_atom]:
        raise DomainError(f'mass {mass} must lie in (0, {mu.weights[from_atom]})')
    if np.any(np.linalg.norm(mu.points - target, axis=1) < MERGE_TOL):
        raise DomainError('target point is already an atom')
    w = mu.weights.copy()
    w[from_atom] -= mass
    return DiscreteMeasure(np.vstack([mu.points, target]), np.append(w, mass))


def measures_close(mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = MATCH_TOL) -> bool:
    """Equality up to atom order: optimal matching of positions, then weights."""
    if mu.dimension != nu.dimension or mu.size != nu.size:
        return False
    dist = np.linalg.norm(mu.points[:, None, :] - nu.points[None, :, :], axis=-1)
    rows, cols = linear_sum_assignment(dist)
    if dist[rows, cols].max() > tol:
        return False
    return bool(np.abs(mu.weights[rows] - nu.weights[cols]).max() <= tol)


def random_measure(rng: np.random.Generator, dim: int, n_atoms: int, scale: float = 2.0,
                   denominator: Optional[int] = None) -> DiscreteMeasure:
    """Random atoms in [-scale, scale]^dim; weights k/denominator when given."""
    pts = rng.uniform(-scale, scale, size=(n_atoms, dim))
    if denominator is None:
        w = rng.uniform(0.2, 1.0, size=n_atoms)
    else:
        if denominator < n_atoms:
            raise DomainError('denominator must be at least the number of atoms')
        cuts = np.sort(rng.choice(np.arange(1, denominator), size=n_atoms - 1, replace=False))
        w = np.diff(np.concatenate([[0], cuts, [denominator]])).astype(float)
    return _normalised(pts, w)


def _parse_weight(raw) -> Fraction:
    if isinstance(raw, dict):
        try:
            return Fraction(int(raw['num']), int(raw['den']))
        except (KeyError, ValueError, ZeroDivisionError, TypeError) as e:
            raise InputError(f'bad fractional weight {raw!r}') from e
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return Fraction(raw)
    raise InputError(f'weight must be a number or {{num, den}}, got {raw!r}')


def measure_from_json(obj: Dict, sum_tol: float = 1e-9) -> DiscreteMeasure:
    """Parse the measure JSON format; weights may be floats or {num, den}."""
    try:
        atoms = obj['atoms']
        points = [list(map(float, a['point'])) for a in atoms]
        weights = [_parse_weight(a['weight']) for a in atoms]
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f'malformed measure description: {e}') from e
    if not atoms:
        raise MeasureError('measure has no atoms')
    dim = obj.get('dimension', len(points[0]))
    if any(len(p) != dim for p in points):
        raise InputError(f'all points must have dimension {dim}')
    total = sum(weights, Fraction(0))
    if abs(float(total) - 1.0) > sum_tol:
        raise MeasureError(f'weights sum to {float(total):.12g}, not 1')
    if any(w <= 0 for w in weights):
        raise MeasureError('weights must be strictly positive')
    pts, _ = merge_atoms(np.array(points, dtype=float), np.ones(len(points)), tol=MERGE_TOL)
    if len(pts) != len(points):
        raise MeasureError('duplicate atom points')
    return DiscreteMeasure(points, [float(w / total) for w in weights])


def measure_to_json(mu: DiscreteMeasure) -> Dict:
    return {
        'dimension': mu.dimension,
        'atoms': [{'point': [float(c) for c in p], 'weight': w} for p, w in mu.atoms],
    }

