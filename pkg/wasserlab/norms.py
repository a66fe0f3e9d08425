"""Norms N: R^n -> R_+ together with the derivatives of x -> N(x)^p.

Every family works on arrays of shape (..., n); the module level helpers
(`norm_eval`, `norm_grad`, `norm_hessian`) are thin wrappers used by the
rest of the package.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from .base import init_norm, register_norm
from .exceptions import ConfigurationError, DomainError, InputError

logger = logging.getLogger(__name__)

FD_RELATIVE_STEP = 1e-5


def as_vector(x) -> np.ndarray:
    """Validated read-only float64 copy of a point of R^n."""
    v = np.array(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise InputError(f'expected a non-empty 1-D vector, got shape {v.shape}')
    if not np.all(np.isfinite(v)):
        raise InputError(f'vector has non-finite coordinates: {v}')
    v.flags.writeable = False
    return v


def fd_step(x: np.ndarray) -> float:
    return FD_RELATIVE_STEP * max(1.0, float(np.linalg.norm(x)))


def _central_gradient(f: Callable, x: np.ndarray) -> np.ndarray:
    h = fd_step(x)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def _central_jacobian(grad: Callable, x: np.ndarray) -> np.ndarray:
    h = fd_step(x)
    n = x.size
    jac = np.empty((n, n))
    for i in range(n):
        e = np.zeros_like(x)
        e[i] = h
        jac[i] = (grad(x + e) - grad(x - e)) / (2 * h)
    return 0.5 * (jac + jac.T)


def _rowwise(fn: Callable, x: np.ndarray, out_tail: tuple) -> np.ndarray:
    flat = x.reshape(-1, x.shape[-1])
    out = np.stack([fn(row) for row in flat]) if len(flat) else np.empty((0,) + out_tail)
    return out.reshape(x.shape[:-1] + out_tail)


class NormSpec:
    """A norm family with the derivatives of its p-th power.

    Subclasses implement `value`; analytic `_power_gradient` and
    `_power_hessian` are optional, central finite differences are used
    otherwise.
    """

    kind: str = 'custom'
    strictly_convex: bool = False
    smoothness_order: int = 0

    def value(self, x) -> np.ndarray:
        raise NotImplementedError

    def power(self, x, p: float) -> np.ndarray:
        return self.value(x) ** p

    # analytic hooks, None when unavailable
    _power_gradient = None
    _power_hessian = None

    @property
    def has_analytic_hessian(self) -> bool:
        return self._power_hessian is not None

    def power_gradient(self, x, p: float) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if p < 1:
            raise DomainError(f'exponent p must be >= 1, got {p}')
        zero = ~np.any(x != 0, axis=-1)
        if np.any(zero) and p < 2:
            raise DomainError(f'gradient of N^{p} is undefined at the origin')
        if self._power_gradient is not None:
            g = self._power_gradient(x, p)
        else:
            g = _rowwise(lambda row: _central_gradient(lambda y: self.value(y) ** p, row),
                         x, (x.shape[-1],))
        return np.where(zero[..., None], 0.0, g)

    def power_hessian(self, x, p: float, allow_fd: bool = True) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(~np.any(x != 0, axis=-1)):
            raise DomainError(f'Hessian of N^{p} is undefined at the origin')
        if self._power_hessian is not None:
            return self._power_hessian(x, p)
        if not allow_fd:
            raise DomainError(f'{self.kind} norm has no analytic Hessian')
        if self.smoothness_order < 2:
            logger.debug('finite-difference Hessian of a non-smooth %s norm', self.kind)
        n = x.shape[-1]
        return _rowwise(lambda row: _central_jacobian(lambda y: self.power_gradient(y, p), row),
                        x, (n, n))

    def to_json(self) -> Dict:
        return {'kind': self.kind}


@register_norm('euclidean')
@dataclass(frozen=True)
class EuclideanNorm(NormSpec):
    strictly_convex: bool = field(default=True, init=False)
    smoothness_order: int = field(default=2, init=False)

    def value(self, x):
        return np.linalg.norm(np.asarray(x, dtype=float), axis=-1)

    def _power_gradient(self, x, p):
        r = self.value(x)[..., None]
        with np.errstate(divide='ignore', invalid='ignore'):
            return p * np.where(r > 0, r, 1.0) ** (p - 2) * x

    def _power_hessian(self, x, p):
        n = x.shape[-1]
        r = self.value(x)[..., None, None]
        outer = x[..., :, None] * x[..., None, :]
        return p * r ** (p - 2) * np.eye(n) + p * (p - 2) * r ** (p - 4) * outer


@register_norm('lq')
@dataclass(frozen=True)
class LqNorm(NormSpec):
    """N_q(x) = (sum |x_i|^q)^(1/q), q > 1."""

    q: float = 2.0
    strictly_convex: bool = field(default=True, init=False)
    smoothness_order: int = field(default=2, init=False)

    def __post_init__(self):
        if not np.isfinite(self.q) or self.q <= 1:
            raise ConfigurationError(f'lq norm needs a finite q > 1, got {self.q}')
        object.__setattr__(self, 'q', float(self.q))

    def value(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        scale = np.max(a, axis=-1, keepdims=True)
        safe = np.where(scale > 0, scale, 1.0)
        return scale[..., 0] * np.sum((a / safe) ** self.q, axis=-1) ** (1.0 / self.q)

    def _signed_power(self, x, e):
        return np.sign(x) * np.abs(x) ** e

    def _abs_power(self, x, e):
        """|x|^e extended continuously at 0 (0 for e > 0, 1 for e == 0)."""
        a = np.abs(x)
        if e > 0:
            return a ** e
        if e == 0:
            return np.ones_like(a)
        if np.any(a == 0):
            raise DomainError(f'lq Hessian with q = {self.q} < 2 is unbounded on coordinate hyperplanes')
        return a ** e

    def _power_gradient(self, x, p):
        n = self.value(x)[..., None]
        safe = np.where(n > 0, n, 1.0)
        return p * safe ** (p - self.q) * self._signed_power(x, self.q - 1)

    def _power_hessian(self, x, p):
        q = self.q
        n = self.value(x)[..., None, None]
        g = self._signed_power(x, q - 1)
        outer = g[..., :, None] * g[..., None, :]
        diag = self._abs_power(x, q - 2)
        eye = np.eye(x.shape[-1])
        return (p * (p - q) * n ** (p - 2 * q) * outer
                + p * (q - 1) * n ** (p - q) * diag[..., None, :] * eye)

    def to_json(self):
        return {'kind': 'lq', 'q': self.q}


@register_norm('linf')
@dataclass(frozen=True)
class LinfNorm(NormSpec):
    strictly_convex: bool = field(default=False, init=False)
    smoothness_order: int = field(default=0, init=False)

    def value(self, x):
        return np.max(np.abs(np.asarray(x, dtype=float)), axis=-1)


@register_norm('l1')
@dataclass(frozen=True)
class L1Norm(NormSpec):
    strictly_convex: bool = field(default=False, init=False)
    smoothness_order: int = field(default=0, init=False)

    def value(self, x):
        return np.sum(np.abs(np.asarray(x, dtype=float)), axis=-1)


@register_norm('custom')
@dataclass(frozen=True)
class CustomNorm(NormSpec):
    """User supplied norm; `value_fn` maps one vector to a float.

    `gradient_fn(x, p)` and `hessian_fn(x, p)`, when given, return the
    derivatives of N^p at a single vector.
    """

    value_fn: Optional[Callable] = None
    gradient_fn: Optional[Callable] = None
    hessian_fn: Optional[Callable] = None
    strictly_convex: bool = False
    smoothness_order: int = 0

    def __post_init__(self):
        if self.value_fn is None:
            raise ConfigurationError('custom norm needs a value function')
        if self.smoothness_order not in (0, 1, 2):
            raise ConfigurationError(f'smoothness_order must be 0, 1 or 2, got {self.smoothness_order}')

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return _rowwise(lambda row: np.asarray(float(self.value_fn(row))), x, ())

    @property
    def _power_gradient(self):
        if self.gradient_fn is None:
            return None
        return lambda x, p: _rowwise(lambda row: np.asarray(self.gradient_fn(row, p), float),
                                     x, (x.shape[-1],))

    @property
    def _power_hessian(self):
        if self.hessian_fn is None:
            return None
        return lambda x, p: _rowwise(lambda row: np.asarray(self.hessian_fn(row, p), float),
                                     x, (x.shape[-1],) * 2)

    def to_json(self):
        raise InputError('custom norms have no JSON form')


def norm_from_json(obj: Union[str, Dict]) -> NormSpec:
    """Parse ``{"kind": "lq", "q": 4.0}`` style descriptions (dict or JSON text)."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise InputError(f'norm description is not valid JSON: {e}') from e
    if obj.get('kind') == 'custom':
        raise ConfigurationError('custom norms must be built in Python, not from JSON')
    return init_norm(obj)


def norm_eval(spec: NormSpec, x) -> float:
    return float(spec.value(as_vector(x)))


def norm_grad(spec: NormSpec, p_exponent: float, x) -> np.ndarray:
    return spec.power_gradient(as_vector(x), p_exponent)


def norm_hessian(spec: NormSpec, p_exponent: float, x, allow_fd: bool = True) -> np.ndarray:
    return spec.power_hessian(as_vector(x), p_exponent, allow_fd=allow_fd)


def sphere_sample(dim: int, count: int, seed: int = 0,
                  spec: Optional[NormSpec] = None) -> List[np.ndarray]:
    """Seeded unit vectors (Euclidean, or N(x) = 1 when `spec` is given)."""
    if dim < 1 or count < 1:
        raise DomainError(f'need dim >= 1 and count >= 1, got dim={dim}, count={count}')
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((count, dim))
    norms = np.linalg.norm(pts, axis=1)
    # a zero draw has probability 0 but would poison normalisation
    while np.any(norms == 0):
        bad = norms == 0
        pts[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(pts, axis=1)
    pts = pts / norms[:, None]
    if spec is not None:
        pts = pts / spec.value(pts)[:, None]
    return [as_vector(p) for p in pts]


def strict_convexity_diagnostic(spec: NormSpec, dim: int = 2, samples: int = 200,
                                seed: int = 0) -> float:
    """Fraction of non-parallel sampled pairs with N((x+y)/2) < (N(x)+N(y))/2.

    The sample mixes Gaussian directions with coordinate-heavy points
    (one dominant coordinate), which expose flat faces of l_inf/l_1 balls.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, dim))
    y = rng.standard_normal((samples, dim))
    half = samples // 2
    x[:half, 0] = 3.0 + np.abs(x[:half, 0])
    y[:half, 0] = 3.0 + np.abs(y[:half, 0])
    cross = np.abs(np.sum(x * y, axis=1)) / (np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1))
    keep = cross < 1 - 1e-9
    x, y = x[keep], y[keep]
    nx, ny = spec.value(x), spec.value(y)
    mid = spec.value(0.5 * (x + y))
    strict = mid < 0.5 * (nx + ny) - 1e-12 * (1 + nx + ny)
    frac = float(np.mean(strict)) if len(strict) else 1.0
    if spec.strictly_convex and frac < 1.0:
        logger.warning('%s declared strictly convex but midpoint test failed on %.1f%% of pairs',
                       spec.kind, 100 * (1 - frac))
    return frac
