"""Convex cones, membership tests, and order bounds.

Every cone lives in a finite-dimensional real coordinate space.  Symmetric
positive-definite matrices are flattened to vectors (row-major upper
triangle, off-diagonal entries scaled by sqrt(2)) so that the Euclidean
inner product of two coordinate vectors equals the Frobenius inner product
of the matrices they represent.

The workhorse primitive is the pair of order bounds of an arbitrary vector
``v`` against an interior point ``x`` of the cone ``C``::

    sup_bound(v, x) = inf { t in R : t*x - v in C }
    inf_bound(v, x) = sup { t in R : v - t*x in C }

Both are finite for every ``v`` whenever ``x`` is interior, and every
metric quantity in the package reduces to them.  For two interior points
the classical order bound M(x/y) is ``sup_bound(x, y)``.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .errors import (
    BoundarySearchError,
    DimensionMismatchError,
    NotInteriorError,
    SamplingBudgetError,
)

__all__ = [
    "Cone",
    "ConePoint",
    "LorentzCone",
    "OracleCone",
    "Orthant",
    "SymPDCone",
    "cone_from_dict",
    "contains_interior",
    "oracle_wrap",
    "order_inf",
    "order_sup",
    "same_cone_pair",
    "sample_interior",
    "sym_to_vec",
    "vec_to_sym",
]

_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# symmetric-matrix coordinates


@lru_cache(maxsize=None)
def _triu_cache(n: int):
    rows, cols = np.triu_indices(n)
    off = rows != cols
    return rows, cols, off


def sym_to_vec(m) -> np.ndarray:
    """Flatten a symmetric matrix to inner-product-preserving coordinates.

    Row-major upper triangle; off-diagonal entries are scaled by sqrt(2) so
    that ``vec(A) @ vec(B) == trace(A @ B)`` for symmetric ``A``, ``B``.
    Accepts a trailing (n, n) batch.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[-1]
    if m.shape[-2] != n:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    rows, cols, off = _triu_cache(n)
    v = m[..., rows, cols].copy()
    v[..., off] *= _SQRT2
    return v


def vec_to_sym(v, n: int | None = None) -> np.ndarray:
    """Inverse of :func:`sym_to_vec`.  Accepts a leading batch dimension."""
    v = np.asarray(v, dtype=float)
    length = v.shape[-1]
    if n is None:
        n = int(round((math.sqrt(8 * length + 1) - 1) / 2))
    if n * (n + 1) // 2 != length:
        raise DimensionMismatchError(
            f"coordinate vector of length {length} is not a flattened {n}x{n} symmetric matrix"
        )
    rows, cols, off = _triu_cache(n)
    entries = v.copy()
    entries[..., off] /= _SQRT2
    out = np.zeros(v.shape[:-1] + (n, n))
    out[..., rows, cols] = entries
    out[..., cols, rows] = entries
    return out


# ---------------------------------------------------------------------------
# cone classes


class Cone(abc.ABC):
    """A closed convex cone with nonempty interior in some R^d."""

    kind = "abstract"

    @property
    @abc.abstractmethod
    def dim(self) -> int:
        """Ambient coordinate dimension."""

    # -- validation

    def validate(self, coords, what: str = "point") -> np.ndarray:
        arr = np.asarray(coords, dtype=float)
        if arr.ndim != 1 or arr.shape[0] != self.dim:
            got = arr.shape[0] if arr.ndim == 1 else f"shape {arr.shape}"
            raise DimensionMismatchError(
                f"{what} has dimension {got}, but the {self.kind} cone expects {self.dim}"
            )
        if not np.all(np.isfinite(arr)):
            raise NotInteriorError(f"{what} has non-finite entries")
        return arr

    # -- membership

    @abc.abstractmethod
    def contains(self, coords, slack: float = 0.0) -> bool:
        """Closed-cone membership, with optional absolute slack."""

    @abc.abstractmethod
    def contains_interior(self, coords) -> bool:
        """Strict interior membership."""

    def contains_interior_batch(self, pts: np.ndarray) -> np.ndarray:
        return np.array([self.contains_interior(p) for p in pts], dtype=bool)

    # -- order bounds

    @abc.abstractmethod
    def sup_bound(self, v, x) -> float:
        """inf { t : t*x - v in C } for interior ``x`` and arbitrary ``v``."""

    def inf_bound(self, v, x) -> float:
        """sup { t : v - t*x in C } for interior ``x`` and arbitrary ``v``."""
        return -self.sup_bound(-np.asarray(v, dtype=float), x)

    def sup_inf_bounds(self, v, x) -> tuple[float, float]:
        return self.sup_bound(v, x), self.inf_bound(v, x)

    def sup_bound_batch(self, V: np.ndarray, X: np.ndarray) -> np.ndarray:
        return np.array([self.sup_bound(v, x) for v, x in zip(V, X)])

    def sup_inf_bounds_batch(self, V: np.ndarray, X: np.ndarray):
        sups = self.sup_bound_batch(V, X)
        infs = -self.sup_bound_batch(-np.asarray(V, dtype=float), X)
        return sups, infs

    # -- conveniences

    def point(self, coords) -> "ConePoint":
        return ConePoint(self, coords)

    def to_dict(self) -> dict:
        raise TypeError(f"{self.kind} cones have no serialized form")


@dataclass(frozen=True)
class Orthant(Cone):
    """The nonnegative orthant in R^n."""

    n: int
    kind = "orthant"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("orthant dimension must be at least 1")

    @property
    def dim(self) -> int:
        return self.n

    def contains(self, coords, slack: float = 0.0) -> bool:
        arr = self.validate(coords)
        return bool(np.all(arr >= -slack))

    def contains_interior(self, coords) -> bool:
        arr = self.validate(coords)
        return bool(np.all(arr > 0.0))

    def contains_interior_batch(self, pts: np.ndarray) -> np.ndarray:
        return np.all(np.asarray(pts, dtype=float) > 0.0, axis=-1)

    def sup_bound(self, v, x) -> float:
        v = self.validate(v, "vector")
        x = self.validate(x, "base point")
        return float(np.max(v / x))

    def inf_bound(self, v, x) -> float:
        v = self.validate(v, "vector")
        x = self.validate(x, "base point")
        return float(np.min(v / x))

    def sup_bound_batch(self, V, X) -> np.ndarray:
        return np.max(np.asarray(V, dtype=float) / np.asarray(X, dtype=float), axis=-1)

    def sup_inf_bounds_batch(self, V, X):
        r = np.asarray(V, dtype=float) / np.asarray(X, dtype=float)
        return np.max(r, axis=-1), np.min(r, axis=-1)

    def to_dict(self) -> dict:
        return {"kind": "orthant", "n": self.n}


def _quad_roots(A, B, C, D=None):
    """Stable roots (lo, hi) of A*t^2 - 2*B*t + C with A > 0.

    The discriminant may be supplied precomputed (callers with structure
    can evaluate it without cancellation); it is clamped at zero either
    way, since the geometry guarantees it is nonnegative up to rounding.
    """
    if D is None:
        D = B * B - A * C
    if D < 0.0:
        D = 0.0
    r = math.sqrt(D)
    if B >= 0.0:
        num = B + r
        hi = num / A
        lo = C / num if num > 0.0 else 0.0
    else:
        num = B - r
        lo = num / A
        hi = C / num
    return lo, hi


@dataclass(frozen=True)
class LorentzCone(Cone):
    """Future cone { (t, v) : t >= |v| } in R^(n+1); ``n`` is the spatial dimension."""

    n: int
    kind = "lorentz"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("spatial dimension must be at least 1")

    @property
    def dim(self) -> int:
        return self.n + 1

    @staticmethod
    def quad(coords) -> float:
        """The defining quadratic t^2 - |v|^2."""
        c = np.asarray(coords, dtype=float)
        return float(c[..., 0] ** 2 - np.sum(c[..., 1:] ** 2, axis=-1))

    def contains(self, coords, slack: float = 0.0) -> bool:
        arr = self.validate(coords)
        scale = max(1.0, float(arr @ arr))
        return arr[0] >= -slack and self.quad(arr) >= -slack * scale

    def contains_interior(self, coords) -> bool:
        arr = self.validate(coords)
        return bool(arr[0] > math.sqrt(float(arr[1:] @ arr[1:])))

    def contains_interior_batch(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts[:, 0] > np.sqrt(np.sum(pts[:, 1:] ** 2, axis=-1))

    def sup_bound(self, v, x) -> float:
        v = self.validate(v, "vector")
        x = self.validate(x, "base point")
        return _quad_roots(*self._coeffs(v, x))[1]

    def inf_bound(self, v, x) -> float:
        v = self.validate(v, "vector")
        x = self.validate(x, "base point")
        return _quad_roots(*self._coeffs(v, x))[0]

    def sup_inf_bounds(self, v, x):
        v = self.validate(v, "vector")
        x = self.validate(x, "base point")
        lo, hi = _quad_roots(*self._coeffs(v, x))
        return hi, lo

    @staticmethod
    def _coeffs(v, x):
        # Discriminant via the Lagrange identity: both terms are sums of
        # squared differences, so near-proportional v, x lose no precision.
        A = x[0] * x[0] - x[1:] @ x[1:]
        B = x[0] * v[0] - x[1:] @ v[1:]
        C = v[0] * v[0] - v[1:] @ v[1:]
        mixed = x[0] * v[1:] - v[0] * x[1:]
        cross = np.outer(x[1:], v[1:])
        cross = cross - cross.T
        D = mixed @ mixed - 0.5 * float(np.sum(cross * cross))
        return A, B, C, D

    def _coeffs_batch(self, V, X):
        V = np.asarray(V, dtype=float)
        X = np.asarray(X, dtype=float)
        A = X[:, 0] ** 2 - np.sum(X[:, 1:] ** 2, axis=-1)
        B = X[:, 0] * V[:, 0] - np.sum(X[:, 1:] * V[:, 1:], axis=-1)
        C = V[:, 0] ** 2 - np.sum(V[:, 1:] ** 2, axis=-1)
        mixed = X[:, 0, None] * V[:, 1:] - V[:, 0, None] * X[:, 1:]
        cross = X[:, 1:, None] * V[:, None, 1:]
        cross = cross - np.swapaxes(cross, -1, -2)
        D = np.sum(mixed * mixed, axis=-1) - 0.5 * np.sum(cross * cross, axis=(-1, -2))
        return A, B, C, D

    def _roots_batch(self, V, X):
        A, B, C, D = self._coeffs_batch(V, X)
        D = np.maximum(D, 0.0)
        r = np.sqrt(D)
        pos = B >= 0.0
        num = np.where(pos, B + r, B - r)
        with np.errstate(divide="ignore", invalid="ignore"):
            primary = num / A
            secondary = C / num
        secondary = np.where(num == 0.0, 0.0, secondary)
        hi = np.where(pos, primary, secondary)
        lo = np.where(pos, secondary, primary)
        return lo, hi

    def sup_bound_batch(self, V, X) -> np.ndarray:
        return self._roots_batch(V, X)[1]

    def sup_inf_bounds_batch(self, V, X):
        lo, hi = self._roots_batch(V, X)
        return hi, lo

    def to_dict(self) -> dict:
        return {"kind": "lorentz", "n": self.n}


@dataclass(frozen=True)
class SymPDCone(Cone):
    """Positive semidefinite symmetric n x n matrices in flattened coordinates."""

    n: int
    kind = "sympd"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix order must be at least 1")

    @property
    def dim(self) -> int:
        return self.n * (self.n + 1) // 2

    def matrix(self, coords) -> np.ndarray:
        return vec_to_sym(self.validate(coords), self.n)

    def contains(self, coords, slack: float = 0.0) -> bool:
        m = self.matrix(coords)
        w = np.linalg.eigvalsh(m)
        scale = max(1.0, float(np.max(np.abs(w))))
        return bool(w[0] >= -slack * scale)

    def contains_interior(self, coords) -> bool:
        m = self.matrix(coords)
        try:
            np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            return False
        return True

    def contains_interior_batch(self, pts: np.ndarray) -> np.ndarray:
        ms = vec_to_sym(np.asarray(pts, dtype=float), self.n)
        w = np.linalg.eigvalsh(ms)
        return w[:, 0] > 0.0

    def sup_bound(self, v, x) -> float:
        return self.sup_inf_bounds(v, x)[0]

    def inf_bound(self, v, x) -> float:
        return self.sup_inf_bounds(v, x)[1]

    def sup_inf_bounds(self, v, x):
        vm = vec_to_sym(self.validate(v, "vector"), self.n)
        xm = self.matrix(x)
        w = scipy.linalg.eigh(vm, xm, eigvals_only=True)
        return float(w[-1]), float(w[0])

    def sup_bound_batch(self, V, X) -> np.ndarray:
        return self.sup_inf_bounds_batch(V, X)[0]

    def sup_inf_bounds_batch(self, V, X):
        vm = vec_to_sym(np.asarray(V, dtype=float), self.n)
        xm = vec_to_sym(np.asarray(X, dtype=float), self.n)
        L = np.linalg.cholesky(xm)
        Linv = np.linalg.inv(L)
        A = Linv @ vm @ np.swapaxes(Linv, -1, -2)
        A = 0.5 * (A + np.swapaxes(A, -1, -2))
        w = np.linalg.eigvalsh(A)
        return w[..., -1], w[..., 0]

    def to_dict(self) -> dict:
        return {"kind": "sympd", "n": self.n}


@dataclass(frozen=True, eq=False)
class OracleCone(Cone):
    """Cone known only through a closed-membership predicate.

    The predicate must be positively homogeneous: member(t*x) == member(x)
    for t > 0.  Order bounds are found by bisection over the predicate, so
    they carry the relative tolerance ``tol`` instead of being exact.  An
    optional ``interior`` predicate overrides the default probe-based
    interior test.
    """

    dimension: int
    member: Callable[[np.ndarray], bool]
    tol: float = 1e-9
    bracket_cap: float = 1e12
    interior: Optional[Callable[[np.ndarray], bool]] = None
    kind = "oracle"

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("ambient dimension must be at least 1")
        if not (0.0 < self.tol < 1.0):
            raise ValueError("bisection tolerance must lie in (0, 1)")

    @property
    def dim(self) -> int:
        return self.dimension

    def contains(self, coords, slack: float = 0.0) -> bool:
        arr = self.validate(coords)
        return bool(self.member(arr))

    def contains_interior(self, coords) -> bool:
        arr = self.validate(coords)
        if self.interior is not None:
            return bool(self.interior(arr))
        if not self.member(arr):
            return False
        # Probe along coordinate directions; a sampled necessary condition.
        h = max(self.tol, 1e-7) * max(1.0, float(np.max(np.abs(arr))))
        for j in range(self.dim):
            step = np.zeros(self.dim)
            step[j] = h
            if not (self.member(arr - step) and self.member(arr + step)):
                return False
        return True

    def sup_bound(self, v, x) -> float:
        v = self.validate(v, "vector")
        x = self.validate(x, "base point")

        def inside(t: float) -> bool:
            return bool(self.member(t * x - v))

        scale = max(1.0, float(np.max(np.abs(v))) / max(float(np.max(np.abs(x))), 1e-300))
        hi = scale
        while not inside(hi):
            hi *= 4.0
            if hi > self.bracket_cap:
                return math.inf
        lo = 0.0
        if inside(lo):
            lo = -scale
            while inside(lo):
                lo *= 4.0
                if -lo > self.bracket_cap:
                    raise BoundarySearchError(
                        "membership holds arbitrarily far below; predicate is not a proper cone"
                    )
        for _ in range(200):
            if hi - lo <= self.tol * max(1.0, abs(hi), abs(lo)):
                break
            mid = 0.5 * (lo + hi)
            if inside(mid):
                hi = mid
            else:
                lo = mid
        return hi


def oracle_wrap(cone: Cone, tol: float = 1e-9) -> OracleCone:
    """Wrap a closed-form cone as a membership oracle (for cross-checking)."""
    return OracleCone(
        dimension=cone.dim,
        member=lambda c: cone.contains(c),
        tol=tol,
        interior=cone.contains_interior,
    )


_CONE_KINDS = {"orthant": Orthant, "lorentz": LorentzCone, "sympd": SymPDCone}


def cone_from_dict(data: dict) -> Cone:
    try:
        cls = _CONE_KINDS[data["kind"]]
    except KeyError as exc:
        raise ValueError(f"unknown cone kind {data.get('kind')!r}") from exc
    return cls(int(data["n"]))


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True, eq=False)
class ConePoint:
    """An interior point of a cone; coordinates are validated at construction."""

    cone: Cone
    coords: np.ndarray

    def __post_init__(self):
        arr = self.cone.validate(self.coords)
        if not self.cone.contains_interior(arr):
            raise NotInteriorError(
                f"coordinates are not strictly inside the {self.cone.kind} cone"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    def scaled(self, t: float) -> "ConePoint":
        if not t > 0.0:
            raise ValueError("scaling factor must be positive")
        return ConePoint(self.cone, t * self.coords)

    def matrix(self) -> np.ndarray:
        if not isinstance(self.cone, SymPDCone):
            raise TypeError("matrix form is only defined for sympd cone points")
        return self.cone.matrix(self.coords)

    def to_dict(self) -> dict:
        return {"cone": self.cone.to_dict(), "coords": self.coords.tolist()}

    @staticmethod
    def from_dict(data: dict) -> "ConePoint":
        return ConePoint(cone_from_dict(data["cone"]), data["coords"])


def same_cone_pair(x: ConePoint, y: ConePoint) -> Cone:
    if x.cone != y.cone:
        raise ValueError("points belong to different cones")
    return x.cone


# ---------------------------------------------------------------------------
# the classical order bounds on pairs of interior points


def contains_interior(cone: Cone, coords) -> bool:
    """Strict interior membership of raw coordinates."""
    return cone.contains_interior(cone.validate(coords))


def order_sup(x: ConePoint, y: ConePoint) -> float:
    """M(x/y) = inf { t : t*y - x in C }; +inf when the points are in different parts."""
    cone = same_cone_pair(x, y)
    return cone.sup_bound(x.coords, y.coords)


def order_inf(x: ConePoint, y: ConePoint) -> float:
    """m(x/y) = sup { t : x - t*y in C }; equals 1 / M(y/x) for interior points."""
    cone = same_cone_pair(x, y)
    value = cone.inf_bound(x.coords, y.coords)
    return max(value, 0.0) if math.isfinite(value) else 0.0


def _hilbert_gap(cone: Cone, a: np.ndarray, b: np.ndarray) -> float:
    sup_ab = cone.sup_bound(a, b)
    sup_ba = cone.sup_bound(b, a)
    if not (math.isfinite(sup_ab) and math.isfinite(sup_ba)):
        return math.inf
    return math.log(sup_ab) + math.log(sup_ba)


def sample_interior(
    cone: Cone,
    radius: float,
    base: ConePoint,
    rng=None,
    budget: int = 64,
) -> ConePoint:
    """Random interior point within projective (Hilbert) radius of ``base``.

    The sampled radius is uniform on (0, radius], so the returned points
    reach arbitrarily close to the radius sphere with positive probability.
    """
    if not radius > 0.0:
        raise ValueError("radius must be positive")
    if base.cone != cone:
        raise ValueError("base point does not belong to the given cone")
    rng = np.random.default_rng(rng)
    b = base.coords

    if isinstance(cone, Orthant):
        for _ in range(budget):
            z = rng.uniform(-1.0, 1.0, cone.dim)
            span = float(z.max() - z.min())
            if span <= 1e-12:
                continue
            rho = radius * rng.uniform() * (1.0 - 1e-12)
            p = b * np.exp(z * (rho / span))
            if _hilbert_gap(cone, p, b) <= radius:
                return ConePoint(cone, p)
        raise SamplingBudgetError("orthant sampler failed to produce a point in budget")

    norm_b = float(np.linalg.norm(b))
    for _ in range(budget):
        v = rng.standard_normal(cone.dim)
        v /= float(np.linalg.norm(v))
        target = radius * rng.uniform() * (1.0 - 1e-12)
        t_lo, t = 0.0, 0.25 * norm_b
        t_hi = None
        for _ in range(80):
            c = b + t * v
            if not cone.contains_interior(c) or _hilbert_gap(cone, c, b) >= target:
                t_hi = t
                break
            t_lo = t
            t *= 2.0
        if t_hi is None:
            continue  # this direction plateaus below the target radius
        for _ in range(90):
            mid = 0.5 * (t_lo + t_hi)
            c = b + mid * v
            if cone.contains_interior(c) and _hilbert_gap(cone, c, b) < target:
                t_lo = mid
            else:
                t_hi = mid
        c = b + t_lo * v
        achieved = _hilbert_gap(cone, c, b)
        # A direction is only good if it actually realizes the drawn radius.
        if cone.contains_interior(c) and 0.5 * target <= achieved <= radius:
            return ConePoint(cone, c)
    raise SamplingBudgetError(
        f"no interior point within radius {radius} found after {budget} directions"
    )
