"""Shared fixtures and independent oracles for the test suite.

The bisection helpers here deliberately avoid the library's own search
code so closed-form results are checked against a second, dumber route.
"""

import numpy as np
import pytest

from conemetrics import ConePoint, LorentzCone, Orthant, SymPDCone, sym_to_vec


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_point(cone, rng, spread=1.0) -> ConePoint:
    """A generic interior point, independent of the library's samplers."""
    if isinstance(cone, Orthant):
        return cone.point(np.exp(rng.uniform(-spread, spread, cone.dim)))
    if isinstance(cone, LorentzCone):
        t = float(np.exp(rng.uniform(-spread, spread)))
        direction = rng.standard_normal(cone.n)
        direction /= np.linalg.norm(direction)
        rho = rng.uniform(0.0, 0.85)
        return cone.point(np.concatenate([[t], t * rho * direction]))
    if isinstance(cone, SymPDCone):
        gauss = rng.standard_normal((cone.n, cone.n))
        q, _ = np.linalg.qr(gauss)
        eigs = np.exp(rng.uniform(-spread, spread, cone.n))
        return cone.point(sym_to_vec((q * eigs) @ q.T))
    raise TypeError(f"no sampler for {cone.kind}")


def random_points(cone, count, rng, spread=1.0):
    return [random_point(cone, rng, spread) for _ in range(count)]


def smooth_orthant_coords(n, count, rng, spread=1.5, margin=1e-4):
    """Orthant coordinate batch whose extreme coordinates keep a clear gap.

    Needed wherever finite differences must not cross a sorting boundary.
    """
    rows = []
    while len(rows) < count:
        x = np.exp(rng.uniform(-spread, spread, n))
        p = np.sort(x)
        if n == 1 or (p[1] - p[0] > margin * p[-1] and p[-1] - p[-2] > margin * p[-1]):
            rows.append(x)
    return np.array(rows)


def spd_matrix_cloud(n, size, rng, spread=1.0):
    """Batch of random positive-definite matrices, stacked (size, n, n)."""
    gauss = rng.standard_normal((size, n, n))
    q, _ = np.linalg.qr(gauss)
    eigs = np.exp(rng.uniform(-spread, spread, (size, n)))
    mats = (q * eigs[:, None, :]) @ np.swapaxes(q, -1, -2)
    return 0.5 * (mats + np.swapaxes(mats, -1, -2))


def bisect_sup_bound(member, v, x, lo=-1e6, hi=1e6, iters=200):
    """Brute-force inf { t : member(t*x - v) } by bisection.

    ``member`` is a closed-membership predicate; the set of admissible t
    is an upward-closed ray, so plain bisection applies.
    """
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    assert member(hi * x - v), "upper bracket must be admissible"
    assert not member(lo * x - v), "lower bracket must be inadmissible"
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if member(mid * x - v):
            hi = mid
        else:
            lo = mid
    return hi


def bisect_thompson_norm(member, x, v, hi=1e6, iters=200):
    """Brute-force inf { a > 0 : -a*x <= v <= a*x } by bisection."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)

    def admissible(a):
        return member(a * x - v) and member(a * x + v)

    lo = 0.0
    assert admissible(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    return hi


CLOSED_FORM_CONES = (Orthant(3), LorentzCone(2), SymPDCone(2))
