"""Seeded verification campaigns and the tightness sweep.

A campaign draws a reproducible batch of random configurations on a cone,
evaluates one of the inequality checks on every trial, and aggregates the
results into a report that serializes identically for identical (config,
seed) pairs.  The per-trial schema is uniform: ``lhs`` must stay below
``rhs`` plus the tolerance, and ``ratio`` is lhs/rhs.

Campaign kinds
--------------
theorem1          geodesic-averaging contraction, Thompson metric (asserted)
theorem2          same with the Hilbert metric (asserted)
busemann          midpoint inequality for straight-line midpoints (recorded)
semihyperbolic    perturbed unit-speed tracks stay within 8 (asserted)
opnorm-agreement  closed-form versus enumerated operator norms (asserted)
embedding         orthant embedding preserves all pairwise data (asserted)

Trials are evaluated in row chunks; the environment variable
CONEMETRICS_THREADS caps how many chunks run concurrently.  All random
inputs are drawn up front from the seed, so results do not depend on the
thread count.
"""

from __future__ import annotations

import datetime
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cones import Cone, ConePoint, LorentzCone, Orthant, SymPDCone, cone_from_dict, sym_to_vec
from .contraction import (
    bound_batch,
    contraction_bound,
    hilbert_opnorm_analytic,
    hilbert_opnorm_numeric,
    thompson_opnorm_analytic,
    thompson_opnorm_numeric,
)
from .embedding import embed_points, verify_embedding
from .errors import ConeGeometryError
from .geodesics import geodesic_combine_batch
from .metrics import Metric, distance_batch, hilbert_distance_batch

__all__ = [
    "CAMPAIGN_KINDS",
    "CampaignConfig",
    "CampaignReport",
    "TightnessReport",
    "run_campaign",
    "thread_count",
    "tightness_sweep",
]

CAMPAIGN_KINDS = (
    "theorem1",
    "theorem2",
    "busemann",
    "semihyperbolic",
    "opnorm-agreement",
    "embedding",
)

_DEFAULT_TOLS = {
    "theorem1": 1e-9,
    "theorem2": 1e-9,
    "busemann": 1e-9,
    "semihyperbolic": 1e-9,
    "opnorm-agreement": 1e-9,
    "embedding": 1e-8,
}

# kinds whose violations fail the campaign (and the CLI exit code)
_ASSERTED = {"theorem1", "theorem2", "semihyperbolic", "opnorm-agreement", "embedding"}


def thread_count() -> int:
    raw = os.environ.get("CONEMETRICS_THREADS", "")
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"CONEMETRICS_THREADS must be an integer, got {raw!r}") from exc
    return max(1, value)


@dataclass
class CampaignConfig:
    cone: Cone
    metric: Metric = Metric.THOMPSON
    s: float = 0.5
    R: float = 1.0
    n_samples: int = 1000
    seed: int = 0
    tol: float | None = None
    span_2d: bool = False
    include_trials: bool = True

    def __post_init__(self):
        self.metric = Metric(self.metric)
        if self.n_samples < 1:
            raise ValueError("sample count must be at least 1")
        if not 0.0 < self.s < 1.0:
            raise ValueError("exponent s must lie strictly between 0 and 1")
        if not self.R > 0.0:
            raise ValueError("radius R must be positive")

    def tolerance(self, kind: str) -> float:
        return _DEFAULT_TOLS[kind] if self.tol is None else self.tol

    def to_dict(self) -> dict:
        return {
            "cone": self.cone.to_dict(),
            "metric": self.metric.value,
            "s": self.s,
            "R": self.R,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "tol": self.tol,
            "span_2d": self.span_2d,
        }

    @staticmethod
    def from_dict(data: dict) -> "CampaignConfig":
        return CampaignConfig(
            cone=cone_from_dict(data["cone"]),
            metric=data.get("metric", "thompson"),
            s=data.get("s", 0.5),
            R=data.get("R", 1.0),
            n_samples=data.get("n_samples", 1000),
            seed=data.get("seed", 0),
            tol=data.get("tol"),
            span_2d=data.get("span_2d", False),
            include_trials=data.get("include_trials", True),
        )


@dataclass
class CampaignReport:
    kind: str
    config: dict
    aggregate: dict
    trials: list[dict] | None
    assertable: bool
    timestamp: str
    runtime_seconds: float

    @property
    def violations(self) -> int:
        return self.aggregate["violations"]

    @property
    def failed(self) -> bool:
        return self.assertable and self.violations > 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "aggregate": self.aggregate,
            "trials": self.trials,
            "assertable": self.assertable,
            "timestamp": self.timestamp,
            "runtime_seconds": self.runtime_seconds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        out = io.StringIO()
        for key in sorted(self.aggregate):
            value = self.aggregate[key]
            if isinstance(value, dict):
                value = json.dumps(value, sort_keys=True)
            out.write(f"# {key}={value!r}\n")
        out.write("index,lhs,rhs,ratio,satisfied\n")
        for idx, trial in enumerate(self.trials or []):
            out.write(
                f"{idx},{trial['lhs']!r},{trial['rhs']!r},{trial['ratio']!r},"
                f"{'true' if trial['satisfied'] else 'false'}\n"
            )
        return out.getvalue()


# ---------------------------------------------------------------------------
# batched random configurations


def _interior_cloud(cone: Cone, size: int, rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    """Batch of generic interior points, comfortably away from the boundary."""
    if isinstance(cone, Orthant):
        return np.exp(rng.uniform(-spread, spread, (size, cone.dim)))
    if isinstance(cone, LorentzCone):
        t = np.exp(rng.uniform(-spread, spread, size))
        direction = rng.standard_normal((size, cone.n))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        rho = rng.uniform(0.0, 0.9, size)
        out = np.empty((size, cone.dim))
        out[:, 0] = t
        out[:, 1:] = (t * rho)[:, None] * direction
        return out
    if isinstance(cone, SymPDCone):
        gauss = rng.standard_normal((size, cone.n, cone.n))
        q, _ = np.linalg.qr(gauss)
        eigs = np.exp(rng.uniform(-spread, spread, (size, cone.n)))
        mats = (q * eigs[:, None, :]) @ np.swapaxes(q, -1, -2)
        mats = 0.5 * (mats + np.swapaxes(mats, -1, -2))
        return sym_to_vec(mats)
    raise ConeGeometryError(f"campaign sampling is not implemented for {cone.kind} cones")


def _geodesic_alpha_beta(cone: Cone, X: np.ndarray, Y: np.ndarray):
    beta = cone.sup_bound_batch(Y, X)
    alpha = 1.0 / cone.sup_bound_batch(X, Y)
    return alpha, beta


def _ball_batch(cone: Cone, base: np.ndarray, rng: np.random.Generator, radius: float,
                metric: Metric = Metric.HILBERT) -> np.ndarray:
    """One random point per row within the given metric radius of ``base``.

    Walks a geodesic from the base toward a second random cloud, stopping
    at a radius drawn uniformly on (0, radius]; constant geodesic speed in
    both metrics makes the stopping exact.
    """
    size = base.shape[0]
    target = _interior_cloud(cone, size, rng, spread=1.0 + 0.5 * radius)
    d = distance_batch(cone, base, target, metric)
    rho = radius * rng.uniform(size=size) * (1.0 - 1e-12)
    frac = np.where(d > 1e-300, np.minimum(rho / np.maximum(d, 1e-300), 1.0), 0.0)
    alpha, beta = _geodesic_alpha_beta(cone, base, target)
    return geodesic_combine_batch(base, target, alpha, beta, frac)


def _span2_pair(cone: Cone, base: np.ndarray, rng: np.random.Generator):
    """Two extra points inside span{base row, second cloud row}, per row."""
    size = base.shape[0]
    other = _interior_cloud(cone, size, rng)
    coeffs = np.exp(rng.uniform(-1.0, 1.0, (size, 4)))
    x = coeffs[:, 0, None] * base + coeffs[:, 1, None] * other
    y = coeffs[:, 2, None] * base + coeffs[:, 3, None] * other
    return x, y


# ---------------------------------------------------------------------------
# kind runners: sample once, evaluate in chunks


def _run_contraction(config: CampaignConfig, metric: Metric, rng: np.random.Generator):
    cone = config.cone
    size = config.n_samples
    U = _interior_cloud(cone, size, rng)
    if config.span_2d:
        X, Y = _span2_pair(cone, U, rng)
    else:
        X = _ball_batch(cone, U, rng, config.R)
        Y = _ball_batch(cone, U, rng, config.R)

    def evaluate(sl: slice):
        u, x, y = U[sl], X[sl], Y[sl]
        a_x, b_x = _geodesic_alpha_beta(cone, u, x)
        a_y, b_y = _geodesic_alpha_beta(cone, u, y)
        px = geodesic_combine_batch(u, x, a_x, b_x, config.s)
        py = geodesic_combine_batch(u, y, a_y, b_y, config.s)
        lhs = distance_batch(cone, px, py, metric)
        d_xy = distance_batch(cone, x, y, metric)
        if config.span_2d:
            factor = config.s
        else:
            r_used = np.maximum(
                hilbert_distance_batch(cone, u, x), hilbert_distance_batch(cone, u, y)
            )
            factor = bound_batch(r_used, config.s, metric)
        return lhs, factor * d_xy

    witness = {"u": U, "x": X, "y": Y}
    return evaluate, size, witness


def _run_busemann(config: CampaignConfig, rng: np.random.Generator):
    cone = config.cone
    size = config.n_samples
    U = _interior_cloud(cone, size, rng)
    X = _ball_batch(cone, U, rng, config.R)
    Y = _ball_batch(cone, U, rng, config.R)

    def evaluate(sl: slice):
        u, x, y = U[sl], X[sl], Y[sl]
        a_x, b_x = _geodesic_alpha_beta(cone, u, x)
        a_y, b_y = _geodesic_alpha_beta(cone, u, y)
        mx = geodesic_combine_batch(u, x, a_x, b_x, 0.5)
        my = geodesic_combine_batch(u, y, a_y, b_y, 0.5)
        lhs = distance_batch(cone, mx, my, config.metric)
        rhs = 0.5 * distance_batch(cone, x, y, config.metric)
        return lhs, rhs

    return evaluate, size, {"u": U, "x": X, "y": Y}


_TRACK_FRACTIONS = np.linspace(0.0, 1.1, 12)


def _run_semihyperbolic(config: CampaignConfig, rng: np.random.Generator):
    cone = config.cone
    size = config.n_samples
    X = _interior_cloud(cone, size, rng)
    Y = _ball_batch(cone, X, rng, max(config.R, 2.0), config.metric)
    X2 = _ball_batch(cone, X, rng, 1.0, config.metric)
    Y2 = _ball_batch(cone, Y, rng, 1.0, config.metric)

    def evaluate(sl: slice):
        x, y, x2, y2 = X[sl], Y[sl], X2[sl], Y2[sl]
        d = distance_batch(cone, x, y, config.metric)
        d2 = distance_batch(cone, x2, y2, config.metric)
        a, b = _geodesic_alpha_beta(cone, x, y)
        a2, b2 = _geodesic_alpha_beta(cone, x2, y2)
        t_max = np.maximum(d, d2) + 0.25
        worst = np.zeros(x.shape[0])
        for frac in _TRACK_FRACTIONS:
            t = frac * t_max
            s1 = np.where(d > 1e-300, np.minimum(t / np.maximum(d, 1e-300), 1.0), 1.0)
            s2 = np.where(d2 > 1e-300, np.minimum(t / np.maximum(d2, 1e-300), 1.0), 1.0)
            z = geodesic_combine_batch(x, y, a, b, s1)
            z2 = geodesic_combine_batch(x2, y2, a2, b2, s2)
            worst = np.maximum(worst, distance_batch(cone, z, z2, config.metric))
        return worst, np.full(x.shape[0], 8.0)

    return evaluate, size, {"x": X, "y": Y, "x2": X2, "y2": Y2}


def _run_opnorm(config: CampaignConfig, rng: np.random.Generator):
    cone = config.cone
    if not isinstance(cone, Orthant):
        raise ConeGeometryError("operator-norm agreement runs on orthant cones")
    size = config.n_samples
    X = _interior_cloud(cone, size, rng, spread=1.5)
    tol = config.tolerance("opnorm-agreement")

    if config.metric is Metric.THOMPSON:
        analytic, numeric = thompson_opnorm_analytic, thompson_opnorm_numeric
    else:
        analytic, numeric = hilbert_opnorm_analytic, hilbert_opnorm_numeric

    def evaluate(sl: slice):
        rows = X[sl]
        lhs = np.array([abs(analytic(r, config.s) - numeric(r, config.s)) for r in rows])
        return lhs, np.full(rows.shape[0], tol)

    return evaluate, size, {"x": X}


def _run_embedding(config: CampaignConfig, rng: np.random.Generator):
    cone = config.cone
    size = config.n_samples
    n_points = 5
    base = _interior_cloud(cone, size, rng)
    clouds = [
        _ball_batch(cone, base, rng, config.R) if k else base.copy()
        for k in range(n_points)
    ]
    stacked = np.stack(clouds, axis=1)  # (size, n_points, dim)
    tol = config.tolerance("embedding")

    def evaluate(sl: slice):
        sets = stacked[sl]
        lhs = np.empty(sets.shape[0])
        for row, coords in enumerate(sets):
            points = [ConePoint(cone, c) for c in coords]
            report = verify_embedding(embed_points(points))
            lhs[row] = max(
                report.max_order_error,
                report.max_thompson_error,
                report.max_hilbert_error,
                report.max_normalization_error,
            )
        return lhs, np.full(sets.shape[0], tol)

    return evaluate, size, {"base": base}


def _chunks(total: int, parts: int) -> list[slice]:
    parts = min(parts, total)
    bounds = np.linspace(0, total, parts + 1, dtype=int)
    return [slice(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def run_campaign(kind: str, config: CampaignConfig) -> CampaignReport:
    if kind not in CAMPAIGN_KINDS:
        raise ValueError(f"unknown campaign kind {kind!r}; expected one of {CAMPAIGN_KINDS}")
    start = time.perf_counter()
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))

    if kind == "theorem1":
        config.metric = Metric.THOMPSON
        evaluate, size, witness = _run_contraction(config, Metric.THOMPSON, rng)
    elif kind == "theorem2":
        config.metric = Metric.HILBERT
        evaluate, size, witness = _run_contraction(config, Metric.HILBERT, rng)
    elif kind == "busemann":
        evaluate, size, witness = _run_busemann(config, rng)
    elif kind == "semihyperbolic":
        evaluate, size, witness = _run_semihyperbolic(config, rng)
    elif kind == "opnorm-agreement":
        evaluate, size, witness = _run_opnorm(config, rng)
    else:
        evaluate, size, witness = _run_embedding(config, rng)

    slices = _chunks(size, thread_count())
    if len(slices) == 1:
        results = [evaluate(slices[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(slices)) as pool:
            results = list(pool.map(evaluate, slices))
    lhs = np.concatenate([r[0] for r in results])
    rhs = np.concatenate([r[1] for r in results])

    tol = config.tolerance(kind)
    satisfied = lhs <= rhs + tol
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0.0, lhs / rhs, np.where(lhs <= tol, 0.0, np.inf))
    arg = int(np.argmax(ratio))
    aggregate = {
        "n_trials": int(size),
        "violations": int(np.sum(~satisfied)),
        "max_ratio": float(ratio[arg]),
        "max_lhs": float(lhs[arg]),
        "rhs_at_max": float(rhs[arg]),
        "argmax_index": arg,
        "witness_points": {name: arr[arg].tolist() for name, arr in witness.items()},
        "tol": tol,
    }
    trials = None
    if config.include_trials:
        trials = [
            {
                "lhs": float(l),
                "rhs": float(r),
                "ratio": float(q),
                "satisfied": bool(okay),
            }
            for l, r, q, okay in zip(lhs, rhs, ratio, satisfied)
        ]
    return CampaignReport(
        kind=kind,
        config=config.to_dict(),
        aggregate=aggregate,
        trials=trials,
        assertable=kind in _ASSERTED,
        timestamp=datetime.datetime.now(datetime.timezone.utc).isoformat(),
        runtime_seconds=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# tightness of the supremum bounds


@dataclass
class TightnessReport:
    metric: str
    R: float
    s: float
    bound: float
    achieved: float
    gap: float
    samples: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "R": self.R,
            "s": self.s,
            "bound": self.bound,
            "achieved": self.achieved,
            "gap": self.gap,
            "samples": self.samples,
        }


def tightness_sweep(metric: Metric | str, R: float, s: float, n_steps: int = 7) -> TightnessReport:
    """Drive the operator norm toward its supremum along the extremal family.

    The supremum over the radius-R ball is approached by x = (1, m, e^R)
    as the middle coordinate m climbs to e^R.  The sweep shrinks the gap
    geometrically (keeping clear of the tie threshold) and reports how
    close the closed-form norm gets to the bound.
    """
    metric = Metric(metric)
    if not R > 0.0:
        raise ValueError("radius must be positive")
    top = float(np.exp(R))
    gap_low = max(1e-8, 4e-12 * top / (top - 1.0))
    fracs = np.geomspace(1e-2, gap_low, n_steps)
    norm = thompson_opnorm_analytic if metric is Metric.THOMPSON else hilbert_opnorm_analytic
    samples = []
    achieved = 0.0
    for frac in fracs:
        x = np.array([1.0, top - frac * (top - 1.0), top])
        value = float(norm(x, s))
        samples.append({"middle_gap": float(frac * (top - 1.0)), "norm": value})
        achieved = max(achieved, value)
    bound = contraction_bound(R, s, metric)
    return TightnessReport(
        metric=metric.value,
        R=R,
        s=s,
        bound=bound,
        achieved=achieved,
        gap=(bound - achieved) / bound,
        samples=samples,
    )
