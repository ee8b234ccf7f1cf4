"""Order-preserving embedding of finite point sets into an orthant.

For n interior points of one part, each ordered pair (i, j) supplies a
boundary witness beta_ij * x_j - x_i, where beta_ij = M(x_i / x_j).  A
supporting functional of the cone at that witness, normalized to take the
value 1 at x_j, becomes one coordinate of a linear map F into the orthant
of dimension n*(n-1).  By construction every order bound, and therefore
both distances, between the sample points is preserved exactly:

    M(F x_i / F x_j) = beta_ij.

The supporting functionals are built per cone: a coordinate functional for
the orthant, the indefinite inner product with the witness for the Lorentz
cone, a null-eigenvector quadratic form for positive-definite matrices,
and a sampled linear program for membership oracles (flagged as lower
accuracy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .cones import (
    Cone,
    ConePoint,
    LorentzCone,
    OracleCone,
    Orthant,
    SymPDCone,
    sample_interior,
    sym_to_vec,
    vec_to_sym,
)
from .errors import BoundarySearchError, DifferentPartsError
from .geodesics import make_geodesic
from .metrics import hilbert_distance, thompson_distance

__all__ = [
    "ConeEmbedding",
    "EmbeddingReport",
    "TransferReport",
    "embed_points",
    "geodesic_transfer_check",
    "verify_embedding",
]


@dataclass(frozen=True, eq=False)
class ConeEmbedding:
    """A finite point set together with its orthant image.

    ``functionals`` stacks one row per ordered pair in ``pairs`` order;
    ``images[i]`` is the image of point i, strictly positive entrywise.
    ``betas`` holds the pairwise order bounds M(x_i / x_j) with ones on
    the diagonal.
    """

    cone: Cone
    points: tuple[ConePoint, ...]
    basis: np.ndarray
    betas: np.ndarray
    pairs: tuple[tuple[int, int], ...]
    functionals: np.ndarray
    images: np.ndarray
    notes: dict
    low_accuracy: bool

    @property
    def image_cone(self) -> Orthant:
        return Orthant(self.functionals.shape[0])

    def apply(self, coords) -> np.ndarray:
        return self.functionals @ self.cone.validate(coords)

    def image_point(self, i: int) -> ConePoint:
        return ConePoint(self.image_cone, self.images[i])

    def to_dict(self) -> dict:
        return {
            "cone": self.cone.to_dict(),
            "pairs": [list(p) for p in self.pairs],
            "betas": self.betas.tolist(),
            "functionals": self.functionals.tolist(),
            "images": self.images.tolist(),
            "low_accuracy": self.low_accuracy,
            "notes": self.notes,
        }


def _orthant_functional(cone: Orthant, witness, xi, xj, note):
    # Supporting coordinate: smallest index attaining the ratio maximum.
    ratios = xi / xj
    k = int(np.argmax(ratios))
    best = ratios[k]
    for idx in range(cone.dim):
        if ratios[idx] >= best * (1.0 - 1e-14):
            k = idx
            break
    f = np.zeros(cone.dim)
    f[k] = 1.0
    return f


def _lorentz_functional(cone: LorentzCone, witness, xi, xj, note):
    p = witness
    scale = max(float(np.max(np.abs(xi))), float(np.max(np.abs(xj))))
    if float(np.max(np.abs(p))) <= 1e-12 * scale:
        # Ray-aligned pair: the witness is the apex, any positive functional works.
        note.append("apex witness; used the time-coordinate functional")
        f = np.zeros(cone.dim)
        f[0] = 1.0
        return f
    f = p.copy()
    f[1:] = -f[1:]
    return f


def _sympd_functional(cone: SymPDCone, witness, xi, xj, note):
    zm = vec_to_sym(witness, cone.n)
    w, vecs = np.linalg.eigh(zm)
    scale = max(float(np.max(np.abs(w))), 1e-300)
    null_count = int(np.sum(np.abs(w) <= 1e-10 * scale))
    if null_count > 1:
        note.append(f"null space of dimension {null_count}; used the lowest eigenvector")
    v = vecs[:, 0]
    return sym_to_vec(np.outer(v, v))


def _oracle_functional(cone: OracleCone, witness, xi, xj, note, interior_samples,
                       witnesses):
    # Feasibility LP: vanish on this witness, stay nonnegative on the other
    # witnesses, and keep a maximal margin on sampled interior rays.
    note.append("oracle functional from a sampled supporting-hyperplane program")
    d = cone.dim
    rays = np.array(interior_samples)
    rays = rays / np.linalg.norm(rays, axis=1, keepdims=True)
    n_rays = rays.shape[0]
    # variables: f (d entries), margin m; maximize m
    c = np.zeros(d + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-rays, np.ones((n_rays, 1))])
    b_ub = np.zeros(n_rays)
    if witnesses:
        others = np.array(witnesses)
        a_ub = np.vstack([a_ub, np.hstack([-others, np.zeros((others.shape[0], 1))])])
        b_ub = np.concatenate([b_ub, np.zeros(others.shape[0])])
    a_eq = np.vstack([
        np.concatenate([witness, [0.0]]),
        np.concatenate([xj, [0.0]]),
    ])
    b_eq = np.array([0.0, 1.0])
    bounds = [(None, None)] * d + [(0.0, None)]
    res = scipy.optimize.linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                                 bounds=bounds, method="highs")
    if not res.success:
        raise BoundarySearchError(
            f"no supporting functional found for the oracle cone: {res.message}"
        )
    return res.x[:d]


def embed_points(points: list[ConePoint] | tuple[ConePoint, ...]) -> ConeEmbedding:
    """Build the order-preserving orthant embedding of a finite point set."""
    points = tuple(points)
    n = len(points)
    if n < 2:
        raise ValueError("an embedding needs at least two points")
    cone = points[0].cone
    if any(p.cone != cone for p in points[1:]):
        raise ValueError("all points must live on the same cone")

    betas = np.ones((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                betas[i, j] = cone.sup_bound(points[i].coords, points[j].coords)
    if not np.all(np.isfinite(betas)):
        raise DifferentPartsError("points in different parts cannot be embedded together")

    stack = np.stack([p.coords for p in points])
    u_mat, svals, vt = np.linalg.svd(stack, full_matrices=False)
    rank = int(np.sum(svals > 1e-12 * svals[0]))
    basis = vt[:rank]

    pairs = tuple((i, j) for i in range(n) for j in range(n) if i != j)
    witnesses = {
        (i, j): betas[i, j] * points[j].coords - points[i].coords for i, j in pairs
    }

    notes: dict = {}
    low_accuracy = isinstance(cone, OracleCone)
    interior_samples = None
    if low_accuracy:
        rng = np.random.default_rng(0)
        interior_samples = [p.coords for p in points]
        for p in points:
            for _ in range(40):
                interior_samples.append(sample_interior(cone, 2.0, p, rng).coords)

    rows = []
    for i, j in pairs:
        note: list[str] = []
        w = witnesses[(i, j)]
        if isinstance(cone, Orthant):
            f = _orthant_functional(cone, w, points[i].coords, points[j].coords, note)
        elif isinstance(cone, LorentzCone):
            f = _lorentz_functional(cone, w, points[i].coords, points[j].coords, note)
        elif isinstance(cone, SymPDCone):
            f = _sympd_functional(cone, w, points[i].coords, points[j].coords, note)
        elif isinstance(cone, OracleCone):
            others = [v for key, v in witnesses.items() if key != (i, j)]
            f = _oracle_functional(cone, w, points[i].coords, points[j].coords, note,
                                   interior_samples, others)
        else:
            raise TypeError(f"no supporting-functional construction for {cone.kind} cones")
        value = float(f @ points[j].coords)
        if not value > 0.0:
            raise BoundarySearchError(
                "supporting functional vanishes at the normalization point"
            )
        rows.append(f / value)
        if note:
            notes[f"{i},{j}"] = "; ".join(note)

    functionals = np.array(rows)
    images = np.array([functionals @ p.coords for p in points])
    return ConeEmbedding(
        cone=cone,
        points=points,
        basis=basis,
        betas=betas,
        pairs=pairs,
        functionals=functionals,
        images=images,
        notes=notes,
        low_accuracy=low_accuracy,
    )


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True, eq=False)
class EmbeddingReport:
    max_order_error: float
    max_thompson_error: float
    max_hilbert_error: float
    max_normalization_error: float
    max_witness_residual: float
    interior_ok: bool
    ok: bool

    def to_dict(self) -> dict:
        return {
            "max_order_error": self.max_order_error,
            "max_thompson_error": self.max_thompson_error,
            "max_hilbert_error": self.max_hilbert_error,
            "max_normalization_error": self.max_normalization_error,
            "max_witness_residual": self.max_witness_residual,
            "interior_ok": self.interior_ok,
            "ok": self.ok,
        }


def verify_embedding(emb: ConeEmbedding, tol: float = 1e-8) -> EmbeddingReport:
    """Recompute everything the embedding promises and report the worst errors.

    Checks the order bounds of the images against ``betas`` (relative), the
    induced Thompson and Hilbert distance matrices (absolute, in log
    scale), the f(x_j) = 1 normalization, the vanishing of each functional
    on its own boundary witness, and strict positivity of the images.
    """
    n = len(emb.points)
    image_cone = emb.image_cone
    max_order = 0.0
    max_dt = 0.0
    max_dh = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            m_img = float(np.max(emb.images[i] / emb.images[j]))
            m_src = emb.betas[i, j]
            max_order = max(max_order, abs(m_img - m_src) / max(1.0, m_src))
            if i < j:
                dt_src = math.log(max(emb.betas[i, j], emb.betas[j, i]))
                dh_src = math.log(emb.betas[i, j]) + math.log(emb.betas[j, i])
                pi = ConePoint(image_cone, emb.images[i])
                pj = ConePoint(image_cone, emb.images[j])
                max_dt = max(max_dt, abs(thompson_distance(pi, pj) - dt_src))
                max_dh = max(max_dh, abs(hilbert_distance(pi, pj) - dh_src))

    max_norm = 0.0
    max_residual = 0.0
    for row, (i, j) in enumerate(emb.pairs):
        f = emb.functionals[row]
        fx_j = float(f @ emb.points[j].coords)
        max_norm = max(max_norm, abs(fx_j - 1.0))
        witness = emb.betas[i, j] * emb.points[j].coords - emb.points[i].coords
        max_residual = max(max_residual, abs(float(f @ witness)) / max(abs(fx_j), 1e-300))

    interior_ok = bool(np.all(emb.images > 0.0))
    loose = 1e-4 if emb.low_accuracy else tol
    ok = (
        interior_ok
        and max_order <= loose
        and max_dt <= loose
        and max_dh <= loose
        and max_norm <= loose
        and max_residual <= max(1e-10, loose)
    )
    return EmbeddingReport(
        max_order_error=max_order,
        max_thompson_error=max_dt,
        max_hilbert_error=max_dh,
        max_normalization_error=max_norm,
        max_witness_residual=max_residual,
        interior_ok=interior_ok,
        ok=ok,
    )


@dataclass(frozen=True, eq=False)
class TransferReport:
    skipped: bool
    reason: str | None
    span_dim: int
    max_commute_residual: float
    max_thompson_shift: float
    max_hilbert_shift: float
    ok: bool

    def to_dict(self) -> dict:
        return {
            "skipped": self.skipped,
            "reason": self.reason,
            "span_dim": self.span_dim,
            "max_commute_residual": self.max_commute_residual,
            "max_thompson_shift": self.max_thompson_shift,
            "max_hilbert_shift": self.max_hilbert_shift,
            "ok": self.ok,
        }


def geodesic_transfer_check(u: ConePoint, x: ConePoint, y: ConePoint, s: float,
                            tol: float = 1e-8) -> TransferReport:
    """Check that embedding commutes with geodesic averaging.

    Embeds the five points {u, x, y, phi(s;u,x), phi(s;u,y)} into the
    20-dimensional orthant and compares F(phi(...)) with the geodesic of
    the images, plus the distances entering the contraction inequality
    before and after.  Triples whose span is below three dimensions are
    already covered by the flat two-dimensional case and are skipped with
    a notice.
    """
    stack = np.stack([u.coords, x.coords, y.coords])
    svals = np.linalg.svd(stack, compute_uv=False)
    span_dim = int(np.sum(svals > 1e-10 * svals[0]))
    if span_dim < 3:
        return TransferReport(
            skipped=True,
            reason=f"span dimension {span_dim} <= 2: flat case, nothing to transfer",
            span_dim=span_dim,
            max_commute_residual=0.0,
            max_thompson_shift=0.0,
            max_hilbert_shift=0.0,
            ok=True,
        )

    phi_x = make_geodesic(u, x).evaluate(s)
    phi_y = make_geodesic(u, y).evaluate(s)
    emb = embed_points([u, x, y, phi_x, phi_y])
    img = {name: emb.image_point(idx) for idx, name in enumerate(["u", "x", "y", "px", "py"])}

    residual = 0.0
    for target, end in (("px", "x"), ("py", "y")):
        transferred = make_geodesic(img["u"], img[end]).evaluate(s)
        diff = np.max(np.abs(transferred.coords - img[target].coords))
        residual = max(residual, float(diff / np.max(np.abs(img[target].coords))))

    dt_before = thompson_distance(phi_x, phi_y)
    dt_after = thompson_distance(img["px"], img["py"])
    dh_before = hilbert_distance(phi_x, phi_y)
    dh_after = hilbert_distance(img["px"], img["py"])
    dt_shift = max(abs(dt_after - dt_before),
                   abs(thompson_distance(img["x"], img["y"]) - thompson_distance(x, y)))
    dh_shift = max(abs(dh_after - dh_before),
                   abs(hilbert_distance(img["x"], img["y"]) - hilbert_distance(x, y)))
    ok = residual <= tol and dt_shift <= tol and dh_shift <= tol
    return TransferReport(
        skipped=False,
        reason=None,
        span_dim=span_dim,
        max_commute_residual=residual,
        max_thompson_shift=dt_shift,
        max_hilbert_shift=dh_shift,
        ok=bool(ok),
    )
