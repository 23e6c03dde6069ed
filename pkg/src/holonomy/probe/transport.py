"""Loop parallel transport and holonomy span estimation.

All loops are based at the origin: a square with an off-origin corner is
reached through a straight connecting segment and closed the same way, so
every transport matrix is an honest holonomy element at 0 and its
logarithm can be compared against the centralizer algebra there.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..canonical import CanonicalPair
from ..exactla import RatMat
from ..liealg import centralizer_basis
from ..realize import QuadraticMetric
from . import kernels

# Frobenius norms below this are treated as a zero logarithm sample.
_NEGLIGIBLE = 1e-9
# Step length targets: loop edges are integrated finely, connecting tails
# (short smooth segments) may be coarser.
_TAIL_STEP = 1e-3


class SingularMetricError(RuntimeError):
    """The metric degenerates somewhere on the requested path."""


@dataclass(frozen=True)
class LoopSpec:
    """Axis-aligned square loop: corner basepoint, coordinate plane, side."""

    basepoint: tuple
    plane: tuple
    side: float
    steps: int  # RK4 steps per square edge

    def __post_init__(self) -> None:
        a, b = self.plane
        if a == b or a < 0 or b < 0:
            raise ValueError("plane must be two distinct nonnegative indices")
        if not (self.side > 0):
            raise ValueError("side must be positive")
        if self.steps < 16:
            raise ValueError("need at least 16 steps per edge")
        object.__setattr__(self, "basepoint", tuple(float(v) for v in self.basepoint))


@dataclass(frozen=True)
class HolonomySample:
    transport: np.ndarray
    log_approx: np.ndarray
    membership_residual: float
    metric_drift: float
    loop: LoopSpec


class FloatMetric:
    """Float64 view of a quadratic metric, converted once per probe run."""

    __slots__ = ("g0", "B", "n", "det_g0")

    def __init__(self, g0: np.ndarray, B: np.ndarray) -> None:
        self.g0 = np.ascontiguousarray(g0, dtype=np.float64)
        self.B = np.ascontiguousarray(B, dtype=np.float64)
        self.n = self.g0.shape[0]
        self.det_g0 = float(np.linalg.det(self.g0))

    @classmethod
    def from_exact(cls, qm: QuadraticMetric) -> "FloatMetric":
        n = qm.n
        g0 = np.array(qm.g0.to_float_rows())
        b = np.empty((n, n, n, n))
        for i in range(n):
            for j in range(n):
                lij = qm.lowered[i][j]
                for p in range(n):
                    row = lij[p]
                    for q in range(n):
                        b[i, j, p, q] = float(row[q])
        return cls(g0, b)


def _as_float_metric(qm) -> FloatMetric:
    if isinstance(qm, FloatMetric):
        return qm
    return FloatMetric.from_exact(qm)


def metric_value(qm, x) -> np.ndarray:
    fm = _as_float_metric(qm)
    return kernels.metric_value_numpy(fm.g0, fm.B, np.asarray(x, dtype=np.float64))


def christoffel(qm, x) -> np.ndarray:
    """Levi-Civita symbols gamma[k, i, j] at a float point; gamma(0) = 0."""
    fm = _as_float_metric(qm)
    xv = np.asarray(x, dtype=np.float64)
    gx = kernels.metric_value_numpy(fm.g0, fm.B, xv)
    if abs(np.linalg.det(gx)) < 1e-12 * abs(fm.det_g0):
        raise SingularMetricError(f"metric is singular near {xv.tolist()}")
    return kernels.christoffel_floats(fm.g0, fm.B, xv)


def nablaL_residual(qm, L, x) -> float:
    """Max-norm of the covariant derivative of the constant operator L at x."""
    fm = _as_float_metric(qm)
    lf = np.array(L.to_float_rows()) if isinstance(L, RatMat) else np.asarray(L, float)
    gamma = christoffel(qm, x)
    worst = 0.0
    for k in range(fm.n):
        mk = gamma[:, k, :]
        worst = max(worst, float(np.max(np.abs(mk @ lf - lf @ mk))))
    return worst


def _loop_polyline(loop: LoopSpec, n: int):
    """Vertices and per-segment step counts for the origin-based lasso."""
    a, b = loop.plane
    if a >= n or b >= n:
        raise ValueError("plane indices exceed the dimension")
    bp = np.zeros(n)
    bp[: len(loop.basepoint)] = loop.basepoint
    ea = np.zeros(n)
    eb = np.zeros(n)
    ea[a] = loop.side
    eb[b] = loop.side
    corners = [bp, bp + ea, bp + ea + eb, bp + eb, bp]
    segs = [loop.steps] * 4
    if np.any(bp != 0.0):
        tail = max(16, int(math.ceil(float(np.linalg.norm(bp)) / _TAIL_STEP)))
        verts = [np.zeros(n)] + corners + [np.zeros(n)]
        steps = [tail] + segs + [tail]
    else:
        verts = corners
        steps = segs
    return np.stack(verts), np.array(steps, dtype=np.int64)


def _check_path_regular(fm: FloatMetric, verts: np.ndarray) -> None:
    # Best-effort scan: a degeneracy is certain when the determinant dies or
    # changes sign at a sampled point; the integrator's finiteness post-check
    # covers crossings the sampling misses.
    for e in range(verts.shape[0] - 1):
        for t in np.linspace(0.0, 1.0, 33):
            x = (1.0 - t) * verts[e] + t * verts[e + 1]
            gx = kernels.metric_value_numpy(fm.g0, fm.B, x)
            det = np.linalg.det(gx)
            if abs(det) < 1e-12 * abs(fm.det_g0) or det * fm.det_g0 < 0.0:
                raise SingularMetricError(
                    f"metric is singular on the loop near {x.tolist()}")


def membership_residual(psi: np.ndarray, gl_floats: Sequence[np.ndarray]) -> float:
    """Relative Frobenius distance of psi to the span of the basis."""
    norm = float(np.linalg.norm(psi))
    if norm < _NEGLIGIBLE:
        return 0.0
    if not len(gl_floats):
        return 1.0
    a = np.stack([m.ravel() for m in gl_floats], axis=1)
    coef, *_ = np.linalg.lstsq(a, psi.ravel(), rcond=None)
    return float(np.linalg.norm(psi.ravel() - a @ coef)) / norm


def parallel_transport(qm, loop: LoopSpec, gl_basis: Optional[Sequence[np.ndarray]] = None) -> HolonomySample:
    """Integrate transport around one origin-based square loop.

    dP/dt = -Gamma(x(t))[x'(t)] P with classical fixed-step RK4; the square
    is traversed corner -> +e_a -> +e_b -> -e_a -> -e_b.  The logarithm is
    the second-order truncation (A - I) - (A - I)^2 / 2, adequate because
    |A - I| = O(side^2).  The membership residual is NaN when no basis is
    supplied.
    """
    fm = _as_float_metric(qm)
    verts, steps = _loop_polyline(loop, fm.n)
    _check_path_regular(fm, verts)
    a = kernels.transport_polyline(fm.g0, fm.B, verts, steps)
    if not np.isfinite(a).all():
        raise SingularMetricError("transport diverged; metric degenerates on the loop")
    e = a - np.eye(fm.n)
    psi = e - 0.5 * (e @ e)
    residual = float("nan") if gl_basis is None else membership_residual(psi, gl_basis)
    drift = float(np.linalg.norm(fm.g0 - a.T @ fm.g0 @ a))
    return HolonomySample(a, psi, residual, drift, loop)


def standard_loops(n: int, seed: int = 0, side: float = 1e-2, steps: Optional[int] = None,
                   extra_basepoints: int = 2, basepoint_norm: float = 0.05) -> list:
    """Squares in every coordinate plane at the origin plus seeded basepoints."""
    if steps is None:
        steps = max(16, int(math.ceil(side / 1e-4)))
    rng = np.random.default_rng(seed)
    basepoints = [tuple(0.0 for _ in range(n))]
    for _ in range(extra_basepoints):
        basepoints.append(tuple(rng.uniform(-basepoint_norm, basepoint_norm, n).tolist()))
    loops = []
    for a in range(n):
        for b in range(a + 1, n):
            for bp in basepoints:
                loops.append(LoopSpec(bp, (a, b), side, steps))
    return loops


def _worker_count(n_tasks: int) -> int:
    raw = os.environ.get("HOLONOMY_THREADS", "1").strip()
    try:
        value = int(raw)
    except ValueError:
        value = 1
    if value == 0:
        value = os.cpu_count() or 1
    return max(1, min(value, n_tasks))


@dataclass(frozen=True)
class SpanReport:
    span_rank: int
    dim_gL: int
    max_membership_residual: float
    singular_values: tuple
    sv_gap: float
    backend: str
    samples: tuple  # of HolonomySample
    passed: bool

    def to_json(self) -> dict:
        return {
            "span_rank": self.span_rank,
            "dim_gL": self.dim_gL,
            "max_membership_residual": self.max_membership_residual,
            "sv_gap": self.sv_gap,
            "backend": self.backend,
            "samples": [
                {
                    "plane": list(s.loop.plane),
                    "side": s.loop.side,
                    "basepoint": list(s.loop.basepoint),
                    "residual": s.membership_residual,
                }
                for s in self.samples
            ],
            "passed": self.passed,
        }


def holonomy_span(qm, pair: CanonicalPair, loops: Sequence[LoopSpec],
                  membership_tol: float = 1e-6, rank_threshold: float = 1e-8) -> SpanReport:
    """Transport every loop, then rank the logarithm samples against dim g_L.

    The numerical rank uses singular values relative to the largest;
    near-zero samples (flat directions) are excluded from the stack.  The
    report passes iff the rank equals the centralizer dimension and every
    membership residual stays below the tolerance.
    """
    fm = _as_float_metric(qm)
    gl = [np.array(m.to_float_rows()) for m in centralizer_basis(pair)]
    dim = len(gl)

    workers = _worker_count(len(loops))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda lp: parallel_transport(fm, lp, gl), loops))
    else:
        samples = [parallel_transport(fm, lp, gl) for lp in loops]

    rows = [s.log_approx.ravel() for s in samples
            if float(np.linalg.norm(s.log_approx)) >= _NEGLIGIBLE]
    if rows:
        sv = np.linalg.svd(np.stack(rows), compute_uv=False)
        sv = sv[sv > 0.0]
        rank = int(np.sum(sv > rank_threshold * sv[0])) if sv.size else 0
    else:
        sv = np.array([])
        rank = 0
    retained = sv[:dim]
    discarded = sv[dim:]
    if discarded.size == 0 or discarded[0] == 0.0:
        gap = float("inf")
    elif retained.size < dim:
        gap = 0.0
    else:
        gap = float(retained[-1] / discarded[0])
    max_res = max((s.membership_residual for s in samples), default=0.0)
    passed = rank == dim and max_res < membership_tol
    return SpanReport(rank, dim, float(max_res), tuple(float(v) for v in sv),
                      gap, kernels.backend(), tuple(samples), passed)
