"""Quadratic metrics realizing the blockwise curvature map at the origin.

The coefficient tensor is assembled per eigenvalue from all ordered block
pairs (including a block with itself): each pair contributes
-1/2 * sum_s J_i^{nij-1-s} (x) J_j^s with nij = max(n_i, n_j), where J_i is
the pair's nilpotent part embedded on block i's index range (exponent 0
giving the block projector).  Diagonal pairs contribute nothing to the
curvature on so(g) but make the equal-size case agree with the plain
minimal-polynomial tensor.  Cross-eigenvalue coefficients are zero, so the
metric is a product across eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .berger import CurvatureMap, r_formal
from .canonical import CanonicalPair
from .exactla import RatMat, inverse, rank, rat_from_str, rat_to_str
from .liealg import so_basis, wedge_tags

_ZERO = Fraction(0)
_ONE = Fraction(1)
_HALF = Fraction(1, 2)


class RealizationError(RuntimeError):
    """Internal consistency failure while building or checking a metric."""


@dataclass(frozen=True)
class BTensor:
    """Curvature coefficient tensor as a sum of factor pairs.

    ``terms`` is a list of (C, D) matrices; the rank-4 components are
    B[a][b][j][q] = sum_t C_t[a, j] * D_t[b, q] and the associated linear
    map is B(X) = sum_t C_t X D_t.  ``provenance`` records the ordered
    block pair each term came from.
    """

    n: int
    terms: tuple      # of (RatMat, RatMat)
    provenance: tuple  # of (i, j) global block indices, aligned with terms

    def component(self, a: int, b: int, j: int, q: int) -> Fraction:
        acc = _ZERO
        for c, d in self.terms:
            ca = c[a, j]
            if ca:
                db = d[b, q]
                if db:
                    acc += ca * db
        return acc

    def components(self) -> list:
        """Materialized rank-4 array B[a][b][j][q] (n^4 rationals)."""
        n = self.n
        out = [[[[_ZERO] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for c, d in self.terms:
            cnz = [(i, j, c[i, j]) for i in range(n) for j in range(n) if c[i, j]]
            dnz = [(i, j, d[i, j]) for i in range(n) for j in range(n) if d[i, j]]
            for a, j, cv in cnz:
                row = out[a]
                for b, q, dv in dnz:
                    row[b][j][q] += cv * dv
        return out

    def apply(self, x: RatMat) -> RatMat:
        """B(X) = sum_t C_t X D_t."""
        out = RatMat.zeros(self.n, self.n)
        for c, d in self.terms:
            out = out + c @ x @ d
        return out


def _embedded_block_powers(pair: CanonicalPair, offset: int, size: int, top: int) -> list:
    """Powers of the block's nilpotent part as full-size matrices.

    Power 0 is the projector onto the block's index range.
    """
    n = pair.n
    out = []
    for a in range(top + 1):
        e = [_ZERO] * (n * n)
        if a < size:
            for r in range(size - a):
                e[(offset + r) * n + (offset + r + a)] = _ONE
        out.append(RatMat._raw(n, n, e))
    return out


def build_B(pair: CanonicalPair) -> BTensor:
    """Assemble the coefficient tensor from all ordered block pairs."""
    blocks = pair.all_blocks()
    terms = []
    prov = []
    for i, (ei, bi) in enumerate(blocks):
        for j, (ej, bj) in enumerate(blocks):
            if ei != ej:
                continue
            nij = max(bi.size, bj.size)
            pi = _embedded_block_powers(pair, bi.offset, bi.size, nij - 1)
            pj = _embedded_block_powers(pair, bj.offset, bj.size, nij - 1)
            for s in range(nij):
                a = nij - 1 - s
                if a >= bi.size or s >= bj.size:
                    continue
                terms.append((-_HALF * pi[a], pj[s]))
                prov.append((i, j))
    return BTensor(pair.n, tuple(terms), tuple(prov))


@dataclass(frozen=True)
class QuadraticMetric:
    """g(x) = g0 + B(x, x) with a constant symmetric rank-4 coefficient tensor.

    ``lowered[i][j][p][q]`` is symmetric in (i, j) and in (p, q); the
    metric value at x adds lowered[i][j][p][q] x^p x^q to g0[i][j].
    """

    g0: RatMat
    lowered: tuple  # nested tuples, n^4 rationals
    sym_noop: bool = True

    @property
    def n(self) -> int:
        return self.g0.rows


def lower_B(b: BTensor, g0: RatMat) -> QuadraticMetric:
    """Lower both upper indices with g0 and symmetrize the point indices.

    Each term becomes (g0 C) (x) (g0 D); for tensors built from block
    powers both factors are symmetric matrices, so the explicit (p, q)
    symmetrization is a recorded no-op.
    """
    n = b.n
    if g0.shape != (n, n):
        raise ValueError("shape mismatch")
    low = [[[[_ZERO] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for c, d in b.terms:
        gc = g0 @ c
        gd = g0 @ d
        cnz = [(i, j, gc[i, j]) for i in range(n) for j in range(n) if gc[i, j]]
        dnz = [(p, q, gd[p, q]) for p in range(n) for q in range(n) if gd[p, q]]
        for i, j, cv in cnz:
            li = low[i]
            for p, q, dv in dnz:
                li[j][p][q] += cv * dv
    # enforce the (p, q) symmetry, recording whether anything changed
    noop = True
    for i in range(n):
        for j in range(n):
            lij = low[i][j]
            for p in range(n):
                for q in range(p + 1, n):
                    a, bq = lij[p][q], lij[q][p]
                    if a != bq:
                        noop = False
                        avg = (a + bq) * _HALF
                        lij[p][q] = avg
                        lij[q][p] = avg
    for i in range(n):
        for j in range(i + 1, n):
            if low[i][j] != low[j][i]:
                raise RealizationError("lowered tensor not symmetric in (i, j)")
    frozen = tuple(tuple(tuple(tuple(r) for r in pj) for pj in li) for li in low)
    return QuadraticMetric(g0, frozen, noop)


def metric_at(qm: QuadraticMetric, x: Sequence) -> RatMat:
    """Exact metric value at a rational point."""
    n = qm.n
    xf = [v if isinstance(v, Fraction) else Fraction(v) for v in x]
    if len(xf) != n:
        raise ValueError("point has wrong dimension")
    nz = [(p, v) for p, v in enumerate(xf) if v]
    e = []
    for i in range(n):
        for j in range(n):
            acc = qm.g0[i, j]
            lij = qm.lowered[i][j]
            for p, xp in nz:
                row = lij[p]
                for q, xq in nz:
                    c = row[q]
                    if c:
                        acc += c * xp * xq
            e.append(acc)
    return RatMat._raw(n, n, e)


def metric_invertible_at(qm: QuadraticMetric, x: Sequence) -> bool:
    return rank(metric_at(qm, x)) == qm.n


def validity_radius(qm: QuadraticMetric) -> float:
    """Crude sup-norm radius inside which g(x) is guaranteed invertible.

    Uses |g(x) - g0|_inf <= r^2 * max_i sum_jpq |B_ijpq| and the bound
    |g0^{-1}|_inf * |delta|_inf < 1.
    """
    n = qm.n
    ginv = inverse(qm.g0)
    ginv_norm = max(sum(abs(ginv[i, j]) for j in range(n)) for i in range(n))
    bnorm = max(
        sum(abs(qm.lowered[i][j][p][q]) for j in range(n) for p in range(n) for q in range(n))
        for i in range(n)
    )
    if bnorm == 0:
        return float("inf")
    return float(1 / (ginv_norm * bnorm)) ** 0.5


def metric_to_json(qm: QuadraticMetric) -> dict:
    n = qm.n
    return {
        "g0": [[rat_to_str(qm.g0[i, j]) for j in range(n)] for i in range(n)],
        "B_lowered": [[[[rat_to_str(qm.lowered[i][j][p][q]) for q in range(n)]
                        for p in range(n)] for j in range(n)] for i in range(n)],
    }


def metric_from_json(doc: dict) -> QuadraticMetric:
    g0 = RatMat.from_rows([[rat_from_str(v) for v in row] for row in doc["g0"]])
    low = tuple(
        tuple(tuple(tuple(rat_from_str(v) for v in pr) for pr in jr) for jr in ir)
        for ir in doc["B_lowered"]
    )
    return QuadraticMetric(g0, low)


def check_nablaL(qm: QuadraticMetric, L: RatMat) -> bool:
    """Coefficient-level covariant-constancy condition, all index tuples.

    (B_{ip,bq} - B_{ib,pq}) L^b_k == (B_{bi,kq} - B_{ik,bq}) L^b_p
    summed over b, for every (i, p, q, k).
    """
    n = qm.n
    low = qm.lowered
    lnz = [[(b, L[b, c]) for b in range(n) if L[b, c]] for c in range(n)]
    for i in range(n):
        for p in range(n):
            for q in range(n):
                for k in range(n):
                    lhs = _ZERO
                    for b, lv in lnz[k]:
                        t = low[i][p][b][q] - low[i][b][p][q]
                        if t:
                            lhs += t * lv
                    rhs = _ZERO
                    for b, lv in lnz[p]:
                        t = low[b][i][k][q] - low[i][k][b][q]
                        if t:
                            rhs += t * lv
                    if lhs != rhs:
                        return False
    return True


def check_gsym(qm: QuadraticMetric, L: RatMat) -> bool:
    """L stays g(x)-symmetric for all x:  B_{ij,pq} L^i_l == B_{il,pq} L^i_j."""
    n = qm.n
    low = qm.lowered
    lnz = [[(i, L[i, c]) for i in range(n) if L[i, c]] for c in range(n)]
    for j in range(n):
        for l in range(n):
            for p in range(n):
                for q in range(n):
                    lhs = _ZERO
                    for i, lv in lnz[l]:
                        t = low[i][j][p][q]
                        if t:
                            lhs += t * lv
                    rhs = _ZERO
                    for i, lv in lnz[j]:
                        t = low[i][l][p][q]
                        if t:
                            rhs += t * lv
                    if lhs != rhs:
                        return False
    return True


def riemann_at_origin(qm: QuadraticMetric) -> CurvatureMap:
    """Curvature operator of the metric at x = 0, via two exact routes.

    Route one contracts the lowered tensor directly:
        R^i_{k ab} = g^{is} (B_{bs,ak} + B_{ak,bs} - B_{bk,as} - B_{as,bk}).
    Route two assembles first derivatives of the Christoffel symbols at 0
    (the symbols vanish there, so the quadratic terms drop):
        R^i_{k ab} = d_a Gamma^i_{bk} - d_b Gamma^i_{ak}.
    Both routes must agree entry for entry; a mismatch raises.
    """
    n = qm.n
    low = qm.lowered
    ginv = inverse(qm.g0)
    ginv_nz = [[(s, ginv[i, s]) for s in range(n) if ginv[i, s]] for i in range(n)]

    def route_direct(a: int, b: int) -> RatMat:
        e = []
        for i in range(n):
            row = []
            for k in range(n):
                acc = _ZERO
                for s, gv in ginv_nz[i]:
                    t = low[b][s][a][k] + low[a][k][b][s] - low[b][k][a][s] - low[a][s][b][k]
                    if t:
                        acc += gv * t
                row.append(acc)
            e.extend(row)
        return RatMat._raw(n, n, e)

    # dGamma[a][i][b][k] = d_a Gamma^i_{bk} at 0
    def dgamma(a: int, i: int, b: int, k: int) -> Fraction:
        acc = _ZERO
        for s, gv in ginv_nz[i]:
            t = low[s][k][b][a] + low[s][b][k][a] - low[b][k][s][a]
            if t:
                acc += gv * t
        return acc

    def route_christoffel(a: int, b: int) -> RatMat:
        e = []
        for i in range(n):
            for k in range(n):
                e.append(dgamma(a, i, b, k) - dgamma(b, i, a, k))
        return RatMat._raw(n, n, e)

    base = so_basis(qm.g0)
    tags = tuple(wedge_tags(n))
    values = []
    for a, b in tags:
        direct = route_direct(a, b)
        via_gamma = route_christoffel(a, b)
        if direct != via_gamma:
            raise RealizationError(
                f"curvature routes disagree on wedge ({a}, {b})")
        values.append(direct)
    return CurvatureMap(qm.g0, None, base, tags, tuple(values))


@dataclass(frozen=True)
class RealizationReport:
    sym_noop: bool
    nablaL_ok: bool
    gsym_ok: bool
    routes_agree: bool
    matches_formal: bool

    @property
    def ok(self) -> bool:
        return self.nablaL_ok and self.gsym_ok and self.routes_agree and self.matches_formal

    def to_json(self) -> dict:
        return {
            "sym_noop": self.sym_noop,
            "nablaL_ok": self.nablaL_ok,
            "gsym_ok": self.gsym_ok,
            "routes_agree": self.routes_agree,
            "matches_formal": self.matches_formal,
            "passed": self.ok,
        }


def verify_realization(pair: CanonicalPair):
    """Build the metric and run every exact realization check.

    Returns ``(report, qm, rmap)`` so callers can reuse the metric and the
    certified curvature map (the probe consumes both).
    """
    b = build_B(pair)
    qm = lower_B(b, pair.g)
    nabla_ok = check_nablaL(qm, pair.L)
    gsym_ok = check_gsym(qm, pair.L)
    routes_agree = True
    matches = False
    rmap = None
    try:
        rmap = riemann_at_origin(qm)
    except RealizationError:
        routes_agree = False
    if rmap is not None:
        formal = r_formal(pair)
        matches = all(u == v for u, v in zip(rmap.values, formal.values))
    report = RealizationReport(qm.sym_noop, nabla_ok, gsym_ok, routes_agree, matches)
    return report, qm, rmap
