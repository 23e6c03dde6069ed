"""Formal curvature tensors from the minimal polynomial and the Berger test.

Two constructions are provided.  ``r_minpoly`` differentiates the minimal
polynomial of L along a direction X, which always lands in the centralizer
algebra and satisfies the Bianchi identity.  ``r_formal`` is the pairwise
block version: for each pair of Jordan blocks inside one eigenvalue it
applies the same derivative with the pair's own nilpotency degree, which
makes the image fill the whole centralizer.  The certificate checks both
the identities and the exact rank equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .canonical import CanonicalPair
from .exactla import RatMat, minimal_polynomial
from .liealg import (
    SubspaceBasis,
    centralizer_basis,
    so_basis,
    wedge_tags,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class CurvatureMap:
    """Linear map so(g) -> gl(V) stored by its values on the wedge basis."""

    g: RatMat
    L: Optional[RatMat]
    base: SubspaceBasis
    tags: tuple  # of (i, j), i < j, aligned with base/values
    values: tuple  # of RatMat

    @property
    def n(self) -> int:
        return self.g.rows

    def value_on_wedge(self, i: int, j: int) -> RatMat:
        """Value on the basis bivector (e_i, e_j) for any i != j."""
        n = self.n
        if i == j:
            return RatMat.zeros(n, n)
        if i < j:
            return self.values[self.tags.index((i, j))]
        return -self.values[self.tags.index((j, i))]

    def apply(self, x: RatMat) -> RatMat:
        """Evaluate on an arbitrary element of so(g)."""
        from .liealg import member_coords
        coords = member_coords(x, self.base)
        if coords is None:
            raise ValueError("argument is not in so(g)")
        out = RatMat.zeros(self.n, self.n)
        for c, v in zip(coords, self.values):
            if c:
                out = out + c * v
        return out

    def is_zero_map(self) -> bool:
        return all(v.is_zero() for v in self.values)


def r_minpoly(pair: CanonicalPair, x: RatMat) -> RatMat:
    """Derivative of the minimal polynomial of L at L along direction x.

    R(X) = sum_m a_m sum_{j<m} L^{m-1-j} X L^j for p_min = sum a_m t^m.
    For X in so(g) the result is g-skew and commutes with L.
    """
    L = pair.L
    n = pair.n
    if x.shape != (n, n):
        raise ValueError("shape mismatch")
    p = minimal_polynomial(L)
    d = p.degree
    powers = [RatMat.identity(n)]
    for _ in range(d):
        powers.append(powers[-1] @ L)
    out = RatMat.zeros(n, n)
    for m in range(1, d + 1):
        a = p.coeffs[m]
        if not a:
            continue
        term = RatMat.zeros(n, n)
        for j in range(m):
            term = term + powers[m - 1 - j] @ x @ powers[j]
        out = out + a * term
    return out


def _nilpotent_block_powers(size: int, top: int) -> list:
    """Powers J^0..J^top of the upper-shift block as small matrices."""
    e = [_ZERO] * (size * size)
    for i in range(size - 1):
        e[i * size + i + 1] = _ONE
    j = RatMat._raw(size, size, e)
    out = [RatMat.identity(size)]
    for _ in range(top):
        out.append(out[-1] @ j)
    return out


def _pair_block_map(ni: int, nj: int, xij: RatMat) -> RatMat:
    """sum_s J_i^{nij-1-s} X J_j^s with nij = max(ni, nj)."""
    nij = max(ni, nj)
    pi = _nilpotent_block_powers(ni, nij - 1)
    pj = _nilpotent_block_powers(nj, nij - 1)
    out = RatMat.zeros(ni, nj)
    for s in range(nij):
        a = nij - 1 - s
        if a >= ni or s >= nj:
            continue  # the block power is zero
        out = out + pi[a] @ xij @ pj[s]
    return out


def r_hat(pair: CanonicalPair, i: int, j: int, x: RatMat) -> RatMat:
    """Curvature contribution of the block pair (i, j), i < j.

    Blocks must belong to one eigenvalue; the eigenvalue is shifted to
    nilpotent internally.  Only the (i, j) and (j, i) blocks of the output
    are nonzero, the latter forced by -g_j R_ij^T g_i.
    """
    blocks = pair.all_blocks()
    if not (0 <= i < j < len(blocks)):
        raise ValueError("need block indices i < j in range")
    ei, bi = blocks[i]
    ej, bj = blocks[j]
    if ei != ej:
        raise ValueError("blocks belong to different eigenvalues")
    n = pair.n
    if x.shape != (n, n):
        raise ValueError("shape mismatch")
    xij = RatMat._raw(bi.size, bj.size,
                      [x[bi.offset + r, bj.offset + c]
                       for r in range(bi.size) for c in range(bj.size)])
    rij = _pair_block_map(bi.size, bj.size, xij)
    gi = _sub(pair.g, bi.offset, bi.size)
    gj = _sub(pair.g, bj.offset, bj.size)
    rji = -(gj @ rij.transpose() @ gi)
    out = [[_ZERO] * n for _ in range(n)]
    for r in range(bi.size):
        for c in range(bj.size):
            out[bi.offset + r][bj.offset + c] = rij[r, c]
    for r in range(bj.size):
        for c in range(bi.size):
            out[bj.offset + r][bi.offset + c] = rji[r, c]
    return RatMat.from_rows(out)


def _sub(m: RatMat, off: int, size: int) -> RatMat:
    return RatMat._raw(size, size, [m[off + r, off + c]
                                    for r in range(size) for c in range(size)])


def r_formal(pair: CanonicalPair) -> CurvatureMap:
    """Blockwise curvature map on the wedge basis of so(g).

    Sums the pairwise contributions over all block pairs within each
    eigenvalue; cross-eigenvalue blocks of the argument are ignored, so
    the map assembles block-diagonally.
    """
    base = so_basis(pair.g)
    tags = tuple(wedge_tags(pair.n))
    blocks = pair.all_blocks()
    pairs_within = [(i, j)
                    for i in range(len(blocks))
                    for j in range(i + 1, len(blocks))
                    if blocks[i][0] == blocks[j][0]]
    values = []
    for x in base.elements:
        acc = RatMat.zeros(pair.n, pair.n)
        for i, j in pairs_within:
            acc = acc + r_hat(pair, i, j, x)
        values.append(acc)
    return CurvatureMap(pair.g, pair.L, base, tags, tuple(values))


@dataclass(frozen=True)
class BianchiReport:
    ok: bool
    witness: Optional[tuple]  # (i, j, k) with the largest violation
    max_violation: Fraction


def check_bianchi(rmap: CurvatureMap) -> BianchiReport:
    """Exhaustive first-Bianchi check over standard basis vector triples.

    Multilinearity makes basis triples sufficient; triples with repeated
    indices are included (they cost nothing and must vanish identically).
    """
    n = rmap.n
    ok = True
    worst = _ZERO
    witness = None
    cols = {}
    for (i, j), v in zip(rmap.tags, rmap.values):
        for k in range(n):
            cols[(i, j, k)] = [v[r, k] for r in range(n)]

    def col(a: int, b: int, k: int) -> list:
        if a == b:
            return [_ZERO] * n
        if a < b:
            return cols[(a, b, k)]
        return [-x for x in cols[(b, a, k)]]

    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                c1 = col(i, j, k)
                c2 = col(j, k, i)
                c3 = col(k, i, j)
                bad = _ZERO
                for a, b, c in zip(c1, c2, c3):
                    s = a + b + c
                    if s:
                        bad = max(bad, abs(s))
                if bad:
                    ok = False
                    if bad > worst:
                        worst = bad
                        witness = (i, j, k)
    return BianchiReport(ok, witness, worst)


def check_sectional(rmap: CurvatureMap, L: Optional[RatMat] = None) -> bool:
    """[R(X), L] = 0 and g-skewness of R(X) on every basis element."""
    L = L if L is not None else rmap.L
    if L is None:
        raise ValueError("no operator L available for the check")
    g = rmap.g
    for v in rmap.values:
        if not (v @ L - L @ v).is_zero():
            return False
        if not (g @ v + v.transpose() @ g).is_zero():
            return False
    return True


@dataclass(frozen=True)
class BergerCertificate:
    dim_gL: int
    image_rank: int
    bianchi_ok: bool
    containment_ok: bool
    witnesses: tuple  # of (i, j) wedge tags whose images span the image

    @property
    def passed(self) -> bool:
        return self.bianchi_ok and self.containment_ok and self.image_rank == self.dim_gL

    def to_json(self) -> dict:
        return {
            "dim_gL": self.dim_gL,
            "image_rank": self.image_rank,
            "bianchi_ok": self.bianchi_ok,
            "containment_ok": self.containment_ok,
            "witnesses": [list(t) for t in self.witnesses],
            "passed": self.passed,
        }


def berger_certificate(pair: CanonicalPair) -> BergerCertificate:
    """Certify image_rank(r_formal) == dim of the centralizer, exactly.

    Witnesses are collected greedily in lexicographic wedge order: a tag is
    kept whenever its image enlarges the span collected so far.
    """
    rmap = r_formal(pair)
    dim_gl = len(centralizer_basis(pair))
    bianchi = check_bianchi(rmap)
    containment = check_sectional(rmap)

    witnesses = []
    stored = []  # reduced row vectors with pivot bookkeeping
    for tag, v in zip(rmap.tags, rmap.values):
        vec = v.vec()
        for pivcol, bvec in stored:
            f = vec[pivcol]
            if f:
                for idx, x in enumerate(bvec):
                    if x:
                        vec[idx] -= f * x
        piv = next((idx for idx, x in enumerate(vec) if x), None)
        if piv is None:
            continue
        inv = _ONE / vec[piv]
        if inv != 1:
            vec = [x * inv if x else x for x in vec]
        stored.append((piv, vec))
        witnesses.append(tag)
    return BergerCertificate(dim_gl, len(stored), bianchi.ok, containment, tuple(witnesses))
