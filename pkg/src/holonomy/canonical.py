"""Canonical pairs (g, L) built from declarative Jordan block data.

A pencil spec lists real eigenvalues, each with Jordan block sizes and
signs.  The canonical form puts, for every block, an upper-shift Jordan
block (plus lambda on the diagonal) into L and a signed antidiagonal of
ones into g; blocks are concatenated diagonally.  In this basis g is
symmetric and invertible and gL is symmetric, i.e. L is g-symmetric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exactla import RatMat, rank, rat_from_str, rat_to_str

_ZERO = Fraction(0)
_ONE = Fraction(1)


class InvalidSpecError(ValueError):
    """The pencil description is malformed or inconsistent."""


class ComplexBlockError(InvalidSpecError):
    """Complex-conjugate eigenvalue blocks are not supported."""


@dataclass(frozen=True)
class BlockSpec:
    """One Jordan block: its size and the sign of its antidiagonal metric."""

    size: int
    sign: int

    def __post_init__(self) -> None:
        if self.size < 1:
            raise InvalidSpecError(f"block size must be >= 1, got {self.size}")
        if self.sign not in (1, -1):
            raise InvalidSpecError(f"block sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class EigenSpec:
    """A real eigenvalue with its blocks, sorted by size (ties: + first)."""

    lam: Fraction
    blocks: tuple

    def __post_init__(self) -> None:
        if not self.blocks:
            raise InvalidSpecError("eigenvalue needs at least one block")
        key = [(b.size, 0 if b.sign > 0 else 1) for b in self.blocks]
        if key != sorted(key):
            raise InvalidSpecError("blocks must be sorted by size, + before - on ties")

    @property
    def dim(self) -> int:
        return sum(b.size for b in self.blocks)


@dataclass(frozen=True)
class PencilSpec:
    """Full declarative description of a g-symmetric operator."""

    eigens: tuple

    def __post_init__(self) -> None:
        if not self.eigens:
            raise InvalidSpecError("spec needs at least one eigenvalue")
        lams = [e.lam for e in self.eigens]
        if len(set(lams)) != len(lams):
            raise InvalidSpecError("duplicate eigenvalues")
        if lams != sorted(lams):
            raise InvalidSpecError("eigenvalues must be sorted ascending")

    @property
    def dim(self) -> int:
        return sum(e.dim for e in self.eigens)


def make_pencil(eigens: Iterable) -> PencilSpec:
    """Build a spec from ``[(lam, [(size, sign), ...]), ...]``, normalizing order."""
    specs = []
    for lam, blocks in eigens:
        lam = lam if isinstance(lam, Fraction) else Fraction(lam)
        bs = sorted((BlockSpec(int(s), int(sg)) for s, sg in blocks),
                    key=lambda b: (b.size, 0 if b.sign > 0 else 1))
        specs.append(EigenSpec(lam, tuple(bs)))
    specs.sort(key=lambda e: e.lam)
    return PencilSpec(tuple(specs))


def pencil_from_json(doc) -> PencilSpec:
    """Parse the JSON wire format.

    ``{"eigenvalues": [{"lambda": "0", "blocks": [{"size": 2, "sign": 1}]}]}``
    with lambda a rational string and sign an integer +-1.
    """
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise InvalidSpecError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "eigenvalues" not in doc:
        raise InvalidSpecError('expected an object with an "eigenvalues" list')
    eigens = []
    for item in doc["eigenvalues"]:
        raw = str(item.get("lambda", ""))
        if any(ch in raw.lower() for ch in "ij"):
            raise ComplexBlockError("unsupported: complex block")
        try:
            lam = rat_from_str(raw)
        except ValueError as exc:
            raise InvalidSpecError(f"bad eigenvalue {raw!r}") from exc
        try:
            blocks = [(int(b["size"]), int(b["sign"])) for b in item["blocks"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpecError(f"bad block list for eigenvalue {raw!r}") from exc
        eigens.append((lam, blocks))
    return make_pencil(eigens)


def pencil_to_json(spec: PencilSpec) -> dict:
    return {
        "eigenvalues": [
            {
                "lambda": rat_to_str(e.lam),
                "blocks": [{"size": b.size, "sign": b.sign} for b in e.blocks],
            }
            for e in spec.eigens
        ]
    }


@dataclass(frozen=True)
class PlacedBlock:
    offset: int
    size: int
    sign: int


@dataclass(frozen=True)
class EigenLayout:
    lam: Fraction
    blocks: tuple  # of PlacedBlock


@dataclass(frozen=True)
class CanonicalPair:
    """Matrices (g, L) in the canonical basis plus block layout metadata."""

    g: RatMat
    L: RatMat
    layout: tuple  # of EigenLayout

    @property
    def n(self) -> int:
        return self.g.rows

    def all_blocks(self) -> list:
        """Flattened ``(eig_index, PlacedBlock)`` list in layout order."""
        out = []
        for ei, eig in enumerate(self.layout):
            out.extend((ei, b) for b in eig.blocks)
        return out


def _antidiag(size: int, sign: int) -> RatMat:
    e = [_ZERO] * (size * size)
    val = _ONE if sign > 0 else -_ONE
    for i in range(size):
        e[i * size + (size - 1 - i)] = val
    return RatMat._raw(size, size, e)


def _jordan(size: int, lam: Fraction) -> RatMat:
    e = [_ZERO] * (size * size)
    for i in range(size):
        e[i * size + i] = lam
        if i + 1 < size:
            e[i * size + i + 1] = _ONE
    return RatMat._raw(size, size, e)


def build_canonical(spec: PencilSpec) -> CanonicalPair:
    """Assemble the block-diagonal canonical matrices for a pencil spec."""
    n = spec.dim
    g = [[_ZERO] * n for _ in range(n)]
    L = [[_ZERO] * n for _ in range(n)]
    layout = []
    off = 0
    for eig in spec.eigens:
        placed = []
        for b in eig.blocks:
            gb = _antidiag(b.size, b.sign)
            lb = _jordan(b.size, eig.lam)
            for i in range(b.size):
                for j in range(b.size):
                    g[off + i][off + j] = gb[i, j]
                    L[off + i][off + j] = lb[i, j]
            placed.append(PlacedBlock(off, b.size, b.sign))
            off += b.size
        layout.append(EigenLayout(eig.lam, tuple(placed)))
    return CanonicalPair(RatMat.from_rows(g), RatMat.from_rows(L), tuple(layout))


@dataclass(frozen=True)
class PairReport:
    ok: bool
    failures: tuple  # of str


def validate_pair(g: RatMat, L: RatMat) -> PairReport:
    """Check g symmetric, g invertible, and gL symmetric; report failures."""
    if g.rows != g.cols or L.rows != L.cols or g.rows != L.rows:
        raise ValueError("g and L must be square matrices of equal size")
    failures = []
    if not g.is_symmetric():
        failures.append("g is not symmetric")
    elif rank(g) != g.rows:
        failures.append("g is degenerate")
    if not (g @ L).is_symmetric():
        failures.append("gL is not symmetric (L is not g-symmetric)")
    return PairReport(not failures, tuple(failures))


def eigen_split(pair: CanonicalPair) -> list:
    """Per-eigenvalue restrictions of the pair; their direct sum is the input."""
    out = []
    for eig in pair.layout:
        lo = eig.blocks[0].offset
        hi = eig.blocks[-1].offset + eig.blocks[-1].size
        size = hi - lo
        g = RatMat._raw(size, size, [pair.g[lo + i, lo + j]
                                     for i in range(size) for j in range(size)])
        L = RatMat._raw(size, size, [pair.L[lo + i, lo + j]
                                     for i in range(size) for j in range(size)])
        placed = tuple(PlacedBlock(b.offset - lo, b.size, b.sign) for b in eig.blocks)
        out.append(CanonicalPair(g, L, (EigenLayout(eig.lam, placed),)))
    return out


def direct_sum(pairs: Sequence[CanonicalPair]) -> CanonicalPair:
    """Reassemble per-eigenvalue pairs block-diagonally."""
    n = sum(p.n for p in pairs)
    g = [[_ZERO] * n for _ in range(n)]
    L = [[_ZERO] * n for _ in range(n)]
    layout = []
    off = 0
    for p in pairs:
        for i in range(p.n):
            for j in range(p.n):
                g[off + i][off + j] = p.g[i, j]
                L[off + i][off + j] = p.L[i, j]
        for eig in p.layout:
            placed = tuple(PlacedBlock(b.offset + off, b.size, b.sign) for b in eig.blocks)
            layout.append(EigenLayout(eig.lam, placed))
        off += p.n
    return CanonicalPair(RatMat.from_rows(g), RatMat.from_rows(L), tuple(layout))


def shift_to_nilpotent(pair: CanonicalPair) -> CanonicalPair:
    """Replace L by L - lambda*I for a single-eigenvalue pair.

    The output operator is nilpotent; g and the centralizer are unchanged.
    """
    if len(pair.layout) != 1:
        raise ValueError("shift requires a single-eigenvalue pair")
    eig = pair.layout[0]
    if eig.lam == 0:
        return pair
    n = pair.n
    shifted = pair.L - eig.lam * RatMat.identity(n)
    return CanonicalPair(pair.g, shifted, (EigenLayout(_ZERO, eig.blocks),))
