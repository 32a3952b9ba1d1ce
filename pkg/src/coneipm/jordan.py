"""Euclidean Jordan-algebra primitives over products of Lorentz cones.

A block ``x = (x0; xbar)`` of dimension parameter ``n`` lives in R^{n+1};
it belongs to the Lorentz cone L^n when ``||xbar|| <= x0``.  A ``n = 0``
block is a single coordinate (a non-negative scalar when in the cone).
All operations here are block-local and allocate only per-block matrices;
nothing materializes the full block-diagonal representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class StructureMismatch(ValueError):
    """Two block vectors do not share the same cone structure."""


@dataclass(frozen=True)
class ConeStructure:
    """Index structure of a product of Lorentz cones L^{n_1} x ... x L^{n_r}.

    ``dims`` holds the dimension parameters (n_1, ..., n_r); block i has
    n_i + 1 coordinates, so the total coordinate count is n + r with
    n = sum(n_i).
    """

    dims: tuple[int, ...]
    _offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ValueError("need at least one cone block")
        if any(d < 0 for d in dims):
            raise ValueError(f"negative cone dimension in {dims}")
        offsets = np.concatenate(([0], np.cumsum([d + 1 for d in dims])))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "_offsets", tuple(int(o) for o in offsets))

    @property
    def rank(self) -> int:
        """Number of cone blocks r."""
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        """Total coordinate count N = n + r."""
        return self._offsets[-1]

    @property
    def n(self) -> int:
        """Sum of the dimension parameters, N - r."""
        return self.total_dim - self.rank

    def block_slice(self, i: int) -> slice:
        return slice(self._offsets[i], self._offsets[i + 1])


@dataclass
class BlockVector:
    """A vector partitioned according to a :class:`ConeStructure`.

    ``block(i)`` is a view into ``values``; concatenating the blocks
    reproduces ``values`` exactly.  Arithmetic returns new vectors and
    never mutates the operands.
    """

    structure: ConeStructure
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.values.size != self.structure.total_dim:
            raise ValueError(
                f"expected {self.structure.total_dim} coordinates, "
                f"got {self.values.size}")

    def block(self, i: int) -> np.ndarray:
        return self.values[self.structure.block_slice(i)]

    def blocks(self):
        for i in range(self.structure.rank):
            yield self.block(i)

    def copy(self) -> "BlockVector":
        return BlockVector(self.structure, self.values.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def dot(self, other: "BlockVector") -> float:
        _check_same_structure(self, other)
        return float(self.values @ other.values)

    def __add__(self, other: "BlockVector") -> "BlockVector":
        _check_same_structure(self, other)
        return BlockVector(self.structure, self.values + other.values)

    def __sub__(self, other: "BlockVector") -> "BlockVector":
        _check_same_structure(self, other)
        return BlockVector(self.structure, self.values - other.values)

    def __mul__(self, alpha: float) -> "BlockVector":
        return BlockVector(self.structure, self.values * float(alpha))

    __rmul__ = __mul__


def _check_same_structure(x: BlockVector, s: BlockVector):
    if x.structure.dims != s.structure.dims:
        raise StructureMismatch(
            f"cone structures differ: {x.structure.dims} vs {s.structure.dims}")


def arrowhead(block: np.ndarray) -> np.ndarray:
    """Arrowhead (linear representation) matrix [[x0, xbar^T], [xbar, x0*I]]."""
    b = np.asarray(block, dtype=float).reshape(-1)
    n = b.size - 1
    out = np.eye(n + 1) * b[0]
    out[0, 1:] = b[1:]
    out[1:, 0] = b[1:]
    return out


def block_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Jordan product of two single blocks: (a^T b; a0*bbar + b0*abar)."""
    out = a[0] * b
    out[1:] += b[0] * a[1:]
    out[0] = a @ b
    return out


def jordan_product(x: BlockVector, s: BlockVector) -> BlockVector:
    """Blockwise Jordan product x o s, block i equal to Arw(x_i) s_i."""
    _check_same_structure(x, s)
    out = np.empty_like(x.values)
    for i in range(x.structure.rank):
        sl = x.structure.block_slice(i)
        out[sl] = block_product(x.values[sl], s.values[sl])
    return BlockVector(x.structure, out)


def spectral(block: np.ndarray) -> tuple[float, float]:
    """Spectral values (x0 - ||xbar||, x0 + ||xbar||) of a single block.

    The block lies in the cone iff the first value is >= 0, and in the
    interior iff it is > 0.
    """
    b = np.asarray(block, dtype=float).reshape(-1)
    w = float(np.linalg.norm(b[1:]))
    return b[0] - w, b[0] + w


def spectral_frame(block: np.ndarray):
    """Spectral decomposition (lam_min, lam_max, c1, c2) of a single block.

    Satisfies block = lam_min*c1 + lam_max*c2 with the idempotents
    c1 = (1; -u)/2, c2 = (1; u)/2 for u = xbar/||xbar|| (any unit u when
    xbar = 0).
    """
    b = np.asarray(block, dtype=float).reshape(-1)
    n = b.size - 1
    u = np.zeros(n)
    w = float(np.linalg.norm(b[1:]))
    if w > 0:
        u = b[1:] / w
    elif n > 0:
        u[0] = 1.0
    c1 = 0.5 * np.concatenate(([1.0], -u))
    c2 = 0.5 * np.concatenate(([1.0], u))
    return b[0] - w, b[0] + w, c1, c2


def quadratic_rep(block: np.ndarray) -> np.ndarray:
    """Quadratic representation Q_x = 2*Arw(x)^2 - Arw(x o x) of a block."""
    b = np.asarray(block, dtype=float).reshape(-1)
    a = arrowhead(b)
    return 2.0 * (a @ a) - arrowhead(block_product(b, b))


def identity_element(structure: ConeStructure) -> BlockVector:
    """Identity element e: every block is (1; 0, ..., 0), so e^T e = r."""
    values = np.zeros(structure.total_dim)
    for i in range(structure.rank):
        values[structure.block_slice(i).start] = 1.0
    return BlockVector(structure, values)


def min_eigenvalue(v: BlockVector) -> float:
    """Minimum spectral value over all blocks; > 0 iff v is interior."""
    worst = np.inf
    for b in v.blocks():
        lam, _ = spectral(b)
        worst = min(worst, lam)
    return float(worst)


def in_cone(v: BlockVector, strict: bool = False) -> bool:
    lam = min_eigenvalue(v)
    return lam > 0.0 if strict else lam >= 0.0


def jordan_sqrt(v: BlockVector) -> BlockVector:
    """Blockwise Jordan square root of an interior vector.

    Computed on the spectral frame as sqrt(lam_min)*c1 + sqrt(lam_max)*c2.
    """
    out = np.empty_like(v.values)
    for i in range(v.structure.rank):
        sl = v.structure.block_slice(i)
        lam1, lam2, c1, c2 = spectral_frame(v.values[sl])
        if lam1 < 0:
            raise ValueError(
                f"block {i} is outside the cone (min eigenvalue {lam1:.3e})")
        out[sl] = np.sqrt(lam1) * c1 + np.sqrt(lam2) * c2
    return BlockVector(v.structure, out)
