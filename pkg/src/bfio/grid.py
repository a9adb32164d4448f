"""Grids, the polar frequency map, quadtree boxes and Chebyshev/Lagrange tools.

All q^2 vectors are ordered row-major: the first coordinate index is slow,
the second fast.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True, order=True)
class BoxId:
    """Node of the complete quadtree over [0,1]^2."""

    level: int
    i1: int
    i2: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"negative level {self.level}")
        n = 1 << self.level
        if not (0 <= self.i1 < n and 0 <= self.i2 < n):
            raise ValueError(f"box index ({self.i1}, {self.i2}) outside level {self.level}")

    @property
    def width(self) -> float:
        return 2.0 ** (-self.level)

    @property
    def center(self) -> np.ndarray:
        w = self.width
        return np.array([(self.i1 + 0.5) * w, (self.i2 + 0.5) * w])

    @property
    def flat(self) -> int:
        """Row-major index of the box within its level."""
        return self.i1 * (1 << self.level) + self.i2

    def children(self) -> list[BoxId]:
        return children(self)

    def parent(self) -> BoxId:
        return parent(self)

    def contains(self, point) -> bool:
        return box_of(point, self.level) == self


def children(b: BoxId) -> list[BoxId]:
    """The four children of ``b``, ordered (c1, c2) row-major."""
    return [BoxId(b.level + 1, 2 * b.i1 + c1, 2 * b.i2 + c2) for c1 in (0, 1) for c2 in (0, 1)]


def parent(b: BoxId) -> BoxId:
    if b.level == 0:
        raise ValueError("the root box has no parent")
    return BoxId(b.level - 1, b.i1 // 2, b.i2 // 2)


def box_index(coord, level: int) -> np.ndarray:
    """Per-coordinate box index at ``level``; the value 1.0 lands in the last box."""
    n = 1 << level
    idx = np.floor(np.asarray(coord, dtype=float) * n).astype(np.int64)
    return np.clip(idx, 0, n - 1)


def box_of(point, level: int) -> BoxId:
    point = np.asarray(point, dtype=float)
    if point.shape != (2,):
        raise ValueError("point must be a 2-vector")
    if np.any(point < 0.0) or np.any(point > 1.0):
        raise ValueError(f"point {point} outside the unit square")
    i1, i2 = box_index(point, level)
    return BoxId(level, int(i1), int(i2))


# ----------------------------------------------------------------------------
# Spatial and frequency grids

def freq_indices(N: int) -> np.ndarray:
    """All k in the frequency lattice as an (N*N, 2) integer array.

    Ordering matches the vector file format: k1 slow, k2 fast, both running
    from -N/2 to N/2 - 1.
    """
    r = np.arange(-N // 2, N // 2)
    k1, k2 = np.meshgrid(r, r, indexing="ij")
    return np.stack([k1.ravel(), k2.ravel()], axis=-1)


def spatial_points(N: int) -> np.ndarray:
    """All x = (i1/N, i2/N) as an (N*N, 2) array, i1 slow."""
    r = np.arange(N) / N
    x1, x2 = np.meshgrid(r, r, indexing="ij")
    return np.stack([x1.ravel(), x2.ravel()], axis=-1)


def polar_map(k, N: int) -> np.ndarray:
    """Map frequencies to scaled polar coordinates p = (p1, p2) in [0,1]^2.

    Accepts a single k or an (..., 2) array. The zero frequency maps to (0, 0).
    """
    k = np.asarray(k, dtype=float)
    # the lattice corner can round to 1 + ulp
    p1 = np.minimum(math.sqrt(2.0) * np.hypot(k[..., 0], k[..., 1]) / N, 1.0)
    p2 = np.arctan2(k[..., 1], k[..., 0]) / (2.0 * np.pi)
    p2 = np.where(p2 < 0.0, p2 + 1.0, p2)
    # -0.0 from atan2 would wrap to 1.0
    p2 = np.where(p2 >= 1.0, 0.0, p2)
    return np.stack([p1, p2], axis=-1)


# ----------------------------------------------------------------------------
# Chebyshev grids and Lagrange weights

def cheb_nodes_1d(q: int) -> np.ndarray:
    """Chebyshev points z_i = cos(i*pi/(q-1))/2 on [-1/2, 1/2], descending."""
    if q < 2:
        raise ValueError(f"q must be at least 2, got {q}")
    z = 0.5 * np.cos(np.arange(q) * np.pi / (q - 1))
    # exact endpoints and symmetric midpoint
    z[0], z[-1] = 0.5, -0.5
    if q % 2 == 1:
        z[q // 2] = 0.0
    return z


@dataclass(frozen=True)
class ChebGrid:
    q: int
    center: np.ndarray
    width: float

    @property
    def nodes_1d(self) -> tuple[np.ndarray, np.ndarray]:
        z = cheb_nodes_1d(self.q)
        return self.center[0] + self.width * z, self.center[1] + self.width * z

    @property
    def nodes(self) -> np.ndarray:
        """(q*q, 2) array of tensor nodes, row-major."""
        a, b = self.nodes_1d
        g1, g2 = np.meshgrid(a, b, indexing="ij")
        return np.stack([g1.ravel(), g2.ravel()], axis=-1)


def adapted_grid(b: BoxId, q: int) -> ChebGrid:
    if q < 2:
        raise ValueError(f"q must be at least 2, got {q}")
    return ChebGrid(q, b.center, b.width)


def lagrange_weights_1d(nodes, z) -> np.ndarray:
    """Lagrange basis values L_i(z) for the given nodes.

    ``z`` may be a scalar or an array; the result has shape ``z.shape + (q,)``.
    Exact node hits return the corresponding unit vector.
    """
    nodes = np.asarray(nodes, dtype=float)
    q = nodes.shape[0]
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(diff == 0.0):
        raise ValueError("interpolation nodes must be distinct")
    denom = np.prod(diff, axis=1)

    z = np.asarray(z, dtype=float)
    d = z[..., None] - nodes  # (..., q)
    out = np.empty(d.shape)
    for i in range(q):
        others = np.delete(d, i, axis=-1)
        out[..., i] = np.prod(others, axis=-1) / denom[i]
    hit = d == 0.0
    if np.any(hit):
        rows = np.any(hit, axis=-1)
        out[rows] = hit[rows].astype(float)
    return out


def lagrange_weights_2d(grid: ChebGrid, point) -> np.ndarray:
    """Weights of the q*q tensor nodes at ``point`` (row-major, flattened)."""
    a, b = grid.nodes_1d
    point = np.asarray(point, dtype=float)
    w1 = lagrange_weights_1d(a, point[..., 0])
    w2 = lagrange_weights_1d(b, point[..., 1])
    return (w1[..., :, None] * w2[..., None, :]).reshape(point.shape[:-1] + (grid.q * grid.q,))


def reference_weights(q: int, z) -> np.ndarray:
    """Lagrange weights on the reference Chebyshev grid at offsets ``z`` in [-1/2, 1/2]."""
    return lagrange_weights_1d(cheb_nodes_1d(q), z)


def child_transfer_weights(q: int) -> np.ndarray:
    """Parent-basis values at child nodes, shape (2, q, q).

    ``T[c, i, j] = L_i(-1/4 + c/2 + z_j/2)``: the i-th parent Lagrange
    polynomial at the j-th node of the low (c=0) or high (c=1) child. The
    same table is valid for every box at every level. Source-side updates
    apply it as ``T[c] @ D @ T[c'].T``; target-side updates use its transpose.
    """
    z = cheb_nodes_1d(q)
    out = np.empty((2, q, q))
    for c in (0, 1):
        offs = -0.25 + 0.5 * c + 0.5 * z
        out[c] = reference_weights(q, offs).T
    return out
