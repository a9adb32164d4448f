"""Residual kernel, interpolative expansion functions and low-rank probes.

For a spatial box A and a frequency box B with w(A) w(B) <= 1/N the residual
phase R^{AB} stays O(1/N), so exp(2 pi i N R^{AB}) can be interpolated on a
Chebyshev grid: in p when B is the small box (source side), in x when A is
(target side).
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .grid import BoxId, adapted_grid, lagrange_weights_2d
from .phase import PhaseSpec, cis

SOURCE = "source"
TARGET = "target"


@dataclass(frozen=True)
class PairContext:
    A: BoxId
    B: BoxId
    N: int
    q: int
    side: str = SOURCE

    def __post_init__(self):
        L = int(round(math.log2(self.N)))
        if self.A.level + self.B.level < L:
            raise ValueError(f"boxes too large: level(A)+level(B) = {self.A.level + self.B.level} < L = {L}")
        if self.side not in (SOURCE, TARGET):
            raise ValueError(f"side must be {SOURCE!r} or {TARGET!r}")
        limit = 1.0 / math.sqrt(self.N) * (1 + 1e-12)
        if self.side == SOURCE and self.B.width > limit:
            raise ValueError("source-side expansions need w(B) <= 1/sqrt(N)")
        if self.side == TARGET and self.A.width > limit:
            raise ValueError("target-side expansions need w(A) <= 1/sqrt(N)")

    @property
    def x0(self) -> np.ndarray:
        return self.A.center

    @property
    def p0(self) -> np.ndarray:
        return self.B.center


def residual(ctx: PairContext, phase: PhaseSpec, x, p) -> np.ndarray:
    """R(x,p) = Psi(x,p) - Psi(x0,p) - Psi(x,p0) + Psi(x0,p0); broadcasts x against p."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    x0, p0 = ctx.x0, ctx.p0
    return phase.psi(x, p) - phase.psi(x0, p) - phase.psi(x, p0) + phase.psi(x0, p0)


def _require(ctx: PairContext, side: str):
    if ctx.side != side:
        raise ValueError(f"this expansion needs a {side}-side context, got {ctx.side}")


def beta_source(ctx: PairContext, phase: PhaseSpec, t, p) -> np.ndarray:
    """Source-side expansion functions of p.

    Returns shape ``p.shape[:-1]`` for an integer ``t``, or an extra trailing
    axis of length q*q when ``t`` is None.
    """
    _require(ctx, SOURCE)
    p = np.asarray(p, dtype=float)
    grid = adapted_grid(ctx.B, ctx.q)
    nodes = grid.nodes
    N, x0 = ctx.N, ctx.x0
    lw = lagrange_weights_2d(grid, p)
    val = np.conj(cis(N * phase.psi(x0, nodes))) * lw * cis(N * phase.psi(x0, p))[..., None]
    return val if t is None else val[..., t]


def alpha_target(ctx: PairContext, phase: PhaseSpec, t, x) -> np.ndarray:
    """Target-side expansion functions of x; same shape rules as :func:`beta_source`."""
    _require(ctx, TARGET)
    x = np.asarray(x, dtype=float)
    grid = adapted_grid(ctx.A, ctx.q)
    nodes = grid.nodes
    N, p0 = ctx.N, ctx.p0
    lw = lagrange_weights_2d(grid, x)
    val = cis(N * phase.psi(x, p0))[..., None] * lw * np.conj(cis(N * phase.psi(nodes, p0)))
    return val if t is None else val[..., t]


def kernel_approx(ctx: PairContext, phase: PhaseSpec, x, p) -> np.ndarray:
    """Low-rank approximation of exp(2 pi i N Psi) on (x[i], p[j]) pairs, shape (nx, np)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    p = np.atleast_2d(np.asarray(p, dtype=float))
    N = ctx.N
    if ctx.side == SOURCE:
        nodes = adapted_grid(ctx.B, ctx.q).nodes
        left = cis(N * phase.psi(x[:, None], nodes[None]))  # (nx, r)
        right = beta_source(ctx, phase, None, p)  # (np, r)
    else:
        nodes = adapted_grid(ctx.A, ctx.q).nodes
        left = alpha_target(ctx, phase, None, x)  # (nx, r)
        right = cis(N * phase.psi(nodes[None], p[:, None]))  # (np, r)
    return left @ right.T


def interpolation_error(ctx: PairContext, phase: PhaseSpec, samples: int = 64, seed: int = 0) -> float:
    """Max |kernel - approximation| over random points of A x B."""
    rng = np.random.default_rng(seed)
    x = ctx.x0 + ctx.A.width * (rng.random((samples, 2)) - 0.5)
    p = ctx.p0 + ctx.B.width * (rng.random((samples, 2)) - 0.5)
    exact = cis(ctx.N * phase.psi(x[:, None], p[None]))
    return float(np.max(np.abs(exact - kernel_approx(ctx, phase, x, p))))


def residual_matrix(ctx: PairContext, phase: PhaseSpec, m: int = 32) -> np.ndarray:
    """exp(2 pi i N R) sampled on uniform m x m sub-grids of A and B, shape (m*m, m*m)."""
    off = (np.arange(m) + 0.5) / m - 0.5
    o1, o2 = np.meshgrid(off, off, indexing="ij")
    o = np.stack([o1.ravel(), o2.ravel()], axis=-1)
    x = ctx.x0 + ctx.A.width * o
    p = ctx.p0 + ctx.B.width * o
    return cis(ctx.N * residual(ctx, phase, x[:, None], p[None]))


def empirical_rank(ctx: PairContext, phase: PhaseSpec, eps: float, m: int = 32) -> int:
    """Number of singular values above eps * sigma_1 of the sampled residual kernel."""
    sv = np.linalg.svd(residual_matrix(ctx, phase, m), compute_uv=False)
    return int(np.sum(sv > eps * sv[0]))


def residual_phase_range(ctx: PairContext, phase: PhaseSpec, m: int = 16) -> float:
    """max |2 pi N R| over an m x m sampling of A x B (radians)."""
    off = np.linspace(-0.5, 0.5, m)
    o1, o2 = np.meshgrid(off, off, indexing="ij")
    o = np.stack([o1.ravel(), o2.ravel()], axis=-1)
    x = ctx.x0 + ctx.A.width * o
    p = ctx.p0 + ctx.B.width * o
    return float(np.max(np.abs(2 * np.pi * ctx.N * residual(ctx, phase, x[:, None], p[None]))))


def complementary_pairs(N: int, level_a: int, count: int, seed: int = 0) -> list[tuple[BoxId, BoxId]]:
    """Random (A, B) with level(A) = level_a and level(B) = L - level_a."""
    L = int(round(math.log2(N)))
    lb = L - level_a
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        a = rng.integers(0, 1 << level_a, 2)
        b = rng.integers(0, 1 << lb, 2)
        out.append((BoxId(level_a, int(a[0]), int(a[1])), BoxId(lb, int(b[0]), int(b[1]))))
    return out


def side_for(A: BoxId, B: BoxId) -> str:
    """Source side when B is no larger than A."""
    return SOURCE if B.width <= A.width else TARGET
