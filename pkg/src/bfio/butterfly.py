"""Butterfly evaluation of u(x) = sum_k exp(2 pi i Phi(x,k)) f(k).

Boxes A of the spatial tree and B of the polar frequency tree are paired
with level(A) + level(B) = L = log2(N). Each live pair carries a q x q block
of coefficients. Before the switch the block holds equivalent sources on the
Chebyshev grid of B; after it, approximate potentials on the Chebyshev grid
of A. Only two consecutive levels of coefficients are kept.

Coefficient tables are dense arrays of shape (4**level(A), n_live_B, s, q, q)
where s is the number of right-hand sides carried together.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from .grid import (
    box_index,
    cheb_nodes_1d,
    child_transfer_weights,
    freq_indices,
    polar_map,
    reference_weights,
)
from ._kernels import switch_apply
from .phase import PhaseSpec, SQRT1_2, TWO_PI, cis

# complex entries per working chunk
CHUNK_ELEMS = 1 << 21


@dataclass(frozen=True)
class PlanConfig:
    N: int
    q: int = 7
    phase: PhaseSpec | None = None
    start_level: int | None = None
    end_level: int | None = None
    pair_offset: int = 0
    workers: int = 1

    @property
    def L(self) -> int:
        return int(round(math.log2(self.N)))


def default_levels(N: int) -> tuple[int, int]:
    """(start, end) levels in the frequency tree."""
    L = int(round(math.log2(N)))
    start, end = L - 3, 3
    if start < end:
        start = end = L // 2
    return start, end


@dataclass
class CoeffTable:
    level: int  # level of the spatial boxes A
    side: str  # "source" before the switch, "target" after
    live_b: np.ndarray  # flat indices of the live frequency boxes
    data: np.ndarray
    level_sum: int

    @property
    def b_level(self) -> int:
        return self.level_sum - self.level

    @property
    def nbytes(self) -> int:
        return self.data.nbytes


def _flat_coords(level: int, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = 1 << level
    return flat // n, flat % n


def _centers(level: int, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    i1, i2 = _flat_coords(level, flat)
    w = 2.0 ** (-level)
    return (i1 + 0.5) * w, (i2 + 0.5) * w


class Plan:
    """Precomputed geometry for one (N, q, phase, levels) configuration."""

    def __init__(self, cfg: PlanConfig):
        N, q = cfg.N, cfg.q
        if N < 2 or N & (N - 1):
            raise ValueError(f"N must be a power of 2, got {N}")
        if not 2 <= q <= 16:
            raise ValueError(f"q must lie in [2, 16], got {q}")
        if cfg.phase is None:
            raise ValueError("a phase is required")
        L = cfg.L
        d_start, d_end = default_levels(N)
        start = d_start if cfg.start_level is None else cfg.start_level
        end = d_end if cfg.end_level is None else cfg.end_level
        g = cfg.pair_offset
        if g < 0:
            raise ValueError("pair_offset must be non-negative")
        if not g <= end <= start <= L:
            raise ValueError(f"invalid level range start={start} end={end} for L={L}, offset {g}")
        if cfg.workers < 1:
            raise ValueError("workers must be positive")

        self.cfg = cfg
        self.N, self.q, self.L = N, q, L
        self.phase = cfg.phase
        self.start_level, self.end_level = start, end
        self.pair_offset = g
        self.level_sum = L + g
        self.a_start = L + g - start
        self.a_end = L + g - end
        self.switch_level = min(max(-(-(L + g) // 2), self.a_start), self.a_end)
        self.workers = cfg.workers

        self.z = cheb_nodes_1d(q)
        self.transfer = child_transfer_weights(q)

        self.points = polar_map(freq_indices(N), N)
        self._build_frequency_tree()
        self._build_initial_buckets()

        m = N >> self.a_end
        self.leaf_points = m
        # raw spatial offsets inside a final-level box, relative to the box
        self.leaf_weights = reference_weights(q, (np.arange(m) + 0.0) / m - 0.5)

    # -- geometry -----------------------------------------------------------

    def _build_frequency_tree(self):
        """Live frequency boxes per level and child slots into the level below."""
        b0 = self.start_level
        ib = box_index(self.points, b0)
        flat = ib[:, 0] * (1 << b0) + ib[:, 1]
        self.point_box = flat
        live = {b0: np.unique(flat)}
        children = {}
        for b in range(b0 - 1, self.end_level - 1, -1):
            below = live[b + 1]
            i1, i2 = _flat_coords(b + 1, below)
            par = (i1 // 2) * (1 << b) + i2 // 2
            live[b] = np.unique(par)
            # child slot c = 2*c1 + c2 -> position in live[b+1], or len(below) if empty
            slots = np.full((live[b].size, 4), below.size, dtype=np.int64)
            pos = np.searchsorted(live[b], par)
            slot = 2 * (i1 % 2) + (i2 % 2)
            slots[pos, slot] = np.arange(below.size)
            children[b] = slots
        self.live = live
        self.child_slots = children

    def _build_initial_buckets(self):
        """Raw polar points grouped (padded) by their start-level box."""
        b0 = self.start_level
        live = self.live[b0]
        order = np.argsort(self.point_box, kind="stable")
        boxes = self.point_box[order]
        pos = np.searchsorted(live, boxes)
        counts = np.bincount(pos, minlength=live.size)
        nmax = int(counts.max())
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        slot = np.arange(order.size) - starts[pos]
        idx = np.full((live.size, nmax), -1, dtype=np.int64)
        idx[pos, slot] = order
        self.bucket = idx
        self.bucket_counts = counts

        mask = idx >= 0
        pts = self.points[np.where(mask, idx, 0)]
        c1, c2 = _centers(b0, live)
        w = 2.0 ** (-b0)
        z1 = (pts[..., 0] - c1[:, None]) / w
        z2 = (pts[..., 1] - c2[:, None]) / w
        self.bucket_p1 = np.where(mask, pts[..., 0], 0.0)
        self.bucket_p2 = np.where(mask, pts[..., 1], 0.0)
        self.bucket_w1 = reference_weights(self.q, z1) * mask[..., None]
        self.bucket_w2 = reference_weights(self.q, z2) * mask[..., None]

    def grid_1d(self, level: int, flat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-dimension Chebyshev nodes, each of shape (len(flat), q)."""
        c1, c2 = _centers(level, flat)
        w = 2.0 ** (-level)
        return c1[:, None] + w * self.z, c2[:, None] + w * self.z

    def schedule(self) -> list[tuple[str, int]]:
        """Stage list as (name, level of A)."""
        out = [("initialize", self.a_start)]
        if self.a_start == self.switch_level:
            out.append(("switch", self.a_start))
        for a in range(self.a_start + 1, self.a_end + 1):
            if a <= self.switch_level:
                out.append(("source", a))
                if a == self.switch_level:
                    out.append(("switch", a))
            else:
                out.append(("target", a))
        out.append(("terminate", self.a_end))
        return out

    def n_pairs(self, a: int) -> int:
        return (4 ** a) * self.live[self.level_sum - a].size

    # -- phase helpers ------------------------------------------------------

    def dir_phase(self, x1, x2, p2) -> np.ndarray:
        """sqrt(2)/2 * Phi(x, e(p2)), so that Psi(x, p) = p1 * dir_phase."""
        a = TWO_PI * p2
        return SQRT1_2 * self.phase.phi(x1, x2, np.cos(a), np.sin(a))

    def _map(self, fn, chunks):
        if self.workers == 1 or len(chunks) == 1:
            for c in chunks:
                fn(c)
        else:
            with ThreadPoolExecutor(self.workers) as ex:
                list(ex.map(fn, chunks))

    @staticmethod
    def _chunks(n: int, per_item: int) -> list[slice]:
        step = max(1, CHUNK_ELEMS // max(per_item, 1))
        return [slice(i, min(i + step, n)) for i in range(0, n, step)]


def _as_payload(f: np.ndarray, N: int) -> tuple[np.ndarray, bool]:
    f = np.asarray(f)
    vec = f.ndim == 1
    f2 = f[:, None] if vec else f
    if f2.ndim != 2 or f2.shape[0] != N * N:
        raise ValueError(f"source vector must have length N*N = {N * N}, got shape {f.shape}")
    return f2.astype(complex, copy=False), vec


def plan(cfg: PlanConfig) -> Plan:
    return Plan(cfg)


# ----------------------------------------------------------------------------
# Stages

def initialize(pl: Plan, f) -> CoeffTable:
    """Source-side coefficients from the raw polar points of each start-level box."""
    f2, _ = _as_payload(f, pl.N)
    N, q, a = pl.N, pl.q, pl.a_start
    b0 = pl.start_level
    live = pl.live[b0]
    s = f2.shape[1]
    nA = 4 ** a
    nB, nmax = pl.bucket.shape
    fpad = np.where((pl.bucket >= 0)[..., None], f2[np.maximum(pl.bucket, 0)], 0.0)
    out = np.empty((nA, nB, s, q, q), dtype=complex)
    g1, g2 = pl.grid_1d(b0, live)
    w2 = pl.bucket_w2

    def run(sl):
        x1, x2 = _centers(a, np.arange(sl.start, sl.stop))
        x1 = x1[:, None, None]
        x2 = x2[:, None, None]
        e = cis(N * pl.bucket_p1 * pl.dir_phase(x1, x2, pl.bucket_p2))  # (nc, nB, nmax)
        g = e[..., None] * fpad  # (nc, nB, nmax, s)
        h = g[..., None] * pl.bucket_w1[:, :, None, :]  # (nc, nB, nmax, s, q)
        d = np.matmul(h.transpose(0, 1, 3, 4, 2), w2[None, :, None])  # (nc, nB, s, q, q)
        psi = g1[None, :, :, None] * pl.dir_phase(x1[..., None], x2[..., None], g2[None, :, None, :])
        d *= np.conj(cis(N * psi))[:, :, None]
        out[sl] = d

    pl._map(run, pl._chunks(nA, nB * nmax * s * q))
    return CoeffTable(a, "source", live, out, pl.level_sum)


def _check_next(pl: Plan, table: CoeffTable, side: str):
    if table.side != side:
        raise ValueError(f"expected a {side}-side table, got {table.side}")
    if table.level + 1 > pl.a_end:
        raise ValueError(f"no level after {table.level}")


def step_source_side(pl: Plan, table: CoeffTable) -> CoeffTable:
    """Equivalent sources of B from those of its children, for A one level finer."""
    _check_next(pl, table, "source")
    a = table.level + 1
    if a > pl.switch_level:
        raise ValueError(f"source-side step at level {a} is past the switch level {pl.switch_level}")
    N, q, L = pl.N, pl.q, pl.level_sum
    b = L - a
    live = pl.live[b]
    below = pl.live[b + 1]
    slots = pl.child_slots[b]
    old = table.data
    s = old.shape[2]
    nA, nB = 4 ** a, live.size
    T = pl.transfer
    gb1, gb2 = pl.grid_1d(b, live)
    gc1, gc2 = pl.grid_1d(b + 1, below)
    out = np.empty((nA, nB, s, q, q), dtype=complex)
    na = 1 << a

    def run(sl):
        flat = np.arange(sl.start, sl.stop)
        i1, i2 = flat // na, flat % na
        parent = (i1 // 2) * (na // 2) + i2 // 2
        x1, x2 = _centers(a, flat)
        x1 = x1[:, None, None, None]
        x2 = x2[:, None, None, None]
        # exp(2 pi i N Psi(x0(A), child nodes)) for every live child box
        psi_c = gc1[None, :, :, None] * pl.dir_phase(x1, x2, gc2[None, :, None, :])
        ec = cis(N * psi_c)  # (nc, nBelow, q, q)
        ec = np.concatenate([ec, np.zeros((flat.size, 1, q, q), dtype=complex)], axis=1)
        src = np.concatenate([old[parent], np.zeros((flat.size, 1, s, q, q), dtype=complex)], axis=1)
        acc = np.zeros((flat.size, nB, s, q, q), dtype=complex)
        for c in range(4):
            c1, c2 = divmod(c, 2)
            idx = slots[:, c]
            x = src[:, idx] * ec[:, idx, None]
            acc += T[c1] @ x @ T[c2].T
        psi_b = gb1[None, :, :, None] * pl.dir_phase(x1, x2, gb2[None, :, None, :])
        acc *= np.conj(cis(N * psi_b))[:, :, None]
        out[sl] = acc

    per = (4 * nB + 2 * below.size) * s * q * q
    pl._map(run, pl._chunks(nA, per))
    return CoeffTable(a, "source", live, out, L)


def switch(pl: Plan, table: CoeffTable) -> CoeffTable:
    """Convert equivalent sources in B into potentials on the Chebyshev grid of A."""
    if table.side != "source":
        raise ValueError("switch expects a source-side table")
    if table.level != pl.switch_level:
        raise ValueError(f"switch runs at level {pl.switch_level}, table is at {table.level}")
    N, q, L = pl.N, pl.q, pl.level_sum
    a = table.level
    b = L - a
    live = table.live_b
    old = table.data
    nA, nB, s = old.shape[:3]
    gb1, gb2 = pl.grid_1d(b, live)
    pc1, _ = _centers(b, live)
    wb = 2.0 ** (-b)
    out = np.empty_like(old)

    def run(sl):
        flat = np.arange(sl.start, sl.stop)
        n = flat.size
        xa1, xa2 = pl.grid_1d(a, flat)
        x1 = xa1[:, :, None] * np.ones(q)
        x2 = xa2[:, None, :] * np.ones((q, 1))
        # h[t, s2] for x nodes t = (i1, i2) and p2 nodes s2: (n, nB, q*q, q)
        h = pl.dir_phase(x1[:, None, :, :, None], x2[:, None, :, :, None], gb2[None, :, None, None, :])
        h = np.ascontiguousarray(h.reshape(n * nB, q * q, q))
        cb = np.ascontiguousarray(np.broadcast_to(pc1, (n, nB)).reshape(n * nB))
        d = np.ascontiguousarray(old[sl].reshape(n * nB, s, q * q))
        res = np.empty_like(d)
        switch_apply(h, cb, wb, pl.z, float(N), d, res)
        out[sl] = res.reshape(n, nB, s, q, q)

    pl._map(run, pl._chunks(nA, nB * q ** 3 * 4))
    return CoeffTable(a, "target", live, out, L)


def step_target_side(pl: Plan, table: CoeffTable) -> CoeffTable:
    """Potentials on the Chebyshev grid of A from those of its parent."""
    _check_next(pl, table, "target")
    N, q, L = pl.N, pl.q, pl.level_sum
    a = table.level + 1
    b = L - a
    live = pl.live[b]
    below = table.live_b
    slots = pl.child_slots[b]
    old = table.data
    s = old.shape[2]
    nAp, nB = 4 ** (a - 1), live.size
    T = pl.transfer
    pc1, pc2 = _centers(b + 1, below)
    out = np.empty((4 ** a, nB, s, q, q), dtype=complex)
    na = 1 << a
    nap = na // 2

    def nodes(flat, level):
        g1, g2 = pl.grid_1d(level, flat)
        return g1[:, :, None] * np.ones(q), g2[:, None, :] * np.ones((q, 1))

    def run(sl):
        pflat = np.arange(sl.start, sl.stop)
        n = pflat.size
        y1, y2 = nodes(pflat, a - 1)
        psi_p = pc1[None, :, None, None] * pl.dir_phase(
            y1[:, None], y2[:, None], pc2[None, :, None, None])  # (n, nBelow, q, q)
        g = np.conj(cis(N * psi_p))[:, :, None] * old[pflat]
        g = np.concatenate([g, np.zeros((n, 1, s, q, q), dtype=complex)], axis=1)
        pi1, pi2 = pflat // nap, pflat % nap
        for a1 in (0, 1):
            for a2 in (0, 1):
                cflat = (2 * pi1 + a1) * na + 2 * pi2 + a2
                x1, x2 = nodes(cflat, a)
                psi_c = pc1[None, :, None, None] * pl.dir_phase(
                    x1[:, None], x2[:, None], pc2[None, :, None, None])
                ec = cis(N * psi_c)
                ec = np.concatenate([ec, np.zeros((n, 1, q, q), dtype=complex)], axis=1)
                y = T[a1].T @ g @ T[a2]  # (n, nBelow+1, s, q, q)
                y *= ec[:, :, None]
                acc = y[:, slots[:, 0]]
                for c in range(1, 4):
                    acc += y[:, slots[:, c]]
                out[cflat] = acc

    per = (below.size + nB) * s * q * q * 4
    pl._map(run, pl._chunks(nAp, per))
    return CoeffTable(a, "target", live, out, L)


def terminate(pl: Plan, table: CoeffTable, vector: bool = False) -> np.ndarray:
    """Interpolate the final potentials to the raw spatial grid."""
    if table.side != "target" or table.level != pl.a_end:
        raise ValueError(f"terminate expects the target-side table at level {pl.a_end}")
    N, q = pl.N, pl.q
    a = table.level
    b = pl.level_sum - a
    live = table.live_b
    d = table.data
    nA, nB, s = d.shape[:3]
    m = pl.leaf_points
    W = pl.leaf_weights  # (m, q)
    p1, p2 = _centers(b, live)
    u = np.empty((1 << a, m, 1 << a, m, s), dtype=complex)
    na = 1 << a

    def run(sl):
        flat = np.arange(sl.start, sl.stop)
        n = flat.size
        g1, g2 = pl.grid_1d(a, flat)
        x1 = g1[:, :, None] * np.ones(q)
        x2 = g2[:, None, :] * np.ones((q, 1))
        psi = p1[None, :, None, None] * pl.dir_phase(x1[:, None], x2[:, None], p2[None, :, None, None])
        g = np.conj(cis(N * psi))[:, :, None] * d[sl]  # (n, nB, s, q, q)
        v = W @ g @ W.T  # (n, nB, s, m, m)
        i1, i2 = flat // na, flat % na
        r1 = (i1[:, None] * m + np.arange(m)) / N  # (n, m)
        r2 = (i2[:, None] * m + np.arange(m)) / N
        psi_x = p1[None, :, None, None] * pl.dir_phase(
            r1[:, None, :, None], r2[:, None, None, :], p2[None, :, None, None])  # (n, nB, m, m)
        e = cis(N * psi_x)
        res = np.einsum("abij,absij->aijs", e, v)
        for j in range(n):
            u[i1[j], :, i2[j], :, :] = res[j]

    pl._map(run, pl._chunks(nA, nB * s * (q * q + 2 * m * m)))
    out = u.reshape(N * N, s)
    return out[:, 0] if vector else out


def run_stages(pl: Plan, f, observer=None):
    """Run the full pipeline; ``observer(name, table)`` sees every table."""
    f2, vec = _as_payload(f, pl.N)
    table = None
    peak = 0
    for name, _a in pl.schedule():
        prev = table
        if name == "initialize":
            table = initialize(pl, f2)
        elif name == "source":
            table = step_source_side(pl, table)
        elif name == "switch":
            table = switch(pl, table)
        elif name == "target":
            table = step_target_side(pl, table)
        else:
            u = terminate(pl, table, vector=vec)
            break
        peak = max(peak, table.nbytes + (prev.nbytes if prev is not None else 0))
        if observer is not None:
            observer(name, table)
        del prev
    pl.last_peak_bytes = peak
    return u


def apply(pl: Plan, f) -> np.ndarray:
    """Fast evaluation of u = sum_k exp(2 pi i Phi(x,k)) f(k) on the N x N grid.

    ``f`` is ordered like :func:`bfio.grid.freq_indices`; the result like
    :func:`bfio.grid.spatial_points`. A 2-D ``f`` of shape (N*N, s) is
    processed as s simultaneous right-hand sides.
    """
    return run_stages(pl, f)
