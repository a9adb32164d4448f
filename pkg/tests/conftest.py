import numpy as np
import pytest

from bfio.grid import box_index
from bfio.phase import cis


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def partial_sum(pl, f, b_level, b_flat, x):
    """Direct u^B(x): sum over sources whose polar point lies in frequency box B."""
    ib = box_index(pl.points, b_level)
    sel = (ib[:, 0] * (1 << b_level) + ib[:, 1]) == b_flat
    p = pl.points[sel]
    return cis(pl.N * pl.phase.psi(np.asarray(x)[:, None], p[None])) @ f[sel]


def reconstruct(pl, table, ia, jb, x):
    """Evaluate the expansion of pair (A, B) at spatial points ``x``."""
    from bfio.grid import BoxId, adapted_grid, lagrange_weights_2d

    a, b = table.level, table.b_level
    na, nb = 1 << a, 1 << b
    A = BoxId(a, int(ia) // na, int(ia) % na)
    bf = int(table.live_b[jb])
    B = BoxId(b, bf // nb, bf % nb)
    d = table.data[ia, jb, 0].reshape(-1)
    N, ph = pl.N, pl.phase
    if table.side == "source":
        nodes = adapted_grid(B, pl.q).nodes
        return cis(N * ph.psi(x[:, None], nodes[None])) @ d
    grid = adapted_grid(A, pl.q)
    w = lagrange_weights_2d(grid, x)
    pre = cis(N * ph.psi(x, B.center))
    return pre * (w @ (np.conj(cis(N * ph.psi(grid.nodes, B.center))) * d))


def stage_errors(pl, f, pairs=5, points=20, seed=0):
    """Worst relative error of every stage's expansions against direct partial sums."""
    from bfio.butterfly import run_stages
    from bfio.grid import BoxId

    rng = np.random.default_rng(seed)
    out = []

    def observe(name, table):
        a, b = table.level, table.b_level
        na = 1 << a
        worst = 0.0
        for _ in range(pairs):
            ia = int(rng.integers(4 ** a))
            jb = int(rng.integers(table.live_b.size))
            A = BoxId(a, ia // na, ia % na)
            x = A.center + A.width * (rng.random((points, 2)) - 0.5)
            approx = reconstruct(pl, table, ia, jb, x)
            exact = partial_sum(pl, f, b, int(table.live_b[jb]), x)
            worst = max(worst, np.linalg.norm(approx - exact) / np.linalg.norm(exact))
        out.append((name, a, worst))

    run_stages(pl, f, observer=observe)
    return out
