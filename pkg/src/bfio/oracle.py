"""Direct summation, the sampled relative error and benchmark timing."""

from __future__ import annotations

from dataclasses import dataclass, asdict
import csv
import os
import time

import numpy as np

from .grid import freq_indices, spatial_points
from .phase import PhaseSpec, cis, full_phase

DIRECT_LIMIT = 256
DEFAULT_SAMPLES = 256
_BLOCK = 1 << 22


def _direct_rows(phase: PhaseSpec, N: int, f: np.ndarray, x: np.ndarray, amp=None) -> np.ndarray:
    k = freq_indices(N).astype(float)
    per = max(1, _BLOCK // k.shape[0])
    out = np.empty((x.shape[0],) + f.shape[1:], dtype=complex)
    for s in range(0, x.shape[0], per):
        xs = x[s:s + per, None, :]
        ker = cis(full_phase(phase, xs, k[None]))
        if amp is not None:
            ker = ker * amp(xs, k[None])
        out[s:s + per] = ker @ f
    return out


def _check_f(f, N: int) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape[0] != N * N:
        raise ValueError(f"f must have {N * N} entries, got {f.shape[0]}")
    return f


def direct_full(phase: PhaseSpec, N: int, f, amp=None, force: bool = False) -> np.ndarray:
    """u(x) = sum_k a(x,k) exp(2 pi i Phi(x,k)) f(k) at every grid point. Cost N^4."""
    if N > DIRECT_LIMIT and not force:
        raise ValueError(f"direct evaluation at N={N} costs N^4; pass force=True to run it anyway")
    f = _check_f(f, N)
    return _direct_rows(phase, N, f, spatial_points(N), amp)


def direct_sampled(phase: PhaseSpec, N: int, f, S, amp=None) -> np.ndarray:
    """Direct sum at the spatial grid indices ``S`` (flat, i1 slow)."""
    f = _check_f(f, N)
    S = np.atleast_1d(np.asarray(S, dtype=np.int64))
    if np.any(S < 0) or np.any(S >= N * N):
        raise ValueError("sample indices outside the spatial grid")
    i1, i2 = S // N, S % N
    x = np.stack([i1 / N, i2 / N], axis=-1)
    return _direct_rows(phase, N, f, x, amp)


def relative_error(u_fast, u_direct) -> float:
    """sqrt(sum |u - u_a|^2 / sum |u|^2)."""
    u_fast = np.asarray(u_fast)
    u_direct = np.asarray(u_direct)
    den = float(np.sum(np.abs(u_direct) ** 2))
    if den == 0.0:
        raise ValueError("reference vector is identically zero")
    return float(np.sqrt(np.sum(np.abs(u_fast - u_direct) ** 2) / den))


def sample_points(N: int, count: int = DEFAULT_SAMPLES, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(N * N, min(count, N * N), replace=False))


def white_noise(N: int, seed: int = 0, real: bool = False) -> np.ndarray:
    rng = np.random.default_rng(seed)
    if real:
        return rng.standard_normal(N * N) + 0j
    return rng.standard_normal(N * N) + 1j * rng.standard_normal(N * N)


@dataclass
class ErrorReport:
    N: int
    q: int
    phase: str
    amp: str
    sample_count: int
    relative_error: float
    sample_seed: int
    wall_time_fast: float
    wall_time_direct_per_point: float
    extrapolated_direct_total: float

    @property
    def speedup(self) -> float:
        return self.extrapolated_direct_total / self.wall_time_fast

    def csv_row(self) -> dict:
        return {
            "N": self.N, "q": self.q, "phase": self.phase, "amp": self.amp,
            "Ta_sec": f"{self.wall_time_fast:.6g}", "Td_sec": f"{self.extrapolated_direct_total:.6g}",
            "speedup": f"{self.speedup:.6g}", "eps_a": f"{self.relative_error:.6g}",
            "seed": self.sample_seed,
        }

    def as_dict(self) -> dict:
        d = asdict(self)
        d["speedup"] = self.speedup
        return d


CSV_HEADER = ["N", "q", "phase", "amp", "Ta_sec", "Td_sec", "speedup", "eps_a", "seed"]


def append_csv(path, reports) -> None:
    """Append report rows, writing the header when the file is new or empty."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        if new:
            w.writeheader()
        for r in reports:
            w.writerow(r.csv_row())


def benchmark(pl, trials: int = 1, seed: int = 0, samples: int = DEFAULT_SAMPLES,
              amp=None, amp_exact=None, amp_name: str = "none", real_input: bool = False) -> ErrorReport:
    """Time the fast apply (best of ``trials``) and estimate the direct cost.

    ``amp`` is a separated amplitude run through the fast path and
    ``amp_exact`` the callable used by the direct sum.
    """
    from .amplitude import apply_with_amplitude
    from .butterfly import apply

    if trials < 1:
        raise ValueError("trials must be positive")
    N = pl.N
    f = white_noise(N, seed, real_input)
    best = np.inf
    u = None
    for _ in range(trials):
        t0 = time.perf_counter()
        u = apply(pl, f) if amp is None else apply_with_amplitude(pl, amp, f)
        best = min(best, time.perf_counter() - t0)
    S = sample_points(N, samples, seed)
    t0 = time.perf_counter()
    ud = direct_sampled(pl.phase, N, f, S, amp_exact)
    per_point = (time.perf_counter() - t0) / S.size
    return ErrorReport(
        N=N, q=pl.q, phase=pl.phase.name, amp=amp_name, sample_count=int(S.size),
        relative_error=relative_error(u[S], ud), sample_seed=seed,
        wall_time_fast=best, wall_time_direct_per_point=per_point,
        extrapolated_direct_total=per_point * N * N,
    )
