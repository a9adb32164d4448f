"""Separated variable amplitudes a(x,k) ~ sum_t g_t(x) h_t(k) and the driver
that runs all s terms through one butterfly pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable
import math

import numpy as np

from .bessel import bessel_j0, bessel_y0
from .grid import freq_indices, spatial_points
from .phase import TWO_PI, circle_radius

Amplitude = Callable[[np.ndarray, np.ndarray], np.ndarray]

VALIDATION_ENTRIES = 2000


@dataclass(frozen=True)
class SeparatedAmplitude:
    """g: (N*N, s) over spatial points; h: (N*N, s) over frequencies."""

    N: int
    g: np.ndarray
    h: np.ndarray
    residual: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        if self.g.shape != self.h.shape or self.g.ndim != 2 or self.g.shape[0] != self.N * self.N:
            raise ValueError(f"g {self.g.shape} and h {self.h.shape} must both be (N*N, s)")

    @property
    def s(self) -> int:
        return self.g.shape[1]

    def entries(self, ix, ik) -> np.ndarray:
        return np.sum(self.g[ix] * self.h[ik], axis=-1)


def constant_amplitude(N: int, value: complex = 1.0) -> SeparatedAmplitude:
    n = N * N
    return SeparatedAmplitude(N, np.full((n, 1), value, dtype=complex), np.ones((n, 1), dtype=complex))


def combine(*amps: SeparatedAmplitude) -> SeparatedAmplitude:
    """Sum of amplitudes sharing one phase, as a single wider separation."""
    if not amps:
        raise ValueError("nothing to combine")
    N = amps[0].N
    if any(a.N != N for a in amps):
        raise ValueError("amplitudes built for different N")
    return SeparatedAmplitude(
        N,
        np.concatenate([a.g for a in amps], axis=1),
        np.concatenate([a.h for a in amps], axis=1),
        residual=sum(a.residual for a in amps),
        eps=max(a.eps for a in amps),
    )


def _cross(a: Amplitude, X, K, rows, cols):
    C = np.asarray(a(X[:, None], K[cols][None]), dtype=complex)  # (n, r)
    R = np.asarray(a(X[rows][:, None], K[None]), dtype=complex)  # (r, n)
    return C, R


def build_separated(a: Amplitude, N: int, eps_amp: float = 1e-7, seed: int = 0,
                    r0: int = 8, retries: int = 3, anchors=None) -> SeparatedAmplitude:
    """Randomized cross approximation of the N^2 x N^2 matrix a(x, k).

    Samples r random rows and columns, factors the r x r intersection with a
    truncated SVD and keeps the smallest rank whose error on held-out random
    entries is within ``eps_amp * max|a|``. The sample size doubles on failure.

    ``anchors`` lists frequency indices that are always sampled and always
    validated, for amplitudes with a localized singularity in k.
    """
    if not (1e-12 < eps_amp < 1e-1):
        raise ValueError(f"eps_amp must lie in (1e-12, 1e-1), got {eps_amp}")
    X = spatial_points(N)
    K = freq_indices(N).astype(float)
    n = N * N
    rng = np.random.default_rng(seed)
    anchors = np.unique(np.asarray([] if anchors is None else anchors, dtype=np.int64))
    r = min(r0, n)
    best = math.inf
    for _attempt in range(retries + 1):
        cols = np.union1d(rng.choice(n, r, replace=False), anchors)
        rows = np.sort(rng.choice(n, min(len(cols), n), replace=False))
        C, R = _cross(a, X, K, rows, cols)
        U, sv, Vh = np.linalg.svd(C[rows], full_matrices=False)
        nval = max(VALIDATION_ENTRIES, 4 * 2 * r)
        vi = rng.integers(0, n, nval)
        vk = rng.integers(0, n, nval)
        if anchors.size:
            extra = rng.integers(0, n, VALIDATION_ENTRIES)
            vi = np.concatenate([vi, extra])
            vk = np.concatenate([vk, anchors[np.arange(extra.size) % anchors.size]])
        exact = np.asarray(a(X[vi], K[vk]), dtype=complex)
        scale = max(np.max(np.abs(exact)), np.max(np.abs(C)), np.max(np.abs(R)))
        if scale == 0.0:
            z = np.zeros((n, 1), dtype=complex)
            return SeparatedAmplitude(N, z, z.copy(), 0.0, eps_amp)
        keep = int(np.sum(sv > sv[0] * 1e-14)) if sv[0] > 0 else 0
        for s in range(1, keep + 1):
            g = (C @ Vh[:s].conj().T) / sv[:s]
            h = (U[:, :s].conj().T @ R).T
            err = float(np.max(np.abs(exact - np.sum(g[vi] * h[vk], axis=1)))) / scale
            best = min(best, err)
            if err <= eps_amp:
                return SeparatedAmplitude(N, g, h, err, eps_amp)
        r = min(2 * r, n)
    raise RuntimeError(f"separation did not reach eps={eps_amp:g} after {retries} retries (best {best:.3g})")


def apply_with_amplitude(pl, amp: SeparatedAmplitude, f) -> np.ndarray:
    """u = sum_t g_t * apply(h_t * f), all terms in one vectorized pass."""
    from .butterfly import apply

    f = np.asarray(f, dtype=complex)
    if amp.N != pl.N:
        raise ValueError(f"amplitude built for N={amp.N}, plan has N={pl.N}")
    if f.shape != (pl.N * pl.N,):
        raise ValueError(f"f must have shape ({pl.N * pl.N},), got {f.shape}")
    U = apply(pl, amp.h * f[:, None])
    return np.sum(amp.g * U, axis=1)


# ----------------------------------------------------------------------------
# Circle example

def _circle_parts(x, k):
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    x, k = np.broadcast_arrays(x, k)
    c = circle_radius(x[..., 0], x[..., 1])
    theta = TWO_PI * c * np.hypot(k[..., 0], k[..., 1])
    zero = theta == 0.0
    safe = np.where(zero, 1.0, theta)
    j0 = np.where(zero, 1.0, bessel_j0(safe))
    y0 = np.where(zero, 0.0, bessel_y0(safe))
    return j0, y0, theta


def circle_amplitudes(N: int | None = None) -> tuple[Amplitude, Amplitude]:
    """a+ and a- of the circle-averaging example.

    At k = 0 the Y0 term is singular; there the amplitude is J0(0) = 1.
    ``N`` is accepted for interface symmetry and unused.
    """

    def a_plus(x, k):
        j0, y0, th = _circle_parts(x, k)
        return (j0 + 1j * y0) * np.exp(-1j * th)

    def a_minus(x, k):
        j0, y0, th = _circle_parts(x, k)
        return (j0 - 1j * y0) * np.exp(1j * th)

    return a_plus, a_minus


def circle_amplitude_sum(x, k) -> np.ndarray:
    """a+ + a-, the total amplitude against the shared circle phase."""
    j0, y0, th = _circle_parts(x, k)
    return 2.0 * (j0 * np.cos(th) + y0 * np.sin(th)) + 0j


AMPLITUDES = ("none", "circle")


def low_frequency_anchors(N: int, count: int = 9) -> np.ndarray:
    """Indices of the ``count`` frequencies closest to k = 0."""
    K = freq_indices(N)
    return np.argsort(np.hypot(K[:, 0], K[:, 1]), kind="stable")[:count]


def build_circle(N: int, eps_amp: float = 1e-7, seed: int = 0) -> tuple[SeparatedAmplitude, SeparatedAmplitude]:
    """Separations of a+ and a-, anchored at the Y0 singularity near k = 0."""
    ap, am = circle_amplitudes(N)
    anchors = low_frequency_anchors(N)
    return (build_separated(ap, N, eps_amp, seed, anchors=anchors),
            build_separated(am, N, eps_amp, seed + 1, anchors=anchors))
