"""Compiled inner loops."""

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _cis(th):
    th = th - np.rint(th)
    th *= 2.0 * math.pi
    return complex(math.cos(th), math.sin(th))


@numba.njit(cache=True)
def switch_apply(h, c, w, z, N, delta, out):
    """out[P, S, t] = sum_s exp(2 pi i N p1[s1] h[P, t, s2]) delta[P, S, s].

    The radial nodes are p1[s1] = c[P] + w * z[s1] with ``z`` symmetric
    about zero, so the kernel row splits as cis(N c h) * cis(N w h z[s1]) and
    mirrored nodes reuse the conjugate. ``h`` is (P, q*q, q); ``delta`` and
    ``out`` are (P, S, q*q) with s = s1*q + s2.
    """
    npairs, nt, q = h.shape
    ns = delta.shape[1]
    half = (q + 1) // 2
    acc = np.empty(ns, dtype=np.complex128)
    rot = np.empty(q, dtype=np.complex128)
    for P in range(npairs):
        for t in range(nt):
            acc[:] = 0.0
            for s2 in range(q):
                hv = N * h[P, t, s2]
                base = _cis(hv * c[P])
                b = hv * w
                for s1 in range(half):
                    r = _cis(b * z[s1])
                    rot[s1] = base * r
                    rot[q - 1 - s1] = base * r.conjugate()
                for s1 in range(q):
                    k = rot[s1]
                    s = s1 * q + s2
                    for j in range(ns):
                        acc[j] += k * delta[P, j, s]
            for j in range(ns):
                out[P, j, t] = acc[j]
