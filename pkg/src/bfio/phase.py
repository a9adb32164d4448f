"""Phase functions Phi(x, k), their polar form Psi(x, p), and the kernel.

A phase is a plain callable ``phi(x1, x2, k1, k2)`` on broadcastable arrays.
Only directions k = (cos 2pi p2, sin 2pi p2) are ever passed by the fast
algorithm, so phases need not handle k = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable
import math

import numpy as np

from .grid import polar_map

PhiFunc = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], np.ndarray]

SQRT1_2 = math.sqrt(0.5)
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseSpec:
    name: str
    phi: PhiFunc

    def __call__(self, x, k) -> np.ndarray:
        """Phi at (..., 2) arrays ``x`` and ``k``."""
        x = np.asarray(x, dtype=float)
        k = np.asarray(k, dtype=float)
        return self.phi(x[..., 0], x[..., 1], k[..., 0], k[..., 1])

    def psi_xy(self, x1, x2, p1, p2) -> np.ndarray:
        """Psi on separate broadcastable coordinate arrays."""
        a = TWO_PI * p2
        return SQRT1_2 * p1 * self.phi(x1, x2, np.cos(a), np.sin(a))

    def psi(self, x, p) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        return self.psi_xy(x[..., 0], x[..., 1], p[..., 0], p[..., 1])


def cis(cycles) -> np.ndarray:
    """exp(2*pi*i*cycles), reducing the argument modulo 1 first."""
    t = np.asarray(cycles, dtype=float)
    t = TWO_PI * (t - np.rint(t))
    out = np.empty(t.shape, dtype=complex)
    out.real = np.cos(t)
    out.imag = np.sin(t)
    return out


def psi(phase: PhaseSpec, x, p) -> np.ndarray:
    return phase.psi(x, p)


def kernel(phase: PhaseSpec, N: int, x, p) -> np.ndarray:
    """exp(2*pi*i*N*Psi(x, p))."""
    return cis(N * phase.psi(x, p))


def full_phase(phase: PhaseSpec, x, k) -> np.ndarray:
    """Phi(x, k) for arbitrary integer or real k, with Phi(x, 0) = 0."""
    k = np.asarray(k, dtype=float)
    r = np.hypot(k[..., 0], k[..., 1])
    safe = np.where(r > 0, r, 1.0)
    val = phase(x, k / safe[..., None]) * r
    return np.where(r > 0, val, 0.0)


# ----------------------------------------------------------------------------
# Built-in phases

def _fourier(x1, x2, k1, k2):
    return x1 * k1 + x2 * k2


def fourier_phase() -> PhaseSpec:
    return PhaseSpec("fourier", _fourier)


def ellipse_axes(x1, x2):
    s = np.sin(TWO_PI * x1) * np.sin(TWO_PI * x2)
    c = np.cos(TWO_PI * x1) * np.cos(TWO_PI * x2)
    return (2.0 + s) / 3.0, (2.0 + c) / 3.0


def _ellipse(x1, x2, k1, k2):
    c1, c2 = ellipse_axes(x1, x2)
    return x1 * k1 + x2 * k2 + np.sqrt((c1 * c1) * (k1 * k1) + (c2 * c2) * (k2 * k2))


def ellipse_phase() -> PhaseSpec:
    """Integration over ellipses with axes c1(x), c2(x)."""
    return PhaseSpec("ellipse", _ellipse)


def circle_radius(x1, x2):
    return (3.0 + np.sin(TWO_PI * x1) * np.sin(TWO_PI * x2)) / 4.0


def _circle(x1, x2, k1, k2):
    return x1 * k1 + x2 * k2 + circle_radius(x1, x2) * np.hypot(k1, k2)


def circle_phases() -> tuple[PhaseSpec, PhaseSpec]:
    """The +/- phases of the circle example; the formulas coincide."""
    return PhaseSpec("circle+", _circle), PhaseSpec("circle-", _circle)


def circle_phase() -> PhaseSpec:
    return PhaseSpec("circle", _circle)


PHASES: dict[str, Callable[[], PhaseSpec]] = {
    "fourier": fourier_phase,
    "ellipse": ellipse_phase,
    "circle": circle_phase,
}


def get_phase(name: str) -> PhaseSpec:
    try:
        return PHASES[name]()
    except KeyError:
        raise ValueError(f"unknown phase {name!r}; choose from {sorted(PHASES)}") from None


@dataclass
class HomogeneityReport:
    trials: int
    max_residual: float
    tolerance: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


def validate_homogeneity(phase: PhaseSpec, trials: int = 1000, seed: int = 0) -> HomogeneityReport:
    """Check Phi(x, lam*k) = lam*Phi(x, k) on random samples with lam in [0.5, 2]."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    x = rng.random((trials, 2))
    k = rng.uniform(-64.0, 64.0, (trials, 2))
    lam = rng.uniform(0.5, 2.0, trials)
    try:
        base = phase(x, k)
        scaled = phase(x, lam[:, None] * k)
        res = np.abs(scaled - lam * base) / np.maximum(1.0, np.abs(base))
        worst = float(np.max(res))
    except Exception:  # report-only
        worst = math.inf
    if not np.isfinite(worst):
        worst = math.inf
    return HomogeneityReport(trials, worst)


def roundtrip_error(phase: PhaseSpec, N: int) -> float:
    """Max |N*Psi(x, polar(k)) - Phi(x, k)| / (1 + |Phi|) over k in the lattice."""
    from .grid import freq_indices

    k = freq_indices(N)
    rng = np.random.default_rng(N)
    x = rng.random((k.shape[0], 2))
    lhs = N * phase.psi(x, polar_map(k, N))
    rhs = full_phase(phase, x, k)
    return float(np.max(np.abs(lhs - rhs) / (1.0 + np.abs(rhs))))
