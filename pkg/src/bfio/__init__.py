"""Butterfly algorithm for 2-D discrete Fourier integral operators."""

from .amplitude import (SeparatedAmplitude, apply_with_amplitude, build_circle, build_separated,
                        circle_amplitudes)
from .bessel import bessel_j0, bessel_y0
from .butterfly import Plan, PlanConfig, apply, plan
from .grid import BoxId, freq_indices, polar_map, spatial_points
from .oracle import ErrorReport, benchmark, direct_full, direct_sampled, relative_error
from .phase import PhaseSpec, circle_phase, ellipse_phase, fourier_phase, get_phase

__all__ = [
    "BoxId", "ErrorReport", "PhaseSpec", "Plan", "PlanConfig", "SeparatedAmplitude",
    "apply", "apply_with_amplitude", "benchmark", "bessel_j0", "bessel_y0", "build_circle",
    "build_separated", "circle_amplitudes", "circle_phase", "direct_full", "direct_sampled",
    "ellipse_phase", "fourier_phase", "freq_indices", "get_phase", "plan", "polar_map",
    "relative_error", "spatial_points",
]
