"""Expectation values: quadrature-based and closed-form moments, energies.

Quadrature uses the composite trapezoid rule on the uniform grid, which is
exponentially accurate for smooth integrands that decay below tolerance at
the grid ends; momentum moments differentiate with the 8th-order stencil
rather than an FFT to avoid periodicity artifacts at truncated boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from ._numerics import derivative, second_derivative
from .errors import GridError
from .mode_solver import ModePoint
from .states import COVERAGE_GUARD, StateSpec, WaveFunctionGrid, classical_trajectory


@dataclass(frozen=True)
class MomentSet:
    """First and second moments of position and momentum."""

    mean_x: float
    mean_p: float
    mean_x2: float
    mean_p2: float
    var_x: float
    var_p: float
    uncertainty_product: float

    @staticmethod
    def from_means(mean_x, mean_p, mean_x2, mean_p2) -> "MomentSet":
        var_x = mean_x2 - mean_x**2
        var_p = mean_p2 - mean_p**2
        product = math.sqrt(max(var_x, 0.0) * max(var_p, 0.0))
        return MomentSet(
            mean_x=float(mean_x),
            mean_p=float(mean_p),
            mean_x2=float(mean_x2),
            mean_p2=float(mean_p2),
            var_x=float(var_x),
            var_p=float(var_p),
            uncertainty_product=float(product),
        )

    def to_dict(self) -> dict:
        return {
            "mean_x": self.mean_x,
            "mean_p": self.mean_p,
            "mean_x2": self.mean_x2,
            "mean_p2": self.mean_p2,
            "var_x": self.var_x,
            "var_p": self.var_p,
            "uncertainty_product": self.uncertainty_product,
        }


def inner_product(f: WaveFunctionGrid, g: WaveFunctionGrid) -> complex:
    """Trapezoid overlap integral of f* g on their (identical) grid."""
    if f.x.shape != g.x.shape or not np.array_equal(f.x, g.x):
        raise GridError("inner_product requires identical x grids")
    return complex(trapezoid(np.conj(f.psi) * g.psi, f.x))


def quadrature_moments(psi: WaveFunctionGrid, hbar: float) -> MomentSet:
    """Moments of one wave function by direct quadrature.

    <x>, <x^2> integrate |psi|^2 directly; <p>, <p^2> apply -i hbar d/dx
    with the high-order stencil before integrating.  Moments are divided by
    the computed norm, so slightly unnormalized input is handled gracefully.
    """
    ratio = psi.boundary_ratio()
    if ratio > COVERAGE_GUARD:
        raise GridError(
            f"quadrature_moments: boundary amplitude {ratio:.2e} of peak; "
            "grid does not cover the state"
        )
    x = psi.x
    density = np.abs(psi.psi) ** 2
    norm = float(trapezoid(density, x))
    mean_x = float(trapezoid(x * density, x)) / norm
    mean_x2 = float(trapezoid(x**2 * density, x)) / norm
    dpsi = derivative(psi.psi, psi.dx)
    d2psi = second_derivative(psi.psi, psi.dx)
    mean_p = float(np.real(trapezoid(np.conj(psi.psi) * (-1j * hbar) * dpsi, x))) / norm
    mean_p2 = float(np.real(trapezoid(np.conj(psi.psi) * (-(hbar**2)) * d2psi, x))) / norm
    return MomentSet.from_means(mean_x, mean_p, mean_x2, mean_p2)


def analytic_moments(spec: StateSpec, mode_nu: ModePoint) -> MomentSet:
    """Closed-form moments of the displaced-squeezed number state.

    <x> = x_c, <p> = p_c, <x^2> = hbar |u|^2 (2n+1) + x_c^2 and
    <p^2> = hbar m^2 |u'|^2 (2n+1) + p_c^2 on the squeezed mode.
    """
    hbar = spec.hbar
    center = classical_trajectory(spec.alpha, mode_nu, hbar)
    factor = hbar * (2.0 * spec.n + 1.0)
    var_x = factor * abs(mode_nu.u) ** 2
    var_p = factor * mode_nu.mass**2 * abs(mode_nu.u_dot) ** 2
    return MomentSet.from_means(
        center.x_c, center.p_c, var_x + center.x_c**2, var_p + center.p_c**2
    )


def analytic_energy(n: int, mode: ModePoint, omega_sq: float, hbar: float) -> float:
    """Number-state energy <H> = hbar m (|u'|^2 + omega^2 |u|^2)(n + 1/2).

    Requires the Wronskian normalization; reduces to hbar omega0 (n + 1/2)
    on the static mode and picks up cosh(2r) under squeezing.
    """
    return float(
        hbar
        * mode.mass
        * (abs(mode.u_dot) ** 2 + omega_sq * abs(mode.u) ** 2)
        * (n + 0.5)
    )


def quadrature_energy(psi: WaveFunctionGrid, mass: float, omega_sq: float, hbar: float) -> float:
    """<p^2/2m + m omega^2 x^2 / 2> by quadrature; ground truth for energies."""
    moments = quadrature_moments(psi, hbar)
    return moments.mean_p2 / (2.0 * mass) + 0.5 * mass * omega_sq * moments.mean_x2
