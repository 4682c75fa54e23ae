"""Independent correctness checks for the state-construction pipeline.

Two families of checks live here.  The first discretizes the time-dependent
Schroedinger equation directly: wave functions built independently at t-dt,
t, t+dt (fresh mode solves, no propagator) are combined into the centered
residual i hbar dPsi/dt - H Psi, which must vanish at second order in dt.
The second specializes the pipeline to the static oscillator, where every
quantity has a closed form: the Gaussian-envelope coefficients A, B and the
phase Theta admit trigonometric expressions, and at m0 = omega0 = hbar = 1
they reduce to Nieto's displaced-squeezed-state coefficient set (F2, F3,
F4, A, B).  Square roots of the time-evolved identities are branch-tracked
by continuity from their principal values at t = 0, mirroring the Theta
unwrap; the identities are branch-sensitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import hermite as hermite_poly
from scipy.integrate import trapezoid

from ._numerics import continuous_sqrt, second_derivative
from .errors import GridError, PhaseUnwrapError
from .mode_solver import (
    ModeTrajectory,
    SqueezeParams,
    apply_squeeze,
    evolve_mode,
    polar_decompose,
    static_mode,
)
from .profiles import OscillatorProfile, evaluate_profile
from .states import StateSpec, classical_trajectory, dsn_wavefunction, spatial_grid


@dataclass(frozen=True)
class StaticCoefficients:
    """Gaussian-envelope coefficients of the static-oscillator closed form.

    A_nu = 1/(sqrt(2 hbar) rho_nu) sets the Hermite argument, B_nu the
    quadratic exponent (Re B_nu = 1/(4 hbar rho_nu^2) > 0 for
    normalizability), and theta_nu is the unwrapped mode phase.
    """

    A_nu: float
    B_nu: complex
    theta_nu: float


@dataclass(frozen=True)
class NietoCoefficients:
    """Static-oscillator coefficient set (F2, F3, F4) and, when a time is
    involved, the evolution factors (A, B)."""

    F2: complex
    F3: complex
    F4: float
    A: complex | None = None
    B: complex | None = None


def _static_mode_nu(sq: SqueezeParams, m0: float, omega0: float, t):
    """Closed-form squeezed static mode and derivative (no pipeline calls)."""
    t = np.asarray(t, dtype=float)
    c, s_nu = math.cosh(sq.r), math.sinh(sq.r) * np.exp(-1j * sq.phi)
    norm = math.sqrt(2.0 * m0 * omega0)
    u = (c * np.exp(-1j * omega0 * t) + s_nu * np.exp(1j * omega0 * t)) / norm
    u_dot = -1j * omega0 * (c * np.exp(-1j * omega0 * t) - s_nu * np.exp(1j * omega0 * t)) / norm
    return u, u_dot


def static_coefficients(
    sq: SqueezeParams, m0: float, omega0: float, hbar: float, t: float
) -> StaticCoefficients:
    """Closed-form A_nu, B_nu, theta_nu of the squeezed static oscillator.

    theta_nu is continuous in t with the principal value at t = 0 (the
    argument of the squeeze-mixed phasor never leaves (-pi/2, pi/2), so the
    unwrapped phase is omega0 t plus a bounded correction).
    """
    if m0 <= 0 or omega0 <= 0:
        raise ValueError(f"m0 and omega0 must be positive, got ({m0}, {omega0})")
    r, phi = sq.r, sq.phi
    two_wt = 2.0 * omega0 * t - phi
    envelope = math.cosh(2.0 * r) + math.sinh(2.0 * r) * math.cos(two_wt)
    a_nu = math.sqrt(m0 * omega0 / hbar) / math.sqrt(envelope)
    theta = omega0 * t - math.atan2(
        math.sinh(r) * math.sin(two_wt), math.cosh(r) + math.sinh(r) * math.cos(two_wt)
    )
    c, s = math.cosh(r), math.sinh(r)
    zp = c * np.exp(1j * omega0 * t) + s * np.exp(1j * (phi - omega0 * t))
    zm = c * np.exp(1j * omega0 * t) - s * np.exp(1j * (phi - omega0 * t))
    b_nu = (m0 * omega0 / (2.0 * hbar)) * zm / zp
    return StaticCoefficients(A_nu=float(a_nu), B_nu=complex(b_nu), theta_nu=float(theta))


def nieto_F(sq: SqueezeParams) -> NietoCoefficients:
    """Displaced-squeezed-state coefficients F2, F3, F4 of the squeeze."""
    r, phi = sq.r, sq.phi
    c, s = math.cosh(r), math.sinh(r)
    eip = np.exp(1j * phi)
    f2 = (1.0 - 1j * math.sin(phi) * s * (c + eip * s)) / (
        (c + math.cos(phi) * s) * (c + eip * s)
    )
    f3 = (c + np.conj(eip) * s) / (c + eip * s)
    f4 = math.sqrt(c**2 + s**2 + 2.0 * math.cos(phi) * c * s)
    return NietoCoefficients(F2=complex(f2), F3=complex(f3), F4=float(f4))


def nieto_AB(sq: SqueezeParams, t: float) -> NietoCoefficients:
    """Evolution factors A, B of the static-oscillator closed form.

    Convention m0 = omega0 = hbar = 1.  B = cos t + i F2 sin t and
    A = (F4^2 B - 2 i sin t) / (F4^2 B); A stays on the unit circle.
    """
    f = nieto_F(sq)
    b = math.cos(t) + 1j * f.F2 * math.sin(t)
    a = (f.F4**2 * b - 2j * math.sin(t)) / (f.F4**2 * b)
    return NietoCoefficients(F2=f.F2, F3=f.F3, F4=f.F4, A=complex(a), B=complex(b))


def nieto_t0_identity_residuals(sq: SqueezeParams) -> dict:
    """Residuals of the t = 0 identities A_nu(0) F4 = 1, B_nu(0) = F2 / 2,
    e^{-i theta_nu(0)} = sqrt(F3), at m0 = omega0 = hbar = 1."""
    f = nieto_F(sq)
    coeff = static_coefficients(sq, 1.0, 1.0, 1.0, 0.0)
    return {
        "A_nu_F4": abs(coeff.A_nu * f.F4 - 1.0),
        "B_nu_F2": abs(coeff.B_nu - f.F2 / 2.0),
        "theta_F3": abs(np.exp(-1j * coeff.theta_nu) - np.sqrt(f.F3)),
    }


def _branch_grid(sq: SqueezeParams, t: float) -> np.ndarray:
    # the phase of A advances at up to 2 e^{2r}; keep steps well under pi
    count = max(64, int(math.ceil(abs(t) * 6.0 * math.exp(2.0 * sq.r))) + 1)
    return np.linspace(0.0, t, count)

def nieto_time_identity_residuals(sq: SqueezeParams, t: float) -> dict:
    """Residuals of the time-evolved identities A_nu = 1/(F4 B sqrt(A)),
    B_nu = (F2 cos t + i sin t)/(2 (cos t + i F2 sin t)), and
    e^{-i theta_nu} = sqrt(F3 A), with branch-tracked square roots.

    Convention m0 = omega0 = hbar = 1.  The branches of sqrt(A) and
    sqrt(F3 A) follow continuity in t from their principal values at t = 0.
    """
    f = nieto_F(sq)
    ts = _branch_grid(sq, t)
    b_path = np.cos(ts) + 1j * f.F2 * np.sin(ts)
    a_path = (f.F4**2 * b_path - 2j * np.sin(ts)) / (f.F4**2 * b_path)
    sqrt_a = continuous_sqrt(a_path)[-1]
    sqrt_f3a = continuous_sqrt(f.F3 * a_path)[-1]
    a, b = a_path[-1], b_path[-1]
    coeff = static_coefficients(sq, 1.0, 1.0, 1.0, t)
    return {
        "A_nu": abs(coeff.A_nu - 1.0 / (f.F4 * b * sqrt_a)),
        "B_nu": abs(
            coeff.B_nu
            - (f.F2 * math.cos(t) + 1j * math.sin(t))
            / (2.0 * (math.cos(t) + 1j * f.F2 * math.sin(t)))
        ),
        "theta": abs(np.exp(-1j * coeff.theta_nu) - sqrt_f3a),
    }


def static_closed_form_wavefunction(
    sq: SqueezeParams,
    n: int,
    alpha: complex,
    t: float,
    x: np.ndarray,
    m0: float = 1.0,
    omega0: float = 1.0,
    hbar: float = 1.0,
) -> np.ndarray:
    """Displaced-squeezed number-state amplitude from the closed form alone.

    Built entirely from static_coefficients and the trigonometric mode
    expressions, with the Hermite polynomial evaluated through the numpy
    polynomial basis: an independent route against dsn_wavefunction.
    """
    coeff = static_coefficients(sq, m0, omega0, hbar, t)
    u_nu, ud_nu = _static_mode_nu(sq, m0, omega0, t)
    alpha = complex(alpha)
    x_c = math.sqrt(hbar) * 2.0 * (alpha * u_nu).real
    p_c = math.sqrt(hbar) * m0 * 2.0 * (alpha * ud_nu).real
    x = np.asarray(x, dtype=float)
    z = coeff.A_nu * (x - x_c)
    unit = np.zeros(n + 1)
    unit[n] = 1.0
    hermite_vals = hermite_poly.hermval(z, unit)
    log_norm = -0.5 * (n * math.log(2.0) + math.lgamma(n + 1.0))
    prefactor = math.exp(log_norm) * math.sqrt(coeff.A_nu / math.sqrt(math.pi))
    phase = (
        -coeff.theta_nu * (n + 0.5)
        + p_c * x / hbar
        - p_c * x_c / (2.0 * hbar)
    )
    return (
        prefactor
        * np.exp(1j * phase)
        * hermite_vals
        * np.exp(-coeff.B_nu * (x - x_c) ** 2)
    )


def crosscheck_static(
    sq: SqueezeParams,
    n: int,
    alpha: complex,
    t: float,
    x: np.ndarray | None = None,
    m0: float = 1.0,
    omega0: float = 1.0,
    hbar: float = 1.0,
) -> dict:
    """Compare the general pipeline against the static closed form.

    Route (a): closed-form static mode sampled from 0 to t, squeezed,
    polar-decomposed for the unwrapped phase, then dsn_wavefunction.
    Route (b): static_closed_form_wavefunction.  The report carries the max
    pointwise amplitude difference plus all coefficient-identity residuals.
    """
    if t < 0:
        raise ValueError(f"crosscheck time must be >= 0, got {t}")
    if t == 0:
        ts = np.array([0.0])
    else:
        count = max(64, int(math.ceil(t * omega0 * 6.0 * math.exp(2.0 * sq.r))) + 1)
        ts = np.linspace(0.0, t, count)
    base = static_mode(m0, omega0, ts)
    traj_nu = apply_squeeze(base, sq)
    _, theta_arr = polar_decompose(traj_nu)
    point = traj_nu.point(len(traj_nu) - 1)
    spec = StateSpec(n=n, alpha=alpha, squeeze=sq, hbar=hbar)
    if x is None:
        x = spatial_grid(point, hbar, n=n, alpha=alpha)
    psi_pipeline = dsn_wavefunction(spec, point, x, theta=float(theta_arr[-1]))
    psi_closed = static_closed_form_wavefunction(sq, n, alpha, t, x, m0, omega0, hbar)
    max_diff = float(np.max(np.abs(psi_pipeline.psi - psi_closed)))
    report = {
        "r": sq.r,
        "phi": sq.phi,
        "n": n,
        "alpha_re": complex(alpha).real,
        "alpha_im": complex(alpha).imag,
        "t": float(t),
        "max_pointwise_diff": max_diff,
    }
    if m0 == 1.0 and omega0 == 1.0 and hbar == 1.0:
        report["t0_identities"] = nieto_t0_identity_residuals(sq)
        report["time_identities"] = nieto_time_identity_residuals(sq, t)
    return report


def schrodinger_residual(
    spec: StateSpec,
    profile: OscillatorProfile,
    traj: ModeTrajectory,
    t: float,
    dt: float,
    x: np.ndarray | None = None,
    rel_tol: float = 1e-11,
) -> float:
    """Relative residual of i hbar dPsi/dt = H Psi at time t.

    The time derivative is the centered difference of wave functions built
    independently at t - dt and t + dt from fresh mode solves started at the
    trajectory's first sample; H Psi uses the 8th-order spatial stencil.
    Returns ||i hbar dPsi/dt - H Psi|| / ||H Psi|| in L2 on the grid.
    """
    if not 0.0 < dt <= 1e-3:
        raise ValueError(f"dt must lie in (0, 1e-3], got {dt}")
    t0, t_end = float(traj.t[0]), float(traj.t[-1])
    if t - dt < t0 - 1e-12 or t + dt > t_end + 1e-12:
        raise ValueError(f"t +- dt = [{t - dt}, {t + dt}] not inside span [{t0}, {t_end}]")
    span_scan = np.linspace(t0, max(t + dt, t0 + 1e-9), 512)
    omega_max = float(np.sqrt(np.max(profile.omega_sq(span_scan))))
    boost = math.exp(2.0 * spec.squeeze.r)
    if dt * (spec.n + 1.0) * max(omega_max, 1e-12) * boost > 0.25:
        raise GridError(
            f"time step dt={dt} too large for n={spec.n}, omega~{omega_max:.3g}, "
            f"r={spec.squeeze.r} (phase advance above 0.25 rad)"
        )

    eval_times = np.array([t - dt, t, t + dt])
    density = max(256, int(math.ceil((t + dt - t0) * 16.0 * max(omega_max, 0.25) * boost)) + 1)
    for attempt in range(3):
        path = np.union1d(np.linspace(t0, t + dt, density), eval_times)
        base = evolve_mode(profile, traj.point(0), path, rel_tol=rel_tol)
        mode_nu = apply_squeeze(base, spec.squeeze)
        try:
            _, theta_arr = polar_decompose(mode_nu)
            break
        except PhaseUnwrapError:
            if attempt == 2:
                raise
            density *= 4

    indices = [int(np.argmin(np.abs(path - s))) for s in eval_times]
    points = [mode_nu.point(i) for i in indices]
    thetas = [float(theta_arr[i]) for i in indices]
    if x is None:
        x = spatial_grid(points[1], spec.hbar, n=spec.n, alpha=spec.alpha)
    psis = [
        dsn_wavefunction(spec, pt, x, theta=th).psi for pt, th in zip(points, thetas)
    ]
    hbar = spec.hbar
    dpsi_dt = (psis[2] - psis[0]) / (2.0 * dt)
    mass, omega_sq = evaluate_profile(profile, t)
    dx = float(x[1] - x[0])
    h_psi = -(hbar**2) / (2.0 * mass) * second_derivative(psis[1], dx) + (
        0.5 * mass * omega_sq * x**2
    ) * psis[1]
    residual = 1j * hbar * dpsi_dt - h_psi
    num = math.sqrt(float(trapezoid(np.abs(residual) ** 2, x)))
    den = math.sqrt(float(trapezoid(np.abs(h_psi) ** 2, x)))
    return num / den


def classical_equation_residual(traj: ModeTrajectory, alpha: complex, hbar: float) -> dict:
    """Finite-difference check that the displaced-state center obeys the
    classical equation of motion m x'' + m' x' + m omega^2 x = 0 and that
    p_c = m x_c'.

    Requires a uniform trajectory grid; derivatives use the 8th-order
    stencil on interior samples only.  Returns the relative equation
    residual and the max |p_c - m x_c'|.
    """
    t = traj.t
    if t.size < 17:
        raise ValueError("need at least 17 uniform samples")
    dt = (t[-1] - t[0]) / (t.size - 1)
    if np.max(np.abs(np.diff(t) - dt)) > 1e-9 * dt:
        raise ValueError("trajectory time grid must be uniform")
    if traj.profile is None:
        raise ValueError("trajectory must carry its profile")
    x_c, p_c = classical_trajectory(alpha, traj, hbar)
    d1_w = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
    d2_w = np.array(
        [-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560]
    )
    # 'valid' convolution: interior samples 4 .. N-5; stencil weights reversed
    xd = np.convolve(x_c, d1_w[::-1], mode="valid") / dt
    xdd = np.convolve(x_c, d2_w[::-1], mode="valid") / dt**2
    sl = slice(4, t.size - 4)
    mass = traj.profile.mass(t[sl])
    mass_dot = traj.profile.mass_dot(t[sl])
    omega_sq = traj.profile.omega_sq(t[sl])
    residual = mass * xdd + mass_dot * xd + mass * omega_sq * x_c[sl]
    scale = np.max(np.abs(mass * xdd) + np.abs(mass_dot * xd) + np.abs(mass * omega_sq * x_c[sl]))
    if scale == 0.0:
        return {"equation_residual": 0.0, "momentum_mismatch": 0.0}
    return {
        "equation_residual": float(np.max(np.abs(residual)) / scale),
        "momentum_mismatch": float(np.max(np.abs(p_c[sl] - mass * xd))),
    }
