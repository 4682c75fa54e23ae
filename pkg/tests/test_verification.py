import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from tdho import (
    SqueezeParams,
    StateSpec,
    apply_squeeze,
    classical_equation_residual,
    crosscheck_static,
    dsn_wavefunction,
    evolve_mode,
    nieto_AB,
    nieto_F,
    nieto_t0_identity_residuals,
    nieto_time_identity_residuals,
    polar_decompose,
    schrodinger_residual,
    spatial_grid,
    static_closed_form_wavefunction,
    static_coefficients,
    static_mode,
    wkb_mode,
)
from tdho._numerics import second_derivative


# ------------------------------------------------------- static coefficients
def test_static_coefficients_unsqueezed():
    coeff = static_coefficients(SqueezeParams(0.0, 0.0), 2.0, 1.5, 2.0, 3.0)
    assert coeff.A_nu == pytest.approx(math.sqrt(2.0 * 1.5 / 2.0), abs=1e-15)
    assert coeff.B_nu == pytest.approx(2.0 * 1.5 / (2.0 * 2.0), abs=1e-15)
    assert coeff.theta_nu == pytest.approx(1.5 * 3.0, abs=1e-12)


def test_static_coefficients_squeezed_width():
    # A_nu(0) = e^{-r} at phi=0, m0=omega0=hbar=1
    coeff = static_coefficients(SqueezeParams(0.5, 0.0), 1.0, 1.0, 1.0, 0.0)
    assert coeff.A_nu == pytest.approx(0.6065306597126334, abs=1e-15)


def test_static_coefficients_match_pipeline(rng):
    # A_nu = 1/(sqrt(2 hbar) rho_nu), Re B_nu = 1/(4 hbar rho_nu^2),
    # theta_nu = unwrapped mode phase
    hbar = 1.0
    for _ in range(20):
        sq = SqueezeParams(rng.uniform(0, 1.5), rng.uniform(0, 2 * math.pi))
        t = rng.uniform(0.0, 8.0)
        ts = np.linspace(0.0, max(t, 1e-6), 4096)
        traj = apply_squeeze(static_mode(1.0, 1.0, ts), sq)
        rho_arr, theta_arr = polar_decompose(traj)
        rho = rho_arr[-1]
        coeff = static_coefficients(sq, 1.0, 1.0, hbar, float(ts[-1]))
        assert abs(coeff.A_nu - 1.0 / (math.sqrt(2.0 * hbar) * rho)) <= 1e-12
        assert abs(coeff.B_nu.real - 1.0 / (4.0 * hbar * rho**2)) <= 1e-12
        assert abs(coeff.theta_nu - theta_arr[-1]) <= 1e-10
        assert coeff.B_nu.real > 0
        assert abs(coeff.A_nu**2 - 2.0 * coeff.B_nu.real) <= 1e-12


# ------------------------------------------------------- Nieto coefficients
def test_nieto_F_unsqueezed():
    f = nieto_F(SqueezeParams(0.0, 0.0))
    assert f.F2 == pytest.approx(1.0, abs=1e-15)
    assert f.F3 == pytest.approx(1.0, abs=1e-15)
    assert f.F4 == pytest.approx(1.0, abs=1e-15)


def test_nieto_F_frozen_values():
    f = nieto_F(SqueezeParams(0.5, 0.0))
    # F4 = cosh r + sinh r = e^r, F2 = e^{-2r} at phi = 0
    assert f.F4 == pytest.approx(1.6487212707001282, abs=1e-15)
    assert f.F2 == pytest.approx(0.36787944117144233, abs=1e-14)


def test_nieto_F3_is_pure_phase(rng):
    for _ in range(25):
        f = nieto_F(SqueezeParams(rng.uniform(0, 2), rng.uniform(0, 2 * math.pi)))
        assert abs(abs(f.F3) - 1.0) <= 1e-14


def test_nieto_t0_identities():
    for r in (0.0, 0.25, 0.5, 1.0, 1.5):
        for phi in np.linspace(0.0, 2 * math.pi, 8, endpoint=False):
            residuals = nieto_t0_identity_residuals(SqueezeParams(r, phi))
            assert max(residuals.values()) <= 1e-12


def test_nieto_AB_at_time_zero():
    ab = nieto_AB(SqueezeParams(0.8, 2.1), 0.0)
    assert ab.A == pytest.approx(1.0, abs=1e-15)
    assert ab.B == pytest.approx(1.0, abs=1e-15)


def test_nieto_AB_unsqueezed_evolution():
    # r=0: B = e^{it} and A_nu(t) stays 1 (constant-width coherent motion)
    sq = SqueezeParams(0.0, 0.0)
    for t in (0.4, 1.7, 5.9):
        ab = nieto_AB(sq, t)
        assert ab.B == pytest.approx(complex(math.cos(t), math.sin(t)), abs=1e-14)
        assert static_coefficients(sq, 1, 1, 1, t).A_nu == pytest.approx(1.0, abs=1e-14)


def test_nieto_time_identities_random_sweep(rng):
    for _ in range(30):
        sq = SqueezeParams(rng.uniform(0, 1.5), rng.uniform(0, 2 * math.pi))
        t = rng.uniform(0.0, 2 * math.pi)
        residuals = nieto_time_identity_residuals(sq, t)
        assert max(residuals.values()) <= 1e-10


# ------------------------------------------------------- pipeline crosscheck
def test_crosscheck_trivial_case():
    report = crosscheck_static(SqueezeParams(0.0, 0.0), 0, 0j, 0.0)
    assert report["max_pointwise_diff"] <= 1e-12


def test_crosscheck_generic_case():
    report = crosscheck_static(SqueezeParams(0.5, 1.0), 3, 1.0 + 0.5j, 2.7)
    assert report["max_pointwise_diff"] <= 1e-10
    assert max(report["t0_identities"].values()) <= 1e-12
    assert max(report["time_identities"].values()) <= 1e-10


def test_crosscheck_detects_phase_branch_corruption():
    # a forced 2 pi jump in theta flips e^{-i theta (n+1/2)} sign
    sq = SqueezeParams(0.4, 0.7)
    n, alpha, t = 2, 0.5 + 0j, 1.9
    ts = np.linspace(0.0, t, 2048)
    traj = apply_squeeze(static_mode(1.0, 1.0, ts), sq)
    _, theta_arr = polar_decompose(traj)
    point = traj.point(len(traj) - 1)
    spec = StateSpec(n=n, alpha=alpha, squeeze=sq)
    x = spatial_grid(point, 1.0, n=n, alpha=alpha)
    corrupted = dsn_wavefunction(spec, point, x, theta=float(theta_arr[-1]) + 2 * math.pi)
    closed = static_closed_form_wavefunction(sq, n, alpha, t, x)
    assert np.max(np.abs(corrupted.psi - closed)) > 0.1


# ------------------------------------------------------- Schroedinger residual
def test_residual_static_ground(static_profile):
    t_grid = np.linspace(0.0, 2.0, 41)
    traj = evolve_mode(static_profile, static_mode(1, 1, 0.0), t_grid)
    spec = StateSpec(n=0)
    assert schrodinger_residual(spec, static_profile, traj, 1.0, 1e-4) <= 1e-7


def test_residual_quench_dsn_state(quench_profile):
    t_grid = np.linspace(0.0, 10.0, 41)
    traj = evolve_mode(quench_profile, wkb_mode(quench_profile, 0.0), t_grid)
    spec = StateSpec(n=2, alpha=1.0 + 0j, squeeze=SqueezeParams(0.5, 0.0))
    r1 = schrodinger_residual(spec, quench_profile, traj, 6.0, 1e-4)
    assert r1 <= 1e-4
    # halving dt shrinks the residual about 4x (second order)
    big = schrodinger_residual(spec, quench_profile, traj, 6.0, 8e-4)
    small = schrodinger_residual(spec, quench_profile, traj, 6.0, 4e-4)
    assert big / small == pytest.approx(4.0, abs=0.6)


def test_residual_negative_control(quench_profile):
    # dropping the plane-wave factor must blow the residual up to O(1)
    t, dt = 6.0, 1e-4
    spec = StateSpec(n=2, alpha=1.0 + 0j, squeeze=SqueezeParams(0.5, 0.0))
    hbar = 1.0
    path = np.union1d(np.linspace(0.0, t + dt, 4096), [t - dt, t, t + dt])
    base = evolve_mode(quench_profile, wkb_mode(quench_profile, 0.0), path)
    mode_nu = apply_squeeze(base, spec.squeeze)
    _, theta_arr = polar_decompose(mode_nu)
    idx = [int(np.argmin(np.abs(path - s))) for s in (t - dt, t, t + dt)]
    x = spatial_grid(mode_nu.point(idx[1]), hbar, n=spec.n, alpha=spec.alpha)
    psis = []
    for k in idx:
        point = mode_nu.point(k)
        grid = dsn_wavefunction(spec, point, x, theta=float(theta_arr[k]))
        p_c = grid.meta["p_c"]
        psis.append(grid.psi * np.exp(-1j * p_c * x / hbar))
    dpsi_dt = (psis[2] - psis[0]) / (2 * dt)
    mass = float(quench_profile.mass(t))
    omega_sq = float(quench_profile.omega_sq(t))
    dx = float(x[1] - x[0])
    h_psi = -0.5 / mass * second_derivative(psis[1], dx) + 0.5 * mass * omega_sq * x**2 * psis[1]
    residual = 1j * dpsi_dt - h_psi
    rel = math.sqrt(trapezoid(np.abs(residual) ** 2, x)) / math.sqrt(
        trapezoid(np.abs(h_psi) ** 2, x)
    )
    assert rel >= 1e-1


def test_residual_rejects_large_dt(quench_profile):
    t_grid = np.linspace(0.0, 10.0, 41)
    traj = evolve_mode(quench_profile, wkb_mode(quench_profile, 0.0), t_grid)
    spec = StateSpec(n=0)
    with pytest.raises(ValueError, match="dt"):
        schrodinger_residual(spec, quench_profile, traj, 6.0, 2e-3)


# ------------------------------------------------------- classical center
def test_classical_residual_quench(quench_profile):
    t_grid = np.linspace(0.0, 10.0, 2001)
    traj = evolve_mode(quench_profile, wkb_mode(quench_profile, 0.0), t_grid)
    traj_nu = apply_squeeze(traj, SqueezeParams(0.5, 0.3))
    result = classical_equation_residual(traj_nu, 1.0 + 0.5j, 1.0)
    assert result["equation_residual"] <= 1e-6
    assert result["momentum_mismatch"] <= 1e-6
