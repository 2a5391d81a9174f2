import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topamp.circuit import EffectiveCircuit, derive_effective_circuit
from topamp.constants import TWO_PI
from topamp.errors import NegativeDrive, NonPositiveParameter
from topamp.meanfield import (EffectiveParams, aux_chain_steady_state,
                              duffing_analytic, duffing_numeric,
                              effective_params_from_meanfield,
                              matched_chain_inverse, matched_chain_kernel,
                              solve_operating_point)
from topamp.presets import get_preset


def bisect_duffing(xi, tol=1e-14):
    lo, hi = 0.0, max(2.0, (2.0 * xi) ** (1.0 / 3.0) + 1.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid**3 + 0.25 * mid - xi > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def test_duffing_zero_drive():
    assert duffing_analytic(0.0) == 0.0


def test_duffing_forward_pair():
    # forward-substituted pair: n = 0.5 gives xi = 0.5^3 + 0.5/4 = 0.25
    assert duffing_analytic(0.25) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("xi", [1e-3, 1.0, 1e3])
def test_duffing_against_bisection(xi):
    assert duffing_analytic(xi) == pytest.approx(bisect_duffing(xi), abs=1e-10)


def test_duffing_residual_over_range():
    xis = np.concatenate([np.linspace(0.0, 1e3, 2001),
                          np.logspace(-12, 3, 301)])
    worst = max(abs(duffing_analytic(x) ** 3 + duffing_analytic(x) / 4.0 - x)
                for x in xis)
    assert worst <= 1e-12


@settings(max_examples=200, deadline=None)
@given(n=st.floats(min_value=0.0, max_value=10.0, allow_nan=False))
def test_duffing_roundtrip_identity(n):
    xi = n**3 + n / 4.0
    assert duffing_analytic(xi) == pytest.approx(n, abs=1e-10)


def test_duffing_rejects_negative():
    with pytest.raises(NegativeDrive):
        duffing_analytic(-1e-9)


def test_duffing_numeric_undriven():
    roots, alphas = duffing_numeric(0.0, kappa=1.0, delta_pump=0.3, kerr_sum=0.1)
    assert roots == [0.0]
    assert alphas == [0j]


def test_duffing_numeric_linear_resonator():
    roots, alphas = duffing_numeric(0.7, kappa=2.0, delta_pump=0.0, kerr_sum=0.0)
    assert len(roots) == 1
    assert roots[0] == pytest.approx((2 * 0.7 / 2.0) ** 2, rel=1e-12)
    assert alphas[0] == pytest.approx(0.7 / 1.0, rel=1e-12)


@pytest.mark.parametrize("xi", [0.3, 0.5075, 1.294, 5.0])
def test_duffing_numeric_matches_zero_detuning_branch(xi):
    """With delta = -2 kappa n the root set contains x = kappa n / K."""
    kappa, K = 1.3, 0.02
    n = duffing_analytic(xi)
    omega_drive = math.sqrt(xi * kappa**3 / K)
    roots, _ = duffing_numeric(omega_drive, kappa=kappa,
                               delta_pump=-2.0 * kappa * n, kerr_sum=K)
    target = kappa * n / K
    assert any(abs(r - target) / target < 1e-9 for r in roots)


def test_matched_chain_inverse_identity():
    for N in range(2, 41):
        Jb = 1.7
        I = matched_chain_kernel(Jb, N)
        Iinv = matched_chain_inverse(Jb, N)
        err = np.abs(I @ Iinv - np.eye(N)).max()
        assert err <= 1e-12


def test_matched_chain_single_site():
    # the single site is both boundaries, so I_11 = Gamma = 2 J_b
    Jb = 0.8
    I = matched_chain_kernel(Jb, 1)
    assert I[0, 0] == pytest.approx(2 * Jb)
    assert (I @ matched_chain_inverse(Jb, 1))[0, 0] == pytest.approx(1.0, rel=1e-14)


def test_matched_chain_corner_element():
    Jb = 2.5
    Iinv = matched_chain_inverse(Jb, 3)
    assert Iinv[0, 2] == pytest.approx(-1.0 / (2 * Jb), rel=1e-14)


def test_aux_chain_pure_running_wave():
    beta = aux_chain_steady_state(2.0, J_b=1.0, J_ab=0.0, alpha=0.0, N=4)
    mags = np.abs(beta)
    assert np.allclose(mags, mags[0], rtol=1e-14)
    steps = np.angle(beta[1:] / beta[:-1])
    assert np.allclose(steps, -math.pi / 2.0, atol=1e-14)


def test_aux_chain_zero_inputs():
    beta = aux_chain_steady_state(0.0, J_b=1.0, J_ab=0.5, alpha=0.0, N=5)
    assert np.allclose(beta, 0.0)


def test_aux_chain_against_direct_solve():
    """The closed form solves I beta = Omega_b e_1 - i J_ab alpha e^{-i phi j}."""
    rng = np.random.default_rng(5)
    for _ in range(5):
        N = int(rng.integers(2, 9))
        Jb = float(rng.uniform(0.5, 3.0))
        Jab = float(rng.uniform(0.0, 1.0))
        Om = float(rng.uniform(0.0, 3.0))
        alpha = complex(rng.normal(), rng.normal())
        I = matched_chain_kernel(Jb, N)
        js = np.arange(1, N + 1)
        rhs = np.zeros(N, complex)
        rhs[0] = Om
        rhs -= 1j * Jab * alpha * np.exp(-1j * (math.pi / 2.0) * js)
        direct = np.linalg.solve(I, rhs)
        formula = aux_chain_steady_state(Om, Jb, Jab, alpha, N)
        assert np.abs(formula - direct).max() < 1e-12 * max(np.abs(direct).max(), 1.0)


def _ec_stub(J_a, K_s, K_c, kappa, omega_a=1.0, omega_b=1.0):
    return EffectiveCircuit(
        omega_a=omega_a, omega_b=omega_b, J_a=J_a, J_b=1.0, J_ab=0.1,
        K_s=K_s, K_c=K_c, kappa=kappa, Gamma=2.0, kappa_nl=0.005,
        Omega_b=0.0, Omega_a=0.0, E_C=1e-25, phi_zpf=1e-17, Z_a=50.0,
        Z_b=50.0, C_a_eq=4e-13, C_b_eq=4e-13, L_a_eq=1e-9, L_J=2e-9, L_Jp=4e-9)


def test_effective_params_no_pump():
    ec = _ec_stub(J_a=0.2, K_s=0.02, K_c=0.01, kappa=1.0, omega_a=5.0, omega_b=4.5)
    p = effective_params_from_meanfield(ec, 0.0, N=6, detuning_pump=-0.5)
    assert p.J == pytest.approx(0.2)
    assert p.g_s == 0.0 and p.g_c == 0.0
    assert p.delta == pytest.approx(-0.5)


def test_effective_params_table_values():
    """Plugging the tabulated J_a, K_c and photon number reproduces the
    tabulated J and g_c at the few-percent level."""
    K_c = TWO_PI * 2.29e6
    ec = _ec_stub(J_a=TWO_PI * -31.2e6, K_s=2 * K_c, K_c=K_c, kappa=TWO_PI * 406e6)
    p = effective_params_from_meanfield(ec, 41.0, N=8)
    assert p.J / TWO_PI / 1e6 == pytest.approx(156.0, rel=0.05)
    assert p.g_c / TWO_PI / 1e6 == pytest.approx(93.9, rel=0.05)
    assert p.g_s == pytest.approx(p.g_c, rel=1e-12)  # K_s = 2 K_c


def test_effective_params_zero_detuning_branch_exact():
    ec = _ec_stub(J_a=0.1, K_s=0.02, K_c=0.01, kappa=1.0)
    n = 0.8
    alpha_sq = ec.kappa * n / (ec.K_s + ec.K_c)
    p = effective_params_from_meanfield(ec, alpha_sq, N=4,
                                        detuning_pump=-2.0 * ec.kappa * n)
    assert abs(p.delta) <= 1e-12 * ec.kappa


def test_negative_bare_hopping_absorbed_into_phase():
    ec = _ec_stub(J_a=-0.3, K_s=0.0, K_c=0.0, kappa=1.0)
    p = effective_params_from_meanfield(ec, 0.0, N=4, detuning_pump=0.0)
    assert p.J == pytest.approx(0.3)
    assert p.phi == pytest.approx(math.pi / 2.0 + math.pi - 2 * math.pi)


def test_solve_operating_point_p1():
    """Full chain at the P1 design: photon number and exact zero detuning."""
    preset = get_preset("P1")
    ec = derive_effective_circuit(preset.circuit)
    sol, params = solve_operating_point(ec, preset.effective.N)
    assert sol.alpha_sq == pytest.approx(41.0, rel=0.05)
    assert abs(sol.n**3 + sol.n / 4.0 - sol.xi) <= 1e-12
    assert sol.alpha_sq == pytest.approx(abs(sol.alpha) ** 2, rel=1e-12)
    assert abs(params.delta) <= 1e-6 * params.kappa
    # numeric cubic agrees with the analytic branch
    roots, _ = duffing_numeric(ec.Omega_a, ec.kappa, sol.detuning_pump,
                               ec.K_s + ec.K_c)
    assert any(abs(r - sol.alpha_sq) / sol.alpha_sq < 1e-9 for r in roots)


@pytest.mark.parametrize("name,alpha_sq", [
    ("P1", 41.0), ("P1p", 175.0), ("P2", 3660.0), ("P3", 1730.0)])
def test_operating_point_photon_numbers(name, alpha_sq):
    preset = get_preset(name)
    ec = derive_effective_circuit(preset.circuit)
    sol, _ = solve_operating_point(ec, preset.effective.N)
    assert sol.alpha_sq == pytest.approx(alpha_sq, rel=0.05)


def test_effective_params_validation():
    with pytest.raises(NonPositiveParameter):
        EffectiveParams(N=0, delta=0.0, J=1.0, phi=0.0, kappa=1.0, g_s=0.0, g_c=0.0)
    with pytest.raises(NonPositiveParameter):
        EffectiveParams(N=4, delta=0.0, J=1.0, phi=0.0, kappa=0.0, g_s=0.0, g_c=0.0)
