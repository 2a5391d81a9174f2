"""Classical mean field of the pumped array.

The strong pump is distributed through the auxiliary chain as a running
wave; its steady state displaces every junction-array site by the same
complex amplitude alpha, which obeys a driven Duffing equation. This
module solves that equation (closed form on the zero-detuning branch,
numerically in general) and converts the displacement into the effective
lattice parameters that define the amplifier.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .circuit import EffectiveCircuit
from .errors import NegativeDrive, NonPositiveParameter, SolverTolerance


@dataclass(frozen=True)
class EffectiveParams:
    """Parameters of the driven-dissipative lattice (rates in rad/s).

    ``J`` is kept non-negative; a negative bare hopping is absorbed into
    the phase by ``phi -> phi + pi``.
    """

    N: int              # number of sites
    delta: float        # on-site detuning Delta
    J: float            # hopping magnitude
    phi: float          # hopping phase (pi/2 for the matched running wave)
    kappa: float        # local decay
    g_s: float          # local parametric pump
    g_c: float          # non-local parametric pump

    def __post_init__(self):
        if self.N < 1:
            raise NonPositiveParameter("N must be >= 1")
        if not (self.kappa > 0.0):
            raise NonPositiveParameter("kappa must be > 0")
        if self.J < 0.0:
            # canonicalize the sign into the phase
            object.__setattr__(self, "J", -self.J)
            phi = self.phi + math.pi
            phi = (phi + math.pi) % (2.0 * math.pi) - math.pi
            object.__setattr__(self, "phi", phi)

    def with_sites(self, n: int) -> "EffectiveParams":
        return replace(self, N=n)


@dataclass(frozen=True)
class MeanFieldSolution:
    """Steady-state displacement of the pumped system."""

    alpha: complex          # array displacement (dimensionless amplitude)
    alpha_sq: float         # |alpha|**2, mean photon number per site
    n: float                # dimensionless Duffing root
    xi: float               # dimensionless drive parameter
    detuning_pump: float    # omega_b - omega_a (rad/s)
    beta: np.ndarray        # auxiliary-chain displacements, length N


def duffing_analytic(xi: float) -> float:
    """Real root of n**3 + n/4 = xi, in closed form.

    Valid for xi >= 0; a single Newton polish keeps the residual below
    1e-12 in absolute terms across xi in [0, 1e3].
    """
    if xi < 0.0:
        raise NegativeDrive(f"xi must be >= 0, got {xi}")
    if xi == 0.0:
        return 0.0
    u = 36.0 * xi + math.sqrt(3.0 + 1296.0 * xi**2)
    cube = u ** (1.0 / 3.0)
    n = (3.0 ** (1.0 / 3.0) * cube**2 - 3.0 ** (2.0 / 3.0)) / (6.0 * cube)
    # one Newton step against float cancellation at the extremes
    f = n**3 + 0.25 * n - xi
    n -= f / (3.0 * n**2 + 0.25)
    return n


def duffing_numeric(omega_a_drive: float, kappa: float, delta_pump: float,
                    kerr_sum: float) -> tuple[list[float], list[complex]]:
    """All steady-state branches of the driven Duffing oscillator.

    Solves x * ((kappa/2)**2 + (delta_pump + kerr_sum * x)**2) = omega_a_drive**2
    for the intensity x = |alpha|**2 and returns ``(roots, alphas)`` with the
    real non-negative roots sorted ascending and the corresponding complex
    amplitudes from alpha = Omega_a / (kappa/2 - i(delta + K x)). With several
    roots (bistability) the caller selects a branch; by convention index 0 is
    the smallest root.
    """
    if kappa <= 0.0:
        raise NonPositiveParameter("kappa must be > 0")
    if kerr_sum < 0.0:
        raise NonPositiveParameter("kerr_sum must be >= 0")
    if omega_a_drive < 0.0:
        raise NegativeDrive("omega_a_drive must be >= 0")

    om2 = omega_a_drive**2
    if om2 == 0.0:
        return [0.0], [0j]

    if kerr_sum == 0.0:
        x = om2 / ((kappa / 2.0) ** 2 + delta_pump**2)
        roots = [x]
    else:
        # cubic in x: K^2 x^3 + 2 d K x^2 + (d^2 + kappa^2/4) x - Omega^2 = 0
        coeffs = [kerr_sum**2, 2.0 * delta_pump * kerr_sum,
                  delta_pump**2 + (kappa / 2.0) ** 2, -om2]
        raw = np.roots(coeffs)
        roots = []
        scale = max(abs(c) for c in coeffs)
        for r in raw:
            if abs(r.imag) > 1e-8 * max(1.0, abs(r.real)):
                continue
            x = float(r.real)
            if x < 0.0:
                continue
            # Newton polish on the real cubic
            for _ in range(50):
                f = ((kappa / 2.0) ** 2 + (delta_pump + kerr_sum * x) ** 2) * x - om2
                df = ((kappa / 2.0) ** 2 + (delta_pump + kerr_sum * x) ** 2
                      + 2.0 * kerr_sum * x * (delta_pump + kerr_sum * x))
                step = f / df
                x -= step
                if abs(step) <= 1e-16 * max(1.0, abs(x)):
                    break
            if x >= -1e-30:
                roots.append(max(x, 0.0))
        roots = sorted(set(roots))
        if not roots:
            raise SolverTolerance("cubic solver found no non-negative real root")
        del scale

    alphas = []
    for x in roots:
        denom = kappa / 2.0 - 1j * (delta_pump + kerr_sum * x)
        alpha = omega_a_drive / denom
        resid = abs(((kappa / 2.0) ** 2 + (delta_pump + kerr_sum * x) ** 2) * x - om2)
        if resid > 1e-10 * om2:
            raise SolverTolerance(
                f"root x={x!r} residual {resid:.3e} exceeds 1e-10 * Omega_a^2")
        alphas.append(alpha)
    return roots, alphas


def matched_chain_inverse(J_b: float, N: int) -> np.ndarray:
    """Closed-form inverse of the matched auxiliary-chain kernel.

    For the kernel I_jl = (Gamma/2) delta_jl (delta_j1 + delta_jN)
    + i J_b (delta_{l,j+1} + delta_{l,j-1}) at Gamma = 2 J_b the inverse is
    [I^-1]_jl = exp(-i (pi/2) |j - l|) / (2 J_b), exact for any N >= 1.
    For N = 1 the single site carries both boundary decay terms, so
    I_11 = Gamma = 2 J_b and the identity still holds.
    """
    if J_b <= 0.0:
        raise NonPositiveParameter("J_b must be > 0")
    if N < 1:
        raise NonPositiveParameter("N must be >= 1")
    idx = np.arange(N)
    dist = np.abs(idx[:, None] - idx[None, :])
    return np.exp(-1j * (math.pi / 2.0) * dist) / (2.0 * J_b)


def matched_chain_kernel(J_b: float, N: int, Gamma: float | None = None) -> np.ndarray:
    """The auxiliary-chain steady-state kernel I_jl (defaults to Gamma = 2 J_b)."""
    if Gamma is None:
        Gamma = 2.0 * J_b
    I = np.zeros((N, N), dtype=complex)
    for j in range(N):
        if j == 0:
            I[j, j] += Gamma / 2.0
        if j == N - 1:
            I[j, j] += Gamma / 2.0
        if j + 1 < N:
            I[j, j + 1] = 1j * J_b
        if j - 1 >= 0:
            I[j, j - 1] = 1j * J_b
    return I


def aux_chain_steady_state(omega_b_drive: float, J_b: float, J_ab: float,
                           alpha: complex, N: int, phi: float = math.pi / 2.0) -> np.ndarray:
    """Steady-state displacements beta_j of the matched auxiliary chain.

    beta_j = (i Omega_b / 2 J_b) e^{-i (pi/2) j}
             - i (J_ab / 2 J_b) alpha sum_l e^{-i (phi l + (pi/2) |j - l|)}
    with sites numbered 1..N. Assumes matched boundaries Gamma = 2 J_b.
    """
    if J_b <= 0.0:
        raise NonPositiveParameter("J_b must be > 0")
    js = np.arange(1, N + 1)
    wave = (1j * omega_b_drive / (2.0 * J_b)) * np.exp(-1j * (math.pi / 2.0) * js)
    if J_ab == 0.0 or alpha == 0.0:
        return wave
    dist = np.abs(js[:, None] - js[None, :])
    kernel = np.exp(-1j * (phi * js[None, :] + (math.pi / 2.0) * dist))
    backaction = -1j * (J_ab / (2.0 * J_b)) * alpha * kernel.sum(axis=1)
    return wave + backaction


def effective_params_from_meanfield(ec: EffectiveCircuit, alpha_sq: float,
                                    N: int, detuning_pump: float | None = None,
                                    phi: float = math.pi / 2.0) -> EffectiveParams:
    """Pump-dressed lattice parameters for a displacement ``alpha_sq``.

    J = J_a + 2 K_c |alpha|^2,   Delta = (omega_b - omega_a) + 2 (K_s + K_c) |alpha|^2,
    g_s = (K_s - K_c) |alpha|^2, g_c = K_c |alpha|^2.

    ``detuning_pump`` defaults to the zero-detuning operating condition
    -2 kappa n implied by ``alpha_sq`` itself, giving Delta = 0 exactly; pass
    the raw circuit value ``ec.omega_b - ec.omega_a`` to study detuned pumps.
    """
    if alpha_sq < 0.0:
        raise NonPositiveParameter("alpha_sq must be >= 0")
    kerr_sum = ec.K_s + ec.K_c
    if detuning_pump is None:
        detuning_pump = -2.0 * kerr_sum * alpha_sq  # cancels the Kerr shift exactly
    delta = detuning_pump + 2.0 * kerr_sum * alpha_sq
    return EffectiveParams(
        N=N,
        delta=delta,
        J=ec.J_a + 2.0 * ec.K_c * alpha_sq,
        phi=phi,
        kappa=ec.kappa,
        g_s=(ec.K_s - ec.K_c) * alpha_sq,
        g_c=ec.K_c * alpha_sq,
    )


def solve_operating_point(ec: EffectiveCircuit, N: int) -> tuple[MeanFieldSolution, EffectiveParams]:
    """Mean field and lattice parameters on the zero-detuning branch.

    Uses the closed-form parametrization of the Duffing steady state:
    xi = (Omega_a / kappa)^2 (K_s + K_c) / kappa, n the real cubic root,
    |alpha|^2 = kappa n / (K_s + K_c), and the pump detuning tuned to
    omega_b - omega_a = -2 kappa n so the effective Delta vanishes.
    """
    kerr_sum = ec.K_s + ec.K_c
    if kerr_sum <= 0.0:
        raise NonPositiveParameter("K_s + K_c must be > 0 at an operating point")
    xi = (ec.Omega_a / ec.kappa) ** 2 * (kerr_sum / ec.kappa)
    n = duffing_analytic(xi)
    detuning = -2.0 * ec.kappa * n
    # (kappa/2 - i(delta + K x)) alpha = Omega_a with delta + K x = -kappa n
    alpha = ec.Omega_a / (ec.kappa / 2.0 + 1j * ec.kappa * n)
    beta = aux_chain_steady_state(ec.Omega_b, ec.J_b, ec.J_ab, alpha, N)
    alpha_sq = abs(alpha) ** 2  # equals kappa n / (K_s + K_c) analytically
    sol = MeanFieldSolution(
        alpha=alpha, alpha_sq=alpha_sq, n=n, xi=xi,
        detuning_pump=detuning, beta=beta,
    )
    params = effective_params_from_meanfield(ec, alpha_sq, N, detuning_pump=detuning)
    return sol, params


def _phase_wrap(x: float) -> float:
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def alpha_phase(omega_a_drive: float, kappa: float, delta_pump: float,
                kerr_sum: float, x: float) -> float:
    """Phase of alpha on the branch with intensity ``x``."""
    denom = kappa / 2.0 - 1j * (delta_pump + kerr_sum * x)
    return _phase_wrap(cmath.phase(omega_a_drive / denom))
