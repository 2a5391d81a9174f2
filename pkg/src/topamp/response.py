"""Measurable response: Green's functions, gains, noise, occupation.

Everything here is a pure function of the assembled dynamical matrix and
a probe frequency. All frequencies are measured from the pump. With
per-site decay disorder the input-output couplings generalize to
sqrt(kappa_m kappa_j), so power ratios carry kappa_m * kappa_j in place
of kappa**2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import db
from .errors import IntegrationNotConverged, NonPositiveParameter, SingularMatrix
from .lattice import NambuMatrix, particle_hole_swap


@dataclass(frozen=True)
class SignalSpec:
    """Coherent probe tone: amplitude, frequency (from the pump), input site."""

    alpha_s: complex      # amplitude; |alpha_s|**2 is a photon flux in rad/s
    omega_s: float
    input_site: int = 1   # 1-indexed

    def __post_init__(self):
        if self.input_site < 1:
            raise NonPositiveParameter("input_site must be >= 1")


@dataclass(frozen=True)
class GreenFunction:
    """G(omega) = (omega - H)^(-1) with its normal and anomalous blocks."""

    omega: float
    matrix: np.ndarray
    n_sites: int

    @property
    def normal(self) -> np.ndarray:
        return self.matrix[: self.n_sites, : self.n_sites]

    @property
    def anomalous(self) -> np.ndarray:
        return self.matrix[: self.n_sites, self.n_sites:]


def green(h: NambuMatrix, omega: float) -> GreenFunction:
    """Dense inversion of omega - H; raises SingularMatrix at marginal points."""
    A = omega * np.eye(2 * h.n_sites) - h.matrix
    try:
        G = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"omega - H is singular at omega = {omega}: {exc}") from exc
    return GreenFunction(omega=omega, matrix=G, n_sites=h.n_sites)


def green_grid(h: NambuMatrix, omegas: np.ndarray) -> np.ndarray:
    """Batched G(omega), shape (n_omega, 2N, 2N)."""
    omegas = np.asarray(omegas, dtype=float)
    eye = np.eye(2 * h.n_sites)
    A = omegas[:, None, None] * eye - h.matrix[None, :, :]
    try:
        return np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(f"omega - H singular somewhere on the grid: {exc}") from exc


@dataclass(frozen=True)
class GainProfile:
    """Per-site power gains for input site m at signal frequency omega_s.

    Arrays are indexed by output site j = 1..N (0-based storage). idler
    quantities are evaluated at -omega_s as required by four-wave mixing.
    """

    omega_s: float
    input_site: int
    gain: np.ndarray           # G_j    = k_m k_j |G_{jm}(w_s)|^2
    reverse: np.ndarray        # G_j^R  = k_m k_j |G_{mj}(w_s)|^2
    idler: np.ndarray          # G_j^I  = k_m k_j |G_{j,N+m}(-w_s)|^2
    idler_reverse: np.ndarray  # G_j^IR = k_m k_j |G_{m,N+j}(-w_s)|^2

    def gain_db(self) -> np.ndarray:
        return np.array([db(x) for x in self.gain])

    def reverse_db(self) -> np.ndarray:
        return np.array([db(x) for x in self.reverse])


def gains(h: NambuMatrix, omega_s: float, m: int = 1) -> GainProfile:
    """Signal/idler forward and reverse gains for all output sites."""
    N = h.n_sites
    if not 1 <= m <= N:
        raise NonPositiveParameter(f"input site m={m} outside 1..{N}")
    mi = m - 1
    k = h.kappa_site
    Gs = green(h, omega_s).matrix
    Gi = green(h, -omega_s).matrix
    pref = k[mi] * k
    return GainProfile(
        omega_s=omega_s,
        input_site=m,
        gain=pref * np.abs(Gs[:N, mi]) ** 2,
        reverse=pref * np.abs(Gs[mi, :N]) ** 2,
        idler=pref * np.abs(Gi[:N, N + mi]) ** 2,
        idler_reverse=pref * np.abs(Gi[mi, N:]) ** 2,
    )


def noise_density(h: NambuMatrix, omega: float, g: GreenFunction | None = None) -> np.ndarray:
    """Incoherent photon flux density n_j(omega) emitted at every site.

    n_j = kappa_j * sum_l kappa_l |G_{j,N+l}(omega)|^2; reduces to
    kappa^2 sum_l |G_{j,N+l}|^2 for uniform decay.
    """
    N = h.n_sites
    if g is None:
        g = green(h, omega)
    k = h.kappa_site
    return k * np.sum(k[None, :] * np.abs(g.matrix[:N, N:]) ** 2, axis=1)


def noise(h: NambuMatrix, omega: float, j: int | None = None,
          m: int = 1) -> tuple[np.ndarray | float, np.ndarray | float]:
    """Noise density and added noise (n_j, n_j_add = n_j / gain_j).

    Sites with exactly zero gain report added noise +inf (no amplification
    to refer the noise to). ``j`` is 1-indexed; None returns all sites.
    """
    g = green(h, omega)
    n = noise_density(h, omega, g)
    prof = gains(h, omega, m=m)
    with np.errstate(divide="ignore", invalid="ignore"):
        n_add = np.where(prof.gain > 0.0, n / prof.gain, np.inf)
    if j is None:
        return n, n_add
    return float(n[j - 1]), float(n_add[j - 1])


def noise_asymmetry(h: NambuMatrix, omega: float) -> float:
    """Backward-to-forward emitted noise ratio n_1(omega) / n_N(omega).

    This is the figure of merit for source protection: both fluxes are
    normalized by the same device gain, so the gain cancels and the pure
    flux ratio remains. A reciprocal device gives 1 up to boundary effects.
    """
    n = noise_density(h, omega)
    if n[-1] == 0.0:
        return math.inf if n[0] > 0.0 else math.nan
    return float(n[0] / n[-1])


def bandwidth_20db(h: NambuMatrix, omega_grid: np.ndarray, m: int = 1,
                   threshold_db: float = 20.0) -> float:
    """Total width of the grid intervals where the end-site gain is >= threshold.

    The gain curve in dB is interpolated linearly at threshold crossings.
    Returns 0 when the gain never reaches the threshold.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    N = h.n_sites
    k = h.kappa_site
    G = green_grid(h, omega_grid)
    gain = k[m - 1] * k[N - 1] * np.abs(G[:, N - 1, m - 1]) ** 2
    with np.errstate(divide="ignore"):
        gdb = 10.0 * np.log10(gain)

    width = 0.0
    for i in range(len(omega_grid) - 1):
        a, b = gdb[i], gdb[i + 1]
        lo, hi = omega_grid[i], omega_grid[i + 1]
        above_a, above_b = a >= threshold_db, b >= threshold_db
        if above_a and above_b:
            width += hi - lo
        elif above_a != above_b:
            t = (threshold_db - a) / (b - a)
            width += (hi - lo) * ((1.0 - t) if above_a else t)
    return float(width)


@dataclass(frozen=True)
class CoherentOutput:
    """Coherent output amplitudes at the three mixing frequencies."""

    signal: complex   # at +omega_s
    idler: complex    # at -omega_s
    pump: complex     # at 0


def coherent_output(h: NambuMatrix, s: SignalSpec, alpha: complex, j: int,
                    phi: float = math.pi / 2.0) -> CoherentOutput:
    """Output field at site ``j`` when driving site ``s.input_site``.

    signal = [delta_jm - i sqrt(k_j k_m) G_jm(w_s)] e^{-i phi (j-m)} alpha_s
    idler  = -i sqrt(k_j k_m) G_{j,N+m}(-w_s) e^{-i phi (j+m)} conj(alpha_s)
    pump   = sqrt(k_j) alpha e^{-i phi j}
    """
    N = h.n_sites
    if not 1 <= j <= N:
        raise NonPositiveParameter(f"output site j={j} outside 1..{N}")
    m = s.input_site
    k = h.kappa_site
    root = math.sqrt(k[j - 1] * k[m - 1])
    Gs = green(h, s.omega_s).matrix
    Gi = green(h, -s.omega_s).matrix
    delta = 1.0 if j == m else 0.0
    sig = (delta - 1j * root * Gs[j - 1, m - 1]) * np.exp(-1j * phi * (j - m)) * s.alpha_s
    idl = -1j * root * Gi[j - 1, N + m - 1] * np.exp(-1j * phi * (j + m)) * np.conj(s.alpha_s)
    pump = math.sqrt(k[j - 1]) * alpha * np.exp(-1j * phi * j)
    return CoherentOutput(signal=complex(sig), idler=complex(idl), pump=complex(pump))


def occupation_noise_integral(h: NambuMatrix, omega_max: float, step: float,
                              rel_tol: float = 1e-3,
                              max_halvings: int = 6) -> np.ndarray:
    """(1/2pi) integral over omega of sum_l kappa_l |G_{j,N+l}(omega)|^2, per site.

    Trapezoidal quadrature on [-omega_max, omega_max], refined by halving
    the step until the result moves by less than ``rel_tol`` relatively.
    Raises IntegrationNotConverged when refinement stalls or the integrand
    tail at the cutoff is not negligible (it decays like omega^-4).
    """
    N = h.n_sites
    k = h.kappa_site

    def integrate(n_pts: int) -> tuple[np.ndarray, np.ndarray]:
        grid = np.linspace(-omega_max, omega_max, n_pts)
        G = green_grid(h, grid)
        dens = np.sum(k[None, None, :] * np.abs(G[:, :N, N:]) ** 2, axis=2)
        return np.trapezoid(dens, grid, axis=0) / (2.0 * math.pi), dens

    n_pts = max(int(round(2 * omega_max / step)) + 1, 33)
    prev, dens = integrate(n_pts)
    for _ in range(max_halvings):
        n_pts = 2 * n_pts - 1
        cur, dens = integrate(n_pts)
        scale = float(np.max(np.abs(cur)))
        if scale == 0.0 or float(np.max(np.abs(cur - prev))) <= rel_tol * scale:
            tail = np.maximum(dens[0], dens[-1]) * omega_max / (2.0 * math.pi)
            if np.any(cur > 0) and float(np.max(tail / np.where(cur > 0, cur, np.inf))) > rel_tol:
                raise IntegrationNotConverged(
                    "integrand tail at the cutoff exceeds the tolerance; increase omega_max")
            return cur
        prev = cur
    raise IntegrationNotConverged(
        f"noise integral did not settle within {max_halvings} refinements")


@dataclass(frozen=True)
class OccupationReport:
    """Maximum fluctuation occupation per site and its two components."""

    total: np.ndarray
    coherent: np.ndarray
    noise: np.ndarray
    saturation_ratio: np.ndarray | None = field(default=None)


def max_occupation(h: NambuMatrix, s: SignalSpec, alpha_sq: float | None = None,
                   omega_max: float | None = None, step: float | None = None,
                   J: float = 1.0) -> OccupationReport:
    """Peak occupation of the fluctuation field at every site.

    max <da_j^dag da_j> = kappa_m |alpha_s|^2 (|G_jm(w_s)| + |G_{j,N+m}(-w_s)|)^2
                          + (1/2pi) int dw sum_l kappa_l |G_{j,N+l}(w)|^2,

    the time-oscillating signal-idler beat already maximized. When
    ``alpha_sq`` (the mean-field photon number) is given, the saturation
    ratio total/alpha_sq is reported as well.
    """
    N = h.n_sites
    m = s.input_site
    if omega_max is None:
        omega_max = 20.0 * J
    if step is None:
        step = J / 50.0
    k = h.kappa_site
    Gs = green(h, s.omega_s).matrix
    Gi = green(h, -s.omega_s).matrix
    flux = abs(s.alpha_s) ** 2
    coherent = k[m - 1] * flux * (np.abs(Gs[:N, m - 1]) + np.abs(Gi[:N, N + m - 1])) ** 2
    noise_occ = occupation_noise_integral(h, omega_max, step)
    total = coherent + noise_occ
    ratio = total / alpha_sq if alpha_sq else None
    return OccupationReport(total=total, coherent=coherent, noise=noise_occ,
                            saturation_ratio=ratio)


def particle_hole_check(h: NambuMatrix, omega: float) -> float:
    """Max relative deviation of G(-omega) from -Sigma_x G(omega)* Sigma_x."""
    Sx = particle_hole_swap(h.n_sites)
    Gp = green(h, omega).matrix
    Gm = green(h, -omega).matrix
    lhs = Gm
    rhs = -Sx @ Gp.conj() @ Sx
    return float(np.abs(lhs - rhs).max() / np.abs(lhs).max())


@dataclass(frozen=True)
class ResponseRow:
    """One frequency sample of the standard response sweep."""

    omega_over_J: float
    gain_N_db: float
    rev_gain_N_db: float
    n_add_N: float
    asym_db: float


def response_spectrum(h: NambuMatrix, omega_grid: np.ndarray, J: float = 1.0,
                      m: int = 1) -> list[ResponseRow]:
    """End-site gain, reverse gain, added noise and noise asymmetry vs omega."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    N = h.n_sites
    k = h.kappa_site
    G = green_grid(h, omega_grid)
    pref = k[m - 1] * k[N - 1]
    gain = pref * np.abs(G[:, N - 1, m - 1]) ** 2
    rev = pref * np.abs(G[:, m - 1, N - 1]) ** 2
    anom = np.abs(G[:, :N, N:]) ** 2
    flux = k[None, :] * np.sum(k[None, None, :] * anom, axis=2)
    n_N = flux[:, N - 1]
    n_1 = flux[:, 0]
    rows = []
    for i, w in enumerate(omega_grid):
        nadd = n_N[i] / gain[i] if gain[i] > 0 else math.inf
        asym = n_1[i] / n_N[i] if n_N[i] > 0 else math.nan
        rows.append(ResponseRow(
            omega_over_J=float(w / J),
            gain_N_db=db(float(gain[i])),
            rev_gain_N_db=db(float(rev[i])),
            n_add_N=float(nadd),
            asym_db=db(float(asym)) if asym > 0 else math.nan,
        ))
    return rows
