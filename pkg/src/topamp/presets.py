"""Bundled operation points P1, P1p, P2 and P3.

Each preset carries the microscopic circuit of the corresponding design
row together with the canonical effective lattice parameters the
operation point is defined by (hopping from the tabulated J, the
dimensionless ratios kappa/J and g_c/J, g_s = g_c, zero detuning, phase
pi/2). The circuit route ``derive_preset_effective`` exists for
consistency checks; tabulated circuit values are rounded to three
significant figures, which the near-cancelling bare hopping J_a
amplifies, so the canonical parameters are the source of truth for
physics runs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .circuit import CircuitParams, derive_effective_circuit, low_flux_margin
from .constants import PLANCK, TWO_PI, dbm_to_watts
from .errors import LowFluxWarning
from .meanfield import EffectiveParams, MeanFieldSolution, solve_operating_point
from .response import SignalSpec

_AUX = dict(
    C_b_prime=1.99e-15,
    C_bw=39.8e-15,
    L_b=0.995e-9,
    Z_0=50.0,
)


@dataclass(frozen=True)
class Preset:
    """A named operation point: circuit, canonical effective model, signal."""

    name: str
    circuit: CircuitParams
    effective: EffectiveParams   # canonical, absolute rad/s
    signal: SignalSpec
    M: int
    alpha_sq_design: float       # tabulated mean photon number
    gc_over_J: float
    kappa_over_J: float

    def with_sites(self, n: int) -> "Preset":
        """Same operation point on an ``n``-site chain (grid-style overrides)."""
        return replace(self, effective=self.effective.with_sites(n))

    @property
    def normalized(self) -> EffectiveParams:
        """The effective parameters in units of J (J = 1)."""
        e = self.effective
        return EffectiveParams(N=e.N, delta=e.delta / e.J, J=1.0, phi=e.phi,
                               kappa=e.kappa / e.J, g_s=e.g_s / e.J, g_c=e.g_c / e.J)


def _make(name, N, M, gc_over_J, kappa_over_J, C_a_fF, C_ap_fF, MEJ_over_h_THz,
          C_aw_fF, C_ab_fF, C_b_fF, P_b_dBm, alpha_sq, J_over_2pi_MHz,
          signal_flux_MHz) -> Preset:
    EJ = PLANCK * MEJ_over_h_THz * 1e12   # per-junction energy of the M-boosted design
    circuit = CircuitParams(
        C_a=C_a_fF * 1e-15, C_ap=C_ap_fF * 1e-15, C_ab=C_ab_fF * 1e-15,
        C_aw=C_aw_fF * 1e-15, C_b=C_b_fF * 1e-15, C_bp=_AUX["C_b_prime"],
        C_bw=_AUX["C_bw"], L_b=_AUX["L_b"], EJ=EJ, EJp=EJ / 2.0,
        M=M, Z_0=_AUX["Z_0"], P_b=dbm_to_watts(P_b_dBm), N=N,
    )
    J = TWO_PI * J_over_2pi_MHz * 1e6
    effective = EffectiveParams(
        N=N, delta=0.0, J=J, phi=math.pi / 2.0,
        kappa=kappa_over_J * J, g_s=gc_over_J * J, g_c=gc_over_J * J,
    )
    signal = SignalSpec(alpha_s=math.sqrt(TWO_PI * signal_flux_MHz * 1e6),
                        omega_s=-0.5 * J)
    return Preset(name=name, circuit=circuit, effective=effective, signal=signal,
                  M=M, alpha_sq_design=alpha_sq, gc_over_J=gc_over_J,
                  kappa_over_J=kappa_over_J)


_PRESETS = {
    "P1": _make("P1", N=8, M=1, gc_over_J=0.6, kappa_over_J=2.6,
                C_a_fF=1790.0, C_ap_fF=1020.0, MEJ_over_h_THz=1.00,
                C_aw_fF=386.0, C_ab_fF=6.26, C_b_fF=388.0, P_b_dBm=-74.8,
                alpha_sq=41.0, J_over_2pi_MHz=156.0, signal_flux_MHz=5.0),
    "P1p": _make("P1p", N=10, M=7, gc_over_J=0.6, kappa_over_J=2.6,
                 C_a_fF=76.2, C_ap_fF=89.3, MEJ_over_h_THz=0.623,
                 C_aw_fF=113.0, C_ab_fF=1.85, C_b_fF=392.0, P_b_dBm=-68.5,
                 alpha_sq=175.0, J_over_2pi_MHz=156.0, signal_flux_MHz=5.0),
    "P2": _make("P2", N=27, M=32, gc_over_J=0.25, kappa_over_J=0.9,
                C_a_fF=48.6, C_ap_fF=108.0, MEJ_over_h_THz=2.85,
                C_aw_fF=103.0, C_ab_fF=1.85, C_b_fF=392.0, P_b_dBm=-55.8,
                alpha_sq=3660.0, J_over_2pi_MHz=375.0, signal_flux_MHz=19.0),
    "P3": _make("P3", N=4, M=22, gc_over_J=0.95, kappa_over_J=2.8,
                C_a_fF=106.0, C_ap_fF=84.4, MEJ_over_h_THz=1.96,
                C_aw_fF=93.5, C_ab_fF=1.85, C_b_fF=392.0, P_b_dBm=-59.5,
                alpha_sq=1730.0, J_over_2pi_MHz=98.6, signal_flux_MHz=5.0),
}

PRESET_NAMES = tuple(_PRESETS)

_ALIASES = {"P1'": "P1p", "p1": "P1", "p1p": "P1p", "p1'": "P1p", "p2": "P2", "p3": "P3"}


def get_preset(name: str) -> Preset:
    key = _ALIASES.get(name, name)
    key = _ALIASES.get(key.lower(), key) if key not in _PRESETS else key
    if key not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    return _PRESETS[key]


def derive_preset_effective(preset: Preset,
                            low_flux_warn: float = 0.1) -> tuple[MeanFieldSolution, EffectiveParams]:
    """Effective parameters obtained through the full circuit + mean-field chain.

    Returns the mean-field solution (with its pump-detuning tuned for zero
    effective detuning) and the resulting lattice parameters in rad/s.
    Warns when the displacement exceeds ``low_flux_warn`` of the low-flux
    bound; the bundled designs run at about 0.35 of it by construction.
    """
    ec = derive_effective_circuit(preset.circuit)
    sol, params = solve_operating_point(ec, preset.effective.N)
    margin = low_flux_margin(sol.alpha_sq, preset.M, ec.phi_zpf)
    if margin > low_flux_warn:
        warnings.warn(
            f"{preset.name}: |alpha|^2 = {sol.alpha_sq:.1f} sits at "
            f"{margin:.2f} of the low-flux bound (threshold {low_flux_warn})",
            LowFluxWarning,
            stacklevel=2,
        )
    return sol, params
