"""Microscopic circuit to effective coupled-array model mapping.

Maps the capacitances, inductances and Josephson energies of the
two-array device (a nonlinear junction array plus an auxiliary linear
resonator array, each site coupled to a 50 ohm line) onto the handful of
effective quantities that drive everything else: on-site frequencies,
hoppings, Kerr strengths, decay rates and pump amplitudes.

Conventions
-----------
* Every rate returned here is an angular frequency in rad/s.
* ``EJ``/``EJp`` are the Josephson energies of a *single physical
  junction*. When each junction is replaced by a sub-array of ``M``
  junctions in series (each M times more energetic than the M=1 design),
  the linear inductance of the element is ``L_J = M * PHI0**2 / EJ``
  while the Kerr strengths pick up the 1/M**2 suppression.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import E_CHARGE, HBAR, PHI0
from .errors import ImpedanceMismatchWarning, NonPositiveParameter


@dataclass(frozen=True)
class CircuitParams:
    """Microscopic parameters of the two-array circuit.

    Capacitances in farad, inductances in henry, energies in joule,
    pump power in watt. ``M`` is the junctions-per-sub-array factor and
    ``N`` the number of lattice sites.
    """

    C_a: float          # on-site capacitance, junction array
    C_ap: float         # inter-site capacitance, junction array
    C_ab: float         # inter-array coupling capacitance
    C_aw: float         # line coupling capacitance, junction array
    C_b: float          # on-site capacitance, auxiliary array
    C_bp: float         # inter-site capacitance, auxiliary array
    C_bw: float         # line coupling capacitance, auxiliary boundaries
    L_b: float          # auxiliary resonator inductance
    EJ: float           # on-site Josephson energy per junction
    EJp: float          # inter-site Josephson energy per junction
    M: int = 1          # junctions per sub-array
    Z_0: float = 50.0   # line impedance (ohm)
    P_b: float = 0.0    # pump power (watt)
    N: int = 1          # array length

    def __post_init__(self):
        positive = {
            "C_a": self.C_a, "C_b": self.C_b, "L_b": self.L_b,
            "EJ": self.EJ, "EJp": self.EJp, "Z_0": self.Z_0,
        }
        for name, value in positive.items():
            if not (value > 0.0) or not math.isfinite(value):
                raise NonPositiveParameter(f"{name} must be finite and > 0, got {value!r}")
        nonneg = {
            "C_ap": self.C_ap, "C_ab": self.C_ab, "C_aw": self.C_aw,
            "C_bp": self.C_bp, "C_bw": self.C_bw, "P_b": self.P_b,
        }
        for name, value in nonneg.items():
            if value < 0.0 or not math.isfinite(value):
                raise NonPositiveParameter(f"{name} must be finite and >= 0, got {value!r}")
        if self.M < 1 or self.N < 1:
            raise NonPositiveParameter("M and N must be integers >= 1")
        ratio = self.EJ / self.EJp
        if not math.isfinite(ratio) or ratio <= 0.0:
            raise NonPositiveParameter("EJ / EJp must be finite and positive")


@dataclass(frozen=True)
class EffectiveCircuit:
    """Effective quantities of the coupled-array model (rates in rad/s)."""

    omega_a: float      # junction-array on-site frequency
    omega_b: float      # auxiliary-array on-site frequency
    J_a: float          # junction-array hopping (may be negative)
    J_b: float          # auxiliary intra-array hopping
    J_ab: float         # inter-array coupling
    K_s: float          # self-Kerr strength
    K_c: float          # cross-Kerr strength
    kappa: float        # local decay of junction-array sites
    Gamma: float        # boundary decay of the auxiliary chain
    kappa_nl: float     # non-local decay J_ab**2 / (2 J_b)
    Omega_b: float      # pump drive on auxiliary site 1
    Omega_a: float      # effective distributed pump on the array
    E_C: float          # charging energy (joule)
    phi_zpf: float      # zero-point flux fluctuation (weber)
    Z_a: float          # junction-array impedance (ohm)
    Z_b: float          # auxiliary-array impedance (ohm)
    C_a_eq: float       # equivalent on-site capacitance, junction array
    C_b_eq: float       # equivalent on-site capacitance, auxiliary array
    L_a_eq: float       # equivalent on-site inductance, junction array
    L_J: float          # on-site junction (sub-array) inductance
    L_Jp: float         # inter-site junction (sub-array) inductance
    boundary_compensated: bool = True  # C_b -> C_b + C_bp - C_bw applied at edges

    def impedance_matched(self, rtol: float = 1e-12) -> bool:
        """True when Gamma equals 2 J_b within ``rtol`` (reflectionless chain)."""
        return abs(self.Gamma - 2.0 * self.J_b) <= rtol * abs(2.0 * self.J_b)


def derive_effective_circuit(p: CircuitParams, kerr_shift: bool = True) -> EffectiveCircuit:
    """Evaluate the circuit-to-model map for ``p``.

    With ``kerr_shift`` the small normal-ordering corrections
    ``omega_a -> omega_a - K_c - K_s`` and ``J_a -> J_a + K_c`` are applied
    after the base formulas; they matter at the percent level for the
    hopping of strongly coupled designs.

    Emits :class:`ImpedanceMismatchWarning` (never raises) when the
    auxiliary boundary decay misses 2 J_b by more than one part in 1e3.
    """
    # junction array: equivalents, frequency, hopping, Kerr
    C_a_eq = p.C_a + 2.0 * p.C_ap + p.C_ab + p.C_aw
    L_J = p.M * PHI0**2 / p.EJ
    L_Jp = p.M * PHI0**2 / p.EJp
    L_a_eq = (L_Jp * L_J) / (L_Jp + 2.0 * L_J)
    omega_a = 1.0 / math.sqrt(L_a_eq * C_a_eq)
    E_C = E_CHARGE**2 / (2.0 * C_a_eq)
    K_s = (E_C / HBAR) / p.M**2
    K_c = 2.0 * (E_C / HBAR) * (L_a_eq / L_Jp) / p.M**2
    J_a = (omega_a / 2.0) * (p.C_ap / C_a_eq - L_a_eq / L_Jp)

    # auxiliary array
    C_b_eq = p.C_b + 2.0 * p.C_bp + p.C_ab
    omega_b = 1.0 / math.sqrt(p.L_b * C_b_eq)
    J_b = (omega_b / 2.0) * (p.C_bp / C_b_eq)
    J_ab = (math.sqrt(omega_a * omega_b) / 2.0) * p.C_ab / math.sqrt(C_a_eq * C_b_eq)

    # line couplings
    Z_a = math.sqrt(L_a_eq / C_a_eq)
    Z_b = math.sqrt(p.L_b / C_b_eq)
    kappa = (p.C_aw / C_a_eq) ** 2 * (p.Z_0 / Z_a) * (omega_a / 2.0)
    Gamma = (p.C_bw / C_b_eq) ** 2 * (p.Z_0 / Z_b) * (omega_b / 2.0)

    # pump chain
    Omega_b = (p.C_bw / (2.0 * C_b_eq)) * math.sqrt(p.Z_0 / Z_b) * math.sqrt(p.P_b / HBAR)
    Omega_a = (J_ab / (2.0 * J_b)) * Omega_b if J_b > 0.0 else 0.0
    kappa_nl = J_ab**2 / (2.0 * J_b) if J_b > 0.0 else 0.0

    phi_zpf = math.sqrt(HBAR / (2.0 * C_a_eq * omega_a))

    if kerr_shift:
        omega_a = omega_a - K_c - K_s
        J_a = J_a + K_c

    for name, value in (("omega_a", omega_a), ("omega_b", omega_b),
                        ("L_a_eq", L_a_eq)):
        if not (value > 0.0) or not math.isfinite(value):
            raise NonPositiveParameter(f"derived {name} is not positive: {value!r}")

    if J_b > 0.0 and abs(Gamma - 2.0 * J_b) > 1e-3 * 2.0 * J_b:
        warnings.warn(
            f"auxiliary boundary decay Gamma = {Gamma:.6g} differs from 2 J_b = "
            f"{2.0 * J_b:.6g}; the running-wave pump phase will be imperfect",
            ImpedanceMismatchWarning,
            stacklevel=2,
        )

    return EffectiveCircuit(
        omega_a=omega_a, omega_b=omega_b, J_a=J_a, J_b=J_b, J_ab=J_ab,
        K_s=K_s, K_c=K_c, kappa=kappa, Gamma=Gamma, kappa_nl=kappa_nl,
        Omega_b=Omega_b, Omega_a=Omega_a, E_C=E_C, phi_zpf=phi_zpf,
        Z_a=Z_a, Z_b=Z_b, C_a_eq=C_a_eq, C_b_eq=C_b_eq, L_a_eq=L_a_eq,
        L_J=L_J, L_Jp=L_Jp,
    )


def low_flux_margin(alpha_sq: float, m: int, phi_zpf: float) -> float:
    """Ratio of the mean photon number to the low-flux bound.

    r = alpha_sq / (m**2 * (PHI0 / (2 phi_zpf))**2). Values well below 1
    indicate the quartic expansion of the junction potential is valid;
    callers typically warn above 0.1. Pure function, raises nothing for
    in-range inputs.
    """
    if alpha_sq < 0.0:
        raise NonPositiveParameter("alpha_sq must be >= 0")
    if m < 1:
        raise NonPositiveParameter("m must be >= 1")
    if phi_zpf <= 0.0:
        raise NonPositiveParameter("phi_zpf must be > 0")
    bound = m**2 * (PHI0 / (2.0 * phi_zpf)) ** 2
    return alpha_sq / bound
