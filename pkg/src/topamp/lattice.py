"""Non-Hermitian dynamical matrix of the lattice and its stability.

The linearized fluctuation dynamics is d(da)/dt = -i H da - sqrt(kappa) a_in
with a 2N x 2N block matrix

    H = [[ M - i kappa/2,  -K ],
         [ K,  -conj(M) - i kappa/2 ]]

where M collects the detuning and the phase-carrying hopping (Hermitian)
and K the local and non-local parametric pumping (real symmetric). Open
boundary conditions throughout. Optional quenched disorder enters site-
and bond-resolved while preserving the Hermiticity of M and the symmetry
of K.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EigenSolverFailure, NonPositiveParameter
from .meanfield import EffectiveParams

_FAMILIES = ("delta", "kappa", "J", "gs", "gc", "phi")


@dataclass(frozen=True)
class DisorderSigmas:
    """Dimensionless disorder strengths per parameter family.

    Every sigma except ``phi`` scales the hopping J (delta_x = sigma * J);
    ``phi`` is relative to the clean phase (delta_phi = sigma * phi).
    """

    delta: float = 0.0
    kappa: float = 0.0
    J: float = 0.0
    gs: float = 0.0
    gc: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        for name in _FAMILIES:
            if getattr(self, name) < 0.0:
                raise NonPositiveParameter(f"sigma_{name} must be >= 0")

    @classmethod
    def single(cls, family: str, sigma: float) -> "DisorderSigmas":
        if family not in _FAMILIES:
            raise ValueError(f"unknown disorder family {family!r}; expected one of {_FAMILIES}")
        return cls(**{family: sigma})


@dataclass(frozen=True)
class DisorderRealization:
    """One quenched draw of site- and bond-resolved lattice parameters.

    ``delta_onsite`` holds offsets from the base detuning; the remaining
    arrays hold absolute values. On-site arrays have length N, bond arrays
    length N-1.
    """

    delta_onsite: np.ndarray   # detuning offsets, length N
    kappa_site: np.ndarray     # per-site decay, length N, all > 0
    J_bond: np.ndarray         # hopping magnitude per bond, length N-1
    phi_bond: np.ndarray       # hopping phase per bond, length N-1
    g_s_site: np.ndarray       # local pump per site, length N
    g_c_bond: np.ndarray       # non-local pump per bond, length N-1

    def check(self, n_sites: int) -> None:
        for name in ("delta_onsite", "kappa_site", "g_s_site"):
            if len(getattr(self, name)) != n_sites:
                raise DimensionMismatch(f"{name} must have length {n_sites}")
        for name in ("J_bond", "phi_bond", "g_c_bond"):
            if len(getattr(self, name)) != max(n_sites - 1, 0):
                raise DimensionMismatch(f"{name} must have length {n_sites - 1}")
        if np.any(self.kappa_site <= 0.0):
            raise NonPositiveParameter("kappa_site must be positive everywhere")


def sample_disorder(base: EffectiveParams, sigmas: DisorderSigmas, seed: int) -> DisorderRealization:
    """Draw an independent Gaussian realization around ``base``.

    Draw order is fixed (delta, kappa, J, phi, g_s, g_c) so a given seed
    always yields the same realization. Non-positive kappa draws are
    rejected and redrawn site by site; clamping would bias the mean.
    """
    rng = np.random.default_rng(seed)
    N = base.N
    J = base.J

    delta_onsite = rng.normal(0.0, sigmas.delta * J, N) if sigmas.delta > 0 else np.zeros(N)

    if sigmas.kappa > 0:
        kappa_site = rng.normal(base.kappa, sigmas.kappa * J, N)
        bad = kappa_site <= 0.0
        while bad.any():
            kappa_site[bad] = rng.normal(base.kappa, sigmas.kappa * J, int(bad.sum()))
            bad = kappa_site <= 0.0
    else:
        kappa_site = np.full(N, base.kappa)

    nb = max(N - 1, 0)
    J_bond = rng.normal(J, sigmas.J * J, nb) if sigmas.J > 0 else np.full(nb, J)
    phi_bond = (rng.normal(base.phi, sigmas.phi * base.phi, nb)
                if sigmas.phi > 0 else np.full(nb, base.phi))
    g_s_site = rng.normal(base.g_s, sigmas.gs * J, N) if sigmas.gs > 0 else np.full(N, base.g_s)
    g_c_bond = rng.normal(base.g_c, sigmas.gc * J, nb) if sigmas.gc > 0 else np.full(nb, base.g_c)

    return DisorderRealization(
        delta_onsite=delta_onsite, kappa_site=kappa_site, J_bond=J_bond,
        phi_bond=phi_bond, g_s_site=g_s_site, g_c_bond=g_c_bond,
    )


@dataclass(frozen=True)
class NambuMatrix:
    """The 2N x 2N dynamical matrix with its particle-hole block structure."""

    n_sites: int
    matrix: np.ndarray        # 2N x 2N complex
    kappa_site: np.ndarray    # per-site decay used in the diagonal blocks

    def __post_init__(self):
        self.matrix.setflags(write=False)
        self.kappa_site.setflags(write=False)

    @property
    def particle_block(self) -> np.ndarray:
        """Upper-left block M - i kappa/2."""
        return self.matrix[: self.n_sites, : self.n_sites]

    @property
    def hole_block(self) -> np.ndarray:
        """Lower-right block -conj(M) - i kappa/2."""
        return self.matrix[self.n_sites:, self.n_sites:]

    @property
    def pump_upper(self) -> np.ndarray:
        """Upper-right block -K."""
        return self.matrix[: self.n_sites, self.n_sites:]

    @property
    def pump_lower(self) -> np.ndarray:
        """Lower-left block +K."""
        return self.matrix[self.n_sites:, : self.n_sites]


@dataclass(frozen=True)
class StabilityReport:
    """Eigenvalue-based steady-state stability diagnosis."""

    max_im_eigenvalue: float
    stable: bool
    eigenvalues: np.ndarray = field(repr=False)


def build_hnh(p: EffectiveParams, d: DisorderRealization | None = None) -> NambuMatrix:
    """Assemble the dynamical matrix for ``p`` with optional disorder ``d``."""
    N = p.N
    if d is None:
        d = DisorderRealization(
            delta_onsite=np.zeros(N),
            kappa_site=np.full(N, p.kappa),
            J_bond=np.full(max(N - 1, 0), p.J),
            phi_bond=np.full(max(N - 1, 0), p.phi),
            g_s_site=np.full(N, p.g_s),
            g_c_bond=np.full(max(N - 1, 0), p.g_c),
        )
    d.check(N)

    M = np.diag(-(p.delta + d.delta_onsite).astype(complex))
    hop = d.J_bond * np.exp(-1j * d.phi_bond)
    if N > 1:
        M += np.diag(hop, k=1) + np.diag(np.conj(hop), k=-1)

    K = np.diag(d.g_s_site.astype(complex))
    if N > 1:
        K += np.diag(d.g_c_bond.astype(complex), k=1) + np.diag(d.g_c_bond.astype(complex), k=-1)

    loss = -0.5j * np.diag(d.kappa_site.astype(complex))
    H = np.block([[M + loss, -K], [K, -np.conj(M) + loss]])
    return NambuMatrix(n_sites=N, matrix=H, kappa_site=np.array(d.kappa_site, dtype=float))


def particle_hole_swap(n_sites: int) -> np.ndarray:
    """Sigma_x in Nambu space: swaps particle and hole blocks."""
    eye = np.eye(n_sites)
    zero = np.zeros((n_sites, n_sites))
    return np.block([[zero, eye], [eye, zero]])


def stability(h: NambuMatrix, eps_rel: float = 1e-9) -> StabilityReport:
    """Full spectrum of H; stable iff every Im(lambda) < -eps_rel * mean(kappa).

    Solver non-convergence surfaces as :class:`EigenSolverFailure`, never
    as a silently unstable verdict.
    """
    try:
        ev = np.linalg.eigvals(h.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverFailure(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise EigenSolverFailure("eigenvalue computation returned non-finite values")
    eps = eps_rel * float(np.mean(h.kappa_site))
    max_im = float(ev.imag.max())
    return StabilityReport(max_im_eigenvalue=max_im, stable=max_im < -eps, eigenvalues=ev)


def hnh_to_rows(h: NambuMatrix):
    """Yield (row, col, re, im) tuples of the dense matrix for CSV export."""
    n2 = 2 * h.n_sites
    for r in range(n2):
        for c in range(n2):
            v = h.matrix[r, c]
            yield (r, c, float(v.real), float(v.imag))
