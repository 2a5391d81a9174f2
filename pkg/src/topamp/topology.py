"""Steady-state phase classification from singular-value spectra.

The singular values E_n(omega) of omega - H coincide with the positive
eigenvalues of the Hermitian doubling [[0, omega - H], [omega - H^dag, 0]].
A stable point is topological at omega when the smallest singular value
satisfies E_0(omega) / J <= 1/N; the zero mode's singular vectors are then
edge states and the Green's function grows exponentially along the chain
with complex rate zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateFit, NotTopological, SvdFailure
from .lattice import NambuMatrix, build_hnh, stability
from .meanfield import EffectiveParams

TOPOLOGICAL = "topological"
TRIVIAL = "trivial"
UNSTABLE = "unstable"


@dataclass(frozen=True)
class SpectralDecomposition:
    """SVD of omega - H with singular values sorted ascending."""

    omega: float
    singular_values: np.ndarray   # 2N, ascending
    left_vectors: np.ndarray      # 2N x 2N, column n pairs with value n
    right_vectors: np.ndarray     # 2N x 2N, column n pairs with value n

    def reconstruct(self) -> np.ndarray:
        """U diag(E) V^dag; equals omega - H up to solver roundoff."""
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T


@dataclass(frozen=True)
class ZetaFit:
    """Least-squares estimate of the inverse localization length."""

    zeta: complex
    r_squared: float
    residuals: np.ndarray = field(repr=False)
    fit_sites: tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class TopologyReport:
    """Classification of one parameter point.

    ``w_top``, ``window`` and ``zeta`` are filled only by the window scan
    and the localization fit respectively; single-omega classification
    leaves them at their defaults.
    """

    classification: str
    e0: float                      # E_0 / J at the probe (or window-center) omega
    gap: float                     # E_1 / J at the same omega (window min for scans)
    omega: float
    w_top: float = 0.0
    window: tuple[float, float] | None = None
    zeta: complex | None = None


def svd_spectrum(h: NambuMatrix, omega: float) -> SpectralDecomposition:
    """Full SVD of omega - H, ascending, vectors column-aligned to values."""
    A = omega * np.eye(2 * h.n_sites) - h.matrix
    try:
        U, S, Vh = np.linalg.svd(A)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(f"SVD did not converge: {exc}") from exc
    order = np.argsort(S)
    return SpectralDecomposition(
        omega=omega,
        singular_values=S[order],
        left_vectors=U[:, order],
        right_vectors=Vh.conj().T[:, order],
    )


def singular_values_grid(h: NambuMatrix, omegas: np.ndarray) -> np.ndarray:
    """Singular values of omega - H for every omega, shape (n_omega, 2N), ascending."""
    omegas = np.asarray(omegas, dtype=float)
    eye = np.eye(2 * h.n_sites)
    A = omegas[:, None, None] * eye - h.matrix[None, :, :]
    try:
        S = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise SvdFailure(f"batched SVD did not converge: {exc}") from exc
    return S[:, ::-1]


def extended_hamiltonian(h: NambuMatrix, omega: float) -> np.ndarray:
    """Hermitian 4N x 4N doubling whose spectrum is +/- the singular values."""
    A = omega * np.eye(2 * h.n_sites) - h.matrix
    Z = np.zeros_like(A)
    return np.block([[Z, A], [A.conj().T, Z]])


def default_omega_grid(J: float = 1.0, n_points: int = 301) -> np.ndarray:
    """The standard probe grid [-3J, 3J]; 301 points resolve w_top to ~2%."""
    return np.linspace(-3.0 * J, 3.0 * J, n_points)


def classify_point(p: EffectiveParams, omega: float,
                   h: NambuMatrix | None = None) -> TopologyReport:
    """Single-frequency classification: unstable, topological, or trivial."""
    if h is None:
        h = build_hnh(p)
    if not stability(h).stable:
        return TopologyReport(classification=UNSTABLE, e0=math.nan, gap=math.nan, omega=omega)
    S = singular_values_grid(h, np.array([omega]))[0]
    e0 = float(S[0]) / p.J
    gap = float(S[1]) / p.J
    cls = TOPOLOGICAL if e0 <= 1.0 / p.N else TRIVIAL
    return TopologyReport(classification=cls, e0=e0, gap=gap, omega=omega)


def topological_window(p: EffectiveParams, omega_grid: np.ndarray | None = None,
                       h: NambuMatrix | None = None) -> TopologyReport:
    """Scan E_0(omega) for the maximal contiguous zero-mode window.

    w_top is the width of the widest contiguous sub-grid with
    E_0(omega)/J <= 1/N; the gap Delta_top is the minimum of E_1(omega)/J
    over that window; e0 is reported at the window's center. An empty
    window classifies as trivial with w_top = 0.
    """
    if h is None:
        h = build_hnh(p)
    if omega_grid is None:
        omega_grid = default_omega_grid(p.J)
    omega_grid = np.asarray(omega_grid, dtype=float)
    if len(omega_grid) < 3:
        raise ValueError("omega_grid needs at least 3 points")

    if not stability(h).stable:
        return TopologyReport(classification=UNSTABLE, e0=math.nan, gap=math.nan,
                              omega=float(omega_grid[len(omega_grid) // 2]))

    S = singular_values_grid(h, omega_grid)
    e0_grid = S[:, 0] / p.J
    e1_grid = S[:, 1] / p.J
    inside = e0_grid <= 1.0 / p.N

    best_lo, best_hi = 0, -1
    i = 0
    n = len(inside)
    while i < n:
        if inside[i]:
            j = i
            while j + 1 < n and inside[j + 1]:
                j += 1
            if j - i > best_hi - best_lo:
                best_lo, best_hi = i, j
            i = j + 1
        else:
            i += 1

    if best_hi < best_lo:
        center = len(omega_grid) // 2
        return TopologyReport(classification=TRIVIAL, e0=float(e0_grid[center]),
                              gap=float(e1_grid[center]), omega=float(omega_grid[center]))

    center = (best_lo + best_hi) // 2
    return TopologyReport(
        classification=TOPOLOGICAL,
        e0=float(e0_grid[center]),
        gap=float(e1_grid[best_lo:best_hi + 1].min()),
        omega=float(omega_grid[center]),
        w_top=float(omega_grid[best_hi] - omega_grid[best_lo]),
        window=(float(omega_grid[best_lo]), float(omega_grid[best_hi])),
    )


def localization_length(h: NambuMatrix, omega: float,
                        fit_range: tuple[int, int] | None = None) -> ZetaFit:
    """Complex inverse localization length from the first Green's column.

    Fits log(G_j1 / G_11) = zeta * (j - 1) by linear least squares over
    1-indexed sites ``fit_range`` (default [2, N-3]); magnitudes give
    Re(zeta), nearest-branch unwrapped phases give Im(zeta).
    """
    N = h.n_sites
    if fit_range is None:
        fit_range = (2, N - 3)
    lo, hi = fit_range
    lo = max(lo, 1)
    hi = min(hi, N)
    if hi - lo + 1 < 3:
        raise DegenerateFit(f"fit range [{lo}, {hi}] has fewer than 3 sites")

    G = np.linalg.inv(omega * np.eye(2 * N) - h.matrix)
    col = G[:N, 0]
    ratio = col / col[0]
    y = np.log(np.abs(ratio)) + 1j * np.unwrap(np.angle(ratio))

    sites = np.arange(1, N + 1)
    sel = (sites >= lo) & (sites <= hi)
    x = sites[sel] - 1.0
    design = np.vstack([x, np.ones_like(x)]).T
    coef_re, *_ = np.linalg.lstsq(design, y[sel].real, rcond=None)
    coef_im, *_ = np.linalg.lstsq(design, y[sel].imag, rcond=None)
    zeta = complex(coef_re[0], coef_im[0])

    fit = design @ np.array([complex(coef_re[0], coef_im[0]),
                             complex(coef_re[1], coef_im[1])])
    resid = y[sel] - fit
    total = np.abs(y[sel] - y[sel].mean()) ** 2
    ss_tot = float(total.sum())
    r2 = 1.0 - float((np.abs(resid) ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return ZetaFit(zeta=zeta, r_squared=r2, residuals=resid, fit_sites=(lo, hi))


@dataclass(frozen=True)
class EdgeStates:
    """Zero-mode singular vectors with localization summaries."""

    u: np.ndarray              # left vector, localized at the input edge
    v: np.ndarray              # right vector, localized at the output edge
    e0: float
    u_first_quartile: float    # site-probability weight in the first N//4 sites
    u_last_quartile: float
    v_first_quartile: float
    v_last_quartile: float


def edge_states(h: NambuMatrix, omega: float, J: float = 1.0) -> EdgeStates:
    """Singular vectors of E_0; raises :class:`NotTopological` outside the phase.

    Site weights combine the particle and hole components,
    w_j = |x_j|^2 + |x_{N+j}|^2.
    """
    N = h.n_sites
    dec = svd_spectrum(h, omega)
    e0 = float(dec.singular_values[0]) / J
    if e0 > 1.0 / N:
        raise NotTopological(f"E_0/J = {e0:.4g} exceeds 1/N = {1.0 / N:.4g} at omega = {omega}")
    u = dec.left_vectors[:, 0]
    v = dec.right_vectors[:, 0]
    q = max(N // 4, 1)
    wu = np.abs(u[:N]) ** 2 + np.abs(u[N:]) ** 2
    wv = np.abs(v[:N]) ** 2 + np.abs(v[N:]) ** 2
    return EdgeStates(
        u=u, v=v, e0=e0,
        u_first_quartile=float(wu[:q].sum()), u_last_quartile=float(wu[-q:].sum()),
        v_first_quartile=float(wv[:q].sum()), v_last_quartile=float(wv[-q:].sum()),
    )


@dataclass(frozen=True)
class PhaseMapResult:
    """Grid classification over (kappa/J, g_c/J)."""

    kappa_over_J: np.ndarray
    gc_over_J: np.ndarray
    classification: np.ndarray   # object array of strings, shape (n_kappa, n_gc)
    re_zeta: np.ndarray          # NaN outside the topological phase
    e0: np.ndarray               # NaN where unstable
    gap: np.ndarray              # E_1/J at the probe omega; NaN where unstable


def phase_map(kappa_over_J: np.ndarray, gc_over_J: np.ndarray,
              base: EffectiveParams, omega: float) -> PhaseMapResult:
    """Classify every grid cell at fixed probe frequency.

    Each cell rescales kappa and g_c of ``base`` (g_s keeps the base
    g_s/g_c ratio, or follows g_c when the base ratio is undefined);
    zeta is fit only where the cell is topological and wide enough.
    Per-cell solver errors are recorded as unstable cells, not raised.
    """
    kappa_over_J = np.asarray(kappa_over_J, dtype=float)
    gc_over_J = np.asarray(gc_over_J, dtype=float)
    if kappa_over_J.size < 2 or gc_over_J.size < 2:
        raise ValueError("phase map grid must be at least 2 x 2")
    shape = (len(kappa_over_J), len(gc_over_J))
    cls = np.empty(shape, dtype=object)
    re_z = np.full(shape, np.nan)
    e0 = np.full(shape, np.nan)
    gap = np.full(shape, np.nan)
    gs_ratio = base.g_s / base.g_c if base.g_c != 0.0 else 1.0

    for a, kr in enumerate(kappa_over_J):
        for b, gr in enumerate(gc_over_J):
            p = replace(base, kappa=kr * base.J, g_c=gr * base.J,
                        g_s=gs_ratio * gr * base.J)
            try:
                h = build_hnh(p)
                report = classify_point(p, omega, h=h)
            except Exception:
                cls[a, b] = UNSTABLE
                continue
            cls[a, b] = report.classification
            if report.classification != UNSTABLE:
                e0[a, b] = report.e0
                gap[a, b] = report.gap
            if report.classification == TOPOLOGICAL and p.N >= 6:
                try:
                    re_z[a, b] = localization_length(h, omega).zeta.real
                except DegenerateFit:
                    pass
    return PhaseMapResult(kappa_over_J=kappa_over_J, gc_over_J=gc_over_J,
                          classification=cls, re_zeta=re_z, e0=e0, gap=gap)
