import math

import numpy as np
import pytest

from conftest import normalized_point, random_stable_points
from topamp.errors import DimensionMismatch, NonPositiveParameter
from topamp.lattice import (DisorderRealization, DisorderSigmas, build_hnh,
                            hnh_to_rows, particle_hole_swap, sample_disorder,
                            stability)
from topamp.meanfield import EffectiveParams


def test_single_site_block():
    p = EffectiveParams(N=1, delta=0.0, J=1.0, phi=math.pi / 2, kappa=2.0,
                        g_s=1.0, g_c=0.6)
    h = build_hnh(p)
    expected = np.array([[-1j, -1.0], [1.0, -1j]])
    assert np.allclose(h.matrix, expected, atol=1e-15)


def test_block_accessors(p1_n20):
    h = build_hnh(p1_n20)
    N = p1_n20.N
    M_rec = h.particle_block + 0.5j * np.diag(h.kappa_site)
    assert np.allclose(M_rec, M_rec.conj().T, atol=1e-15)          # M Hermitian
    assert np.allclose(h.pump_upper, -h.pump_lower, atol=0)        # -K vs K
    K = h.pump_lower
    assert np.allclose(K, K.T, atol=0)                             # K symmetric
    assert np.allclose(K.imag, 0.0, atol=0)                        # K real
    assert np.allclose(h.hole_block, -np.conj(M_rec) - 0.5j * np.diag(h.kappa_site),
                       atol=1e-15)
    assert h.matrix.shape == (2 * N, 2 * N)


def test_particle_hole_symmetry_exact(p1_n20):
    h = build_hnh(p1_n20)
    Sx = particle_hole_swap(p1_n20.N)
    assert np.abs(Sx @ h.matrix.conj() @ Sx + h.matrix).max() == 0.0


def test_particle_hole_symmetry_with_disorder(p1p_n10):
    d = sample_disorder(p1p_n10, DisorderSigmas(delta=0.1, kappa=0.1, J=0.1,
                                                gs=0.1, gc=0.1, phi=0.1), seed=11)
    h = build_hnh(p1p_n10, d)
    Sx = particle_hole_swap(p1p_n10.N)
    assert np.abs(Sx @ h.matrix.conj() @ Sx + h.matrix).max() < 1e-15


def test_eigenvalue_pairing():
    """Spectrum comes in (lambda, -conj(lambda)) pairs for every stable set."""
    rng = np.random.default_rng(3)
    for p, h, _ in random_stable_points(rng, 12):
        ev = np.linalg.eigvals(h.matrix)
        partners = -ev.conj()
        # nearest-match each eigenvalue to the reflected set
        dist = np.abs(ev[:, None] - partners[None, :]).min(axis=1)
        assert dist.max() < 1e-9 * p.J


def test_passive_lattice_spectrum():
    p = normalized_point(12, kappa_over_J=1.4, gc_over_J=0.0)
    h = build_hnh(p)
    rep = stability(h)
    assert rep.stable
    # all eigenvalues sit at Im = -kappa/2, Re = -Delta +/- 2J cos k
    assert np.allclose(rep.eigenvalues.imag, -0.7, atol=1e-12)
    ks = np.arange(1, 13) * math.pi / 13.0
    expected = np.sort(np.concatenate([2 * np.cos(ks), -2 * np.cos(ks)]))
    assert np.allclose(np.sort(rep.eigenvalues.real), expected, atol=1e-9)


def test_stability_p1(p1_n20):
    assert stability(build_hnh(p1_n20)).stable


def test_instability_at_large_pump():
    p = normalized_point(20, kappa_over_J=2.6, gc_over_J=2.0)
    rep = stability(build_hnh(p))
    assert not rep.stable
    assert rep.max_im_eigenvalue > 1.0   # deep in the unstable region


def test_zero_sigma_equals_base(p1p_n10):
    d = sample_disorder(p1p_n10, DisorderSigmas(), seed=99)
    assert np.all(d.delta_onsite == 0.0)
    assert np.all(d.kappa_site == p1p_n10.kappa)
    assert np.all(d.J_bond == p1p_n10.J)
    assert np.all(d.phi_bond == p1p_n10.phi)
    assert np.all(d.g_s_site == p1p_n10.g_s)
    assert np.all(d.g_c_bond == p1p_n10.g_c)
    assert np.allclose(build_hnh(p1p_n10, d).matrix, build_hnh(p1p_n10).matrix)


def test_disorder_deterministic(p1p_n10):
    sig = DisorderSigmas(delta=0.2, kappa=0.2, J=0.2, gs=0.2, gc=0.2, phi=0.2)
    d1 = sample_disorder(p1p_n10, sig, seed=42)
    d2 = sample_disorder(p1p_n10, sig, seed=42)
    for name in ("delta_onsite", "kappa_site", "J_bond", "phi_bond",
                 "g_s_site", "g_c_bond"):
        assert np.array_equal(getattr(d1, name), getattr(d2, name))
    d3 = sample_disorder(p1p_n10, sig, seed=43)
    assert not np.array_equal(d1.delta_onsite, d3.delta_onsite)


def test_disorder_array_lengths(p1p_n10):
    d = sample_disorder(p1p_n10, DisorderSigmas(J=0.1), seed=1)
    assert len(d.delta_onsite) == 10
    assert len(d.J_bond) == 9
    assert len(d.phi_bond) == 9
    assert len(d.g_c_bond) == 9


def test_kappa_rejection_keeps_positive():
    p = normalized_point(50, kappa_over_J=0.2, gc_over_J=0.1)
    # sigma kappa = 1.0 J >> kappa: naive draws would often go negative
    d = sample_disorder(p, DisorderSigmas(kappa=1.0), seed=7)
    assert np.all(d.kappa_site > 0.0)


def test_disorder_empirical_stddev(p1p_n10):
    """sigma_kappa = 0.1: the sampled spread matches 0.1 J within 3 percent."""
    draws = np.concatenate([
        sample_disorder(p1p_n10, DisorderSigmas(kappa=0.1), seed=s).kappa_site
        for s in range(1000)])
    assert draws.size == 10000
    assert abs(draws.std() - 0.1 * p1p_n10.J) < 0.003 * p1p_n10.J
    assert abs(draws.mean() - p1p_n10.kappa) < 0.005


def test_dimension_mismatch():
    p = normalized_point(6, 2.0, 0.3)
    bad = DisorderRealization(
        delta_onsite=np.zeros(5), kappa_site=np.ones(6), J_bond=np.ones(5),
        phi_bond=np.full(5, math.pi / 2), g_s_site=np.full(6, 0.3),
        g_c_bond=np.full(5, 0.3))
    with pytest.raises(DimensionMismatch):
        build_hnh(p, bad)


def test_nonpositive_kappa_rejected():
    p = normalized_point(3, 2.0, 0.3)
    bad = DisorderRealization(
        delta_onsite=np.zeros(3), kappa_site=np.array([1.0, -0.1, 1.0]),
        J_bond=np.ones(2), phi_bond=np.full(2, math.pi / 2),
        g_s_site=np.full(3, 0.3), g_c_bond=np.full(2, 0.3))
    with pytest.raises(NonPositiveParameter):
        build_hnh(p, bad)


def test_matrix_immutable(p1_n8):
    h = build_hnh(p1_n8)
    with pytest.raises(ValueError):
        h.matrix[0, 0] = 1.0


def test_phase_sign_mirror_spectrum(p1_n20):
    """phi -> -phi is the mirrored device: identical singular/eigen spectra."""
    from dataclasses import replace

    h_plus = build_hnh(p1_n20)
    h_minus = build_hnh(replace(p1_n20, phi=-p1_n20.phi))
    s_plus = np.linalg.svd(-0.5 * np.eye(40) - h_plus.matrix, compute_uv=False)
    s_minus = np.linalg.svd(-0.5 * np.eye(40) - h_minus.matrix, compute_uv=False)
    assert np.abs(s_plus - s_minus).max() < 1e-9
    assert (stability(h_plus).stable == stability(h_minus).stable)


def test_hnh_rows_roundtrip(p1_n8):
    h = build_hnh(p1_n8)
    rows = list(hnh_to_rows(h))
    assert len(rows) == (2 * 8) ** 2
    rebuilt = np.zeros((16, 16), complex)
    for r, c, re, im in rows:
        rebuilt[r, c] = re + 1j * im
    assert np.array_equal(rebuilt, h.matrix)
