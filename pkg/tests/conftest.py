import math

import numpy as np
import pytest

from topamp.meanfield import EffectiveParams


def normalized_point(N: int, kappa_over_J: float, gc_over_J: float,
                     gs_over_gc: float = 1.0, delta: float = 0.0,
                     phi: float = math.pi / 2.0) -> EffectiveParams:
    """Lattice parameters in units of the hopping (J = 1)."""
    return EffectiveParams(N=N, delta=delta, J=1.0, phi=phi,
                           kappa=kappa_over_J, g_s=gs_over_gc * gc_over_J,
                           g_c=gc_over_J)


@pytest.fixture
def p1_n20() -> EffectiveParams:
    """The topology/directionality workhorse: kappa/J=2.6, g_c/J=0.6, N=20."""
    return normalized_point(20, 2.6, 0.6)


@pytest.fixture
def p1_n8() -> EffectiveParams:
    return normalized_point(8, 2.6, 0.6)


@pytest.fixture
def p1p_n10() -> EffectiveParams:
    return normalized_point(10, 2.6, 0.6)


@pytest.fixture
def p2_n27() -> EffectiveParams:
    return normalized_point(27, 0.9, 0.25)


@pytest.fixture
def p3_n4() -> EffectiveParams:
    return normalized_point(4, 2.8, 0.95)


def random_stable_points(rng: np.random.Generator, count: int,
                         n_range=(3, 13), omega_range=(-2.0, 2.0)):
    """Rejection-sample dynamically stable normalized parameter sets."""
    from topamp.lattice import build_hnh, stability

    out = []
    while len(out) < count:
        p = EffectiveParams(
            N=int(rng.integers(*n_range)),
            delta=float(rng.uniform(-0.5, 0.5)),
            J=1.0,
            phi=float(rng.uniform(0.2, math.pi - 0.2)),
            kappa=float(rng.uniform(0.3, 4.0)),
            g_s=float(rng.uniform(0.05, 1.5)),
            g_c=float(rng.uniform(0.05, 1.5)),
        )
        h = build_hnh(p)
        if stability(h).stable:
            out.append((p, h, float(rng.uniform(*omega_range))))
    return out
