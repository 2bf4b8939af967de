import numpy as np
import pytest

from spinrelax import SpinSystemParams
from spinrelax.fitting import SurfacePoints, SurfaceRateModel
from spinrelax.fitting.surface import RateSurface

# Ground-truth rate parameters used by the synthetic-surface tests. The
# exponents and correlation time carry physically expected values; the
# amplitudes place the field-scan minimum between 1 and 3 T over 30-250 K
# (crossing 1.8 T near 43 K) while keeping the single-phonon channel strong
# enough at low temperature to be identifiable from 3% noise.
SURFACE_TRUTH = {"a1": 2.5e-8, "n1": 1.6, "a2": 5e-5, "n2": 2.0,
                 "eta": 6.0e-3, "tau_c": 100.0}

ACCEPT_TEMPS = np.array([15., 16., 17., 18., 19., 20., 21., 22., 24., 26., 28.,
                         30., 35., 40., 45., 50., 60., 75., 100., 125., 150.,
                         175., 200., 225., 250.])
ACCEPT_FIELDS = np.concatenate([
    np.arange(0.0, 0.0451, 0.005),      # zero-field plateau region
    [0.1],                              # inside the exclusion window
    np.arange(0.2, 2.5, 0.05),
    np.arange(2.5, 7.0001, 0.025),      # dense where the direct channel shows
])


def make_surface(temps, fields, truth=None, noise=0.03, seed=42,
                 spin=None, transition="upper"):
    """Synthetic rate surface on a (temps x fields) grid with relative noise."""
    truth = dict(SURFACE_TRUTH if truth is None else truth)
    spin = spin if spin is not None else SpinSystemParams()
    t, h = (a.ravel() for a in np.meshgrid(temps, fields, indexing="ij"))
    points = SurfacePoints(spin, t, h, transition)
    model = SurfaceRateModel(spin=spin, transition=transition)
    gamma_true = model.predict(truth, points)
    sigma = noise * gamma_true
    rng = np.random.default_rng(seed)
    gamma = gamma_true + rng.normal(0.0, sigma)
    return RateSurface(temperature=t, field=h, gamma=gamma, sigma=sigma)


@pytest.fixture(scope="session")
def spin():
    return SpinSystemParams()


@pytest.fixture(scope="session")
def small_surface():
    """Compact noiseless-ish surface for unit tests; not the acceptance grid."""
    temps = np.array([15., 20., 30., 50., 100., 175., 250.])
    fields = np.concatenate([np.arange(0.0, 0.041, 0.01),
                             np.arange(0.2, 7.01, 0.2)])
    return make_surface(temps, fields, noise=0.02, seed=9).masked_by_windows()
