"""Global surface fits: recovery, masking, identifiability, model selection."""

import numpy as np
import pytest

from spinrelax.errors import DomainError, IdentifiabilityError, InsufficientDataError
from spinrelax.fitting import (
    RateSurface,
    RateSurfaceFitter,
    SurfaceModelConfig,
    SurfacePoints,
    SurfaceRateModel,
    compare_models,
    fit_rate_surface,
)
from spinrelax.hamiltonian import SpinSystemParams

from conftest import SURFACE_TRUTH, make_surface


def test_recovers_truth_on_small_grid(small_surface):
    result = fit_rate_surface(small_surface)
    assert result.converged
    for name in ("n1", "n2"):
        assert result.params[name] == pytest.approx(SURFACE_TRUTH[name], rel=0.10)
    assert result.params["a2"] == pytest.approx(SURFACE_TRUTH["a2"], rel=0.10)
    assert result.params["tau_c"] == pytest.approx(SURFACE_TRUTH["tau_c"], rel=0.35)
    assert 0.3 < result.chi2_reduced < 2.0


def test_masked_points_do_not_touch_the_fit(small_surface):
    corrupted = RateSurface(small_surface.temperature, small_surface.field,
                            np.where(small_surface.mask, 1e6, small_surface.gamma),
                            small_surface.sigma, mask=small_surface.mask)
    a = fit_rate_surface(small_surface)
    b = fit_rate_surface(corrupted)
    assert a.params == b.params
    assert a.data_hash == b.data_hash


def test_point_order_does_not_matter(small_surface):
    rng = np.random.default_rng(17)
    order = rng.permutation(len(small_surface))
    shuffled = RateSurface(small_surface.temperature[order], small_surface.field[order],
                           small_surface.gamma[order], small_surface.sigma[order],
                           mask=small_surface.mask[order])
    a = fit_rate_surface(small_surface)
    b = fit_rate_surface(shuffled)
    for name in a.params:
        assert b.params[name] == pytest.approx(a.params[name], rel=1e-7)


def test_single_field_grid_is_not_identifiable():
    temps = np.geomspace(15.0, 250.0, 25)
    surface = make_surface(temps, np.array([7.0]), noise=0.02, seed=3)
    with pytest.raises(IdentifiabilityError) as excinfo:
        fit_rate_surface(surface)
    named = excinfo.value.parameters
    assert named
    assert set(named) <= {"a1", "n1", "a2", "n2", "eta", "tau_c"}
    for name in named:
        assert name in str(excinfo.value)


def test_fixed_parameter_is_clamped(small_surface):
    config = SurfaceModelConfig(free=("a1", "n1", "a2", "eta", "tau_c"),
                                fixed={"n2": 2.0})
    result = fit_rate_surface(small_surface, model_config=config)
    assert result.converged
    assert result.params["n2"] == 2.0
    assert result.stderr["n2"] == 0.0
    assert "n2" not in result.free_names
    assert result.params["n1"] == pytest.approx(SURFACE_TRUTH["n1"], rel=0.10)


def test_too_few_points_rejected():
    surface = make_surface(np.array([20.0, 200.0]), np.array([0.03, 3.0]), seed=1)
    with pytest.raises(InsufficientDataError):
        fit_rate_surface(surface)


def test_unknown_init_and_bounds_names_rejected(small_surface):
    with pytest.raises(DomainError, match="gammaflux"):
        fit_rate_surface(small_surface, init={"gammaflux": 1.0})
    with pytest.raises(DomainError, match="gammaflux"):
        fit_rate_surface(small_surface, bounds={"gammaflux": (0.0, 1.0)})


def _cross_surface(seed=11):
    truth = dict(SURFACE_TRUTH, cross_amp=0.08, cross_half_width=0.012)
    spin = SpinSystemParams()
    temps = np.array([15.0, 25.0, 50.0, 100.0, 175.0, 250.0])
    fields = np.concatenate([np.arange(0.0, 0.0451, 0.005), np.arange(0.2, 7.01, 0.25)])
    t, h = (a.ravel() for a in np.meshgrid(temps, fields, indexing="ij"))
    points = SurfacePoints(spin, t, h)
    model = SurfaceRateModel(spin=spin, with_cross_relax=True)
    gamma_true = model.predict(truth, points)
    sigma = 0.02 * gamma_true
    rng = np.random.default_rng(seed)
    surface = RateSurface(t, h, gamma_true + rng.normal(0.0, sigma), sigma)
    return truth, surface.masked_by_windows()


def test_cross_relax_bump_recovered_and_preferred():
    truth, surface = _cross_surface()
    with_bump = fit_rate_surface(
        surface, model_config=SurfaceModelConfig(
            free=("a1", "n1", "a2", "n2", "eta", "tau_c",
                  "cross_amp", "cross_half_width"),
            with_cross_relax=True))
    without = fit_rate_surface(surface)
    assert with_bump.converged
    assert with_bump.params["cross_amp"] == pytest.approx(truth["cross_amp"], rel=0.25)
    assert with_bump.params["cross_half_width"] == pytest.approx(
        truth["cross_half_width"], rel=0.25)
    table = compare_models([without, with_bump])
    assert table[0]["label"] == "rate-surface"
    assert table[0]["n_free"] == 8


def test_compare_rejects_different_datasets(small_surface):
    _, other = _cross_surface()
    a = fit_rate_surface(small_surface)
    b = fit_rate_surface(other)
    with pytest.raises(DomainError):
        compare_models([a, b])


class TestModelConfig:
    def test_round_trip(self):
        config = SurfaceModelConfig(free=("a1", "n1", "a2", "n2", "eta"),
                                    fixed={"tau_c": 80.0}, transition="both")
        again = SurfaceModelConfig.from_dict(config.to_dict())
        assert again == config

    def test_unknown_parameter(self):
        with pytest.raises(DomainError):
            SurfaceModelConfig(free=("a1", "warp"), fixed={})

    def test_free_and_fixed_overlap(self):
        with pytest.raises(DomainError):
            SurfaceModelConfig(free=("a1", "n1", "a2", "n2", "eta", "tau_c"),
                               fixed={"a1": 1e-8})

    def test_uncovered_parameter(self):
        with pytest.raises(DomainError):
            SurfaceModelConfig(free=("a1", "n1"), fixed={"a2": 1e-5})

    def test_bad_transition(self):
        with pytest.raises(DomainError):
            SurfaceModelConfig(transition="sideways")

    def test_from_dict_unknown_key(self):
        with pytest.raises(DomainError):
            SurfaceModelConfig.from_dict({"free": ["a1"], "colour": "red"})

    def test_cross_names_need_flag(self):
        with pytest.raises(DomainError):
            SurfaceModelConfig(free=("a1", "n1", "a2", "n2", "eta", "tau_c",
                                     "cross_amp", "cross_half_width"))


def test_estimator_wraps_surface_fit(small_surface):
    keep = ~small_surface.mask
    X = np.column_stack([small_surface.temperature[keep], small_surface.field[keep]])
    est = RateSurfaceFitter().fit(X, small_surface.gamma[keep],
                                  sigma=small_surface.sigma[keep])
    ref = fit_rate_surface(small_surface)
    for name, value in ref.params.items():
        assert est.result_.params[name] == pytest.approx(value, rel=1e-7)
    pred = est.predict(X)
    assert pred.shape == (int(keep.sum()),)
    parts = est.decompose(X)
    channels = sum(v for k, v in parts.items() if k != "total")
    np.testing.assert_allclose(channels, parts["total"], rtol=1e-12)
    np.testing.assert_allclose(parts["total"], pred, rtol=1e-12)
