"""CSV and JSON round trips, parse diagnostics."""

import numpy as np
import pytest

from spinrelax.bath import SurvivalCurve
from spinrelax.decay import DecayCurve, StretchedExpParams
from spinrelax.errors import DomainError, ParseError
from spinrelax.hamiltonian import SpinSystemParams
from spinrelax.io import (
    read_decay_csv,
    read_json,
    read_surface_csv,
    read_survival_csv,
    relaxation_params_from_dict,
    relaxation_params_to_dict,
    spin_params_from_dict,
    spin_params_to_dict,
    stretched_exp_params_from_dict,
    stretched_exp_params_to_dict,
    write_decay_csv,
    write_json,
    write_surface_csv,
    write_survival_csv,
)
from spinrelax.fitting import RateSurface
from spinrelax.rates import CrossRelaxParams, RelaxationParams


def _curve():
    delays = np.geomspace(0.5, 500.0, 12)
    rng = np.random.default_rng(2)
    return DecayCurve(delays=delays, contrast=rng.normal(-0.05, 0.01, 12),
                      sigma=np.full(12, 0.003),
                      meta={"seed": 7, "shots": 400, "tag": "runA", "gain": 1.25})


def test_decay_round_trip_is_bit_exact(tmp_path):
    curve = _curve()
    path = tmp_path / "decay.csv"
    write_decay_csv(path, curve)
    back = read_decay_csv(path)
    np.testing.assert_array_equal(back.delays, curve.delays)
    np.testing.assert_array_equal(back.contrast, curve.contrast)
    np.testing.assert_array_equal(back.sigma, curve.sigma)


def test_meta_types_preserved(tmp_path):
    path = tmp_path / "decay.csv"
    write_decay_csv(path, _curve())
    meta = read_decay_csv(path).meta
    assert meta["seed"] == 7 and isinstance(meta["seed"], int)
    assert meta["gain"] == 1.25 and isinstance(meta["gain"], float)
    assert meta["tag"] == "runA"


def test_surface_round_trip_with_mask(tmp_path):
    surface = RateSurface(temperature=[20.0, 20.0, 100.0],
                          field=[0.03, 0.05, 3.0],
                          gamma=[0.2, 0.21, 0.5],
                          sigma=[0.01, 0.01, 0.02],
                          mask=[False, True, False])
    path = tmp_path / "surface.csv"
    write_surface_csv(path, surface, meta={"source": "synthetic"})
    back = read_surface_csv(path)
    np.testing.assert_array_equal(back.mask, surface.mask)
    np.testing.assert_array_equal(back.gamma, surface.gamma)


def test_surface_mask_column_optional(tmp_path):
    path = tmp_path / "surface.csv"
    path.write_text("T_K,H_T,gamma_per_ms,sigma_per_ms,mask\n"
                    "20.0,0.03,0.2,0.01\n"
                    "20.0,0.05,0.21,0.01\n")
    back = read_surface_csv(path)
    assert not back.mask.any()
    masked = read_surface_csv(path, auto_mask=True)
    np.testing.assert_array_equal(masked.mask, [False, True])


def test_survival_round_trip(tmp_path):
    t = np.geomspace(0.01, 10.0, 20)
    curve = SurvivalCurve(times=t, survival=np.exp(-np.sqrt(t)),
                          stderr=np.full(20, 1e-3))
    path = tmp_path / "survival.csv"
    write_survival_csv(path, curve, meta={"n_real": 100})
    back, meta = read_survival_csv(path)
    np.testing.assert_array_equal(back.survival, curve.survival)
    assert meta["n_real"] == 100


@pytest.mark.parametrize("body, lineno", [
    ("delay_us,contrast\n1.0,0.1,0.01\n", 1),                      # wrong header
    ("# a=1\ndelay_us,contrast,sigma\n# b=2\n1.0,0.1,0.01\n", 3),  # meta after header
    ("# noequals\ndelay_us,contrast,sigma\n1.0,0.1,0.01\n", 1),    # malformed meta
    ("delay_us,contrast,sigma\n1.0,0.1\n", 2),                     # missing field
    ("delay_us,contrast,sigma\n1.0,zip,0.01\n", 2),                # bad float
    ("delay_us,contrast,sigma\n", None),                           # no data rows
    ("", None),                                                    # empty file
])
def test_parse_errors_name_the_line(tmp_path, body, lineno):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(ParseError) as excinfo:
        read_decay_csv(path)
    message = str(excinfo.value)
    assert "bad.csv" in message
    if lineno is not None:
        assert f"bad.csv:{lineno}" in message
        assert excinfo.value.line == lineno


def test_spin_params_json_round_trip():
    params = SpinSystemParams(D=3.48, E=0.05, g=2.003)
    payload = spin_params_to_dict(params)
    assert payload["D"]["unit"] == "GHz"
    assert spin_params_from_dict(payload) == params
    # raw numbers accepted too
    raw = {k: v["value"] for k, v in payload.items()}
    assert spin_params_from_dict(raw) == params


def test_relaxation_params_round_trip_with_cross():
    params = RelaxationParams(a1=2.5e-8, n1=1.6, a2=5e-5, n2=2.0, eta=6e-3,
                              tau_c=100.0,
                              cross_relax=CrossRelaxParams(amplitude=0.08,
                                                           half_width=0.012))
    payload = relaxation_params_to_dict(params)
    again = relaxation_params_from_dict(payload)
    assert again == params


def test_relaxation_params_missing_key():
    payload = relaxation_params_to_dict(
        RelaxationParams(a1=1e-8, n1=1.5, a2=1e-5, n2=2.0, eta=4e-3, tau_c=90.0))
    del payload["tau_c"]
    with pytest.raises(DomainError, match="tau_c"):
        relaxation_params_from_dict(payload)


def test_relaxation_cross_pair_must_be_complete():
    payload = relaxation_params_to_dict(
        RelaxationParams(a1=1e-8, n1=1.5, a2=1e-5, n2=2.0, eta=4e-3, tau_c=90.0))
    payload["cross_amp"] = 0.1
    with pytest.raises(DomainError):
        relaxation_params_from_dict(payload)


def test_stretched_exp_params_round_trip():
    params = StretchedExpParams(c0=-0.12, t1=50.0, beta=0.7)
    assert stretched_exp_params_from_dict(stretched_exp_params_to_dict(params)) == params


def test_json_files(tmp_path):
    path = tmp_path / "out.json"
    write_json(path, {"b": 2, "a": [1, 2.5, "x"]})
    text = path.read_text()
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert read_json(path) == {"b": 2, "a": [1, 2.5, "x"]}


def test_json_parse_error_names_position(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"a": 1,\n  "b": }\n')
    with pytest.raises(ParseError) as excinfo:
        read_json(path)
    assert "broken.json" in str(excinfo.value)
    assert "line 2" in str(excinfo.value)
