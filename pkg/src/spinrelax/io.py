"""File formats: decay/survival/surface CSV and parameter/result JSON.

CSV files carry metadata as leading ``# key=value`` lines followed by a fixed
header and numeric rows. Floats are written with shortest round-trip
representation, so write followed by read reproduces every value bit for bit.
Parameter JSON documents annotate each field with its unit.
"""

from __future__ import annotations

import json
from typing import Optional

import numpy as np

from .bath import SurvivalCurve
from .decay import DecayCurve, StretchedExpParams
from .errors import DomainError, ParseError
from .fitting.surface import RateSurface
from .hamiltonian import SpinSystemParams, exclusion_windows, in_exclusion
from .rates import CrossRelaxParams, RelaxationParams

DECAY_HEADER = "delay_us,contrast,sigma"
SURVIVAL_HEADER = "delay_us,survival,sigma"
SURFACE_HEADER = "T_K,H_T,gamma_per_ms,sigma_per_ms,mask"

_UNITS = {
    "SpinSystemParams": {"D": "GHz", "E": "GHz", "g": "dimensionless"},
    "RelaxationParams": {
        "a1": "ms^-1 K^-1 GHz^-n1",
        "n1": "dimensionless",
        "a2": "ms^-1 K^-n2",
        "n2": "dimensionless",
        "eta": "ms^-1 ps^-1",
        "tau_c": "ps",
        "cross_amp": "ms^-1",
        "cross_half_width": "T",
    },
    "StretchedExpParams": {"c0": "dimensionless", "t1": "us", "beta": "dimensionless"},
}


def _format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _parse_value(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _write_table(path, meta: dict, header: str, columns) -> None:
    lines = [f"# {key}={_format_value(value)}" for key, value in meta.items()]
    lines.append(header)
    for row in zip(*columns):
        lines.append(",".join(_format_value(v) for v in row))
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def _read_table(path, header: str, n_columns: int, optional_last: bool = False):
    meta = {}
    rows = []
    header_seen = False
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if header_seen:
                    raise ParseError(f"{path}:{lineno}: metadata after the header", line=lineno)
                body = line[1:].strip()
                if "=" not in body:
                    raise ParseError(
                        f"{path}:{lineno}: malformed metadata line {line!r}, "
                        "expected '# key=value'", line=lineno)
                key, _, value = body.partition("=")
                meta[key.strip()] = _parse_value(value.strip())
                continue
            if not header_seen:
                expected = header.split(",")
                got = [c.strip() for c in line.split(",")]
                if got != expected and not (optional_last and got == expected[:-1]):
                    raise ParseError(
                        f"{path}:{lineno}: malformed header {line!r}, expected {header!r}",
                        line=lineno)
                header_seen = True
                continue
            fields = line.split(",")
            if len(fields) != n_columns and not (optional_last and len(fields) == n_columns - 1):
                raise ParseError(
                    f"{path}:{lineno}: expected {n_columns} fields, got {len(fields)}",
                    line=lineno)
            try:
                rows.append([float(f) for f in fields])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}", line=lineno)
    if not header_seen:
        raise ParseError(f"{path}: missing header line {header!r}")
    if not rows:
        raise ParseError(f"{path}: no data rows")
    width = max(len(r) for r in rows)
    table = np.full((len(rows), width), np.nan)
    for i, row in enumerate(rows):
        table[i, :len(row)] = row
    return meta, table


def write_decay_csv(path, curve: DecayCurve) -> None:
    _write_table(path, curve.meta, DECAY_HEADER,
                 (curve.delays, curve.contrast, curve.sigma))


def read_decay_csv(path) -> DecayCurve:
    meta, table = _read_table(path, DECAY_HEADER, 3)
    return DecayCurve(delays=table[:, 0], contrast=table[:, 1], sigma=table[:, 2], meta=meta)


def write_survival_csv(path, curve: SurvivalCurve, meta: Optional[dict] = None) -> None:
    _write_table(path, meta or {}, SURVIVAL_HEADER,
                 (curve.times, curve.survival, curve.stderr))


def read_survival_csv(path):
    """Survival curve plus its metadata dict."""
    meta, table = _read_table(path, SURVIVAL_HEADER, 3)
    return SurvivalCurve(times=table[:, 0], survival=table[:, 1], stderr=table[:, 2]), meta


def write_surface_csv(path, surface: RateSurface, meta: Optional[dict] = None) -> None:
    mask = surface.mask.astype(int)
    _write_table(path, meta or {}, SURFACE_HEADER,
                 (surface.temperature, surface.field, surface.gamma, surface.sigma, mask))


def read_surface_csv(path, auto_mask: bool = False, windows=None) -> RateSurface:
    """Rate surface from CSV. The mask column is optional.

    With ``auto_mask`` points inside the exclusion windows are masked in
    addition to any mask column present.
    """
    meta, table = _read_table(path, SURFACE_HEADER, 5, optional_last=True)
    mask = np.nan_to_num(table[:, 4], nan=0.0).astype(bool) if table.shape[1] >= 5 \
        else np.zeros(len(table), dtype=bool)
    surface = RateSurface(temperature=table[:, 0], field=table[:, 1],
                          gamma=table[:, 2], sigma=table[:, 3], mask=mask)
    if auto_mask:
        surface = surface.masked_by_windows(windows)
    return surface


def _annotate(values: dict, units: dict) -> dict:
    return {name: {"value": float(value), "unit": units[name]}
            for name, value in values.items()}


def _plain_value(entry, name):
    if isinstance(entry, dict):
        if "value" not in entry:
            raise DomainError(f"field {name!r} must carry a 'value' entry")
        return float(entry["value"])
    return float(entry)


def spin_params_to_dict(params: SpinSystemParams) -> dict:
    return _annotate({"D": params.D, "E": params.E, "g": params.g},
                     _UNITS["SpinSystemParams"])


def spin_params_from_dict(payload: dict) -> SpinSystemParams:
    kwargs = {name: _plain_value(payload[name], name) for name in ("D", "E", "g")
              if name in payload}
    return SpinSystemParams(**kwargs)


def relaxation_params_to_dict(params: RelaxationParams) -> dict:
    units = _UNITS["RelaxationParams"]
    values = {"a1": params.a1, "n1": params.n1, "a2": params.a2, "n2": params.n2,
              "eta": params.eta, "tau_c": params.tau_c}
    payload = _annotate(values, units)
    if params.cross_relax is not None:
        payload["cross_amp"] = {"value": float(params.cross_relax.amplitude),
                                "unit": units["cross_amp"]}
        payload["cross_half_width"] = {"value": float(params.cross_relax.half_width),
                                       "unit": units["cross_half_width"]}
    return payload


def relaxation_params_from_dict(payload: dict) -> RelaxationParams:
    required = ("a1", "n1", "a2", "n2", "eta", "tau_c")
    missing = [name for name in required if name not in payload]
    if missing:
        raise DomainError(f"relaxation parameter document is missing {missing}")
    kwargs = {name: _plain_value(payload[name], name) for name in required}
    has_cross = "cross_amp" in payload or "cross_half_width" in payload
    if has_cross:
        if "cross_amp" not in payload or "cross_half_width" not in payload:
            raise DomainError("cross-relaxation needs both cross_amp and cross_half_width")
        kwargs["cross_relax"] = CrossRelaxParams(
            amplitude=_plain_value(payload["cross_amp"], "cross_amp"),
            half_width=_plain_value(payload["cross_half_width"], "cross_half_width"))
    return RelaxationParams(**kwargs)


def stretched_exp_params_to_dict(params: StretchedExpParams) -> dict:
    return _annotate({"c0": params.c0, "t1": params.t1, "beta": params.beta},
                     _UNITS["StretchedExpParams"])


def stretched_exp_params_from_dict(payload: dict) -> StretchedExpParams:
    required = ("c0", "t1", "beta")
    missing = [name for name in required if name not in payload]
    if missing:
        raise DomainError(f"stretched-exponential document is missing {missing}")
    return StretchedExpParams(**{name: _plain_value(payload[name], name) for name in required})


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}", line=exc.lineno)
