"""Command-line front end.

Five subcommands: ``levels`` tabulates eigenlevels and transition frequencies
versus field, ``synth`` writes a synthetic decay curve, ``fit-curve`` and
``fit-surface`` run the fitting engines on CSV inputs, and ``bath-sim`` runs
the dilute-bath Monte Carlo and fits the stretching exponent.

Every run writes its resolved configuration next to the primary output as
``<out>.run.json``; re-running the same command with ``--config`` pointing at
that file reproduces the outputs. Explicit flags take precedence over config
values. Relative output paths resolve under ``$SPINRELAX_OUTDIR`` when set.
"""

from __future__ import annotations

import functools
import os

import click
import numpy as np
from click.core import ParameterSource

from . import __version__, io
from .bath import BathConfig, estimate_beta, survival_curve
from .decay import PhotonNoise, StretchedExpParams, default_schedule, synthesize_curve
from .errors import SpinRelaxError
from .fitting import (SurfaceModelConfig, SurfacePoints, SurfaceRateModel,
                      compare_models, fit_rate_surface, fit_stretched_exp)
from .hamiltonian import (DEFAULT_LAC_WINDOW, SpinSystemParams, eigenlevels,
                          exclusion_windows, in_exclusion, transition_frequencies)
from .rates import CrossRelaxParams, RelaxationParams

LEVELS_HEADER = "H_T,E_minus_GHz,E_zero_GHz,E_plus_GHz,f_lower_GHz,f_upper_GHz,excluded"
DECOMP_HEADER = "T_K,H_T,gamma_per_ms,direct,raman,spin_spin,cross_relax,total,excluded"

# CLI flag spellings that are not valid python identifiers.
_FLAG_NAMES = {"in_path": "in"}
_PARAM_NAMES = {flag: name for name, flag in _FLAG_NAMES.items()}


def _fail(message: str) -> click.ClickException:
    return click.ClickException(message)


def _surface_errors(fn):
    """Convert library and I/O errors into diagnostic-stream failures."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SpinRelaxError as exc:
            raise _fail(str(exc))
        except OSError as exc:
            raise _fail(f"I/O error: {exc}")

    return wrapper


def _merge_config(ctx: click.Context) -> None:
    """Overlay --config values onto parameters still at their defaults."""
    path = ctx.params.get("config")
    if not path:
        return
    payload = io.read_json(path)
    values = payload.get("params", payload)
    if not isinstance(values, dict):
        raise _fail(f"{path}: config must be a JSON object")
    for key, value in values.items():
        name = key.replace("-", "_")
        name = _PARAM_NAMES.get(name, name)
        if name == "config":
            continue
        if name not in ctx.params:
            raise _fail(f"{path}: unknown config key {key!r} for command "
                        f"{ctx.command.name!r}")
        if ctx.get_parameter_source(name) in (ParameterSource.DEFAULT,
                                              ParameterSource.DEFAULT_MAP):
            if isinstance(value, list):
                value = tuple(value)
            ctx.params[name] = value


def _resolve_out(path: str) -> str:
    path = os.path.expanduser(path)
    if not os.path.isabs(path):
        outdir = os.environ.get("SPINRELAX_OUTDIR")
        if outdir:
            path = os.path.join(outdir, path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


def _jsonable(value):
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _write_run_config(ctx: click.Context, primary_out: str) -> None:
    params = {_FLAG_NAMES.get(name, name): _jsonable(value)
              for name, value in ctx.params.items() if name != "config"}
    payload = {"command": ctx.command.name, "package_version": __version__,
               "params": params}
    io.write_json(primary_out + ".run.json", payload)


def _config_option(fn):
    return click.option("--config", type=click.Path(exists=True, dir_okay=False),
                        default=None, help="JSON config file; explicit flags win.")(fn)


def _spin_options(fn):
    for option in (
        click.option("--D", "D", type=float, default=3.5, show_default=True,
                     help="Axial zero-field splitting (GHz)."),
        click.option("--E", "E", type=float, default=0.0, show_default=True,
                     help="Transverse zero-field splitting (GHz)."),
        click.option("--g", "g", type=float, default=2.0, show_default=True,
                     help="Electron g-factor."),
    ):
        fn = option(fn)
    return fn


@click.group()
@click.version_option(version=__version__, prog_name="spinrelax")
def cli():
    """Spin-1 relaxometry toolkit: level structure, rates, decays, baths."""


@cli.command("levels")
@_config_option
@_spin_options
@click.option("--field-range", nargs=2, type=float, default=(0.0, 7.0),
              show_default=True, help="Field sweep bounds (T).")
@click.option("--step", type=float, default=0.01, show_default=True,
              help="Field step (T).")
@click.option("--lac-window", nargs=2, type=float, default=DEFAULT_LAC_WINDOW,
              show_default=True, help="Exclusion window bounds (T).")
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Output CSV path.")
@click.pass_context
@_surface_errors
def cmd_levels(ctx, **_kwargs):
    """Tabulate eigenlevels and transition frequencies versus field."""
    _merge_config(ctx)
    p = ctx.params
    lo, hi = p["field_range"]
    step = p["step"]
    if step <= 0:
        raise _fail("--step must be positive")
    if hi < lo:
        raise _fail("--field-range bounds must be ordered")
    spin = SpinSystemParams(D=p["D"], E=p["E"], g=p["g"])
    windows = exclusion_windows(tuple(p["lac_window"]))
    fields = np.arange(lo, hi + 0.5 * step, step)
    rows = np.empty((fields.size, 6))
    for i, h in enumerate(fields):
        levels = eigenlevels(spin, float(h))
        tf = transition_frequencies(spin, float(h))
        rows[i] = (h, *levels.energies, tf.f_lower, tf.f_upper)
    excluded = np.fromiter((int(in_exclusion(float(h), windows)) for h in fields),
                           dtype=int, count=fields.size)
    out = _resolve_out(p["out"])
    meta = {"D": spin.D, "E": spin.E, "g": spin.g}
    io._write_table(out, meta, LEVELS_HEADER,
                    (rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3],
                     rows[:, 4], rows[:, 5], excluded))
    _write_run_config(ctx, out)
    click.echo(f"wrote {fields.size} rows to {out}")


@cli.command("synth")
@_config_option
@click.option("--model-json", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Stretched-exponential parameter JSON.")
@click.option("--c0", type=float, default=-0.12, show_default=True,
              help="Contrast amplitude.")
@click.option("--t1", type=float, default=50.0, show_default=True,
              help="Relaxation time (us).")
@click.option("--beta", type=float, default=0.7, show_default=True,
              help="Stretching exponent.")
@click.option("--schedule", default="30", show_default=True,
              help="Delay schedule: N points spanning 0.01-10 T1, or N:TMIN:TMAX in us.")
@click.option("--noise", default=None,
              help="Photon budget as PHOTONS_PER_SHOT:SHOTS; omit for noiseless.")
@click.option("--zero-noise", is_flag=True, default=False,
              help="Force a noiseless curve even when --noise is given.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Output CSV path.")
@click.pass_context
@_surface_errors
def cmd_synth(ctx, **_kwargs):
    """Write a synthetic stretched-exponential decay curve."""
    _merge_config(ctx)
    p = ctx.params
    values = {"c0": p["c0"], "t1": p["t1"], "beta": p["beta"]}
    if p["model_json"]:
        from_file = io.stretched_exp_params_from_dict(io.read_json(p["model_json"]))
        for name in values:
            if ctx.get_parameter_source(name) in (ParameterSource.DEFAULT,
                                                  ParameterSource.DEFAULT_MAP):
                values[name] = getattr(from_file, name)
    params = StretchedExpParams(**values)

    field_count = p["schedule"].split(":")
    try:
        if len(field_count) == 1:
            schedule = default_schedule(params.t1, n=int(field_count[0]))
        elif len(field_count) == 3:
            n, tmin, tmax = int(field_count[0]), float(field_count[1]), float(field_count[2])
            if tmin <= 0 or tmax <= tmin or n < 2:
                raise _fail("--schedule N:TMIN:TMAX needs 0 < TMIN < TMAX and N >= 2")
            schedule = np.geomspace(tmin, tmax, n)
        else:
            raise _fail("--schedule must be N or N:TMIN:TMAX")
    except ValueError:
        raise _fail(f"--schedule {p['schedule']!r} is not N or N:TMIN:TMAX")

    noise = None
    if p["noise"] and not p["zero_noise"]:
        parts = p["noise"].split(":")
        if len(parts) != 2:
            raise _fail("--noise must be PHOTONS_PER_SHOT:SHOTS")
        try:
            noise = PhotonNoise(photons_per_shot=float(parts[0]), shots=int(parts[1]))
        except ValueError:
            raise _fail(f"--noise {p['noise']!r} is not PHOTONS_PER_SHOT:SHOTS")

    meta = {"c0": params.c0, "t1": params.t1, "beta": params.beta}
    curve = synthesize_curve(params, schedule, noise=noise, seed=p["seed"], meta=meta)
    out = _resolve_out(p["out"])
    io.write_decay_csv(out, curve)
    _write_run_config(ctx, out)
    click.echo(f"wrote {len(curve)} points to {out}")


@cli.command("fit-curve")
@_config_option
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Decay-curve CSV.")
@click.option("--fixed-beta", type=float, default=None,
              help="Fit with the stretching exponent pinned to this value.")
@click.option("--report", is_flag=True, default=False,
              help="Add a model-comparison block for fixed beta in {0.5, 1}.")
@click.option("--max-iter", type=int, default=500, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Output JSON path.")
@click.pass_context
@_surface_errors
def cmd_fit_curve(ctx, **_kwargs):
    """Fit a stretched exponential to a measured decay curve."""
    _merge_config(ctx)
    p = ctx.params
    curve = io.read_decay_csv(p["in_path"])
    result = fit_stretched_exp(curve, fixed_beta=p["fixed_beta"], max_iter=p["max_iter"])

    fitted = StretchedExpParams(c0=result.params["c0"], t1=result.params["t1"],
                                beta=result.params["beta"])
    payload = {"fit": result.to_dict(),
               "model": io.stretched_exp_params_to_dict(fitted)}
    if p["report"]:
        alternates = [fit_stretched_exp(curve, fixed_beta=b, max_iter=p["max_iter"])
                      for b in (0.5, 1.0)]
        payload["comparison"] = compare_models([result, *alternates])

    out = _resolve_out(p["out"])
    io.write_json(out, payload)

    from .decay import contrast_model
    model = contrast_model(fitted, curve.delays)
    residual = curve.contrast - model
    stem = out[:-5] if out.endswith(".json") else out
    residual_path = stem + ".residuals.csv"
    io._write_table(residual_path, {}, "delay_us,contrast,model,residual,weighted_residual",
                    (curve.delays, curve.contrast, model, residual, residual / curve.sigma))
    _write_run_config(ctx, out)
    status = "converged" if result.converged else f"did not converge: {result.message}"
    click.echo(f"fit {status}; chi2_reduced={result.chi2_reduced:.6g}; wrote {out}")


@cli.command("fit-surface")
@_config_option
@_spin_options
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Rate-surface CSV (T_K,H_T,gamma_per_ms,sigma_per_ms).")
@click.option("--model-config", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Surface model configuration JSON.")
@click.option("--include-lac", is_flag=True, default=False,
              help="Fit points inside the exclusion windows too.")
@click.option("--lac-window", nargs=2, type=float, default=DEFAULT_LAC_WINDOW,
              show_default=True, help="Exclusion window bounds (T).")
@click.option("--max-iter", type=int, default=500, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Output JSON path.")
@click.pass_context
@_surface_errors
def cmd_fit_surface(ctx, **_kwargs):
    """Globally fit the multi-channel rate model to a measured surface."""
    _merge_config(ctx)
    p = ctx.params
    spin = SpinSystemParams(D=p["D"], E=p["E"], g=p["g"])
    config = SurfaceModelConfig()
    if p["model_config"]:
        config = SurfaceModelConfig.from_dict(io.read_json(p["model_config"]))
    windows = exclusion_windows(tuple(p["lac_window"]))

    surface = io.read_surface_csv(p["in_path"])
    if not p["include_lac"]:
        surface = surface.masked_by_windows(windows)
    result = fit_rate_surface(surface, model_config=config, spin=spin,
                              max_iter=p["max_iter"])

    cross = None
    if config.with_cross_relax:
        cross = CrossRelaxParams(amplitude=result.params["cross_amp"],
                                 half_width=result.params["cross_half_width"])
    fitted = RelaxationParams(a1=result.params["a1"], n1=result.params["n1"],
                              a2=result.params["a2"], n2=result.params["n2"],
                              eta=result.params["eta"], tau_c=result.params["tau_c"],
                              cross_relax=cross)
    out = _resolve_out(p["out"])
    io.write_json(out, {"fit": result.to_dict(),
                        "model": io.relaxation_params_to_dict(fitted)})

    # Channel decomposition over the full grid, masked points included.
    model = SurfaceRateModel(spin=spin, transition=config.transition,
                             with_cross_relax=config.with_cross_relax)
    points = SurfacePoints(spin, surface.temperature, surface.field, config.transition)
    parts = model.components(result.params, points)
    stem = out[:-5] if out.endswith(".json") else out
    decomp_path = stem + ".decomposition.csv"
    io._write_table(decomp_path, {}, DECOMP_HEADER,
                    (surface.temperature, surface.field, surface.gamma,
                     parts["direct"], parts["raman"], parts["spin_spin"],
                     parts["cross_relax"], parts["total"],
                     surface.mask.astype(int)))
    _write_run_config(ctx, out)
    status = "converged" if result.converged else f"did not converge: {result.message}"
    click.echo(f"fit {status}; chi2_reduced={result.chi2_reduced:.6g}; wrote {out}")


@cli.command("bath-sim")
@_config_option
@click.option("--dim", type=click.IntRange(2, 3), default=3, show_default=True,
              help="Bath dimensionality.")
@click.option("--alpha", type=float, default=3.0, show_default=True,
              help="Coupling exponent: rate contribution falls as r^-2alpha.")
@click.option("--density", type=float, default=1.0, show_default=True,
              help="Bath spin density (spins per unit area or volume).")
@click.option("--n-bath", type=int, default=1000, show_default=True,
              help="Bath spins per realization.")
@click.option("--n-real", type=int, default=1000, show_default=True,
              help="Disorder realizations.")
@click.option("--coupling", type=float, default=1.0, show_default=True,
              help="Single-spin rate prefactor.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=None,
              help="Worker threads for realization sampling [default: all cores].")
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Output survival-curve CSV path.")
@click.pass_context
@_surface_errors
def cmd_bath_sim(ctx, **_kwargs):
    """Monte Carlo survival of a probe in a dilute bath, with a beta estimate."""
    _merge_config(ctx)
    p = ctx.params
    config = BathConfig(dimension=p["dim"], alpha=p["alpha"], density=p["density"],
                        n_bath=p["n_bath"], n_realizations=p["n_real"],
                        coupling_prefactor=p["coupling"], seed=p["seed"])
    threads = p["threads"] if p["threads"] else max(1, os.cpu_count() or 1)
    curve = survival_curve(config, threads=threads)
    estimate = estimate_beta(curve)

    out = _resolve_out(p["out"])
    meta = {"dimension": config.dimension, "alpha": config.alpha,
            "density": config.density, "n_bath": config.n_bath,
            "n_realizations": config.n_realizations, "seed": config.seed}
    io.write_survival_csv(out, curve, meta=meta)
    stem = out[:-4] if out.endswith(".csv") else out
    io.write_json(stem + ".beta.json",
                  {"beta": estimate.beta, "stderr": estimate.stderr,
                   "char_time": estimate.char_time, "n_points": estimate.n_points,
                   "predicted_beta": config.dimension / (2.0 * config.alpha)})
    _write_run_config(ctx, out)
    click.echo(f"beta = {estimate.beta:.4f} +/- {estimate.stderr:.4f} "
               f"(d/2alpha = {config.dimension / (2 * config.alpha):.4f}); wrote {out}")


def main():
    cli(prog_name="spinrelax")


if __name__ == "__main__":
    main()
