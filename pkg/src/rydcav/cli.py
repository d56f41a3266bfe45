"""Scenario runner: config ingestion, named presets, CSV/text emission.

Config files are flat `key = value` lines with dotted sections (regime.f,
integrator.rel_tol, ...); `#` starts a comment.  Precedence: built-in
defaults < preset < config file < command-line flags.  Unknown keys are
rejected.

Exit codes: 0 ok, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import cavity, device, effective, protocols
from .cavity import RegimeRecipe
from .presets import PRESETS
from .qops import IntegratorOpts, IntegrationError
from .timeseries import (
    PairTrajectory,
    max_abs_difference,
    moving_average,
    value_at,
    windowed_mean,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

OUTDIR_ENV = "RYDCAV_OUTDIR"

CSV_SCHEMA_VERSION = "1"


class ConfigError(ValueError):
    pass


def _to_bool(s: str) -> bool:
    if str(s).lower() in ("1", "true", "yes", "on"):
        return True
    if str(s).lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


# key -> converter; the single flat namespace shared by presets/files/flags
KEYS = {
    "regime.kind": str,
    "regime.f": float,
    "decay.kappa": float,
    "decay.gamma_r": float,
    "decay.gamma_a": float,
    "decay.gamma_b": float,
    "integrator.method": str,
    "integrator.rel_tol": float,
    "integrator.abs_tol": float,
    "integrator.dt": float,
    "integrator.sample_stride": int,
    "integrator.n_samples": int,
    "integrator.t_max": float,
    "output.path": str,
    "output.format": str,
    "model": str,
    "device.enabled": _to_bool,
    "device.L": float,
    "device.d": float,
    "device.eps_r": float,
    "device.m": int,
    "device.Q": float,
    "device.n_principal": int,
    "device.Gamma_r": float,
    "device.Gamma_r_convention": str,
    "device.g_r_nominal": float,
    "device.g_r_override": float,
    "ensemble.N": float,
    "ensemble.rho0": float,
    "ensemble.L_a": float,
    "ensemble.sigma0": float,
    "ensemble.gamma_ge": float,
    "ensemble.V_a": float,
    "drive.omega_d": float,
    "drive.omega_gr": float,
    "drive.omega_sr": float,
    "eit.w": float,
    "sweep.f_list": str,
}

DEFAULTS = {
    "regime.kind": "vdw",
    "regime.f": 10.0,
    "decay.kappa": 0.0,
    "decay.gamma_r": 0.0,
    "decay.gamma_a": 0.0,
    "decay.gamma_b": 0.0,
    "integrator.method": "rk45",
    "integrator.rel_tol": 1e-8,
    "integrator.abs_tol": 1e-10,
    "integrator.sample_stride": 1,
    "integrator.n_samples": 401,
    "output.format": "csv",
    "model": "full",
    "device.enabled": False,
}


def parse_config_file(path: str) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def merge_config(preset: str | None, file_values: dict, flag_values: dict) -> dict:
    cfg = dict(DEFAULTS)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"unknown preset {preset!r}; available: {', '.join(sorted(PRESETS))}"
            )
        cfg.update(PRESETS[preset])
    for source_name, source in (("config file", file_values), ("flag", flag_values)):
        for key, val in source.items():
            if key not in KEYS:
                raise ConfigError(f"unknown {source_name} key {key!r}")
            conv = KEYS[key]
            try:
                cfg[key] = conv(val) if isinstance(val, str) else val
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {val!r} ({exc})") from exc
    return cfg


def _recipe(cfg: dict) -> RegimeRecipe:
    try:
        return RegimeRecipe(kind=cfg["regime.kind"], f=cfg["regime.f"])
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad regime: {exc}") from exc


def _integrator_opts(cfg: dict, default_t_max: float | None = None) -> IntegratorOpts:
    t_max = cfg.get("integrator.t_max", default_t_max)
    if t_max is None:
        raise ConfigError("integrator.t_max is required (or use a preset)")
    kwargs = dict(
        t_max=t_max,
        method=cfg["integrator.method"],
        rel_tol=cfg["integrator.rel_tol"],
        abs_tol=cfg["integrator.abs_tol"],
        n_samples=cfg["integrator.n_samples"],
        sample_stride=cfg["integrator.sample_stride"],
    )
    if "integrator.dt" in cfg:
        kwargs["dt"] = cfg["integrator.dt"]
    try:
        return IntegratorOpts(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"bad integrator options: {exc}") from exc


def _decays(cfg: dict) -> tuple[float, tuple[float, float, float]]:
    return cfg["decay.kappa"], (
        cfg["decay.gamma_r"], cfg["decay.gamma_a"], cfg["decay.gamma_b"],
    )


def _device(cfg: dict) -> device.DeviceParams | None:
    if not cfg.get("device.enabled"):
        return None
    kwargs = {}
    for key, attr in (
        ("device.L", "L"), ("device.d", "d"), ("device.eps_r", "eps_r"),
        ("device.m", "m"), ("device.Q", "Q"),
        ("device.n_principal", "n_principal"), ("device.Gamma_r", "Gamma_r"),
        ("device.Gamma_r_convention", "Gamma_r_convention"),
        ("device.g_r_nominal", "g_r_nominal"), ("device.g_r_override", "g_r_override"),
    ):
        if key in cfg:
            kwargs[attr] = cfg[key]
    try:
        return device.DeviceParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"bad device parameters: {exc}") from exc


def _ensemble(cfg: dict) -> protocols.EnsembleParams:
    kwargs = {}
    for key, attr in (
        ("ensemble.N", "N"), ("ensemble.rho0", "rho0"), ("ensemble.L_a", "L_a"),
        ("ensemble.sigma0", "sigma0"), ("ensemble.gamma_ge", "gamma_ge"),
        ("ensemble.V_a", "V_a"),
    ):
        if key in cfg:
            kwargs[attr] = cfg[key]
    try:
        return protocols.EnsembleParams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"bad ensemble parameters: {exc}") from exc


# ---------------------------------------------------------------------------
# output helpers

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def resolve_output_path(cfg: dict, default_name: str) -> str | None:
    path = cfg.get("output.path")
    if path == "-":
        return None  # stdout
    outdir = os.environ.get(OUTDIR_ENV, "")
    if path is None:
        path = default_name
    if not os.path.isabs(path) and outdir:
        path = os.path.join(outdir, path)
    return path


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="\n"), True


def write_csv(path: str | None, header: list[str], rows) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    finally:
        if close:
            fh.close()


def write_report(path: str | None, pairs: list[tuple[str, object]], fmt: str) -> None:
    fh, close = _open_out(path)
    try:
        if fmt == "csv":
            fh.write("key,value\n")
            for key, val in pairs:
                fh.write(f"{key},{_fmt(val)}\n")
        else:
            for key, val in pairs:
                fh.write(f"{key} = {_fmt(val)}\n")
    finally:
        if close:
            fh.close()


def trajectory_rows(traj: PairTrajectory):
    header = list(traj.column_names())
    return header, traj.rows()


# ---------------------------------------------------------------------------
# subcommand implementations

def _run_trajectory(cfg: dict) -> PairTrajectory:
    recipe = _recipe(cfg)
    kappa, gammas = _decays(cfg)
    opts = _integrator_opts(cfg)
    if cfg["model"] == "full":
        traj = cavity.run_figure2(recipe, kappa, gammas, opts)
    elif cfg["model"] == "effective":
        traj = cavity.run_reduced(recipe, kappa, gammas, opts=opts)
    else:
        raise ConfigError(f"model must be 'full' or 'effective', got {cfg['model']!r}")
    dev = _device(cfg)
    if dev is not None:
        traj.t_seconds = traj.t / device.derive(dev).g_r
    return traj


def cmd_simulate(cfg: dict, preset_name: str | None) -> int:
    traj = _run_trajectory(cfg)
    name = f"simulate-{cfg['model']}-{preset_name or 'custom'}.csv"
    header, rows = trajectory_rows(traj)
    write_csv(resolve_output_path(cfg, name), header, rows)
    return EXIT_OK


def cmd_params(cfg: dict, preset_name: str | None) -> int:
    dev = _device(cfg) or device.DeviceParams()
    der = device.derive(dev)
    ens = _ensemble(cfg)
    f = cfg["regime.f"]
    d_cavity = der.g_r / f
    pairs = [
        ("csv_schema_version", CSV_SCHEMA_VERSION),
        ("L_m", dev.L),
        ("d_m", dev.d),
        ("eps_r", dev.eps_r),
        ("mode_index", dev.m),
        ("Q", dev.Q),
        ("n_principal", dev.n_principal),
        ("lambda_c_m", der.lambda_c),
        ("omega_c_rad_s", der.omega_c),
        ("omega_c_over_2pi_GHz", der.omega_c / device.TWO_PI / 1e9),
        ("V_c_m3", der.V_c),
        ("eps_c_V_m", der.eps_c),
        ("dipole_Cm", der.dipole),
        ("g_r_rad_s", der.g_r),
        ("g_r_over_2pi_MHz", der.g_r / device.TWO_PI / 1e6),
        ("g_r_estimate_rad_s", der.g_r_estimate),
        ("g_r_estimate_over_2pi_MHz", der.g_r_estimate / device.TWO_PI / 1e6),
        ("kappa_rad_s", der.kappa),
        ("kappa_over_2pi_kHz", der.kappa / device.TWO_PI / 1e3),
        ("Gamma_r_input", dev.Gamma_r),
        ("Gamma_r_convention", dev.Gamma_r_convention),
        ("Gamma_r_ordinary_per_s", device.rate_in_si(dev.Gamma_r, "ordinary")),
        ("Gamma_r_angular_per_s", device.rate_in_si(dev.Gamma_r, "angular")),
        ("f_max", der.f_max),
        ("f", f),
        ("exchange_rate_rad_s", d_cavity),
        ("pair_shift_rad_s", 4 * der.g_r / f**3),
        ("direct_ddi_crossover_m", device.ddi_crossover(der.dipole, d_cavity)),
        ("optical_depth", protocols.optical_depth(ens)),
        ("ensemble_N", ens.N),
        ("ensemble_rho0_m3", ens.rho0),
        ("ensemble_L_a_m", ens.L_a),
        ("ensemble_gamma_ge_per_s", ens.gamma_ge),
    ]
    ext = "csv" if cfg["output.format"] == "csv" else "txt"
    name = f"params-{preset_name or 'custom'}.{ext}"
    write_report(resolve_output_path(cfg, name), pairs, cfg["output.format"])
    return EXIT_OK


def _blockade_inputs(cfg: dict):
    dev = _device(cfg) or device.DeviceParams()
    der = device.derive(dev)
    f = cfg["regime.f"]
    d_cavity = der.g_r / f
    gamma_total = der.Gamma_r + der.kappa / f**2
    n_atoms = cfg.get("ensemble.N", 1e6)
    return der, f, d_cavity, gamma_total, n_atoms


def cmd_blockade(cfg: dict, preset_name: str | None) -> int:
    der, f, d_cavity, gamma_total, n_atoms = _blockade_inputs(cfg)
    omega_opt, err_min = protocols.optimal_omega(n_atoms, d_cavity, gamma_total)
    omega = cfg.get("drive.omega_gr", omega_opt)
    kwargs = {}
    if "drive.omega_sr" in cfg:
        kwargs["omega_sr"] = cfg["drive.omega_sr"]
    budget = protocols.blockade_budget(n_atoms, omega, d_cavity, gamma_total, **kwargs)
    pairs = _budget_pairs(budget, d_cavity, gamma_total, omega_opt, err_min)
    write_report(
        resolve_output_path(cfg, f"blockade-{preset_name or 'custom'}.txt"),
        pairs, cfg["output.format"],
    )
    return EXIT_OK


def cmd_entangle(cfg: dict, preset_name: str | None) -> int:
    der, f, d_cavity, gamma_total, n_atoms = _blockade_inputs(cfg)
    omega_opt, err_min = protocols.optimal_omega(2 * n_atoms, d_cavity, gamma_total)
    omega = cfg.get("drive.omega_gr", omega_opt)
    kwargs = {}
    if "drive.omega_sr" in cfg:
        kwargs["omega_sr"] = cfg["drive.omega_sr"]
    budget = protocols.two_ensemble_entanglement(
        n_atoms, omega, d_cavity, gamma_total, **kwargs
    )
    pairs = _budget_pairs(budget, d_cavity, gamma_total, omega_opt, err_min)
    write_report(
        resolve_output_path(cfg, f"entangle-{preset_name or 'custom'}.txt"),
        pairs, cfg["output.format"],
    )
    return EXIT_OK


def _budget_pairs(budget, d_cavity, gamma_total, omega_opt, err_min):
    return [
        ("exchange_rate_rad_s", d_cavity),
        ("gamma_total_per_s", gamma_total),
        ("omega_gr_rad_s", budget.omega_gr),
        ("omega_gr_over_2pi_Hz", budget.omega_gr / device.TWO_PI),
        ("omega_opt_rad_s", omega_opt),
        ("omega_opt_over_2pi_Hz", omega_opt / device.TWO_PI),
        ("min_total_error", err_min),
        ("T1_s", budget.T1),
        ("T2_s", budget.T2),
        ("total_time_s", budget.total_time),
        ("p_double", budget.p_double),
        ("p_decay", budget.p_decay),
        ("fidelity", budget.fidelity),
        ("blockade_ok", budget.blockade_ok),
    ]


def cmd_gate_fidelity(cfg: dict, preset_name: str | None, simulate: bool) -> int:
    recipe = _recipe(cfg)
    if recipe.kind != "vdw":
        raise ConfigError("gate-fidelity requires regime.kind = vdw")
    kappa, gammas = _decays(cfg)
    dev = _device(cfg)
    scale = device.derive(dev).g_r if dev is not None else None
    opts = None
    if "integrator.t_max" in cfg:
        opts = _integrator_opts(cfg)
    report = protocols.ensemble_cphase(
        recipe, kappa, gammas, simulate=simulate, opts=opts, g_r_scale=scale
    )
    pairs = [
        ("t_pi", report.t_pi),
        ("pair_shift", report.w),
        ("survival_analytic", report.survival_analytic),
        ("phase_analytic_rad", report.phase_analytic),
        ("fidelity_analytic", report.fidelity(simulated=False)),
    ]
    if report.t_pi_seconds is not None:
        pairs.append(("t_pi_seconds", report.t_pi_seconds))
    if simulate:
        pairs += [
            ("survival_simulated", report.survival_simulated),
            ("survival_instantaneous", report.survival_instantaneous),
            ("phase_simulated_rad", report.phase_simulated),
            ("phase_error_rad", abs(report.phase_simulated - math.pi)),
            ("fidelity_simulated", report.fidelity(simulated=True)),
        ]
    write_report(
        resolve_output_path(cfg, f"gate-fidelity-{preset_name or 'custom'}.txt"),
        pairs, cfg["output.format"],
    )
    return EXIT_OK


def cmd_eit_phase(cfg: dict, preset_name: str | None) -> int:
    ens = _ensemble(cfg)
    omega_d = cfg.get("drive.omega_d", device.TWO_PI * 1.1e6)
    w = cfg.get("eit.w")
    if w is None:
        dev = _device(cfg) or device.DeviceParams()
        w = 4 * device.derive(dev).g_r / cfg["regime.f"] ** 3
    pol = protocols.polariton(ens, omega_d)
    phi = protocols.photonic_cphase(ens, pol, w)
    pairs = [
        ("pair_shift_rad_s", w),
        ("omega_d_rad_s", omega_d),
        ("omega_d_over_2pi_MHz", omega_d / device.TWO_PI / 1e6),
        ("theta_rad", pol.theta),
        ("sin2_theta", math.sin(pol.theta) ** 2),
        ("compression", pol.compression),
        ("v_g_mixing_m_s", pol.v_g),
        ("v_g_density_m_s", pol.v_g_density),
        ("g_ge_rad_s", pol.g_ge),
        ("optical_depth", protocols.optical_depth(ens)),
        ("interaction_time_s", ens.L_a / pol.v_g_density),
        ("phi_rad", phi),
        ("phi_over_pi", phi / math.pi),
        ("omega_d_for_pi_rad_s", protocols.omega_d_for_phase(ens, w)),
    ]
    write_report(
        resolve_output_path(cfg, f"eit-phase-{preset_name or 'custom'}.txt"),
        pairs, cfg["output.format"],
    )
    return EXIT_OK


SWEEP_HEADER = [
    "f", "kind", "rate", "t_ref", "p_rr_ref", "phi_err_rad",
    "max_dev_full_vs_eff", "max_dev_raw", "status",
]


def sweep_row(kind: str, f: float, cfg: dict) -> list:
    recipe = RegimeRecipe(kind=kind, f=f)
    kappa, gammas = _decays(cfg)
    preset_like = dict(cfg)
    if kind == "vdw":
        t_ref = recipe.t_pi
        t_max = t_ref
    else:
        t_ref = recipe.oscillation_period
        t_max = 2 * t_ref
    preset_like["integrator.t_max"] = t_max
    opts = _integrator_opts(preset_like)
    full = cavity.run_figure2(recipe, kappa, gammas, opts)
    reduced = cavity.run_reduced(recipe, kappa, gammas, t=full.t)
    beat = 2 * math.pi / recipe.f  # dressing beat period ~ 2pi/Delta_b
    smooth_full = moving_average(full.t, full.p_rr, 6 * beat)
    smooth_red = moving_average(full.t, reduced.p_rr, 6 * beat)
    mask = full.t <= t_ref
    dev_smooth = max_abs_difference(smooth_full, smooth_red, mask)
    dev_raw = max_abs_difference(full.p_rr, reduced.p_rr, mask)
    # keep the averaging window well below the slow timescale
    width = min(cavity.SURVIVAL_WINDOW, 0.02 * t_ref)
    p_ref = windowed_mean(full.t, full.p_rr, t_ref, width)
    phi_target = math.pi if kind == "vdw" else 0.0
    phi_err = abs(value_at(full.t, full.phi_rr, t_ref) - phi_target)
    return [f, kind, recipe.nominal_rate, t_ref, p_ref, phi_err, dev_smooth, dev_raw, "ok"]


def cmd_sweep(cfg: dict, preset_name: str | None) -> int:
    f_list_raw = cfg.get("sweep.f_list")
    if not f_list_raw:
        raise ConfigError("sweep requires sweep.f_list (comma-separated)")
    try:
        fs = [float(x) for x in str(f_list_raw).split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad sweep.f_list: {f_list_raw!r}") from exc
    if not fs:
        raise ConfigError("sweep.f_list is empty")
    kind = cfg["regime.kind"]
    rows = []
    for f in fs:
        try:
            rows.append(sweep_row(kind, f, cfg))
        except Exception as exc:  # row failure must not abort the sweep
            rows.append([f, kind, "", "", "", "", "", "", f"failed: {exc}"])
    write_csv(
        resolve_output_path(cfg, f"sweep-{preset_name or 'custom'}.csv"),
        SWEEP_HEADER, rows,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydcav",
        description="Cavity-mediated Rydberg interaction scenarios: exact and "
        "reduced dynamics, device numbers, protocol budgets.",
    )
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--preset", help=f"named preset ({', '.join(sorted(PRESETS))})")
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--output", "-o", dest="output.path",
                       help="output path ('-' for stdout); relative paths go "
                            f"under ${OUTDIR_ENV} when set")
        p.add_argument("--format", dest="output.format", choices=("csv", "text"),
                       help="output format")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")

    def regime_flags(p):
        p.add_argument("--kind", dest="regime.kind", choices=("ddi", "vdw"))
        p.add_argument("--f", dest="regime.f", type=float)
        p.add_argument("--kappa", dest="decay.kappa", type=float)
        p.add_argument("--gamma-r", dest="decay.gamma_r", type=float)
        p.add_argument("--rel-tol", dest="integrator.rel_tol", type=float)
        p.add_argument("--abs-tol", dest="integrator.abs_tol", type=float)
        p.add_argument("--t-max", dest="integrator.t_max", type=float)
        p.add_argument("--n-samples", dest="integrator.n_samples", type=int)
        p.add_argument("--method", dest="integrator.method", choices=("rk45", "rk4"))
        p.add_argument("--dt", dest="integrator.dt", type=float)

    p_sim = sub.add_parser("simulate", help="run the exact or reduced dynamics")
    common(p_sim)
    regime_flags(p_sim)
    p_sim.add_argument("--model", dest="model", choices=("full", "effective"))

    p_params = sub.add_parser("params", help="device/ensemble parameter report")
    common(p_params)
    p_params.add_argument("--f", dest="regime.f", type=float)

    for name in ("blockade", "entangle"):
        p = sub.add_parser(name, help=f"{name} protocol budget")
        common(p)
        p.add_argument("--f", dest="regime.f", type=float)
        p.add_argument("--n-atoms", dest="ensemble.N", type=float)
        p.add_argument("--omega-gr", dest="drive.omega_gr", type=float)
        p.add_argument("--omega-sr", dest="drive.omega_sr", type=float)

    p_gate = sub.add_parser("gate-fidelity", help="ensemble CPHASE budget")
    common(p_gate)
    regime_flags(p_gate)
    p_gate.add_argument("--simulate", action="store_true",
                        help="run the exact model for the doubly-occupied branch")

    p_eit = sub.add_parser("eit-phase", help="photonic CPHASE via slow light")
    common(p_eit)
    p_eit.add_argument("--f", dest="regime.f", type=float)
    p_eit.add_argument("--omega-d", dest="drive.omega_d", type=float)
    p_eit.add_argument("--w", dest="eit.w", type=float,
                       help="pair shift in rad/s (default: from the device numbers)")

    p_sweep = sub.add_parser("sweep", help="tabulate full-vs-reduced over f values")
    common(p_sweep)
    regime_flags(p_sweep)
    p_sweep.add_argument("--f-list", dest="sweep.f_list",
                         help="comma-separated f values")

    return parser


def _flag_values(args: argparse.Namespace) -> dict:
    skip = {"command", "preset", "config", "simulate"}
    values = {}
    for key, val in vars(args).items():
        if key in skip or val is None:
            continue
        if key == "set":
            for item in val:
                if "=" not in item:
                    raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
                k, _, v = item.partition("=")
                values[k.strip()] = v.strip()
            continue
        values[key] = val
    return values


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        cfg = merge_config(args.preset, file_values, _flag_values(args))
        if args.command == "simulate":
            return cmd_simulate(cfg, args.preset)
        if args.command == "params":
            return cmd_params(cfg, args.preset)
        if args.command == "blockade":
            return cmd_blockade(cfg, args.preset)
        if args.command == "entangle":
            return cmd_entangle(cfg, args.preset)
        if args.command == "gate-fidelity":
            return cmd_gate_fidelity(cfg, args.preset, args.simulate)
        if args.command == "eit-phase":
            return cmd_eit_phase(cfg, args.preset)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.preset)
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, protocols.UnsupportedConfigurationError, effective.ResonanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
