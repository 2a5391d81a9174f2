"""Command-line interface.

Subcommands: circuit-map, meanfield, spectrum, response, occupation,
fit-zeta, phase-diagram, disorder, dump-hnh, plot. Physical runs are
configured by a preset (--preset) and/or a configuration file
(--config); frequencies in emitted datasets are in units of the
effective hopping J, with the absolute scale recorded in the JSON meta
block. Every subcommand exits nonzero on any error and zero only after
all requested outputs were written.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .circuit import derive_effective_circuit
from .config import RunConfig, load_config
from .constants import PLANCK, TWO_PI
from .dataio import config_hash, emit_dataset, fmt_value
from .errors import TopampError
from .lattice import build_hnh, hnh_to_rows, stability
from .meanfield import EffectiveParams, solve_operating_point
from .presets import PRESET_NAMES, get_preset
from .response import (SignalSpec, bandwidth_20db, max_occupation,
                       response_spectrum)
from .sweep import (DisorderConfig, disorder_sweep, resolve_workers,
                    run_phase_diagram)
from .topology import (classify_point, localization_length,
                       singular_values_grid)


class _Run:
    """Resolved execution context shared by the physics subcommands."""

    def __init__(self, params: EffectiveParams, J_abs: float, label: str,
                 signal_flux_over_J: float, omega_s_over_J: float,
                 input_site: int, grid_over_J: np.ndarray, seed: int,
                 circuit=None, workers=None):
        self.params = params              # normalized to J = 1
        self.J_abs = J_abs                # rad/s, for unit conversion
        self.label = label
        self.signal_flux_over_J = signal_flux_over_J
        self.omega_s_over_J = omega_s_over_J
        self.input_site = input_site
        self.grid_over_J = grid_over_J
        self.seed = seed
        self.circuit = circuit
        self.workers = workers

    @property
    def meta(self) -> dict:
        return {
            "label": self.label,
            "J_over_2pi_MHz": self.J_abs / TWO_PI / 1e6,
            "N": self.params.N,
            "kappa_over_J": self.params.kappa,
            "gc_over_J": self.params.g_c,
            "gs_over_J": self.params.g_s,
            "omega_s_over_J": self.omega_s_over_J,
            "seed": self.seed,
        }


def _resolve(args) -> _Run:
    cfg: RunConfig | None = None
    if args.config:
        cfg = load_config(args.config)

    preset_name = args.preset or (cfg.preset if cfg else None)
    circuit = cfg.circuit if cfg else None

    if preset_name:
        preset = get_preset(preset_name)
        params_abs = preset.effective
        J_abs = params_abs.J
        flux = abs(preset.signal.alpha_s) ** 2
        label = preset.name
        circuit = circuit or preset.circuit
    elif circuit is not None:
        ec = derive_effective_circuit(circuit)
        _, params_abs = solve_operating_point(ec, circuit.N)
        J_abs = params_abs.J
        flux = 0.0
        label = "circuit"
    else:
        raise TopampError("no preset or circuit given; pass --preset or --config")

    run_opts = cfg.run if cfg else None
    if run_opts and run_opts.N is not None:
        params_abs = params_abs.with_sites(run_opts.N)
    if cfg and cfg.signal_flux is not None:
        flux = cfg.signal_flux

    omega_s_over_J = run_opts.omega_s_over_J if run_opts else -0.5
    grid = np.linspace(run_opts.omega_min_over_J if run_opts else -3.0,
                       run_opts.omega_max_over_J if run_opts else 3.0,
                       run_opts.omega_points if run_opts else 301)
    seed = args.seed if args.seed is not None else (run_opts.seed if run_opts else 1234)
    workers = args.workers if args.workers is not None else (
        run_opts.workers if run_opts else None)

    normalized = EffectiveParams(
        N=params_abs.N, delta=params_abs.delta / J_abs, J=1.0, phi=params_abs.phi,
        kappa=params_abs.kappa / J_abs, g_s=params_abs.g_s / J_abs,
        g_c=params_abs.g_c / J_abs)
    input_site = cfg.input_site if cfg else 1
    return _Run(normalized, J_abs, label, flux / J_abs, omega_s_over_J,
                input_site, grid, seed, circuit=circuit, workers=workers)


def _out_base(args, stem: str) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / stem


def _print_table(pairs: list[tuple[str, str]]) -> None:
    width = max(len(k) for k, _ in pairs)
    for key, val in pairs:
        print(f"  {key:<{width}}  {val}")


def _cmd_circuit_map(args) -> int:
    run = _resolve(args)
    if run.circuit is None:
        raise TopampError("circuit-map needs a preset or a [circuit] section")
    ec = derive_effective_circuit(run.circuit)
    out = {
        "omega_a_over_2pi_GHz": ec.omega_a / TWO_PI / 1e9,
        "omega_b_over_2pi_GHz": ec.omega_b / TWO_PI / 1e9,
        "J_a_over_2pi_MHz": ec.J_a / TWO_PI / 1e6,
        "J_b_over_2pi_MHz": ec.J_b / TWO_PI / 1e6,
        "J_ab_over_2pi_MHz": ec.J_ab / TWO_PI / 1e6,
        "K_s_over_2pi_kHz": ec.K_s / TWO_PI / 1e3,
        "K_c_over_2pi_kHz": ec.K_c / TWO_PI / 1e3,
        "kappa_over_2pi_MHz": ec.kappa / TWO_PI / 1e6,
        "Gamma_over_2pi_MHz": ec.Gamma / TWO_PI / 1e6,
        "kappa_nl_over_2pi_MHz": ec.kappa_nl / TWO_PI / 1e6,
        "E_C_over_h_MHz": ec.E_C / PLANCK / 1e6,
        "C_a_eq_fF": ec.C_a_eq / 1e-15,
        "C_b_eq_fF": ec.C_b_eq / 1e-15,
        "L_a_eq_pH": ec.L_a_eq / 1e-12,
        "Z_a_ohm": ec.Z_a,
        "Z_b_ohm": ec.Z_b,
        "Omega_a_over_2pi_GHz": ec.Omega_a / TWO_PI / 1e9,
        "phi_zpf_Wb": ec.phi_zpf,
        "impedance_matched_1e3": bool(abs(ec.Gamma - 2 * ec.J_b) <= 1e-3 * 2 * ec.J_b),
    }
    print(json.dumps(out, indent=2))
    _print_table([(k, fmt_value(v) if isinstance(v, float) else str(v))
                  for k, v in out.items()])
    return 0


def _cmd_meanfield(args) -> int:
    run = _resolve(args)
    if run.circuit is None:
        raise TopampError("meanfield needs a preset or a [circuit] section")
    ec = derive_effective_circuit(run.circuit)
    sol, params = solve_operating_point(ec, run.params.N)
    out = {
        "xi": sol.xi,
        "n": sol.n,
        "alpha_sq": sol.alpha_sq,
        "Delta_over_2pi_MHz": params.delta / TWO_PI / 1e6,
        "J_over_2pi_MHz": params.J / TWO_PI / 1e6,
        "g_s_over_2pi_MHz": params.g_s / TWO_PI / 1e6,
        "g_c_over_2pi_MHz": params.g_c / TWO_PI / 1e6,
    }
    print(json.dumps(out, indent=2))
    _print_table([(k, fmt_value(float(v))) for k, v in out.items()])
    return 0


def _cmd_spectrum(args) -> int:
    run = _resolve(args)
    h = build_hnh(run.params)
    S = singular_values_grid(h, run.grid_over_J)
    rows = [[float(w)] + [float(S[i, n]) for n in range(6)]
            for i, w in enumerate(run.grid_over_J)]
    schema = ["omega_over_J"] + [f"E_{n}" for n in range(6)]
    paths = emit_dataset(rows, schema, _out_base(args, f"spectrum_{run.label}"),
                         force=args.force, cfg_hash=config_hash(run.meta),
                         seed=run.seed, meta=run.meta)
    print("\n".join(str(p) for p in paths))
    return 0


def _cmd_response(args) -> int:
    run = _resolve(args)
    h = build_hnh(run.params)
    if not stability(h).stable:
        raise TopampError("parameter point is dynamically unstable")
    rows = [[r.omega_over_J, r.gain_N_db, r.rev_gain_N_db, r.n_add_N, r.asym_db]
            for r in response_spectrum(h, run.grid_over_J, m=run.input_site)]
    schema = ["omega_over_J", "gain_N_db", "rev_gain_N_db", "n_add_N", "asym_db"]
    meta = dict(run.meta)
    meta["bandwidth_20db_over_J"] = bandwidth_20db(h, run.grid_over_J, m=run.input_site)
    paths = emit_dataset(rows, schema, _out_base(args, f"response_{run.label}"),
                         force=args.force, cfg_hash=config_hash(meta),
                         seed=run.seed, meta=meta)
    print("\n".join(str(p) for p in paths))
    return 0


def _cmd_occupation(args) -> int:
    run = _resolve(args)
    h = build_hnh(run.params)
    if not stability(h).stable:
        raise TopampError("parameter point is dynamically unstable")
    signal = SignalSpec(alpha_s=math.sqrt(run.signal_flux_over_J),
                        omega_s=run.omega_s_over_J, input_site=run.input_site)
    rep = max_occupation(h, signal)
    rows = [[j + 1, float(rep.total[j]), float(rep.coherent[j]), float(rep.noise[j])]
            for j in range(run.params.N)]
    schema = ["site", "max_occ", "coherent_part", "noise_part"]
    paths = emit_dataset(rows, schema, _out_base(args, f"occupation_{run.label}"),
                         force=args.force, cfg_hash=config_hash(run.meta),
                         seed=run.seed, meta=run.meta)
    print("\n".join(str(p) for p in paths))
    return 0


def _cmd_fit_zeta(args) -> int:
    run = _resolve(args)
    h = build_hnh(run.params)
    report = classify_point(run.params, run.omega_s_over_J, h=h)
    fit = localization_length(h, run.omega_s_over_J)
    out = {
        "omega_over_J": run.omega_s_over_J,
        "classification": report.classification,
        "zeta_re": fit.zeta.real,
        "zeta_im": fit.zeta.imag,
        "r_squared": fit.r_squared,
        "fit_sites": list(fit.fit_sites),
    }
    print(json.dumps(out, indent=2))
    return 0


def _cmd_phase_diagram(args) -> int:
    run = _resolve(args)
    k_lo, k_hi = (float(t) for t in args.kappa_range.split(":"))
    g_lo, g_hi = (float(t) for t in args.gc_range.split(":"))
    kappas = np.linspace(k_lo, k_hi, args.resolution)
    gcs = np.linspace(g_lo, g_hi, args.resolution)
    base = run.params
    out_base = _out_base(args, f"phase_diagram_{run.label}")
    rows = run_phase_diagram(base, kappas, gcs, args.omega, out_base, force=args.force)
    print(f"{out_base.with_suffix('.csv')} ({len(rows)} cells)")
    return 0


def _cmd_disorder(args) -> int:
    run = _resolve(args)
    sigmas = tuple(float(t) for t in args.sigma_list.split(","))
    cfg = DisorderConfig(
        base=run.params, family=args.param, sigmas=sigmas,
        n_realizations=args.realizations, master_seed=run.seed,
        omega_s=args.omega_s if args.omega_s is not None else run.omega_s_over_J,
    )
    summaries = disorder_sweep(cfg, workers=resolve_workers(run.workers))
    ln10 = math.log(10.0)
    rows = []
    for s in summaries:
        err_db = 10.0 / ln10 * s.stderr_gain / s.mean_gain if s.mean_gain > 0 else math.nan
        err_rev_db = (10.0 / ln10 * s.stderr_rev_gain / s.mean_rev_gain
                      if s.mean_rev_gain > 0 else math.nan)
        rows.append([s.sigma, s.mean_gain_db, s.mean_rev_gain_db, s.mean_wtop,
                     s.mean_added_noise, s.p_unstable, err_db, err_rev_db,
                     s.stderr_wtop, s.stderr_added_noise,
                     s.mean_db_gain, s.mean_db_rev_gain])
    schema = ["sigma", "mean_gain_db", "mean_rev_db", "mean_wtop", "mean_nadd",
              "p_unstable", "stderr_gain_db", "stderr_rev_db", "stderr_wtop",
              "stderr_nadd", "mean_db_gain", "mean_db_rev"]
    meta = dict(run.meta)
    meta.update({"param": args.param, "realizations": args.realizations})
    paths = emit_dataset(rows, schema,
                         _out_base(args, f"disorder_{run.label}_{args.param}"),
                         force=args.force, cfg_hash=config_hash(meta),
                         seed=run.seed, meta=meta)
    print("\n".join(str(p) for p in paths))
    return 0


def _cmd_dump_hnh(args) -> int:
    run = _resolve(args)
    h = build_hnh(run.params)
    paths = emit_dataset(list(hnh_to_rows(h)), ["row", "col", "re", "im"],
                         _out_base(args, f"hnh_{run.label}"), force=args.force,
                         cfg_hash=config_hash(run.meta), seed=run.seed,
                         meta=run.meta)
    print("\n".join(str(p) for p in paths))
    return 0


def _cmd_plot(args) -> int:
    from .plotting import render_plot

    out = render_plot(args.data, args.kind, args.out)
    print(str(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topamp",
        description="Directional topological traveling-wave parametric amplifier toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="configuration file (sectioned key = value)")
    common.add_argument("--preset", choices=PRESET_NAMES + ("P1'",),
                        help="named operation point")
    common.add_argument("--seed", type=int, default=None, help="master seed")
    common.add_argument("--out-dir", default=".", help="output directory")
    common.add_argument("--force", action="store_true",
                        help="overwrite existing output files")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: TOPAMP_WORKERS or all cores)")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("circuit-map", parents=[common],
                   help="derived effective circuit quantities").set_defaults(fn=_cmd_circuit_map)
    sub.add_parser("meanfield", parents=[common],
                   help="pump mean field and effective lattice parameters").set_defaults(fn=_cmd_meanfield)
    sub.add_parser("spectrum", parents=[common],
                   help="singular-value spectrum E_0..E_5 vs omega").set_defaults(fn=_cmd_spectrum)
    sub.add_parser("response", parents=[common],
                   help="gain / reverse gain / noise spectra").set_defaults(fn=_cmd_response)
    sub.add_parser("occupation", parents=[common],
                   help="per-site maximum fluctuation occupation").set_defaults(fn=_cmd_occupation)
    sub.add_parser("fit-zeta", parents=[common],
                   help="inverse localization length fit").set_defaults(fn=_cmd_fit_zeta)

    pd = sub.add_parser("phase-diagram", parents=[common],
                        help="classification grid over (kappa/J, g_c/J)")
    pd.add_argument("--kappa-range", default="0.2:6.0")
    pd.add_argument("--gc-range", default="0.0:2.0")
    pd.add_argument("--resolution", type=int, default=31)
    pd.add_argument("--omega", type=float, default=-0.5, help="probe frequency in units of J")
    pd.set_defaults(fn=_cmd_phase_diagram)

    dis = sub.add_parser("disorder", parents=[common],
                         help="disorder Monte Carlo for one parameter family")
    dis.add_argument("--param", required=True,
                     choices=["delta", "kappa", "J", "gs", "gc", "phi"])
    dis.add_argument("--sigma-list", default="0.02,0.05,0.08")
    dis.add_argument("--realizations", type=int, default=500)
    dis.add_argument("--omega-s", type=float, default=None,
                     help="signal frequency in units of J (default -0.5)")
    dis.set_defaults(fn=_cmd_disorder)

    sub.add_parser("dump-hnh", parents=[common],
                   help="dense dynamical matrix as (row, col, re, im) CSV").set_defaults(fn=_cmd_dump_hnh)

    plot = sub.add_parser("plot", help="render an emitted dataset as SVG")
    plot.add_argument("--data", required=True, help="input dataset CSV")
    plot.add_argument("--kind", required=True, choices=["line", "heatmap"])
    plot.add_argument("--out", required=True, help="output SVG path")
    plot.set_defaults(fn=_cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except TopampError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileExistsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
