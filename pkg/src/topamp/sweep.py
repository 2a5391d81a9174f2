"""Deterministic parameter sweeps: disorder Monte Carlo and phase-diagram grids.

Work units (one disorder realization, one grid cell) are independent.
Per-realization seeds are derived up front from the master seed, results
land in pre-assigned slots, and aggregation runs in a fixed order, so a
sweep's output is bit-identical for a given master seed regardless of
the worker count.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .constants import db
from .dataio import config_hash, emit_dataset, fmt_value, read_csv
from .errors import AllUnstable, NoOnset, NonPositiveParameter
from .lattice import DisorderSigmas, build_hnh, sample_disorder, stability
from .meanfield import EffectiveParams
from .response import green, noise_density
from .topology import (TOPOLOGICAL, UNSTABLE, classify_point, default_omega_grid,
                       localization_length, topological_window)

_FAMILY_INDEX = {"delta": 0, "kappa": 1, "J": 2, "gs": 3, "gc": 4, "phi": 5}

WORKERS_ENV = "TOPAMP_WORKERS"


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else TOPAMP_WORKERS, else cpu count."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def realization_seed(master_seed: int, family: str, sigma_index: int, realization: int) -> int:
    """Stable 64-bit seed for one (family, sigma, realization) work unit."""
    ss = np.random.SeedSequence(
        entropy=master_seed,
        spawn_key=(_FAMILY_INDEX[family], sigma_index, realization),
    )
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True, eq=False)
class DisorderConfig:
    """Monte Carlo configuration for one disorder family."""

    base: EffectiveParams
    family: str
    sigmas: tuple[float, ...]
    n_realizations: int = 500
    master_seed: int = 2024
    omega_s: float | None = None         # defaults to -0.5 J
    omega_grid: np.ndarray | None = None  # for w_top; defaults to [-3J, 3J] x 301
    compute_wtop: bool = True

    def __post_init__(self):
        if self.family not in _FAMILY_INDEX:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n_realizations < 1:
            raise NonPositiveParameter("n_realizations must be >= 1")
        if any(s < 0 for s in self.sigmas):
            raise NonPositiveParameter("sigma values must be >= 0")


@dataclass(frozen=True)
class DisorderSummary:
    """Aggregates over the stable realizations at one sigma point.

    Gains are averaged in linear power; ``mean_gain_db`` is the dB of that
    linear mean, while ``mean_db_gain`` averages the per-realization dB
    values (both conventions are exported since either may be wanted).
    """

    sigma: float
    n_realizations: int
    n_stable: int
    p_unstable: float
    mean_gain: float
    mean_rev_gain: float
    mean_wtop: float
    mean_added_noise: float
    stderr_gain: float
    stderr_rev_gain: float
    stderr_wtop: float
    stderr_added_noise: float
    mean_db_gain: float
    mean_db_rev_gain: float
    records: np.ndarray | None = field(default=None, repr=False)

    @property
    def mean_gain_db(self) -> float:
        return db(self.mean_gain)

    @property
    def mean_rev_gain_db(self) -> float:
        return db(self.mean_rev_gain)


def _measure_realization(base: EffectiveParams, family: str, sigma: float,
                         seed: int, omega_s: float, omega_grid: np.ndarray | None,
                         compute_wtop: bool) -> tuple[float, float, float, float, bool]:
    """(gain, reverse gain, w_top, added noise, stable) for one draw."""
    d = sample_disorder(base, DisorderSigmas.single(family, sigma), seed)
    h = build_hnh(base, d)
    if not stability(h).stable:
        return (math.nan, math.nan, math.nan, math.nan, False)
    N = base.N
    k = h.kappa_site
    G = green(h, omega_s).matrix
    gain = float(k[0] * k[N - 1] * abs(G[N - 1, 0]) ** 2)
    rev = float(k[0] * k[N - 1] * abs(G[0, N - 1]) ** 2)
    n_N = float(noise_density(h, omega_s)[N - 1])
    nadd = n_N / gain if gain > 0 else math.inf
    if compute_wtop:
        report = topological_window(base, omega_grid, h=h)
        wtop = report.w_top / base.J
    else:
        wtop = math.nan
    return (gain, rev, wtop, nadd, True)


def _measure_chunk(args) -> list[tuple[float, float, float, float, bool]]:
    base, family, sigma, seeds, omega_s, omega_grid, compute_wtop = args
    return [_measure_realization(base, family, sigma, s, omega_s, omega_grid, compute_wtop)
            for s in seeds]


def _summarize(sigma: float, results: np.ndarray, n_total: int,
               keep_records: bool) -> DisorderSummary:
    stable_mask = results[:, 4].astype(bool)
    n_stable = int(stable_mask.sum())
    p_unstable = 1.0 - n_stable / n_total
    if n_stable == 0:
        raise AllUnstable(f"all {n_total} realizations unstable at sigma = {sigma}")
    stable = results[stable_mask]

    def mean_stderr(col: int) -> tuple[float, float]:
        vals = stable[:, col]
        mean = float(vals.mean())
        err = float(vals.std(ddof=1) / math.sqrt(n_stable)) if n_stable > 1 else 0.0
        return mean, err

    mg, eg = mean_stderr(0)
    mr, er = mean_stderr(1)
    mw, ew = mean_stderr(2)
    mn, en = mean_stderr(3)
    pos_gain = [db(v) for v in stable[:, 0] if v > 0]
    pos_rev = [db(v) for v in stable[:, 1] if v > 0]
    db_gain = float(np.mean(pos_gain)) if pos_gain else float("-inf")
    db_rev = float(np.mean(pos_rev)) if pos_rev else float("-inf")
    return DisorderSummary(
        sigma=sigma, n_realizations=n_total, n_stable=n_stable, p_unstable=p_unstable,
        mean_gain=mg, mean_rev_gain=mr, mean_wtop=mw, mean_added_noise=mn,
        stderr_gain=eg, stderr_rev_gain=er, stderr_wtop=ew, stderr_added_noise=en,
        mean_db_gain=db_gain, mean_db_rev_gain=db_rev,
        records=results if keep_records else None,
    )


def disorder_sweep(cfg: DisorderConfig, workers: int | None = None,
                   keep_records: bool = False) -> list[DisorderSummary]:
    """Monte Carlo over ``cfg.sigmas`` for one disorder family.

    Unstable realizations are excluded from every average and accounted
    for through ``p_unstable``; n_stable + n_unstable equals
    n_realizations exactly.
    """
    omega_s = cfg.omega_s if cfg.omega_s is not None else -0.5 * cfg.base.J
    omega_grid = cfg.omega_grid if cfg.omega_grid is not None else default_omega_grid(cfg.base.J)
    workers = resolve_workers(workers)

    summaries = []
    for s_idx, sigma in enumerate(cfg.sigmas):
        seeds = [realization_seed(cfg.master_seed, cfg.family, s_idx, r)
                 for r in range(cfg.n_realizations)]
        if workers == 1 or cfg.n_realizations < 8:
            rows = _measure_chunk((cfg.base, cfg.family, sigma, seeds,
                                   omega_s, omega_grid, cfg.compute_wtop))
        else:
            chunks = np.array_split(np.array(seeds, dtype=np.uint64), workers * 4)
            tasks = [(cfg.base, cfg.family, sigma, [int(s) for s in chunk],
                      omega_s, omega_grid, cfg.compute_wtop)
                     for chunk in chunks if len(chunk)]
            rows = []
            with ProcessPoolExecutor(max_workers=workers) as pool:
                for part in pool.map(_measure_chunk, tasks):
                    rows.extend(part)
        results = np.array(rows, dtype=float)
        summaries.append(_summarize(sigma, results, cfg.n_realizations, keep_records))
    return summaries


def instability_onset(cfg: DisorderConfig, threshold: float = 0.01,
                      workers: int | None = None) -> tuple[float, list[DisorderSummary]]:
    """Smallest sigma in the schedule where p_unstable exceeds ``threshold``.

    The schedule must be ascending. Raises :class:`NoOnset` when instability
    never exceeds the threshold within the schedule; the summaries computed
    so far ride along in the exception's ``summaries`` attribute.
    """
    if any(b <= a for a, b in zip(cfg.sigmas, cfg.sigmas[1:])):
        raise ValueError("sigma schedule must be strictly ascending")
    summaries = disorder_sweep(cfg, workers=workers)
    for summary in summaries:
        if summary.p_unstable > threshold:
            return summary.sigma, summaries
    err = NoOnset(f"p_unstable never exceeded {threshold} within the schedule")
    err.summaries = summaries
    raise err


@dataclass(frozen=True)
class PhaseDiagramCell:
    kappa_over_J: float
    gc_over_J: float
    classification: str
    re_zeta: float
    e0: float
    gap: float


def phase_diagram_cells(base: EffectiveParams, kappa_values: np.ndarray,
                        gc_values: np.ndarray, omega: float) -> list[PhaseDiagramCell]:
    """Classify a (kappa/J, g_c/J) grid; one cell per combination, row-major."""
    from .topology import phase_map
    result = phase_map(np.asarray(kappa_values), np.asarray(gc_values), base, omega)
    cells = []
    for a, kr in enumerate(result.kappa_over_J):
        for b, gr in enumerate(result.gc_over_J):
            cells.append(PhaseDiagramCell(
                kappa_over_J=float(kr), gc_over_J=float(gr),
                classification=str(result.classification[a, b]),
                re_zeta=float(result.re_zeta[a, b]),
                e0=float(result.e0[a, b]),
                gap=float(result.gap[a, b]),
            ))
    return cells


PHASE_SCHEMA = ("kappa_over_J", "gc_over_J", "class", "re_zeta", "e0", "gap")


def run_phase_diagram(base: EffectiveParams, kappa_values: np.ndarray,
                      gc_values: np.ndarray, omega: float, out_base,
                      force: bool = False) -> list:
    """Compute and persist a phase-diagram grid, resuming previous runs.

    Cells already present in a previous dataset or partial file with the
    same configuration hash are skipped. Partial results are flushed to a
    ``.partial.json`` sidecar after every grid row, so an interrupted run
    loses at most one row; the sidecar is removed on completion. The final
    CSV is sorted by (kappa, gc) with fixed float formatting, so re-running
    an identical configuration reproduces the output byte for byte.
    """
    out_base = Path(out_base)
    kappa_values = np.asarray(kappa_values, dtype=float)
    gc_values = np.asarray(gc_values, dtype=float)
    cfg = {
        "base": {"N": base.N, "delta": base.delta, "J": base.J, "phi": base.phi,
                 "kappa": base.kappa, "g_s": base.g_s, "g_c": base.g_c},
        "kappa_values": [fmt_value(v) for v in kappa_values],
        "gc_values": [fmt_value(v) for v in gc_values],
        "omega": fmt_value(omega),
    }
    chash = config_hash(cfg)

    done: dict[tuple[str, str], list] = {}
    partial_path = out_base.with_suffix(".partial.json")
    manifest_path = out_base.with_suffix(".manifest.json")
    csv_path = out_base.with_suffix(".csv")
    if manifest_path.exists() and csv_path.exists():
        manifest = json.loads(manifest_path.read_text())
        if manifest.get("config_hash") == chash:
            _, rows = read_csv(csv_path)
            for row in rows:
                done[(row[0], row[1])] = row
        elif not force:
            raise FileExistsError(
                f"{csv_path} holds a different configuration; pass force to overwrite")
    if partial_path.exists():
        part = json.loads(partial_path.read_text())
        if part.get("config_hash") == chash:
            for row in part.get("rows", []):
                done[(row[0], row[1])] = row

    gs_ratio = base.g_s / base.g_c if base.g_c != 0.0 else 1.0
    for kr in kappa_values:
        row_changed = False
        for gr in gc_values:
            key = (fmt_value(float(kr)), fmt_value(float(gr)))
            if key in done:
                continue
            p = replace(base, kappa=float(kr) * base.J, g_c=float(gr) * base.J,
                         g_s=gs_ratio * float(gr) * base.J)
            h = build_hnh(p)
            report = classify_point(p, omega, h=h)
            re_zeta = math.nan
            if report.classification == TOPOLOGICAL and p.N >= 6:
                try:
                    re_zeta = localization_length(h, omega).zeta.real
                except Exception:
                    pass
            e0 = report.e0 if report.classification != UNSTABLE else math.nan
            gap = report.gap if report.classification != UNSTABLE else math.nan
            done[key] = [key[0], key[1], report.classification,
                         fmt_value(re_zeta), fmt_value(e0), fmt_value(gap)]
            row_changed = True
        if row_changed:
            partial_path.write_text(json.dumps(
                {"config_hash": chash, "rows": list(done.values())}))

    ordered = sorted(done.values(), key=lambda r: (float(r[0]), float(r[1])))
    emit_dataset(ordered, PHASE_SCHEMA, out_base, force=True, cfg_hash=chash)
    if partial_path.exists():
        partial_path.unlink()
    return ordered


def split_half_stderr_ratio(cfg: DisorderConfig, sigma: float,
                            workers: int | None = None) -> float:
    """Ratio stderr(n/4) / stderr(n) for the gain; ~2 when errors scale 1/sqrt(n)."""
    full = disorder_sweep(DisorderConfig(
        base=cfg.base, family=cfg.family, sigmas=(sigma,),
        n_realizations=cfg.n_realizations, master_seed=cfg.master_seed,
        omega_s=cfg.omega_s, compute_wtop=False), workers=workers)[0]
    quarter = disorder_sweep(DisorderConfig(
        base=cfg.base, family=cfg.family, sigmas=(sigma,),
        n_realizations=max(cfg.n_realizations // 4, 2), master_seed=cfg.master_seed,
        omega_s=cfg.omega_s, compute_wtop=False), workers=workers)[0]
    return quarter.stderr_gain / full.stderr_gain
