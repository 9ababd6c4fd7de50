"""Study drivers and file I/O behind the command-line interface.

Every command is a pure function of its :class:`StudyConfig`: reruns with the
same master seed reproduce byte-identical CSVs. Floats are serialized with 17
significant digits for lossless round trips; SVG plots are conveniences and
everything quantitative lives in the CSVs.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from . import engines, stability, svgplot, verify
from .model import Hyperparams, precompute
from .synth import GenSpec, gen_design, gen_response, make_beta, make_dataset, replicate_seed

__all__ = [
    "StudyConfig",
    "ConfigError",
    "cmd_gen_data",
    "cmd_run_example",
    "cmd_spectral_study",
    "cmd_verify",
    "cmd_wigner_check",
    "parse_config_file",
    "write_csv",
]

DEFAULT_LEFT_P_GRID = (10, 20, 30, 40, 50)
DEFAULT_RIGHT_S_GRID = (5, 15, 25, 35, 45)


class ConfigError(ValueError):
    """Invalid study configuration; maps to CLI exit status 2."""


@dataclass(frozen=True)
class StudyConfig:
    """Everything a study command needs; grids are lists even when singleton."""

    out_dir: str
    mode: str = "run_example"
    n: Sequence[int] = (200,)
    p: Sequence[int] = (50,)
    s: Sequence[int] = (25,)
    amplitude: float = 1.0
    replications: int = 50
    hyper: Hyperparams = Hyperparams(pi=0.5, tau=1.0, sigma2=1.0)
    run: engines.RunConfig = engines.RunConfig(max_iter=500)
    scheme: engines.Scheme = engines.Scheme()
    master_seed: int = 0
    panel: str = "both"
    explicit_grids: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for name in ("n", "p", "s"):
            grid = getattr(self, name)
            if len(grid) == 0:
                raise ConfigError(f"{name} grid must be nonempty")
            if any(int(v) < 0 for v in grid):
                raise ConfigError(f"{name} grid must be nonnegative")
        if self.replications < 1:
            raise ConfigError("replications must be at least 1")
        if self.panel not in ("left", "right", "both"):
            raise ConfigError(f"unknown panel {self.panel!r}")


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt_value(v) for v in row) + "\n")


def _ensure_out(cfg: StudyConfig) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return cfg.out_dir


def _single(cfg: StudyConfig, name: str) -> int:
    grid = getattr(cfg, name)
    if len(grid) != 1:
        raise ConfigError(f"{name} must be a single value for {cfg.mode}")
    return int(grid[0])


def cmd_gen_data(cfg: StudyConfig) -> List[str]:
    """Write one synthetic dataset as interchange CSVs (X, y, beta)."""
    out = _ensure_out(cfg)
    spec = GenSpec(
        n=_single(cfg, "n"),
        p=_single(cfg, "p"),
        s=_single(cfg, "s"),
        amplitude=cfg.amplitude,
        sigma2=cfg.hyper.sigma2,
        seed=cfg.master_seed,
    )
    X = gen_design(spec)
    beta = make_beta(spec)
    y = gen_response(X, beta, spec.sigma2, spec.seed)
    paths = []
    for name, arr in (("X.csv", X), ("y.csv", y[:, None]), ("beta.csv", beta[:, None])):
        path = os.path.join(out, name)
        with open(path, "w", newline="\n") as fh:
            for row in arr:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
        paths.append(path)
    return paths


def cmd_run_example(cfg: StudyConfig):
    """Run one trajectory and dump its trace, final means, and two plots."""
    out = _ensure_out(cfg)
    spec = GenSpec(
        n=_single(cfg, "n"),
        p=_single(cfg, "p"),
        s=_single(cfg, "s"),
        amplitude=cfg.amplitude,
        sigma2=cfg.hyper.sigma2,
        seed=cfg.master_seed,
    )
    ds = make_dataset(spec)
    pre = precompute(ds, cfg.hyper)
    trace = engines.run(ds, cfg.hyper, cfg.scheme, cfg.run, pre=pre)

    status_col = ["running"] * len(trace.iterations)
    status_col[-1] = trace.status
    write_csv(
        os.path.join(out, "trace.csv"),
        ["iter", "elbo", "step_sup_norm", "status"],
        zip(trace.iterations, trace.elbo, trace.step_sup_norm, status_col),
    )
    final = trace.final_state
    write_csv(
        os.path.join(out, "means.csv"),
        ["j", "beta_true", "mu", "alpha"],
        (
            (j, ds.beta_true[j], final.mu[j], final.alpha[j])
            for j in range(ds.p)
        ),
    )
    svgplot.line_plot(
        os.path.join(out, "elbo.svg"),
        trace.iterations,
        trace.elbo,
        title=f"{cfg.scheme.variant} trajectory (status: {trace.status})",
        xlabel="iteration",
        ylabel="ELBO",
    )
    idx = np.arange(ds.p)
    svgplot.scatter_plot(
        os.path.join(out, "means.svg"),
        [
            (idx, final.mu, "variational mean"),
            (idx, ds.beta_true, "true coefficient"),
        ],
        title="final variational means vs truth",
        xlabel="coordinate",
        ylabel="value",
    )
    return trace


def _panel_points(cfg: StudyConfig):
    """Expand the panel selection into (panel, n, p, s) grid points."""
    if cfg.panel == "both" and cfg.explicit_grids:
        raise ConfigError("custom n/p/s grids require --panel left or right")
    points = []
    if cfg.panel in ("left", "both"):
        n = int(cfg.n[0]) if (cfg.panel == "left" and "n" in cfg.explicit_grids) else 100
        p_grid = cfg.p if (cfg.panel == "left" and "p" in cfg.explicit_grids) else DEFAULT_LEFT_P_GRID
        points += [("left", n, int(p), int(p)) for p in p_grid]
    if cfg.panel in ("right", "both"):
        n = int(cfg.n[0]) if (cfg.panel == "right" and "n" in cfg.explicit_grids) else 200
        p = int(cfg.p[0]) if (cfg.panel == "right" and "p" in cfg.explicit_grids) else 50
        s_grid = cfg.s if (cfg.panel == "right" and "s" in cfg.explicit_grids) else DEFAULT_RIGHT_S_GRID
        points += [("right", n, p, int(s)) for s in s_grid]
    return points


def spectral_replicate(n, p, s, seed, hyper, run_cfg, amplitude=1.0):
    """One spectral-study replicate: fixed point by the sequential engine,
    then both spectral radii and the contraction check. Non-convergence is
    reported through the flag, never raised."""
    ds = make_dataset(GenSpec(n=n, p=p, s=s, amplitude=amplitude, sigma2=hyper.sigma2, seed=seed))
    pre = precompute(ds, hyper)
    try:
        state = engines.fixed_point(ds, hyper, run_cfg, pre=pre)
    except engines.FixedPointError:
        return dict(seq_converged=False, rho_seq=float("nan"), rho_par=float("nan"),
                    assumption1_satisfied=False, alpha_min=float("nan"))
    report = stability.analyze_stability(state.mu, pre, hyper)
    return dict(
        seq_converged=True,
        rho_seq=report.rho_seq,
        rho_par=report.rho_par,
        assumption1_satisfied=report.assumption1.satisfied,
        alpha_min=float(np.min(state.alpha)),
    )


def cmd_spectral_study(cfg: StudyConfig):
    """Replicated spectral radii over the panel grids; CSV plus box plots."""
    out = _ensure_out(cfg)
    rows = []
    n_failed = 0
    for panel, n, p, s in _panel_points(cfg):
        for r in range(cfg.replications):
            seed = replicate_seed(cfg.master_seed, r)
            res = spectral_replicate(n, p, s, seed, cfg.hyper, cfg.run, cfg.amplitude)
            if not res["seq_converged"]:
                n_failed += 1
            rows.append(
                (
                    panel, n, p, s, r, seed,
                    res["rho_seq"],
                    math.log(res["rho_seq"]) if res["rho_seq"] > 0 else float("nan"),
                    res["rho_par"],
                    math.log(res["rho_par"]) if res["rho_par"] > 0 else float("nan"),
                    res["seq_converged"],
                    res["assumption1_satisfied"],
                )
            )
    header = [
        "panel", "n", "p", "s", "replicate", "seed",
        "rho_seq", "log_rho_seq", "rho_par", "log_rho_par",
        "seq_converged", "assumption1_satisfied",
    ]
    write_csv(os.path.join(out, "rho.csv"), header, rows)

    groups = []
    for panel, n, p, s in _panel_points(cfg):
        tag = f"p={p}" if panel == "left" else f"s={s}"
        for scheme, col, color in (("seq", 7, 1), ("par", 9, 0)):
            vals = [
                row[col]
                for row in rows
                if row[0] == panel and row[2] == p and row[3] == s and row[10]
            ]
            groups.append((f"{panel} {tag} {scheme}", vals, color))
    svgplot.box_plot(
        os.path.join(out, "rho_boxplot.svg"),
        groups,
        title="log spectral radius by scheme and grid point",
        xlabel="grid point",
        ylabel="log rho",
    )
    if n_failed:
        print(f"note: {n_failed} replicate(s) did not converge and are excluded from boxplots")
    return rows


def cmd_verify(cfg: StudyConfig) -> int:
    """Run the oracle suite, write verify.csv, and return the exit status."""
    out = _ensure_out(cfg)
    results = verify.run_checks(seed=cfg.master_seed, progress=lambda m: print(f"verify: {m}"))
    write_csv(
        os.path.join(out, "verify.csv"),
        ["name", "metric", "threshold", "pass"],
        results,
    )
    failed = [r.name for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  metric={r.metric:.3g}")
    if failed:
        print(f"FAILED checks: {', '.join(failed)}")
        return 1
    return 0


def cmd_wigner_check(cfg: StudyConfig):
    """Replicated normalized-Gram spectral norms over the (n, p) grid."""
    out = _ensure_out(cfg)
    points = [(int(n), int(p)) for n in cfg.n for p in cfg.p if p <= n]
    if not points:
        raise ConfigError("wigner-check needs at least one grid point with p <= n")
    tau = cfg.hyper.tau
    rows = []
    summaries = []
    for n, p in points:
        ratios = []
        for r in range(cfg.replications):
            seed = replicate_seed(cfg.master_seed, r)
            X = gen_design(GenSpec(n=n, p=p, s=0, seed=seed))
            stat = stability.wigner_stat(X, tau)
            rows.append((n, p, tau, seed, stat.norm, stat.ratio))
            ratios.append(stat.ratio)
        qs = np.percentile(ratios, [0, 25, 50, 75, 100])
        summaries.append((n, p, tau, *qs))
    write_csv(
        os.path.join(out, "wigner.csv"),
        ["n", "p", "tau", "seed", "norm", "ratio"],
        rows,
    )
    write_csv(
        os.path.join(out, "wigner_summary.csv"),
        ["n", "p", "tau", "ratio_min", "ratio_q25", "ratio_median", "ratio_q75", "ratio_max"],
        summaries,
    )
    return rows


def parse_config_file(path: str) -> dict:
    """key = value per line; '#' starts a comment; keys use flag names."""
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
                key, value = line.split("=", 1)
                values[key.strip().lower().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values
