"""Configuration-driven experiment runner.

A JSON config describes the dataset (manifest path or synthetic spec), the
solver settings, an optional parameter grid, the clustering repetition
protocol, and the output directory. For every grid point the runner performs
one deterministic solve, repeats the seed-varied spectral clustering stage,
and writes per-point artifacts::

    <output_dir>/<grid_point_hash>/result.json     per-point parameters + metrics
    <output_dir>/<grid_point_hash>/trace.csv       per-iteration residuals and gaps
    <output_dir>/<grid_point_hash>/consensus.csv   converged consensus matrix
    <output_dir>/<grid_point_hash>/plot.svg        log-scale residual curves
    <output_dir>/summary.json                      best grid point per metric

Only the clustering stage is seed-sensitive; the solver itself is
deterministic, so repetitions vary the k-means seed alone.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import math
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .data import (
    DatasetError,
    MultiViewDataset,
    NORMALIZATION_MODES,
    SyntheticSpec,
    generate_synthetic,
    load_dataset,
    normalize_views,
)
from .metrics import evaluate
from .solver import (
    SolverConfig,
    SolverNumericalError,
    SolverOutput,
    VARIANTS,
    solve,
    solve_ablation_frobenius,
    solve_ablation_no_smoothing,
)
from .spectral import build_affinity, spectral_clustering


class ConfigError(ValueError):
    """Raised for malformed or inconsistent experiment configuration."""


# Published per-corpus parameter presets (alpha, beta, eta).
PRESETS = {
    "3sources": (1.0, 0.8, 0.5),
    "ORL": (0.2, 0.1, 0.5),
    "MSRC-v1": (1e-5, 0.5, 0.5),
    "BBCsport": (0.2, 2.0, 0.5),
    "COIL20": (0.5, 0.1, 0.5),
    "Caltech101-7": (5.0, 10.0, 0.5),
    "HW": (0.8, 0.5, 0.5),
}

DEFAULT_ALPHA_BETA_GRID = [1e-5, 1e-4, 0.001, 0.01, 0.1, 0.2, 0.5, 0.8, 1.0, 2.0, 5.0, 8.0, 10.0]
DEFAULT_ETA_GRID = [-5.0, -2.0, -1.0, 0.1, 0.5, 1.5, 2.0, 5.0]

TRACE_COLUMNS = (
    "iter",
    "residual_C",
    "residual_Z",
    "gap_Y",
    "gap_CiZi",
    "gap_Ci1",
    "gap_CZ",
    "gap_C1",
    "objective",
)

_SOLVE_FUNCS = {
    "full": solve,
    "no_smoothing": solve_ablation_no_smoothing,
    "frobenius": solve_ablation_frobenius,
}


@dataclass(frozen=True)
class ExperimentConfig:
    manifest: Path | None
    synthetic: SyntheticSpec | None
    normalize: str
    solver: SolverConfig
    grid: dict[str, list[float]] | None
    k: int | None
    repetitions: int
    restarts: int
    seed: int
    variant: str
    output_dir: Path

    @staticmethod
    def from_dict(raw: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        dataset = raw.get("dataset")
        if not isinstance(dataset, dict) or ("manifest" in dataset) == ("synthetic" in dataset):
            raise ConfigError("dataset must specify exactly one of 'manifest' or 'synthetic'")
        manifest = None
        synthetic = None
        if "manifest" in dataset:
            manifest = Path(dataset["manifest"])
            if not manifest.is_absolute():
                manifest = base_dir / manifest
        else:
            try:
                synthetic = SyntheticSpec(**dataset["synthetic"])
            except (TypeError, DatasetError) as exc:
                raise ConfigError(f"invalid synthetic spec: {exc}") from None
        normalize = raw.get("normalize", "none")
        if normalize not in NORMALIZATION_MODES:
            raise ConfigError(f"unknown normalization mode {normalize!r}")
        solver_fields = dict(raw.get("solver", {}))
        preset = raw.get("preset")
        if preset is not None:
            if preset not in PRESETS:
                raise ConfigError(f"unknown preset {preset!r}; known: {sorted(PRESETS)}")
            alpha, beta, eta = PRESETS[preset]
            solver_fields.setdefault("alpha", alpha)
            solver_fields.setdefault("beta", beta)
            solver_fields.setdefault("eta", eta)
        try:
            solver = SolverConfig(**solver_fields)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid solver config: {exc}") from None
        grid = raw.get("grid")
        if grid == "default":
            grid = {
                "alpha": list(DEFAULT_ALPHA_BETA_GRID),
                "beta": list(DEFAULT_ALPHA_BETA_GRID),
                "eta": list(DEFAULT_ETA_GRID),
            }
        elif grid is not None:
            if not isinstance(grid, dict) or not set(grid) <= {"alpha", "beta", "eta"}:
                raise ConfigError("grid may only list alpha, beta, and eta values")
            defaults = {
                "alpha": DEFAULT_ALPHA_BETA_GRID,
                "beta": DEFAULT_ALPHA_BETA_GRID,
                "eta": DEFAULT_ETA_GRID,
            }
            grid = {
                key: list(defaults[key]) if values == "default" else [float(x) for x in values]
                for key, values in grid.items()
            }
            if any(not values for values in grid.values()):
                raise ConfigError("grid lists must be non-empty")
        repetitions = int(raw.get("repetitions", 1))
        if repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        restarts = int(raw.get("restarts", 20))
        if restarts < 1:
            raise ConfigError("restarts must be >= 1")
        variant = raw.get("variant", "full")
        if variant not in VARIANTS:
            raise ConfigError(f"unknown variant {variant!r}; known: {VARIANTS}")
        k = raw.get("k")
        if k is not None:
            k = int(k)
            if k < 1:
                raise ConfigError("k must be >= 1")
        output_dir = Path(raw.get("output_dir", "results"))
        if not output_dir.is_absolute():
            output_dir = base_dir / output_dir
        return ExperimentConfig(
            manifest=manifest,
            synthetic=synthetic,
            normalize=normalize,
            solver=solver,
            grid=grid,
            k=k,
            repetitions=repetitions,
            restarts=restarts,
            seed=int(raw.get("seed", 0)),
            variant=variant,
            output_dir=output_dir,
        )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid config JSON: {exc}") from None
    return ExperimentConfig.from_dict(raw, base_dir=path.parent)


def grid_points(cfg: ExperimentConfig) -> list[dict[str, float]]:
    """Cartesian product of the grid lists, singleton solver values elsewhere."""
    grid = cfg.grid or {}
    alphas = grid.get("alpha", [cfg.solver.alpha])
    betas = grid.get("beta", [cfg.solver.beta])
    etas = grid.get("eta", [cfg.solver.eta])
    return [
        {"alpha": a, "beta": b, "eta": e}
        for a, b, e in itertools.product(alphas, betas, etas)
    ]


def grid_point_hash(params: dict[str, float]) -> str:
    canonical = json.dumps(params, sort_keys=True)
    return hashlib.sha1(canonical.encode("utf-8")).hexdigest()[:12]


def _load_experiment_dataset(cfg: ExperimentConfig) -> MultiViewDataset:
    if cfg.manifest is not None:
        ds = load_dataset(cfg.manifest)
    else:
        ds = generate_synthetic(cfg.synthetic)
    return normalize_views(ds, cfg.normalize)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_trace_csv(path: Path, output: SolverOutput) -> None:
    diag = output.diagnostics
    lines = [",".join(TRACE_COLUMNS)]
    for idx in range(len(diag)):
        row = [
            str(idx + 1),
            *(
                format(getattr(diag, col)[idx], ".17g")
                for col in TRACE_COLUMNS[1:]
            ),
        ]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _metric_summary(values: list[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    return {
        "mean": float(arr.mean()),
        "std": float(arr.std()),  # population std over repetitions
        "values": [float(x) for x in values],
    }


def run_grid_point(
    ds: MultiViewDataset, cfg: ExperimentConfig, params: dict[str, float], point_dir: Path
) -> dict:
    """Solve one grid point, run the clustering repetitions, write artifacts."""
    point_dir.mkdir(parents=True, exist_ok=True)
    solver_cfg = replace(cfg.solver, **params)
    output = _SOLVE_FUNCS[cfg.variant](ds, solver_cfg)
    _write_trace_csv(point_dir / "trace.csv", output)
    np.savetxt(point_dir / "consensus.csv", output.consensus_C, fmt="%.17g", delimiter=",")
    emit_convergence_plot(point_dir / "trace.csv", point_dir / "plot.svg")

    k = cfg.k if cfg.k is not None else ds.n_classes
    W = build_affinity(output.consensus_C)
    metrics = None
    if ds.labels is not None:
        per_metric = {"acc": [], "nmi": [], "ari": [], "f_score": []}
        for r in range(cfg.repetitions):
            assignment = spectral_clustering(W, k, seed=cfg.seed + r, restarts=cfg.restarts)
            report = evaluate(assignment.labels, ds.labels)
            per_metric["acc"].append(report.acc)
            per_metric["nmi"].append(report.nmi)
            per_metric["ari"].append(report.ari)
            per_metric["f_score"].append(report.f_score)
        metrics = {name: _metric_summary(vals) for name, vals in per_metric.items()}
    else:
        for r in range(cfg.repetitions):
            spectral_clustering(W, k, seed=cfg.seed + r, restarts=cfg.restarts)

    result = {
        "params": params,
        "variant": cfg.variant,
        "normalize": cfg.normalize,
        "n": ds.n_samples,
        "v": ds.n_views,
        "k": k,
        "seed": cfg.seed,
        "repetitions": cfg.repetitions,
        "converged": output.converged,
        "iterations": output.iterations,
        "gamma": [float(g) for g in output.gamma],
        "metrics": metrics,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    _write_json(point_dir / "result.json", result)
    return result


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run all grid points; returns the process exit code (0, or 2 if every
    grid point failed). Solver failures are recorded per point and the sweep
    continues."""
    ds = _load_experiment_dataset(cfg)
    if cfg.k is None and ds.labels is None:
        raise ConfigError("k is required when the dataset has no labels")
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    points = []
    n_failed = 0
    for params in grid_points(cfg):
        digest = grid_point_hash(params)
        point_dir = cfg.output_dir / digest
        try:
            result = run_grid_point(ds, cfg, params, point_dir)
            points.append({"hash": digest, "params": params, "ok": True, "result": result})
        except (SolverNumericalError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            n_failed += 1
            point_dir.mkdir(parents=True, exist_ok=True)
            _write_json(
                point_dir / "result.json",
                {
                    "params": params,
                    "variant": cfg.variant,
                    "error": str(exc),
                    "timestamp": datetime.now(timezone.utc).isoformat(),
                },
            )
            points.append({"hash": digest, "params": params, "ok": False, "error": str(exc)})
    best = None
    scored = [p for p in points if p["ok"] and p["result"]["metrics"] is not None]
    if scored:
        best = {}
        for metric in ("acc", "nmi", "ari", "f_score"):
            top = max(scored, key=lambda p: p["result"]["metrics"][metric]["mean"])
            best[metric] = {
                "hash": top["hash"],
                "params": top["params"],
                "mean": top["result"]["metrics"][metric]["mean"],
            }
    summary = {
        "variant": cfg.variant,
        "n_points": len(points),
        "n_failed": n_failed,
        "points": [
            {key: p[key] for key in ("hash", "params", "ok")} for p in points
        ],
        "best": best,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    _write_json(cfg.output_dir / "summary.json", summary)
    if points and n_failed == len(points):
        return 2
    return 0


def emit_convergence_plot(trace_path: str | Path, out_path: str | Path) -> Path:
    """Render the residual columns of a trace CSV as a standalone SVG.

    Both residual curves are drawn against the iteration count on a log10
    vertical axis spanning the data range.
    """
    trace_path = Path(trace_path)
    rows = trace_path.read_text(encoding="utf-8").splitlines()
    if not rows:
        raise ValueError(f"empty trace: {trace_path}")
    header = rows[0].split(",")
    data_rows = [line.split(",") for line in rows[1:] if line.strip()]
    if not data_rows:
        raise ValueError(f"empty trace: {trace_path}")
    idx_iter = header.index("iter")
    idx_rc = header.index("residual_C")
    idx_rz = header.index("residual_Z")
    iters = [float(r[idx_iter]) for r in data_rows]
    res_c = [max(float(r[idx_rc]), 1e-300) for r in data_rows]
    res_z = [max(float(r[idx_rz]), 1e-300) for r in data_rows]

    width, height = 640.0, 420.0
    left, right, top, bottom = 72.0, 16.0, 16.0, 48.0
    x_lo, x_hi = min(iters), max(iters)
    y_lo = math.log10(min(res_c + res_z))
    y_hi = math.log10(max(res_c + res_z))
    x_span = (x_hi - x_lo) or 1.0
    y_span = (y_hi - y_lo) or 1.0

    def sx(x: float) -> float:
        return left + (x - x_lo) / x_span * (width - left - right)

    def sy(value: float) -> float:
        return height - bottom - (math.log10(value) - y_lo) / y_span * (height - top - bottom)

    def polyline(ys, color):
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(iters, ys))
        return f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>'

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" y2="{height - bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>',
        polyline(res_c, "#1f77b4"),
        polyline(res_z, "#d62728"),
        f'<text x="{(left + width - right) / 2:.0f}" y="{height - 12:.0f}" '
        f'font-size="13" text-anchor="middle">iteration</text>',
        f'<text x="16" y="{(top + height - bottom) / 2:.0f}" font-size="13" '
        f'transform="rotate(-90 16 {(top + height - bottom) / 2:.0f})" '
        f'text-anchor="middle">log10 squared residual</text>',
        f'<text x="{left + 8:.0f}" y="{top + 14:.0f}" font-size="12" fill="#1f77b4">consensus C</text>',
        f'<text x="{left + 8:.0f}" y="{top + 30:.0f}" font-size="12" fill="#d62728">auxiliary Z</text>',
        f'<text x="{left - 6:.0f}" y="{height - bottom + 4:.0f}" font-size="11" '
        f'text-anchor="end">{y_lo:.1f}</text>',
        f'<text x="{left - 6:.0f}" y="{top + 10:.0f}" font-size="11" text-anchor="end">{y_hi:.1f}</text>',
        f'<text x="{sx(x_lo):.0f}" y="{height - bottom + 16:.0f}" font-size="11" '
        f'text-anchor="middle">{x_lo:.0f}</text>',
        f'<text x="{sx(x_hi):.0f}" y="{height - bottom + 16:.0f}" font-size="11" '
        f'text-anchor="middle">{x_hi:.0f}</text>',
        "</svg>",
    ]
    out_path = Path(out_path)
    out_path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return out_path


def _apply_overrides(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    solver = cfg.solver
    grid = cfg.grid
    for name in ("alpha", "beta", "eta"):
        value = getattr(args, name)
        if value is not None:
            solver = replace(solver, **{name: value})
            if grid and name in grid:
                grid = {key: vals for key, vals in grid.items() if key != name}
                grid = grid or None
    if args.max_iter is not None:
        solver = replace(solver, max_iter=args.max_iter)
    if args.eps is not None:
        solver = replace(solver, eps=args.eps)
    updates: dict = {"solver": solver, "grid": grid}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.repetitions is not None:
        if args.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        updates["repetitions"] = args.repetitions
    if args.variant is not None:
        updates["variant"] = args.variant
    if args.k is not None:
        updates["k"] = args.k
    if args.normalize is not None:
        updates["normalize"] = args.normalize
    if args.output is not None:
        updates["output_dir"] = Path(args.output)
    return replace(cfg, **updates)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gfclust",
        description="Multi-view subspace clustering with an adaptive consensus graph filter",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment described by a JSON config")
    run_p.add_argument("--config", required=True, help="experiment config JSON")
    run_p.add_argument("--alpha", type=float, default=None)
    run_p.add_argument("--beta", type=float, default=None)
    run_p.add_argument("--eta", type=float, default=None)
    run_p.add_argument("--max-iter", type=int, default=None, dest="max_iter")
    run_p.add_argument("--eps", type=float, default=None)
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--repetitions", type=int, default=None)
    run_p.add_argument("--variant", choices=VARIANTS, default=None)
    run_p.add_argument("--k", type=int, default=None)
    run_p.add_argument("--normalize", choices=NORMALIZATION_MODES, default=None)
    run_p.add_argument("--output", default=None, help="output directory override")

    plot_p = sub.add_parser("plot", help="render a residual trace CSV as SVG")
    plot_p.add_argument("trace", help="trace.csv produced by a run")
    plot_p.add_argument("--out", required=True, help="output SVG path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        try:
            cfg = load_config(args.config)
            cfg = _apply_overrides(cfg, args)
            code = run_experiment(cfg)
        except (ConfigError, DatasetError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 1
        if code == 0:
            print(f"results written to {cfg.output_dir}")
        else:
            print("all grid points failed", file=sys.stderr)
        return code
    if args.command == "plot":
        try:
            out = emit_convergence_plot(args.trace, args.out)
        except (OSError, ValueError) as exc:
            print(f"plot error: {exc}", file=sys.stderr)
            return 1
        print(f"plot written to {out}")
        return 0
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
