"""Batch command line: generate, metrics, solve, indicator, correlate, report.

Exit codes: 0 success, 1 usage error or missing input, 2 mesh validation
failure, 3 solver failure.
"""
from __future__ import annotations

import argparse
import sys
from collections import defaultdict
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import report as rp
from ._sparse import FactorizationError
from .datasets import BASE_IDS, DATASET_IDS, PARAMETRIC_IDS, T_VALUES, generate
from .indicator import quality_report, write_indicator_csv
from .mesh import MeshError, load_mesh, save_mesh, validate
from .metrics import mesh_metrics, read_metrics_summary, write_metrics_csv
from .perf import SolveReport, UndefinedIndexError, evaluate
from .stats import UndefinedCorrelationError, correlation_study
from .vem.local import STABILIZATIONS, ElementConditioningError
from .vem.solver import SolverConfig, SolverError

COMMANDS = ("generate", "metrics", "solve", "indicator", "correlate", "report")
FORMATS = ("csv", "svg")
SCALES = ("loglog", "semilogy", "semilogx", "linear")
EXIT_USAGE, EXIT_INVALID, EXIT_SOLVER = 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for invalid meshes
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_levels(text: str) -> tuple:
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must look like A..B or N, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"need 0 <= A <= B, got {text!r}")
    return tuple(range(lo, hi + 1))


def parse_ks(text: str) -> tuple:
    try:
        ks = tuple(int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--k takes a comma list of integers, got {text!r}") from None
    if any(k < 1 for k in ks):
        raise argparse.ArgumentTypeError("polynomial degrees must be >= 1")
    return ks


def parse_datasets(text: str) -> tuple:
    out = []
    for name in text.split(","):
        if name == "parametric":
            out.extend(PARAMETRIC_IDS)
        elif name == "all":
            out.extend(BASE_IDS)
        elif name in DATASET_IDS:
            out.append(name)
        else:
            raise argparse.ArgumentTypeError(f"unknown dataset {name!r}; choose from {', '.join(DATASET_IDS)}, parametric, all")
    return tuple(dict.fromkeys(out))


def parse_formats(text: str) -> tuple:
    fm = tuple(text.split(","))
    bad = [f for f in fm if f not in FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format {bad[0]!r}; choose from {FORMATS}")
    return fm


@dataclass(frozen=True)
class RunConfig:
    command: str
    datasets: tuple = ()
    levels: tuple | None = None
    ks: tuple = (1,)
    stabilization: str | None = None
    test: str = "test1"
    out: str = "out"
    seed: int = 0
    formats: tuple = FORMATS
    conditioning: bool = True
    scale: str = "semilogy"
    solver_config: str | None = None

    def dump(self) -> str:
        return "\n".join(f"{k} = {v!r}" for k, v in asdict(self).items()) + "\n"

    def to_argv(self) -> list:
        argv = [self.command, "--out", self.out, "--seed", str(self.seed), "--test", self.test,
                "--k", ",".join(map(str, self.ks)), "--format", ",".join(self.formats), "--scale", self.scale]
        if self.datasets:
            argv += ["--dataset", ",".join(self.datasets)]
        if self.levels is not None:
            argv += ["--levels", f"{self.levels[0]}..{self.levels[-1]}"]
        if self.stabilization is not None:
            argv += ["--stab", self.stabilization]
        if not self.conditioning:
            argv.append("--no-conditioning")
        if self.solver_config is not None:
            argv += ["--solver-config", self.solver_config]
        return argv

    def levels_for(self, dataset: str) -> tuple:
        if self.levels is not None:
            return self.levels
        return tuple(range(len(T_VALUES))) if dataset.startswith("parametric:") else (0, 1, 2, 3)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polyvem", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--dataset", type=parse_datasets, default=None,
                   help="comma list of dataset ids; 'all' for the refinement datasets, 'parametric' for the sweep")
    p.add_argument("--levels", type=parse_levels, default=None, help="A..B inclusive (default 0..3, parametric 0..20)")
    p.add_argument("--k", type=parse_ks, default=(1,), help="comma list of degrees")
    p.add_argument("--stab", choices=STABILIZATIONS, default=None)
    p.add_argument("--test", choices=("test1", "test2"), default="test1")
    p.add_argument("--out", default="out", help="working directory for every artifact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", type=parse_formats, default=FORMATS, help="csv, svg or csv,svg")
    p.add_argument("--scale", choices=SCALES, default="semilogy", help="axes of correlation scatter plots")
    p.add_argument("--no-conditioning", action="store_true", help="skip the condition-number indexes P4, P5, P8")
    p.add_argument("--solver-config", default=None, help="key = value solver configuration file")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    datasets = ns.dataset
    if datasets is None:
        datasets = PARAMETRIC_IDS if ns.command == "correlate" else ()
    return RunConfig(
        command=ns.command, datasets=tuple(datasets), levels=ns.levels, ks=tuple(ns.k),
        stabilization=ns.stab, test=ns.test, out=ns.out, seed=ns.seed, formats=tuple(ns.format),
        conditioning=not ns.no_conditioning, scale=ns.scale, solver_config=ns.solver_config,
    )


def parse_config(argv) -> RunConfig:
    return config_from_args(build_parser().parse_args(argv))


# file layout ----------------------------------------------------------------

def _safe(name: str) -> str:
    return name.replace(":", "-")


def mesh_path(out: Path, dataset: str, n: int) -> Path:
    return out / "meshes" / f"{_safe(dataset)}_{n}.poly"


def metrics_path(out: Path, dataset: str, n: int) -> Path:
    return out / "metrics" / f"{_safe(dataset)}_{n}.csv"


def solve_path(out: Path, dataset: str, test: str, stab: str) -> Path:
    return out / "solve" / f"{_safe(dataset)}_{test}_{stab}.csv"


def indicator_path(out: Path, dataset: str) -> Path:
    return out / "indicator" / f"{_safe(dataset)}.csv"


def _need_datasets(cfg: RunConfig) -> None:
    if not cfg.datasets:
        raise CliError(f"{cfg.command}: --dataset is required (ids: {', '.join(DATASET_IDS)})")


def _load(cfg: RunConfig, dataset: str, n: int):
    path = mesh_path(Path(cfg.out), dataset, n)
    if not path.exists():
        raise CliError(
            f"missing mesh {path}; create it with: polyvem generate --dataset {dataset} "
            f"--levels {n}..{n} --out {cfg.out}"
        )
    try:
        mesh = load_mesh(path, level=n)
    except MeshError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INVALID) from exc
    bad = validate(mesh)
    if bad:
        raise CliError(f"{path}: {len(bad)} validation violation(s), first: {bad[0]}", EXIT_INVALID)
    return mesh


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# commands -------------------------------------------------------------------

def cmd_generate(cfg: RunConfig) -> list:
    _need_datasets(cfg)
    written = []
    for ds in cfg.datasets:
        for n in cfg.levels_for(ds):
            mesh = generate(ds, n, seed=cfg.seed)
            bad = validate(mesh)
            if bad:
                raise CliError(f"{ds} level {n}: {len(bad)} validation violation(s), first: {bad[0]}", EXIT_INVALID)
            path = mesh_path(Path(cfg.out), ds, n)
            path.parent.mkdir(parents=True, exist_ok=True)
            save_mesh(mesh, path)
            written.append(path)
            _log(f"wrote {path} ({mesh.n_elements} elements)")
    return written


def cmd_metrics(cfg: RunConfig) -> list:
    _need_datasets(cfg)
    written = []
    for ds in cfg.datasets:
        for n in cfg.levels_for(ds):
            mesh = _load(cfg, ds, n)
            path = metrics_path(Path(cfg.out), ds, n)
            path.parent.mkdir(parents=True, exist_ok=True)
            write_metrics_csv(mesh_metrics(mesh), path)
            written.append(path)
            _log(f"wrote {path}")
    return written


def _solver_settings(cfg: RunConfig) -> SolverConfig:
    base = SolverConfig.load(cfg.solver_config) if cfg.solver_config else SolverConfig()
    if cfg.stabilization is not None:
        base = SolverConfig(k=base.k, stabilization=cfg.stabilization, solver=base.solver, cg_tol=base.cg_tol)
    return base


def cmd_solve(cfg: RunConfig) -> list:
    _need_datasets(cfg)
    settings = _solver_settings(cfg)
    written = []
    for ds in cfg.datasets:
        rows = []
        for n in cfg.levels_for(ds):
            mesh = _load(cfg, ds, n)
            for k in cfg.ks:
                try:
                    rep = evaluate(mesh, k, cfg.test, settings.stabilization, dataset=ds,
                                   conditioning=cfg.conditioning, solver=settings.solver,
                                   cg_tol=settings.cg_tol)
                except (SolverError, ElementConditioningError, FactorizationError, UndefinedIndexError) as exc:
                    raise CliError(f"{ds} level {n}, k={k}: {exc}", EXIT_SOLVER) from exc
                rows.append(rep.csv_row())
                _log(f"{ds} n={n} k={k}: dofs={rep.dof_count} P1={rep.rel_h1_energy:.3e}")
        path = solve_path(Path(cfg.out), ds, cfg.test, settings.stabilization)
        path.parent.mkdir(parents=True, exist_ok=True)
        rp.write_csv(path, SolveReport.CSV_HEADER, rows)
        written.append(path)
        _log(f"wrote {path}")
    return written


def cmd_indicator(cfg: RunConfig) -> list:
    _need_datasets(cfg)
    written = []
    for ds in cfg.datasets:
        rows = [(ds, quality_report(_load(cfg, ds, n))) for n in cfg.levels_for(ds)]
        path = indicator_path(Path(cfg.out), ds)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_indicator_csv(path, rows)
        written.append(path)
        _log(f"wrote {path}")
    return written


def _scale_flags(scale: str) -> tuple:
    return {"loglog": (True, True), "semilogy": (False, True), "semilogx": (True, False), "linear": (False, False)}[scale]


def cmd_correlate(cfg: RunConfig) -> list:
    _need_datasets(cfg)
    out = Path(cfg.out)
    stab = _solver_settings(cfg).stabilization
    runs = defaultdict(list)
    for ds in cfg.datasets:
        spath = solve_path(out, ds, cfg.test, stab)
        if not spath.exists():
            raise CliError(f"missing {spath}; create it with: polyvem solve --dataset {ds} --test {cfg.test} "
                           f"--stab {stab} --k {','.join(map(str, cfg.ks))} --out {cfg.out}")
        by_key = {(int(r["level"]), int(r["k"])): r for r in rp.read_csv(spath)}
        for n in cfg.levels_for(ds):
            mpath = metrics_path(out, ds, n)
            if not mpath.exists():
                raise CliError(f"missing {mpath}; create it with: polyvem metrics --dataset {ds} "
                               f"--levels {n}..{n} --out {cfg.out}")
            mets = read_metrics_summary(mpath)
            for k in cfg.ks:
                if (n, k) not in by_key:
                    raise CliError(f"{spath} has no row for level {n}, k={k}; rerun polyvem solve with --k {k}")
                row = by_key[(n, k)]
                runs[k].append((mets, {f"P{i}": float(row[f"P{i}"]) for i in range(1, 9)}))
    written = []
    cdir = out / "correlation"
    cdir.mkdir(parents=True, exist_ok=True)
    logx, logy = _scale_flags(cfg.scale)
    for k, rk in runs.items():
        try:
            cm = correlation_study(rk)
        except (UndefinedCorrelationError, ValueError) as exc:
            raise CliError(f"correlation for k={k}: {exc}") from exc
        if "csv" in cfg.formats:
            path = cdir / f"correlation_{cfg.test}_k{k}.csv"
            cm.write_csv(path)
            written.append(path)
        if "svg" in cfg.formats:
            absval = np.abs(np.nan_to_num(cm.values, nan=-1.0))
            for j, col in enumerate(cm.columns):
                if (absval[:, j] < 0).all():
                    continue
                defined = np.flatnonzero(absval[:, j] >= 0)
                for tag, i in (("strongest", defined[np.argmax(absval[defined, j])]),
                               ("weakest", defined[np.argmin(absval[defined, j])])):
                    metric, agg = cm.rows[i]
                    xs = [m[(metric, agg)] for m, _ in rk]
                    ys = [p[col] for _, p in rk]
                    path = cdir / f"scatter_{cfg.test}_k{k}_{col}_{tag}.svg"
                    rp.scatter_plot(path, xs, ys, f"{col} vs {agg} {metric.upper()} (rho = {cm.values[i, j]:.3f})",
                                    f"{agg} {metric.upper()}", col, logx=logx, logy=logy)
                    written.append(path)
        _log(f"correlation k={k}: {len(rk)} runs")
    return written


def _num(v: str) -> float:
    try:
        return float(v)
    except ValueError:
        return float("nan")


def cmd_report(cfg: RunConfig) -> list:
    out = Path(cfg.out)
    rdir = out / "report"
    solve_files = sorted((out / "solve").glob("*.csv")) if (out / "solve").exists() else []
    ind_files = sorted((out / "indicator").glob("*.csv")) if (out / "indicator").exists() else []
    corr_files = sorted((out / "correlation").glob("correlation_*.csv")) if (out / "correlation").exists() else []
    if not (solve_files or ind_files or corr_files):
        raise CliError(f"nothing to report in {out}; run polyvem solve, polyvem indicator or "
                       f"polyvem correlate with --out {cfg.out} first")
    rdir.mkdir(parents=True, exist_ok=True)
    written, md = [], ["# Report", ""]

    if solve_files:
        all_rows = []
        md += ["## Convergence", "", "Least-squares slopes of log error against log mean element diameter.", ""]
        slope_rows = []
        for f in solve_files:
            rows = rp.read_csv(f)
            if not rows:
                continue
            all_rows += rows
            stem = f.stem
            by_k = defaultdict(list)
            for r in rows:
                by_k[int(r["k"])].append(r)
            for idx, ylabel, shift in (("P1", "relative energy error", 0), ("P3", "relative L2 error", 1)):
                series = {f"k={k}": ([_num(r["dofs"]) for r in rs], [_num(r[idx]) for r in rs]) for k, rs in sorted(by_k.items())}
                if "svg" in cfg.formats:
                    written.append(rp.convergence_plot(rdir / f"convergence_{stem}_{idx}.svg", series,
                                                       f"{stem}: {idx}", ylabel, rates=[k + shift for k in sorted(by_k)]))
            for k, rs in sorted(by_k.items()):
                h = [_num(r["h_av"]) for r in rs]
                slope_rows.append([stem, k, len(rs), f"{rp.fitted_slope(h, [_num(r['P1']) for r in rs]):.3f}",
                                   f"{rp.fitted_slope(h, [_num(r['P3']) for r in rs]):.3f}"])
        md += [rp.markdown_table(["run", "k", "levels", "P1 slope", "P3 slope"], slope_rows), ""]
        if "csv" in cfg.formats:
            written.append(rp.diagnostics_table(rdir / "diagnostics.csv", all_rows))
            md += ["Projector and basis diagnostics: `diagnostics.csv`.", ""]

    if ind_files:
        series, last = {}, []
        for f in ind_files:
            rows = rp.read_csv(f)
            if not rows:
                continue
            name = rows[0]["dataset"]
            series[name] = ([int(r["level"]) for r in rows], [_num(r["rho"]) for r in rows])
            last.append([name, rows[-1]["level"], f"{_num(rows[-1]['rho']):.4f}"])
        if "svg" in cfg.formats:
            written.append(rp.trend_plot(rdir / "indicator_trend.svg", series, "mesh quality indicator", "rho"))
        last.sort(key=lambda r: -float(r[2]))
        md += ["## Quality indicator", "", rp.markdown_table(["dataset", "level", "rho"], last), ""]

    if corr_files:
        md += ["## Correlation", ""]
        for f in corr_files:
            rows = rp.read_csv(f)
            cols = [c for c in rows[0] if c.startswith("P")] if rows else []
            top = []
            for c in cols:
                vals = [(abs(_num(r[c])), r["metric"], r["aggregation"], _num(r[c])) for r in rows if r[c] != ""]
                if vals:
                    best = max(vals)
                    top.append([c, f"{best[2]} {best[1].upper()}", f"{best[3]:.3f}"])
            md += [f"`{f.name}`: strongest metric per index.", "",
                   rp.markdown_table(["index", "metric", "spearman"], top), ""]

    summary = rdir / "summary.md"
    summary.write_text("\n".join(md), encoding="utf-8")
    written.append(summary)
    _log(f"wrote {len(written)} report files to {rdir}")
    return written


HANDLERS = {
    "generate": cmd_generate, "metrics": cmd_metrics, "solve": cmd_solve,
    "indicator": cmd_indicator, "correlate": cmd_correlate, "report": cmd_report,
}


def main(argv=None) -> int:
    cfg = parse_config(argv)
    try:
        HANDLERS[cfg.command](cfg)
    except CliError as exc:
        print(f"polyvem {cfg.command}: {exc}", file=sys.stderr)
        return exc.code
    return 0


if __name__ == "__main__":
    sys.exit(main())
