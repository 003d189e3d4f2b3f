"""Command-line interface: fit projections, evaluate scores, generate data.

Two subcommands. ``fit`` reads a CSV (or generates a synthetic dataset
in-process), fits the requested method, and writes a JSON report plus the
projected coordinates as CSV. ``gen`` writes a synthetic dataset to CSV with
a trailing label column. Exit codes: 0 success, 1 input error,
2 non-convergence (the report is still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass

import numpy as np

from .data import DataMatrix, SicParams, center, scale_measure
from .pca import top_components
from .power import PowerOptions, fit_tpca_power
from .relaxation import RelaxOptions, solve_relaxation
from .sic import sic_gaussian_rd, sic_t_rd, tpca_objective
from .synth import SynthSpec, gen_outlier_pair, gen_two_scale_gaussians

DEFAULT_RHO_REL = 1e-5
REPORT_SCHEMA = 1


class CliInputError(Exception):
    """Bad command line, unreadable input, or malformed data."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliInputError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated arguments for one invocation."""

    command: str
    input_path: str | None = None
    has_header: bool = False
    label_col: str | None = None
    synth: SynthSpec | None = None
    center: bool = True
    method: str = "pca"
    r: int = 1
    rho: float | None = None
    rho_rel: float | None = None
    sigma: float = 1.0
    nu: float = 1.0
    deltas: tuple[float, ...] = (1.0,)
    alpha: float | None = None
    tol: float | None = None
    max_iter: int | None = None
    restarts: int = 4
    seed: int = 0
    out_report: str = "report.json"
    out_proj: str = "projections.csv"
    out_data: str = "dataset.csv"

    def __post_init__(self):
        if self.command == "fit":
            if (self.input_path is None) == (self.synth is None):
                raise CliInputError("fit needs exactly one input source: --input or --synth")
            if self.method not in ("pca", "tpca-power", "tpca-relax"):
                raise CliInputError(f"unknown method {self.method!r}")
            if self.rho is not None and self.rho_rel is not None:
                raise CliInputError("--rho and --rho-rel are mutually exclusive")


def load_csv(path: str, has_header: bool = False, label_col: str | None = None):
    """Read a rectangular numeric CSV into an uncentered DataMatrix.

    Returns (DataMatrix, labels-or-None). ``label_col`` names (header
    required) or indexes a column to strip out as labels. Parse failures
    report 1-based file line numbers.
    """
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise CliInputError(f"cannot read {path}: {exc}") from exc
    rows: list[list[float]] = []
    header: list[str] | None = None
    width: int | None = None
    with handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            cells = [cell.strip() for cell in row]
            if not any(cells):
                continue
            if has_header and header is None:
                header = cells
                continue
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise CliInputError(
                    f"{path}: line {lineno}: expected {width} columns, got {len(cells)}"
                )
            try:
                rows.append([float(cell) for cell in cells])
            except ValueError:
                bad = next(c for c in cells if not _is_number(c))
                raise CliInputError(
                    f"{path}: line {lineno}: could not parse {bad!r} as a number"
                ) from None
    if not rows:
        raise CliInputError(f"{path}: no data rows")
    values = np.array(rows)
    labels = None
    if label_col is not None:
        index = _resolve_label_column(label_col, header, values.shape[1], path)
        labels = values[:, index].astype(int)
        values = np.delete(values, index, axis=1)
        if values.shape[1] == 0:
            raise CliInputError(f"{path}: no feature columns left after removing labels")
    return DataMatrix(values, centered=False), labels


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _resolve_label_column(label_col: str, header, width: int, path: str) -> int:
    if header is not None and label_col in header:
        return header.index(label_col)
    try:
        index = int(label_col)
    except ValueError:
        raise CliInputError(f"{path}: no column named {label_col!r}") from None
    if not -width <= index < width:
        raise CliInputError(f"{path}: label column index {index} out of range")
    return index % width


def _format(value: float) -> str:
    return f"{float(value):.17g}"


def _write_csv(path: str, columns: list[str], values: np.ndarray, labels=None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        names = list(columns) + (["label"] if labels is not None else [])
        out.write(",".join(names) + "\n")
        for i in range(values.shape[0]):
            cells = [_format(v) for v in values[i]]
            if labels is not None:
                cells.append(str(int(labels[i])))
            out.write(",".join(cells) + "\n")


def _sic_dict(sic) -> dict:
    return {
        "total": sic.total,
        "data_term": sic.data_term,
        "resolution_term": sic.resolution_term,
        "constant_term": sic.constant_term,
    }


def _build_synth(config: RunConfig):
    spec = config.synth
    if spec.variant == "two_scale":
        return gen_two_scale_gaussians(spec)
    return gen_outlier_pair(spec)


def _run_fit(config: RunConfig) -> int:
    if config.input_path is not None:
        raw, labels = load_csv(config.input_path, config.has_header, config.label_col)
        data = center(raw) if config.center else raw
        source = {"path": config.input_path}
    else:
        data, labels = _build_synth(config)
        source = {"synth": _spec_dict(config.synth)}
    scale = scale_measure(data)
    if config.rho is not None:
        rho = float(config.rho)
        rho_policy = {"mode": "absolute", "factor": None, "value": rho}
    else:
        factor = config.rho_rel if config.rho_rel is not None else DEFAULT_RHO_REL
        rho = float(factor) * scale
        rho_policy = {"mode": "relative", "factor": float(factor), "value": rho}

    r = int(config.r)
    deltas = _broadcast_deltas(config.deltas, r)
    params = SicParams(sigma=config.sigma, rho=rho, nu=config.nu, deltas=deltas)

    eigenvalues = None
    upper_bound = None
    bound_label = None
    kkt = None
    backtracked = None
    iterations = 0
    converged = True
    if config.method == "pca":
        basis, eigs = top_components(data, r)
        eigenvalues = [float(v) for v in eigs]
        objectives = eigenvalues
    elif config.method == "tpca-power":
        opts = PowerOptions(
            alpha=config.alpha,
            max_iter=config.max_iter if config.max_iter is not None else 10000,
            tol=config.tol if config.tol is not None else 1e-8,
            restarts=config.restarts,
            seed=config.seed,
        )
        report = fit_tpca_power(data, rho, r, opts)
        basis = report.basis
        objectives = [float(v) for v in report.objectives]
        iterations = report.iterations
        converged = report.converged
        kkt = report.kkt_residual
        backtracked = report.backtracked
    else:
        opts = RelaxOptions(
            step=config.alpha,
            tol=config.tol if config.tol is not None else 1e-10,
            max_iter=config.max_iter if config.max_iter is not None else 20000,
        )
        _, report = solve_relaxation(data, rho, r, opts)
        basis = report.basis
        objectives = [float(v) for v in report.objectives]
        iterations = report.iterations
        converged = report.converged
        kkt = report.kkt_residual
        upper_bound = report.upper_bound
        bound_label = report.bound_label
        backtracked = report.backtracked

    projection_objectives = [
        tpca_objective(data, basis[:, j], rho) for j in range(basis.shape[1])
    ]
    sic_gaussian = sic_gaussian_rd(data, basis, params.sigma, params.deltas)
    sic_t = (
        sic_t_rd(data, basis, params.rho, params.nu, params.deltas)
        if params.rho > 0.0
        else None
    )

    report_dict = {
        "schema": REPORT_SCHEMA,
        "command": "fit",
        "method": config.method,
        "input": source,
        "n": data.n,
        "d": data.d,
        "r": r,
        "centered": bool(data.centered),
        "seed": int(config.seed),
        "scale_measure": scale,
        "rho_policy": rho_policy,
        "sigma": float(config.sigma),
        "nu": float(config.nu),
        "deltas": [float(v) for v in deltas],
        "directions": [[float(v) for v in basis[:, j]] for j in range(basis.shape[1])],
        "objectives": objectives,
        "projection_objectives": projection_objectives,
        "eigenvalues": eigenvalues,
        "iterations": int(iterations),
        "converged": bool(converged),
        "kkt_residual": kkt,
        "upper_bound": upper_bound,
        "bound_label": bound_label,
        "backtracked": backtracked,
        "sic_gaussian": _sic_dict(sic_gaussian),
        "sic_t": _sic_dict(sic_t) if sic_t is not None else None,
    }
    with open(config.out_report, "w", encoding="utf-8", newline="\n") as out:
        json.dump(report_dict, out, sort_keys=True, indent=2)
        out.write("\n")

    projections = data.values @ basis
    _write_csv(
        config.out_proj,
        [f"p{j + 1}" for j in range(basis.shape[1])],
        projections,
        labels,
    )
    return 0 if converged else 2


def _spec_dict(spec: SynthSpec) -> dict:
    return {
        "variant": spec.variant,
        "seed": int(spec.seed),
        "n_large": int(spec.n_large),
        "n_small": int(spec.n_small),
        "d": int(spec.d),
        "scale_factor": float(spec.scale_factor),
        "scale_minority": bool(spec.scale_minority),
    }


def _broadcast_deltas(deltas, r: int) -> tuple[float, ...]:
    deltas = tuple(float(v) for v in deltas)
    if len(deltas) == 1:
        return deltas * r
    if len(deltas) != r:
        raise CliInputError(f"got {len(deltas)} --delta values for r={r}")
    return deltas


def _run_gen(config: RunConfig) -> int:
    data, labels = _build_synth(config)
    _write_csv(
        config.out_data,
        [f"x{j + 1}" for j in range(data.d)],
        data.values,
        labels,
    )
    return 0


def run(config: RunConfig) -> int:
    """Execute a validated configuration; returns the process exit code."""
    if config.command == "fit":
        return _run_fit(config)
    if config.command == "gen":
        return _run_gen(config)
    raise CliInputError(f"unknown command {config.command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tpca", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fit = sub.add_parser("fit", help="fit projections and write report + coordinates")
    fit.add_argument("--input", help="CSV file of observations, rows are points")
    fit.add_argument("--has-header", action="store_true", help="skip one header line")
    fit.add_argument("--label-col", help="column (name or index) to treat as labels")
    fit.add_argument("--synth", choices=["two-scale", "outlier-pair"],
                     help="generate this synthetic dataset instead of reading a file")
    fit.add_argument("--no-center", action="store_true",
                     help="do not subtract column means (data must already be centered)")
    fit.add_argument("--method", default="pca",
                     choices=["pca", "tpca-power", "tpca-relax"])
    fit.add_argument("--r", type=int, default=1, help="number of projection directions")
    fit.add_argument("--rho", type=float, help="absolute heavy-tail scale")
    fit.add_argument("--rho-rel", type=float,
                     help=f"rho as a multiple of the data scale (default {DEFAULT_RHO_REL:g})")
    fit.add_argument("--sigma", type=float, default=1.0, help="Gaussian prior scale")
    fit.add_argument("--nu", type=float, default=1.0, help="degrees of freedom for the t score")
    fit.add_argument("--delta", type=float, action="append",
                     help="plot resolution; repeat for per-axis values (default 1)")
    fit.add_argument("--alpha", type=float, help="step size (power step / relaxation step)")
    fit.add_argument("--tol", type=float, help="convergence tolerance")
    fit.add_argument("--max-iter", type=int, help="iteration cap")
    fit.add_argument("--restarts", type=int, default=4,
                     help="extra random initializations for the power method")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--out-report", default="report.json")
    fit.add_argument("--out-proj", default="projections.csv")
    _add_synth_shape_flags(fit)

    gen = sub.add_parser("gen", help="write a synthetic dataset to CSV")
    gen.add_argument("--variant", required=True, choices=["two-scale", "outlier-pair"])
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="dataset.csv")
    _add_synth_shape_flags(gen)
    return parser


def _add_synth_shape_flags(parser) -> None:
    parser.add_argument("--n-large", type=int, help="majority population size")
    parser.add_argument("--n-small", type=int, help="minority population size")
    parser.add_argument("--dim", type=int, help="dimension (two-scale only)")
    parser.add_argument("--scale-factor", type=float,
                        help="covariance multiplier (two-scale only)")
    parser.add_argument("--scale-majority", action="store_true",
                        help="apply the multiplier to the majority population instead")


def _synth_spec_from_args(args, variant: str) -> SynthSpec:
    name = variant.replace("-", "_")
    if name == "two_scale":
        return SynthSpec.two_scale(
            seed=args.seed,
            n_large=args.n_large if args.n_large is not None else 8000,
            n_small=args.n_small if args.n_small is not None else 2000,
            d=args.dim if args.dim is not None else 100,
            scale_factor=args.scale_factor if args.scale_factor is not None else 100.0,
            scale_minority=not args.scale_majority,
        )
    return SynthSpec.outlier_pair(
        seed=args.seed,
        n_inliers=args.n_large if args.n_large is not None else 1000,
        n_outliers=args.n_small if args.n_small is not None else 100,
    )


def parse_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.command == "gen":
        return RunConfig(
            command="gen",
            synth=_synth_spec_from_args(args, args.variant),
            seed=args.seed,
            out_data=args.out,
        )
    synth = _synth_spec_from_args(args, args.synth) if args.synth else None
    return RunConfig(
        command="fit",
        input_path=args.input,
        has_header=args.has_header,
        label_col=args.label_col,
        synth=synth,
        center=not args.no_center,
        method=args.method,
        r=args.r,
        rho=args.rho,
        rho_rel=args.rho_rel,
        sigma=args.sigma,
        nu=args.nu,
        deltas=tuple(args.delta) if args.delta else (1.0,),
        alpha=args.alpha,
        tol=args.tol,
        max_iter=args.max_iter,
        restarts=args.restarts,
        seed=args.seed,
        out_report=args.out_report,
        out_proj=args.out_proj,
    )


def main(argv=None) -> int:
    try:
        config = parse_args(argv)
        return run(config)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
