"""Command-line front end: solve one portfolio CSV, run an experiment
suite from a JSON spec, or fit a power law to a points CSV.

Exit codes: 0 full success, 2 completed with failures (a run that
stopped before converging, or a suite with failed trials), 1 fatal
error.
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click
import numpy as np

from .bench import ExperimentSpec, emit_plots, fit_power_law, run_suite
from .classical import IpmConfig, run
from .portfolio import PortfolioProblem, estimate, extract_solution, \
    ingest_csv, to_socp
from .quantum import NoiseModel, run_quantum

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2


@click.group()
def main():
    """Cone-program portfolio solver and experiment harness."""


def _fatal(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(EXIT_FATAL)


@main.command()
@click.argument("prices", type=click.Path(dir_okay=False))
@click.option("--target-return", default="mean", show_default=True,
              help="Required expected return; 'mean' uses the average "
                   "of the asset means.")
@click.option("--budget", default=1.0, show_default=True, type=float,
              help="Right-hand side of the sum(x) = budget row; "
                   "use 'nan' to drop the row.")
@click.option("--epsilon", default=1e-6, show_default=True, type=float)
@click.option("--delta", default=0.0, show_default=True, type=float,
              help="Tomography precision; 0 solves exactly.")
@click.option("--norm-delta", default=None, type=float,
              help="Norm-estimation precision (defaults to delta).")
@click.option("--mode", default="fixed", show_default=True,
              type=click.Choice(["fixed", "adaptive"]))
@click.option("--chi", default=0.1, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", default=None, type=click.Path(dir_okay=False),
              help="Write the run report and solution as JSON.")
def solve(prices, target_return, budget, epsilon, delta, norm_delta,
          mode, chi, seed, out):
    """Solve the minimum-risk portfolio for a price CSV."""
    try:
        dataset = ingest_csv(prices)
        mu, m_mat, _ = estimate(dataset)
        target = (float(np.mean(mu)) if target_return == "mean"
                  else float(target_return))
        extra_eq = None
        if not np.isnan(budget):
            extra_eq = (np.ones((1, dataset.n_assets)),
                        np.array([budget]))
        prob = PortfolioProblem(mu=mu, M=m_mat, target_return=target,
                                extra_eq=extra_eq)
        inst, smap = to_socp(prob)
        config = IpmConfig(epsilon=epsilon, chi=chi)
        if delta > 0:
            model = NoiseModel(delta=delta, norm_delta=norm_delta,
                               seed=seed, mode=mode)
            report = run_quantum(inst, config, model)
        else:
            report = run(inst, config)
        solution = extract_solution(report, smap)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _fatal(str(exc))

    click.echo(f"status: {report.status}  iterations: {report.iterations}")
    click.echo(f"final duality gap measure: {report.nu_final:.3e}")
    click.echo(f"risk: {solution.risk:.6f}  "
               f"return: {solution.expected_return:.6f}")
    click.echo("weights: " +
               " ".join(f"{w:.4f}" for w in solution.weights))
    if out:
        doc = {
            "report": json.loads(report.to_json()),
            "solution": {
                "weights": solution.weights.tolist(),
                "risk": solution.risk,
                "expected_return": solution.expected_return,
                "t0": solution.t0,
                "boundary_gap": solution.boundary_gap,
                "tight": solution.tight,
            },
        }
        with open(out, "w") as handle:
            json.dump(doc, handle, indent=2)
        click.echo(f"wrote {out}")
    sys.exit(EXIT_OK if report.converged else EXIT_PARTIAL)


@main.command()
@click.argument("spec_file", type=click.Path(dir_okay=False))
@click.option("--out", default="suite_out", show_default=True,
              type=click.Path(file_okay=False),
              help="Directory for figure CSVs and summary.json.")
@click.option("--epsilon", default=None, type=float,
              help="Override the spec's epsilon.")
@click.option("--delta", default=None, type=float,
              help="Override the noise model's delta.")
@click.option("--chi", default=None, type=float,
              help="Override the spec's chi.")
@click.option("--seed", default=None, type=int,
              help="Override the spec's seed.")
def suite(spec_file, out, epsilon, delta, chi, seed):
    """Run an experiment suite described by an ExperimentSpec JSON."""
    try:
        with open(spec_file) as handle:
            blob = json.load(handle)
        spec = ExperimentSpec.from_json(blob)
        if epsilon is not None:
            spec.epsilon = epsilon
        if chi is not None:
            spec.chi = chi
        if seed is not None:
            spec.seed = seed
        if delta is not None:
            spec.noise = dict(spec.noise, delta=delta)
        report = run_suite(spec)
        summary = emit_plots(report, out)
        with open(os.path.join(out, "trials.csv"), "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(
                report.rows[0].to_row().keys()) if report.rows else
                ["trial"])
            writer.writeheader()
            for row in report.rows:
                writer.writerow(row.to_row())
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _fatal(str(exc))

    click.echo(f"trials: {summary['trials']}  "
               f"converged: {summary['converged']}  "
               f"failures: {summary['failures']}")
    if summary["zeta_max"] is not None:
        note = "  (over 5: notable)" if summary["zeta_over_5"] else ""
        click.echo(f"max zeta: {summary['zeta_max']:.4f}"
                   f"{note}")
    fits = summary["fits"]
    for name in ("kappa_vs_n", "inv_delta_sq_vs_n", "cost_vs_n"):
        fit = fits.get(name)
        if fit:
            click.echo(f"{name}: b = {fit['b']:.3f} "
                       f"[{fit['ci_low']:.3f}, {fit['ci_high']:.3f}]")
    click.echo(f"wrote plot data to {out}/")
    sys.exit(EXIT_OK if summary["failures"] == 0 else EXIT_PARTIAL)


@main.command()
@click.argument("points_file", type=click.Path(dir_okay=False))
@click.option("--x-col", default=0, show_default=True, type=int,
              help="Zero-based column index of x.")
@click.option("--y-col", default=1, show_default=True, type=int,
              help="Zero-based column index of y.")
@click.option("--out", default=None, type=click.Path(dir_okay=False),
              help="Write the fit as JSON.")
def fit(points_file, x_col, y_col, out):
    """Fit y = a * x^b to a CSV of points (header row expected)."""
    try:
        with open(points_file, newline="") as handle:
            reader = csv.reader(handle)
            next(reader)  # header
            points = [(float(row[x_col]), float(row[y_col]))
                      for row in reader if row]
        result = fit_power_law(points)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        _fatal(str(exc))

    click.echo(f"a = {result.a:.6g}")
    click.echo(f"b = {result.b:.6g}  "
               f"95% CI [{result.ci_low:.6g}, {result.ci_high:.6g}]")
    click.echo(f"R^2 = {result.r_squared:.4f} on {result.n_points} points")
    if out:
        with open(out, "w") as handle:
            json.dump(result.to_json(), handle, indent=2)
        click.echo(f"wrote {out}")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
