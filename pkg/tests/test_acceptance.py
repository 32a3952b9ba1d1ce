"""Acceptance gate: nine end-to-end checks covering algebra identities,
solver convergence, oracle agreement, noise-model guarantees, and the
experiment harness.  Each check records one PASS/FAIL line; the session
summary echoes them all."""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

import oracles
from coneipm import (
    BlockVector,
    ConeStructure,
    IpmConfig,
    NoiseModel,
    PortfolioProblem,
    estimate,
    extract_solution,
    fit_power_law,
    identity_element,
    iteration_bound,
    jordan_product,
    measured_alpha,
    min_eigenvalue,
    run,
    run_quantum,
    sigma_for,
    simulate_tomography,
    synthetic_dataset,
    to_socp,
)
from coneipm.bench import trim_top_cost
from coneipm.jordan import quadratic_rep, spectral_frame

VERDICTS: list[str] = []

CHI = 0.1


def _verdict(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} — {detail}"
    VERDICTS.append(line)
    print(line)
    assert ok, line


def _portfolio_instance(n_assets: int, n_days: int, seed: int):
    mu, m_mat, sigma = estimate(synthetic_dataset(n_assets, n_days,
                                                  seed=seed))
    target = float(mu.mean())
    prob = PortfolioProblem(
        mu=mu, M=m_mat, target_return=target,
        extra_eq=(np.ones((1, n_assets)), np.array([1.0])))
    inst, smap = to_socp(prob)
    return inst, smap, sigma, mu, target


def test_criterion_1_jordan_identities_on_random_blocks():
    start = time.time()
    rng = np.random.default_rng(1001)
    blocks_checked = 0
    worst = 0.0
    while blocks_checked < 10_000:
        dims = tuple(int(d) for d in rng.integers(0, 7, size=50))
        structure = ConeStructure(dims)
        x = BlockVector(structure, rng.normal(size=structure.total_dim))
        e = identity_element(structure)

        unit_action = jordan_product(x, e)
        square = jordan_product(x, x)
        scale = max(1.0, float(np.linalg.norm(x.values)))
        worst = max(worst, float(np.linalg.norm(
            unit_action.values - x.values)) / scale)

        for i in range(structure.rank):
            block = x.values[structure.block_slice(i)]
            sq_block = square.values[structure.block_slice(i)]
            bscale = max(1.0, float(np.linalg.norm(block)))
            q_on_e = quadratic_rep(block)[:, 0]
            worst = max(worst, float(np.linalg.norm(q_on_e - sq_block))
                        / bscale)
            lam1, lam2, c1, c2 = spectral_frame(block)
            rebuilt = lam1 * c1 + lam2 * c2
            worst = max(worst, float(np.linalg.norm(rebuilt - block))
                        / bscale)
        blocks_checked += structure.rank
    elapsed = time.time() - start
    _verdict(1, worst <= 1e-10 and elapsed < 5.0,
             f"{blocks_checked} random blocks, max relative identity "
             f"error {worst:.2e} (limit 1e-10), {elapsed:.1f}s (limit 5s)")


def test_criterion_2_classical_gap_decay_and_iteration_bound():
    start = time.time()
    inst, _, _, _, _ = _portfolio_instance(20, 40, seed=11)
    epsilon = 1e-6
    report = run(inst, IpmConfig(epsilon=epsilon, full_diagnostics=False))
    sigma = sigma_for(inst.structure.rank, CHI)
    nus = [report.nu_initial] + [d.nu for d in report.rows]
    ratios = [nus[i + 1] / nus[i] for i in range(len(nus) - 1)]
    burn = 2
    max_dev = max(abs(ratio - sigma) for ratio in ratios[burn:])
    bound = iteration_bound(report.nu_initial, epsilon, sigma)
    elapsed = time.time() - start
    ok = (report.converged and max_dev <= 0.05
          and report.iterations <= bound + 5 and elapsed < 30.0)
    _verdict(2, ok,
             f"20-asset run converged={report.converged} in "
             f"{report.iterations} iterations (bound {bound}+5), "
             f"gap ratio within {max_dev:.2e} of sigma={sigma:.6f} "
             f"(limit 0.05), {elapsed:.1f}s (limit 30s)")


def test_criterion_3_solution_matches_brute_force_oracle():
    start = time.time()
    epsilon = 1e-6
    mu2 = np.array([0.02, 0.01])
    m2 = np.array([[0.03, 0.01], [-0.01, 0.02], [0.005, -0.015]])
    cases = [(PortfolioProblem(mu=mu2, M=m2, target_return=0.013),
              (m2.T @ m2, mu2, 0.013, None))]
    for n_assets, seed in ((3, 5), (3, 14), (4, 2), (4, 21)):
        inst, smap, sigma_mat, mu, target = _portfolio_instance(
            n_assets, 15, seed=seed)
        cases.append((None, (sigma_mat, mu, target, 1.0), inst, smap))

    worst_ratio = 0.0
    all_converged = True
    solved = 0
    for case in cases:
        if case[0] is not None:
            prob, oracle_args = case
            inst, smap = to_socp(prob)
        else:
            _, oracle_args, inst, smap = case
        report = run(inst, IpmConfig(epsilon=epsilon,
                                     full_diagnostics=False))
        all_converged = all_converged and report.converged
        solution = extract_solution(report, smap)
        sigma_mat, mu, target, budget = oracle_args
        _, objective = oracles.qp_min_risk(sigma_mat, mu, target,
                                           budget=budget)
        tol = 10.0 * epsilon * inst.structure.rank
        worst_ratio = max(worst_ratio,
                          abs(solution.t0 - math.sqrt(objective)) / tol)
        solved += 1
    elapsed = time.time() - start
    ok = all_converged and worst_ratio <= 1.0 and elapsed < 60.0
    _verdict(3, ok,
             f"{solved} instances (2-4 assets) vs support-enumeration QP "
             f"oracle, worst |risk gap| at {worst_ratio:.3f} of the "
             f"10*eps*r budget, {elapsed:.1f}s (limit 60s)")


def test_criterion_4_noisy_runs_respect_infeasibility_bound():
    start = time.time()
    inst, _, _, _, _ = _portfolio_instance(8, 21, seed=7)
    total = converged = 0
    worst = 0.0
    for delta, epsilon in ((1e-2, 1e-3), (1e-3, 1e-5)):
        config = IpmConfig(epsilon=epsilon, full_diagnostics=False)
        for noise_seed in range(25):
            total += 1
            report = run_quantum(inst, config,
                                 NoiseModel(delta=delta, seed=noise_seed))
            if report.converged:
                converged += 1
                worst = max(worst, report.primal_infeasibility
                            / (delta * report.matrix_norm2))
    elapsed = time.time() - start
    ok = (worst <= 1.0 and converged >= total // 2 and elapsed < 300.0)
    _verdict(4, ok,
             f"{converged}/{total} noisy runs converged at "
             f"delta in {{1e-2, 1e-3}}; worst ||Ax-b|| at {worst:.3f} of "
             f"the delta*||A||_2 bound, {elapsed:.1f}s (limit 300s)")


def test_criterion_5_tomography_contract_and_noiseless_equality():
    start = time.time()
    rng_v = np.random.default_rng(55)
    v = rng_v.normal(size=12)
    delta = 0.05
    bound = 2.0 * delta * np.linalg.norm(v)
    model = NoiseModel(delta=delta, seed=90)
    rng = model.rng()
    worst = 0.0
    for _ in range(100_000):
        sample = simulate_tomography(v, model, rng)
        worst = max(worst, float(np.linalg.norm(sample - v)))

    inst, _, _, _, _ = _portfolio_instance(8, 21, seed=7)
    config = IpmConfig(epsilon=1e-3, full_diagnostics=False)
    exact = run(inst, config)
    silent = run_quantum(inst, config, NoiseModel(delta=0.0, seed=0))
    identical = (silent.iterations == exact.iterations
                 and np.array_equal(silent.x, exact.x)
                 and np.array_equal(silent.y, exact.y)
                 and np.array_equal(silent.s, exact.s))
    elapsed = time.time() - start
    ok = worst <= bound + 1e-12 and identical and elapsed < 30.0
    _verdict(5, ok,
             f"100000 samples, worst error {worst:.4f} vs bound "
             f"{bound:.4f}; delta=0 run bit-identical to exact run: "
             f"{identical}; {elapsed:.1f}s (limit 30s)")


def test_criterion_6_noisy_decay_rate_and_iteration_overhead():
    start = time.time()
    delta, epsilon = 8e-3, 1e-5
    total = converged = 0
    reports = []
    worst_ratio = 0.0
    for inst_seed in (11, 23, 37, 41, 53):
        inst, _, _, _, _ = _portfolio_instance(20, 40, seed=inst_seed)
        config = IpmConfig(epsilon=epsilon, full_diagnostics=False)
        classical = run(inst, config)
        assert classical.converged
        for noise_seed in range(40):
            total += 1
            report = run_quantum(inst, config,
                                 NoiseModel(delta=delta, seed=noise_seed))
            if report.converged:
                converged += 1
                reports.append(report)
                worst_ratio = max(worst_ratio,
                                  report.iterations / classical.iterations)
    alpha = measured_alpha(reports)
    elapsed = time.time() - start
    ok = (0.0 < alpha <= CHI and worst_ratio <= 3.0
          and converged >= 0.85 * total)
    _verdict(6, ok,
             f"{converged}/{total} noisy 20-asset runs converged; "
             f"measured alpha {alpha:.6f} in (0, {CHI}]; worst "
             f"iteration overhead {worst_ratio:.3f}x (limit 3x); "
             f"{elapsed:.1f}s")


def test_criterion_7_zeta_at_least_one_across_suite(adaptive_suite):
    rows = adaptive_suite.succeeded
    assert rows, "suite produced no converged trials"
    min_zeta = min(row.zeta_min for row in rows)
    max_zeta = max(row.zeta_max for row in rows)
    per_iter_min = min(d.zeta for d in adaptive_suite.first_run.rows)
    ok = min_zeta >= 1.0 - 1e-12 and per_iter_min >= 1.0 - 1e-12
    _verdict(7, ok,
             f"zeta >= 1 on every tracked Newton matrix across "
             f"{len(rows)} suite trials (min {min_zeta:.4f}); "
             f"max zeta {max_zeta:.4f}")


def test_criterion_8_power_law_pipeline(adaptive_suite):
    exact_x = np.array([1.0, 2.0, 4.0, 8.0, 16.0])
    exact = fit_power_law(np.column_stack([exact_x,
                                           2.0 * exact_x ** 1.5]))
    exact_ok = abs(exact.b - 1.5) <= 1e-8 and abs(exact.a - 2.0) <= 1e-8

    noisy_ok = True
    recovered = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        x = np.logspace(1, 3, 40)
        y = 3.0 * x ** 2.4 * np.exp(0.05 * rng.standard_normal(40))
        fit = fit_power_law(np.column_stack([x, y]))
        recovered.append(fit.b)
        noisy_ok = noisy_ok and abs(fit.b - 2.4) <= 0.2

    cost_points = trim_top_cost(
        [(row.n, row.cost) for row in adaptive_suite.succeeded
         if row.cost is not None])
    cost_fit = fit_power_law(cost_points)
    cost_ok = (len(cost_points) >= 30 and math.isfinite(cost_fit.b)
               and 1.5 < cost_fit.b < 3.5)

    ok = exact_ok and noisy_ok and cost_ok
    _verdict(8, ok,
             f"exact exponent error {abs(exact.b - 1.5):.1e} (limit 1e-8); "
             f"noisy exponent in [{min(recovered):.3f}, "
             f"{max(recovered):.3f}] over 20 seeds (target 2.4+-0.2); "
             f"suite cost exponent {cost_fit.b:.3f} on "
             f"{len(cost_points)} trials (corridor (1.5, 3.5))")


def test_criterion_9_adaptive_mode_keeps_iterates_interior(adaptive_suite):
    # the solver raises (and the suite flags) the moment any iterate
    # leaves the cone interior, so converged statuses certify that every
    # iterate of every trial stayed strictly interior
    bad_status = [row.status for row in adaptive_suite.rows
                  if row.status != "converged"]

    final_eigs = []
    for seed in (1, 2, 3):
        inst, _, _, _, _ = _portfolio_instance(8, 21, seed=seed)
        report = run_quantum(
            inst, IpmConfig(epsilon=1e-3, full_diagnostics=False),
            NoiseModel(delta=0.0, mode="adaptive", seed=seed))
        assert report.converged
        structure = inst.structure
        final_eigs.append(min(
            min_eigenvalue(BlockVector(structure, report.x)),
            min_eigenvalue(BlockVector(structure, report.s))))

    ok = not bad_status and min(final_eigs) > 0.0
    _verdict(9, ok,
             f"no interiority losses in {len(adaptive_suite.rows)} "
             f"adaptive trials (statuses clean={not bad_status}); "
             f"final min eigenvalue over direct runs "
             f"{min(final_eigs):.2e} > 0")
