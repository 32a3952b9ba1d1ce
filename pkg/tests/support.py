"""Shared instance builders for the test suite."""

from __future__ import annotations

import numpy as np

from coneipm import (
    BlockVector,
    ConeStructure,
    IpmState,
    PortfolioProblem,
    SocpInstance,
    estimate,
    synthetic_dataset,
    to_socp,
)

import oracles


def random_interior(structure: ConeStructure, rng,
                    lo: float = 0.5, hi: float = 2.0) -> BlockVector:
    """Random vector pushed strictly inside every cone block."""
    values = rng.normal(size=structure.total_dim)
    for i in range(structure.rank):
        sl = structure.block_slice(i)
        bar_norm = float(np.linalg.norm(values[sl][1:]))
        values[sl.start] = bar_norm + rng.uniform(lo, hi)
    return BlockVector(structure, values)


def central_instance(rng, dims, m_rows: int, nu: float = 1.0):
    """Instance plus an exactly central strictly feasible state at gap nu.

    x is random interior; s = nu * x^{-1} shares its Jordan frame, so
    x o s = nu*e exactly and the duality gap is nu.  b and c are chosen to
    make (x, y, s) feasible.
    """
    structure = ConeStructure(tuple(dims))
    x = random_interior(structure, rng)
    s = BlockVector(structure, nu * oracles.jordan_inverse(structure, x.values))
    a = rng.normal(size=(m_rows, structure.total_dim))
    b = a @ x.values
    y = rng.normal(size=m_rows)
    c = s.values + a.T @ y
    inst = SocpInstance(structure, a, b, c)
    return inst, IpmState(x, y, s)


def cold_start_instance(rng, dims, m_rows: int, nu: float = 1.0):
    """Strictly feasible instance scaled so the cold start survives.

    Same construction as central_instance but with data of magnitude
    around one, so x = s = tau*e lands close enough to the central path
    for the full first step to stay interior.  The cold start is a
    documented limitation for badly scaled data, so run() tests use this
    builder.
    """
    structure = ConeStructure(tuple(dims))
    values = 0.2 * rng.normal(size=structure.total_dim)
    for i in range(structure.rank):
        sl = structure.block_slice(i)
        values[sl.start] = float(np.linalg.norm(values[sl][1:])) \
            + rng.uniform(0.8, 1.2)
    x = BlockVector(structure, values)
    s = BlockVector(structure, nu * oracles.jordan_inverse(structure, x.values))
    a = rng.normal(size=(m_rows, structure.total_dim)) \
        / np.sqrt(structure.total_dim)
    b = a @ x.values
    y = 0.05 * rng.normal(size=m_rows)
    c = s.values + a.T @ y
    return SocpInstance(structure, a, b, c), IpmState(x, y, s)


def portfolio_instance(n_assets: int, n_days: int, seed: int,
                       budget: bool = True):
    """Synthetic minimum-risk instance at the always-feasible mean target.

    With the budget row sum(x) = 1 the uniform portfolio meets the target
    mean(mu) exactly, so the instance is strictly feasible.
    """
    ds = synthetic_dataset(n_assets, n_days, seed=seed)
    mu, m_mat, _ = estimate(ds)
    extra_eq = None
    if budget:
        extra_eq = (np.ones((1, n_assets)), np.array([1.0]))
    prob = PortfolioProblem(mu, m_mat, float(mu.mean()), extra_eq=extra_eq)
    inst, smap = to_socp(prob)
    return inst, smap, prob
