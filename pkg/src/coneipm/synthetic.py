"""Synthetic correlated price histories for offline experiments.

Geometric-Brownian-style daily prices with a one-factor correlation
structure: each asset's log return mixes a common market shock with an
idiosyncratic one, so any average pairwise correlation in [0, 1) can be
dialed in.  Output is either a price table ready for ``ingest_csv`` or
a ``ReturnsDataset`` directly.
"""

from __future__ import annotations

import csv

import numpy as np

from .portfolio import ReturnsDataset

TRADING_DAYS = 252.0


def generate_prices(n_assets: int, n_days: int, seed: int = 0,
                    correlation: float = 0.3,
                    drift_range: tuple[float, float] = (0.02, 0.12),
                    vol_range: tuple[float, float] = (0.1, 0.4),
                    start_price: float = 100.0):
    """Simulate daily prices; returns (assets, dates, prices).

    ``drift_range`` and ``vol_range`` are annualized and sampled
    uniformly per asset; ``correlation`` is the shared-factor loading
    rho, giving corr(log r_i, log r_j) = rho for i != j.
    """
    if n_assets < 1 or n_days < 2:
        raise ValueError("need at least 1 asset and 2 days")
    if not 0.0 <= correlation < 1.0:
        raise ValueError("correlation must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    dt = 1.0 / TRADING_DAYS
    drift = rng.uniform(*drift_range, size=n_assets)
    vol = rng.uniform(*vol_range, size=n_assets)

    common = rng.standard_normal((n_days - 1, 1))
    own = rng.standard_normal((n_days - 1, n_assets))
    shocks = np.sqrt(correlation) * common + np.sqrt(1 - correlation) * own

    log_steps = (drift - 0.5 * vol ** 2) * dt + vol * np.sqrt(dt) * shocks
    log_prices = np.vstack([np.zeros(n_assets), np.cumsum(log_steps, axis=0)])
    prices = start_price * np.exp(log_prices)

    assets = [f"A{i:03d}" for i in range(n_assets)]
    dates = [f"day{t:04d}" for t in range(n_days)]
    return assets, dates, prices


def write_price_csv(path, assets, dates, prices) -> None:
    """Write prices in the ingestion layout (date column + asset columns)."""
    prices = np.asarray(prices, dtype=float)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["date", *assets])
        for date, row in zip(dates, prices):
            writer.writerow([date, *(f"{p:.10g}" for p in row)])


def synthetic_dataset(n_assets: int, n_days: int, seed: int = 0,
                      correlation: float = 0.3, **kwargs) -> ReturnsDataset:
    """Prices to returns without the CSV round trip."""
    assets, dates, prices = generate_prices(
        n_assets, n_days, seed=seed, correlation=correlation, **kwargs)
    returns = prices[1:] / prices[:-1] - 1.0
    return ReturnsDataset(assets=assets, epochs=dates[1:], returns=returns)
