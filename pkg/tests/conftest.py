from __future__ import annotations

import pytest

from coneipm import ExperimentSpec, run_suite


@pytest.fixture(scope="session")
def adaptive_suite():
    """40-trial synthetic suite in adaptive noise mode.

    Shared by the acceptance checks on zeta, the cost-fit corridor and
    iterate interiority; expensive, so it runs once per session.
    """
    spec = ExperimentSpec(
        dataset=None,
        pool_assets=60,
        pool_days=700,
        correlation=0.3,
        n_assets=10,
        window=(10, 80),
        epsilon=1e-3,
        noise={"delta": 0.0, "mode": "adaptive"},
        trials=40,
        seed=2026,
    )
    return run_suite(spec)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance verdict lines even when stdout is captured."""
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "VERDICTS", None) if module else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
