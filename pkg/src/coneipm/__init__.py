"""Second-order cone programming over Lorentz-cone products, with an
exact short-step interior-point solver, a simulated noisy variant, a
portfolio front end, and an experiment harness."""

from .bench import (
    ExperimentSpec,
    PowerLawFit,
    SuiteReport,
    emit_plots,
    fit_power_law,
    measured_alpha,
    run_suite,
)
from .classical import (
    InteriorityLost,
    IpmConfig,
    initial_point,
    iteration_bound,
    run,
    sigma_for,
    step,
)
from .diagnostics import IterationDiagnostics, RunReport
from .jordan import (
    BlockVector,
    ConeStructure,
    StructureMismatch,
    arrowhead,
    identity_element,
    in_cone,
    jordan_product,
    jordan_sqrt,
    min_eigenvalue,
    quadratic_rep,
    spectral,
)
from .newton import NewtonSystem, SingularNewtonSystem, condition_number, zeta
from .portfolio import (
    MarkowitzOptimizer,
    PortfolioProblem,
    PortfolioSolution,
    ReturnsDataset,
    estimate,
    extract_solution,
    ingest_csv,
    to_socp,
)
from .quantum import (
    CostEstimate,
    NoiseModel,
    classical_cost,
    cost_estimate,
    quantum_cost,
    required_precision,
    run_quantum,
    simulate_tomography,
)
from .socp import FeasibilityReport, IpmState, SocpInstance, \
    strict_feasibility_check
from .synthetic import generate_prices, synthetic_dataset, write_price_csv

__version__ = "0.1.0"

__all__ = [
    "BlockVector",
    "ConeStructure",
    "CostEstimate",
    "ExperimentSpec",
    "FeasibilityReport",
    "InteriorityLost",
    "IpmConfig",
    "IpmState",
    "IterationDiagnostics",
    "MarkowitzOptimizer",
    "NewtonSystem",
    "NoiseModel",
    "PortfolioProblem",
    "PortfolioSolution",
    "PowerLawFit",
    "ReturnsDataset",
    "RunReport",
    "SingularNewtonSystem",
    "SocpInstance",
    "StructureMismatch",
    "SuiteReport",
    "arrowhead",
    "classical_cost",
    "condition_number",
    "cost_estimate",
    "emit_plots",
    "estimate",
    "extract_solution",
    "fit_power_law",
    "generate_prices",
    "identity_element",
    "in_cone",
    "ingest_csv",
    "initial_point",
    "iteration_bound",
    "jordan_product",
    "jordan_sqrt",
    "measured_alpha",
    "min_eigenvalue",
    "quadratic_rep",
    "quantum_cost",
    "required_precision",
    "run",
    "run_quantum",
    "run_suite",
    "sigma_for",
    "simulate_tomography",
    "spectral",
    "step",
    "strict_feasibility_check",
    "synthetic_dataset",
    "to_socp",
    "write_price_csv",
    "zeta",
]
