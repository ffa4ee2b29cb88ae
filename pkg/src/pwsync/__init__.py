"""Certified synchronization bounds for networks of coupled
piecewise-smooth systems.

The package splits into five layers: ``graph`` (weighted topologies and
algebraic connectivity), ``dynamics`` (per-node vector fields split into
a smooth part and a bounded remainder), ``certify`` (one-sided
sector/metric certificates, coupling thresholds, residual error
bounds), ``sim`` (fixed-step integration, error diagnostics, gain
sweeps, CSV output) and ``cli`` (the ``pwsync`` command).
"""

from .certify import (
    BoundReport,
    CertifyError,
    ChuaCertFamily,
    CouplingSpec,
    Hypothesis,
    IdentityEnsemble,
    PointFamily,
    QuadCertificate,
    QuadCheck,
    QuadWitness,
    certify_upsilon,
    check_quad_sampled,
    chua_quad_family,
    linear_common_bounds,
    linear_common_ctilde,
    linear_common_epsbar,
    linear_full_coupling_bounds,
    linear_hetero_bounds,
    nonlinear_common_bounds,
    nonlinear_hetero_bounds,
    pws_coupling,
    quad_linear_cert,
)
from .dynamics import (
    AffineDecomposedField,
    ChuaParams,
    IkedaParams,
    KuramotoParams,
    RelayParams,
    chua_field,
    eval_stack,
    hard_sgn,
    ikeda_field,
    kuramoto_error_field,
    relay_field,
    saturated_sgn,
)
from .graph import (
    GraphError,
    Laplacian,
    Topology,
    build_laplacian,
    complete_topology,
    is_connected,
    lambda2,
    lambda2_kron_diag,
    load_edge_list,
    random_connected,
    ring_topology,
    topology_from_edges,
)
from .linalg import jacobi_eigenvalues, spectral_norm, symmetric_part
from .scenarios import (
    BUILTINS,
    ConfigError,
    Scenario,
    chua10,
    contraction3,
    ikeda10_linear,
    ikeda10_nonlinear,
    kuramoto4,
    load_scenario,
    relay5,
)
from .sim import (
    ErrorSeries,
    SimConfig,
    SimError,
    Trajectory,
    error_series,
    integrate,
    steady_state_eps,
    sweep_coupling,
    write_error_csv,
    write_sweep_csv,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AffineDecomposedField",
    "BoundReport",
    "BUILTINS",
    "CertifyError",
    "ChuaCertFamily",
    "ChuaParams",
    "ConfigError",
    "CouplingSpec",
    "ErrorSeries",
    "GraphError",
    "Hypothesis",
    "IdentityEnsemble",
    "IkedaParams",
    "KuramotoParams",
    "Laplacian",
    "PointFamily",
    "QuadCertificate",
    "QuadCheck",
    "QuadWitness",
    "RelayParams",
    "Scenario",
    "SimConfig",
    "SimError",
    "Topology",
    "Trajectory",
    "build_laplacian",
    "certify_upsilon",
    "check_quad_sampled",
    "chua10",
    "chua_field",
    "chua_quad_family",
    "complete_topology",
    "contraction3",
    "error_series",
    "eval_stack",
    "hard_sgn",
    "ikeda10_linear",
    "ikeda10_nonlinear",
    "ikeda_field",
    "integrate",
    "is_connected",
    "jacobi_eigenvalues",
    "kuramoto4",
    "kuramoto_error_field",
    "lambda2",
    "lambda2_kron_diag",
    "linear_common_bounds",
    "linear_common_ctilde",
    "linear_common_epsbar",
    "linear_full_coupling_bounds",
    "linear_hetero_bounds",
    "load_edge_list",
    "load_scenario",
    "nonlinear_common_bounds",
    "nonlinear_hetero_bounds",
    "pws_coupling",
    "quad_linear_cert",
    "random_connected",
    "relay5",
    "relay_field",
    "ring_topology",
    "saturated_sgn",
    "spectral_norm",
    "steady_state_eps",
    "sweep_coupling",
    "symmetric_part",
    "topology_from_edges",
    "write_error_csv",
    "write_sweep_csv",
    "write_trajectory_csv",
    "__version__",
]
