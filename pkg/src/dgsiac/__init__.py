"""High-order discontinuous Galerkin solver with adaptive SIAC-style
delta-kernel shock filtering for 2D hyperbolic conservation laws.

Subpackages and modules:
    refelem      Legendre-Gauss-Lobatto nodes, weights, differentiation.
    kernel       Polynomial delta-kernel construction and evaluation.
    mesh         Uniform Cartesian element meshes.
    bcs          Boundary-condition types.
    physics      Euler and ideal-MHD systems with admissibility guards.
    backends     Compiled/pure-python flux kernel selection.
    solver       DG spatial operator and low-storage Runge-Kutta stepping.
    siacfilter   Multi-element filter matrices, indicator, convex blending.
    cases        Bundled benchmark problems.
    diagnostics  Error norms, conservation measures, convergence tables.
    config       TOML run configuration.
    driver       Time-loop orchestration.
    output       VTK snapshots and CSV slices.
    cli          Command-line entry point.
"""

from .backends import BACKEND_NAME
from .bcs import (BoundaryConditionError, BoundarySet, Dirichlet, Outflow,
                  Periodic, Reflecting, SwitchedBC, outflow_box,
                  periodic_box, piecewise_dirichlet)
from .cases import CASE_BUILDERS, CaseError, TestCase, get_case
from .config import (ConfigError, FilterConfig, OutputConfig, RunConfig,
                     config_from_dict, load_config)
from .diagnostics import (DiagnosticsError, ErrorReport, conservation_error,
                          eoc_table, eoc_values, linf_error, linf_errors)
from .driver import RunResult, run
from .kernel import (DeltaKernel, DeltaKernelError, build_kernel, delta_eval,
                     support_width)
from .mesh import CartesianMesh, MeshError
from .physics import AdmissibilityError, Euler2D, IdealMHD2D, make_system
from .refelem import (ReferenceElement, ReferenceElementError,
                      lgl_nodes_weights)
from .siacfilter import (AdaptiveFilterSettings, FilterError,
                         MultiElementFilter, blend, blend_parameter,
                         build_multi_element_matrices, filter_field_2d,
                         indicator_field, normalized_threshold_check,
                         shock_indicator)
from .solver import DGOperator, SolutionField, SolverError, cfl_timestep, rk_step

__version__ = "0.1.0"

__all__ = [
    "AdaptiveFilterSettings", "AdmissibilityError", "BACKEND_NAME",
    "BoundaryConditionError", "BoundarySet", "CartesianMesh", "CaseError",
    "CASE_BUILDERS", "ConfigError", "DeltaKernel", "DeltaKernelError",
    "DGOperator", "DiagnosticsError", "Dirichlet", "ErrorReport",
    "Euler2D", "FilterConfig", "FilterError", "IdealMHD2D", "MeshError",
    "MultiElementFilter", "OutputConfig", "Outflow", "Periodic",
    "ReferenceElement", "ReferenceElementError", "Reflecting", "RunConfig",
    "RunResult", "SolutionField", "SolverError", "SwitchedBC", "TestCase",
    "blend", "blend_parameter", "build_kernel",
    "build_multi_element_matrices", "cfl_timestep", "config_from_dict",
    "conservation_error", "delta_eval", "eoc_table", "eoc_values",
    "filter_field_2d", "get_case", "indicator_field", "linf_error",
    "linf_errors", "lgl_nodes_weights", "load_config", "make_system",
    "normalized_threshold_check", "outflow_box", "periodic_box",
    "piecewise_dirichlet", "rk_step", "run", "shock_indicator",
    "support_width", "__version__",
]
