"""Numerical laboratory for the MGT Cauchy-Dirichlet problem.

Two cross-validating solution routes (per-mode Volterra reduction and direct
per-mode ODE integration), boundary-trace diagnostics, and a symbol-level
certification of the uniform Lopatinskii condition for the equivalent
first-order system.
"""

from .cosine import (
    BoundaryProbeResult,
    CosineFamily,
    WaveSolution,
    boundary_convolution_probe,
    cosine_apply,
    kop_apply,
    wave_solve,
)
from .modal_oracle import (
    ModeOde,
    OracleBundle,
    characteristic_roots,
    integrate_mode,
    solve_by_modes,
    stability_threshold_scan,
)
from .reduction import (
    DerivedConstants,
    ForcingData,
    MgtData,
    MgtParams,
    ReducedProblem,
    SolutionBundle,
    build_affine,
    build_kernel,
    derive_constants,
    forcing_transform,
    reduce_problem,
    solve_mgt,
    trace_decomposition,
)
from .spectral import (
    BoundaryData,
    BoundarySignal,
    DomainSpec,
    EigenBasis,
    SpectralField,
    TimeGrid,
    build_basis,
    dirichlet_map,
    normal_trace,
    sobolev_norm,
)
from .symbols import (
    FrequencyPoint,
    SystemSymbol,
    estimate_probe,
    finite_eigenvalues,
    lopatinskii_sweep,
    stable_subspace,
    weighted_norm,
)
from .volterra import (
    PicardResult,
    ScalarKernel,
    VolterraProblem,
    iterated_kernel,
    solve_direct,
    solve_picard,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
