"""Littlewood-Paley blocks, Besov norms and lacunary shear flows on the torus."""

from .errors import (
    BesovLabError,
    CFLWarning,
    DomainError,
    MalformedCoefficientsError,
    PartitionRangeError,
    QuadratureError,
    ResolutionError,
    SolverBlowUpError,
    UsageError,
    WrongEquationError,
)
from .experiments import (
    GapRecord,
    SequenceParams,
    residual_certificates,
    seq_params,
    summarize,
    sweep,
    thm1_gap,
    thm2_ratio,
    thm3_gap,
    thm4_gap,
)
from .flows import block_modulation, euler_residual, euler_traveling_wave, ns_damped_wave, ns_residual
from .lacunary import LacunaryProfile, ShearFlowState, build_profile, shear_initial_data
from .littlewood_paley import (
    BesovIndex,
    DyadicPartition,
    besov_block_norms,
    besov_norm_scalar,
    besov_norm_shear,
    build_partition,
    c0,
    dyadic_block,
    lp_norm,
)
from .pde_solvers import SolverConfig2D, VorticityState2D, ns2d_solve, solve_advection_diffusion_1d
from .spectral_core import (
    Field1D,
    Grid1D,
    SpectralCoeffs,
    TrigPolynomial,
    dft_forward,
    dft_inverse,
    differentiate,
    heat_damp,
    sample,
    translate,
)

__version__ = "0.1.0"

__all__ = [
    "BesovLabError",
    "CFLWarning",
    "DomainError",
    "MalformedCoefficientsError",
    "PartitionRangeError",
    "QuadratureError",
    "ResolutionError",
    "SolverBlowUpError",
    "UsageError",
    "WrongEquationError",
    "GapRecord",
    "SequenceParams",
    "residual_certificates",
    "seq_params",
    "summarize",
    "sweep",
    "thm1_gap",
    "thm2_ratio",
    "thm3_gap",
    "thm4_gap",
    "BesovIndex",
    "DyadicPartition",
    "besov_block_norms",
    "besov_norm_scalar",
    "besov_norm_shear",
    "build_partition",
    "c0",
    "dyadic_block",
    "lp_norm",
    "Field1D",
    "Grid1D",
    "SpectralCoeffs",
    "TrigPolynomial",
    "dft_forward",
    "dft_inverse",
    "differentiate",
    "heat_damp",
    "sample",
    "translate",
    "block_modulation",
    "euler_residual",
    "euler_traveling_wave",
    "ns_damped_wave",
    "ns_residual",
    "LacunaryProfile",
    "ShearFlowState",
    "build_profile",
    "shear_initial_data",
    "SolverConfig2D",
    "VorticityState2D",
    "ns2d_solve",
    "solve_advection_diffusion_1d",
    "__version__",
]
