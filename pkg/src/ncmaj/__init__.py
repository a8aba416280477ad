"""Matrix-valued Boolean analysis: noncommutative polynomials, random matrix
ensembles, moment majorization experiments and Grothendieck-type optimizers."""
from .ensembles import EnsembleSpec, check_moment_bound, haar_block_damping_check
from .errors import EnumerationLimitError, InvalidInputError, UnsupportedInputError
from .estimators import (
    chop_distance_mc,
    embedded_second_moment_exact,
    noise_stability_exact,
    opnorm_cdf,
    psi_trace_mc,
    trace_moment_boolean_exact,
    trace_moment_mc,
)
from .fourier import CubeFunction, dictator, fourier_transform, inverse_transform
from .lab import REGISTRY, ExperimentReport, run
from .linalg import Tensor4
from .montecarlo import MCEstimate, RngStream
from .ncgi import (
    PsdBlockInstance,
    build_psd_tensor,
    ctau_search,
    estimate_Kd,
    obj_dict_test,
    opt_symmetric_ascent,
    opt_unitary_ascent,
    psd_variant_solve,
    round_relaxation,
)
from .ncpoly import NCPoly, embed, evaluate
from .testfns import ScalarTestFn

__all__ = [
    "CubeFunction", "EnsembleSpec", "EnumerationLimitError", "ExperimentReport", "InvalidInputError",
    "MCEstimate", "NCPoly", "PsdBlockInstance", "REGISTRY", "RngStream", "ScalarTestFn", "Tensor4",
    "UnsupportedInputError", "build_psd_tensor", "check_moment_bound", "chop_distance_mc", "ctau_search",
    "dictator", "embed", "embedded_second_moment_exact", "estimate_Kd", "evaluate", "fourier_transform",
    "haar_block_damping_check", "inverse_transform", "noise_stability_exact", "obj_dict_test", "opnorm_cdf",
    "opt_symmetric_ascent", "opt_unitary_ascent", "psd_variant_solve", "psi_trace_mc", "round_relaxation",
    "run", "trace_moment_boolean_exact", "trace_moment_mc",
]
