"""Checkers for two-sided mean-value (Hermite-Hadamard type) inequalities on
Hermitian matrices: majorization, converse-constant and operator-convex
refinement forms, with an exactly reproduced 2x2 counterexample."""

from .funcat import Interval, ScalarFunction, builtin, from_descriptor, validate_flags
from .harness import InstanceSpec, SuiteReport, random_hermitian, run_suite
from .hhcheck import (
    AlphaResult,
    ChainReport,
    check_bourin_t2,
    check_jensen_map,
    check_norm_chain_corollary,
    check_power_norm_corollary,
    check_refinement_chain,
    check_scalar_hh,
    check_theorem_t1,
    check_theorem_t3,
    check_theorem_t4,
    check_trace_corollary,
    mond_pecaric_alpha,
    reproduce_counterexample,
)
from .matcore import (
    EigenSystem,
    HermitianMatrix,
    NormSpec,
    apply_function,
    eig,
    hermitian_from,
    matrix_from_json,
    matrix_to_json,
    ui_norm,
)
from .orders import (
    MajorizationReport,
    OrderVerdict,
    eigen_dominance,
    ky_fan_dominance_scan,
    loewner_leq,
    top_k_frame_sum,
    unitary_witness,
    weak_majorization,
)
from .plmaps import (
    Compression,
    CongruenceSum,
    DiagBlockSum,
    IdentityMap,
    Pinching,
    PositiveLinearMap,
    apply_map,
    diag_block_map,
    unitality_status,
)
from .segquad import QuadratureSpec, poly_segment_oracle, segment_integral

__version__ = "0.1.0"
