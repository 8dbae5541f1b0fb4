"""Wehrl moments and geometric entanglement of symmetric multiqubit states.

The package works with pure symmetric states of N qubits in the Dicke
basis, computes their Wehrl moments exactly, and estimates the geometric
measure of entanglement either from the full state (numerical Husimi
maximization) or from a short prefix of the moment sequence (bare ratios,
sequence acceleration, or a trained neural-network regressor).
"""

from .accel import AccelTable, accel_estimate, build_table, e_algorithm, power_ansatz
from .backend import available_backends, backend_name, set_backend
from .dataset import (DatasetRecord, gen_degenerate, gen_ghz_dicke,
                      gen_squeezed, gen_uniform, generate_subsets,
                      ghz_dicke_superposition, read_manifest, read_records,
                      spin_operators, split_dataset, substream,
                      write_manifest, write_records)
from .errors import (ComplexityLimitError, DegenerateDenominatorWarning,
                     DegenerateStateError, EmptyInputError,
                     InsufficientDataError, NearZeroReferenceError,
                     NonGenericStateWarning, SchemaError, ShapeMismatchError,
                     WehrlGmeError)
from .gme import (GmeEstimate, dicke_gme, fibonacci_sphere, gme_reference,
                  husimi_max, max_gme_check)
from .metrics import (EXCLUSION_THRESHOLD, RESOLUTION_THRESHOLD, EvalReport,
                      compare_methods, evaluate_method, fit_inverse_qmax,
                      mre, percentile_bars, relative_difference)
from .mlp import (MlpModel, TrainConfig, forward, init_model, load_model,
                  predict_gme, save_model, train)
from .moments import (MomentSequence, asymptotic_constant, coherent_moment,
                      dicke_moment, gram_matrix, laplace_residuals,
                      moment_bound, moments_dicke, moments_permanent,
                      moments_quadrature, ratio_estimate, sphere_grid)
from .states import (BlochDirection, MajoranaConstellation, SymmetricState,
                     coherent_overlap, coherent_state, dicke_state,
                     fidelity, from_majorana, ghz_state, husimi,
                     husimi_coefficients, rotate_constellation, to_majorana)

__version__ = "0.1.0"

__all__ = [
    "AccelTable", "BlochDirection", "ComplexityLimitError", "DatasetRecord",
    "DegenerateDenominatorWarning", "DegenerateStateError", "EXCLUSION_THRESHOLD",
    "EmptyInputError", "EvalReport", "GmeEstimate", "InsufficientDataError",
    "MajoranaConstellation", "MlpModel", "MomentSequence",
    "NearZeroReferenceError", "NonGenericStateWarning", "RESOLUTION_THRESHOLD",
    "SchemaError", "ShapeMismatchError", "SymmetricState", "TrainConfig",
    "WehrlGmeError",
    "accel_estimate", "asymptotic_constant", "available_backends",
    "backend_name", "build_table", "coherent_moment", "coherent_overlap",
    "coherent_state", "compare_methods", "dicke_gme", "dicke_moment",
    "dicke_state", "e_algorithm", "evaluate_method", "fibonacci_sphere",
    "fidelity", "fit_inverse_qmax", "forward", "from_majorana",
    "gen_degenerate", "gen_ghz_dicke", "gen_squeezed", "gen_uniform",
    "generate_subsets", "ghz_dicke_superposition", "ghz_state",
    "gme_reference", "gram_matrix", "husimi", "husimi_coefficients",
    "husimi_max", "init_model", "laplace_residuals", "load_model",
    "max_gme_check", "moment_bound", "moments_dicke", "moments_permanent",
    "moments_quadrature", "mre", "percentile_bars", "power_ansatz",
    "predict_gme", "ratio_estimate", "read_manifest", "read_records",
    "relative_difference", "rotate_constellation", "save_model",
    "set_backend", "sphere_grid", "spin_operators", "split_dataset",
    "substream", "to_majorana", "train", "write_manifest", "write_records",
]
