"""Stochastic proximal solvers for non-smooth non-convex penalties,
with certified rate formulas and a reproducible benchmark harness.
"""

from .datasets import (
    DataError,
    Dataset,
    binarize_labels,
    emit_libsvm,
    normalize_features,
    parse_libsvm,
    synth_classification,
    synth_regression,
    train_test_split,
)
from .estimators import (
    BatchSchedule,
    EpochBoundaryError,
    fixed_batch,
    increasing_batch,
    minibatch_grad,
    recursive_finite_sum,
    recursive_online,
    sarah_anchor,
    sarah_step,
    stage_sizes,
    stagewise_batch,
)
from .experiments import (
    ExperimentSpec,
    SpecError,
    build_problem,
    emit_spec,
    evaluate_quantized,
    load_spec,
    parse_spec,
    run_experiment,
)
from .losses import (
    Objective,
    SmoothLoss,
    build_objective,
    default_tls_alpha,
    estimate_noise_variance,
    estimate_smoothness,
    finite_diff_grad,
    full_gradient,
    full_objective,
    nlls,
    population_grad_variance,
    tls,
)
from .regularizers import (
    Regularizer,
    l0,
    l0_ball,
    l1,
    l_half,
    l_two_thirds,
    penalty_1d,
    project_grid,
    prox_apply,
    prox_oracle_1d,
    quantization,
    reg_value,
)
from .selftest import grad_selftest, prox_selftest
from .rng import make_rng, spawn_rngs
from .solvers import (
    BoundConstants,
    ConfigError,
    RunTrace,
    SolverConfig,
    bound_constants,
    run_heuristic_qsgd,
    run_mb_spg,
    run_pgd,
    run_spgr,
    run_spgr_imb,
    sample_output_index,
    select_output,
    stationarity_residual,
    theoretical_bound,
)

__version__ = "0.1.0"
