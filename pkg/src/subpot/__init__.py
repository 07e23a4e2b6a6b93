"""Growth characteristics of logarithmic atomic potentials, with a
randomized verification suite for the small-set integral bounds."""

from .characteristics import (
    CharacteristicValue,
    NevanlinnaCharacteristics,
    characteristic_T,
    circle_mean,
    circle_mean_diff,
    circle_mean_nonlinear,
    counting_integral,
    max_on_circle,
    max_on_circles,
    nevanlinna,
    radial_count,
)
from .harness import (
    ALL_CHECKERS,
    PROBE_CHECKERS,
    GenerationError,
    SuiteConfig,
    SuiteResult,
    counterexample,
    generate_instance,
    rng_for,
    rows_to_csv,
    run_check,
    run_suite,
    run_unit,
)
from .inequalities import (
    BoundReport,
    lemma1_check,
    lemma2_check,
    lemma3_check,
    lemma4_check,
    lemma_a_check,
    log_kernel_norm,
    main_lemma_check,
    main_theorem_M,
    main_theorem_T,
    nevanlinna_ratio,
    pjp_identity_check,
    small_intervals_ratio,
)
from .model import (
    AtomicMeasure,
    DegenerateInstanceError,
    DeltaSubharmonicFn,
    RationalFunctionSpec,
    SubharmonicPotential,
    atoms_from_doc,
    atoms_to_doc,
    canonicalize,
    delta_from_doc,
    delta_to_doc,
    evaluate,
    ln_abs,
    potential_from_doc,
    potential_to_doc,
    rational_from_doc,
    rational_to_doc,
)
from .quadrature import DEFAULT_QUAD, QuadratureError, QuadratureSpec, integrate
from .sets import (
    IntervalSet,
    Weight,
    function_lp_norm,
    integrate_weighted,
    lp_norm,
    random_interval_set,
    rearranged_majorant,
    truncate,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_CHECKERS",
    "AtomicMeasure",
    "BoundReport",
    "CharacteristicValue",
    "DEFAULT_QUAD",
    "DegenerateInstanceError",
    "DeltaSubharmonicFn",
    "GenerationError",
    "IntervalSet",
    "NevanlinnaCharacteristics",
    "PROBE_CHECKERS",
    "QuadratureError",
    "QuadratureSpec",
    "RationalFunctionSpec",
    "SubharmonicPotential",
    "SuiteConfig",
    "SuiteResult",
    "Weight",
    "atoms_from_doc",
    "atoms_to_doc",
    "canonicalize",
    "characteristic_T",
    "circle_mean",
    "circle_mean_diff",
    "circle_mean_nonlinear",
    "counterexample",
    "counting_integral",
    "delta_from_doc",
    "delta_to_doc",
    "evaluate",
    "function_lp_norm",
    "generate_instance",
    "integrate",
    "integrate_weighted",
    "lemma1_check",
    "lemma2_check",
    "lemma3_check",
    "lemma4_check",
    "lemma_a_check",
    "ln_abs",
    "log_kernel_norm",
    "lp_norm",
    "main_lemma_check",
    "main_theorem_M",
    "main_theorem_T",
    "max_on_circle",
    "max_on_circles",
    "nevanlinna",
    "nevanlinna_ratio",
    "pjp_identity_check",
    "potential_from_doc",
    "potential_to_doc",
    "radial_count",
    "random_interval_set",
    "rational_from_doc",
    "rational_to_doc",
    "rearranged_majorant",
    "rng_for",
    "rows_to_csv",
    "run_check",
    "run_suite",
    "run_unit",
    "small_intervals_ratio",
    "truncate",
]
