#![forbid(unsafe_code)]

//! Critical sets in Latin squares: randomized construction of uniquely
//! completable sets, minimization to critical sets, exact enumeration of
//! partial Latin squares, exact permanents with a Brégman-type bound, and
//! numerical evaluators for the associated size bounds.

pub mod bounds;
pub mod census;
pub mod completion;
pub mod construct;
pub mod model;
pub mod permanent;

pub use crate::bounds::{
    binomial_big, density_inequality_gap, exact_log_binomial, expected_uc_size, factorial_big,
    latin_count_log_lower, lcs_lower_bound, log_binomial_upper, log_factorial, log_gamma,
    log_of_biguint, scs_upper_bound, shape_count_bound, size_count_bound, solve_lower_bound,
    stirling_log_factorial_bounds, BoundReport, BoundsError, Comparison, LowerBoundSolution,
    NamedValue, GAP_TOL, SLACK_TOL,
};
pub use crate::census::{
    census_table, count_latin_squares, count_pls_by_size, count_pls_of_shape, enumerate_shapes,
    CensusError, CensusTable, Shapes, DEFAULT_NODE_BUDGET,
};
pub use crate::completion::{
    candidates, count_completions, forced_symbol, forcing_closure, is_uniquely_completable,
    CandidateGrid, Closure, CompletionCount, CompletionError, SymbolSet,
};
pub use crate::construct::{
    birth_time_construct, birth_time_construct_with, cyclic_latin_square, minimize_to_critical,
    random_birth_order, random_latin_square, removal_order_latest_born, removal_order_shuffled,
    replay_certifies, sample_uc_sizes, scs_exhaustive, BirthOrder, ConstructError, ForcingBase,
    ScsResult, TrialStats,
};
pub use crate::model::{Entry, LatinSquare, ModelError, PartialLatinSquare, Shape, MAX_ORDER};
pub use crate::permanent::{
    bregman_rect_bound, permanent_exact, permanent_naive, BinaryMatrix, PermanentError,
};
