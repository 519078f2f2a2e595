//! Single-letter regions of the cascade, triangular, two-way and helper
//! networks for finite alphabets.

pub mod eval;
pub mod io;
pub mod model;
pub mod oracle;
pub mod search;

pub use eval::{
    eval_cascade_point, eval_helper_triangular_point, eval_point, eval_triangular_point,
    eval_two_way_cascade_point, eval_two_way_triangular_point, FACTORIZATION_TOL,
};
pub use io::{read_aux, read_source, write_aux, write_source};
pub use model::{
    cardinality_budget, AuxiliarySystem, CardinalityBudget, DistortionTable, Network, RegionPoint,
    SourceSpec, MARKOV_TOL,
};
pub use oracle::{brute_force_region_oracle, frontier_min_r1, lipschitz_slack};
pub use search::{min_r1_cascade_search, SearchOptions, SearchOutcome, StartKind};
