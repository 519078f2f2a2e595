//! Quadratic Gaussian cascade, triangular and two-way networks.

pub mod backward;
pub mod mmse;
pub mod program;
pub mod source;
pub mod transform;

pub use backward::{
    extended_backward_achievability, extended_backward_region_check, q_map, BackwardConstruction,
    BackwardRates, BackwardRegionCheck,
};
pub use mmse::{conditional_covariance, conditional_variance};
pub use program::{
    cascade_min_r1, cascade_r2_threshold, r1_for_alpha, triangular_min_r1, two_way_r4_threshold,
    two_way_triangular_min_r1, CascadeSolution, GaussianQuery, TwoWaySolution,
};
pub use source::{GaussianAux, GaussianCascadeSource};
pub use transform::{noisy_observation_transform, target_covariance, EquivalentSource};
