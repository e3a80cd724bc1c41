//! Randomized dimensionality reduction for Euclidean facility location and
//! single-linkage (minimum spanning tree) clustering.
//!
//! The library projects a point set through a dense Gaussian map, solves the
//! clustering problem in the reduced dimension, and evaluates the solution
//! pulled back to the original space. It ships exact small-instance oracles
//! (subset enumeration for facility location, labeled-tree enumeration for
//! MST), structured instance generators with known optima, a greedy doubling
//! constant estimator, and a seeded experiment harness producing
//! digest-stamped JSON/CSV reports.

pub mod error;
pub mod experiment;
pub mod facility;
pub mod geometry;
pub mod instances;
pub mod mst;
pub mod projection;

pub use error::{Error, Result};
pub use experiment::{
    deterministic_digest, facility_budget_config, run_counterexample_demo,
    run_doubling_comparison, run_ratio_sweep, CounterexampleKind, DoublingComparisonReport,
    ExperimentConfig, ExperimentReport, Task,
};
pub use facility::{
    brute_force_optimum, compute_radii, evaluate_cost, improve_if_violated, is_locally_optimal,
    mp_solve, radii_cost_estimate, FLConfig, FacilitySolution, OpeningCost, RadiusProfile, Variant,
};
pub use geometry::{
    closest_pair, diameter, doubling_constant_estimate, DoublingEstimate, PointSet,
};
pub use instances::{GeneratorKind, InstanceSpec};
pub use mst::{brute_force_mst, mst_exact, pullback_ratio, tree_cost_in, SpanningTree};
pub use projection::{apply, sample_projection, GaussianProjection, GAUSSIAN_PIPELINE_VERSION};
