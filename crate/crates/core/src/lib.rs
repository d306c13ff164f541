//! Change-of-measure machinery over finite discrete probability spaces:
//! divergence generators with closed-form conjugates, f-divergence
//! evaluation, Legendre transforms of the divergence operator, a catalog of
//! change-of-measure bounds with optimal scale parameters, and PAC-Bayes
//! certificates with a Monte Carlo coverage harness.

pub mod bounds;
pub mod dist;
pub mod divergence;
pub mod error;
pub mod ext;
pub mod generators;
pub mod legendre;
pub mod optim;

pub use bounds::{eval_bound, eval_bound_for_posterior, hostile_bound, lambda_parametric, optimal_lambda, optimize_free_params, vincze_lecam_refined, BoundResult, BoundSpec, OptimMode, Param, Row};
pub use dist::{FiniteDistribution, MeasurableFunction};
pub use divergence::{divergence_pair_check, f_divergence};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use generators::{conjugate_numeric, Generator};
pub use legendre::{crude_transform, exact_transform, simplex_oracle, tight_transform, OracleMode, TransformReport};
