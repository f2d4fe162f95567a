//! L1-regularized approximate linear programming (RALP) for finite MDPs.
//!
//! The crate is organised bottom-up:
//!
//! - [`mdp`]: tabular MDPs, Bellman operators, value iteration, greedy
//!   policies and empirical visitation distributions.
//! - [`room`]: the 25×25 room gridworld in its free and Lyapunov-stable
//!   variants, plus the Manhattan Lyapunov function.
//! - [`features`]: Gaussian RBF + bias dictionaries and feature matrices.
//! - [`lp`]: a dense two-phase simplex solver with constraint generation.
//! - [`ralp`]: assembly and solution of the regularized LP from samples.
//! - [`bounds`]: the `H` operator, Lyapunov contraction factors, weighted
//!   norms, sampling-slack estimates and the approximation-error bound.
//! - [`sampling`]: seeded sample draws and the sampling/objective
//!   equivalence check.
//! - [`experiment`]: the five state-relevance / sampling comparisons on the
//!   room domain, with CSV, heatmap and manifest output.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod features;
pub mod lp;
pub mod mdp;
pub mod ralp;
pub mod room;
pub mod rng;
pub mod sampling;

pub use error::{Error, Result};
pub use features::{FeatureDictionary, FeatureMatrix, Normalization};
pub use lp::{LpProblem, LpSolution, LpStatus};
pub use mdp::{Distribution, Policy, TabularMdp, ValueVector};
pub use ralp::{RalpConfig, Sample, SampleSet, Weights};
pub use room::{LyapunovSpec, RoomDomain, Variant};
