//! Multi-agent gradient learning with shrinking policy prediction.
//!
//! Strategies live in the reduced simplex: a player with `n` actions is
//! represented by the probabilities of the first `n - 1` actions. Gradients
//! follow the same convention, `g[i] = value(i) - value(n - 1)`.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`.

pub mod analysis;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod geometry;
pub mod learners;
pub mod scalar;

pub use analysis::{analyze, DynamicsCase, EigenCoords, Prediction};
pub use equilibrium::{
    enumerate_ne, exploitability, projected_gradient_test, pure_equilibria, NashPoint, NeCertificate,
};
pub use error::{Error, Result};
pub use game::{BimatrixGame, ClassTag, GameClass, NormalFormGame, TensorGame};
pub use geometry::{ReducedStrategy, SimplexSet};
pub use learners::{
    run, run_nplayer, simulate, step, validate_conditions, Algorithm, ConditionReport, LearnerConfig, LearnerState,
    RunOptions, RunSummary, StepOutcome, StepSizes, Trajectory, TrajectoryRecord,
};
pub use scalar::Scalar;

pub type Game = BimatrixGame<f64>;
pub type Tensor = TensorGame<f64>;
pub type Strategy = ReducedStrategy<f64>;
pub type Config = LearnerConfig<f64>;
pub type State = LearnerState<f64>;
pub type Record = TrajectoryRecord<f64>;
pub type Dynamics = analysis::Dynamics2x2<f64>;
