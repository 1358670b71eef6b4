//! Shape-constrained least squares under heavy-tailed, heteroscedastic noise: estimators,
//! local envelopes, rate and tail predictions, and Monte Carlo checks of those predictions.

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod class;
pub mod design;
pub mod envelope;
pub mod error;
pub mod experiment;
pub mod fitted;
pub mod maxineq;
pub mod noise;
pub mod norms;
pub mod quad;
pub mod rates;
pub mod rng;
pub mod sample;
pub mod solvers;
pub mod stats;
pub mod truth;

pub use class::{ClassKind, ShapeClass};
pub use design::{Density, Design, DesignKind};
pub use error::{Error, Result};
pub use fitted::{Extension, FittedFn};
pub use noise::{NoiseLaw, NoiseSpec, SigmaFn};
pub use norms::{empirical_l2_distance, population_l2_distance, L2Method, L2Norm};
pub use sample::Sample;
pub use truth::{Evaluable, FnRef, Truth};
