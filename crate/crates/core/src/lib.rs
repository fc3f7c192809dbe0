//! Finite-population survey-sampling estimators and their first-order theory.
//!
//! The crate covers the classical ratio, product and exponential estimator
//! families for a population mean (using a continuous auxiliary variable or a
//! binary auxiliary attribute, in single-phase and two-phase SRSWOR designs)
//! and for a population variance (using auxiliary kurtosis information).
//! For every family it provides:
//!
//! - point evaluation on sample statistics ([`mean`], [`variance`]),
//! - first-order (`O(n⁻¹)`) bias and mean-squared-error formulas, optimum
//!   constants, bias-annihilating weight systems and efficiency conditions
//!   ([`theory`]),
//! - empirical verification by seeded Monte Carlo replication and by exact
//!   enumeration of all `C(N, n)` samples ([`montecarlo`]),
//! - a registry of published percent-relative-efficiency tables with
//!   recomputed values and explicit discrepancy markers ([`tables`]).
//!
//! Populations are plain in-memory vectors ([`population::Population`]); all
//! estimator and theory evaluations are pure functions of immutable inputs
//! and are safe to call from multiple threads.

pub mod error;
pub mod mean;
pub mod montecarlo;
pub mod population;
pub mod sampling;
pub mod synthesis;
pub mod tables;
pub mod theory;
pub mod variance;

pub use error::EstimateError;
pub use population::{DesignConstants, Population, PopulationSummary};
pub use sampling::{Sample, SampleStats, TwoPhaseSample, TwoPhaseStats};
