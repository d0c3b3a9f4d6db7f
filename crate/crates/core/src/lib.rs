//! Quantitative information flow over finite channels.
//!
//! Classical g-vulnerability and leakage, their Kolmogorov–Nagumo
//! generalizations, the α-family (Rényi, Arimoto, Sibson, α-loss), leakage
//! capacities, and numerical harnesses that check the theory at desk scale.
//!
//! All logarithms are natural. Reports may convert to bits.
//!
//! ```
//! use qifkit::{capacity, Channel};
//!
//! let bsc = Channel::binary_symmetric(0.1).unwrap();
//! let ml = capacity::bayes_capacity(&bsc);
//! assert!((ml - 1.8f64.ln()).abs() < 1e-12);
//! ```

pub mod alpha;
pub mod capacity;
pub mod cli;
pub mod error;
pub mod fmean;
pub mod gain;
mod num;
pub mod prob;
pub mod report;
pub mod simplex;
pub mod verify;
pub mod vulnerability;

pub use alpha::{AlphaBranch, AlphaOrder};
pub use capacity::{SimplexOptimizerConfig, SupResult};
pub use error::{QifError, Result};
pub use fmean::{Curvature, Direction, FMean, MeanKind};
pub use gain::{GainMatrix, GainSpec};
pub use prob::{compose, ni_channel, push, Channel, Hyper, Prior};
pub use report::LeakageReport;
pub use verify::VerificationResult;
pub use vulnerability::LeakageKind;

/// Crate version, embedded in report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
