//! Principal sequence of partitions (PSP) of a submodular function, in
//! exact rational arithmetic.
//!
//! The parametric algorithm ([`psp::par`]) is the primary engine. The
//! decomposition algorithm, a brute-force sweep, the distributed pipeline
//! ([`distributed`]) and the Kolmogorov-style recursion ([`kolmogorov`])
//! compute the same object independently.

pub mod affine;
pub mod cluster;
pub mod error;
pub mod fixtures;
pub mod oracle;
pub mod partition;
pub mod rational;
pub mod segmented;
pub mod set;
pub mod sfm;
pub mod dilworth;
pub mod distributed;
pub mod kolmogorov;
pub mod psp;
pub mod rates;

pub use affine::{least_root, solve_affine, AffineFn};
pub use error::{PspError, Result};
pub use oracle::Oracle;
pub use partition::{decompose, enumerate_partitions, refines, Partition};
pub use rates::SegmentedRateVector;
pub use rational::Rational;
pub use segmented::{Closure, Interval, Segmented};
pub use set::{GroundSet, Set};
