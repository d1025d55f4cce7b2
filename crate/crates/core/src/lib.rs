//! Twin-prime separation statistics.
//!
//! Primes are generated by a segmented sieve and scanned once in order. Each
//! pair of consecutive twin primes is separated by some number of singleton
//! primes; the distribution of those separations is tabulated at checkpoints
//! and fitted with a normalized exponential decay `ln f(s) = -m·s + ln m`.
//! The fitted decay constants are then compared with analytic estimates
//! derived from the prime number theorem and the Hardy–Littlewood twin-prime
//! asymptotic.

pub mod fit;
pub mod model;
pub mod pipeline;
pub mod published;
pub mod scan;
pub mod sieve;
pub mod stats;

pub use fit::{fit_constrained, mean_separation, FitError, FitOptions, SlopeFit, Weighting};
pub use model::{fit_inverse_log, ModelFit, ReferenceEstimates, SlopePoint, C2};
pub use pipeline::{run, CheckpointRow, PipelineError, RunConfig, RunReport};
pub use published::{Pi1Convention, PublishedRow, SLOPE_TABLE};
pub use scan::{
    scan, scan_with_checkpoints, CheckpointSnapshot, CheckpointSpec, ScanError, ScanEvent,
    ScanState, SeparationEvent, TwinPair, TwinScanner,
};
pub use sieve::{base_primes, count_primes, prime_stream, PrimeStream, SieveConfig, SieveError};
pub use stats::{FrequencyTable, SeparationHistogram, StatsError};
