//! A verification laboratory for self-normalized deviation inequalities of
//! monotone functions on the Boolean cube, with the k-cycle count of a random
//! graph as the driving application.
//!
//! The crate has three layers:
//!
//! * [`cube`], [`talagrand`], [`minnorm`] — functions on `{0,1}^m`, discrete
//!   derivative norms, Talagrand's convex-hull distance, and exhaustive
//!   verifiers for the deviation inequalities built on them;
//! * [`graph`], [`cycles`] — G(n, p) sampling over a fixed edge indexing,
//!   degree buckets, and k-cycle statistics including the local variance and
//!   the shared-edge injection counts;
//! * [`experiments`] — a seeded, parallel Monte Carlo harness with
//!   schema-stable CSV/JSON exports.
//!
//! Cube-side arithmetic is generic over the scalar type ([`scalar::Scalar`]);
//! integer-coefficient functions evaluate exactly in `i64` while everything
//! probabilistic runs in `f64`. The aliases below pin the two instantiations
//! used throughout.

pub mod bits;
pub mod cube;
pub mod cycles;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod minnorm;
pub mod oracles;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod stats;
pub mod talagrand;

pub use error::{Error, Result};

/// Float-weighted function on the cube.
pub type MultilinearF64 = cube::MultilinearFunction<f64>;
/// Integer-weighted function on the cube (exact arithmetic).
pub type MultilinearI64 = cube::MultilinearFunction<i64>;
/// Dense float table.
pub type TableF64 = cube::FunctionTable<f64>;
/// Dense integer table.
pub type TableI64 = cube::FunctionTable<i64>;

/// Runs `f` on a dedicated rayon pool of `threads` workers, or inline on the
/// global pool when `threads` is `None`. Results never depend on the worker
/// count; this only bounds parallelism.
pub fn run_with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}
