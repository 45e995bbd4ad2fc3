//! Exact finite-field Fourier transforms on paraspherical spaces.
//!
//! Values live in Q(ζ_p) and are compared exactly. Each case module builds its
//! model space as an [`IndexedSet`], its transform as a [`KernelOperator`] or a
//! direct sum, and the [`verify`] module turns the identities between them into
//! checks with a JSON report.

pub mod characters;
pub mod error;
pub mod field;
pub mod functions;
mod lattice;
pub mod matrix;
pub mod mirabolic;
pub mod quadric;
pub mod sampling;
pub mod scalars;
pub mod sl2;
pub mod sl3;
pub mod sp4;
pub mod verify;

pub use characters::CharacterContext;
pub use error::{Error, Result};
pub use field::{FieldElement, FieldSpec};
pub use functions::{
    compose, group_averaging_projector, operators_equal_on, CompositionMode, FunctionOnSet, IndexedSet, Kernel,
    KernelOperator,
};
pub use matrix::RectMatrix;
pub use quadric::{QuadricPoint, QuadricSet, Stratum};
pub use scalars::{CyclotomicNumber, Rational};

/// How operator application distributes work over output points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled.
    #[default]
    Parallel,
}

pub(crate) fn map_indices<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
