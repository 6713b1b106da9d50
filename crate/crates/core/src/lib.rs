//! Numerical toolkit for the resource theory of quantum measurements.
//!
//! A measurement is modelled by its POVM, a finite list of positive semi-definite
//! operators summing to the identity. Classical post-processing by a column-stochastic
//! matrix is the only free operation, which induces a preorder on POVMs:
//! `E >= F` whenever `F_i = sum_j P[i][j] E_j` for some column-stochastic `P`.
//!
//! The crate is organised bottom-up:
//!
//! - [`operator`]: small dense Hermitian matrices, eigendecomposition, tensor products.
//! - [`povm`]: validation, canonical representatives, tensor and reduced measurements.
//! - [`stochastic`]: column-stochastic matrices, split/confuse generators and their
//!   decomposition.
//! - [`order`]: the preorder decided by linear-programming feasibility, plus majorization.
//! - [`monotones`]: four information-gain measures that never increase under post-processing.
//! - [`discrimination`]: Bayesian state-discrimination games and witness search.
//! - [`randgen`]: seeded generators for every object above.
//! - [`io`]: JSON documents and CSV grids used by the command-line tool.

#![forbid(unsafe_code)]

pub mod discrimination;
pub mod error;
pub mod io;
pub mod monotones;
pub mod operator;
pub mod order;
pub mod povm;
pub mod randgen;
pub mod stochastic;
pub mod tolerance;

pub use discrimination::{Ensemble, GameResult, Witness};
pub use error::{Error, Result};
pub use monotones::{MonotoneReport, StatePovmPair};
pub use operator::{HermitianOperator, Spectrum};
pub use order::OrderVerdict;
pub use povm::{CanonicalPovm, Povm};
pub use randgen::RngSeed;
pub use stochastic::{ConfuseSpec, SplitSpec, StochasticMatrix};
pub use tolerance::Tolerances;

pub use num_complex::Complex64;
