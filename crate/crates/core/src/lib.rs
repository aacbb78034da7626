//! Restricted Boltzmann machines over binary data in three flavours: the
//! standard RBM, the ordered RBM whose hidden units are selected left to
//! right through a random cutoff `z`, and the infinite RBM whose hidden
//! layer grows during training.
//!
//! The crate covers exact free energies, Gibbs sampling, (persistent)
//! contrastive divergence with ADAGRAD and L1/L2 regularization, and
//! partition-function estimation by enumeration or annealed importance
//! sampling.

// `!(x > y)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checkpoint;
pub mod data_io;
pub mod energy;
pub mod error;
pub mod evaluation;
pub mod gradients;
pub mod model;
pub mod numeric;
pub mod rng;
pub mod sampling;
pub mod training;

pub use error::{Error, Result};
pub use model::{init_model, HiddenState, ModelParams, Variant};
pub use numeric::Matrix;
pub use rng::RngStream;
