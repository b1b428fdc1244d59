//! Spectral analysis of the Hardy kernel matrices
//! `K_alpha = ((nm)^{alpha - 1/2} / max(n, m)^{2 alpha})` and of the Jacobi
//! matrices `J_alpha` that invert them.

pub mod alpha;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod jacobi;
pub mod kernel;
pub mod linalg;
pub mod rkt;
pub mod special;
pub mod spectrum;

pub use alpha::Alpha;
pub use error::{Error, Result};
