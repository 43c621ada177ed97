//! Exact computations with Maurer-Cartan elements of convolution
//! L∞-algebras: bar and cobar constructions, homotopy transfer, gauge
//! equivalence, Hopf invariants and rational models of mapping spaces.

pub mod bar_cobar;
pub mod coalgebra;
pub mod complex;
pub mod convolution;
pub mod error;
pub mod freelie;
pub mod graded;
pub mod hopf;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod linfty;
pub mod mapping_space;
pub mod mc_gauge;
pub mod operads;
pub mod par;
pub mod perm;
pub mod poly;
pub mod scalar;
pub mod transfer;

pub use error::{Error, Result};
pub use scalar::Q;
