//! Dimension walks for Schoenberg coefficients of isotropic positive definite
//! functions on spheres.
//!
//! The crate converts Fourier-cosine (`d = 1`) and Legendre (`d = 2`)
//! expansion coefficients into the Gegenbauer coefficients of dimension
//! `2k + 1` and `2k + 2`, both through closed-form weight rows and through the
//! two-step recursions they are built from, and checks the results with exact
//! rational arithmetic.
//!
//! Modules:
//!
//! * [`exactnum`]: rationals, half-integers and the combinatorial functions the
//!   weight formulas are made of.
//! * [`weights`]: closed-form walk weights for odd and even targets.
//! * [`walk`]: coefficient sequences and the recursive / closed-form walks.
//! * [`series`]: Gegenbauer series evaluation, coefficient extraction by
//!   quadrature, membership reports and the Gram matrix check.
//! * [`models`]: concrete coefficient families and the fractal index
//!   diagnostic.
//! * [`seqfile`] and [`cli`]: the JSON file format and the command-line
//!   surface.

pub mod cli;
pub mod error;
pub mod exactnum;
pub mod models;
pub mod seqfile;
pub mod series;
pub mod walk;
pub mod weights;

pub use error::{Error, Result};
pub use exactnum::{HalfInteger, Rational};
pub use walk::{CoeffSeq, Values};
pub use weights::{Parity, WalkWeights};
