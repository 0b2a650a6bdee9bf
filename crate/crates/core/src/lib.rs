//! Exact computation of Fourier coefficients of Jacobi cusp forms from
//! cuspidal modular symbols.

pub mod arith;
pub mod error;
pub mod jacobi;
pub mod lift;
pub mod modsym;
pub mod poly;
pub mod qf;

pub use arith::Rat;
pub use jacobi::{
    batch_table, coefficient, coefficient_any_pair, coefficient_raw, find_pairs, AdmissiblePair,
    CoefficientTable, Provenance,
};
pub use error::{Error, ParseErrorKind, Result};
pub use lift::{eigen_consistency, shimura_lift, QExpansion, Report};
pub use modsym::{Cusp, Epsilon, ModularSymbol, Term};
pub use poly::{bracket, HomPoly, Mat2};
pub use qf::{BinaryQF, SupportQuery};
