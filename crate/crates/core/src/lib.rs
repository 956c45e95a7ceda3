//! Noncommutative polynomial factorization toolkit.

pub mod arith;
pub mod automaton;
pub mod circuit;
pub mod embed;
pub mod error;
pub mod linmat;
pub mod ncpoly;
pub mod oracle;
pub mod words;

pub use arith::{BigRational, Field, FieldElem, FieldMatrix, RatMatrix};
pub use automaton::{reduce_and_recover, DenseOracle, FactorOracle, SubstAutomaton};
pub use circuit::{Abp, BlackBox, Circuit, MatrixAssignment};
pub use embed::Embedding;
pub use error::{Error, Result};
pub use linmat::{FactorizationCert, LinearMatrix, Quaternion};
pub use ncpoly::{Alphabet, NcPoly, Word};
pub use words::{WordMode, WordSet};
