//! Exact coefficient arithmetic: Gaussian rationals, Laurent polynomials in π,
//! and finite Fourier series with polynomial fiber dependence.

mod gauss;
mod rat;
mod pi;
mod print;
mod roster;
mod scalar;

pub use gauss::Gq;
pub use pi::PiPolynomial;
pub use roster::{CoordKind, CoordinateRoster, Shape};
pub use scalar::{FourierScalar, Key};

pub(crate) use print::{join_signed, scalar_monomials};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch { left: Shape, right: Shape },
    #[error("scalar depends on fiber coordinates")]
    FiberDependent,
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("duplicate coordinate name `{0}`")]
    DuplicateName(String),
    #[error("invalid coordinate name `{0}`")]
    BadName(String),
    #[error("fiber count {fiber} must be 0 or equal the leaf count {leaf}")]
    FiberCount { leaf: usize, fiber: usize },
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}
