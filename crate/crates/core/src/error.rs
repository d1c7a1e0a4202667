use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operator is not divisible by ħ")]
    NotDivisible,
    #[error("ħ must be specialized to a rational before applying an operator")]
    UnspecializedHbar,
    #[error("index out of range: {index} not in 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("indices must be distinct: {0:?}")]
    RepeatedIndex(Vec<usize>),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no nontrivial linear relation among Q_ij, H and 1")]
    NoRelation,
    #[error("linear relation is not unique up to scale (null space dimension {0})")]
    RelationNotUnique(usize),
    #[error("symbol map undefined: term with ħ-order {hbar} below derivative order {order}")]
    NotSemiclassical { hbar: u32, order: u32 },
    #[error("eigensolver did not converge: {0}")]
    NonConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
