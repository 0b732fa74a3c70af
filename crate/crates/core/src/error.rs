use thiserror::Error;

use crate::params::NodeId;

/// Errors raised by the coding, entropy and secrecy machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("reduction polynomial {poly:#x} is not an irreducible polynomial of degree {m}")]
    ReduciblePolynomial { m: u32, poly: u64 },
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("value {value} is not an element of a field of order {order}")]
    NotAnElement { value: u64, order: u64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular (rank {rank} < {dim})")]
    Singular { rank: usize, dim: usize },
    #[error("duplicate evaluation point at positions {0} and {1}")]
    DuplicatePoint(usize, usize),
    #[error("field of order {order} is too small, need at least {needed}")]
    FieldTooSmall { order: u64, needed: u64 },
    #[error("points are linearly dependent over the subfield of order {0}")]
    DependentPoints(u64),

    #[error("instance too large for enumeration: {0}")]
    InstanceTooLarge(String),

    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("invalid repair context: {0}")]
    InvalidContext(String),
    #[error("node {0} cannot repair itself")]
    SelfRepair(NodeId),
    #[error("shard for node {0} is missing")]
    MissingShard(NodeId),
    #[error("node {0} supplied more than once")]
    DuplicateNode(NodeId),
    #[error("need {needed} shards, got {got}")]
    TooFewShards { needed: usize, got: usize },

    #[error("{0} does not generate the multiplicative group")]
    NotGenerator(u64),
    #[error("omega {omega} is inadmissible: condition value {value} lies in {{0, {alpha_sq}}}")]
    InadmissibleOmega { omega: u64, value: u64, alpha_sq: u64 },
    #[error("leakage matrix is singular for parity {0}")]
    SingularLeakageMatrix(usize),
    #[error("invalid repair group: {0}")]
    InvalidGroup(String),
    #[error("parameters too small for the attack: {0}")]
    ParameterTooSmall(String),
    #[error("operation not modelled for this code: {0}")]
    Unsupported(String),

    #[error("invalid eavesdropper model: {0}")]
    InvalidEveModel(String),
    #[error("invalid eavesdropper sizes l1={l1}, l2={l2} for k={k}")]
    InvalidL { l1: usize, l2: usize, k: usize },
    #[error("non-integral parameters: {0}")]
    NonIntegralParams(String),

    #[error("(l1, l2) = ({0}, {1}) is outside the covered capacity regimes")]
    NotCoveredRegime(usize, usize),
    #[error("secure mode requires a binary-extension base field")]
    FieldKindUnsupported,
    #[error("secure scheme would store no secret symbols")]
    VacuousScheme,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
