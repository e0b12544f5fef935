use thiserror::Error;

use crate::ultrafilter::AxiomViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operation symbol names must be non-empty")]
    EmptySymbolName,
    #[error("duplicate operation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("carrier must be non-empty")]
    EmptyCarrier,
    #[error("no table given for symbol `{0}`")]
    MissingTable(String),
    #[error("table for `{0}` does not belong to any declared symbol")]
    UnexpectedTable(String),
    #[error("table for `{symbol}` has length {found}, expected {expected}")]
    TableLength {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error(
        "table for `{symbol}` has entry {value} at index {index}, outside carrier of size {size}"
    )]
    EntryOutOfRange {
        symbol: String,
        index: usize,
        value: usize,
        size: usize,
    },
    #[error("unknown operation symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{symbol}` has arity {expected} but was given {found} arguments")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("element {element} is outside carrier of size {size}")]
    ElementOutOfRange { element: usize, size: usize },
    #[error("algebras are not similar (signatures differ)")]
    SignatureMismatch,
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("{what} of size {size} exceeds the configured guard of {limit}")]
    SizeGuard {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("a direct product needs at least one factor")]
    NoFactors,
    #[error("partition {partition} is not a congruence: ({left}, {right}) related but `{symbol}` sends them to unrelated ({image_left}, {image_right})")]
    NotACongruence {
        partition: String,
        symbol: String,
        left: usize,
        right: usize,
        image_left: usize,
        image_right: usize,
    },
    #[error("relation is not an equivalence: {0}")]
    NotAnEquivalence(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error(
        "base congruence is not contained in θ: ({left}, {right}) is in the base but not in θ"
    )]
    NotContained { left: usize, right: usize },
    #[error("index universe mismatch: expected |I| = {expected}, found {found}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("index {index} is outside the index set of size {universe}")]
    IndexOutOfRange { index: usize, universe: usize },
    #[error("index set universe must satisfy 1 <= |I| <= {max}, got {found}")]
    UniverseSize { found: usize, max: usize },
    #[error("not an ultrafilter: {0}")]
    NotAnUltrafilter(AxiomViolation),
    #[error("not a filter: {0}")]
    NotAFilter(AxiomViolation),
    #[error("{what} is only supported for n <= {max}, got {found}")]
    EnumerationBound {
        what: &'static str,
        found: usize,
        max: usize,
    },
    #[error("family has {found} congruences but there are {expected} factors")]
    FamilyLength { expected: usize, found: usize },
    #[error("isomorphism witness failed verification")]
    InvalidWitness,
    #[error("parse error: {0}")]
    Parse(String),
}
