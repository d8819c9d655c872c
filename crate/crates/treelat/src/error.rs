//! The crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Operations are total wherever the underlying mathematics is total;
/// errors only arise from malformed input, domain violations (a node
/// outside its tree, a point outside a function's domain), or data that
/// fails a declared verification precondition.
#[derive(Debug, Error)]
pub enum Error {
    /// Text that does not parse as the requested kind of value.
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    /// `pred` or `shift` applied to the empty node.
    #[error("the empty node has no {0}")]
    EmptyNode(&'static str),

    /// A node that does not belong to the ambient tree.
    #[error("node {0} lies outside the tree")]
    OutsideTree(String),

    /// Rank queries are only meaningful on canonical trees.
    #[error("rank is not defined on the full tree")]
    FullTreeRank,

    /// A node set that is not downward closed or not rooted.
    #[error("not a trunk: {0}")]
    NotTrunk(String),

    /// Fundamental sequences exist only at limit ordinals.
    #[error("{0} is not a limit ordinal")]
    NotLimit(String),

    /// The operation needs a nonzero ordinal.
    #[error("expected a nonzero ordinal")]
    ZeroOrdinal,

    /// Elements over different trees or of different order cannot mix.
    #[error("mismatched spaces: {0}")]
    SpaceMismatch(String),

    /// A copy index outside `1..=order`.
    #[error("copy {copy} outside 1..={order}")]
    CopyRange { copy: u32, order: u32 },

    /// A point outside an ordinal step function's domain.
    #[error("point {point} outside the domain (0, {top}]")]
    OutsideDomain { point: String, top: String },

    /// Projection data whose biorthogonality check fails.
    #[error("biorthogonality violations present; refusing to project")]
    Biorthogonality,

    /// Operator data failing the isometry/projection hypotheses.
    #[error("hypotheses fail: {0}")]
    Hypotheses(String),

    /// Extraction cross-checks that do not agree.
    #[error("extraction is inconsistent: {0}")]
    Extraction(String),

    /// Structurally invalid data (shapes, duplicate keys, zero entries...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// Malformed JSON input.
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}
