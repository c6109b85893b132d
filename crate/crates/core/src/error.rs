//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Query and document embeddings disagree on the vector dimension.
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A corpus document disagrees with the corpus dimension.
    #[error("dimension mismatch for doc '{doc_id}': expected {expected}, got {found}")]
    DocDimensionMismatch {
        doc_id: String,
        expected: usize,
        found: usize,
    },

    /// A multi-vector with zero rows (or zero columns) was supplied.
    #[error("'{id}': multi-vector must contain at least one vector of dimension >= 1")]
    EmptyVectors { id: String },

    /// NaN or infinite value in an embedding.
    #[error("'{id}': non-finite value at index {index}")]
    NonFinite { id: String, index: usize },

    /// Cosine similarity is undefined for the zero vector.
    #[error("'{id}': zero-norm vector, cosine similarity undefined")]
    ZeroNorm { id: String },

    /// A score computation overflowed to a non-finite value.
    #[error("non-finite score for doc '{doc_id}'")]
    NonFiniteScore { doc_id: String },

    #[error("invalid argument {what}: {reason}")]
    InvalidArgument { what: &'static str, reason: String },

    /// A training batch needs at least one in-batch negative.
    #[error("batch size {size} too small: need at least 2 query-document pairs")]
    BatchTooSmall { size: usize },

    #[error("batch has {queries} queries but {docs} documents")]
    BatchSizeMismatch { queries: usize, docs: usize },

    #[error("duplicate doc id '{id}'")]
    DuplicateDocId { id: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// File does not start with the MVEC magic bytes.
    #[error("bad magic {found:?} at byte offset {offset}")]
    BadMagic { found: [u8; 4], offset: u64 },

    #[error("unsupported format version {version} at byte offset {offset}")]
    UnsupportedVersion { version: u32, offset: u64 },

    #[error("unknown dtype code {code} at byte offset {offset}")]
    UnknownDtype { code: u8, offset: u64 },

    /// File ended before a declared field or payload.
    #[error("truncated file: {needed} bytes needed at byte offset {offset}")]
    Truncated { offset: u64, needed: u64 },

    /// Bytes remained after the last declared document.
    #[error("trailing data at byte offset {offset}")]
    TrailingData { offset: u64 },

    #[error("invalid metadata blob at byte offset {offset}: {reason}")]
    BadMetadata { offset: u64, reason: String },

    #[error("invalid UTF-8 in field at byte offset {offset}")]
    BadUtf8 { offset: u64 },

    /// NaN or infinity decoded from a vector payload.
    #[error("non-finite payload value for doc '{doc_id}' at byte offset {offset}")]
    NonFinitePayload { doc_id: String, offset: u64 },

    /// Declared patch grid does not cover the document's vector count.
    #[error("grid {rows}x{cols} does not match {n_vectors} vectors for '{id}'")]
    GridMismatch {
        id: String,
        rows: usize,
        cols: usize,
        n_vectors: usize,
    },

    #[error("cannot form {k} clusters from {rows} vector rows")]
    KTooLarge { k: usize, rows: usize },

    #[error("assignment {assignment} out of range [0, {k}) for doc '{doc_id}' row {row}")]
    AssignmentOutOfRange {
        doc_id: String,
        row: usize,
        assignment: u32,
        k: usize,
    },

    #[error("unknown chunk id '{id}'")]
    UnknownChunk { id: String },

    #[error("unknown page id '{id}'")]
    UnknownPage { id: String },

    #[error("unknown doc id '{id}'")]
    UnknownDoc { id: String },

    #[error("query token list is empty")]
    EmptyQuery,

    #[error("lexical corpus has no non-empty chunks")]
    EmptyLexicalCorpus,

    #[error("duplicate chunk id '{id}'")]
    DuplicateChunkId { id: String },

    /// A run contains a query that is absent from the qrels.
    #[error("run query '{query_id}' has no qrels judgments")]
    UnjudgedQuery { query_id: String },

    #[error("duplicate doc '{doc_id}' for query '{query_id}' in run")]
    DuplicateRunDoc { query_id: String, doc_id: String },

    #[error("run ranking for query '{query_id}' is not sorted by descending score")]
    UnsortedRun { query_id: String },

    #[error("{path}:{line}: {reason}")]
    ParseLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("query token index {index} out of range: query has {n_vectors} vectors")]
    TokenIndexOutOfRange { index: usize, n_vectors: usize },

    #[error("infeasible synthetic corpus: {reason}")]
    InfeasibleSynth { reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
