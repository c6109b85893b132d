//! Persistent corpus index: the MVEC binary format, per-document memory
//! accounting, and centroid-quantization compression.
//!
//! A [`CorpusIndex`] is an immutable collection of document multi-vectors
//! sharing one dimension and storage dtype, plus free-form string metadata.
//! With the paper-standard shape (1024 patches × 128 dims, binary16) each
//! page costs exactly 256 KB of vector payload.

mod compress;
mod format;

pub use compress::{compress, decompress, CompressedDoc, CompressedIndex, ResidualDtype};
pub use format::{
    compressed_index_to_bytes, index_from_bytes, index_to_bytes, read_compressed_index,
    read_index, write_compressed_index, write_index,
};

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::multivector::{Dtype, MultiVector};

/// Metadata key for the patch-grid row count.
pub const META_GRID_ROWS: &str = "grid_rows";
/// Metadata key for the patch-grid column count.
pub const META_GRID_COLS: &str = "grid_cols";

/// The 32×32 grid implied by a 1024-patch page.
pub fn default_grid(n_vectors: usize) -> Option<(usize, usize)> {
    (n_vectors == 1024).then_some((32, 32))
}

/// Immutable collection of document multi-vectors with uniform dimension and
/// dtype.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusIndex {
    docs: Vec<MultiVector>,
    dim: usize,
    dtype: Dtype,
    meta: BTreeMap<String, String>,
    by_id: HashMap<String, usize>,
}

impl CorpusIndex {
    /// Build an index, converting every document to `dtype` (quantizing for
    /// binary16). Rejects duplicate ids, dimension mismatches, and documents
    /// that contradict a declared patch grid.
    pub fn new(
        docs: Vec<MultiVector>,
        dim: usize,
        dtype: Dtype,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument {
                what: "dim",
                reason: "must be at least 1".to_string(),
            });
        }
        let grid = parse_grid(&meta)?;
        let mut by_id = HashMap::with_capacity(docs.len());
        let mut converted = Vec::with_capacity(docs.len());
        for doc in docs {
            if doc.dim() != dim {
                return Err(Error::DocDimensionMismatch {
                    doc_id: doc.id().to_string(),
                    expected: dim,
                    found: doc.dim(),
                });
            }
            if let Some((rows, cols)) = grid {
                if rows * cols != doc.n_vectors() {
                    return Err(Error::GridMismatch {
                        id: doc.id().to_string(),
                        rows,
                        cols,
                        n_vectors: doc.n_vectors(),
                    });
                }
            }
            let doc = if doc.dtype() == dtype {
                doc
            } else {
                doc.with_dtype(dtype)
            };
            if by_id.insert(doc.id().to_string(), converted.len()).is_some() {
                return Err(Error::DuplicateDocId {
                    id: doc.id().to_string(),
                });
            }
            converted.push(doc);
        }
        Ok(CorpusIndex {
            docs: converted,
            dim,
            dtype,
            meta,
            by_id,
        })
    }

    /// Build from documents, inferring the dimension from the first one.
    pub fn from_docs(
        docs: Vec<MultiVector>,
        dtype: Dtype,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        let dim = docs
            .first()
            .map(MultiVector::dim)
            .ok_or(Error::InvalidArgument {
                what: "docs",
                reason: "cannot infer dimension from an empty corpus; use CorpusIndex::new"
                    .to_string(),
            })?;
        CorpusIndex::new(docs, dim, dtype, meta)
    }

    /// An index with no documents but a declared dimension.
    pub fn empty(dim: usize, dtype: Dtype, meta: BTreeMap<String, String>) -> Result<Self> {
        CorpusIndex::new(Vec::new(), dim, dtype, meta)
    }

    pub fn docs(&self) -> &[MultiVector] {
        &self.docs
    }

    pub fn get(&self, doc_id: &str) -> Option<&MultiVector> {
        self.by_id.get(doc_id).map(|&i| &self.docs[i])
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dtype(&self) -> Dtype {
        self.dtype
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    /// Declared patch grid, if the metadata carries one.
    pub fn grid(&self) -> Option<(usize, usize)> {
        parse_grid(&self.meta).expect("grid validated at construction")
    }
}

fn parse_grid(meta: &BTreeMap<String, String>) -> Result<Option<(usize, usize)>> {
    match (meta.get(META_GRID_ROWS), meta.get(META_GRID_COLS)) {
        (None, None) => Ok(None),
        (Some(r), Some(c)) => {
            let parse = |s: &str| -> Result<usize> {
                let v: usize = s.parse().map_err(|_| Error::InvalidArgument {
                    what: "grid",
                    reason: format!("'{s}' is not a positive integer"),
                })?;
                if v == 0 {
                    return Err(Error::InvalidArgument {
                        what: "grid",
                        reason: "grid dimensions must be positive".to_string(),
                    });
                }
                Ok(v)
            };
            Ok(Some((parse(r)?, parse(c)?)))
        }
        _ => Err(Error::InvalidArgument {
            what: "grid",
            reason: format!("metadata must set both {META_GRID_ROWS} and {META_GRID_COLS} or neither"),
        }),
    }
}

/// Vector-payload bytes for one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocFootprint {
    pub doc_id: String,
    /// `n_vectors * dim * sizeof(dtype)`.
    pub payload_bytes: u64,
}

/// Memory accounting for an uncompressed index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Footprint {
    pub per_doc: Vec<DocFootprint>,
    /// Sum of all vector payloads.
    pub payload_bytes: u64,
    /// Exact serialized file size, including header, metadata, and ids.
    pub total_bytes: u64,
}

/// Report payload bytes per document plus the exact serialized total.
pub fn footprint(index: &CorpusIndex) -> Footprint {
    let value_size = index.dtype().size_bytes() as u64;
    let per_doc: Vec<DocFootprint> = index
        .docs()
        .iter()
        .map(|d| DocFootprint {
            doc_id: d.id().to_string(),
            payload_bytes: d.n_vectors() as u64 * d.dim() as u64 * value_size,
        })
        .collect();
    let payload_bytes = per_doc.iter().map(|d| d.payload_bytes).sum();
    let meta_len = serde_json::to_vec(index.meta()).expect("string map serializes").len() as u64;
    let doc_overhead: u64 = index
        .docs()
        .iter()
        .map(|d| 2 + d.id().len() as u64 + 4)
        .sum();
    Footprint {
        per_doc,
        payload_bytes,
        total_bytes: format::HEADER_LEN as u64 + meta_len + doc_overhead + payload_bytes,
    }
}

/// Memory accounting for a compressed index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedFootprint {
    /// Centroid block: count field plus `K * dim` binary32 values.
    pub centroid_bytes: u64,
    /// One u32 per stored row.
    pub assignment_bytes: u64,
    /// Binary16 residual payloads, 0 when residuals are disabled.
    pub residual_bytes: u64,
    /// Exact serialized file size.
    pub total_bytes: u64,
}

pub fn compressed_footprint(c: &CompressedIndex) -> CompressedFootprint {
    let centroid_bytes = 4 + c.k() as u64 * c.dim() as u64 * 4;
    let assignment_bytes: u64 = c.docs().iter().map(|d| d.assignments.len() as u64 * 4).sum();
    let residual_bytes: u64 = match c.residual_dtype() {
        ResidualDtype::None => 0,
        ResidualDtype::F16 => c
            .docs()
            .iter()
            .map(|d| d.assignments.len() as u64 * c.dim() as u64 * 2)
            .sum(),
    };
    let meta_len = serde_json::to_vec(c.meta()).expect("string map serializes").len() as u64;
    let doc_overhead: u64 = c.docs().iter().map(|d| 2 + d.id.len() as u64 + 4).sum();
    CompressedFootprint {
        centroid_bytes,
        assignment_bytes,
        residual_bytes,
        total_bytes: format::HEADER_LEN as u64
            + meta_len
            + centroid_bytes
            + doc_overhead
            + assignment_bytes
            + residual_bytes,
    }
}
