//! Per-query-token similarity maps over a document's patch grid.
//!
//! For one query token, the map holds the dot product with every document
//! patch embedding, arranged row-major on the patch grid (left-to-right,
//! top-to-bottom; a 1024-patch page defaults to 32×32). Summing each token's
//! grid maximum over all tokens recovers the late-interaction score exactly.
//!
//! Maps export as minimal RFC-4180 CSV (LF line endings, `.` decimal) or
//! binary PGM P5 (8-bit, min-max normalized to 0–255, rounding half-up;
//! a constant grid renders as all zeros).

use std::path::Path;

use crate::error::{Error, Result};
use crate::multivector::MultiVector;
use crate::scoring::dot;

/// Whether grid values are raw dot products or min-max normalized to [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    MinMax,
}

/// Export encoding for a similarity map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Csv,
    Pgm,
}

/// One query token's patch-similarity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMap {
    pub query_token_index: usize,
    pub doc_id: String,
    /// Grid coordinates (row, col) of the maximum, lowest row-major index on
    /// ties.
    pub argmax_patch: (usize, usize),
    pub normalization: Normalization,
    grid: Vec<f32>,
    rows: usize,
    cols: usize,
}

impl SimilarityMap {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn value(&self, row: usize, col: usize) -> f32 {
        self.grid[row * self.cols + col]
    }

    /// Row-major flat view; index `r * cols + c` is patch (r, c), i.e.
    /// document row `r * cols + c`.
    pub fn grid(&self) -> &[f32] {
        &self.grid
    }

    pub fn max(&self) -> f32 {
        self.grid.iter().copied().fold(f32::NEG_INFINITY, f32::max)
    }

    pub fn min(&self) -> f32 {
        self.grid.iter().copied().fold(f32::INFINITY, f32::min)
    }

    /// Min-max normalized copy in [0, 1]; a constant grid maps to all zeros.
    pub fn minmax_normalized(&self) -> SimilarityMap {
        let min = self.min();
        let range = self.max() - min;
        let grid = if range == 0.0 {
            vec![0.0; self.grid.len()]
        } else {
            self.grid.iter().map(|v| (v - min) / range).collect()
        };
        SimilarityMap {
            query_token_index: self.query_token_index,
            doc_id: self.doc_id.clone(),
            argmax_patch: self.argmax_patch,
            normalization: Normalization::MinMax,
            grid,
            rows: self.rows,
            cols: self.cols,
        }
    }

    /// Minimal CSV: `rows` lines of `cols` comma-separated decimal values,
    /// LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.grid.chunks_exact(self.cols) {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Binary PGM (P5), 8-bit, min-max normalized with half-up rounding.
    pub fn to_pgm(&self) -> Vec<u8> {
        let normalized = if self.normalization == Normalization::MinMax {
            None // already in [0, 1]
        } else {
            Some(self.minmax_normalized())
        };
        let grid = normalized.as_ref().map_or(&self.grid, |m| &m.grid);
        let mut out = format!("P5\n{} {}\n255\n", self.cols, self.rows).into_bytes();
        out.extend(grid.iter().map(|v| (v * 255.0 + 0.5).floor() as u8));
        out
    }
}

/// Dot products between one query token and every document patch, arranged on
/// a `rows x cols` grid in document row order.
pub fn similarity_map(
    query: &MultiVector,
    doc: &MultiVector,
    token_index: usize,
    rows: usize,
    cols: usize,
) -> Result<SimilarityMap> {
    if token_index >= query.n_vectors() {
        return Err(Error::TokenIndexOutOfRange {
            index: token_index,
            n_vectors: query.n_vectors(),
        });
    }
    if query.dim() != doc.dim() {
        return Err(Error::DimensionMismatch {
            expected: query.dim(),
            found: doc.dim(),
        });
    }
    if rows == 0 || cols == 0 || rows * cols != doc.n_vectors() {
        return Err(Error::GridMismatch {
            id: doc.id().to_string(),
            rows,
            cols,
            n_vectors: doc.n_vectors(),
        });
    }
    let token = query.row(token_index);
    let grid: Vec<f32> = doc.rows().map(|patch| dot(token, patch)).collect();
    let mut best = 0usize;
    for (i, v) in grid.iter().enumerate() {
        if *v > grid[best] {
            best = i;
        }
    }
    Ok(SimilarityMap {
        query_token_index: token_index,
        doc_id: doc.id().to_string(),
        argmax_patch: (best / cols, best % cols),
        normalization: Normalization::Raw,
        grid,
        rows,
        cols,
    })
}

/// Write a map in the requested format.
pub fn export_map(map: &SimilarityMap, format: MapFormat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        MapFormat::Csv => map.to_csv().into_bytes(),
        MapFormat::Pgm => map.to_pgm(),
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
