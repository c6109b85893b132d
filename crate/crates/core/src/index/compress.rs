//! Centroid quantization of an embedding index.
//!
//! All document rows are pooled corpus-wide and clustered with k-means
//! (k-means++ seeding, a fixed number of Lloyd iterations, deterministic for
//! a given seed). Each row is then stored as a u32 centroid id, optionally
//! with a binary16 residual. With K centroids over R total rows of dimension
//! D, payload drops from `R*D*sizeof(dtype)` to `4*R + 4*K*D` bytes, an
//! order of magnitude for typical shapes.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::index::CorpusIndex;
use crate::multivector::{quantize_f16, Dtype, MultiVector};

/// Residual storage precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualDtype {
    /// Centroid-only reconstruction.
    None,
    /// Binary16 residual per row.
    F16,
}

/// One document's centroid assignments (one per row) and optional residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedDoc {
    pub id: String,
    pub assignments: Vec<u32>,
    /// Row-major `n * dim` residuals, already quantized to binary16 values.
    residuals: Option<Vec<f32>>,
}

impl CompressedDoc {
    pub(crate) fn new(id: String, assignments: Vec<u32>, residuals: Option<Vec<f32>>) -> Self {
        CompressedDoc {
            id,
            assignments,
            residuals,
        }
    }

    pub fn residuals(&self) -> Option<&[f32]> {
        self.residuals.as_deref()
    }
}

/// A centroid-quantized corpus index.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedIndex {
    centroids: Vec<f32>,
    k: usize,
    dim: usize,
    docs: Vec<CompressedDoc>,
    residual_dtype: ResidualDtype,
    meta: BTreeMap<String, String>,
}

impl CompressedIndex {
    pub(crate) fn new(
        centroids: Vec<f32>,
        k: usize,
        dim: usize,
        docs: Vec<CompressedDoc>,
        residual_dtype: ResidualDtype,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        if k == 0 || dim == 0 || centroids.len() != k * dim {
            return Err(Error::InvalidArgument {
                what: "centroids",
                reason: format!("{} values for k={k}, dim={dim}", centroids.len()),
            });
        }
        for doc in &docs {
            for (row, &a) in doc.assignments.iter().enumerate() {
                if a as usize >= k {
                    return Err(Error::AssignmentOutOfRange {
                        doc_id: doc.id.clone(),
                        row,
                        assignment: a,
                        k,
                    });
                }
            }
            match (residual_dtype, &doc.residuals) {
                (ResidualDtype::None, None) => {}
                (ResidualDtype::F16, Some(res)) if res.len() == doc.assignments.len() * dim => {}
                _ => {
                    return Err(Error::InvalidArgument {
                        what: "residuals",
                        reason: format!("doc '{}' residual shape inconsistent", doc.id),
                    });
                }
            }
        }
        Ok(CompressedIndex {
            centroids,
            k,
            dim,
            docs,
            residual_dtype,
            meta,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Flat `k * dim` centroid matrix.
    pub fn centroids(&self) -> &[f32] {
        &self.centroids
    }

    pub fn centroid(&self, i: usize) -> &[f32] {
        &self.centroids[i * self.dim..(i + 1) * self.dim]
    }

    pub fn docs(&self) -> &[CompressedDoc] {
        &self.docs
    }

    pub fn residual_dtype(&self) -> ResidualDtype {
        self.residual_dtype
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }
}

fn dist2(a: &[f32], b: &[f32]) -> f64 {
    let mut acc = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        let d = *x as f64 - *y as f64;
        acc += d * d;
    }
    acc
}

/// k-means++ seeding over `rows`.
fn kmeans_pp_init(rows: &[&[f32]], k: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<f32> {
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..rows.len());
    centroids.extend_from_slice(rows[first]);

    let mut d2: Vec<f64> = rows
        .iter()
        .map(|r| dist2(r, &centroids[..dim]))
        .collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let chosen = if total > 0.0 {
            let mut target = rng.random_range(0.0..total);
            let mut pick = rows.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // All rows coincide with existing centroids; any choice is exact.
            rng.random_range(0..rows.len())
        };
        let start = centroids.len();
        centroids.extend_from_slice(rows[chosen]);
        let new = &centroids[start..start + dim];
        for (i, r) in rows.iter().enumerate() {
            let d = dist2(r, new);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centroids
}

/// Nearest centroid by Euclidean distance, lowest index on ties.
fn nearest(row: &[f32], centroids: &[f32], dim: usize) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.chunks_exact(dim).enumerate() {
        let d = dist2(row, c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Quantize an index with corpus-wide k-means.
///
/// Runs k-means++ seeding and `iters` Lloyd iterations (stopping early only
/// at a fixed point), assigns every row to its nearest centroid, and stores
/// binary16 residuals when requested. Deterministic for a given seed.
pub fn compress(
    index: &CorpusIndex,
    k: usize,
    iters: usize,
    seed: u64,
    residual: ResidualDtype,
) -> Result<CompressedIndex> {
    if k == 0 {
        return Err(Error::InvalidArgument {
            what: "k",
            reason: "must be at least 1".to_string(),
        });
    }
    let rows: Vec<&[f32]> = index.docs().iter().flat_map(MultiVector::rows).collect();
    if k > rows.len() {
        return Err(Error::KTooLarge { k, rows: rows.len() });
    }
    let dim = index.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_pp_init(&rows, k, dim, &mut rng);

    let mut assignments = vec![0usize; rows.len()];
    for _ in 0..iters {
        let mut changed = false;
        for (a, row) in assignments.iter_mut().zip(&rows) {
            let n = nearest(row, &centroids, dim);
            if n != *a {
                changed = true;
            }
            *a = n;
        }
        // Means in binary64; empty clusters keep their previous centroid.
        let mut sums = vec![0.0f64; k * dim];
        let mut counts = vec![0u64; k];
        for (&a, row) in assignments.iter().zip(&rows) {
            counts[a] += 1;
            let s = &mut sums[a * dim..(a + 1) * dim];
            for (acc, v) in s.iter_mut().zip(*row) {
                *acc += *v as f64;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let inv = 1.0 / counts[c] as f64;
            for j in 0..dim {
                centroids[c * dim + j] = (sums[c * dim + j] * inv) as f32;
            }
        }
        if !changed {
            break;
        }
    }
    // Final pass so stored assignments reflect the final centroids.
    for (a, row) in assignments.iter_mut().zip(&rows) {
        *a = nearest(row, &centroids, dim);
    }

    let mut docs = Vec::with_capacity(index.len());
    let mut cursor = 0usize;
    for doc in index.docs() {
        let n = doc.n_vectors();
        let doc_assignments: Vec<u32> =
            assignments[cursor..cursor + n].iter().map(|&a| a as u32).collect();
        let residuals = match residual {
            ResidualDtype::None => None,
            ResidualDtype::F16 => {
                let mut res = Vec::with_capacity(n * dim);
                for (r, &a) in doc.rows().zip(&assignments[cursor..cursor + n]) {
                    let c = &centroids[a * dim..(a + 1) * dim];
                    for (v, cv) in r.iter().zip(c) {
                        res.push(quantize_f16(v - cv));
                    }
                }
                Some(res)
            }
        };
        docs.push(CompressedDoc::new(doc.id().to_string(), doc_assignments, residuals));
        cursor += n;
    }

    CompressedIndex::new(centroids, k, dim, docs, residual, index.meta().clone())
}

/// Reconstruct a binary32 index: each row is its centroid plus the stored
/// residual, if any. Ids, shapes, and metadata are preserved.
pub fn decompress(c: &CompressedIndex) -> Result<CorpusIndex> {
    let dim = c.dim();
    let mut docs = Vec::with_capacity(c.docs().len());
    for doc in c.docs() {
        let mut data = Vec::with_capacity(doc.assignments.len() * dim);
        for (row, &a) in doc.assignments.iter().enumerate() {
            if a as usize >= c.k() {
                return Err(Error::AssignmentOutOfRange {
                    doc_id: doc.id.clone(),
                    row,
                    assignment: a,
                    k: c.k(),
                });
            }
            let centroid = c.centroid(a as usize);
            match doc.residuals() {
                None => data.extend_from_slice(centroid),
                Some(res) => {
                    let r = &res[row * dim..(row + 1) * dim];
                    data.extend(centroid.iter().zip(r).map(|(cv, rv)| cv + rv));
                }
            }
        }
        docs.push(MultiVector::new(doc.id.clone(), data, dim, Dtype::F32)?);
    }
    CorpusIndex::new(docs, dim, Dtype::F32, c.meta().clone())
}
