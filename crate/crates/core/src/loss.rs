//! Training objectives with analytic gradients.
//!
//! Two in-batch contrastive losses over query-document pairs, both built on
//! the late-interaction score:
//!
//! * [`pairwise_ce_loss`] — each query is contrasted against its hardest
//!   in-batch negative: `L = (1/b) Σₖ softplus(sₖ⁻ − sₖ⁺)` with
//!   `sₖ⁺ = LI(qₖ, dₖ)` and `sₖ⁻ = max_{l≠k} LI(qₖ, d_l)`.
//! * [`inbatch_negatives_loss`] — cross-entropy of each query's score row
//!   over all `b` documents with target `k`.
//!
//! Scores enter raw: there is no temperature parameter. Gradients are
//! computed analytically through the MaxSim selection (the subgradient at
//! argmax ties picks the lowest index, both for the per-row max over document
//! vectors and for the hardest-negative max over documents). Everything runs
//! in binary64 so gradients can be checked against central finite differences
//! with headroom.

use crate::error::{Error, Result};
use crate::multivector::MultiVector;

/// Row-major binary64 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(Error::EmptyVectors {
                id: "<matrix>".to_string(),
            });
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::InvalidArgument {
                    what: "rows",
                    reason: format!("ragged rows: {} vs {cols}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Mat {
            data,
            rows: rows.len(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn add_scaled_row(&mut self, r: usize, src: &[f64], w: f64) {
        let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
        for (dst, s) in row.iter_mut().zip(src) {
            *dst += w * s;
        }
    }

    fn from_multivector(mv: &MultiVector) -> Self {
        Mat {
            data: mv.data().iter().map(|&v| v as f64).collect(),
            rows: mv.n_vectors(),
            cols: mv.dim(),
        }
    }
}

/// A batch of `b` aligned query-document pairs: `docs[k]` is the positive
/// page for `queries[k]`.
#[derive(Debug, Clone)]
pub struct Batch {
    queries: Vec<Mat>,
    docs: Vec<Mat>,
    dim: usize,
}

impl Batch {
    /// Needs at least two pairs (a batch must contain a negative) and a
    /// uniform embedding dimension.
    pub fn new(queries: Vec<Mat>, docs: Vec<Mat>) -> Result<Self> {
        if queries.len() != docs.len() {
            return Err(Error::BatchSizeMismatch {
                queries: queries.len(),
                docs: docs.len(),
            });
        }
        if queries.len() < 2 {
            return Err(Error::BatchTooSmall {
                size: queries.len(),
            });
        }
        let dim = queries[0].cols();
        for m in queries.iter().chain(&docs) {
            if m.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.cols(),
                });
            }
        }
        Ok(Batch { queries, docs, dim })
    }

    pub fn from_multivectors(queries: &[MultiVector], docs: &[MultiVector]) -> Result<Self> {
        Batch::new(
            queries.iter().map(Mat::from_multivector).collect(),
            docs.iter().map(Mat::from_multivector).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn queries(&self) -> &[Mat] {
        &self.queries
    }

    pub fn docs(&self) -> &[Mat] {
        &self.docs
    }
}

/// Loss value with gradients mirroring the batch's query and document shapes.
#[derive(Debug, Clone)]
pub struct LossResult {
    pub value: f64,
    pub grad_queries: Vec<Mat>,
    pub grad_docs: Vec<Mat>,
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Logistic sigmoid without overflow.
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Binary64 late-interaction score plus the selected document row for each
/// query row (lowest index on ties).
fn li_with_argmax(q: &Mat, d: &Mat) -> (f64, Vec<usize>) {
    let mut total = 0.0f64;
    let mut selected = Vec::with_capacity(q.rows());
    for i in 0..q.rows() {
        let qi = q.row(i);
        let mut best = f64::NEG_INFINITY;
        let mut best_j = 0;
        for j in 0..d.rows() {
            let s = dot64(qi, d.row(j));
            if s > best {
                best = s;
                best_j = j;
            }
        }
        total += best;
        selected.push(best_j);
    }
    (total, selected)
}

fn dot64(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// All pairwise LI scores and their MaxSim selections: `scores[k][l]` is
/// `LI(queries[k], docs[l])`.
struct ScoreGrid {
    scores: Vec<Vec<f64>>,
    argmax: Vec<Vec<Vec<usize>>>,
}

fn score_grid(batch: &Batch) -> ScoreGrid {
    let b = batch.len();
    let mut scores = vec![vec![0.0f64; b]; b];
    let mut argmax = vec![Vec::with_capacity(b); b];
    for k in 0..b {
        for l in 0..b {
            let (s, sel) = li_with_argmax(&batch.queries[k], &batch.docs[l]);
            scores[k][l] = s;
            argmax[k].push(sel);
        }
    }
    ScoreGrid { scores, argmax }
}

/// Accumulate `w * d(LI(q_k, d_l))/d(inputs)` into the gradient buffers,
/// following the recorded MaxSim selection: the gradient w.r.t. query row `i`
/// is the selected document row, and vice versa.
fn backprop_li(
    batch: &Batch,
    grid: &ScoreGrid,
    k: usize,
    l: usize,
    w: f64,
    grad_queries: &mut [Mat],
    grad_docs: &mut [Mat],
) {
    let q = &batch.queries[k];
    let d = &batch.docs[l];
    for (i, &j) in grid.argmax[k][l].iter().enumerate() {
        grad_queries[k].add_scaled_row(i, d.row(j), w);
        grad_docs[l].add_scaled_row(j, q.row(i), w);
    }
}

fn zero_grads(batch: &Batch) -> (Vec<Mat>, Vec<Mat>) {
    let gq = batch
        .queries
        .iter()
        .map(|m| Mat::zeros(m.rows(), m.cols()))
        .collect();
    let gd = batch
        .docs
        .iter()
        .map(|m| Mat::zeros(m.rows(), m.cols()))
        .collect();
    (gq, gd)
}

/// Hardest in-batch negative for query `k`: `max_{l≠k}` with the lowest `l`
/// winning ties.
fn hardest_negative(scores: &[f64], k: usize) -> (usize, f64) {
    let mut best_l = usize::MAX;
    let mut best = f64::NEG_INFINITY;
    for (l, &s) in scores.iter().enumerate() {
        if l != k && s > best {
            best = s;
            best_l = l;
        }
    }
    (best_l, best)
}

/// Pairwise cross-entropy loss in softplus form, with analytic gradients.
///
/// `L = (1/b) Σₖ softplus(sₖ⁻ − sₖ⁺)`; equals `ln 2` exactly when every
/// query's hardest negative ties its positive.
pub fn pairwise_ce_loss(batch: &Batch) -> Result<LossResult> {
    let b = batch.len();
    let grid = score_grid(batch);
    let (mut grad_queries, mut grad_docs) = zero_grads(batch);

    let inv_b = 1.0 / b as f64;
    let mut value = 0.0f64;
    for k in 0..b {
        let s_pos = grid.scores[k][k];
        let (l_neg, s_neg) = hardest_negative(&grid.scores[k], k);
        let margin = s_neg - s_pos;
        value += softplus(margin) * inv_b;
        let w = sigmoid(margin) * inv_b;
        backprop_li(batch, &grid, k, k, -w, &mut grad_queries, &mut grad_docs);
        backprop_li(
            batch,
            &grid,
            k,
            l_neg,
            w,
            &mut grad_queries,
            &mut grad_docs,
        );
    }

    Ok(LossResult {
        value,
        grad_queries,
        grad_docs,
    })
}

/// In-batch negatives ablation: mean cross-entropy of each query's score row
/// over all `b` documents (softmax with max-subtraction), target `k`.
pub fn inbatch_negatives_loss(batch: &Batch) -> Result<LossResult> {
    let b = batch.len();
    let grid = score_grid(batch);
    let (mut grad_queries, mut grad_docs) = zero_grads(batch);

    let inv_b = 1.0 / b as f64;
    let mut value = 0.0f64;
    for k in 0..b {
        let row = &grid.scores[k];
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = row.iter().map(|&s| (s - m).exp()).collect();
        let z: f64 = exps.iter().sum();
        // -log softmax at the target index.
        value += -(row[k] - m - z.ln()) * inv_b;
        for l in 0..b {
            let p = exps[l] / z;
            let w = (p - if l == k { 1.0 } else { 0.0 }) * inv_b;
            backprop_li(batch, &grid, k, l, w, &mut grad_queries, &mut grad_docs);
        }
    }

    Ok(LossResult {
        value,
        grad_queries,
        grad_docs,
    })
}

/// Loss values recomputed from a precomputed score matrix. Used by tests to
/// check score-level identities (shift invariance, monotonicity) without
/// rebuilding batches.
#[cfg(test)]
fn pairwise_value_from_scores(scores: &[Vec<f64>]) -> f64 {
    let b = scores.len();
    let mut value = 0.0;
    for k in 0..b {
        let (_, s_neg) = hardest_negative(&scores[k], k);
        value += softplus(s_neg - scores[k][k]);
    }
    value / b as f64
}

#[cfg(test)]
fn inbatch_value_from_scores(scores: &[Vec<f64>]) -> f64 {
    let b = scores.len();
    let mut value = 0.0;
    for k in 0..b {
        let m = scores[k].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = scores[k].iter().map(|&s| (s - m).exp()).sum();
        value += -(scores[k][k] - m - z.ln());
    }
    value / b as f64
}
