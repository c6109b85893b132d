//! Late-interaction and pooled scoring operators.
//!
//! The late-interaction score between a query with rows `q_1..q_Nq` and a
//! document with rows `d_1..d_Nd` is
//!
//! ```text
//! LI(q, d) = Σᵢ maxⱼ ⟨qᵢ, dⱼ⟩
//! ```
//!
//! i.e. each query vector is matched to its best document vector by dot
//! product and the maxima are summed. Vectors are used as-is: no
//! normalization is applied, so callers wanting cosine semantics must
//! pre-normalize. The pooled baseline ([`pooled_score`]) compares one mean
//! vector per side by cosine similarity instead.
//!
//! All accumulation is binary32 regardless of storage dtype, and ties inside
//! a max resolve to the lowest row index.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multivector::{MultiVector, PooledVector, ScoredDoc};

/// Dot product with sequential binary32 accumulation.
#[inline]
pub fn dot(a: &[f32], b: &[f32]) -> f32 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0f32;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Late-interaction (MaxSim) score: sum over query rows of the maximum dot
/// product with any document row.
pub fn late_interaction(query: &MultiVector, doc: &MultiVector) -> Result<f32> {
    if query.dim() != doc.dim() {
        return Err(Error::DimensionMismatch {
            expected: query.dim(),
            found: doc.dim(),
        });
    }
    let mut total = 0.0f32;
    for q in query.rows() {
        let mut best = f32::NEG_INFINITY;
        for d in doc.rows() {
            let s = dot(q, d);
            // Strict > keeps the lowest j on ties.
            if s > best {
                best = s;
            }
        }
        total += best;
    }
    Ok(total)
}

/// Cosine similarity between two pooled vectors, in [-1, 1].
pub fn pooled_score(query: &PooledVector, doc: &PooledVector) -> Result<f32> {
    if query.dim() != doc.dim() {
        return Err(Error::DimensionMismatch {
            expected: query.dim(),
            found: doc.dim(),
        });
    }
    let nq = norm(query.vector());
    if nq == 0.0 {
        return Err(Error::ZeroNorm {
            id: query.id().to_string(),
        });
    }
    let nd = norm(doc.vector());
    if nd == 0.0 {
        return Err(Error::ZeroNorm {
            id: doc.id().to_string(),
        });
    }
    let cos = dot(query.vector(), doc.vector()) / (nq * nd);
    // Guard against rounding pushing past the unit interval.
    Ok(cos.clamp(-1.0, 1.0))
}

fn norm(v: &[f32]) -> f32 {
    dot(v, v).sqrt()
}

/// Columnwise arithmetic mean of a multi-vector's rows; the id is preserved.
pub fn mean_pool(mv: &MultiVector) -> PooledVector {
    let n = mv.n_vectors() as f32;
    let mut acc = vec![0.0f32; mv.dim()];
    for row in mv.rows() {
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
    for a in &mut acc {
        *a /= n;
    }
    // A MultiVector is finite and non-empty by construction, so the mean is
    // finite and the invariants hold.
    PooledVector::new(mv.id(), acc).expect("mean of finite rows is finite")
}

/// Rank a corpus against a query by late-interaction score.
///
/// Returns the top `min(k, corpus.len())` documents, sorted by descending
/// score with ties broken by ascending doc id. Scoring parallelizes over
/// documents; the result is identical for any thread count.
///
/// An empty corpus yields an empty ranking. A document with a mismatched
/// dimension is reported by id.
pub fn rank_corpus(query: &MultiVector, corpus: &[MultiVector], k: usize) -> Result<Vec<ScoredDoc>> {
    if k == 0 {
        return Err(Error::InvalidArgument {
            what: "k",
            reason: "must be at least 1".to_string(),
        });
    }
    let mut scored = corpus
        .par_iter()
        .map(|doc| {
            let score = late_interaction(query, doc).map_err(|e| match e {
                Error::DimensionMismatch { expected, found } => Error::DocDimensionMismatch {
                    doc_id: doc.id().to_string(),
                    expected,
                    found,
                },
                other => other,
            })?;
            if !score.is_finite() {
                return Err(Error::NonFiniteScore {
                    doc_id: doc.id().to_string(),
                });
            }
            Ok(ScoredDoc {
                doc_id: doc.id().to_string(),
                score,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sort_ranking(&mut scored);
    scored.truncate(k.min(scored.len()));
    Ok(scored)
}

/// Sort by descending score, ascending doc id on ties.
pub(crate) fn sort_ranking(scored: &mut [ScoredDoc]) {
    scored.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("scores are finite")
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
}
