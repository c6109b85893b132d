//! Synthetic planted-signal corpus for end-to-end retrieval testing.
//!
//! Documents are bags of random unit-norm rows. Each query gets a gold
//! document into which (a blend of) the query's rows are planted; the rest of
//! the gold document and every other document is pure noise. At plant
//! strength 1 the gold document contains the query rows verbatim, so it is
//! the late-interaction argmax with overwhelming probability at the default
//! shapes; at strength 0 the corpus carries no signal and retrieval sits at
//! chance level.
//!
//! The default query length (`n_patches / 16`, at least 1) dilutes the
//! planted signal 1:15 with noise rows, which is what separates the
//! late-interaction score from the mean-pooled baseline: pooling averages the
//! signal away while MaxSim still matches each query row exactly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::eval::Qrels;
use crate::index::CorpusIndex;
use crate::multivector::{Dtype, MultiVector};

/// Parameters for [`synth_corpus`].
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_docs: usize,
    pub n_queries: usize,
    pub dim: usize,
    /// Rows per document.
    pub n_patches: usize,
    /// Rows per query; also the number of planted rows in each gold document.
    pub n_query_rows: usize,
    /// 1.0 plants exact copies of the query rows, 0.0 plants pure noise.
    pub plant_strength: f32,
    pub seed: u64,
}

impl SynthConfig {
    /// Defaults: query length `n_patches / 16` (min 1), plant strength 1.
    pub fn new(n_docs: usize, n_queries: usize, dim: usize, n_patches: usize, seed: u64) -> Self {
        SynthConfig {
            n_docs,
            n_queries,
            dim,
            n_patches,
            n_query_rows: (n_patches / 16).max(1),
            plant_strength: 1.0,
            seed,
        }
    }
}

/// A generated corpus with its queries and single-gold qrels.
#[derive(Debug, Clone)]
pub struct SynthData {
    pub corpus: CorpusIndex,
    pub queries: Vec<MultiVector>,
    pub qrels: Qrels,
}

fn unit_row(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f32> {
    loop {
        let row: Vec<f32> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = row.iter().map(|v| (*v as f64).powi(2)).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return row.iter().map(|v| (*v as f64 / norm) as f32).collect();
        }
    }
}

/// Generate a deterministic planted-signal corpus.
///
/// Query `q{i}`'s gold document is `d{i}`; its first `n_query_rows` rows are
/// `normalize(strength * query_row + (1 - strength) * noise_row)`.
pub fn synth_corpus(cfg: &SynthConfig) -> Result<SynthData> {
    if cfg.n_docs == 0 || cfg.n_queries == 0 || cfg.dim == 0 || cfg.n_patches == 0 {
        return Err(Error::InfeasibleSynth {
            reason: "all sizes must be positive".to_string(),
        });
    }
    if cfg.n_queries > cfg.n_docs {
        return Err(Error::InfeasibleSynth {
            reason: format!(
                "{} queries need {} gold docs but only {} exist",
                cfg.n_queries, cfg.n_queries, cfg.n_docs
            ),
        });
    }
    if cfg.n_query_rows > cfg.n_patches {
        return Err(Error::InfeasibleSynth {
            reason: format!(
                "cannot plant {} query rows into {}-patch documents",
                cfg.n_query_rows, cfg.n_patches
            ),
        });
    }
    if !(0.0..=1.0).contains(&cfg.plant_strength) {
        return Err(Error::InfeasibleSynth {
            reason: format!("plant strength {} outside [0, 1]", cfg.plant_strength),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let queries: Vec<MultiVector> = (0..cfg.n_queries)
        .map(|i| {
            let rows: Vec<Vec<f32>> = (0..cfg.n_query_rows)
                .map(|_| unit_row(&mut rng, cfg.dim))
                .collect();
            MultiVector::from_rows(format!("q{i:05}"), &rows)
        })
        .collect::<Result<_>>()?;

    let s = cfg.plant_strength;
    let docs: Vec<MultiVector> = (0..cfg.n_docs)
        .map(|i| {
            let mut rows: Vec<Vec<f32>> = (0..cfg.n_patches)
                .map(|_| unit_row(&mut rng, cfg.dim))
                .collect();
            if i < cfg.n_queries {
                for (r, q_row) in rows.iter_mut().zip(queries[i].rows()) {
                    let blended: Vec<f64> = q_row
                        .iter()
                        .zip(r.iter())
                        .map(|(q, n)| s as f64 * *q as f64 + (1.0 - s as f64) * *n as f64)
                        .collect();
                    let norm = blended.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 1e-9 {
                        *r = blended.iter().map(|v| (v / norm) as f32).collect();
                    }
                }
            }
            MultiVector::from_rows(format!("d{i:05}"), &rows)
        })
        .collect::<Result<_>>()?;

    let mut qrels = Qrels::new();
    for i in 0..cfg.n_queries {
        qrels.add_judgment(format!("q{i:05}"), format!("d{i:05}"), 1)?;
    }

    let mut meta = std::collections::BTreeMap::new();
    meta.insert("name".to_string(), "synthetic-planted".to_string());
    meta.insert("seed".to_string(), cfg.seed.to_string());
    let corpus = CorpusIndex::new(docs, cfg.dim, Dtype::F32, meta)?;
    Ok(SynthData {
        corpus,
        queries,
        qrels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{ndcg_at_k, recall_at_k, RetrievalRun};
    use crate::scoring::{mean_pool, pooled_score, rank_corpus};

    fn run_from(data: &SynthData, k: usize) -> RetrievalRun {
        let mut run = RetrievalRun::new();
        for query in &data.queries {
            let ranked = rank_corpus(query, data.corpus.docs(), k).unwrap();
            run.insert_scored(query.id(), &ranked).unwrap();
        }
        run
    }

    #[test]
    fn planted_signal_is_retrieved_perfectly() {
        // Scaled-down version of the default shape (D=128, 64 patches,
        // strength 1.0) to keep the unit test quick.
        let data = synth_corpus(&SynthConfig::new(30, 10, 128, 64, 7)).unwrap();
        let run = run_from(&data, 5);
        assert_eq!(ndcg_at_k(&run, &data.qrels, 5).unwrap().mean, 1.0);
        assert_eq!(recall_at_k(&run, &data.qrels, 1).unwrap().mean, 1.0);
    }

    #[test]
    fn single_doc_single_query_is_trivially_perfect() {
        let data = synth_corpus(&SynthConfig::new(1, 1, 16, 4, 0)).unwrap();
        let run = run_from(&data, 5);
        assert_eq!(ndcg_at_k(&run, &data.qrels, 5).unwrap().mean, 1.0);
    }

    #[test]
    fn zero_plant_strength_is_chance_level() {
        // Recall@1 over many seeds concentrates at 1/n_docs within three
        // standard errors of the binomial mean.
        let n_docs = 20;
        let n_queries = 5;
        let n_seeds = 60;
        let mut hits = 0u32;
        let mut trials = 0u32;
        for seed in 0..n_seeds {
            let mut cfg = SynthConfig::new(n_docs, n_queries, 16, 8, seed);
            cfg.plant_strength = 0.0;
            let data = synth_corpus(&cfg).unwrap();
            let run = run_from(&data, 1);
            for q in data.qrels.queries() {
                trials += 1;
                let top = &run.ranking(q).unwrap()[0].0;
                if data.qrels.relevance(q, top) > 0 {
                    hits += 1;
                }
            }
        }
        let p = 1.0 / n_docs as f64;
        let observed = hits as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (observed - p).abs() <= 3.0 * se,
            "chance-level recall {observed} vs expected {p} (3 SE = {:.4})",
            3.0 * se
        );
    }

    #[test]
    fn diluted_signal_favors_late_interaction_over_pooling() {
        // 4 signal rows against 60 noise rows: pooling averages the signal
        // away, MaxSim does not.
        let mut li_hits = 0u32;
        let mut pooled_hits = 0u32;
        let mut trials = 0u32;
        for seed in 0..10 {
            let data = synth_corpus(&SynthConfig::new(40, 10, 64, 64, 100 + seed)).unwrap();
            let pooled_docs: Vec<_> = data.corpus.docs().iter().map(mean_pool).collect();
            for query in &data.queries {
                trials += 1;
                let gold = format!("d{}", &query.id()[1..]);

                let li_top = &rank_corpus(query, data.corpus.docs(), 1).unwrap()[0].doc_id;
                li_hits += (li_top == &gold) as u32;

                let qp = mean_pool(query);
                let mut best: Option<(&str, f32)> = None;
                for dp in &pooled_docs {
                    let s = pooled_score(&qp, dp).unwrap();
                    if best.is_none_or(|(_, b)| s > b) {
                        best = Some((dp.id(), s));
                    }
                }
                pooled_hits += (best.unwrap().0 == gold) as u32;
            }
        }
        assert_eq!(li_hits, trials, "late interaction must be perfect here");
        assert!(
            pooled_hits < li_hits,
            "pooled recall {pooled_hits}/{trials} should be strictly below late interaction"
        );
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = synth_corpus(&SynthConfig::new(5, 3, 8, 4, 99)).unwrap();
        let b = synth_corpus(&SynthConfig::new(5, 3, 8, 4, 99)).unwrap();
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.queries, b.queries);
        assert_eq!(a.qrels, b.qrels);
    }

    #[test]
    fn infeasible_configs_error() {
        assert!(synth_corpus(&SynthConfig::new(2, 3, 8, 4, 0)).is_err());
        assert!(synth_corpus(&SynthConfig::new(0, 0, 8, 4, 0)).is_err());
        let mut cfg = SynthConfig::new(3, 2, 8, 4, 0);
        cfg.n_query_rows = 9;
        assert!(synth_corpus(&cfg).is_err());
        cfg = SynthConfig::new(3, 2, 8, 4, 0);
        cfg.plant_strength = 1.5;
        assert!(synth_corpus(&cfg).is_err());
    }

    #[test]
    fn rows_are_unit_norm() {
        let data = synth_corpus(&SynthConfig::new(4, 2, 32, 8, 5)).unwrap();
        for doc in data.corpus.docs() {
            for row in doc.rows() {
                let norm = row.iter().map(|v| (*v as f64).powi(2)).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-5, "row norm {norm}");
            }
        }
    }
}
