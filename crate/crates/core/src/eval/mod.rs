//! IR evaluation: NDCG@k, Recall@k, and MRR over runs and qrels, with
//! TREC-compatible file I/O and a synthetic planted-signal corpus generator
//! for end-to-end testing without an embedding model.
//!
//! Metric conventions:
//! * NDCG uses the exponential gain `2^rel - 1` and `log2(rank + 1)`
//!   discounting. With binary single-gold relevance this reduces to
//!   `1 / log2(rank + 1)` when the gold ranks within the cutoff, else 0.
//! * Queries judged in the qrels but missing from the run score 0 and are
//!   counted in the mean.
//! * Queries with no positively judged document are excluded and reported.
//! * A run query absent from the qrels is an error.

pub mod synth;
pub mod trec;

pub use synth::{synth_corpus, SynthConfig, SynthData};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multivector::ScoredDoc;

/// Relevance judgments: query id -> doc id -> graded relevance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Qrels::default()
    }

    pub fn add_judgment(
        &mut self,
        query_id: impl Into<String>,
        doc_id: impl Into<String>,
        relevance: u32,
    ) -> Result<()> {
        let query_id = query_id.into();
        let doc_id = doc_id.into();
        let per_query = self.judgments.entry(query_id.clone()).or_default();
        if per_query.contains_key(&doc_id) {
            return Err(Error::InvalidArgument {
                what: "qrels",
                reason: format!("duplicate judgment for ({query_id}, {doc_id})"),
            });
        }
        per_query.insert(doc_id, relevance);
        Ok(())
    }

    pub fn relevance(&self, query_id: &str, doc_id: &str) -> u32 {
        self.judgments
            .get(query_id)
            .and_then(|m| m.get(doc_id))
            .copied()
            .unwrap_or(0)
    }

    pub fn contains_query(&self, query_id: &str) -> bool {
        self.judgments.contains_key(query_id)
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn judged(&self, query_id: &str) -> Option<&BTreeMap<String, u32>> {
        self.judgments.get(query_id)
    }

    /// Number of positively judged documents for a query.
    pub fn n_relevant(&self, query_id: &str) -> usize {
        self.judgments
            .get(query_id)
            .map_or(0, |m| m.values().filter(|&&r| r > 0).count())
    }

    pub fn len(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }
}

/// Ranked results per query: descending score, unique doc ids, with score
/// ties kept in their stated order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RetrievalRun {
    rankings: BTreeMap<String, Vec<(String, f64)>>,
}

impl RetrievalRun {
    pub fn new() -> Self {
        RetrievalRun::default()
    }

    /// Insert one query's ranking, validating order and uniqueness.
    pub fn insert_ranking(
        &mut self,
        query_id: impl Into<String>,
        ranked: Vec<(String, f64)>,
    ) -> Result<()> {
        let query_id = query_id.into();
        if self.rankings.contains_key(&query_id) {
            return Err(Error::InvalidArgument {
                what: "run",
                reason: format!("duplicate ranking for query '{query_id}'"),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for pair in ranked.windows(2) {
            if pair[1].1 > pair[0].1 {
                return Err(Error::UnsortedRun {
                    query_id: query_id.clone(),
                });
            }
        }
        for (doc_id, score) in &ranked {
            if !score.is_finite() {
                return Err(Error::NonFiniteScore {
                    doc_id: doc_id.clone(),
                });
            }
            if !seen.insert(doc_id.as_str()) {
                return Err(Error::DuplicateRunDoc {
                    query_id: query_id.clone(),
                    doc_id: doc_id.clone(),
                });
            }
        }
        self.rankings.insert(query_id, ranked);
        Ok(())
    }

    /// Convenience: insert a [`crate::scoring::rank_corpus`] result.
    pub fn insert_scored(
        &mut self,
        query_id: impl Into<String>,
        ranked: &[ScoredDoc],
    ) -> Result<()> {
        self.insert_ranking(
            query_id,
            ranked
                .iter()
                .map(|s| (s.doc_id.clone(), s.score as f64))
                .collect(),
        )
    }

    pub fn ranking(&self, query_id: &str) -> Option<&[(String, f64)]> {
        self.rankings.get(query_id).map(Vec::as_slice)
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.rankings.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.rankings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rankings.is_empty()
    }
}

/// One metric over one run: per-query values and their arithmetic mean.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSlice {
    pub per_query: BTreeMap<String, f64>,
    pub mean: f64,
    /// Queries skipped because they have no positively judged document.
    pub excluded: Vec<String>,
}

fn check_run_judged(run: &RetrievalRun, qrels: &Qrels) -> Result<()> {
    for q in run.queries() {
        if !qrels.contains_query(q) {
            return Err(Error::UnjudgedQuery {
                query_id: q.to_string(),
            });
        }
    }
    Ok(())
}

/// Evaluate `metric` for every qrels query with at least one positive
/// judgment; queries missing from the run score 0.
fn per_query_metric(
    run: &RetrievalRun,
    qrels: &Qrels,
    metric: impl Fn(&[(String, f64)], &BTreeMap<String, u32>) -> f64,
) -> Result<MetricSlice> {
    check_run_judged(run, qrels)?;
    let mut per_query = BTreeMap::new();
    let mut excluded = Vec::new();
    for query_id in qrels.queries() {
        if qrels.n_relevant(query_id) == 0 {
            excluded.push(query_id.to_string());
            continue;
        }
        let judged = qrels.judged(query_id).expect("query comes from qrels");
        let value = match run.ranking(query_id) {
            Some(ranked) => metric(ranked, judged),
            None => 0.0,
        };
        per_query.insert(query_id.to_string(), value);
    }
    let mean = if per_query.is_empty() {
        0.0
    } else {
        per_query.values().sum::<f64>() / per_query.len() as f64
    };
    Ok(MetricSlice {
        per_query,
        mean,
        excluded,
    })
}

fn gain(rel: u32) -> f64 {
    2.0f64.powi(rel as i32) - 1.0
}

fn discount(rank: usize) -> f64 {
    ((rank + 1) as f64).log2()
}

/// NDCG@k with exponential gain.
pub fn ndcg_at_k(run: &RetrievalRun, qrels: &Qrels, k: usize) -> Result<MetricSlice> {
    if k == 0 {
        return Err(Error::InvalidArgument {
            what: "k",
            reason: "must be at least 1".to_string(),
        });
    }
    per_query_metric(run, qrels, |ranked, judged| {
        let dcg: f64 = ranked
            .iter()
            .take(k)
            .enumerate()
            .map(|(i, (doc_id, _))| {
                let rel = judged.get(doc_id).copied().unwrap_or(0);
                gain(rel) / discount(i + 1)
            })
            .sum();
        let mut rels: Vec<u32> = judged.values().copied().filter(|&r| r > 0).collect();
        rels.sort_unstable_by(|a, b| b.cmp(a));
        let idcg: f64 = rels
            .iter()
            .take(k)
            .enumerate()
            .map(|(i, &rel)| gain(rel) / discount(i + 1))
            .sum();
        dcg / idcg
    })
}

/// Fraction of positively judged documents appearing in the top k.
pub fn recall_at_k(run: &RetrievalRun, qrels: &Qrels, k: usize) -> Result<MetricSlice> {
    if k == 0 {
        return Err(Error::InvalidArgument {
            what: "k",
            reason: "must be at least 1".to_string(),
        });
    }
    per_query_metric(run, qrels, |ranked, judged| {
        let total = judged.values().filter(|&&r| r > 0).count();
        let hits = ranked
            .iter()
            .take(k)
            .filter(|(doc_id, _)| judged.get(doc_id).is_some_and(|&r| r > 0))
            .count();
        hits as f64 / total as f64
    })
}

/// Mean reciprocal rank of the first positively judged document, 0 if none is
/// retrieved.
pub fn mrr(run: &RetrievalRun, qrels: &Qrels) -> Result<MetricSlice> {
    per_query_metric(run, qrels, |ranked, judged| {
        ranked
            .iter()
            .position(|(doc_id, _)| judged.get(doc_id).is_some_and(|&r| r > 0))
            .map_or(0.0, |i| 1.0 / (i + 1) as f64)
    })
}

/// Full metric report: NDCG@k and Recall@k for every requested k, plus MRR.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MetricReport {
    pub k: Vec<usize>,
    pub aggregate: BTreeMap<String, f64>,
    pub per_query: BTreeMap<String, BTreeMap<String, f64>>,
    pub excluded_queries: Vec<String>,
}

impl MetricReport {
    /// Stable-keyed JSON rendering.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn evaluate(run: &RetrievalRun, qrels: &Qrels, ks: &[usize]) -> Result<MetricReport> {
    let mut aggregate = BTreeMap::new();
    let mut per_query: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();

    let mut slices: Vec<(String, MetricSlice)> = vec![("mrr".to_string(), mrr(run, qrels)?)];
    for &k in ks {
        slices.push((format!("ndcg@{k}"), ndcg_at_k(run, qrels, k)?));
        slices.push((format!("recall@{k}"), recall_at_k(run, qrels, k)?));
    }
    let excluded_queries = slices[0].1.excluded.clone();
    for (name, slice) in slices {
        aggregate.insert(name.clone(), slice.mean);
        for (q, v) in slice.per_query {
            per_query.entry(q).or_default().insert(name.clone(), v);
        }
    }
    Ok(MetricReport {
        k: ks.to_vec(),
        aggregate,
        per_query,
        excluded_queries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_single(query: &str, docs: &[(&str, f64)]) -> RetrievalRun {
        let mut run = RetrievalRun::new();
        run.insert_ranking(
            query,
            docs.iter().map(|(d, s)| (d.to_string(), *s)).collect(),
        )
        .unwrap();
        run
    }

    fn qrels_single_gold(query: &str, gold: &str) -> Qrels {
        let mut qrels = Qrels::new();
        qrels.add_judgment(query, gold, 1).unwrap();
        qrels
    }

    #[test]
    fn ndcg_gold_at_rank_1_is_one() {
        let run = run_single("q1", &[("gold", 3.0), ("x", 2.0), ("y", 1.0)]);
        let qrels = qrels_single_gold("q1", "gold");
        let slice = ndcg_at_k(&run, &qrels, 5).unwrap();
        assert_eq!(slice.per_query["q1"], 1.0);
        assert_eq!(slice.mean, 1.0);
    }

    #[test]
    fn ndcg_gold_at_rank_2() {
        let run = run_single("q1", &[("x", 3.0), ("gold", 2.0), ("y", 1.0)]);
        let qrels = qrels_single_gold("q1", "gold");
        let got = ndcg_at_k(&run, &qrels, 5).unwrap().mean;
        let want = 1.0 / 3.0f64.log2(); // 0.63093
        assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        assert!((got - 0.63093).abs() < 1e-5);
    }

    #[test]
    fn ndcg_gold_outside_cutoff_is_zero() {
        let docs: Vec<(String, f64)> = (0..6)
            .map(|i| (format!("d{i}"), 10.0 - i as f64))
            .chain(std::iter::once(("gold".to_string(), 1.0)))
            .collect();
        let mut run = RetrievalRun::new();
        run.insert_ranking("q1", docs).unwrap();
        let qrels = qrels_single_gold("q1", "gold");
        assert_eq!(ndcg_at_k(&run, &qrels, 5).unwrap().mean, 0.0);
    }

    #[test]
    fn recall_examples() {
        let qrels = qrels_single_gold("q1", "gold");
        let rank1 = run_single("q1", &[("gold", 2.0), ("x", 1.0)]);
        assert_eq!(recall_at_k(&rank1, &qrels, 1).unwrap().mean, 1.0);
        let rank2 = run_single("q1", &[("x", 2.0), ("gold", 1.0)]);
        assert_eq!(recall_at_k(&rank2, &qrels, 1).unwrap().mean, 0.0);
    }

    #[test]
    fn recall_counts_fraction_over_queries() {
        // 10 queries, 7 golds at rank 1: Recall@1 = 0.7.
        let mut run = RetrievalRun::new();
        let mut qrels = Qrels::new();
        for i in 0..10 {
            let q = format!("q{i}");
            qrels.add_judgment(&q, "gold", 1).unwrap();
            if i < 7 {
                run.insert_ranking(&q, vec![("gold".to_string(), 2.0), ("x".to_string(), 1.0)])
                    .unwrap();
            } else {
                run.insert_ranking(&q, vec![("x".to_string(), 2.0), ("gold".to_string(), 1.0)])
                    .unwrap();
            }
        }
        let got = recall_at_k(&run, &qrels, 1).unwrap().mean;
        assert!((got - 0.7).abs() < 1e-12);
    }

    #[test]
    fn mrr_examples() {
        let qrels = qrels_single_gold("q1", "gold");
        let rank1 = run_single("q1", &[("gold", 2.0), ("x", 1.0)]);
        assert_eq!(mrr(&rank1, &qrels).unwrap().mean, 1.0);
        let rank4 = run_single(
            "q1",
            &[("a", 5.0), ("b", 4.0), ("c", 3.0), ("gold", 2.0)],
        );
        assert_eq!(mrr(&rank4, &qrels).unwrap().mean, 0.25);
    }

    #[test]
    fn query_missing_from_run_scores_zero_but_counts() {
        let mut qrels = Qrels::new();
        qrels.add_judgment("q1", "gold", 1).unwrap();
        qrels.add_judgment("q2", "gold", 1).unwrap();
        let run = run_single("q1", &[("gold", 1.0)]);
        let slice = ndcg_at_k(&run, &qrels, 5).unwrap();
        assert_eq!(slice.per_query["q2"], 0.0);
        assert_eq!(slice.mean, 0.5);
    }

    #[test]
    fn zero_relevant_queries_are_excluded_not_fatal() {
        let mut qrels = Qrels::new();
        qrels.add_judgment("q1", "gold", 1).unwrap();
        qrels.add_judgment("q2", "irrelevant", 0).unwrap();
        let run = run_single("q1", &[("gold", 1.0)]);
        let slice = ndcg_at_k(&run, &qrels, 5).unwrap();
        assert_eq!(slice.excluded, vec!["q2".to_string()]);
        assert_eq!(slice.mean, 1.0);
        assert!(!slice.per_query.contains_key("q2"));
    }

    #[test]
    fn run_query_not_in_qrels_errors() {
        let run = run_single("mystery", &[("d", 1.0)]);
        let qrels = qrels_single_gold("q1", "gold");
        assert!(matches!(
            mrr(&run, &qrels),
            Err(Error::UnjudgedQuery { .. })
        ));
    }

    #[test]
    fn run_validation() {
        let mut run = RetrievalRun::new();
        assert!(matches!(
            run.insert_ranking("q", vec![("a".to_string(), 1.0), ("b".to_string(), 2.0)]),
            Err(Error::UnsortedRun { .. })
        ));
        assert!(matches!(
            run.insert_ranking("q", vec![("a".to_string(), 2.0), ("a".to_string(), 1.0)]),
            Err(Error::DuplicateRunDoc { .. })
        ));
        run.insert_ranking("q", vec![("a".to_string(), 2.0), ("b".to_string(), 2.0)])
            .unwrap();
        assert!(run.insert_ranking("q", vec![]).is_err());
    }

    #[test]
    fn graded_relevance_uses_exponential_gain() {
        // Two judged docs with grades 2 and 1; run returns them in the wrong
        // order. DCG = (2^1-1)/log2(2) + (2^2-1)/log2(3);
        // IDCG = 3/log2(2) + 1/log2(3).
        let mut qrels = Qrels::new();
        qrels.add_judgment("q1", "best", 2).unwrap();
        qrels.add_judgment("q1", "ok", 1).unwrap();
        let run = run_single("q1", &[("ok", 2.0), ("best", 1.0)]);
        let got = ndcg_at_k(&run, &qrels, 5).unwrap().mean;
        let dcg = 1.0 / 2.0f64.log2() + 3.0 / 3.0f64.log2();
        let idcg = 3.0 / 2.0f64.log2() + 1.0 / 3.0f64.log2();
        assert!((got - dcg / idcg).abs() < 1e-12);
    }

    #[test]
    fn report_json_is_stable_and_complete() {
        let mut qrels = Qrels::new();
        qrels.add_judgment("q1", "gold", 1).unwrap();
        let run = run_single("q1", &[("gold", 1.0)]);
        let report = evaluate(&run, &qrels, &[1, 5]).unwrap();
        assert_eq!(report.aggregate["mrr"], 1.0);
        assert_eq!(report.aggregate["ndcg@5"], 1.0);
        assert_eq!(report.aggregate["recall@1"], 1.0);
        let json = report.to_json();
        let again = evaluate(&run, &qrels, &[1, 5]).unwrap().to_json();
        assert_eq!(json, again);
        // Keys appear in sorted order within each block.
        let mrr_pos = json.find("\"mrr\"").unwrap();
        let ndcg1_pos = json.find("\"ndcg@1\"").unwrap();
        let recall5_pos = json.find("\"recall@5\"").unwrap();
        assert!(mrr_pos < ndcg1_pos && ndcg1_pos < recall5_pos);
    }

    #[test]
    fn metrics_match_definitional_oracle_on_random_instances() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(2024);
        for instance in 0..100 {
            let n_docs = rng.random_range(1..=20usize);
            let n_queries = rng.random_range(1..=4usize);
            let k = rng.random_range(1..=8usize);
            let mut qrels = Qrels::new();
            let mut run = RetrievalRun::new();
            let mut any_positive = false;
            for qi in 0..n_queries {
                let q = format!("q{qi}");
                // Random graded judgments over a subset of docs; every run
                // query must be judged, so force at least one entry.
                let mut judged_any = false;
                for di in 0..n_docs {
                    if rng.random_bool(0.4) || (di == n_docs - 1 && !judged_any) {
                        let rel = rng.random_range(0..=3u32);
                        any_positive |= rel > 0;
                        judged_any = true;
                        qrels.add_judgment(&q, format!("d{di}"), rel).unwrap();
                    }
                }
                // Random ranking over a random subset of docs.
                let mut scored: Vec<(String, f64)> = Vec::new();
                for di in 0..n_docs {
                    if rng.random_bool(0.8) {
                        scored.push((format!("d{di}"), rng.random_range(-5.0..5.0)));
                    }
                }
                scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
                run.insert_ranking(&q, scored).unwrap();
            }
            if !any_positive {
                continue;
            }

            let ndcg = ndcg_at_k(&run, &qrels, k).unwrap();
            let recall = recall_at_k(&run, &qrels, k).unwrap();
            let rr = mrr(&run, &qrels).unwrap();

            // Definitional oracle, written directly from the formulas.
            for q in qrels.queries() {
                if qrels.n_relevant(q) == 0 {
                    continue;
                }
                let ranked: Vec<&str> = run
                    .ranking(q)
                    .map(|r| r.iter().map(|(d, _)| d.as_str()).collect())
                    .unwrap_or_default();
                let judged = qrels.judged(q).unwrap();

                let mut dcg = 0.0f64;
                for (i, d) in ranked.iter().take(k).enumerate() {
                    let rel = judged.get(*d).copied().unwrap_or(0);
                    dcg += (2.0f64.powi(rel as i32) - 1.0) / ((i + 2) as f64).log2();
                }
                let mut ideal: Vec<u32> = judged.values().copied().collect();
                ideal.sort_unstable_by(|a, b| b.cmp(a));
                let mut idcg = 0.0f64;
                for (i, rel) in ideal.iter().take(k).enumerate() {
                    idcg += (2.0f64.powi(*rel as i32) - 1.0) / ((i + 2) as f64).log2();
                }
                let want_ndcg = dcg / idcg;
                assert!(
                    (ndcg.per_query[q] - want_ndcg).abs() < 1e-12,
                    "instance {instance} query {q}: ndcg {} vs oracle {want_ndcg}",
                    ndcg.per_query[q]
                );

                let total = judged.values().filter(|&&r| r > 0).count();
                let hits = ranked
                    .iter()
                    .take(k)
                    .filter(|d| judged.get(**d).copied().unwrap_or(0) > 0)
                    .count();
                let want_recall = hits as f64 / total as f64;
                assert!((recall.per_query[q] - want_recall).abs() < 1e-12);

                let want_rr = ranked
                    .iter()
                    .position(|d| judged.get(*d).copied().unwrap_or(0) > 0)
                    .map_or(0.0, |i| 1.0 / (i + 1) as f64);
                assert!((rr.per_query[q] - want_rr).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn moving_gold_up_never_decreases_metrics() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(404);
        for _ in 0..50 {
            let n = rng.random_range(2..12usize);
            let gold_pos = rng.random_range(1..n);
            let k = rng.random_range(1..=6usize);
            let build = |gold_at: usize| {
                let mut docs: Vec<(String, f64)> = (0..n)
                    .map(|i| (format!("d{i}"), (n - i) as f64))
                    .collect();
                docs[gold_at].0 = "gold".to_string();
                let mut run = RetrievalRun::new();
                run.insert_ranking("q", docs).unwrap();
                run
            };
            let qrels = qrels_single_gold("q", "gold");
            let lower = build(gold_pos);
            let higher = build(gold_pos - 1);
            for (name, f) in [
                ("ndcg", Box::new(|r: &RetrievalRun| ndcg_at_k(r, &qrels, k).unwrap().mean)
                    as Box<dyn Fn(&RetrievalRun) -> f64>),
                ("recall", Box::new(|r: &RetrievalRun| recall_at_k(r, &qrels, k).unwrap().mean)),
                ("mrr", Box::new(|r: &RetrievalRun| mrr(r, &qrels).unwrap().mean)),
            ] {
                let lo = f(&lower);
                let hi = f(&higher);
                assert!(hi >= lo, "{name} decreased when gold moved up: {lo} -> {hi}");
            }
        }
    }

    #[test]
    fn metrics_depend_only_on_rank_order() {
        let mut qrels = Qrels::new();
        qrels.add_judgment("q", "gold", 1).unwrap();
        qrels.add_judgment("q", "silver", 1).unwrap();
        let docs = [("a", 4.0), ("gold", 3.0), ("b", 2.0), ("silver", 1.0)];
        let base = run_single("q", &docs);
        // Strictly monotone transforms of the scores.
        for transform in [|s: f64| 2.0 * s + 7.0, |s: f64| s.exp(), |s: f64| s * s * s] {
            let transformed: Vec<(&str, f64)> =
                docs.iter().map(|(d, s)| (*d, transform(*s))).collect();
            let t = run_single("q", &transformed);
            for k in 1..=5 {
                assert_eq!(
                    ndcg_at_k(&base, &qrels, k).unwrap().mean,
                    ndcg_at_k(&t, &qrels, k).unwrap().mean
                );
                assert_eq!(
                    recall_at_k(&base, &qrels, k).unwrap().mean,
                    recall_at_k(&t, &qrels, k).unwrap().mean
                );
            }
            assert_eq!(mrr(&base, &qrels).unwrap().mean, mrr(&t, &qrels).unwrap().mean);
        }
    }

    #[test]
    fn ideal_ranking_has_ndcg_one() {
        let mut qrels = Qrels::new();
        qrels.add_judgment("q", "a", 3).unwrap();
        qrels.add_judgment("q", "b", 2).unwrap();
        qrels.add_judgment("q", "c", 1).unwrap();
        let run = run_single("q", &[("a", 3.0), ("b", 2.0), ("c", 1.0)]);
        assert_eq!(ndcg_at_k(&run, &qrels, 3).unwrap().mean, 1.0);
    }
}
