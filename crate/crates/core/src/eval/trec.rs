//! TREC-format qrels and run file I/O.
//!
//! Qrels lines are whitespace-separated `query_id 0 doc_id relevance`; run
//! lines are `query_id Q0 doc_id rank score tag`. On read, the rank column is
//! authoritative for ordering (the TREC convention), and scores must be
//! consistent with it.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{Qrels, RetrievalRun};

fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::ParseLine {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

/// Parse TREC qrels. Blank lines are ignored; negative relevance is rejected.
pub fn parse_qrels(reader: impl BufRead, path_for_errors: &Path) -> Result<Qrels> {
    let mut qrels = Qrels::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path_for_errors, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(
                path_for_errors,
                i + 1,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        let relevance: i64 = fields[3]
            .parse()
            .map_err(|_| parse_err(path_for_errors, i + 1, "relevance is not an integer"))?;
        if relevance < 0 {
            return Err(parse_err(path_for_errors, i + 1, "negative relevance"));
        }
        qrels
            .add_judgment(fields[0], fields[2], relevance as u32)
            .map_err(|e| parse_err(path_for_errors, i + 1, e.to_string()))?;
    }
    Ok(qrels)
}

pub fn read_qrels(path: impl AsRef<Path>) -> Result<Qrels> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_qrels(std::io::BufReader::new(file), path)
}

/// Render qrels in TREC format, sorted by query then doc id.
pub fn qrels_to_trec_string(qrels: &Qrels) -> String {
    let mut out = String::new();
    for q in qrels.queries() {
        for (doc, rel) in qrels.judged(q).expect("query listed") {
            out.push_str(&format!("{q} 0 {doc} {rel}\n"));
        }
    }
    out
}

/// Parse a TREC run file. Per query, entries are ordered by the rank column;
/// duplicate docs, duplicate ranks, and scores that increase with rank are
/// rejected.
pub fn parse_run(reader: impl BufRead, path_for_errors: &Path) -> Result<RetrievalRun> {
    use std::collections::BTreeMap;
    let mut per_query: BTreeMap<String, Vec<(u64, String, f64, usize)>> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path_for_errors, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(parse_err(
                path_for_errors,
                i + 1,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        }
        let rank: u64 = fields[3]
            .parse()
            .map_err(|_| parse_err(path_for_errors, i + 1, "rank is not an integer"))?;
        let score: f64 = fields[4]
            .parse()
            .map_err(|_| parse_err(path_for_errors, i + 1, "score is not a number"))?;
        per_query
            .entry(fields[0].to_string())
            .or_default()
            .push((rank, fields[2].to_string(), score, i + 1));
    }

    let mut run = RetrievalRun::new();
    for (query_id, mut entries) in per_query {
        entries.sort_by_key(|(rank, _, _, _)| *rank);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(parse_err(
                    path_for_errors,
                    pair[1].3,
                    format!("duplicate rank {} for query '{query_id}'", pair[1].0),
                ));
            }
        }
        let ranked: Vec<(String, f64)> = entries
            .into_iter()
            .map(|(_, doc, score, _)| (doc, score))
            .collect();
        run.insert_ranking(query_id, ranked)?;
    }
    Ok(run)
}

pub fn read_run(path: impl AsRef<Path>) -> Result<RetrievalRun> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_run(std::io::BufReader::new(file), path)
}

/// Render a run in TREC format with 1-based ranks and the given tag.
pub fn run_to_trec_string(run: &RetrievalRun, tag: &str) -> String {
    let mut out = String::new();
    for q in run.queries() {
        for (i, (doc, score)) in run.ranking(q).expect("query listed").iter().enumerate() {
            out.push_str(&format!("{q} Q0 {doc} {} {score} {tag}\n", i + 1));
        }
    }
    out
}

pub fn write_run(run: &RetrievalRun, tag: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, run_to_trec_string(run, tag)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: &str = "test.txt";

    #[test]
    fn qrels_round_trip() {
        let text = "q1 0 d1 1\nq1 0 d2 0\nq2 0 d3 2\n";
        let qrels = parse_qrels(text.as_bytes(), Path::new(P)).unwrap();
        assert_eq!(qrels.relevance("q1", "d1"), 1);
        assert_eq!(qrels.relevance("q2", "d3"), 2);
        assert_eq!(qrels.relevance("q2", "zzz"), 0);
        assert_eq!(qrels_to_trec_string(&qrels), text);
    }

    #[test]
    fn qrels_rejects_malformed() {
        assert!(parse_qrels("q1 0 d1".as_bytes(), Path::new(P)).is_err());
        assert!(parse_qrels("q1 0 d1 x".as_bytes(), Path::new(P)).is_err());
        assert!(parse_qrels("q1 0 d1 -1".as_bytes(), Path::new(P)).is_err());
        assert!(parse_qrels("q1 0 d1 1\nq1 0 d1 1".as_bytes(), Path::new(P)).is_err());
    }

    #[test]
    fn run_rank_column_is_authoritative() {
        // Lines out of order; rank column defines the ranking.
        let text = "q1 Q0 d2 2 0.4 tag\nq1 Q0 d1 1 0.5 tag\nq1 Q0 d3 3 0.3 tag\n";
        let run = parse_run(text.as_bytes(), Path::new(P)).unwrap();
        let ranked = run.ranking("q1").unwrap();
        assert_eq!(ranked[0].0, "d1");
        assert_eq!(ranked[2].0, "d3");
    }

    #[test]
    fn run_ties_preserve_stated_order() {
        let text = "q1 Q0 a 1 0.5 t\nq1 Q0 b 2 0.5 t\n";
        let run = parse_run(text.as_bytes(), Path::new(P)).unwrap();
        assert_eq!(run.ranking("q1").unwrap()[0].0, "a");
    }

    #[test]
    fn run_rejects_inconsistencies() {
        // Scores increasing with rank.
        let bad_order = "q1 Q0 a 1 0.1 t\nq1 Q0 b 2 0.9 t\n";
        assert!(matches!(
            parse_run(bad_order.as_bytes(), Path::new(P)),
            Err(Error::UnsortedRun { .. })
        ));
        let dup_doc = "q1 Q0 a 1 0.9 t\nq1 Q0 a 2 0.8 t\n";
        assert!(matches!(
            parse_run(dup_doc.as_bytes(), Path::new(P)),
            Err(Error::DuplicateRunDoc { .. })
        ));
        let dup_rank = "q1 Q0 a 1 0.9 t\nq1 Q0 b 1 0.8 t\n";
        assert!(parse_run(dup_rank.as_bytes(), Path::new(P)).is_err());
        let short = "q1 Q0 a 1 0.9\n";
        assert!(parse_run(short.as_bytes(), Path::new(P)).is_err());
    }

    #[test]
    fn run_render_parse_round_trip() {
        let mut run = RetrievalRun::new();
        run.insert_ranking(
            "q1",
            vec![("d1".to_string(), 1.5), ("d2".to_string(), 0.25)],
        )
        .unwrap();
        run.insert_ranking("q2", vec![("d9".to_string(), -0.5)]).unwrap();
        let text = run_to_trec_string(&run, "mvr");
        let back = parse_run(text.as_bytes(), Path::new(P)).unwrap();
        assert_eq!(run, back);
        assert_eq!(text, run_to_trec_string(&back, "mvr"));
    }
}
