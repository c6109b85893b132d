//! Okapi BM25 lexical baseline with page-level max-pooling.
//!
//! Text is ingested as sub-page chunks (JSON lines of
//! `{"chunk_id", "page_id", "text"}`); chunks are the scoring unit and pages
//! are scored as the max over their chunks. The scoring formula is standard
//! Okapi BM25 with the non-negative `ln(1 + ·)` IDF:
//!
//! ```text
//! score(q, c) = Σ_{t ∈ q} IDF(t) * f(t,c) * (k1 + 1)
//!                         / (f(t,c) + k1 * (1 - b + b * dl/avgdl))
//! IDF(t) = ln(1 + (N - df(t) + 0.5) / (df(t) + 0.5))
//! ```
//!
//! with `k1 = 1.2`, `b = 0.75` by default. Document-frequency statistics are
//! computed over chunks, not pages. No stemming or stopword removal happens
//! unless enabled in [`TokenizerConfig`].

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::BufRead;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Unicode-aware lowercasing, split on non-alphanumeric boundaries, empty
/// tokens dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Okapi BM25 parameters (Robertson defaults).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

/// Optional token filtering applied identically to chunks and queries.
#[derive(Debug, Clone, Default)]
pub struct TokenizerConfig {
    /// Tokens removed after lowercasing (compared post-[`tokenize`]).
    pub stopwords: HashSet<String>,
    /// Snowball English stemming, off by default.
    pub stem: bool,
}

impl TokenizerConfig {
    pub fn apply(&self, text: &str) -> Vec<String> {
        let mut tokens = tokenize(text);
        if !self.stopwords.is_empty() {
            tokens.retain(|t| !self.stopwords.contains(t));
        }
        if self.stem {
            let stemmer = rust_stemmers::Stemmer::create(rust_stemmers::Algorithm::English);
            tokens = tokens
                .iter()
                .map(|t| stemmer.stem(t).into_owned())
                .collect();
        }
        tokens
    }
}

/// One sub-page text chunk, as ingested from JSON lines.
#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
pub struct ChunkRecord {
    pub chunk_id: String,
    pub page_id: String,
    pub text: String,
}

#[derive(Debug, Clone)]
struct ChunkStats {
    tf: HashMap<String, u32>,
    dl: f64,
}

/// Tokenized chunk corpus with the statistics BM25 needs.
///
/// Chunks that tokenize to nothing are dropped at build time; pages are the
/// groups of surviving chunks.
#[derive(Debug, Clone)]
pub struct LexicalCorpus {
    chunks: Vec<ChunkStats>,
    chunk_index: HashMap<String, usize>,
    pages: BTreeMap<String, Vec<usize>>,
    df: HashMap<String, u32>,
    avgdl: f64,
    n: usize,
    params: Bm25Params,
    tokenizer: TokenizerConfig,
}

impl LexicalCorpus {
    pub fn build(
        records: Vec<ChunkRecord>,
        params: Bm25Params,
        tokenizer: TokenizerConfig,
    ) -> Result<Self> {
        let mut chunks = Vec::new();
        let mut chunk_index = HashMap::new();
        let mut pages: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut df: HashMap<String, u32> = HashMap::new();

        for record in records {
            let tokens = tokenizer.apply(&record.text);
            if tokens.is_empty() {
                continue;
            }
            if chunk_index.contains_key(&record.chunk_id) {
                return Err(Error::DuplicateChunkId {
                    id: record.chunk_id,
                });
            }
            let mut tf: HashMap<String, u32> = HashMap::new();
            let dl = tokens.len() as f64;
            for t in tokens {
                *tf.entry(t).or_insert(0) += 1;
            }
            for t in tf.keys() {
                *df.entry(t.clone()).or_insert(0) += 1;
            }
            let idx = chunks.len();
            chunk_index.insert(record.chunk_id, idx);
            pages.entry(record.page_id).or_default().push(idx);
            chunks.push(ChunkStats { tf, dl });
        }

        let n = chunks.len();
        if n == 0 {
            return Err(Error::EmptyLexicalCorpus);
        }
        let avgdl = chunks.iter().map(|c| c.dl).sum::<f64>() / n as f64;
        Ok(LexicalCorpus {
            chunks,
            chunk_index,
            pages,
            df,
            avgdl,
            n,
            params,
            tokenizer,
        })
    }

    /// Ingest JSON-lines chunks: one `{"chunk_id", "page_id", "text"}` object
    /// per line. Blank lines are ignored.
    pub fn from_jsonl(
        reader: impl BufRead,
        path_for_errors: &Path,
        params: Bm25Params,
        tokenizer: TokenizerConfig,
    ) -> Result<Self> {
        let mut records = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path_for_errors, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ChunkRecord =
                serde_json::from_str(&line).map_err(|e| Error::ParseLine {
                    path: path_for_errors.to_path_buf(),
                    line: i + 1,
                    reason: e.to_string(),
                })?;
            records.push(record);
        }
        LexicalCorpus::build(records, params, tokenizer)
    }

    pub fn from_jsonl_path(
        path: impl AsRef<Path>,
        params: Bm25Params,
        tokenizer: TokenizerConfig,
    ) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        LexicalCorpus::from_jsonl(std::io::BufReader::new(file), path, params, tokenizer)
    }

    /// Tokenize a query with the same configuration the corpus was built with.
    pub fn tokenize_query(&self, text: &str) -> Vec<String> {
        self.tokenizer.apply(text)
    }

    pub fn n_chunks(&self) -> usize {
        self.n
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn page_ids(&self) -> impl Iterator<Item = &str> {
        self.pages.keys().map(String::as_str)
    }

    fn idf(&self, term: &str) -> f64 {
        let df = self.df.get(term).copied().unwrap_or(0) as f64;
        let n = self.n as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Okapi BM25 score of one chunk for a token-list query. Query tokens are
    /// used as given; repeated tokens contribute once per occurrence.
    pub fn bm25_score(&self, query_tokens: &[String], chunk_id: &str) -> Result<f64> {
        if query_tokens.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let &idx = self.chunk_index.get(chunk_id).ok_or_else(|| Error::UnknownChunk {
            id: chunk_id.to_string(),
        })?;
        Ok(self.score_chunk(query_tokens, &self.chunks[idx]))
    }

    fn score_chunk(&self, query_tokens: &[String], chunk: &ChunkStats) -> f64 {
        let Bm25Params { k1, b } = self.params;
        let mut score = 0.0;
        for t in query_tokens {
            let f = chunk.tf.get(t).copied().unwrap_or(0) as f64;
            if f == 0.0 {
                continue; // absent terms contribute nothing
            }
            let norm = f + k1 * (1.0 - b + b * chunk.dl / self.avgdl);
            score += self.idf(t) * f * (k1 + 1.0) / norm;
        }
        score
    }

    /// Page score: max over the page's chunk scores.
    pub fn page_score(&self, query_tokens: &[String], page_id: &str) -> Result<f64> {
        if query_tokens.is_empty() {
            return Err(Error::EmptyQuery);
        }
        let chunk_ids = self.pages.get(page_id).ok_or_else(|| Error::UnknownPage {
            id: page_id.to_string(),
        })?;
        Ok(chunk_ids
            .iter()
            .map(|&i| self.score_chunk(query_tokens, &self.chunks[i]))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// All pages ranked by max-pooled BM25, descending, ties broken by
    /// ascending page id, truncated to `k`.
    pub fn rank_pages(&self, query_tokens: &[String], k: usize) -> Result<Vec<(String, f64)>> {
        if k == 0 {
            return Err(Error::InvalidArgument {
                what: "k",
                reason: "must be at least 1".to_string(),
            });
        }
        let mut ranked: Vec<(String, f64)> = self
            .pages
            .keys()
            .map(|p| {
                let score = self.page_score(query_tokens, p)?;
                Ok((p.clone(), score))
            })
            .collect::<Result<_>>()?;
        ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(k);
        Ok(ranked)
    }
}
