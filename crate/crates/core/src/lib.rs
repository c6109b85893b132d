//! Multi-vector late-interaction retrieval engine.
//!
//! Everything downstream of the embedding model: per-patch/per-token
//! embedding indexing, MaxSim late-interaction ranking, the pooled bi-encoder
//! and Okapi BM25 baselines, contrastive training losses with analytic
//! gradients, centroid compression, IR evaluation metrics, and per-token
//! similarity maps.

pub mod error;
pub mod eval;
pub mod index;
pub mod interpret;
pub mod lexical;
pub mod loss;
pub mod multivector;
pub mod scoring;

pub use error::{Error, Result};
pub use eval::{
    evaluate, mrr, ndcg_at_k, recall_at_k, synth_corpus, MetricReport, MetricSlice, Qrels,
    RetrievalRun, SynthConfig, SynthData,
};
pub use index::{
    compress, compressed_footprint, decompress, footprint, read_compressed_index, read_index,
    write_compressed_index, write_index, CompressedIndex, CorpusIndex, Footprint, ResidualDtype,
};
pub use interpret::{export_map, similarity_map, MapFormat, Normalization, SimilarityMap};
pub use lexical::{tokenize, Bm25Params, LexicalCorpus, TokenizerConfig};
pub use loss::{inbatch_negatives_loss, pairwise_ce_loss, Batch, LossResult};
pub use multivector::{Dtype, MultiVector, PooledVector, ScoredDoc};
pub use scoring::{late_interaction, mean_pool, pooled_score, rank_corpus};
