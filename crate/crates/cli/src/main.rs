//! `mvr` — multi-vector retrieval pipelines over MVEC embedding files.
//!
//! Subcommands: `index` (build/compress an index and report its footprint),
//! `query` (rank a corpus and write a TREC run), `eval` (score a run against
//! qrels), `bench` (exhaustive-scoring latency), `simmap` (export a
//! query-token similarity map), and `bm25` (lexical page-ranking baseline).
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error. The `MVR_THREADS`
//! environment variable caps scoring parallelism.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use mvr_core::eval::trec;
use mvr_core::index::{
    compress, compressed_footprint, default_grid, footprint, read_index, write_compressed_index,
    write_index, CorpusIndex, ResidualDtype, META_GRID_COLS, META_GRID_ROWS,
};
use mvr_core::interpret::{export_map, similarity_map, MapFormat};
use mvr_core::lexical::{Bm25Params, LexicalCorpus, TokenizerConfig};
use mvr_core::multivector::{Dtype, MultiVector};
use mvr_core::scoring::rank_corpus;
use mvr_core::{evaluate, RetrievalRun, SynthConfig};

#[derive(Parser)]
#[command(name = "mvr", version, about = "Multi-vector late-interaction retrieval engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DtypeArg {
    F32,
    F16,
}

impl From<DtypeArg> for Dtype {
    fn from(v: DtypeArg) -> Dtype {
        match v {
            DtypeArg::F32 => Dtype::F32,
            DtypeArg::F16 => Dtype::F16,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Pgm,
}

/// `RxC` patch grid, e.g. `32x32`.
#[derive(Clone, Copy, Debug)]
struct GridSpec {
    rows: usize,
    cols: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (r, c) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("'{s}' is not of the form RxC"))?;
        let rows: usize = r.parse().map_err(|_| format!("bad grid rows '{r}'"))?;
        let cols: usize = c.parse().map_err(|_| format!("bad grid cols '{c}'"))?;
        if rows == 0 || cols == 0 {
            return Err("grid dimensions must be positive".to_string());
        }
        Ok(GridSpec { rows, cols })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build an MVEC index from an embeddings file, optionally compressed.
    Index(IndexArgs),
    /// Rank every query against an index and write a TREC run file.
    Query(QueryArgs),
    /// Evaluate a TREC run against qrels (NDCG@k, Recall@k, MRR).
    Eval(EvalArgs),
    /// Time exhaustive scoring and check linear corpus scaling.
    Bench(BenchArgs),
    /// Export one query token's patch-similarity map.
    Simmap(SimmapArgs),
    /// Rank pages with the BM25 baseline (max-pooled over chunks).
    Bm25(Bm25Args),
}

#[derive(Args)]
struct IndexArgs {
    /// Input embeddings (MVEC).
    #[arg(long)]
    embeddings: PathBuf,
    /// Output index path.
    #[arg(long)]
    out: PathBuf,
    /// Storage precision; defaults to the input file's dtype.
    #[arg(long, value_enum)]
    dtype: Option<DtypeArg>,
    /// Patch grid as RxC; defaults to 32x32 when every doc has 1024 vectors.
    #[arg(long)]
    grid: Option<GridSpec>,
    /// Corpus name stored in the metadata.
    #[arg(long)]
    name: Option<String>,
    /// Compress with this many k-means centroids (writes MVEC v2).
    #[arg(long)]
    centroids: Option<usize>,
    /// Lloyd iterations for compression.
    #[arg(long, default_value_t = 20)]
    iters: usize,
    /// Seed for k-means initialization.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Store binary16 residuals alongside centroid assignments.
    #[arg(long)]
    residuals: bool,
}

#[derive(Args)]
struct QueryArgs {
    /// Index to search (MVEC).
    #[arg(long)]
    index: PathBuf,
    /// Query embeddings (MVEC).
    #[arg(long)]
    queries: PathBuf,
    /// Results per query.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// TREC run output path.
    #[arg(long)]
    run: PathBuf,
    /// Run tag written in the last TREC column.
    #[arg(long, default_value = "mvr")]
    tag: String,
}

#[derive(Args)]
struct EvalArgs {
    /// TREC run file.
    #[arg(long)]
    run: PathBuf,
    /// TREC qrels file.
    #[arg(long)]
    qrels: PathBuf,
    /// Cutoffs, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    k: Vec<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Index to benchmark (MVEC).
    #[arg(long)]
    index: PathBuf,
    /// Number of random probe queries.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    queries: u64,
    /// Seed for query generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Results per query while timing.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Rows per probe query.
    #[arg(long, default_value_t = 16)]
    query_rows: usize,
}

#[derive(Args)]
struct SimmapArgs {
    /// Index holding the document (MVEC).
    #[arg(long)]
    index: PathBuf,
    /// Query embeddings (MVEC).
    #[arg(long)]
    queries: PathBuf,
    /// Query to use; defaults to the first in the file.
    #[arg(long)]
    query_id: Option<String>,
    /// Document to map.
    #[arg(long)]
    doc_id: String,
    /// Query token (row) index.
    #[arg(long, default_value_t = 0)]
    token_index: usize,
    #[arg(long, value_enum)]
    format: FormatArg,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    /// Patch grid as RxC; defaults to the index metadata, then to 32x32 for
    /// 1024-vector documents.
    #[arg(long)]
    grid: Option<GridSpec>,
}

#[derive(Args)]
struct Bm25Args {
    /// Chunk corpus: JSON lines of {"chunk_id", "page_id", "text"}.
    #[arg(long)]
    chunks: PathBuf,
    /// Tab-separated queries: `query_id<TAB>text`.
    #[arg(long)]
    queries: PathBuf,
    /// Results per query.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// TREC run output path.
    #[arg(long)]
    run: PathBuf,
    #[arg(long, default_value = "bm25")]
    tag: String,
    /// Term-frequency saturation.
    #[arg(long, default_value_t = 1.2)]
    bm25_k1: f64,
    /// Length normalization.
    #[arg(long, default_value_t = 0.75)]
    bm25_b: f64,
    /// Apply English stemming to chunks and queries.
    #[arg(long)]
    stem: bool,
    /// Newline-separated stopword list to drop from chunks and queries.
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Index(args) => cmd_index(args),
        Command::Query(args) => cmd_query(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Simmap(args) => cmd_simmap(args),
        Command::Bm25(args) => cmd_bm25(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn init_thread_pool() {
    if let Ok(v) = std::env::var("MVR_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid MVR_THREADS value '{v}'"),
        }
    }
}

fn cmd_index(args: IndexArgs) -> anyhow::Result<()> {
    let input = read_index(&args.embeddings)
        .with_context(|| format!("reading {}", args.embeddings.display()))?;
    let dtype = args.dtype.map_or(input.dtype(), Dtype::from);

    let mut meta = input.meta().clone();
    if let Some(name) = &args.name {
        meta.insert("name".to_string(), name.clone());
    }
    let grid = args.grid.map(|g| (g.rows, g.cols)).or_else(|| {
        let counts: Vec<usize> = input.docs().iter().map(MultiVector::n_vectors).collect();
        match counts.first() {
            Some(&n) if counts.iter().all(|&c| c == n) => default_grid(n),
            _ => None,
        }
    });
    if let Some((rows, cols)) = grid {
        meta.insert(META_GRID_ROWS.to_string(), rows.to_string());
        meta.insert(META_GRID_COLS.to_string(), cols.to_string());
    }

    let index = CorpusIndex::new(input.docs().to_vec(), input.dim(), dtype, meta)?;
    let fp = footprint(&index);
    for doc in &fp.per_doc {
        println!("{}\t{} bytes", doc.doc_id, doc.payload_bytes);
    }
    println!(
        "total payload: {} bytes ({})",
        fp.payload_bytes,
        mib(fp.payload_bytes)
    );

    match args.centroids {
        None => {
            write_index(&index, &args.out)?;
            println!("index total: {} bytes ({})", fp.total_bytes, mib(fp.total_bytes));
        }
        Some(k) => {
            let residual = if args.residuals {
                ResidualDtype::F16
            } else {
                ResidualDtype::None
            };
            let compressed = compress(&index, k, args.iters, args.seed, residual)?;
            write_compressed_index(&compressed, &args.out)?;
            let cfp = compressed_footprint(&compressed);
            println!(
                "compressed: centroids {} bytes, assignments {} bytes, residuals {} bytes",
                cfp.centroid_bytes, cfp.assignment_bytes, cfp.residual_bytes
            );
            println!(
                "compressed total: {} bytes ({})",
                cfp.total_bytes,
                mib(cfp.total_bytes)
            );
        }
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn mib(bytes: u64) -> String {
    format!("{:.1} MiB", bytes as f64 / (1024.0 * 1024.0))
}

fn cmd_query(args: QueryArgs) -> anyhow::Result<()> {
    if args.k == 0 {
        bail!("--k must be at least 1");
    }
    let index = read_index(&args.index)
        .with_context(|| format!("reading {}", args.index.display()))?;
    let queries = read_index(&args.queries)
        .with_context(|| format!("reading {}", args.queries.display()))?;

    let mut run = RetrievalRun::new();
    let mut elapsed = Duration::ZERO;
    for query in queries.docs() {
        let start = Instant::now();
        let ranked = rank_corpus(query, index.docs(), args.k)?;
        elapsed += start.elapsed();
        run.insert_scored(query.id(), &ranked)?;
    }
    trec::write_run(&run, &args.tag, &args.run)?;

    let n = queries.len().max(1);
    println!(
        "ranked {} queries over {} docs; mean latency {:.3} ms/query",
        queries.len(),
        index.len(),
        elapsed.as_secs_f64() * 1e3 / n as f64
    );
    println!("wrote {}", args.run.display());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    if args.k.is_empty() || args.k.contains(&0) {
        bail!("--k must list positive cutoffs");
    }
    let run = trec::read_run(&args.run)?;
    let qrels = trec::read_qrels(&args.qrels)?;
    let report = evaluate(&run, &qrels, &args.k)?;
    for q in &report.excluded_queries {
        eprintln!("warning: query '{q}' has no relevant documents; excluded");
    }
    for q in qrels.queries() {
        if qrels.n_relevant(q) > 0 && run.ranking(q).is_none() {
            eprintln!("warning: judged query '{q}' missing from run; scored 0");
        }
    }
    let json = report.to_json();
    match &args.out {
        Some(path) => {
            std::fs::write(path, json + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

/// Mean / median / p99 of per-query latencies.
fn latency_stats(durations: &mut [Duration]) -> (f64, f64, f64) {
    durations.sort_unstable();
    let ms = |d: Duration| d.as_secs_f64() * 1e3;
    let mean = durations.iter().map(|d| ms(*d)).sum::<f64>() / durations.len() as f64;
    let median = ms(durations[durations.len() / 2]);
    let p99_idx = ((durations.len() as f64 * 0.99).ceil() as usize).saturating_sub(1);
    (mean, median, ms(durations[p99_idx]))
}

fn time_queries(queries: &[MultiVector], corpus: &[MultiVector], k: usize) -> anyhow::Result<Vec<Duration>> {
    let mut durations = Vec::with_capacity(queries.len());
    for query in queries {
        let start = Instant::now();
        let ranked = rank_corpus(query, corpus, k)?;
        durations.push(start.elapsed());
        std::hint::black_box(ranked);
    }
    Ok(durations)
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<()> {
    let index = read_index(&args.index)
        .with_context(|| format!("reading {}", args.index.display()))?;
    if index.is_empty() {
        bail!("cannot benchmark an empty index");
    }
    // Probe queries from the synthetic generator, matched to the index dim.
    let synth = mvr_core::synth_corpus(&SynthConfig {
        n_docs: args.queries as usize,
        n_queries: args.queries as usize,
        dim: index.dim(),
        n_patches: args.query_rows,
        n_query_rows: args.query_rows,
        plant_strength: 0.0,
        seed: args.seed,
    })?;
    let queries = synth.queries;

    // Warmup, then timed pass.
    time_queries(&queries[..queries.len().min(2)], index.docs(), args.k)?;
    let mut durations = time_queries(&queries, index.docs(), args.k)?;
    let (mean, median, p99) = latency_stats(&mut durations);
    println!(
        "{} docs: mean {mean:.3} ms, median {median:.3} ms, p99 {p99:.3} ms per query",
        index.len()
    );

    if index.len() < 2 {
        println!("corpus too small for the scaling check; skipped");
        return Ok(());
    }

    // Double the corpus and confirm exhaustive scoring scales linearly.
    let mut doubled: Vec<MultiVector> = index.docs().to_vec();
    for doc in index.docs() {
        doubled.push(MultiVector::new(
            format!("{}+dup", doc.id()),
            doc.data().to_vec(),
            doc.dim(),
            doc.dtype(),
        )?);
    }
    time_queries(&queries[..queries.len().min(2)], &doubled, args.k)?;
    let mut doubled_durations = time_queries(&queries, &doubled, args.k)?;
    let (mean2, median2, p99_2) = latency_stats(&mut doubled_durations);
    println!(
        "{} docs: mean {mean2:.3} ms, median {median2:.3} ms, p99 {p99_2:.3} ms per query",
        doubled.len()
    );
    let ratio = median2 / median;
    println!("scaling ratio (2x docs): {ratio:.2}");
    if !(1.6..=2.6).contains(&ratio) {
        bail!("scaling ratio {ratio:.2} outside [1.6, 2.6]; expected near-linear exhaustive scoring");
    }
    Ok(())
}

fn cmd_simmap(args: SimmapArgs) -> anyhow::Result<()> {
    let index = read_index(&args.index)
        .with_context(|| format!("reading {}", args.index.display()))?;
    let queries = read_index(&args.queries)
        .with_context(|| format!("reading {}", args.queries.display()))?;

    let query = match &args.query_id {
        Some(id) => queries
            .get(id)
            .ok_or_else(|| anyhow::anyhow!("query '{id}' not found in {}", args.queries.display()))?,
        None => queries
            .docs()
            .first()
            .ok_or_else(|| anyhow::anyhow!("query file {} is empty", args.queries.display()))?,
    };
    let doc = index
        .get(&args.doc_id)
        .ok_or_else(|| anyhow::anyhow!("doc '{}' not found in index", args.doc_id))?;

    let (rows, cols) = args
        .grid
        .map(|g| (g.rows, g.cols))
        .or_else(|| index.grid())
        .or_else(|| default_grid(doc.n_vectors()))
        .ok_or_else(|| {
            anyhow::anyhow!(
                "no grid known for doc '{}' ({} vectors); pass --grid RxC",
                args.doc_id,
                doc.n_vectors()
            )
        })?;

    let map = similarity_map(query, doc, args.token_index, rows, cols)?;
    let format = match args.format {
        FormatArg::Csv => MapFormat::Csv,
        FormatArg::Pgm => MapFormat::Pgm,
    };
    export_map(&map, format, &args.out)?;
    println!(
        "token {} on '{}': argmax patch ({}, {}); wrote {}",
        args.token_index,
        args.doc_id,
        map.argmax_patch.0,
        map.argmax_patch.1,
        args.out.display()
    );
    Ok(())
}

fn cmd_bm25(args: Bm25Args) -> anyhow::Result<()> {
    if args.k == 0 {
        bail!("--k must be at least 1");
    }
    let mut tokenizer = TokenizerConfig {
        stopwords: Default::default(),
        stem: args.stem,
    };
    if let Some(path) = &args.stopwords {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        tokenizer.stopwords = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect();
    }
    let corpus = LexicalCorpus::from_jsonl_path(
        &args.chunks,
        Bm25Params {
            k1: args.bm25_k1,
            b: args.bm25_b,
        },
        tokenizer,
    )?;

    let text = std::fs::read_to_string(&args.queries)
        .with_context(|| format!("reading {}", args.queries.display()))?;
    let mut run = RetrievalRun::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (query_id, query_text) = line
            .split_once('\t')
            .ok_or_else(|| anyhow::anyhow!("{}:{}: expected `id<TAB>text`", args.queries.display(), i + 1))?;
        let tokens = corpus.tokenize_query(query_text);
        if tokens.is_empty() {
            eprintln!("warning: query '{query_id}' tokenizes to nothing; skipped");
            continue;
        }
        let ranked = corpus.rank_pages(&tokens, args.k)?;
        run.insert_ranking(query_id, ranked)?;
    }
    trec::write_run(&run, &args.tag, &args.run)?;
    println!(
        "ranked {} queries over {} pages; wrote {}",
        run.len(),
        corpus.page_ids().count(),
        args.run.display()
    );
    Ok(())
}
