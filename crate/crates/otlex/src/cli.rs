//! Batch front door: the `train`, `eval`, `induce` and `synth` commands,
//! JSON config handling, and run-directory artifacts.
//!
//! Every run directory is self-describing: `manifest.json` carries the
//! fully resolved configuration, the SHA-256 digests of all inputs, and
//! per-phase wall-clock timings, so re-running from the manifest
//! reproduces `map.bin` byte-identically.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::blu::{self, BluConfig, DistanceMetric};
use crate::embeddings::{
    load_embeddings, load_lexicon, save_embeddings, save_lexicon, EmbeddingSpace, Lexicon,
    LoadOptions, PairOrigin,
};
use crate::error::{Error, Result};
use crate::framework::{self, RetrievalMethod, Strategy, StrategyConfig};
use crate::linmap::LinearMap;
use crate::synth;

#[derive(Parser)]
#[command(
    name = "otlex",
    version,
    about = "Semi-supervised embedding alignment and bilingual lexicon induction",
    long_about = "Aligns two monolingual word-embedding spaces with an orthogonal map and \
                  induces a bilingual lexicon. A supervised RCSLS trainer and an unsupervised \
                  Wasserstein trainer exchange information through prior optimal transport and \
                  bi-directional lexicon updates, orchestrated cyclically (css) or in parallel \
                  (pss)."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align two embedding spaces and write map/report/manifest artifacts.
    Train(TrainArgs),
    /// Score a saved map on a test lexicon (P@1/P@5/P@10).
    Eval(EvalArgs),
    /// Standalone bi-directional lexicon update with a saved map.
    Induce(InduceArgs),
    /// Emit a synthetic planted instance to disk.
    Synth(SynthArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Source embeddings (text word-vector format).
    #[arg(long)]
    src: PathBuf,
    /// Target embeddings (text word-vector format).
    #[arg(long)]
    tgt: PathBuf,
    /// Annotated lexicon: one `src_token tgt_token` pair per line.
    #[arg(long)]
    lex: PathBuf,
    /// Output directory (created if absent).
    #[arg(long)]
    out: PathBuf,
    /// JSON config file mirroring the full strategy configuration;
    /// explicit flags below override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Orchestration strategy: css, pss, sup_only or unsup_only.
    #[arg(long, value_parser = Strategy::from_str)]
    strategy: Option<Strategy>,
    /// Number of epochs.
    #[arg(long)]
    epochs: Option<usize>,
    /// Base seed; per-phase seeds are derived from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Replace prior OT by plain entropic OT (css/pss only).
    #[arg(long)]
    ablate_pot: bool,
    /// Skip the bi-directional lexicon update (css/pss only).
    #[arg(long)]
    ablate_blu: bool,
    /// Initialize from the identity instead of Procrustes.
    #[arg(long)]
    cold_start: bool,
    /// Keep only the most frequent rows of each vocabulary.
    #[arg(long)]
    max_vocab: Option<usize>,
    /// Optional gold lexicon used only to report the precision of the
    /// pairs BLU adds each epoch.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Also write lexicon.txt: the annotated lexicon extended by a final
    /// lexicon update under the trained map (annotated only when the
    /// update is ablated).
    #[arg(long)]
    emit_lexicon: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Trained map file.
    #[arg(long)]
    map: PathBuf,
    /// Source embeddings.
    #[arg(long)]
    src: PathBuf,
    /// Target embeddings.
    #[arg(long)]
    tgt: PathBuf,
    /// Test lexicon (one-to-many entries allowed).
    #[arg(long)]
    lex: PathBuf,
    /// Retrieval criterion: nn, csls or both.
    #[arg(long, default_value = "csls", value_parser = EvalMethod::from_str)]
    method: EvalMethod,
    /// CSLS neighborhood size.
    #[arg(long, default_value_t = 10)]
    csls_k: usize,
    /// Keep only the most frequent rows of each vocabulary.
    #[arg(long)]
    max_vocab: Option<usize>,
}

#[derive(Args)]
struct InduceArgs {
    /// Trained map file.
    #[arg(long)]
    map: PathBuf,
    /// Source embeddings.
    #[arg(long)]
    src: PathBuf,
    /// Target embeddings.
    #[arg(long)]
    tgt: PathBuf,
    /// Output file for the scored lexicon
    /// (`src_token<TAB>tgt_token<TAB>cs_total`, best first).
    #[arg(long)]
    out: PathBuf,
    /// Annotated lexicon whose pairs are excluded from the output.
    #[arg(long)]
    lex: Option<PathBuf>,
    /// Competitor count in the credit margin.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Maximum number of pairs to select.
    #[arg(long, default_value_t = 10000)]
    cap: usize,
    /// Most-frequent rows considered on each side.
    #[arg(long, default_value_t = 20000)]
    pool: usize,
    /// Distance used for matching: cosine or sq_euclidean.
    #[arg(long, default_value = "cosine", value_parser = DistanceMetric::from_str)]
    metric: DistanceMetric,
    /// Keep only the most frequent rows of each vocabulary.
    #[arg(long)]
    max_vocab: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory (created if absent).
    #[arg(long)]
    out: PathBuf,
    /// Vocabulary size per side.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Embedding dimension.
    #[arg(long, default_value_t = 16)]
    d: usize,
    /// Gaussian noise level applied to the target side.
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    /// Column-scaling condition number (> 1 = anisotropic hard mode).
    #[arg(long, default_value_t = 1.0)]
    condition: f64,
    /// Generator seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write train.txt with this many gold pairs.
    #[arg(long, default_value_t = 0)]
    train_size: usize,
    /// Also write test.txt with this many gold pairs (disjoint sources
    /// from train.txt).
    #[arg(long, default_value_t = 0)]
    test_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EvalMethod {
    Nn,
    Csls,
    Both,
}

impl FromStr for EvalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nn" => Ok(EvalMethod::Nn),
            "csls" => Ok(EvalMethod::Csls),
            "both" => Ok(EvalMethod::Both),
            other => Err(Error::Config(format!(
                "unknown retrieval method {other:?}; expected nn, csls or both"
            ))),
        }
    }
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct PhaseTimings {
    load_ms: u128,
    train_ms: u128,
    write_ms: u128,
}

/// The self-description of a training run: together with the input files
/// it fully determines every artifact in the directory.
#[derive(Serialize)]
pub struct RunManifest {
    command: String,
    toolkit_version: String,
    seed: u64,
    threads: usize,
    config: StrategyConfig,
    inputs: Vec<InputDigest>,
    timings: PhaseTimings,
}

/// Entry point used by the binary: parses arguments, runs the command,
/// and reports failures on stderr with their error class.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            1
        }
    }
}

fn dispatch(command: &Command) -> Result<()> {
    match command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Induce(a) => cmd_induce(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn load_options(max_vocab: Option<usize>) -> LoadOptions {
    LoadOptions {
        max_vocab,
        ..LoadOptions::default()
    }
}

fn sha256_of(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serializing {}: {e}", path.display())))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn resolve_config(args: &TrainArgs) -> Result<StrategyConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<StrategyConfig>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => StrategyConfig::default(),
    };
    if let Some(s) = args.strategy {
        cfg.strategy = s;
    }
    if let Some(e) = args.epochs {
        cfg.epochs = e;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.ablate_pot {
        cfg.ablate_pot = true;
    }
    if args.ablate_blu {
        cfg.ablate_blu = true;
    }
    if args.cold_start {
        cfg.cold_start = true;
    }
    Ok(cfg)
}

fn load_pair(
    src: &Path,
    tgt: &Path,
    max_vocab: Option<usize>,
) -> Result<(EmbeddingSpace, EmbeddingSpace)> {
    let opts = load_options(max_vocab);
    Ok((load_embeddings(src, &opts)?, load_embeddings(tgt, &opts)?))
}

fn load_lexicon_checked(
    path: &Path,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
) -> Result<Lexicon> {
    let loaded = load_lexicon(path, src, tgt)?;
    if loaded.skipped_oov > 0 || loaded.skipped_duplicates > 0 {
        log::warn!(
            "{}: skipped {} out-of-vocabulary and {} duplicate pairs",
            path.display(),
            loaded.skipped_oov,
            loaded.skipped_duplicates
        );
    }
    Ok(loaded.lexicon)
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cfg = resolve_config(args)?;
    cfg.validate()?;

    let t_load = Instant::now();
    let (src, tgt) = load_pair(&args.src, &args.tgt, args.max_vocab)?;
    let annotated = load_lexicon_checked(&args.lex, &src, &tgt)?;
    let gold = match &args.gold {
        Some(path) => Some(load_lexicon_checked(path, &src, &tgt)?),
        None => None,
    };
    let load_ms = t_load.elapsed().as_millis();

    log::info!(
        "training strategy={} epochs={} on {}×{} vs {}×{} with {} annotated pairs",
        cfg.strategy,
        cfg.epochs,
        src.len(),
        src.dim(),
        tgt.len(),
        tgt.dim(),
        annotated.len()
    );
    let t_train = Instant::now();
    let outcome = framework::run_strategy(&src, &tgt, &annotated, &cfg, gold.as_ref())?;
    let train_ms = t_train.elapsed().as_millis();

    let t_write = Instant::now();
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let map_path = args.out.join("map.bin");
    outcome.map.save(&map_path)?;

    let report_path = args.out.join("report.jsonl");
    {
        fn emit<T: Serialize>(w: &mut BufWriter<File>, path: &Path, v: &T) -> Result<()> {
            let line = serde_json::to_string(v)
                .map_err(|e| Error::Config(format!("report line: {e}")))?;
            writeln!(w, "{line}").map_err(|e| Error::io(path, e))
        }
        let file = File::create(&report_path).map_err(|e| Error::io(&report_path, e))?;
        let mut w = BufWriter::new(file);
        for record in &outcome.report.epochs {
            emit(&mut w, &report_path, record)?;
        }
        #[derive(Serialize)]
        struct Summary<'a> {
            summary: SummaryBody<'a>,
        }
        #[derive(Serialize)]
        struct SummaryBody<'a> {
            strategy: Strategy,
            epochs: usize,
            selection: &'a Option<framework::SelectionSummary>,
        }
        emit(
            &mut w,
            &report_path,
            &Summary {
                summary: SummaryBody {
                    strategy: outcome.report.strategy,
                    epochs: outcome.report.epochs.len(),
                    selection: &outcome.report.selection,
                },
            },
        )?;
        w.flush().map_err(|e| Error::io(&report_path, e))?;
    }

    if args.emit_lexicon {
        let extended = if cfg.ablate_blu {
            annotated.clone()
        } else {
            blu::blu_update(&src, &tgt, &outcome.map, &annotated, &cfg.blu)?.extended
        };
        save_lexicon(&extended, &src, &tgt, &args.out.join("lexicon.txt"))?;
    }

    let mut inputs = vec![
        InputDigest {
            path: args.src.display().to_string(),
            sha256: sha256_of(&args.src)?,
        },
        InputDigest {
            path: args.tgt.display().to_string(),
            sha256: sha256_of(&args.tgt)?,
        },
        InputDigest {
            path: args.lex.display().to_string(),
            sha256: sha256_of(&args.lex)?,
        },
    ];
    if let Some(path) = &args.gold {
        inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_of(path)?,
        });
    }
    let write_ms = t_write.elapsed().as_millis();
    let manifest = RunManifest {
        command: "train".into(),
        toolkit_version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        threads: crate::threads(),
        config: cfg,
        inputs,
        timings: PhaseTimings {
            load_ms,
            train_ms,
            write_ms,
        },
    };
    write_json(&args.out.join("manifest.json"), &manifest)?;

    if let Some(sel) = &outcome.report.selection {
        println!(
            "selection: cost_sup={:.6} cost_unsup={:.6} chosen={}",
            sel.cost_sup,
            sel.cost_unsup,
            match sel.chosen {
                framework::ChosenSide::Supervised => "supervised",
                framework::ChosenSide::Unsupervised => "unsupervised",
            }
        );
    }
    println!(
        "wrote {} ({}×{}), report.jsonl ({} epochs), manifest.json",
        map_path.display(),
        outcome.map.dim(),
        outcome.map.dim(),
        outcome.report.epochs.len()
    );
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let map = LinearMap::load(&args.map)?;
    let (src, tgt) = load_pair(&args.src, &args.tgt, args.max_vocab)?;
    let test = load_lexicon_checked(&args.lex, &src, &tgt)?;
    let methods: &[RetrievalMethod] = match args.method {
        EvalMethod::Nn => &[RetrievalMethod::Nn],
        EvalMethod::Csls => &[RetrievalMethod::Csls],
        EvalMethod::Both => &[RetrievalMethod::Nn, RetrievalMethod::Csls],
    };
    for &method in methods {
        let p = framework::precision_at_ks(
            &map,
            &src,
            &tgt,
            &test,
            method,
            args.csls_k,
            &[1, 5, 10],
        )?;
        let name = match method {
            RetrievalMethod::Nn => "nn",
            RetrievalMethod::Csls => "csls",
        };
        println!(
            "method={name} p@1={:.6} p@5={:.6} p@10={:.6}",
            p[0], p[1], p[2]
        );
    }
    Ok(())
}

fn cmd_induce(args: &InduceArgs) -> Result<()> {
    let map = LinearMap::load(&args.map)?;
    let (src, tgt) = load_pair(&args.src, &args.tgt, args.max_vocab)?;
    let annotated = match &args.lex {
        Some(path) => load_lexicon_checked(path, &src, &tgt)?,
        None => Lexicon::new(src.len(), tgt.len()),
    };
    let cfg = BluConfig {
        k: args.k,
        cap: args.cap,
        pool: args.pool,
        metric: args.metric,
    };
    let update = blu::blu_update(&src, &tgt, &map, &annotated, &cfg)?;
    let file = File::create(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut w = BufWriter::new(file);
    for sp in &update.selected {
        writeln!(
            w,
            "{}\t{}\t{}",
            src.word(sp.src_index),
            tgt.word(sp.tgt_index),
            sp.cs_total
        )
        .map_err(|e| Error::io(&args.out, e))?;
    }
    w.flush().map_err(|e| Error::io(&args.out, e))?;
    println!(
        "selected {} of {} mutual-neighbor candidates → {}",
        update.selected.len(),
        update.candidate_count,
        args.out.display()
    );
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let inst = synth::generate_anisotropic(args.n, args.d, args.sigma, args.condition, args.seed)?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    save_embeddings(&inst.src, &args.out.join("src.vec"))?;
    save_embeddings(&inst.tgt, &args.out.join("tgt.vec"))?;
    inst.planted_map.save(&args.out.join("planted_map.bin"))?;

    let mut gold = Lexicon::new(args.n, args.n);
    for (i, &j) in inst.planted_permutation.iter().enumerate() {
        gold.push(i, j, PairOrigin::Annotated)?;
    }
    save_lexicon(&gold, &inst.src, &inst.tgt, &args.out.join("gold.txt"))?;

    if args.train_size > 0 || args.test_size > 0 {
        let (train, test) =
            synth::split_gold_lexicon(&inst, args.train_size, args.test_size, args.seed)?;
        save_lexicon(&train, &inst.src, &inst.tgt, &args.out.join("train.txt"))?;
        save_lexicon(&test, &inst.src, &inst.tgt, &args.out.join("test.txt"))?;
    }

    #[derive(Serialize)]
    struct InstanceMeta {
        n: usize,
        d: usize,
        noise_sigma: f64,
        condition: f64,
        seed: u64,
        train_size: usize,
        test_size: usize,
    }
    write_json(
        &args.out.join("instance.json"),
        &InstanceMeta {
            n: args.n,
            d: args.d,
            noise_sigma: args.sigma,
            condition: args.condition,
            seed: args.seed,
            train_size: args.train_size,
            test_size: args.test_size,
        },
    )?;
    println!(
        "wrote planted instance (n={}, d={}, σ={}, condition={}) to {}",
        args.n,
        args.d,
        args.sigma,
        args.condition,
        args.out.display()
    );
    Ok(())
}
