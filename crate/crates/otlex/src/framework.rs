//! Orchestration of the supervised and unsupervised aligners: cyclic
//! (CSS) and parallel (PSS) strategies, Wasserstein model selection,
//! retrieval, and accuracy evaluation.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blu::{self, BluConfig, ScoredPair};
use crate::embeddings::{subset_rows, EmbeddingSpace, Lexicon, Side};
use crate::error::{Error, Result};
use crate::linalg;
use crate::linmap::LinearMap;
use crate::ot;
use crate::supervised::{self, SupConfig};
use crate::unsupervised::{self, UnsupConfig};

/// Per-phase seed streams: each trainer draws its per-epoch seed from its
/// own stream so reordering one phase never perturbs another.
const STREAM_SUP: u64 = 0x5350;
const STREAM_UNSUP: u64 = 0x5553;
const STREAM_SELECT: u64 = 0x5357;

/// SplitMix64 finalizer over (base, stream, epoch); decorrelates the
/// sequential seeds handed to the trainers.
pub(crate) fn derive_seed(base: u64, stream: u64, epoch: u64) -> u64 {
    let mut z = base
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ epoch.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Orchestration strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Cyclic: Sup → UnSup → BLU per epoch, one parameter fed around.
    Css,
    /// Parallel: both trainers keep their own parameters and exchange
    /// previous-epoch snapshots; final model chosen by transport cost.
    Pss,
    /// Iterated supervised training only.
    SupOnly,
    /// Iterated unsupervised training only (no prior, no lexicon growth).
    UnsupOnly,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Strategy::Css => "css",
            Strategy::Pss => "pss",
            Strategy::SupOnly => "sup_only",
            Strategy::UnsupOnly => "unsup_only",
        };
        f.write_str(name)
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "css" => Ok(Strategy::Css),
            "pss" => Ok(Strategy::Pss),
            "sup_only" => Ok(Strategy::SupOnly),
            "unsup_only" => Ok(Strategy::UnsupOnly),
            other => Err(Error::Config(format!(
                "unknown strategy {other:?}; expected css, pss, sup_only or unsup_only"
            ))),
        }
    }
}

/// Retrieval criterion for evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RetrievalMethod {
    Nn,
    Csls,
}

impl FromStr for RetrievalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nn" => Ok(RetrievalMethod::Nn),
            "csls" => Ok(RetrievalMethod::Csls),
            other => Err(Error::Config(format!(
                "unknown retrieval method {other:?}; expected nn or csls"
            ))),
        }
    }
}

/// Full run configuration: strategy, per-phase hyperparameters, ablation
/// switches, and the evaluation convention.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrategyConfig {
    pub strategy: Strategy,
    pub epochs: usize,
    pub sup: SupConfig,
    pub unsup: UnsupConfig,
    pub blu: BluConfig,
    /// Replace prior OT by plain entropic OT in the unsupervised phase.
    pub ablate_pot: bool,
    /// Skip the lexicon update; the supervised phase sees only the
    /// annotated lexicon.
    pub ablate_blu: bool,
    pub eval_retrieval: RetrievalMethod,
    pub csls_k: usize,
    /// Base seed; per-phase, per-epoch seeds are derived from it.
    pub seed: u64,
    /// Start from the identity map instead of Procrustes on the annotated
    /// lexicon.
    pub cold_start: bool,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Css,
            epochs: 5,
            sup: SupConfig::default(),
            unsup: UnsupConfig::default(),
            blu: BluConfig::default(),
            ablate_pot: false,
            ablate_blu: false,
            eval_retrieval: RetrievalMethod::Csls,
            csls_k: 10,
            seed: 42,
            cold_start: false,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        self.sup.validate()?;
        self.unsup.validate()?;
        self.blu.validate()?;
        if self.csls_k == 0 {
            return Err(Error::Config("csls_k must be at least 1".into()));
        }
        let single = matches!(self.strategy, Strategy::SupOnly | Strategy::UnsupOnly);
        if single && (self.ablate_pot || self.ablate_blu) {
            return Err(Error::Config(format!(
                "ablation switches are inapplicable to {}: there is no message passing to remove",
                self.strategy
            )));
        }
        Ok(())
    }
}

/// One epoch's telemetry; fields absent when the phase did not run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub sup_loss: Option<f64>,
    pub unsup_objective: Option<f64>,
    pub additional_size: Option<usize>,
    /// Fraction of selected pairs present in the supplied gold lexicon.
    pub additional_precision: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChosenSide {
    Supervised,
    Unsupervised,
}

/// PSS final-model selection telemetry (Eq.-(4)-style transport costs).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionSummary {
    pub cost_sup: f64,
    pub cost_unsup: f64,
    pub chosen: ChosenSide,
}

/// Per-run telemetry: one record per epoch plus the PSS selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub strategy: Strategy,
    pub epochs: Vec<EpochRecord>,
    pub selection: Option<SelectionSummary>,
}

/// A finished run: the chosen map, its telemetry, and (for PSS) both
/// candidate maps for inspection. The supervised candidate is the raw
/// RCSLS chain; the returned `map`, if the supervised side wins the
/// selection, is its orthogonal projection.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub map: LinearMap,
    pub report: RunReport,
    pub pss_candidates: Option<(LinearMap, LinearMap)>,
}

fn check_dims(src: &EmbeddingSpace, tgt: &EmbeddingSpace) -> Result<()> {
    if src.dim() != tgt.dim() {
        return Err(Error::Dimension(format!(
            "embedding dimensions differ: {} vs {}",
            src.dim(),
            tgt.dim()
        )));
    }
    Ok(())
}

fn procrustes_init(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    annotated: &Lexicon,
    cfg: &StrategyConfig,
) -> Result<LinearMap> {
    if cfg.cold_start {
        return LinearMap::identity(src.dim());
    }
    let s = subset_rows(src, annotated, Side::Source)?;
    let t = subset_rows(tgt, annotated, Side::Target)?;
    supervised::procrustes(&s.view(), &t.view())
}

fn sup_cfg_for(cfg: &StrategyConfig, epoch: usize) -> SupConfig {
    let mut c = cfg.sup.clone();
    c.seed = derive_seed(cfg.seed, STREAM_SUP, epoch as u64);
    c
}

fn unsup_cfg_for(cfg: &StrategyConfig, epoch: usize) -> UnsupConfig {
    let mut c = cfg.unsup.clone();
    c.seed = derive_seed(cfg.seed, STREAM_UNSUP, epoch as u64);
    if cfg.ablate_pot {
        c.use_pot = false;
    }
    c
}

fn additional_precision(selected: &[ScoredPair], gold: &Lexicon) -> Option<f64> {
    if selected.is_empty() {
        return None;
    }
    let truth: HashSet<(usize, usize)> = gold.pairs().into_iter().collect();
    let hits = selected
        .iter()
        .filter(|sp| truth.contains(&(sp.src_index, sp.tgt_index)))
        .count();
    Some(hits as f64 / selected.len() as f64)
}

/// Cyclic strategy: per epoch, Sup trains on the extended lexicon from
/// the fed-in map, UnSup continues from the orthogonal projection of the
/// supervised snapshot with a POT prior built from it, and BLU rebuilds
/// the extended lexicon from the annotated base. The last unsupervised
/// map is both the next epoch's feed and the final output. `epochs = 0`
/// returns the Procrustes initialization unchanged. `gold`, when given,
/// is used only to report additional-lexicon precision.
pub fn run_css(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    annotated: &Lexicon,
    cfg: &StrategyConfig,
    gold: Option<&Lexicon>,
) -> Result<RunOutcome> {
    cfg.validate()?;
    check_dims(src, tgt)?;
    if annotated.is_empty() {
        return Err(Error::Empty("annotated lexicon is empty".into()));
    }
    let mut feed = procrustes_init(src, tgt, annotated, cfg)?;
    let mut report = RunReport {
        strategy: Strategy::Css,
        epochs: Vec::new(),
        selection: None,
    };
    let mut extended = annotated.clone();
    for epoch in 0..cfg.epochs {
        let sup_out = supervised::train_supervised(src, tgt, &extended, &feed, &sup_cfg_for(cfg, epoch))?;
        // One orthogonal snapshot per epoch serves as the UnSup init, the
        // prior source, and (through the next map) the BLU backward map.
        let snapshot = sup_out.map.project_orthogonal()?;
        let prior_source = if cfg.ablate_pot { None } else { Some(&snapshot) };
        let unsup_out =
            unsupervised::train_unsupervised(src, tgt, &snapshot, prior_source, &unsup_cfg_for(cfg, epoch))?;
        let mut record = EpochRecord {
            epoch,
            sup_loss: Some(sup_out.mean_loss),
            unsup_objective: Some(unsup_out.mean_objective),
            additional_size: None,
            additional_precision: None,
        };
        if !cfg.ablate_blu {
            let update = blu::blu_update(src, tgt, &unsup_out.map, annotated, &cfg.blu)?;
            record.additional_size = Some(update.selected.len());
            if let Some(g) = gold {
                record.additional_precision = additional_precision(&update.selected, g);
            }
            extended = update.extended;
        }
        report.epochs.push(record);
        feed = unsup_out.map;
    }
    Ok(RunOutcome {
        map: feed,
        report,
        pss_candidates: None,
    })
}

/// Parallel strategy: both trainers keep their own parameters across
/// epochs and consume the other's previous-epoch snapshot — Sup trains on
/// the lexicon BLU builds from the previous unsupervised map, UnSup takes
/// its prior from the previous supervised map (the shared Procrustes
/// initialization at epoch 0). After the last epoch the two candidates
/// are compared by seeded-batch transport cost and the cheaper one wins.
pub fn run_pss(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    annotated: &Lexicon,
    cfg: &StrategyConfig,
    gold: Option<&Lexicon>,
) -> Result<RunOutcome> {
    cfg.validate()?;
    check_dims(src, tgt)?;
    if annotated.is_empty() {
        return Err(Error::Empty("annotated lexicon is empty".into()));
    }
    let init = procrustes_init(src, tgt, annotated, cfg)?;
    let mut report = RunReport {
        strategy: Strategy::Pss,
        epochs: Vec::new(),
        selection: None,
    };
    if cfg.epochs == 0 {
        return Ok(RunOutcome {
            map: init,
            report,
            pss_candidates: None,
        });
    }
    let mut q_sup = init.clone();
    let mut q_unsup = init;
    for epoch in 0..cfg.epochs {
        let sup_snapshot = if q_sup.is_orthogonal() {
            q_sup.clone()
        } else {
            q_sup.project_orthogonal()?
        };
        let mut record = EpochRecord {
            epoch,
            sup_loss: None,
            unsup_objective: None,
            additional_size: None,
            additional_precision: None,
        };
        let extended = if cfg.ablate_blu {
            annotated.clone()
        } else {
            let update = blu::blu_update(src, tgt, &q_unsup, annotated, &cfg.blu)?;
            record.additional_size = Some(update.selected.len());
            if let Some(g) = gold {
                record.additional_precision = additional_precision(&update.selected, g);
            }
            update.extended
        };
        let sup_out = supervised::train_supervised(src, tgt, &extended, &q_sup, &sup_cfg_for(cfg, epoch))?;
        let prior_source = if cfg.ablate_pot { None } else { Some(&sup_snapshot) };
        let unsup_out =
            unsupervised::train_unsupervised(src, tgt, &q_unsup, prior_source, &unsup_cfg_for(cfg, epoch))?;
        record.sup_loss = Some(sup_out.mean_loss);
        record.unsup_objective = Some(unsup_out.mean_objective);
        report.epochs.push(record);
        q_sup = sup_out.map;
        q_unsup = unsup_out.map;
    }
    // The raw supervised chain drifts in scale (the RCSLS objective is
    // linear in the map), which retrieval ignores but transport cost does
    // not; compare and return its orthogonal projection instead.
    let sup_candidate = if q_sup.is_orthogonal() {
        q_sup.clone()
    } else {
        q_sup.project_orthogonal()?
    };
    let (cost_sup, cost_unsup) = selection_costs(&sup_candidate, &q_unsup, src, tgt, cfg)?;
    let chosen = if cost_sup <= cost_unsup {
        ChosenSide::Supervised
    } else {
        ChosenSide::Unsupervised
    };
    report.selection = Some(SelectionSummary {
        cost_sup,
        cost_unsup,
        chosen,
    });
    let map = match chosen {
        ChosenSide::Supervised => sup_candidate,
        ChosenSide::Unsupervised => q_unsup.clone(),
    };
    Ok(RunOutcome {
        map,
        report,
        pss_candidates: Some((q_sup, q_unsup)),
    })
}

/// Iterated supervised training on the annotated lexicon alone, chaining
/// the raw (non-orthogonal) RCSLS parameters across epochs.
pub fn run_sup_only(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    annotated: &Lexicon,
    cfg: &StrategyConfig,
) -> Result<RunOutcome> {
    cfg.validate()?;
    check_dims(src, tgt)?;
    if annotated.is_empty() {
        return Err(Error::Empty("annotated lexicon is empty".into()));
    }
    let mut state = procrustes_init(src, tgt, annotated, cfg)?;
    let mut report = RunReport {
        strategy: Strategy::SupOnly,
        epochs: Vec::new(),
        selection: None,
    };
    for epoch in 0..cfg.epochs {
        let out = supervised::train_supervised(src, tgt, annotated, &state, &sup_cfg_for(cfg, epoch))?;
        report.epochs.push(EpochRecord {
            epoch,
            sup_loss: Some(out.mean_loss),
            unsup_objective: None,
            additional_size: None,
            additional_precision: None,
        });
        state = out.map;
    }
    Ok(RunOutcome {
        map: state,
        report,
        pss_candidates: None,
    })
}

/// Iterated unsupervised training from the Procrustes (or identity)
/// initialization, with no prior and no lexicon growth.
pub fn run_unsup_only(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    annotated: &Lexicon,
    cfg: &StrategyConfig,
) -> Result<RunOutcome> {
    cfg.validate()?;
    check_dims(src, tgt)?;
    if annotated.is_empty() {
        return Err(Error::Empty("annotated lexicon is empty".into()));
    }
    let mut state = procrustes_init(src, tgt, annotated, cfg)?;
    let mut report = RunReport {
        strategy: Strategy::UnsupOnly,
        epochs: Vec::new(),
        selection: None,
    };
    for epoch in 0..cfg.epochs {
        let out = unsupervised::train_unsupervised(src, tgt, &state, None, &unsup_cfg_for(cfg, epoch))?;
        report.epochs.push(EpochRecord {
            epoch,
            sup_loss: None,
            unsup_objective: Some(out.mean_objective),
            additional_size: None,
            additional_precision: None,
        });
        state = out.map;
    }
    Ok(RunOutcome {
        map: state,
        report,
        pss_candidates: None,
    })
}

/// Dispatch on `cfg.strategy`.
pub fn run_strategy(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    annotated: &Lexicon,
    cfg: &StrategyConfig,
    gold: Option<&Lexicon>,
) -> Result<RunOutcome> {
    match cfg.strategy {
        Strategy::Css => run_css(src, tgt, annotated, cfg, gold),
        Strategy::Pss => run_pss(src, tgt, annotated, cfg, gold),
        Strategy::SupOnly => run_sup_only(src, tgt, annotated, cfg),
        Strategy::UnsupOnly => run_unsup_only(src, tgt, annotated, cfg),
    }
}

fn gather_rows(space: &EmbeddingSpace, idx: &[usize]) -> Array2<f64> {
    let mut out = Array2::<f64>::zeros((idx.len(), space.dim()));
    for (mut row, &i) in out.outer_iter_mut().zip(idx.iter()) {
        row.assign(&space.matrix().row(i));
    }
    out
}

/// Transport costs of the two candidates on one shared seeded batch
/// (size `min(2000, pool)` per side), under the baseline entropic solve.
pub fn selection_costs(
    q_a: &LinearMap,
    q_b: &LinearMap,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    cfg: &StrategyConfig,
) -> Result<(f64, f64)> {
    check_dims(src, tgt)?;
    let pool_src = cfg.unsup.sample_pool.min(src.len());
    let pool_tgt = cfg.unsup.sample_pool.min(tgt.len());
    let m = 2000usize.min(pool_src).min(pool_tgt);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, STREAM_SELECT, 0));
    let xb = gather_rows(src, &linalg::sample_distinct(pool_src, m, &mut rng));
    let yb = gather_rows(tgt, &linalg::sample_distinct(pool_tgt, m, &mut rng));
    let cost = |q: &LinearMap| -> Result<f64> {
        let mapped = q.apply(&xb.view())?;
        let d = ot::cost_sq_euclidean(&mapped.view(), &yb.view())?;
        let sol = ot::sinkhorn(&d, cfg.unsup.epsilon, cfg.unsup.sinkhorn_max_iters, cfg.unsup.sinkhorn_tol)?;
        ot::transport_cost(&d, &sol.plan)
    };
    Ok((cost(q_a)?, cost(q_b)?))
}

/// Eq.-(4)-style model selection: the candidate with the smaller
/// seeded-batch transport cost wins; ties go to `q_a`.
pub fn select_by_wasserstein(
    q_a: &LinearMap,
    q_b: &LinearMap,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    cfg: &StrategyConfig,
) -> Result<LinearMap> {
    let (ca, cb) = selection_costs(q_a, q_b, src, tgt, cfg)?;
    Ok(if ca <= cb { q_a.clone() } else { q_b.clone() })
}

fn unit_rows_of(m: &Array2<f64>) -> Result<Array2<f64>> {
    let mut out = m.clone();
    linalg::unit_normalize_rows(&mut out)
        .map_err(|i| Error::Numeric(format!("zero-norm row {i} in retrieval")))?;
    Ok(out)
}

/// Rank all target indices for each query source index, best first (ties
/// toward the lower index).
///
/// `nn` scores by cosine similarity of the mapped query to each target;
/// `csls` subtracts both mean-similarity hubness corrections:
/// `2·cos(x_qQ, y) − r_T(x_qQ) − r_S(y)`, with neighborhoods of size
/// `csls_k` computed against the full opposite cloud.
pub fn retrieve(
    q: &LinearMap,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    queries: &[usize],
    method: RetrievalMethod,
    csls_k: usize,
) -> Result<Vec<Vec<usize>>> {
    check_dims(src, tgt)?;
    for &i in queries {
        if i >= src.len() {
            return Err(Error::Parameter(format!(
                "query index {i} outside the {}-word source vocabulary",
                src.len()
            )));
        }
    }
    if method == RetrievalMethod::Csls && (csls_k == 0 || csls_k > tgt.len() || csls_k > src.len())
    {
        return Err(Error::Parameter(format!(
            "csls_k = {csls_k} out of range for {}×{} vocabularies",
            src.len(),
            tgt.len()
        )));
    }
    let mapped_queries = unit_rows_of(&q.apply(&gather_rows(src, queries).view())?)?;
    let targets = unit_rows_of(tgt.matrix())?;
    // Query-by-target cosine similarities.
    let sims = linalg::matmul_bt(&mapped_queries.view(), &targets.view());
    let mut scores = sims.clone();
    if method == RetrievalMethod::Csls {
        // r_T: mean similarity of each mapped query to its csls_k nearest
        // targets; r_S: same for each target against the full mapped
        // source cloud.
        let mapped_all = unit_rows_of(&q.apply(&src.matrix().view())?)?;
        let back = linalg::matmul_bt(&targets.view(), &mapped_all.view());
        let mean_top = |row: &[f64]| -> f64 {
            linalg::top_k_desc(row, csls_k)
                .into_iter()
                .map(|j| row[j])
                .sum::<f64>()
                / csls_k as f64
        };
        let r_s: Vec<f64> = back
            .outer_iter()
            .map(|row| mean_top(row.as_slice().expect("standard layout")))
            .collect();
        for (qi, mut row) in scores.outer_iter_mut().enumerate() {
            let r_t = mean_top(sims.row(qi).as_slice().expect("standard layout"));
            for (j, v) in row.iter_mut().enumerate() {
                *v = 2.0 * *v - r_t - r_s[j];
            }
        }
    }
    let mut ranked = Vec::with_capacity(queries.len());
    for row in scores.outer_iter() {
        let mut order: Vec<usize> = (0..tgt.len()).collect();
        order.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
        ranked.push(order);
    }
    Ok(ranked)
}

/// Precision at each cutoff in `ks`: a test source counts as correct at
/// `k` when any of its gold targets appears in its top-`k` retrieval
/// (one-to-many aware; sources are counted once).
pub fn precision_at_ks(
    q: &LinearMap,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    test: &Lexicon,
    method: RetrievalMethod,
    csls_k: usize,
    ks: &[usize],
) -> Result<Vec<f64>> {
    if test.is_empty() {
        return Err(Error::Empty("test lexicon is empty".into()));
    }
    let mut gold: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut sources = Vec::new();
    for (s, t) in test.pairs() {
        gold.entry(s)
            .or_insert_with(|| {
                sources.push(s);
                Vec::new()
            })
            .push(t);
    }
    let ranked = retrieve(q, src, tgt, &sources, method, csls_k)?;
    let mut out = Vec::with_capacity(ks.len());
    for &k in ks {
        let correct = sources
            .iter()
            .zip(ranked.iter())
            .filter(|(s, order)| {
                let targets = &gold[*s];
                order.iter().take(k).any(|j| targets.contains(j))
            })
            .count();
        out.push(correct as f64 / sources.len() as f64);
    }
    Ok(out)
}

/// Word-translation accuracy at 1.
pub fn precision_at_1(
    q: &LinearMap,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    test: &Lexicon,
    method: RetrievalMethod,
    csls_k: usize,
) -> Result<f64> {
    Ok(precision_at_ks(q, src, tgt, test, method, csls_k, &[1])?[0])
}
