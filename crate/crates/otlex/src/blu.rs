//! Bi-directional Lexicon Update: mutual-nearest-neighbor candidate
//! generation, margin-based credit scoring, and additional-lexicon
//! selection over the most frequent rows of each space.

use ndarray::{s, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::embeddings::{EmbeddingSpace, Lexicon, PairOrigin};
use crate::error::{Error, Result};
use crate::linalg;
use crate::linmap::LinearMap;
use crate::ot;

/// Rows per block in the streamed distance passes; keeps peak memory at
/// `BLOCK × pool` floats instead of `pool × pool`.
const BLOCK: usize = 256;

/// Distance used for the forward/backward matrices. On unit-normalized
/// rows the two rank candidates identically (`‖u−v‖² = 2(1 − cos)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    Cosine,
    SqEuclidean,
}

impl std::str::FromStr for DistanceMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cosine" => Ok(DistanceMetric::Cosine),
            "sq_euclidean" => Ok(DistanceMetric::SqEuclidean),
            other => Err(Error::Config(format!(
                "unknown metric {other:?}; expected cosine or sq_euclidean"
            ))),
        }
    }
}

/// Hyperparameters for [`blu_update`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BluConfig {
    /// Competitor count in the credit margin (the paper's K).
    pub k: usize,
    /// Additional-lexicon size cap (the paper's l).
    pub cap: usize,
    /// Candidates are drawn from the top `pool` rows of each side.
    pub pool: usize,
    /// Distance for both matrices.
    pub metric: DistanceMetric,
}

impl Default for BluConfig {
    fn default() -> Self {
        Self {
            k: 10,
            cap: 10000,
            pool: 20000,
            metric: DistanceMetric::Cosine,
        }
    }
}

impl BluConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("blu.k must be at least 1".into()));
        }
        if self.pool == 0 {
            return Err(Error::Config("blu.pool must be at least 1".into()));
        }
        Ok(())
    }
}

/// Mutual-nearest-neighbor pair with its bidirectional credit margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredPair {
    pub src_index: usize,
    pub tgt_index: usize,
    /// Mean distance of the K forward competitors minus the pair distance.
    pub cs_forward: f64,
    /// Same margin over the backward distance column.
    pub cs_backward: f64,
    /// `cs_forward + cs_backward`.
    pub cs_total: f64,
}

fn metric_matrix(
    a: &ArrayView2<f64>,
    b: &ArrayView2<f64>,
    metric: DistanceMetric,
) -> Result<Array2<f64>> {
    let cost = match metric {
        DistanceMetric::Cosine => ot::cost_cosine_distance(a, b)?,
        DistanceMetric::SqEuclidean => ot::cost_sq_euclidean(a, b)?,
    };
    Ok(cost.into_values())
}

/// Right-multiplication matrix mapping target rows back into the source
/// space: `Qᵀ` when `Q` is orthogonal, else the pseudo-inverse.
fn backward_transform(q: &LinearMap) -> Result<Array2<f64>> {
    if q.is_orthogonal() {
        Ok(q.matrix().t().to_owned())
    } else {
        log::warn!(
            "lexicon update got a non-orthogonal map; backward pass uses the pseudo-inverse"
        );
        linalg::pseudo_inverse(q.matrix())
    }
}

/// Forward and backward distance matrices: `D→_ij = dist(x_i·Q, y_j)` and
/// `D←_ij = dist(x_i, y_j·Qᵀ)` (pseudo-inverse in place of `Qᵀ` for a
/// non-orthogonal map).
pub fn distance_matrices(
    x: &ArrayView2<f64>,
    y: &ArrayView2<f64>,
    q: &LinearMap,
    metric: DistanceMetric,
) -> Result<(Array2<f64>, Array2<f64>)> {
    if x.ncols() != y.ncols() {
        return Err(Error::Dimension(format!(
            "row widths differ: {} vs {}",
            x.ncols(),
            y.ncols()
        )));
    }
    let mapped_x = q.apply(x)?;
    let mapped_y = y.dot(&backward_transform(q)?);
    let fwd = metric_matrix(&mapped_x.view(), y, metric)?;
    let bwd = metric_matrix(x, &mapped_y.view(), metric)?;
    Ok((fwd, bwd))
}

/// Mutual-nearest-neighbor pairs `B = B→ ∩ B←` from explicit distance
/// matrices: `(i,j)` is kept when `j` is the argmin of row `i` of `D→`
/// and `i` is the argmin of column `j` of `D←` (ties toward the lower
/// index). Pairs come back sorted by source index.
pub fn candidate_pairs(
    d_fwd: &ArrayView2<f64>,
    d_bwd: &ArrayView2<f64>,
) -> Result<Vec<(usize, usize)>> {
    if d_fwd.dim() != d_bwd.dim() {
        return Err(Error::Dimension(format!(
            "distance matrices differ in shape: {:?} vs {:?}",
            d_fwd.dim(),
            d_bwd.dim()
        )));
    }
    if d_fwd.is_empty() {
        return Err(Error::Empty("distance matrices are empty".into()));
    }
    let mut scratch = Vec::new();
    let fwd_argmin: Vec<usize> = d_fwd
        .outer_iter()
        .map(|row| {
            scratch.clear();
            scratch.extend(row.iter());
            linalg::argmin(&scratch)
        })
        .collect();
    let bwd_argmin: Vec<usize> = (0..d_bwd.ncols())
        .map(|j| {
            scratch.clear();
            scratch.extend(d_bwd.column(j).iter());
            linalg::argmin(&scratch)
        })
        .collect();
    Ok(fwd_argmin
        .iter()
        .enumerate()
        .filter(|&(i, &j)| bwd_argmin[j] == i)
        .map(|(i, &j)| (i, j))
        .collect())
}

/// Candidate generation from raw spaces: builds both distance matrices
/// under `Q` and intersects the forward and backward nearest-neighbor
/// pair sets.
pub fn bidirectional_candidates(
    x: &ArrayView2<f64>,
    y: &ArrayView2<f64>,
    q: &LinearMap,
    metric: DistanceMetric,
) -> Result<Vec<(usize, usize)>> {
    let (fwd, bwd) = distance_matrices(x, y, q, metric)?;
    candidate_pairs(&fwd.view(), &bwd.view())
}

/// Credit scores for `pairs`: for `(i,j)`, the forward score is the mean
/// distance of the `k` nearest columns of row `i` of `d_fwd` excluding
/// `j`, minus `D→_ij`; the backward score mirrors it over column `j` of
/// `d_bwd`. Larger means the pair beats its competitors by a wider
/// margin.
pub fn credit_scores(
    d_fwd: &ArrayView2<f64>,
    d_bwd: &ArrayView2<f64>,
    pairs: &[(usize, usize)],
    k: usize,
) -> Result<Vec<ScoredPair>> {
    if d_fwd.dim() != d_bwd.dim() {
        return Err(Error::Dimension(format!(
            "distance matrices differ in shape: {:?} vs {:?}",
            d_fwd.dim(),
            d_bwd.dim()
        )));
    }
    let (rows, cols) = d_fwd.dim();
    if k == 0 {
        return Err(Error::Parameter("credit margin needs k ≥ 1".into()));
    }
    if k >= cols || k >= rows {
        return Err(Error::Parameter(format!(
            "k = {k} leaves no competitors in a {rows}×{cols} distance matrix"
        )));
    }
    let mut scratch = Vec::new();
    let margin = |values: &[f64], excluded: usize| -> f64 {
        let picked = linalg::top_k_asc(values, k + 1);
        let sum: f64 = picked
            .iter()
            .copied()
            .filter(|&c| c != excluded)
            .take(k)
            .map(|c| values[c])
            .sum();
        sum / k as f64 - values[excluded]
    };
    let mut out = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        if i >= rows || j >= cols {
            return Err(Error::Parameter(format!(
                "pair ({i},{j}) outside the {rows}×{cols} distance matrices"
            )));
        }
        scratch.clear();
        scratch.extend(d_fwd.row(i).iter());
        let cs_forward = margin(&scratch, j);
        scratch.clear();
        scratch.extend(d_bwd.column(j).iter());
        let cs_backward = margin(&scratch, i);
        out.push(ScoredPair {
            src_index: i,
            tgt_index: j,
            cs_forward,
            cs_backward,
            cs_total: cs_forward + cs_backward,
        });
    }
    Ok(out)
}

/// Candidates in selection order: credit descending, ties by `(src, tgt)`
/// index ascending.
fn rank_candidates(scored: &[ScoredPair]) -> Vec<ScoredPair> {
    let mut order = scored.to_vec();
    order.sort_by(|a, b| {
        b.cs_total.total_cmp(&a.cs_total).then_with(|| {
            (a.src_index, a.tgt_index).cmp(&(b.src_index, b.tgt_index))
        })
    });
    order
}

fn select_into(
    scored: &[ScoredPair],
    annotated: &Lexicon,
    cap: usize,
) -> Result<(Lexicon, Vec<ScoredPair>)> {
    let mut extended = annotated.clone();
    let mut selected = Vec::new();
    for sp in rank_candidates(scored) {
        if selected.len() == cap {
            break;
        }
        if extended.contains(sp.src_index, sp.tgt_index) {
            continue;
        }
        extended.push(sp.src_index, sp.tgt_index, PairOrigin::Additional)?;
        selected.push(sp);
    }
    Ok((extended, selected))
}

/// Extend `annotated` with the top-`cap` scored pairs by credit, skipping
/// pairs already present; added entries carry [`PairOrigin::Additional`].
pub fn select_additional(
    scored: &[ScoredPair],
    annotated: &Lexicon,
    cap: usize,
) -> Result<Lexicon> {
    Ok(select_into(scored, annotated, cap)?.0)
}

/// Result of one full lexicon update.
#[derive(Debug, Clone)]
pub struct BluOutcome {
    /// `annotated ⊕ selected` with origins preserved.
    pub extended: Lexicon,
    /// The pairs actually added, in selection (credit-descending) order.
    pub selected: Vec<ScoredPair>,
    /// Mutual-nearest-neighbor candidates before the cap and dedup.
    pub candidate_count: usize,
}

/// Full update over the top-`pool` rows of each space: candidate
/// generation, credit scoring, and selection, streamed in row/column
/// blocks so no `pool × pool` matrix is materialized.
pub fn blu_update(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    q: &LinearMap,
    annotated: &Lexicon,
    cfg: &BluConfig,
) -> Result<BluOutcome> {
    cfg.validate()?;
    if src.dim() != tgt.dim() {
        return Err(Error::Dimension(format!(
            "embedding dimensions differ: {} vs {}",
            src.dim(),
            tgt.dim()
        )));
    }
    if q.dim() != src.dim() {
        return Err(Error::Dimension(format!(
            "map is {}-dimensional but embeddings are {}-dimensional",
            q.dim(),
            src.dim()
        )));
    }
    let px = cfg.pool.min(src.len());
    let py = cfg.pool.min(tgt.len());
    if cfg.k >= px || cfg.k >= py {
        return Err(Error::Parameter(format!(
            "blu.k = {} leaves no competitors in {px}×{py} pools",
            cfg.k
        )));
    }
    let x = src.matrix().slice(s![..px, ..]);
    let y = tgt.matrix().slice(s![..py, ..]);
    let mapped_x = q.apply(&x)?;
    let mapped_y = y.dot(&backward_transform(q)?);

    // Pass 1: rows of D→; keep each row's k+1 nearest columns (the argmin
    // first). For a mutual pair the matched column is always the argmin,
    // so the buffer alone determines the forward credit score.
    let nearest = |values: &[f64]| -> Vec<(usize, f64)> {
        linalg::top_k_asc(values, cfg.k + 1)
            .into_iter()
            .map(|c| (c, values[c]))
            .collect()
    };
    let mut scratch = Vec::new();
    let mut fwd_stats: Vec<Vec<(usize, f64)>> = Vec::with_capacity(px);
    for start in (0..px).step_by(BLOCK) {
        let end = (start + BLOCK).min(px);
        let block = metric_matrix(&mapped_x.slice(s![start..end, ..]), &y, cfg.metric)?;
        for row in block.outer_iter() {
            scratch.clear();
            scratch.extend(row.iter());
            fwd_stats.push(nearest(&scratch));
        }
    }
    // Pass 2: columns of D←, streamed over target blocks. The source side
    // stays the first metric argument so every entry is computed by the
    // same expression as a dense D← (blocking must not change a bit).
    let mut bwd_stats: Vec<Vec<(usize, f64)>> = Vec::with_capacity(py);
    for start in (0..py).step_by(BLOCK) {
        let end = (start + BLOCK).min(py);
        let block = metric_matrix(&x, &mapped_y.slice(s![start..end, ..]), cfg.metric)?;
        for c in 0..(end - start) {
            scratch.clear();
            scratch.extend(block.column(c).iter());
            bwd_stats.push(nearest(&scratch));
        }
    }

    let mut scored = Vec::new();
    for (i, fwd) in fwd_stats.iter().enumerate() {
        let (j, d_fwd) = fwd[0];
        let (i_back, d_bwd) = bwd_stats[j][0];
        if i_back != i {
            continue;
        }
        let cs_forward =
            fwd[1..].iter().map(|&(_, v)| v).sum::<f64>() / cfg.k as f64 - d_fwd;
        let cs_backward =
            bwd_stats[j][1..].iter().map(|&(_, v)| v).sum::<f64>() / cfg.k as f64 - d_bwd;
        scored.push(ScoredPair {
            src_index: i,
            tgt_index: j,
            cs_forward,
            cs_backward,
            cs_total: cs_forward + cs_backward,
        });
    }
    let candidate_count = scored.len();
    let (extended, selected) = select_into(&scored, annotated, cfg.cap)?;
    Ok(BluOutcome {
        extended,
        selected,
        candidate_count,
    })
}
