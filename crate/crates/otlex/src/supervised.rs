//! Supervised aligners: closed-form orthogonal Procrustes and RCSLS loss
//! minimization by stochastic gradient descent over a lexicon.

use ndarray::{s, Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embeddings::{subset_rows, EmbeddingSpace, Lexicon, Side};
use crate::error::{Error, Result};
use crate::linalg;
use crate::linmap::LinearMap;

/// Hyperparameters for [`train_supervised`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupConfig {
    /// Pairs sampled per SGD step (uniform with replacement).
    pub batch_size: usize,
    /// SGD step size; 0 is allowed and leaves the map untouched.
    pub learning_rate: f64,
    /// SGD steps per call.
    pub iters_per_epoch: usize,
    /// RCSLS neighbor count.
    pub k: usize,
    /// Most-frequent rows of each vocabulary used as CSLS neighbor pools
    /// (clamped to the vocabulary size).
    pub neighbor_pool: usize,
    /// PRNG seed for batch sampling.
    pub seed: u64,
}

impl Default for SupConfig {
    fn default() -> Self {
        Self {
            batch_size: 400,
            learning_rate: 1.0,
            iters_per_epoch: 2000,
            k: 10,
            neighbor_pool: 20000,
            seed: 42,
        }
    }
}

impl SupConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("sup.batch_size must be at least 1".into()));
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config(format!(
                "sup.learning_rate must be finite and nonnegative, got {}",
                self.learning_rate
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("sup.k must be at least 1".into()));
        }
        if self.neighbor_pool == 0 {
            return Err(Error::Config("sup.neighbor_pool must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of one supervised training call.
#[derive(Debug, Clone)]
pub struct SupTraining {
    /// Final map; the orthogonal flag is cleared (RCSLS is unconstrained).
    pub map: LinearMap,
    /// Mean per-iteration batch loss (0 when no iterations ran).
    pub mean_loss: f64,
}

/// Closed-form orthogonal Procrustes: the orthogonal `Q` minimizing
/// `Σ_i ‖s_iQ − t_i‖²`, namely `Q = U·Vᵀ` from the SVD of `SᵀT`.
pub fn procrustes(s: &ArrayView2<f64>, t: &ArrayView2<f64>) -> Result<LinearMap> {
    if s.nrows() == 0 {
        return Err(Error::Empty("procrustes needs at least one row pair".into()));
    }
    if s.nrows() != t.nrows() || s.ncols() != t.ncols() {
        return Err(Error::Dimension(format!(
            "procrustes inputs differ in shape: {}×{} vs {}×{}",
            s.nrows(),
            s.ncols(),
            t.nrows(),
            t.ncols()
        )));
    }
    let m = s.t().dot(t);
    let q = linalg::orthogonal_factor(&m)?;
    LinearMap::new(q, true)
}

/// RCSLS batch loss and its gradient with respect to `Q`, holding the
/// neighbor sets fixed at their current values (envelope convention; ties
/// break toward the lower pool index).
///
/// The loss is the batch mean of
/// `−2(s_iQ)·t_i + (1/k)·Σ_{y∈N_Y(s_iQ)}(s_iQ)·y + (1/k)·Σ_{xQ∈N_X(t_i)}(xQ)·t_i`
/// with neighbor sets drawn from the supplied pools.
pub fn rcsls_loss_and_grad(
    q: &LinearMap,
    s_batch: &ArrayView2<f64>,
    t_batch: &ArrayView2<f64>,
    x_pool: &ArrayView2<f64>,
    y_pool: &ArrayView2<f64>,
    k: usize,
) -> Result<(f64, Array2<f64>)> {
    let d = q.dim();
    if s_batch.ncols() != d || t_batch.ncols() != d || x_pool.ncols() != d || y_pool.ncols() != d {
        return Err(Error::Dimension(format!(
            "all inputs must have {d} columns to match the map"
        )));
    }
    if s_batch.nrows() != t_batch.nrows() {
        return Err(Error::Dimension(format!(
            "batch sides differ: {} vs {} rows",
            s_batch.nrows(),
            t_batch.nrows()
        )));
    }
    let nb = s_batch.nrows();
    if nb == 0 {
        return Err(Error::Empty("rcsls batch is empty".into()));
    }
    let max_k = x_pool.nrows().min(y_pool.nrows());
    if k < 1 || k > max_k {
        return Err(Error::Parameter(format!(
            "rcsls neighbor count k={k} out of range 1..={max_k}"
        )));
    }

    let sq = q.apply(s_batch)?;
    let xq = q.apply(x_pool)?;
    let dots_y = linalg::matmul_bt(&sq.view(), y_pool); // (s_iQ)·y_j
    let dots_x = linalg::matmul_bt(t_batch, &xq.view()); // t_i·(x_jQ)
    let kf = k as f64;

    // Per-batch-row neighbor averages: ny_i = (1/k)·Σ selected y rows,
    // nx_i = (1/k)·Σ selected (unmapped) x rows.
    let mut ny = Array2::<f64>::zeros((nb, d));
    let mut nx = Array2::<f64>::zeros((nb, d));
    let mut loss = 0.0f64;
    for i in 0..nb {
        let mut term = -2.0 * sq.row(i).dot(&t_batch.row(i));
        let yrow = dots_y.row(i);
        let yslice = yrow.as_slice().expect("standard layout");
        let mut ysum = 0.0;
        for j in linalg::top_k_desc(yslice, k) {
            ysum += yslice[j];
            let mut acc = ny.row_mut(i);
            acc += &y_pool.row(j);
        }
        term += ysum / kf;
        let xrow = dots_x.row(i);
        let xslice = xrow.as_slice().expect("standard layout");
        let mut xsum = 0.0;
        for j in linalg::top_k_desc(xslice, k) {
            xsum += xslice[j];
            let mut acc = nx.row_mut(i);
            acc += &x_pool.row(j);
        }
        term += xsum / kf;
        loss += term;
    }
    loss /= nb as f64;
    ny /= kf;
    nx /= kf;

    // d/dQ of (uQ)·v is the outer product uᵀv, so with neighbor sets fixed:
    // grad = (Sᵀ(−2T + NY) + NXᵀT) / nb.
    let combined = &ny - &(2.0 * t_batch.to_owned());
    let mut grad = s_batch.t().dot(&combined) + nx.t().dot(t_batch);
    grad /= nb as f64;
    Ok((loss, grad))
}

/// Run `iters_per_epoch` RCSLS SGD steps over the lexicon, starting from
/// `init`. Batches are drawn uniformly with replacement from the lexicon
/// pairs; neighbor pools are the top `neighbor_pool` rows of each
/// vocabulary. The returned map has the orthogonal flag cleared.
pub fn train_supervised(
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    lexicon: &Lexicon,
    init: &LinearMap,
    cfg: &SupConfig,
) -> Result<SupTraining> {
    cfg.validate()?;
    let d = src.dim();
    if tgt.dim() != d {
        return Err(Error::Dimension(format!(
            "embedding dimensions differ: {d} vs {}",
            tgt.dim()
        )));
    }
    if init.dim() != d {
        return Err(Error::Dimension(format!(
            "init map is {}-dimensional but embeddings are {d}-dimensional",
            init.dim()
        )));
    }
    if lexicon.is_empty() {
        return Err(Error::Empty("supervised training needs a nonempty lexicon".into()));
    }

    let s_full = subset_rows(src, lexicon, Side::Source)?;
    let t_full = subset_rows(tgt, lexicon, Side::Target)?;
    let px = src.len().min(cfg.neighbor_pool);
    let py = tgt.len().min(cfg.neighbor_pool);
    if cfg.k > px.min(py) {
        return Err(Error::Parameter(format!(
            "sup.k={} exceeds the neighbor pools ({px}×{py})",
            cfg.k
        )));
    }
    let x_pool = src.matrix().slice(s![..px, ..]);
    let y_pool = tgt.matrix().slice(s![..py, ..]);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = lexicon.len();
    let mut q = init.matrix().clone();
    let mut s_batch = Array2::<f64>::zeros((cfg.batch_size, d));
    let mut t_batch = Array2::<f64>::zeros((cfg.batch_size, d));
    let mut loss_sum = 0.0f64;
    for _ in 0..cfg.iters_per_epoch {
        for b in 0..cfg.batch_size {
            let j = rng.random_range(0..p);
            s_batch.row_mut(b).assign(&s_full.row(j));
            t_batch.row_mut(b).assign(&t_full.row(j));
        }
        let qmap = LinearMap::new(q.clone(), false)?;
        let (loss, grad) = rcsls_loss_and_grad(
            &qmap,
            &s_batch.view(),
            &t_batch.view(),
            &x_pool,
            &y_pool,
            cfg.k,
        )?;
        loss_sum += loss;
        q.scaled_add(-cfg.learning_rate, &grad);
    }
    let mean_loss = if cfg.iters_per_epoch > 0 {
        loss_sum / cfg.iters_per_epoch as f64
    } else {
        0.0
    };
    Ok(SupTraining {
        map: LinearMap::new(q, false)?,
        mean_loss,
    })
}

/// Sum of squared residuals `Σ_i ‖s_iQ − t_i‖²`; the quantity Procrustes
/// minimizes, exposed for diagnostics and tests.
pub fn procrustes_residual(
    s: &ArrayView2<f64>,
    t: &ArrayView2<f64>,
    q: &LinearMap,
) -> Result<f64> {
    let mapped = q.apply(s)?;
    if mapped.shape() != t.shape() {
        return Err(Error::Dimension("residual shapes differ".into()));
    }
    Ok(mapped
        .iter()
        .zip(t.iter())
        .map(|(&a, &b)| (a - b) * (a - b))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::PairOrigin;
    use crate::embeddings::Normalization;
    use ndarray::array;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
        Array2::from_shape_fn((rows, cols), |_| rng.random_range(-1.0..1.0f64))
    }

    fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> Array2<f64> {
        linalg::orthogonal_factor(&random_matrix(rng, d, d)).unwrap()
    }

    #[test]
    fn procrustes_identity_when_targets_equal_sources() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_matrix(&mut rng, 20, 5);
        let q = procrustes(&s.view(), &s.view()).unwrap();
        assert!(
            linalg::max_abs_diff(&q.matrix().view(), &Array2::eye(5).view()) < 1e-10
        );
        assert!(q.is_orthogonal());
    }

    #[test]
    fn procrustes_recovers_a_planted_rotation() {
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
            let s = random_matrix(&mut rng, 50, 8);
            let r = random_orthogonal(&mut rng, 8);
            let t = s.dot(&r);
            let q = procrustes(&s.view(), &t.view()).unwrap();
            assert!(
                linalg::max_abs_diff(&q.matrix().view(), &r.view()) < 1e-8,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn procrustes_orthogonality_invariant_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = random_matrix(&mut rng, 30, 6);
        let t = random_matrix(&mut rng, 30, 6);
        let q = procrustes(&s.view(), &t.view()).unwrap();
        let qtq = q.matrix().t().dot(q.matrix());
        assert!(linalg::max_abs_diff(&qtq.view(), &Array2::eye(6).view()) < 1e-6);
    }

    #[test]
    fn procrustes_matches_eigen_decomposition_oracle_on_noisy_data() {
        // Independent path: polar factor via the symmetric eigensystem of
        // MᵀM instead of the SVD of M.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let s = random_matrix(&mut rng, 40, 6);
        let r = random_orthogonal(&mut rng, 6);
        let noise = random_matrix(&mut rng, 40, 6) * 0.01;
        let t = s.dot(&r) + noise;

        let q = procrustes(&s.view(), &t.view()).unwrap();

        let m = s.t().dot(&t);
        let m_na = nalgebra::DMatrix::from_row_iterator(6, 6, m.iter().cloned());
        let mtm = m_na.transpose() * &m_na;
        let eig = nalgebra::SymmetricEigen::new(mtm);
        let inv_sqrt = nalgebra::DMatrix::from_diagonal(
            &eig.eigenvalues.map(|l| 1.0 / l.max(1e-300).sqrt()),
        );
        let h_inv = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
        let q_oracle = m_na * h_inv;
        let q_oracle = Array2::from_shape_fn((6, 6), |(i, j)| q_oracle[(i, j)]);
        let q_oracle = LinearMap::new(q_oracle, true).unwrap();

        let r1 = procrustes_residual(&s.view(), &t.view(), &q).unwrap();
        let r2 = procrustes_residual(&s.view(), &t.view(), &q_oracle).unwrap();
        assert!((r1 - r2).abs() < 1e-8, "{r1} vs {r2}");
    }

    #[test]
    fn procrustes_residual_beats_random_orthogonal_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = random_matrix(&mut rng, 25, 5);
        let t = random_matrix(&mut rng, 25, 5);
        let q = procrustes(&s.view(), &t.view()).unwrap();
        let best = procrustes_residual(&s.view(), &t.view(), &q).unwrap();
        for _ in 0..100 {
            let other = LinearMap::new(random_orthogonal(&mut rng, 5), true).unwrap();
            let r = procrustes_residual(&s.view(), &t.view(), &other).unwrap();
            assert!(best <= r + 1e-12);
        }
    }

    #[test]
    fn rcsls_loss_is_zero_on_singleton_identity_case() {
        let a = array![[1.0, 0.0]];
        let q = LinearMap::identity(2).unwrap();
        let (loss, _) =
            rcsls_loss_and_grad(&q, &a.view(), &a.view(), &a.view(), &a.view(), 1).unwrap();
        assert_eq!(loss, 0.0);
    }

    #[test]
    fn rcsls_gradient_matches_symbolic_expansion_at_zero_map() {
        // At Q = 0 every dot product ties at 0, so each neighbor set is the
        // first k pool rows, and the gradient reduces to
        // (1/nb)·Σ_i s_iᵀ(−2t_i + ȳ) + x̄ᵀ·(1/nb)·Σ_i t_i
        // with ȳ, x̄ the means of those fixed rows.
        let s = array![[1.0, 2.0], [0.5, -1.0]];
        let t = array![[0.0, 1.0], [2.0, 0.25]];
        let x_pool = array![[1.0, 0.0], [0.0, 1.0], [3.0, -2.0]];
        let y_pool = array![[0.5, 0.5], [1.0, -1.0], [0.0, 2.0]];
        let k = 2usize;
        let zero = LinearMap::new(Array2::zeros((2, 2)), false).unwrap();
        let (loss, grad) = rcsls_loss_and_grad(
            &zero,
            &s.view(),
            &t.view(),
            &x_pool.view(),
            &y_pool.view(),
            k,
        )
        .unwrap();
        assert_eq!(loss, 0.0, "every term of the loss involves Q");

        let y_bar = array![0.75, -0.25]; // mean of y_pool rows 0,1
        let x_bar = array![0.5, 0.5]; // mean of x_pool rows 0,1
        let mut want = Array2::<f64>::zeros((2, 2));
        for i in 0..2 {
            let si = s.row(i);
            let ti = t.row(i);
            for a in 0..2 {
                for b in 0..2 {
                    want[[a, b]] +=
                        si[a] * (-2.0 * ti[b] + y_bar[b]) + x_bar[a] * ti[b];
                }
            }
        }
        want /= 2.0;
        assert!(linalg::max_abs_diff(&grad.view(), &want.view()) < 1e-12);
    }

    #[test]
    fn rcsls_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 5 {
            let s = random_matrix(&mut rng, 4, 3);
            let t = random_matrix(&mut rng, 4, 3);
            let x_pool = random_matrix(&mut rng, 6, 3);
            let y_pool = random_matrix(&mut rng, 6, 3);
            let q0 = random_matrix(&mut rng, 3, 3);
            let k = 2;
            if !neighbor_sets_stable(&q0, &s, &t, &x_pool, &y_pool, k, 1e-3) {
                continue;
            }
            let qmap = LinearMap::new(q0.clone(), false).unwrap();
            let (_, grad) = rcsls_loss_and_grad(
                &qmap,
                &s.view(),
                &t.view(),
                &x_pool.view(),
                &y_pool.view(),
                k,
            )
            .unwrap();
            let step = 1e-5;
            for a in 0..3 {
                for b in 0..3 {
                    let mut plus = q0.clone();
                    plus[[a, b]] += step;
                    let mut minus = q0.clone();
                    minus[[a, b]] -= step;
                    let lp = loss_at(&plus, &s, &t, &x_pool, &y_pool, k);
                    let lm = loss_at(&minus, &s, &t, &x_pool, &y_pool, k);
                    let fd = (lp - lm) / (2.0 * step);
                    let g = grad[[a, b]];
                    let rel = (fd - g).abs() / g.abs().max(fd.abs()).max(1e-8);
                    assert!(rel < 1e-4, "entry ({a},{b}): fd {fd} vs grad {g}");
                }
            }
            checked += 1;
        }
    }

    fn loss_at(
        q: &Array2<f64>,
        s: &Array2<f64>,
        t: &Array2<f64>,
        x_pool: &Array2<f64>,
        y_pool: &Array2<f64>,
        k: usize,
    ) -> f64 {
        let qmap = LinearMap::new(q.clone(), false).unwrap();
        rcsls_loss_and_grad(
            &qmap,
            &s.view(),
            &t.view(),
            &x_pool.view(),
            &y_pool.view(),
            k,
        )
        .unwrap()
        .0
    }

    /// True when the k-th/(k+1)-th neighbor margins exceed `margin` for all
    /// batch rows in both directions, so small perturbations of Q cannot
    /// flip neighbor sets.
    fn neighbor_sets_stable(
        q: &Array2<f64>,
        s: &Array2<f64>,
        t: &Array2<f64>,
        x_pool: &Array2<f64>,
        y_pool: &Array2<f64>,
        k: usize,
        margin: f64,
    ) -> bool {
        let sq = s.dot(q);
        let xq = x_pool.dot(q);
        let dots_y = linalg::matmul_bt(&sq.view(), &y_pool.view());
        let dots_x = linalg::matmul_bt(&t.view(), &xq.view());
        for dots in [&dots_y, &dots_x] {
            for row in dots.outer_iter() {
                let mut v: Vec<f64> = row.to_vec();
                v.sort_by(|a, b| b.total_cmp(a));
                if v[k - 1] - v[k] < margin {
                    return false;
                }
            }
        }
        true
    }

    fn planted_spaces(
        rng: &mut ChaCha8Rng,
        n: usize,
        d: usize,
    ) -> (EmbeddingSpace, EmbeddingSpace, Array2<f64>, Lexicon) {
        let mut x = random_matrix(rng, n, d);
        linalg::unit_normalize_rows(&mut x).unwrap();
        let r = random_orthogonal(rng, d);
        let y = x.dot(&r);
        let words_s: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let words_t: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
        let src = EmbeddingSpace::new(words_s, x, Normalization::Unit).unwrap();
        let tgt = EmbeddingSpace::new(words_t, y, Normalization::Unit).unwrap();
        let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
        let lex = Lexicon::from_pairs(n, n, &pairs, PairOrigin::Annotated).unwrap();
        (src, tgt, r, lex)
    }

    #[test]
    fn train_supervised_with_zero_learning_rate_returns_init() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (src, tgt, _, lex) = planted_spaces(&mut rng, 30, 4);
        let init = LinearMap::identity(4).unwrap();
        let cfg = SupConfig {
            batch_size: 8,
            learning_rate: 0.0,
            iters_per_epoch: 5,
            k: 3,
            neighbor_pool: 30,
            seed: 9,
        };
        let out = train_supervised(&src, &tgt, &lex, &init, &cfg).unwrap();
        assert_eq!(out.map.matrix(), init.matrix());
        assert!(!out.map.is_orthogonal());
    }

    #[test]
    fn train_supervised_is_deterministic_for_a_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let (src, tgt, r, lex) = planted_spaces(&mut rng, 40, 5);
        let init = LinearMap::new(r, true).unwrap();
        let cfg = SupConfig {
            batch_size: 16,
            learning_rate: 0.1,
            iters_per_epoch: 10,
            k: 2,
            neighbor_pool: 40,
            seed: 123,
        };
        let a = train_supervised(&src, &tgt, &lex, &init, &cfg).unwrap();
        let b = train_supervised(&src, &tgt, &lex, &init, &cfg).unwrap();
        assert_eq!(a.map.matrix(), b.map.matrix());
        assert_eq!(a.mean_loss, b.mean_loss);
    }

    #[test]
    fn train_supervised_stays_near_a_planted_optimum() {
        // Init at the planted rotation: over the first 10 iterations the
        // per-iteration loss must not increase and the map must stay close
        // to the rotation.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let (src, tgt, r, lex) = planted_spaces(&mut rng, 60, 6);
        let s_full = subset_rows(&src, &lex, Side::Source).unwrap();
        let t_full = subset_rows(&tgt, &lex, Side::Target).unwrap();
        let full_loss = |map: &LinearMap| {
            rcsls_loss_and_grad(
                map,
                &s_full.view(),
                &t_full.view(),
                &s_full.view(),
                &t_full.view(),
                3,
            )
            .unwrap()
            .0
        };
        let mut map = LinearMap::new(r.clone(), true).unwrap();
        let mut losses = vec![full_loss(&map)];
        for it in 0..10u64 {
            let cfg = SupConfig {
                batch_size: 240,
                learning_rate: 0.05,
                iters_per_epoch: 1,
                k: 3,
                neighbor_pool: 60,
                seed: 70 + it,
            };
            map = train_supervised(&src, &tgt, &lex, &map, &cfg).unwrap().map;
            losses.push(full_loss(&map));
        }
        for w in losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "loss rose: {losses:?}");
        }
        assert!(
            linalg::max_abs_diff(&map.matrix().view(), &r.view()) < 0.05,
            "drifted too far from the planted rotation"
        );
    }

    #[test]
    fn train_supervised_rejects_empty_lexicon() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let (src, tgt, _, _) = planted_spaces(&mut rng, 10, 3);
        let empty = Lexicon::new(10, 10);
        let init = LinearMap::identity(3).unwrap();
        let err = train_supervised(&src, &tgt, &empty, &init, &SupConfig::default()).unwrap_err();
        assert_eq!(err.class(), "empty-input");
    }

    #[test]
    fn train_supervised_epoch_losses_trend_down() {
        // Chained epochs on fixed data: allow at most 5% of the transitions
        // to increase.
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let (src, tgt, _, lex) = planted_spaces(&mut rng, 50, 4);
        let mut map = LinearMap::identity(4).unwrap();
        let mut losses = Vec::new();
        for epoch in 0..20u64 {
            let cfg = SupConfig {
                batch_size: 50,
                learning_rate: 0.5,
                iters_per_epoch: 20,
                k: 2,
                neighbor_pool: 50,
                seed: 1000 + epoch,
            };
            let out = train_supervised(&src, &tgt, &lex, &map, &cfg).unwrap();
            losses.push(out.mean_loss);
            map = out.map;
        }
        let increases = losses.windows(2).filter(|w| w[1] > w[0]).count();
        assert!(
            increases <= 1,
            "{increases} epoch-to-epoch increases out of 19: {losses:?}"
        );
    }
}
