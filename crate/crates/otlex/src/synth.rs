//! Seeded synthetic alignment problems with a known rotation and
//! permutation, for ground-truth-verifiable tests and benchmarks.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::embeddings::{EmbeddingSpace, Lexicon, Normalization, PairOrigin};
use crate::error::{Error, Result};
use crate::linalg;
use crate::linmap::LinearMap;

/// A generated instance: `tgt` row `π(i)` is `src` row `i` mapped through
/// the planted rotation plus Gaussian noise, then unit-normalized.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub src: EmbeddingSpace,
    pub tgt: EmbeddingSpace,
    pub planted_map: LinearMap,
    /// Source row `i` corresponds to target row `planted_permutation[i]`.
    pub planted_permutation: Vec<usize>,
    pub noise_sigma: f64,
    pub seed: u64,
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| StandardNormal.sample(rng))
}

fn seeded_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

/// Generate an isotropic instance: unit-normalized Gaussian source cloud,
/// planted orthogonal map, seeded permutation, per-coordinate noise of
/// scale `noise_sigma` added before the target is re-normalized.
pub fn generate(n: usize, d: usize, noise_sigma: f64, seed: u64) -> Result<SyntheticInstance> {
    generate_anisotropic(n, d, noise_sigma, 1.0, seed)
}

/// Hard-mode variant: source coordinates are scaled by a geometric ladder
/// from 1 down to `1/condition` before normalization, concentrating the
/// cloud along dominant axes. This inflates hubness and lowers the
/// structural similarity between the spaces, emulating distant-language
/// pairs. `condition = 1` reduces to [`generate`] (identical RNG stream).
pub fn generate_anisotropic(
    n: usize,
    d: usize,
    noise_sigma: f64,
    condition: f64,
    seed: u64,
) -> Result<SyntheticInstance> {
    if d < 2 || n < d {
        return Err(Error::Parameter(format!(
            "instance needs n ≥ d ≥ 2, got n = {n}, d = {d}"
        )));
    }
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::Parameter(format!(
            "noise_sigma must be finite and nonnegative, got {noise_sigma}"
        )));
    }
    if !(condition >= 1.0) || !condition.is_finite() {
        return Err(Error::Parameter(format!(
            "condition must be finite and ≥ 1, got {condition}"
        )));
    }
    // Fixed draw order: source cloud, map, permutation, noise.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = gaussian_matrix(&mut rng, n, d);
    if condition > 1.0 {
        for j in 0..d {
            let scale = condition.powf(-(j as f64) / (d - 1) as f64);
            for v in x.column_mut(j).iter_mut() {
                *v *= scale;
            }
        }
    }
    linalg::unit_normalize_rows(&mut x)
        .map_err(|i| Error::Numeric(format!("degenerate source row {i}")))?;
    let r = linalg::orthogonal_factor(&gaussian_matrix(&mut rng, d, d))?;
    let pi = seeded_permutation(&mut rng, n);
    let mapped = x.dot(&r);
    let mut y = Array2::<f64>::zeros((n, d));
    for i in 0..n {
        y.row_mut(pi[i]).assign(&mapped.row(i));
    }
    if noise_sigma > 0.0 {
        let noise = gaussian_matrix(&mut rng, n, d);
        y.scaled_add(noise_sigma, &noise);
    }
    linalg::unit_normalize_rows(&mut y)
        .map_err(|i| Error::Numeric(format!("degenerate target row {i}")))?;

    let words = |prefix: &str| (0..n).map(|i| format!("{prefix}{i:05}")).collect();
    Ok(SyntheticInstance {
        src: EmbeddingSpace::new(words("s"), x, Normalization::Unit)?,
        tgt: EmbeddingSpace::new(words("t"), y, Normalization::Unit)?,
        planted_map: LinearMap::new(r, true)?,
        planted_permutation: pi,
        noise_sigma,
        seed,
    })
}

/// A seeded sample of `size` ground-truth pairs `(i, π(i))` without
/// replacement, tagged as annotated.
pub fn gold_lexicon(inst: &SyntheticInstance, size: usize, seed: u64) -> Result<Lexicon> {
    let n = inst.src.len();
    if size > n {
        return Err(Error::Parameter(format!(
            "requested {size} gold pairs from an instance of {n} words"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = linalg::sample_distinct(n, size, &mut rng);
    let mut lex = Lexicon::new(n, inst.tgt.len());
    for i in picks {
        lex.push(i, inst.planted_permutation[i], PairOrigin::Annotated)?;
    }
    Ok(lex)
}

/// Disjoint train/test gold lexicons: one seeded draw of
/// `train_size + test_size` distinct source indices, partitioned in draw
/// order, so no source word leaks across the split.
pub fn split_gold_lexicon(
    inst: &SyntheticInstance,
    train_size: usize,
    test_size: usize,
    seed: u64,
) -> Result<(Lexicon, Lexicon)> {
    let n = inst.src.len();
    if train_size + test_size > n {
        return Err(Error::Parameter(format!(
            "split of {train_size}+{test_size} exceeds the {n}-word instance"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = linalg::sample_distinct(n, train_size + test_size, &mut rng);
    let mut train = Lexicon::new(n, inst.tgt.len());
    let mut test = Lexicon::new(n, inst.tgt.len());
    for (pos, i) in picks.into_iter().enumerate() {
        let side = if pos < train_size { &mut train } else { &mut test };
        side.push(i, inst.planted_permutation[i], PairOrigin::Annotated)?;
    }
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::Side;
    use crate::supervised;

    /// Fraction of source rows whose cosine-nearest target under the
    /// planted map is the planted counterpart.
    fn nn_accuracy(inst: &SyntheticInstance) -> f64 {
        let mapped = inst
            .planted_map
            .apply(&inst.src.matrix().view())
            .unwrap();
        let sims = crate::linalg::matmul_bt(&mapped.view(), &inst.tgt.matrix().view());
        let mut hits = 0usize;
        for (i, row) in sims.outer_iter().enumerate() {
            let mut best = 0usize;
            let mut bv = f64::NEG_INFINITY;
            for (j, &v) in row.iter().enumerate() {
                if v > bv {
                    bv = v;
                    best = j;
                }
            }
            if best == inst.planted_permutation[i] {
                hits += 1;
            }
        }
        hits as f64 / inst.src.len() as f64
    }

    #[test]
    fn noiseless_instance_recovers_the_map_by_procrustes() {
        let inst = generate(80, 10, 0.0, 5).unwrap();
        let full = gold_lexicon(&inst, 80, 99).unwrap();
        let s = crate::embeddings::subset_rows(&inst.src, &full, Side::Source).unwrap();
        let t = crate::embeddings::subset_rows(&inst.tgt, &full, Side::Target).unwrap();
        let q = supervised::procrustes(&s.view(), &t.view()).unwrap();
        let diff = crate::linalg::max_abs_diff(
            &q.matrix().view(),
            &inst.planted_map.matrix().view(),
        );
        assert!(diff < 1e-8, "‖Q−R‖max = {diff}");
    }

    #[test]
    fn generation_is_bitwise_reproducible() {
        let a = generate(50, 6, 0.02, 7).unwrap();
        let b = generate(50, 6, 0.02, 7).unwrap();
        assert_eq!(a.src.matrix(), b.src.matrix());
        assert_eq!(a.tgt.matrix(), b.tgt.matrix());
        assert_eq!(a.planted_permutation, b.planted_permutation);
        assert_eq!(a.planted_map.matrix(), b.planted_map.matrix());
    }

    #[test]
    fn noiseless_retrieval_under_the_planted_map_is_perfect() {
        let inst = generate(200, 8, 0.0, 11).unwrap();
        assert_eq!(nn_accuracy(&inst), 1.0);
    }

    #[test]
    fn mild_noise_keeps_retrieval_above_99_percent() {
        let inst = generate(1000, 16, 0.01, 13).unwrap();
        assert!(nn_accuracy(&inst) >= 0.99);
    }

    #[test]
    fn gold_lexicon_covers_the_full_correspondence_at_size_n() {
        let inst = generate(30, 4, 0.0, 17).unwrap();
        let lex = gold_lexicon(&inst, 30, 1).unwrap();
        assert_eq!(lex.len(), 30);
        for (i, j) in lex.pairs() {
            assert_eq!(j, inst.planted_permutation[i]);
        }
        assert!(gold_lexicon(&inst, 0, 1).unwrap().is_empty());
        assert!(gold_lexicon(&inst, 31, 1).is_err());
    }

    #[test]
    fn split_sources_are_disjoint() {
        let inst = generate(40, 4, 0.0, 19).unwrap();
        let (train, test) = split_gold_lexicon(&inst, 10, 15, 3).unwrap();
        assert_eq!(train.len(), 10);
        assert_eq!(test.len(), 15);
        let train_src: Vec<usize> = train.pairs().iter().map(|&(s, _)| s).collect();
        for (s, _) in test.pairs() {
            assert!(!train_src.contains(&s), "source {s} leaked across the split");
        }
        assert!(split_gold_lexicon(&inst, 30, 11, 3).is_err());
    }

    #[test]
    fn invalid_shapes_are_rejected() {
        assert!(generate(1, 4, 0.0, 0).is_err());
        assert!(generate(10, 1, 0.0, 0).is_err());
        assert!(generate(10, 4, -0.1, 0).is_err());
        assert!(generate_anisotropic(10, 4, 0.0, 0.5, 0).is_err());
    }

    #[test]
    fn anisotropy_concentrates_the_cloud() {
        // With a strong geometric ladder the dominant axis should carry
        // far more of the normalized cloud's variance than the weakest.
        let easy = generate(400, 8, 0.0, 23).unwrap();
        let hard = generate_anisotropic(400, 8, 0.0, 10.0, 23).unwrap();
        let axis_var = |inst: &SyntheticInstance, j: usize| {
            inst.src
                .matrix()
                .column(j)
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
        };
        let easy_ratio = axis_var(&easy, 0) / axis_var(&easy, 7);
        let hard_ratio = axis_var(&hard, 0) / axis_var(&hard, 7);
        assert!(hard_ratio > 10.0 * easy_ratio, "{easy_ratio} vs {hard_ratio}");
        // The planted correspondence is still exact.
        assert_eq!(nn_accuracy(&hard), 1.0);
    }
}
