//! Small dense-matrix helpers shared across modules.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::parallel;

/// `A · Bᵀ` for two row-major matrices with a common column count
/// (`m_r×d`, `m_c×d` → `m_r×m_c`). Row-parallel; each output row is a fixed
/// sequential sweep over `B`, so the result does not depend on thread count.
pub fn matmul_bt(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> Array2<f64> {
    debug_assert_eq!(a.ncols(), b.ncols());
    let m_c = b.nrows();
    let mut out = Array2::<f64>::zeros((a.nrows(), m_c));
    let buf = out.as_slice_mut().expect("fresh arrays are standard layout");
    parallel::for_each_row(buf, m_c, |i, row| {
        let ai = a.row(i);
        for (j, bj) in b.outer_iter().enumerate() {
            row[j] = ai.dot(&bj);
        }
    });
    out
}

/// Squared Euclidean norm of every row.
pub fn sq_norms(a: &ArrayView2<f64>) -> Array1<f64> {
    a.outer_iter().map(|r| r.dot(&r)).collect()
}

fn better_desc(v1: f64, i1: usize, v2: f64, i2: usize) -> bool {
    v1 > v2 || (v1 == v2 && i1 < i2)
}

fn better_asc(v1: f64, i1: usize, v2: f64, i2: usize) -> bool {
    v1 < v2 || (v1 == v2 && i1 < i2)
}

fn top_k_by<F>(values: &[f64], k: usize, better: F) -> Vec<usize>
where
    F: Fn(f64, usize, f64, usize) -> bool,
{
    debug_assert!(k >= 1 && k <= values.len());
    let mut buf: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for (i, &v) in values.iter().enumerate() {
        if buf.len() == k {
            let (wv, wi) = buf[k - 1];
            if !better(v, i, wv, wi) {
                continue;
            }
        }
        let pos = buf.partition_point(|&(bv, bi)| better(bv, bi, v, i));
        buf.insert(pos, (v, i));
        buf.truncate(k);
    }
    buf.into_iter().map(|(_, i)| i).collect()
}

/// Indices of the `k` largest values, best first; ties break toward the
/// lower index.
pub fn top_k_desc(values: &[f64], k: usize) -> Vec<usize> {
    top_k_by(values, k, better_desc)
}

/// Indices of the `k` smallest values, best first; ties break toward the
/// lower index.
pub fn top_k_asc(values: &[f64], k: usize) -> Vec<usize> {
    top_k_by(values, k, better_asc)
}

/// Index of the smallest value (ties toward the lower index).
pub fn argmin(values: &[f64]) -> usize {
    debug_assert!(!values.is_empty());
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn to_nalgebra(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_row_iterator(a.nrows(), a.ncols(), a.iter().cloned())
}

fn from_nalgebra(m: &DMatrix<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Thin SVD `A = U · diag(S) · Vᵀ`, returned as `(U, S, Vᵀ)`.
pub fn svd_uvt(a: &Array2<f64>) -> Result<(Array2<f64>, Vec<f64>, Array2<f64>)> {
    let svd = to_nalgebra(a)
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("SVD did not converge".into()))?;
    let u = svd
        .u
        .ok_or_else(|| Error::Numeric("SVD returned no U factor".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD returned no Vᵀ factor".into()))?;
    let s = svd.singular_values.iter().cloned().collect();
    Ok((from_nalgebra(&u), s, from_nalgebra(&v_t)))
}

/// Nearest orthogonal matrix: `U·Vᵀ` from the SVD of `a`.
pub fn orthogonal_factor(a: &Array2<f64>) -> Result<Array2<f64>> {
    let (u, _, vt) = svd_uvt(a)?;
    Ok(u.dot(&vt))
}

/// Moore–Penrose pseudo-inverse via SVD.
pub fn pseudo_inverse(a: &Array2<f64>) -> Result<Array2<f64>> {
    let (u, s, vt) = svd_uvt(a)?;
    let cutoff = s.iter().cloned().fold(0.0, f64::max) * 1e-12;
    // V · diag(1/s) · Uᵀ with small singular values zeroed.
    let mut ut = u.t().to_owned();
    for (r, &sv) in s.iter().enumerate() {
        let inv = if sv > cutoff { 1.0 / sv } else { 0.0 };
        ut.row_mut(r).mapv_inplace(|x| x * inv);
    }
    Ok(vt.t().dot(&ut))
}

/// Normalize every row to unit Euclidean norm in place. On success returns
/// `Ok(())`; a row with zero norm is reported by index.
pub fn unit_normalize_rows(a: &mut Array2<f64>) -> std::result::Result<(), usize> {
    for (i, mut row) in a.outer_iter_mut().enumerate() {
        let norm = row.dot(&row).sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(i);
        }
        row.mapv_inplace(|x| x / norm);
    }
    Ok(())
}

/// Largest absolute entrywise difference.
#[cfg(test)]
pub fn max_abs_diff(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Draw `m` distinct indices uniformly from `0..pool` by partial
/// Fisher–Yates shuffle; with `m == pool` this is a full seeded shuffle.
pub(crate) fn sample_distinct<R: Rng>(pool: usize, m: usize, rng: &mut R) -> Vec<usize> {
    debug_assert!(m <= pool);
    let mut idx: Vec<usize> = (0..pool).collect();
    for i in 0..m {
        let j = i + rng.random_range(0..pool - i);
        idx.swap(i, j);
    }
    idx.truncate(m);
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matmul_bt_matches_naive() {
        let a = array![[1.0, 2.0], [3.0, -1.0], [0.5, 0.0]];
        let b = array![[2.0, 1.0], [-1.0, 4.0]];
        let got = matmul_bt(&a.view(), &b.view());
        for i in 0..3 {
            for j in 0..2 {
                let want: f64 = (0..2).map(|t| a[[i, t]] * b[[j, t]]).sum();
                assert!((got[[i, j]] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn top_k_breaks_ties_toward_lower_index() {
        let v = [1.0, 3.0, 3.0, 0.5, 3.0];
        assert_eq!(top_k_desc(&v, 2), vec![1, 2]);
        let w = [2.0, 0.5, 0.5, 4.0];
        assert_eq!(top_k_asc(&w, 3), vec![1, 2, 0]);
    }

    #[test]
    fn orthogonal_factor_of_orthogonal_is_identity_action() {
        // Rotation by 30 degrees is already orthogonal.
        let c = 0.75f64.sqrt();
        let q = array![[c, 0.5], [-0.5, c]];
        let p = orthogonal_factor(&q).unwrap();
        assert!(max_abs_diff(&p.view(), &q.view()) < 1e-12);
    }

    #[test]
    fn pseudo_inverse_inverts_invertible() {
        let a = array![[2.0, 1.0], [1.0, 3.0]];
        let p = pseudo_inverse(&a).unwrap();
        let prod = a.dot(&p);
        assert!(max_abs_diff(&prod.view(), &Array2::eye(2).view()) < 1e-10);
    }

    #[test]
    fn sample_distinct_full_pool_is_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut got = sample_distinct(6, 6, &mut rng);
        got.sort_unstable();
        assert_eq!(got, vec![0, 1, 2, 3, 4, 5]);
    }
}
