//! Cost matrices, entropic Sinkhorn, Boltzmann priors, and prior optimal
//! transport.
//!
//! Transport plans live in Π = {P ≥ 0 : every row and column sums to 1}
//! (unit marginals, total mass m — not probability-normalized). The solver
//! is a stabilized scaling method: the log-domain potentials α, β absorb the
//! running scalings whenever they threaten to overflow, which keeps the
//! iteration exact for small ε while costing two matrix–vector products per
//! sweep.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::linmap::LinearMap;
use crate::parallel;

/// Smallest value a prior entry may take; keeps `−ε·log Γ` finite.
pub const PRIOR_FLOOR: f64 = 1e-300;

/// Absorb the running scalings into the log-domain potentials once
/// `|ln u|` or `|ln v|` passes this limit (safely inside f64 range).
const ABSORB_LIMIT: f64 = 150.0;

/// How a cost matrix was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostMetric {
    SqEuclidean,
    Rcsls,
    CosineDistance,
}

/// A dense pairwise cost matrix; entries may be negative (RCSLS costs are).
#[derive(Debug, Clone)]
pub struct CostMatrix {
    values: Array2<f64>,
    metric: CostMetric,
}

impl CostMatrix {
    pub fn new(values: Array2<f64>, metric: CostMetric) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Empty("cost matrix has no entries".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("cost matrix contains non-finite entries".into()));
        }
        let values = if values.as_slice().is_some() {
            values
        } else {
            values.as_standard_layout().to_owned()
        };
        Ok(Self { values, metric })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn metric(&self) -> CostMetric {
        self.metric
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    fn as_slice(&self) -> &[f64] {
        self.values.as_slice().expect("standard layout enforced in new()")
    }
}

/// A coupling with unit row and column marginals (the feasible set Π).
#[derive(Debug, Clone)]
pub struct TransportPlan {
    values: Array2<f64>,
    marginal_violation: f64,
}

impl TransportPlan {
    /// Wrap a nonnegative square matrix, recording its worst marginal
    /// deviation from 1.
    pub fn from_values(values: Array2<f64>) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::Dimension(format!(
                "transport plan must be square, got {}×{}",
                values.nrows(),
                values.ncols()
            )));
        }
        if values.nrows() == 0 {
            return Err(Error::Empty("transport plan has no entries".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Numeric(
                "transport plan entries must be finite and nonnegative".into(),
            ));
        }
        let marginal_violation = marginal_violation(&values.view());
        Ok(Self {
            values,
            marginal_violation,
        })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    /// Worst `|row or column sum − 1|` over all marginals.
    pub fn marginal_violation(&self) -> f64 {
        self.marginal_violation
    }
}

/// Largest deviation of any row or column sum from 1.
pub fn marginal_violation(values: &ArrayView2<f64>) -> f64 {
    let mut worst = 0.0f64;
    let mut col_sums = vec![0.0f64; values.ncols()];
    for row in values.outer_iter() {
        let mut s = 0.0;
        for (j, &v) in row.iter().enumerate() {
            s += v;
            col_sums[j] += v;
        }
        worst = worst.max((s - 1.0).abs());
    }
    for s in col_sums {
        worst = worst.max((s - 1.0).abs());
    }
    worst
}

/// A strictly positive row-stochastic prior over target words.
#[derive(Debug, Clone)]
pub struct PriorPlan {
    values: Array2<f64>,
}

impl PriorPlan {
    pub fn from_values(values: Array2<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Empty("prior plan has no entries".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < PRIOR_FLOOR) {
            return Err(Error::Numeric(format!(
                "prior plan entries must be finite and ≥ {PRIOR_FLOOR:e}"
            )));
        }
        for (i, row) in values.outer_iter().enumerate() {
            let s: f64 = row.sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::Numeric(format!(
                    "prior plan row {i} sums to {s}, expected 1"
                )));
            }
        }
        Ok(Self { values })
    }

    /// The uniform prior (every entry `1/m_c`).
    pub fn uniform(m_r: usize, m_c: usize) -> Result<Self> {
        if m_r == 0 || m_c == 0 {
            return Err(Error::Empty("prior plan has no entries".into()));
        }
        Ok(Self {
            values: Array2::from_elem((m_r, m_c), 1.0 / m_c as f64),
        })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }
}

/// Pairwise squared Euclidean distances between the rows of `a` and `b`.
pub fn cost_sq_euclidean(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> Result<CostMatrix> {
    if a.ncols() != b.ncols() {
        return Err(Error::Dimension(format!(
            "row widths differ: {} vs {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let b_norms = linalg::sq_norms(b);
    let mut out = Array2::<f64>::zeros((a.nrows(), b.nrows()));
    let cols = b.nrows();
    let buf = out.as_slice_mut().expect("fresh array");
    parallel::for_each_row(buf, cols, |i, row| {
        let ai = a.row(i);
        let a_norm = ai.dot(&ai);
        for (j, bj) in b.outer_iter().enumerate() {
            // ‖a−b‖² = ‖a‖² − 2a·b + ‖b‖², clamped against tiny negative
            // round-off when a ≈ b.
            row[j] = (a_norm - 2.0 * ai.dot(&bj) + b_norms[j]).max(0.0);
        }
    });
    CostMatrix::new(out, CostMetric::SqEuclidean)
}

/// Pairwise cosine distances `1 − cos(a_i, b_j)` between the rows of `a`
/// and `b`.
pub fn cost_cosine_distance(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> Result<CostMatrix> {
    if a.ncols() != b.ncols() {
        return Err(Error::Dimension(format!(
            "row widths differ: {} vs {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let b_norms: Vec<f64> = linalg::sq_norms(b).iter().map(|v| v.sqrt()).collect();
    if b_norms.iter().any(|&n| n <= 0.0) {
        return Err(Error::Numeric("zero-norm row in cosine distance".into()));
    }
    let mut out = Array2::<f64>::zeros((a.nrows(), b.nrows()));
    let cols = b.nrows();
    let buf = out.as_slice_mut().expect("fresh array");
    let mut bad_row = false;
    for (i, chunk) in buf.chunks_mut(cols).enumerate() {
        let ai = a.row(i);
        let a_norm = ai.dot(&ai).sqrt();
        if a_norm <= 0.0 {
            bad_row = true;
            break;
        }
        for (j, bj) in b.outer_iter().enumerate() {
            chunk[j] = 1.0 - ai.dot(&bj) / (a_norm * b_norms[j]);
        }
    }
    if bad_row {
        return Err(Error::Numeric("zero-norm row in cosine distance".into()));
    }
    CostMatrix::new(out, CostMetric::CosineDistance)
}

/// RCSLS cost between mapped source rows `a·Q` and target rows `b`:
///
/// `C_ij = −2(a_iQ)·b_j + (1/k)·Σ_{b∈N_B(a_iQ)}(a_iQ)·b
///        + (1/k)·Σ_{aQ∈N_A(b_j)}(aQ)·b_j`
///
/// where the neighbor pools `N_B`/`N_A` are the `k` rows of the supplied
/// matrices with the largest dot products (ties toward the lower index).
pub fn cost_rcsls(
    a: &ArrayView2<f64>,
    b: &ArrayView2<f64>,
    q: &LinearMap,
    k: usize,
) -> Result<CostMatrix> {
    if a.ncols() != b.ncols() {
        return Err(Error::Dimension(format!(
            "row widths differ: {} vs {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let max_k = a.nrows().min(b.nrows());
    if k < 1 || k > max_k {
        return Err(Error::Parameter(format!(
            "rcsls neighbor count k={k} out of range 1..={max_k}"
        )));
    }
    let aq = q.apply(a)?;
    let dots = linalg::matmul_bt(&aq.view(), b);
    let kf = k as f64;

    // (1/k)·sum of the k largest dot products in each row / column; sums run
    // best-first so every caller sees one fixed accumulation order.
    let m_r = dots.nrows();
    let m_c = dots.ncols();
    let mut row_terms = vec![0.0f64; m_r];
    for (i, row) in dots.outer_iter().enumerate() {
        let slice = row.as_slice().expect("standard layout");
        let mut s = 0.0;
        for idx in linalg::top_k_desc(slice, k) {
            s += slice[idx];
        }
        row_terms[i] = s / kf;
    }
    let mut col_terms = vec![0.0f64; m_c];
    let mut col_buf = vec![0.0f64; m_r];
    for j in 0..m_c {
        for i in 0..m_r {
            col_buf[i] = dots[[i, j]];
        }
        let mut s = 0.0;
        for idx in linalg::top_k_desc(&col_buf, k) {
            s += col_buf[idx];
        }
        col_terms[j] = s / kf;
    }

    let values = Array2::from_shape_fn((m_r, m_c), |(i, j)| {
        -2.0 * dots[[i, j]] + row_terms[i] + col_terms[j]
    });
    CostMatrix::new(values, CostMetric::Rcsls)
}

/// Per-sweep snapshot handed to solve observers.
#[derive(Debug)]
pub struct SweepObservation<'a> {
    /// 1-based sweep number.
    pub sweep: usize,
    /// Current plan `diag(u)·K·diag(v)` (row marginals still converging).
    pub plan: &'a Array2<f64>,
    /// Dual objective of the entropic problem. Sweeps are exact
    /// block-coordinate ascent on this concave dual, so it is non-decreasing
    /// across sweeps — equivalently, the value the solver drives down
    /// (its negation) falls monotonically toward `−⟨D,P*⟩ − ε·H(P*)`.
    pub dual_objective: f64,
}

/// Result of a Sinkhorn solve.
#[derive(Debug, Clone)]
pub struct SinkhornSolution {
    pub plan: TransportPlan,
    /// Sweeps actually performed.
    pub iterations: usize,
    /// Worst marginal deviation at termination.
    pub marginal_violation: f64,
    /// Whether the tolerance was met before the iteration cap.
    pub converged: bool,
}

struct Scaling {
    m: usize,
    eps: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    kernel: Vec<f64>,
}

impl Scaling {
    /// Initialize with `α_i = min_j D_ij`, `β = 0`, so every kernel row has
    /// maximum exactly 1 regardless of the cost scale.
    fn new(d: &[f64], m: usize, eps: f64) -> Result<Self> {
        let alpha: Vec<f64> = (0..m)
            .map(|i| d[i * m..(i + 1) * m].iter().cloned().fold(f64::INFINITY, f64::min))
            .collect();
        let beta = vec![0.0f64; m];
        let mut s = Self {
            m,
            eps,
            alpha,
            beta,
            kernel: vec![0.0; m * m],
        };
        s.rebuild(d)?;
        Ok(s)
    }

    /// `K_ij = exp((α_i + β_j − D_ij)/ε)`.
    fn rebuild(&mut self, d: &[f64]) -> Result<()> {
        let m = self.m;
        let eps = self.eps;
        let alpha = &self.alpha;
        let beta = &self.beta;
        parallel::for_each_row(&mut self.kernel, m, |i, row| {
            let a = alpha[i];
            let drow = &d[i * m..(i + 1) * m];
            for j in 0..m {
                row[j] = ((a + beta[j] - drow[j]) / eps).exp();
            }
        });
        if self.kernel.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(
                "sinkhorn kernel overflowed; epsilon is too small for the cost scale".into(),
            ));
        }
        Ok(())
    }

    /// `out_i = Σ_j K_ij v_j`.
    fn k_dot(&self, v: &[f64], out: &mut [f64]) {
        let m = self.m;
        let kernel = &self.kernel;
        parallel::for_each_row(out, 1, |i, cell| {
            let row = &kernel[i * m..(i + 1) * m];
            let mut s = 0.0;
            for j in 0..m {
                s += row[j] * v[j];
            }
            cell[0] = s;
        });
    }

    /// `out_j = Σ_i K_ij u_i`, accumulated in ascending-`i` order so the
    /// sequential and parallel paths agree bitwise.
    fn kt_dot(&self, u: &[f64], out: &mut [f64]) {
        let m = self.m;
        let kernel = &self.kernel;
        if parallel::threads() <= 1 {
            out.fill(0.0);
            for i in 0..m {
                let c = u[i];
                let row = &kernel[i * m..(i + 1) * m];
                for j in 0..m {
                    out[j] += c * row[j];
                }
            }
        } else {
            parallel::for_each_row(out, 1, |j, cell| {
                let mut s = 0.0;
                for i in 0..m {
                    s += u[i] * kernel[i * m + j];
                }
                cell[0] = s;
            });
        }
    }

    /// Fold the current scalings into the potentials and reset `u = v = 1`;
    /// the represented plan `diag(u)·K·diag(v)` is unchanged.
    fn absorb(&mut self, d: &[f64], u: &mut [f64], v: &mut [f64]) -> Result<()> {
        for (a, ui) in self.alpha.iter_mut().zip(u.iter_mut()) {
            *a += self.eps * ui.ln();
            *ui = 1.0;
        }
        for (b, vj) in self.beta.iter_mut().zip(v.iter_mut()) {
            *b += self.eps * vj.ln();
            *vj = 1.0;
        }
        self.rebuild(d)
    }

    /// Materialize `P_ij = u_i·K_ij·v_j`.
    fn plan(&self, u: &[f64], v: &[f64]) -> Array2<f64> {
        let m = self.m;
        let kernel = &self.kernel;
        let mut out = Array2::<f64>::zeros((m, m));
        let buf = out.as_slice_mut().expect("fresh array");
        parallel::for_each_row(buf, m, |i, row| {
            let ui = u[i];
            let krow = &kernel[i * m..(i + 1) * m];
            for j in 0..m {
                row[j] = ui * krow[j] * v[j];
            }
        });
        out
    }
}

fn needs_absorb(scales: &[f64]) -> bool {
    let upper = ABSORB_LIMIT.exp();
    let lower = (-ABSORB_LIMIT).exp();
    scales.iter().any(|&s| s > upper || s < lower)
}

fn sinkhorn_impl(
    d: &CostMatrix,
    epsilon: f64,
    max_iters: usize,
    tol: f64,
    mut observer: Option<&mut dyn FnMut(&SweepObservation)>,
) -> Result<SinkhornSolution> {
    if d.nrows() != d.ncols() {
        return Err(Error::Dimension(format!(
            "sinkhorn needs a square cost matrix, got {}×{}",
            d.nrows(),
            d.ncols()
        )));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if max_iters == 0 {
        return Err(Error::Parameter("max_iters must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tol must be positive, got {tol}")));
    }

    let m = d.nrows();
    let cost = d.as_slice();
    let mut scaling = Scaling::new(cost, m, epsilon)?;
    let mut u = vec![1.0f64; m];
    let mut v = vec![1.0f64; m];
    let mut kv = vec![0.0f64; m];
    let mut ktu = vec![0.0f64; m];
    scaling.k_dot(&v, &mut kv);

    let bad = |x: &[f64]| x.iter().any(|&s| !s.is_finite() || s <= 0.0);
    let diverged = || {
        Error::Numeric(
            "sinkhorn scalings are not finite; epsilon is too small for the cost scale".into(),
        )
    };

    let mut iterations = 0;
    let mut violation = f64::INFINITY;
    let mut converged = false;
    for sweep in 1..=max_iters {
        iterations = sweep;
        if bad(&kv) {
            return Err(diverged());
        }
        for i in 0..m {
            u[i] = 1.0 / kv[i];
        }
        scaling.kt_dot(&u, &mut ktu);
        if bad(&ktu) {
            return Err(diverged());
        }
        for j in 0..m {
            v[j] = 1.0 / ktu[j];
        }
        if needs_absorb(&u) || needs_absorb(&v) {
            scaling.absorb(cost, &mut u, &mut v)?;
        }
        // With v fresh the column sums are exact; the row side determines
        // the remaining violation.
        scaling.k_dot(&v, &mut kv);
        violation = kv
            .iter()
            .zip(u.iter())
            .map(|(&kvi, &ui)| (ui * kvi - 1.0).abs())
            .fold(0.0, f64::max);
        if let Some(obs) = observer.as_deref_mut() {
            // Dual value of the current potentials `α+ε·ln u`, `β+ε·ln v`:
            // Σa + Σb − ε·(total plan mass).
            let mass: f64 = u.iter().zip(kv.iter()).map(|(&ui, &kvi)| ui * kvi).sum();
            let logs: f64 = u.iter().chain(v.iter()).map(|&s| s.ln()).sum();
            let dual_objective = scaling.alpha.iter().sum::<f64>()
                + scaling.beta.iter().sum::<f64>()
                + epsilon * logs
                - epsilon * mass;
            obs(&SweepObservation {
                sweep,
                plan: &scaling.plan(&u, &v),
                dual_objective,
            });
        }
        if violation < tol {
            converged = true;
            break;
        }
    }

    let plan = TransportPlan::from_values(scaling.plan(&u, &v))?;
    Ok(SinkhornSolution {
        plan,
        iterations,
        marginal_violation: violation,
        converged,
    })
}

/// Entropic OT: the minimizer of `⟨D,P⟩ + ε·Σ P_ij(log P_ij − 1)` over Π,
/// by alternating row/column scalings. Terminates when the worst marginal
/// violation drops below `tol` or after `max_iters` sweeps, whichever comes
/// first; the plan is returned either way with its violation reported.
pub fn sinkhorn(d: &CostMatrix, epsilon: f64, max_iters: usize, tol: f64) -> Result<SinkhornSolution> {
    sinkhorn_impl(d, epsilon, max_iters, tol, None)
}

/// [`sinkhorn`] with a per-sweep callback; used to observe solve
/// trajectories (see [`SweepObservation`]).
pub fn sinkhorn_with_observer<F>(
    d: &CostMatrix,
    epsilon: f64,
    max_iters: usize,
    tol: f64,
    mut observer: F,
) -> Result<SinkhornSolution>
where
    F: FnMut(&SweepObservation),
{
    sinkhorn_impl(d, epsilon, max_iters, tol, Some(&mut observer))
}

/// Boltzmann prior (row softmax of `−C/T`): `Γ_ij ∝ exp(−C_ij/T)`, computed
/// with per-row max subtraction, floored at [`PRIOR_FLOOR`], and
/// renormalized.
pub fn boltzmann_prior(c: &CostMatrix, temperature: f64) -> Result<PriorPlan> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Parameter(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let m_c = c.ncols();
    let mut out = Array2::<f64>::zeros((c.nrows(), m_c));
    let src = c.as_slice();
    let buf = out.as_slice_mut().expect("fresh array");
    parallel::for_each_row(buf, m_c, |i, row| {
        let crow = &src[i * m_c..(i + 1) * m_c];
        let z_max = crow.iter().map(|&v| -v / temperature).fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for j in 0..m_c {
            let e = (-crow[j] / temperature - z_max).exp();
            row[j] = e;
            sum += e;
        }
        let mut floored_sum = 0.0;
        for x in row.iter_mut() {
            *x = (*x / sum).max(PRIOR_FLOOR);
            floored_sum += *x;
        }
        for x in row.iter_mut() {
            *x = (*x / floored_sum).max(PRIOR_FLOOR);
        }
    });
    PriorPlan::from_values(out)
}

/// Prior optimal transport: the minimizer of `⟨D,P⟩ + ε·KL(P‖Γ)` over Π,
/// solved by the reduction `sinkhorn(D − ε·log Γ, ε)`. Here ε interpolates
/// between pure OT (small ε) and the prior itself (large ε); it is not a
/// vanishing regularizer.
pub fn prior_ot(
    d: &CostMatrix,
    prior: &PriorPlan,
    varepsilon: f64,
    max_iters: usize,
    tol: f64,
) -> Result<SinkhornSolution> {
    prior_ot_impl(d, prior, varepsilon, max_iters, tol, None)
}

/// [`prior_ot`] with a per-sweep observer (see [`SweepObservation`]).
pub fn prior_ot_with_observer<F>(
    d: &CostMatrix,
    prior: &PriorPlan,
    varepsilon: f64,
    max_iters: usize,
    tol: f64,
    mut observer: F,
) -> Result<SinkhornSolution>
where
    F: FnMut(&SweepObservation),
{
    prior_ot_impl(d, prior, varepsilon, max_iters, tol, Some(&mut observer))
}

fn prior_ot_impl(
    d: &CostMatrix,
    prior: &PriorPlan,
    varepsilon: f64,
    max_iters: usize,
    tol: f64,
    observer: Option<&mut dyn FnMut(&SweepObservation)>,
) -> Result<SinkhornSolution> {
    if d.nrows() != prior.nrows() || d.ncols() != prior.ncols() {
        return Err(Error::Dimension(format!(
            "cost is {}×{} but prior is {}×{}",
            d.nrows(),
            d.ncols(),
            prior.nrows(),
            prior.ncols()
        )));
    }
    if !(varepsilon > 0.0) || !varepsilon.is_finite() {
        return Err(Error::Parameter(format!(
            "varepsilon must be positive, got {varepsilon}"
        )));
    }
    let shifted = d.values() - &(varepsilon * prior.values().mapv(f64::ln));
    let shifted = CostMatrix::new(shifted, d.metric())?;
    sinkhorn_impl(&shifted, varepsilon, max_iters, tol, observer)
}

/// Transport cost `⟨D, P⟩ = Σ_ij D_ij·P_ij`.
pub fn transport_cost(d: &CostMatrix, p: &TransportPlan) -> Result<f64> {
    if d.nrows() != p.dim() || d.ncols() != p.dim() {
        return Err(Error::Dimension(format!(
            "cost is {}×{} but plan is {m}×{m}",
            d.nrows(),
            d.ncols(),
            m = p.dim()
        )));
    }
    Ok(d.values()
        .iter()
        .zip(p.values().iter())
        .map(|(&c, &x)| c * x)
        .sum())
}

/// `KL(P‖Γ) = Σ_ij P_ij·ln(P_ij/Γ_ij)` with the `0·ln 0 = 0` convention.
pub fn kl_divergence(p: &TransportPlan, prior: &PriorPlan) -> Result<f64> {
    if p.dim() != prior.nrows() || p.dim() != prior.ncols() {
        return Err(Error::Dimension(format!(
            "plan is {m}×{m} but prior is {}×{}",
            prior.nrows(),
            prior.ncols(),
            m = p.dim()
        )));
    }
    Ok(p.values()
        .iter()
        .zip(prior.values().iter())
        .map(|(&pij, &gij)| if pij > 0.0 { pij * (pij / gij).ln() } else { 0.0 })
        .sum())
}
