// Entropic optimal transport on a small cost matrix.
//
// Sinkhorn iteration alternately rescales rows and columns of the kernel
// exp(-D/eps) until the plan has unit row and column sums. The
// regularization strength eps controls how concentrated the plan is:
// large eps spreads mass (high entropy), small eps approaches the exact
// assignment solution. Here the problem is small enough to enumerate all
// 4! = 24 permutations, so we can watch the entropic cost close in on the
// true assignment optimum as eps shrinks.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use otlex::ot::{self, CostMatrix, CostMetric};

fn assignment_optimum(d: &CostMatrix) -> f64 {
    // Enumerate permutations of 0..4 by recursion on the first position.
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 1 {
            return vec![vec![0]];
        }
        let mut out = Vec::new();
        for head in 0..n {
            for tail in perms(n - 1) {
                let mut p = vec![head];
                p.extend(tail.into_iter().map(|v| if v >= head { v + 1 } else { v }));
                out.push(p);
            }
        }
        out
    }
    perms(4)
        .iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| d.values()[[i, j]]).sum())
        .fold(f64::INFINITY, f64::min)
}

fn main() -> otlex::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = CostMatrix::new(
        Array2::from_shape_fn((4, 4), |_| rng.random_range(0.0..1.0f64)),
        CostMetric::SqEuclidean,
    )?;
    let best = assignment_optimum(&d);
    println!("exact assignment optimum: {best:.6}\n");
    println!("{:>8}  {:>10}  {:>10}  {:>12}  {:>6}", "eps", "cost", "gap", "violation", "sweeps");

    for eps in [5.0, 1.0, 0.2, 0.05, 0.01, 0.005] {
        let sol = ot::sinkhorn(&d, eps, 50_000, 1e-9)?;
        let cost = ot::transport_cost(&d, &sol.plan)?;
        println!(
            "{eps:>8}  {cost:>10.6}  {:>10.3e}  {:>12.2e}  {:>6}",
            cost - best,
            sol.plan.marginal_violation(),
            sol.iterations
        );
    }

    // At tiny eps the plan is numerically a permutation matrix: print it.
    let sharp = ot::sinkhorn(&d, 0.005, 50_000, 1e-9)?;
    println!("\nplan at eps = 0.005 (rounded):");
    for row in sharp.plan.values().outer_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.3}")).collect();
        println!("  [{}]", cells.join(", "));
    }
    Ok(())
}
