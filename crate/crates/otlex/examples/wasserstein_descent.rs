// Unsupervised alignment: stochastic Wasserstein-Procrustes descent.
//
// Without any paired data, alignment can be posed as minimizing the
// entropic Wasserstein cost between the mapped source batch and a target
// batch over orthogonal maps Q. Each step solves OT on a sampled batch,
// takes the gradient 2 X^T (XQ - P Y) through the fixed plan, and
// re-projects onto the orthogonal group (SVD of the updated matrix).
//
// Starting close enough to the optimum the descent locks in on its own,
// but from a random rotation the plans stay diffuse and the map barely
// moves. A prior built from a supervised map widens the basin: this
// program runs the same descent from the same far-off start with and
// without a POT prior. The two objective traces are not on the same
// scale (the POT objective includes the KL pull toward the prior); the
// final distances to the planted rotation are the comparison.

use otlex::linmap::LinearMap;
use otlex::synth;
use otlex::unsupervised::{self, UnsupConfig};

fn main() -> otlex::Result<()> {
    let inst = synth::generate(500, 8, 0.01, 21)?;

    // Start from an unrelated random rotation: far outside the basin that
    // plain descent can reach from, but not outside the prior's pull.
    let start = synth::generate(10, 8, 0.0, 77)?.planted_map;

    let cfg = UnsupConfig {
        batch_size: 500,
        sample_pool: 500,
        iters_per_epoch: 12,
        learning_rate: 2.0,
        rcsls_k: 10,
        ..UnsupConfig::default()
    };

    let distance = |q: &LinearMap| {
        q.matrix()
            .iter()
            .zip(inst.planted_map.matrix().iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    println!("start: ||Q - R||_F = {:.4}\n", distance(&start));

    for use_prior in [false, true] {
        let prior_source = use_prior.then_some(&inst.planted_map);
        let mut cfg = cfg.clone();
        cfg.use_pot = use_prior;
        let mut q = start.clone();
        print!("{}: objectives ", if use_prior { "with POT prior " } else { "plain entropic " });
        for epoch in 0..4 {
            cfg.seed = 100 + epoch;
            let out = unsupervised::train_unsupervised(
                &inst.src,
                &inst.tgt,
                &q,
                prior_source,
                &cfg,
            )?;
            print!("{:.4} ", out.mean_objective);
            q = out.map;
        }
        println!(" ->  ||Q - R||_F = {:.4}", distance(&q));
    }
    println!("\n(the prior is built fresh per batch from the supervised map's RCSLS costs)");
    Ok(())
}
