// Bi-directional lexicon update: mining new pairs from an aligned space.
//
// Once a map Q aligns the spaces reasonably well, new translation pairs
// can be read off the geometry. To keep precision high the update is
// deliberately conservative:
//
//   1. forward distances  D->  on (XQ, Y), backward D<- on (X, Y Q^-1);
//   2. keep only mutual nearest neighbors (i best for j AND j best for i);
//   3. score each pair by its credit — the margin between the mean of its
//      K runners-up and its own distance, summed over both directions;
//   4. take the top pairs by credit, skipping anything already annotated.
//
// High credit means the pair wins its neighborhood by a wide margin in
// both directions — exactly the pairs safe to feed back into supervised
// training.

use std::collections::HashMap;

use otlex::blu::{self, BluConfig, DistanceMetric};
use otlex::synth;

fn main() -> otlex::Result<()> {
    let inst = synth::generate(600, 8, 0.02, 9)?;
    let annotated = synth::gold_lexicon(&inst, 30, 9)?;

    let cfg = BluConfig {
        k: 10,
        cap: 200,
        pool: 600,
        metric: DistanceMetric::Cosine,
    };
    let update = blu::blu_update(&inst.src, &inst.tgt, &inst.planted_map, &annotated, &cfg)?;

    let truth: HashMap<usize, usize> = inst
        .planted_permutation
        .iter()
        .enumerate()
        .map(|(i, &j)| (i, j))
        .collect();
    let correct = update
        .selected
        .iter()
        .filter(|sp| truth[&sp.src_index] == sp.tgt_index)
        .count();

    println!(
        "mutual-NN candidates: {} of {} sources",
        update.candidate_count,
        inst.src.len()
    );
    println!(
        "selected {} pairs (cap {}), {} correct ({:.1}%)",
        update.selected.len(),
        cfg.cap,
        correct,
        100.0 * correct as f64 / update.selected.len() as f64
    );
    println!(
        "extended lexicon: {} annotated + {} additional = {}\n",
        annotated.len(),
        update.selected.len(),
        update.extended.len()
    );

    println!("highest-credit pairs:");
    for sp in update.selected.iter().take(5) {
        println!(
            "  {} -> {}   credit {:.4} (fwd {:.4} + bwd {:.4}){}",
            inst.src.word(sp.src_index),
            inst.tgt.word(sp.tgt_index),
            sp.cs_total,
            sp.cs_forward,
            sp.cs_backward,
            if truth[&sp.src_index] == sp.tgt_index { "" } else { "   [wrong]" }
        );
    }
    println!("\nlowest-credit selected pair: {:.4}", update.selected.last().unwrap().cs_total);
    Ok(())
}
