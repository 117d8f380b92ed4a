// The cyclic strategy (CSS) end to end on a planted instance.
//
// Per epoch: the supervised trainer refines the map on the current
// lexicon; its orthogonal projection becomes both the unsupervised
// trainer's starting point and the source of the POT prior; the
// unsupervised result drives a bi-directional lexicon update that
// rebuilds the extended lexicon from the annotated base; the loop feeds
// the map back around. One parameter matrix circulates, each component
// correcting the others' weaknesses: few annotated pairs, OT basin size,
// retrieval hubness.

use otlex::framework::{self, RetrievalMethod, Strategy, StrategyConfig};
use otlex::synth;

fn main() -> otlex::Result<()> {
    let inst = synth::generate(800, 16, 0.12, 33)?;
    let (train, test) = synth::split_gold_lexicon(&inst, 28, 200, 33)?;
    let gold = synth::gold_lexicon(&inst, 800, 0)?;

    let mut cfg = StrategyConfig {
        strategy: Strategy::Css,
        epochs: 3,
        seed: 33,
        ..StrategyConfig::default()
    };
    cfg.sup.iters_per_epoch = 150;
    cfg.sup.batch_size = 128;
    cfg.unsup.iters_per_epoch = 12;
    cfg.unsup.batch_size = 256;
    cfg.unsup.learning_rate = 3.0;
    cfg.blu.cap = 400;

    println!(
        "CSS on n = {}, d = {}, sigma = 0.12, {} annotated pairs\n",
        inst.src.len(),
        inst.src.dim(),
        train.len()
    );
    let run = framework::run_css(&inst.src, &inst.tgt, &train, &cfg, Some(&gold))?;

    println!(
        "{:>5}  {:>10}  {:>12}  {:>8}  {:>10}",
        "epoch", "sup loss", "unsup obj", "added", "precision"
    );
    for rec in &run.report.epochs {
        println!(
            "{:>5}  {:>10.4}  {:>12.4}  {:>8}  {:>10}",
            rec.epoch,
            rec.sup_loss.unwrap(),
            rec.unsup_objective.unwrap(),
            rec.additional_size.unwrap(),
            rec.additional_precision
                .map(|p| format!("{:.1}%", 100.0 * p))
                .unwrap_or_default(),
        );
    }

    println!();
    for method in [RetrievalMethod::Nn, RetrievalMethod::Csls] {
        let p = framework::precision_at_ks(
            &run.map, &inst.src, &inst.tgt, &test, method, 10, &[1, 5, 10],
        )?;
        println!(
            "{:?} retrieval: P@1 = {:.3}  P@5 = {:.3}  P@10 = {:.3}",
            method, p[0], p[1], p[2]
        );
    }

    // The same supervised budget without the unsupervised partner.
    let mut solo = cfg.clone();
    solo.strategy = Strategy::SupOnly;
    let sup_only = framework::run_sup_only(&inst.src, &inst.tgt, &train, &solo)?;
    let p = framework::precision_at_1(
        &sup_only.map, &inst.src, &inst.tgt, &test, RetrievalMethod::Csls, 10,
    )?;
    println!("\nsupervised-only baseline (CSLS): P@1 = {p:.3}");
    Ok(())
}
