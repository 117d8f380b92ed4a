// The parallel strategy (PSS) with Wasserstein model selection.
//
// Unlike CSS, both trainers keep their own parameters for the whole run
// and only exchange previous-epoch snapshots: the supervised side trains
// on the lexicon mined from the previous unsupervised map, the
// unsupervised side takes its prior from the previous supervised map.
// That leaves two final candidates, and no labels to pick between them —
// so the toolkit compares their transport costs on a fixed seeded batch
// (a label-free proxy for alignment quality) and keeps the cheaper map.
// The supervised chain is compared through its orthogonal projection:
// transport cost is scale-sensitive, retrieval is not.

use otlex::framework::{self, RetrievalMethod, Strategy, StrategyConfig};
use otlex::synth;

fn main() -> otlex::Result<()> {
    let inst = synth::generate(800, 16, 0.02, 55)?;
    let (train, test) = synth::split_gold_lexicon(&inst, 40, 200, 55)?;

    let mut cfg = StrategyConfig {
        strategy: Strategy::Pss,
        epochs: 3,
        seed: 55,
        ..StrategyConfig::default()
    };
    cfg.sup.iters_per_epoch = 150;
    cfg.sup.batch_size = 128;
    cfg.unsup.iters_per_epoch = 12;
    cfg.unsup.batch_size = 256;
    cfg.unsup.learning_rate = 3.0;
    cfg.blu.cap = 400;

    let run = framework::run_pss(&inst.src, &inst.tgt, &train, &cfg, None)?;
    let (q_sup, q_unsup) = run.pss_candidates.as_ref().unwrap();
    let p1 = |q: &otlex::LinearMap| {
        framework::precision_at_1(q, &inst.src, &inst.tgt, &test, RetrievalMethod::Nn, 10)
    };

    let sel = run.report.selection.as_ref().unwrap();
    println!("candidates after {} epochs:", cfg.epochs);
    println!(
        "  supervised chain    transport cost {:.4}   P@1 {:.3}",
        sel.cost_sup,
        p1(q_sup)?
    );
    println!(
        "  unsupervised chain  transport cost {:.4}   P@1 {:.3}",
        sel.cost_unsup,
        p1(q_unsup)?
    );
    println!("selected: {:?}\n", sel.chosen);

    // Baseline: the supervised trainer alone, same budgets, no exchange.
    let mut solo = cfg.clone();
    solo.strategy = Strategy::SupOnly;
    let sup_only = framework::run_sup_only(&inst.src, &inst.tgt, &train, &solo)?;
    println!("supervised-only baseline P@1 {:.3}", p1(&sup_only.map)?);
    println!("parallel strategy final  P@1 {:.3}", p1(&run.map)?);
    Ok(())
}
