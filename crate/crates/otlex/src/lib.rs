//! Semi-supervised word-embedding alignment and bilingual lexicon
//! induction via optimal transport.
//!
//! The toolkit aligns two monolingual embedding spaces with an orthogonal
//! linear map and reads translation pairs off the aligned geometry. Two
//! trainers do the work and trade information instead of running alone:
//!
//! * a **supervised aligner** ([`supervised`]) — the Procrustes closed
//!   form refined by RCSLS SGD on an annotated lexicon;
//! * an **unsupervised aligner** ([`unsupervised`]) — stochastic
//!   Wasserstein–Procrustes descent on entropic optimal-transport plans
//!   ([`ot`]).
//!
//! Their coupling has two channels: **prior optimal transport** pulls the
//! unsupervised plan toward a Boltzmann prior built from the supervised
//! map ([`ot::boltzmann_prior`], [`ot::prior_ot`]), and the
//! **bi-directional lexicon update** ([`blu`]) mines mutual nearest
//! neighbors under the unsupervised map to grow the supervised lexicon.
//! The [`framework`] module orchestrates the exchange cyclically
//! ([`framework::run_css`]) or in parallel with Wasserstein model
//! selection ([`framework::run_pss`]), and evaluates maps by P@k under
//! NN or CSLS retrieval.
//!
//! Supporting cast: [`embeddings`] (text word-vector I/O, lexicons),
//! [`linmap`] (the on-disk map format), [`synth`] (planted instances
//! with exact ground truth), and [`cli`] (the batch front door).
//!
//! ```
//! use otlex::framework::{self, RetrievalMethod, Strategy, StrategyConfig};
//! use otlex::synth;
//!
//! // A small planted problem: known rotation, known permutation.
//! let inst = synth::generate(300, 8, 0.01, 7)?;
//! let (train, test) = synth::split_gold_lexicon(&inst, 30, 100, 7)?;
//!
//! let mut cfg = StrategyConfig { strategy: Strategy::Css, epochs: 2, ..Default::default() };
//! cfg.sup.iters_per_epoch = 60;
//! cfg.sup.neighbor_pool = 300;
//! cfg.unsup.batch_size = 128;
//! cfg.unsup.sample_pool = 300;
//! cfg.unsup.iters_per_epoch = 8;
//! cfg.unsup.learning_rate = 1.0;
//! cfg.unsup.rcsls_k = 5;
//! cfg.blu.pool = 300;
//! cfg.blu.cap = 150;
//!
//! let run = framework::run_css(&inst.src, &inst.tgt, &train, &cfg, None)?;
//! let p1 = framework::precision_at_1(
//!     &run.map, &inst.src, &inst.tgt, &test, RetrievalMethod::Nn, 10)?;
//! assert!(p1 >= 0.9);
//! # Ok::<(), otlex::Error>(())
//! ```

pub mod blu;
pub mod cli;
pub mod embeddings;
pub mod error;
pub mod framework;
pub(crate) mod linalg;
pub mod linmap;
pub mod ot;
pub mod supervised;
pub mod synth;
pub mod unsupervised;
mod parallel;

pub use error::{Error, Result};
pub use linmap::LinearMap;
pub use parallel::threads;
