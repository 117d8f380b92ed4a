// CSLS retrieval: why plain cosine fails near hubs, and how local scaling
// fixes it.
//
// In high dimensions some vectors ("hubs") end up unusually close to
// many queries at once. Plain nearest-neighbor retrieval keeps returning
// the hub. CSLS subtracts from each cosine similarity the mean similarity
// of both endpoints to their own k nearest neighbors,
//
//     CSLS(x, y) = 2 cos(x, y) - r_T(x) - r_S(y),
//
// so a candidate that is close to *everything* (large r_S) is penalized
// exactly where it cheats. The miniature below makes the effect visible
// by hand: one synthetic hub target almost equidistant to three queries,
// plus one true target per query that is slightly farther away.

use ndarray::{array, Array2};

use otlex::embeddings::{EmbeddingSpace, Normalization};
use otlex::framework::{self, RetrievalMethod};
use otlex::linmap::LinearMap;

fn space(matrix: Array2<f64>, prefix: &str) -> otlex::Result<EmbeddingSpace> {
    let words = (0..matrix.nrows()).map(|i| format!("{prefix}{i}")).collect();
    EmbeddingSpace::new(words, matrix, Normalization::Raw)
}

fn main() -> otlex::Result<()> {
    let rt3 = 3.0f64.sqrt().recip();
    // Three orthonormal queries in R^4.
    let mut qm = Array2::zeros((3, 4));
    for i in 0..3 {
        qm[[i, i]] = 1.0;
    }
    let src = space(qm, "q")?;

    let mut tm = Array2::zeros((4, 4));
    tm.row_mut(0).assign(&array![rt3, rt3, rt3, 0.0]); // the hub
    for i in 0..3 {
        tm[[i + 1, i]] = 0.55; // true target: cos 0.55 to its query...
        tm[[i + 1, 3]] = (1.0f64 - 0.55 * 0.55).sqrt(); // ...unit norm
    }
    let tgt = space(tm, "t")?;
    let q = LinearMap::identity(4)?;

    println!("cosine to each query: hub = {rt3:.3}, true target = 0.550\n");
    for (method, label) in [(RetrievalMethod::Nn, "NN"), (RetrievalMethod::Csls, "CSLS k=2")] {
        let ranked = framework::retrieve(&q, &src, &tgt, &[0, 1, 2], method, 2)?;
        println!("{label}:");
        for (qi, order) in ranked.iter().enumerate() {
            println!(
                "  {} -> {}   (want {})",
                src.word(qi),
                tgt.word(order[0]),
                tgt.word(qi + 1)
            );
        }
        println!();
    }
    println!("the hub wins every query under NN and none under CSLS");
    Ok(())
}
