// On-disk formats: embedding files, lexicons, and the binary map format.
//
// The toolkit reads the ubiquitous text word-vector format (header line
// "count dim", then one token and its values per line) and persists maps
// in a small binary format — magic "OTLX", little-endian dimension, an
// orthogonality flag, then row-major f64 entries — so that evaluation
// across runs is exact: loading a saved map reproduces the matrix bit
// for bit. This program writes a planted instance to a temp directory,
// round-trips everything, and verifies the identities.

use otlex::embeddings::{load_embeddings, load_lexicon, save_embeddings, save_lexicon, LoadOptions};
use otlex::linmap::LinearMap;
use otlex::synth;

fn main() -> otlex::Result<()> {
    let dir = std::env::temp_dir().join("otlex_roundtrip_example");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let inst = synth::generate(120, 8, 0.01, 13)?;
    let lexicon = synth::gold_lexicon(&inst, 40, 13)?;

    // Embeddings: text format with shortest round-trip float encoding.
    let src_path = dir.join("src.vec");
    save_embeddings(&inst.src, &src_path)?;
    let reloaded = load_embeddings(&src_path, &LoadOptions::default())?;
    assert_eq!(reloaded.len(), inst.src.len());
    assert_eq!(reloaded.dim(), inst.src.dim());
    assert_eq!(reloaded.word(5), inst.src.word(5));
    let max_gap = reloaded
        .matrix()
        .iter()
        .zip(inst.src.matrix().iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("embeddings: {} rows round-tripped, max gap {max_gap:.2e}", reloaded.len());

    // Lexicons: token pairs resolved against both vocabularies.
    let lex_path = dir.join("train.txt");
    save_lexicon(&lexicon, &inst.src, &inst.tgt, &lex_path)?;
    let back = load_lexicon(&lex_path, &inst.src, &inst.tgt)?;
    assert_eq!(back.lexicon.pairs(), lexicon.pairs());
    println!(
        "lexicon: {} pairs round-tripped ({} oov, {} duplicates skipped)",
        back.lexicon.len(),
        back.skipped_oov,
        back.skipped_duplicates
    );

    // Maps: bitwise-exact binary round trip.
    let map_path = dir.join("map.bin");
    inst.planted_map.save(&map_path)?;
    let restored = LinearMap::load(&map_path)?;
    assert_eq!(restored.matrix(), inst.planted_map.matrix());
    assert_eq!(restored.is_orthogonal(), inst.planted_map.is_orthogonal());
    let bytes = std::fs::metadata(&map_path).expect("saved map").len();
    println!(
        "map: {}x{} matrix round-tripped bit-exactly ({bytes} bytes, 16-byte header)",
        restored.dim(),
        restored.dim()
    );

    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
