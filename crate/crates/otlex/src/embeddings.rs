//! Embedding-space and lexicon ingestion, persistence, and row selection.
//!
//! File formats (word2vec / MUSE text conventions):
//!
//! * embeddings — header line `<count> <dim>`, then one `<token> v1 … v_dim`
//!   line per word; the token is everything before the first whitespace.
//! * lexicon — one `<src_token> <tgt_token>` pair per line.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Preprocessing recorded on a loaded space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    Unit,
}

/// A vocabulary with one dense embedding row per word.
#[derive(Debug, Clone)]
pub struct EmbeddingSpace {
    words: Vec<String>,
    index: HashMap<String, usize>,
    matrix: Array2<f64>,
    normalized: Normalization,
}

impl EmbeddingSpace {
    /// Build a space from parts, validating the type invariants.
    pub fn new(words: Vec<String>, matrix: Array2<f64>, normalized: Normalization) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::Empty("embedding space has no words".into()));
        }
        if words.len() != matrix.nrows() {
            return Err(Error::Dimension(format!(
                "{} words but {} matrix rows",
                words.len(),
                matrix.nrows()
            )));
        }
        if matrix.ncols() == 0 {
            return Err(Error::Dimension("embedding dimension is 0".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("embedding matrix contains non-finite entries".into()));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Parameter(format!("duplicate token '{w}' in vocabulary")));
            }
        }
        if normalized == Normalization::Unit {
            for (i, row) in matrix.outer_iter().enumerate() {
                let norm = row.dot(&row).sqrt();
                if (norm - 1.0).abs() > 1e-6 {
                    return Err(Error::Numeric(format!(
                        "row {i} ('{}') has norm {norm}, not unit",
                        words[i]
                    )));
                }
            }
        }
        Ok(Self {
            words,
            index,
            matrix,
            normalized,
        })
    }

    /// Number of words.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Embedding dimension.
    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    /// Vocabulary index of a token, if present.
    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn normalized(&self) -> Normalization {
        self.normalized
    }
}

/// Options for [`load_embeddings`].
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Keep at most this many (unique) rows; `None` means unlimited.
    pub max_vocab: Option<usize>,
    /// Unit-normalize every row after loading (the default geometry for
    /// cosine/CSLS retrieval).
    pub normalize: bool,
    /// Subtract the per-column mean before normalization (opt-in).
    pub center: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            max_vocab: None,
            normalize: true,
            center: false,
        }
    }
}

/// Read a text embedding file. Keeps the first `min(count, max_vocab)`
/// unique tokens in file order; later duplicates are skipped and counted in
/// a warning.
pub fn load_embeddings(path: &Path, options: &LoadOptions) -> Result<EmbeddingSpace> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let header = match lines.next() {
        Some((_, line)) => line.map_err(|e| Error::io(path, e))?,
        None => return Err(Error::Empty(format!("{}: empty embedding file", path.display()))),
    };
    let mut fields = header.split_whitespace();
    let parse_count = |s: Option<&str>| -> Option<usize> { s.and_then(|v| v.parse().ok()) };
    let declared = parse_count(fields.next());
    let dim = parse_count(fields.next());
    let (declared, dim) = match (declared, dim, fields.next()) {
        (Some(n), Some(d), None) if d > 0 => (n, d),
        _ => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                msg: format!("malformed header '{header}', expected '<count> <dim>'"),
            })
        }
    };
    if declared == 0 {
        return Err(Error::Empty(format!(
            "{}: header declares 0 rows",
            path.display()
        )));
    }

    let keep = options.max_vocab.map_or(declared, |m| declared.min(m));
    let mut words: Vec<String> = Vec::with_capacity(keep);
    let mut index: HashMap<String, usize> = HashMap::with_capacity(keep);
    let mut values: Vec<f64> = Vec::with_capacity(keep * dim);
    let mut skipped_duplicates = 0usize;

    for (lineno, line) in lines {
        if words.len() == keep {
            break;
        }
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().expect("non-empty line has a first field");
        let row: std::result::Result<Vec<f64>, _> = fields.map(str::parse::<f64>).collect();
        let row = row.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: format!("bad number in row for '{token}': {e}"),
        })?;
        if row.len() != dim {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: format!("row for '{token}' has {} values, expected {dim}", row.len()),
            });
        }
        if index.contains_key(token) {
            skipped_duplicates += 1;
            continue;
        }
        index.insert(token.to_string(), words.len());
        words.push(token.to_string());
        values.extend_from_slice(&row);
    }

    if skipped_duplicates > 0 {
        log::warn!(
            "{}: skipped {skipped_duplicates} duplicate token(s)",
            path.display()
        );
    }
    if words.is_empty() {
        return Err(Error::Empty(format!(
            "{}: no embedding rows found",
            path.display()
        )));
    }

    let mut matrix = Array2::from_shape_vec((words.len(), dim), values)
        .expect("row count and width are consistent by construction");

    if options.center {
        let mean = matrix
            .mean_axis(Axis(0))
            .expect("matrix has at least one row");
        matrix -= &mean;
    }
    let normalized = if options.normalize {
        if let Err(row) = linalg::unit_normalize_rows(&mut matrix) {
            return Err(Error::Numeric(format!(
                "row for token '{}' has zero norm and cannot be unit-normalized",
                words[row]
            )));
        }
        Normalization::Unit
    } else {
        Normalization::Raw
    };

    EmbeddingSpace::new(words, matrix, normalized)
}

/// Write a space in the text format read by [`load_embeddings`]. Values use
/// Rust's shortest round-trip float formatting, so a save→load cycle (with
/// normalization off) reproduces the matrix bit for bit.
pub fn save_embeddings(space: &EmbeddingSpace, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<File>, s: String| -> Result<()> {
        w.write_all(s.as_bytes()).map_err(|e| Error::io(path, e))
    };
    write(&mut w, format!("{} {}\n", space.len(), space.dim()))?;
    for (word, row) in space.words().iter().zip(space.matrix().outer_iter()) {
        let mut line = String::with_capacity(word.len() + 24 * space.dim());
        line.push_str(word);
        for v in row.iter() {
            line.push(' ');
            line.push_str(&v.to_string());
        }
        line.push('\n');
        write(&mut w, line)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Provenance of a lexicon pair: given by the user, or induced by the
/// bi-directional lexicon update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOrigin {
    Annotated,
    Additional,
}

/// One translation pair as vocabulary indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LexEntry {
    pub src: usize,
    pub tgt: usize,
    pub origin: PairOrigin,
}

/// An ordered, duplicate-free list of translation pairs between a source
/// and a target vocabulary. One-to-many pairs are allowed; the exact
/// `(src, tgt)` combination is unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    src_bound: usize,
    tgt_bound: usize,
}

impl Lexicon {
    /// An empty lexicon over vocabularies of the given sizes.
    pub fn new(src_bound: usize, tgt_bound: usize) -> Self {
        Self {
            entries: Vec::new(),
            src_bound,
            tgt_bound,
        }
    }

    /// Build from index pairs, all with one origin.
    pub fn from_pairs(
        src_bound: usize,
        tgt_bound: usize,
        pairs: &[(usize, usize)],
        origin: PairOrigin,
    ) -> Result<Self> {
        let mut lex = Self::new(src_bound, tgt_bound);
        for &(src, tgt) in pairs {
            lex.push(src, tgt, origin)?;
        }
        Ok(lex)
    }

    /// Append a pair. Returns `Ok(false)` when the pair was already present
    /// (set semantics), `Err` when an index is out of bounds.
    pub fn push(&mut self, src: usize, tgt: usize, origin: PairOrigin) -> Result<bool> {
        if src >= self.src_bound || tgt >= self.tgt_bound {
            return Err(Error::Parameter(format!(
                "pair ({src}, {tgt}) out of bounds for vocabularies of size {}×{}",
                self.src_bound, self.tgt_bound
            )));
        }
        if self.contains(src, tgt) {
            return Ok(false);
        }
        self.entries.push(LexEntry { src, tgt, origin });
        Ok(true)
    }

    pub fn contains(&self, src: usize, tgt: usize) -> bool {
        self.entries.iter().any(|e| e.src == src && e.tgt == tgt)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn src_bound(&self) -> usize {
        self.src_bound
    }

    pub fn tgt_bound(&self) -> usize {
        self.tgt_bound
    }

    /// Pairs as `(src, tgt)` tuples in order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.entries.iter().map(|e| (e.src, e.tgt)).collect()
    }

    /// Number of pairs with the given origin.
    pub fn count_origin(&self, origin: PairOrigin) -> usize {
        self.entries.iter().filter(|e| e.origin == origin).count()
    }
}

/// Which side of a lexicon pair to select.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

/// Result of [`load_lexicon`]: the kept pairs plus skip counters.
#[derive(Debug)]
pub struct LexiconLoad {
    pub lexicon: Lexicon,
    /// Lines whose source or target token was out of vocabulary.
    pub skipped_oov: usize,
    /// Well-formed pairs dropped because they repeated an earlier pair.
    pub skipped_duplicates: usize,
}

/// Read a `src_token tgt_token` dictionary file against two vocabularies.
/// Out-of-vocabulary lines are skipped and counted, not fatal; repeated
/// pairs are kept once.
pub fn load_lexicon(path: &Path, src: &EmbeddingSpace, tgt: &EmbeddingSpace) -> Result<LexiconLoad> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lexicon = Lexicon::new(src.len(), tgt.len());
    let mut skipped_oov = 0usize;
    let mut skipped_duplicates = 0usize;

    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (s_tok, t_tok) = match (fields.next(), fields.next()) {
            (Some(s), Some(t)) => (s, t),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    msg: "expected two whitespace-separated tokens".into(),
                })
            }
        };
        match (src.index_of(s_tok), tgt.index_of(t_tok)) {
            (Some(si), Some(ti)) => {
                if !lexicon.push(si, ti, PairOrigin::Annotated)? {
                    skipped_duplicates += 1;
                }
            }
            _ => skipped_oov += 1,
        }
    }
    if skipped_oov > 0 {
        log::warn!(
            "{}: skipped {skipped_oov} out-of-vocabulary pair(s)",
            path.display()
        );
    }
    Ok(LexiconLoad {
        lexicon,
        skipped_oov,
        skipped_duplicates,
    })
}

/// Write one `src_token tgt_token` line per pair, in pair order. Origin is
/// metadata only and is not serialized; the file round-trips through
/// [`load_lexicon`].
pub fn save_lexicon(
    lexicon: &Lexicon,
    src: &EmbeddingSpace,
    tgt: &EmbeddingSpace,
    path: &Path,
) -> Result<()> {
    if lexicon.src_bound() != src.len() || lexicon.tgt_bound() != tgt.len() {
        return Err(Error::Dimension(format!(
            "lexicon bounds {}×{} do not match vocabularies {}×{}",
            lexicon.src_bound(),
            lexicon.tgt_bound(),
            src.len(),
            tgt.len()
        )));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for entry in lexicon.entries() {
        writeln!(w, "{} {}", src.word(entry.src), tgt.word(entry.tgt))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Gather the embedding rows named by one side of a lexicon: row `r` of the
/// result is the embedding of pair `r`'s index on `side`. Rows repeat when a
/// word participates in several pairs.
pub fn subset_rows(space: &EmbeddingSpace, lexicon: &Lexicon, side: Side) -> Result<Array2<f64>> {
    let bound = match side {
        Side::Source => lexicon.src_bound(),
        Side::Target => lexicon.tgt_bound(),
    };
    if bound != space.len() {
        return Err(Error::Dimension(format!(
            "lexicon bound {bound} does not match vocabulary size {}",
            space.len()
        )));
    }
    let mut out = Array2::<f64>::zeros((lexicon.len(), space.dim()));
    for (mut row, entry) in out.outer_iter_mut().zip(lexicon.entries()) {
        let i = match side {
            Side::Source => entry.src,
            Side::Target => entry.tgt,
        };
        row.assign(&space.matrix().row(i));
    }
    Ok(out)
}

/// View helper used by trainers: the full matrix of a space.
pub fn full_view(space: &EmbeddingSpace) -> ArrayView2<'_, f64> {
    space.matrix().view()
}
