//! Square linear maps between embedding spaces and their on-disk format.
//!
//! A map file is a fixed 16-byte header followed by the matrix entries:
//!
//! * bytes 0..4 — magic `OTLX`
//! * bytes 4..8 — dimension `d` as little-endian `u32`
//! * byte 8 — `1` if the map is known orthogonal, `0` otherwise
//! * bytes 9..16 — zero padding
//! * then `d · d` little-endian `f64` values in row-major order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg;

const MAGIC: &[u8; 4] = b"OTLX";
const HEADER_LEN: usize = 16;

/// A square map `Q` applied to row vectors as `x ↦ x·Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: Array2<f64>,
    orthogonal: bool,
}

impl LinearMap {
    /// Wrap a square matrix. `orthogonal` is a caller-supplied flag recording
    /// whether the matrix is known to be orthogonal; it is stored in the map
    /// file and consulted when an inverse map is needed.
    pub fn new(matrix: Array2<f64>, orthogonal: bool) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension(format!(
                "linear map must be square, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() == 0 {
            return Err(Error::Empty("linear map has dimension 0".into()));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("linear map contains non-finite entries".into()));
        }
        Ok(Self { matrix, orthogonal })
    }

    /// Identity map of dimension `d`.
    pub fn identity(d: usize) -> Result<Self> {
        Self::new(Array2::eye(d), true)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonal
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.matrix
    }

    /// Map every row of `x`: returns `x · Q`.
    pub fn apply(&self, x: &ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "cannot apply a {}-dimensional map to rows of width {}",
                self.dim(),
                x.ncols()
            )));
        }
        // x·Q = x·(Qᵀ)ᵀ, so reuse the row-parallel A·Bᵀ kernel.
        let qt = self.matrix.t().to_owned();
        Ok(linalg::matmul_bt(x, &qt.view()))
    }

    /// Map every row of `y` through the transpose: returns `y · Qᵀ`. For an
    /// orthogonal map this is the exact inverse direction.
    pub fn apply_transpose(&self, y: &ArrayView2<f64>) -> Result<Array2<f64>> {
        if y.ncols() != self.dim() {
            return Err(Error::Dimension(format!(
                "cannot apply a {}-dimensional map to rows of width {}",
                self.dim(),
                y.ncols()
            )));
        }
        Ok(linalg::matmul_bt(y, &self.matrix.view()))
    }

    /// Replace the matrix by its nearest orthogonal matrix (`U·Vᵀ` from the
    /// SVD) and set the orthogonality flag.
    pub fn project_orthogonal(&self) -> Result<Self> {
        let q = linalg::orthogonal_factor(&self.matrix)?;
        Self::new(q, true)
    }

    /// Write the map in the binary format described at module level.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let mut header = [0u8; HEADER_LEN];
        header[..4].copy_from_slice(MAGIC);
        header[4..8].copy_from_slice(&(self.dim() as u32).to_le_bytes());
        header[8] = u8::from(self.orthogonal);
        w.write_all(&header).map_err(|e| Error::io(path, e))?;
        for v in self.matrix.iter() {
            w.write_all(&v.to_le_bytes()).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Read a map written by [`LinearMap::save`], validating the header and
    /// the exact payload length.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let mut header = [0u8; HEADER_LEN];
        r.read_exact(&mut header).map_err(|_| Error::MapFormat {
            path: path.to_path_buf(),
            msg: "file shorter than the 16-byte header".into(),
        })?;
        if &header[..4] != MAGIC {
            return Err(Error::MapFormat {
                path: path.to_path_buf(),
                msg: "bad magic, expected OTLX".into(),
            });
        }
        let d = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        if d == 0 {
            return Err(Error::MapFormat {
                path: path.to_path_buf(),
                msg: "dimension 0 in header".into(),
            });
        }
        let orthogonal = match header[8] {
            0 => false,
            1 => true,
            other => {
                return Err(Error::MapFormat {
                    path: path.to_path_buf(),
                    msg: format!("invalid orthogonality flag {other}"),
                })
            }
        };
        let mut payload = Vec::new();
        r.read_to_end(&mut payload).map_err(|e| Error::io(path, e))?;
        let want = d * d * 8;
        if payload.len() != want {
            return Err(Error::MapFormat {
                path: path.to_path_buf(),
                msg: format!(
                    "expected {want} payload bytes for d={d}, found {}",
                    payload.len()
                ),
            });
        }
        let values: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::MapFormat {
                path: path.to_path_buf(),
                msg: "payload contains non-finite entries".into(),
            });
        }
        let matrix = Array2::from_shape_vec((d, d), values)
            .expect("length checked above");
        Self::new(matrix, orthogonal)
    }
}
