//! On-disk containers for bilinear forms and diagonalization output.
//!
//! Files are JSON documents whose numbers carry 17 significant digits, so
//! every 64-bit value round-trips exactly.

use std::io::{self, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bilinear::BilinearMap;
use crate::diag::DiagonalizingBasis;
use crate::error::{Error, Result};
use crate::kaehler::ComplexStructure;
use crate::space::QuadSpace;

/// Serialized bilinear form V x V -> W with optional complex structure on V
/// and an optional distinguished time-like coordinate of W.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormFile {
    pub dim_v: usize,
    pub w_signature: (usize, usize),
    pub gram_w: Vec<Vec<f64>>,
    /// tensor[i][j] = φ(e_i, e_j) in W coordinates.
    pub tensor: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_index: Option<usize>,
}

impl FormFile {
    pub fn from_form(form: &BilinearMap, j: Option<&ComplexStructure>, w_index: Option<usize>) -> Self {
        let d = form.domain_dim();
        let target = form.target();
        let gram_w = matrix_rows(target.gram());
        let tensor = (0..d)
            .map(|i| (0..d).map(|k| form.value(i, k).iter().copied().collect()).collect())
            .collect();
        Self {
            dim_v: d,
            w_signature: target.signature(),
            gram_w,
            tensor,
            j: j.map(|c| matrix_rows(c.matrix())),
            w_index,
        }
    }

    /// Validates shapes, the Gram matrix, the declared signature, and the
    /// complex structure, and rebuilds the typed values.
    pub fn to_form(&self, tol: f64) -> Result<(BilinearMap, Option<ComplexStructure>)> {
        let gram = rows_matrix(&self.gram_w)?;
        if gram.nrows() != gram.ncols() {
            return Err(Error::InvalidInput("gram_w must be square".into()));
        }
        let target = QuadSpace::with_tol(gram, tol)?;
        if target.signature() != self.w_signature {
            return Err(Error::InvalidInput(format!(
                "declared signature {:?} does not match the Gram matrix ({:?})",
                self.w_signature,
                target.signature()
            )));
        }
        if let Some(idx) = self.w_index {
            if idx >= target.dim() {
                return Err(Error::InvalidInput(format!("w_index {idx} out of range")));
            }
        }
        let d = self.dim_v;
        if self.tensor.len() != d || self.tensor.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidInput("tensor must be dim_v x dim_v".into()));
        }
        let wdim = target.dim();
        let mut slices = Vec::with_capacity(d);
        for row in &self.tensor {
            let mut s = DMatrix::zeros(wdim, d);
            for (k, value) in row.iter().enumerate() {
                if value.len() != wdim {
                    return Err(Error::InvalidInput("tensor entries must have the target dimension".into()));
                }
                s.set_column(k, &DVector::from_row_slice(value));
            }
            slices.push(s);
        }
        let form = BilinearMap::new(d, target, slices);

        let j = match &self.j {
            None => None,
            Some(rows) => {
                let m = rows_matrix(rows)?;
                if m.nrows() != d {
                    return Err(Error::InvalidInput("J must act on the domain".into()));
                }
                let identity = DMatrix::identity(d, d);
                Some(ComplexStructure::new(m, &identity, tol * 1e3)?)
            }
        };
        Ok((form, j))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(&to_json_17(self)?)?;
        file.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Serialized diagonalizing basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisFile {
    pub pairs: Vec<Vec<f64>>,
    pub xis: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
}

impl BasisFile {
    pub fn from_basis(basis: &DiagonalizingBasis) -> Self {
        Self {
            pairs: basis.pairs.iter().map(|v| v.iter().copied().collect()).collect(),
            xis: basis.xis.iter().map(|v| v.iter().copied().collect()).collect(),
            norms: basis.norms.clone(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(&to_json_17(self)?)?;
        file.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
}

fn rows_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::InvalidInput("matrix must be nonempty".into()));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidInput("matrix rows must have equal length".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

/// Serialize with pretty indentation and floats at 17 significant digits.
pub fn to_json_17<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter::new());
    value.serialize(&mut ser)?;
    Ok(out)
}

/// Pretty-printing JSON formatter that writes every float with 17
/// significant digits.
struct SigDigitFormatter<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl SigDigitFormatter<'_> {
    fn new() -> Self {
        Self { inner: serde_json::ser::PrettyFormatter::new() }
    }
}

impl serde_json::ser::Formatter for SigDigitFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn end_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_key(writer)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}
