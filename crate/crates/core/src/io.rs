//! JSON formats for frames, Gram points, loops, partitions, paths and complexes.
//!
//! Matrices are row-major lists of rows. Real entries are numbers; complex
//! entries are `[re, im]` pairs (a plain number is accepted as a complex
//! entry with zero imaginary part). Partitions use 1-based indices.

use crate::error::{Error, Result};
use crate::frames::{AnyFrame, Frame};
use crate::grassmann::{AnyGram, GramPoint};
use crate::planar::{FramePath, PathKind, Sample};
use crate::scalar::{Field, Scalar};
use crate::stratification::Partition;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn to_c64(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

fn entry_of<T: Scalar>(x: T) -> Entry {
    let z = x.to_c64();
    match T::FIELD {
        Field::R => Entry::Real(z.re),
        Field::C => Entry::Complex([z.re, z.im]),
    }
}

/// On-disk frame: `n` rows of `k` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameJson {
    pub field: Field,
    pub n: usize,
    pub k: usize,
    pub entries: Vec<Vec<Entry>>,
}

/// On-disk Gram point: `k` rows of `k` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramJson {
    pub field: Field,
    pub k: usize,
    pub n: usize,
    pub entries: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopJson {
    pub points: Vec<GramJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub k: usize,
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleJson {
    pub t: f64,
    pub z: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub kind: PathKind,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    pub samples: Vec<SampleJson>,
}

fn matrix_from_rows<T: Scalar>(rows: &[Vec<Entry>], nr: usize, nc: usize, what: &str) -> Result<DMatrix<T>> {
    if rows.len() != nr || rows.iter().any(|r| r.len() != nc) {
        return Err(Error::Dimension(format!("{what}: expected {nr} rows of {nc} entries")));
    }
    let mut m = DMatrix::<T>::zeros(nr, nc);
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let z = match (T::FIELD, e) {
                (Field::R, Entry::Complex(_)) => {
                    return Err(Error::InvalidArgument(format!("{what}: complex entry at ({i}, {j}) in a real matrix")))
                }
                _ => e.to_c64(),
            };
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
            m[(i, j)] = T::from_c64(z).expect("real entry");
        }
    }
    Ok(m)
}

fn rows_of<T: Scalar>(m: &DMatrix<T>) -> Vec<Vec<Entry>> {
    m.row_iter().map(|r| r.iter().map(|x| entry_of(*x)).collect()).collect()
}

impl FrameJson {
    pub fn from_frame<T: Scalar>(f: &Frame<T>) -> Self {
        Self { field: T::FIELD, n: f.n(), k: f.k(), entries: rows_of(f.matrix()) }
    }

    pub fn from_any(f: &AnyFrame) -> Self {
        match f {
            AnyFrame::Real(f) => Self::from_frame(f),
            AnyFrame::Complex(f) => Self::from_frame(f),
        }
    }

    pub fn to_frame(&self) -> Result<AnyFrame> {
        Ok(match self.field {
            Field::R => AnyFrame::Real(Frame::new(matrix_from_rows(&self.entries, self.n, self.k, "frame")?)?),
            Field::C => AnyFrame::Complex(Frame::new(matrix_from_rows(&self.entries, self.n, self.k, "frame")?)?),
        })
    }
}

impl GramJson {
    pub fn from_gram<T: Scalar>(g: &GramPoint<T>) -> Self {
        Self { field: T::FIELD, k: g.k(), n: g.n(), entries: rows_of(g.matrix()) }
    }

    pub fn from_any(g: &AnyGram) -> Self {
        match g {
            AnyGram::Real(g) => Self::from_gram(g),
            AnyGram::Complex(g) => Self::from_gram(g),
        }
    }

    /// Parses and validates against the Gram point invariants at `tol`.
    pub fn to_gram(&self, tol: f64) -> Result<AnyGram> {
        Ok(match self.field {
            Field::R => AnyGram::Real(GramPoint::new(matrix_from_rows(&self.entries, self.k, self.k, "gram")?, self.n, tol)?),
            Field::C => {
                AnyGram::Complex(GramPoint::new(matrix_from_rows(&self.entries, self.k, self.k, "gram")?, self.n, tol)?)
            }
        })
    }
}

impl PartitionJson {
    pub fn from_partition(p: &Partition) -> Self {
        Self { k: p.k(), blocks: p.blocks().iter().map(|b| b.iter().map(|i| i + 1).collect()).collect() }
    }

    pub fn to_partition(&self) -> Result<Partition> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&i| i.checked_sub(1).ok_or_else(|| Error::InvalidArgument("partition indices are 1-based".into())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(self.k, blocks)
    }
}

impl PathJson {
    pub fn from_path(p: &FramePath) -> Self {
        Self {
            kind: p.kind,
            k: p.k,
            max_step: Some(p.max_step),
            samples: p
                .samples
                .iter()
                .map(|s| SampleJson { t: s.t, z: s.z.iter().map(|c| [c.re, c.im]).collect() })
                .collect(),
        }
    }

    /// `default_step` is used when the file does not record its step bound.
    pub fn to_path(&self, default_step: f64) -> Result<FramePath> {
        if let Some(i) = self.samples.iter().position(|s| s.z.len() != self.k) {
            return Err(Error::Dimension(format!("sample {i} does not have k = {} entries", self.k)));
        }
        if self.samples.is_empty() {
            return Err(Error::InvalidArgument("path has no samples".into()));
        }
        Ok(FramePath {
            kind: self.kind,
            k: self.k,
            max_step: self.max_step.unwrap_or(default_step),
            samples: self
                .samples
                .iter()
                .map(|s| Sample { t: s.t, z: s.z.iter().map(|[re, im]| Complex64::new(*re, *im)).collect() })
                .collect(),
        })
    }
}
