//! Frames as synthesis matrices: bounds, tightness, sphericity and the
//! orthogonal, permutation and phase actions.

use crate::error::{Error, Result};
use crate::scalar::{max_abs, Field, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// An `n x k` synthesis matrix whose columns are the frame vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T: Scalar> {
    m: DMatrix<T>,
}

/// Optimal lower and upper frame constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Result of [`Frame::is_tight`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tightness {
    pub tight: bool,
    /// `trace(FF*) / n`.
    pub bound: f64,
    pub bounds: FrameBounds,
}

/// Semi-axes weights `a_1 >= ... >= a_n > 0` of the ellipsoid `<D(a)v, v> = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidSpec {
    axes: Vec<f64>,
}

impl EllipsoidSpec {
    pub fn new(axes: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument("ellipsoid needs at least one axis".into()));
        }
        if axes.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::InvalidArgument("ellipsoid axes must be positive".into()));
        }
        if axes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("ellipsoid axes must be sorted descending".into()));
        }
        Ok(Self { axes })
    }

    pub fn sphere(n: usize) -> Self {
        Self { axes: vec![1.0; n] }
    }

    pub fn axes(&self) -> &[f64] {
        &self.axes
    }
}

/// The tight bound `k / (a_1 + ... + a_n)` of a `k`-vector frame on the ellipsoid.
pub fn expected_tight_bound(a: &EllipsoidSpec, k: usize) -> Result<f64> {
    let n = a.axes.len();
    if k <= n {
        return Err(Error::InvalidArgument(format!("need k > n, got k = {k}, n = {n}")));
    }
    Ok(k as f64 / a.axes.iter().sum::<f64>())
}

impl<T: Scalar> Frame<T> {
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Dimension(format!("empty {}x{} frame", m.nrows(), m.ncols())));
        }
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if !m[(r, c)].is_finite_entry() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self { m })
    }

    /// Builds a frame from its columns.
    pub fn from_columns(cols: &[Vec<T>]) -> Result<Self> {
        let k = cols.len();
        let n = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("columns of unequal length".into()));
        }
        Self::new(DMatrix::from_fn(n, k, |r, c| cols[c][r]))
    }

    pub fn field(&self) -> Field {
        T::FIELD
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn k(&self) -> usize {
        self.m.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.m
    }

    /// The frame operator `FF*`.
    pub fn frame_operator(&self) -> DMatrix<T> {
        &self.m * self.m.adjoint()
    }

    pub fn frame_bounds(&self) -> Result<FrameBounds> {
        if max_abs(&self.m) == 0.0 {
            return Err(Error::InvalidArgument("zero frame".into()));
        }
        let eig = self.frame_operator().symmetric_eigen();
        let lower = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
        let upper = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(FrameBounds { lower, upper })
    }

    /// Tight iff `lambda_max - lambda_min <= tol * lambda_max`.
    pub fn is_tight(&self, tol: f64) -> Result<Tightness> {
        let bounds = self.frame_bounds()?;
        let s = self.frame_operator();
        let bound = (0..self.n()).map(|i| s[(i, i)].real()).sum::<f64>() / self.n() as f64;
        let tight = bounds.upper - bounds.lower <= tol * bounds.upper;
        Ok(Tightness { tight, bound, bounds })
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.m.column_iter().map(|c| c.norm()).collect()
    }

    /// Largest `|<D(a) f_j, f_j> - 1|` over the columns.
    pub fn ellipsoid_residual(&self, a: &EllipsoidSpec) -> Result<f64> {
        if a.axes.len() != self.n() {
            return Err(Error::Dimension(format!(
                "{} axes for a frame in dimension {}",
                a.axes.len(),
                self.n()
            )));
        }
        let mut worst = 0.0_f64;
        for col in self.m.column_iter() {
            let q: f64 = col.iter().zip(&a.axes).map(|(x, ai)| ai * x.modulus_squared()).sum();
            worst = worst.max((q - 1.0).abs());
        }
        Ok(worst)
    }

    pub fn is_on_ellipsoid(&self, a: &EllipsoidSpec, tol: f64) -> Result<bool> {
        Ok(self.ellipsoid_residual(a)? <= tol)
    }

    pub fn is_spherical(&self, tol: f64) -> bool {
        self.ellipsoid_residual(&EllipsoidSpec::sphere(self.n())).is_ok_and(|r| r <= tol)
    }

    /// `UF` for an orthogonal (real) or unitary (complex) `U`.
    pub fn act_orthogonal(&self, u: &DMatrix<T>, tol: f64) -> Result<Self> {
        let n = self.n();
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::Dimension(format!("expected {n}x{n} matrix, got {}x{}", u.nrows(), u.ncols())));
        }
        let defect = max_abs(&(u.adjoint() * u - DMatrix::<T>::identity(n, n)));
        if defect > tol {
            return Err(Error::InvalidArgument(format!("matrix is not orthogonal/unitary (defect {defect:e})")));
        }
        Self::new(u * &self.m)
    }

    /// Reorders columns: column `j` of the result is column `perm[j]` of `self`
    /// (zero-based). Equivalent to right multiplication by a permutation matrix.
    pub fn act_permutation(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.k())?;
        Ok(Self { m: self.m.select_columns(perm) })
    }

    /// Scales column `j` by the unimodular scalar `zeta[j]`.
    pub fn act_phases(&self, zeta: &[T], tol: f64) -> Result<Self> {
        if zeta.len() != self.k() {
            return Err(Error::Dimension(format!("{} phases for {} vectors", zeta.len(), self.k())));
        }
        if let Some(j) = zeta.iter().position(|z| (z.modulus() - 1.0).abs() > tol) {
            return Err(Error::InvalidArgument(format!("phase {j} is not unimodular")));
        }
        let mut m = self.m.clone();
        for (j, z) in zeta.iter().enumerate() {
            m.column_mut(j).iter_mut().for_each(|x| *x *= *z);
        }
        Ok(Self { m })
    }
}

pub(crate) fn check_permutation(perm: &[usize], k: usize) -> Result<()> {
    if perm.len() != k {
        return Err(Error::Dimension(format!("permutation of length {} for k = {k}", perm.len())));
    }
    let mut seen = vec![false; k];
    for &p in perm {
        if p >= k || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
    }
    Ok(())
}

/// The `(n+1)`-vector simplex frame in `R^n`: unit columns with pairwise
/// inner products `-1/n`.
pub fn simplex_frame(n: usize) -> Result<Frame<f64>> {
    if n < 1 {
        return Err(Error::InvalidArgument("simplex frame needs n >= 1".into()));
    }
    let nf = n as f64;
    let scale = ((nf + 1.0) / nf).sqrt();
    let m = DMatrix::from_fn(n, n + 1, |row, col| {
        // rows and columns are 1-based in the closed form
        let (r, p) = (row + 1, col + 1);
        if p == n + 1 {
            return if r == n { -1.0 } else { 0.0 };
        }
        let v = if r + 1 < p {
            0.0
        } else if r + 1 == p {
            let q = (p - 1) as f64;
            -q / (q * p as f64).sqrt()
        } else {
            let rf = r as f64;
            1.0 / (rf * (rf + 1.0)).sqrt()
        };
        scale * v
    });
    Frame::new(m)
}

/// Frames over either field, for IO and dispatch.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFrame {
    Real(Frame<f64>),
    Complex(Frame<Complex64>),
}

impl AnyFrame {
    pub fn field(&self) -> Field {
        match self {
            AnyFrame::Real(_) => Field::R,
            AnyFrame::Complex(_) => Field::C,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyFrame::Real(f) => f.n(),
            AnyFrame::Complex(f) => f.n(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            AnyFrame::Real(f) => f.k(),
            AnyFrame::Complex(f) => f.k(),
        }
    }
}

impl From<Frame<f64>> for AnyFrame {
    fn from(f: Frame<f64>) -> Self {
        AnyFrame::Real(f)
    }
}

impl From<Frame<Complex64>> for AnyFrame {
    fn from(f: Frame<Complex64>) -> Self {
        AnyFrame::Complex(f)
    }
}
