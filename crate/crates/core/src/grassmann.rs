//! Gram points `R = F*F = (k/n)P`, Naimark complements, frame recovery,
//! orbit witnesses, the one-redundant real points and holonomy signs.

use crate::error::{Error, Result};
use crate::frames::{check_permutation, Frame};
use crate::sampling::project_to_stf;
use crate::scalar::{max_abs, Field, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeSet;

/// A `k x k` matrix `R` with `(n/k)R` a rank-`n` projection and unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GramPoint<T: Scalar> {
    n: usize,
    r: DMatrix<T>,
}

/// Per-invariant outcome of [`is_gram_point`]; residuals are max-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GramCheck {
    pub self_adjoint: bool,
    pub idempotent: bool,
    pub unit_diagonal: bool,
    pub rank_n: bool,
    pub self_adjoint_residual: f64,
    pub idempotent_residual: f64,
    pub diagonal_residual: f64,
    /// Gap between the `n`-th and `(n+1)`-th eigenvalue of `(n/k)M`.
    pub spectral_gap: f64,
}

impl GramCheck {
    pub fn pass(&self) -> bool {
        self.self_adjoint && self.idempotent && self.unit_diagonal && self.rank_n
    }

    fn failures(&self) -> String {
        let mut v = Vec::new();
        if !self.self_adjoint {
            v.push(format!("not self-adjoint ({:e})", self.self_adjoint_residual));
        }
        if !self.idempotent {
            v.push(format!("(n/k)R not idempotent ({:e})", self.idempotent_residual));
        }
        if !self.unit_diagonal {
            v.push(format!("diagonal not 1 ({:e})", self.diagonal_residual));
        }
        if !self.rank_n {
            v.push(format!("rank is not n (spectral gap {:.3})", self.spectral_gap));
        }
        v.join("; ")
    }
}

/// Minimum spectral gap separating the `n` unit eigenvalues of `P` from the rest.
const RANK_GAP: f64 = 0.5;

/// Eigenvalues of a Hermitian matrix sorted descending with matching eigenvectors.
pub(crate) fn sorted_eigen<T: Scalar>(m: &DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let eig = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    (vals, eig.eigenvectors.select_columns(&idx))
}

pub fn is_gram_point<T: Scalar>(m: &DMatrix<T>, n: usize, tol: f64) -> Result<GramCheck> {
    let k = m.nrows();
    if m.ncols() != k {
        return Err(Error::Dimension(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    if n == 0 || n >= k {
        return Err(Error::InvalidArgument(format!("need 0 < n < k, got n = {n}, k = {k}")));
    }
    if m.iter().any(|x| !x.is_finite_entry()) {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    let sa = max_abs(&(m - m.adjoint()));
    let p = m.scale(n as f64 / k as f64);
    let idem = max_abs(&(&p * &p - &p));
    let diag = (0..k).map(|i| (m[(i, i)] - T::one()).modulus()).fold(0.0, f64::max);
    let herm = (&p + p.adjoint()).scale(0.5);
    let (vals, _) = sorted_eigen(&herm);
    let gap = vals[n - 1] - vals[n];
    Ok(GramCheck {
        self_adjoint: sa <= tol,
        idempotent: idem <= tol,
        unit_diagonal: diag <= tol,
        rank_n: gap >= RANK_GAP,
        self_adjoint_residual: sa,
        idempotent_residual: idem,
        diagonal_residual: diag,
        spectral_gap: gap,
    })
}

impl<T: Scalar> GramPoint<T> {
    /// Validates `r` as a point of `G(k, n)`.
    pub fn new(r: DMatrix<T>, n: usize, tol: f64) -> Result<Self> {
        let check = is_gram_point(&r, n, tol)?;
        if !check.pass() {
            return Err(Error::NotGramPoint(check.failures()));
        }
        Ok(Self { n, r })
    }

    pub(crate) fn new_unchecked(r: DMatrix<T>, n: usize) -> Self {
        Self { n, r }
    }

    pub fn field(&self) -> Field {
        T::FIELD
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.r.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.r
    }

    /// The projection `P = (n/k)R`.
    pub fn projection(&self) -> DMatrix<T> {
        self.r.scale(self.n as f64 / self.k() as f64)
    }

    /// `A* R A` for the permutation matrix `A` of `perm`: entry `(i, j)` is
    /// `R[perm[i], perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.k())?;
        let r = DMatrix::from_fn(self.k(), self.k(), |i, j| self.r[(perm[i], perm[j])]);
        Ok(Self { n: self.n, r })
    }

    /// `diag(conj zeta) R diag(zeta)`.
    pub fn phased(&self, zeta: &[T]) -> Result<Self> {
        if zeta.len() != self.k() {
            return Err(Error::Dimension(format!("{} phases for k = {}", zeta.len(), self.k())));
        }
        let r = DMatrix::from_fn(self.k(), self.k(), |i, j| zeta[i].conjugate() * self.r[(i, j)] * zeta[j]);
        Ok(Self { n: self.n, r })
    }

    pub fn max_distance(&self, other: &Self) -> f64 {
        max_abs(&(&self.r - &other.r))
    }
}

/// The Gram point `F*F` of a spherical tight frame.
pub fn gram<T: Scalar>(f: &Frame<T>, tol: f64) -> Result<GramPoint<T>> {
    let (n, k) = (f.n(), f.k());
    if k <= n {
        return Err(Error::InvalidArgument(format!("Gram points need k > n, got k = {k}, n = {n}")));
    }
    let worst_norm = f.column_norms().iter().map(|c| (c * c - 1.0).abs()).fold(0.0, f64::max);
    if worst_norm > tol {
        return Err(Error::NotTightFrame(format!("columns are not unit norm (deviation {worst_norm:e})")));
    }
    let t = f.is_tight(tol)?;
    if !t.tight {
        return Err(Error::NotTightFrame(format!(
            "frame bounds ({}, {}) are not equal",
            t.bounds.lower, t.bounds.upper
        )));
    }
    let m = f.matrix();
    Ok(GramPoint::new_unchecked(m.adjoint() * m, n))
}

/// The Naimark complement `(k/(k-n))(I - (n/k)R)`, a point of `G(k, k-n)`.
pub fn complement<T: Scalar>(r: &GramPoint<T>) -> GramPoint<T> {
    let (k, n) = (r.k(), r.n());
    let id = DMatrix::<T>::identity(k, k);
    let m = (id - r.projection()).scale(k as f64 / (k - n) as f64);
    GramPoint::new_unchecked(m, k - n)
}

/// A frame `F` with `F*F = R`: the top `n` eigenvectors of `P` as rows, scaled
/// by `sqrt(k/n)`.
pub fn frame_from_gram<T: Scalar>(r: &GramPoint<T>, tol: f64) -> Result<Frame<T>> {
    let (k, n) = (r.k(), r.n());
    let p = r.projection();
    let herm = (&p + p.adjoint()).scale(0.5);
    let (vals, vecs) = sorted_eigen(&herm);
    let off = vals
        .iter()
        .enumerate()
        .map(|(i, v)| if i < n { (v - 1.0).abs() } else { v.abs() })
        .fold(0.0, f64::max);
    if off > tol.max(1e-12) {
        return Err(Error::NotGramPoint(format!("eigenvalues of P not clustered at 0 and 1 (off by {off:e})")));
    }
    let top = vecs.columns(0, n).adjoint();
    Frame::new(top.scale((k as f64 / n as f64).sqrt()))
}

/// `U` with `G = UF`, and the max-norm residual of that identity.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitWitness<T: Scalar> {
    pub u: DMatrix<T>,
    pub residual: f64,
}

/// Returns a witness `U = (n/k) G F*` when the Gram points of `F` and `G`
/// agree within `tol`.
pub fn same_orbit<T: Scalar>(f: &Frame<T>, g: &Frame<T>, tol: f64) -> Result<Option<OrbitWitness<T>>> {
    if f.n() != g.n() || f.k() != g.k() {
        return Err(Error::Dimension(format!(
            "frames of shape {}x{} and {}x{}",
            f.n(),
            f.k(),
            g.n(),
            g.k()
        )));
    }
    let rf = gram(f, tol)?;
    let rg = gram(g, tol)?;
    if rf.max_distance(&rg) > tol {
        return Ok(None);
    }
    let u = (g.matrix() * f.matrix().adjoint()).scale(f.n() as f64 / f.k() as f64);
    let residual = max_abs(&(&u * f.matrix() - g.matrix()));
    Ok(Some(OrbitWitness { u, residual }))
}

/// The rank-one point `(zeta_{i-1} conj(zeta_{j-1}))` of `G^C(n+1, 1)` with `zeta_0 = 1`.
pub fn torus_point(zeta: &[Complex64], tol: f64) -> Result<GramPoint<Complex64>> {
    if zeta.is_empty() {
        return Err(Error::InvalidArgument("need at least one phase".into()));
    }
    if let Some(j) = zeta.iter().position(|z| (z.norm() - 1.0).abs() > tol) {
        return Err(Error::InvalidArgument(format!("phase {j} is not unimodular")));
    }
    let v: Vec<Complex64> = std::iter::once(Complex64::new(1.0, 0.0)).chain(zeta.iter().copied()).collect();
    let k = v.len();
    Ok(GramPoint::new_unchecked(DMatrix::from_fn(k, k, |i, j| v[i] * v[j].conj()), 1))
}

/// The real one-redundant points and their orbit counts.
#[derive(Debug, Clone)]
pub struct OneRedundant {
    pub points: Vec<GramPoint<f64>>,
    /// Orbits under conjugation by permutation matrices.
    pub permutation_orbits: usize,
    /// Orbits under conjugation by diagonal sign matrices.
    pub sign_orbits: usize,
}

/// All `2^n` points `(n+1) v v^t`, `v = (1, eps_1, ..., eps_n)/sqrt(n+1)`, of
/// `G^R(n+1, 1)`, with orbit counts from canonical forms.
pub fn enumerate_one_redundant(n: usize) -> Result<OneRedundant> {
    if n < 1 || n > 24 {
        return Err(Error::InvalidArgument(format!("n must be in 1..=24, got {n}")));
    }
    let k = n + 1;
    let mut points = Vec::with_capacity(1 << n);
    let mut perm_forms = BTreeSet::new();
    let mut sign_forms = BTreeSet::new();
    for bits in 0u32..(1u32 << n) {
        let s: Vec<f64> = (0..k).map(|i| if i > 0 && bits >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let r = DMatrix::from_fn(k, k, |i, j| s[i] * s[j]);
        let g = GramPoint::new_unchecked(r, 1);
        perm_forms.insert(permutation_canonical(&g));
        sign_forms.insert(sign_canonical(&g));
        points.push(g);
    }
    Ok(OneRedundant { points, permutation_orbits: perm_forms.len(), sign_orbits: sign_forms.len() })
}

/// Sign pattern of the rank-one vector, read from the first row of `R`.
fn sign_pattern(g: &GramPoint<f64>) -> Vec<i8> {
    (0..g.k()).map(|j| if g.matrix()[(0, j)] < 0.0 { -1 } else { 1 }).collect()
}

/// Sorted sign pattern, minimized over the global sign (`v` and `-v` give the same `R`).
fn permutation_canonical(g: &GramPoint<f64>) -> Vec<i8> {
    let mut a = sign_pattern(g);
    let mut b: Vec<i8> = a.iter().map(|x| -x).collect();
    a.sort_unstable();
    b.sort_unstable();
    a.min(b)
}

/// `D R D` with `D` the signs of the vector brings every point to the all-ones matrix.
fn sign_canonical(g: &GramPoint<f64>) -> Vec<i8> {
    let s = sign_pattern(g);
    let k = g.k();
    (0..k * k)
        .map(|idx| {
            let (i, j) = (idx / k, idx % k);
            (g.matrix()[(i, j)] * f64::from(s[i] * s[j])).signum() as i8
        })
        .collect()
}

/// Default bound on consecutive loop points, in max norm.
pub const HOLONOMY_STEP: f64 = 0.2;

/// Smallest acceptable `sigma_min / sigma_max` of an alignment matrix.
const ALIGN_RATIO: f64 = 0.5;

/// Lifts a closed loop of real Gram points to frames by Procrustes
/// continuation and returns `sign det U` where `F_N = U F_0`.
pub fn holonomy_sign(points: &[GramPoint<f64>], tol: f64, max_step: f64) -> Result<i8> {
    let len = points.len();
    if len < 2 {
        return Err(Error::InvalidArgument("a loop needs at least two points".into()));
    }
    let (k, n) = (points[0].k(), points[0].n());
    if let Some(i) = points.iter().position(|p| p.k() != k || p.n() != n) {
        return Err(Error::Dimension(format!("loop point {i} has different (k, n)")));
    }
    let t_of = |i: usize| i as f64 / (len - 1) as f64;
    let closing = points[0].max_distance(&points[len - 1]);
    if closing > tol.max(1e-12) {
        return Err(Error::InvalidArgument(format!("loop is not closed (gap {closing:e})")));
    }
    let mut f = frame_from_gram(&points[0], tol)?.into_matrix();
    let f0 = f.clone();
    for i in 1..len {
        let step = points[i].max_distance(&points[i - 1]);
        if step > max_step {
            return Err(Error::StepTooLarge {
                index: i,
                t: t_of(i),
                reason: format!("Gram step {step:.4} exceeds {max_step}"),
            });
        }
        let g = frame_from_gram(&points[i], tol)?.into_matrix();
        let m = &f * g.transpose();
        let svd = m.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smin < ALIGN_RATIO * smax {
            return Err(Error::StepTooLarge {
                index: i,
                t: t_of(i),
                reason: format!("alignment is ill-conditioned (singular values {smin:.3e}, {smax:.3e})"),
            });
        }
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        f = u * vt * g;
    }
    let u = (&f * f0.transpose()).scale(n as f64 / k as f64);
    let defect = max_abs(&(u.transpose() * &u - DMatrix::<f64>::identity(n, n)));
    if defect > 1e-6 {
        return Err(Error::PathFailed(format!("end frame is not an orthogonal image of the start ({defect:e})")));
    }
    Ok(if u.determinant() < 0.0 { -1 } else { 1 })
}

/// Inserts between consecutive loop points the midpoint pushed back onto the
/// Gram variety (nearest rank-`n` projection, then spherical tight projection).
pub fn refine_loop(points: &[GramPoint<f64>], tol: f64) -> Result<Vec<GramPoint<f64>>> {
    let mut out = Vec::with_capacity(2 * points.len());
    for w in points.windows(2) {
        out.push(w[0].clone());
        let mid = (w[0].matrix() + w[1].matrix()).scale(0.5);
        out.push(reproject(&mid, w[0].n(), tol)?);
    }
    if let Some(last) = points.last() {
        out.push(last.clone());
    }
    Ok(out)
}

/// Nearest Gram point to a symmetric matrix, via frame projection.
pub fn reproject(m: &DMatrix<f64>, n: usize, tol: f64) -> Result<GramPoint<f64>> {
    let k = m.nrows();
    let (_, vecs) = sorted_eigen(&(m + m.transpose()).scale(0.5));
    let f = vecs.columns(0, n).transpose().scale((k as f64 / n as f64).sqrt());
    let f = project_to_stf(&f)?;
    gram(&Frame::new(f)?, tol)
}

/// Gram points over either field, for IO and dispatch.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyGram {
    Real(GramPoint<f64>),
    Complex(GramPoint<Complex64>),
}

impl From<GramPoint<f64>> for AnyGram {
    fn from(g: GramPoint<f64>) -> Self {
        AnyGram::Real(g)
    }
}

impl From<GramPoint<Complex64>> for AnyGram {
    fn from(g: GramPoint<Complex64>) -> Self {
        AnyGram::Complex(g)
    }
}
