//! Seeded random inputs: spherical tight frames, orthogonal and unitary
//! matrices, permutations, phases, planar frames and chains.

use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::grassmann::sorted_eigen;
use crate::scalar::{Field, Scalar};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Scalars that can be drawn from a standard Gaussian.
pub trait Gaussian: Scalar {
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self;
    fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl Gaussian for f64 {
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }

    fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Self {
        if rng.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }
}

impl Gaussian for Complex64 {
    fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) / 2f64.sqrt()
    }

    fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Complex64::from_polar(1.0, rng.random_range(-PI..PI))
    }
}

const STF_ITERS: usize = 500;
const STF_TOL: f64 = 1e-14;
const NEWTON_ITERS: usize = 60;

fn normalize_columns<T: Scalar>(m: &mut DMatrix<T>) -> Result<()> {
    for mut c in m.column_iter_mut() {
        let nrm = c.norm();
        if nrm == 0.0 || !nrm.is_finite() {
            return Err(Error::PathFailed("zero column during frame projection".into()));
        }
        c.unscale_mut(nrm);
    }
    Ok(())
}

/// Column norm defects `|f_j|^2 - 1` followed by the real coordinates of the
/// upper triangle of `FF* - (k/n) I`.
fn stf_residual<T: Scalar>(m: &DMatrix<T>, b: f64) -> DVector<f64> {
    let (n, k) = m.shape();
    let s = m * m.adjoint();
    let mut r: Vec<f64> = m.column_iter().map(|c| c.norm_squared() - 1.0).collect();
    for a in 0..n {
        for c in a..n {
            let z = s[(a, c)].to_c64();
            if a == c {
                r.push(z.re - b);
            } else {
                r.push(z.re);
                if T::FIELD == Field::C {
                    r.push(z.im);
                }
            }
        }
    }
    debug_assert!(r.len() >= k);
    DVector::from_vec(r)
}

/// Jacobian of [`stf_residual`] in the real coordinates of `F` (column-major,
/// real then imaginary part per entry).
fn stf_jacobian<T: Scalar>(m: &DMatrix<T>) -> DMatrix<f64> {
    let (n, k) = m.shape();
    let complex = T::FIELD == Field::C;
    let dirs: Vec<Complex64> = if complex { vec![Complex64::new(1.0, 0.0), Complex64::i()] } else { vec![Complex64::new(1.0, 0.0)] };
    let rows = stf_residual(m, 0.0).len();
    let mut jac = DMatrix::<f64>::zeros(rows, n * k * dirs.len());
    let mut col = 0;
    for j in 0..k {
        for i in 0..n {
            let fij = m[(i, j)].to_c64();
            for &u in &dirs {
                jac[(j, col)] = 2.0 * (fij.conj() * u).re;
                let mut row = k;
                for a in 0..n {
                    for c in a..n {
                        // d(FF*)_{ac} = [a = i] u conj(F_cj) + F_aj conj(u) [c = i]
                        let mut d = Complex64::new(0.0, 0.0);
                        if a == i {
                            d += u * m[(c, j)].to_c64().conj();
                        }
                        if c == i {
                            d += m[(a, j)].to_c64() * u.conj();
                        }
                        jac[(row, col)] = d.re;
                        row += 1;
                        if a != c && complex {
                            jac[(row, col)] = d.im;
                            row += 1;
                        }
                    }
                }
                col += 1;
            }
        }
    }
    jac
}

/// Gauss-Newton with minimum-norm steps; converges where alternating
/// projection crawls (near frames with repeated vectors).
fn newton_polish<T: Scalar>(m: &mut DMatrix<T>, b: f64) -> f64 {
    let (n, k) = m.shape();
    let complex = T::FIELD == Field::C;
    let mut res = stf_residual(m, b).amax();
    for _ in 0..NEWTON_ITERS {
        if res < STF_TOL {
            break;
        }
        let r = stf_residual(m, b);
        let svd = stf_jacobian(m).svd(true, true);
        let cut = svd.singular_values.max() * 1e-12;
        let Ok(step) = svd.solve(&r, cut) else { break };
        let mut idx = 0;
        for j in 0..k {
            for i in 0..n {
                let d = if complex {
                    let z = Complex64::new(step[idx], step[idx + 1]);
                    idx += 2;
                    z
                } else {
                    idx += 1;
                    Complex64::new(step[idx - 1], 0.0)
                };
                m[(i, j)] -= T::from_c64(d).unwrap_or_else(|| T::of_real(d.re));
            }
        }
        let next = stf_residual(m, b).amax();
        if !next.is_finite() || next >= res {
            res = next;
            break;
        }
        res = next;
    }
    res
}

/// Alternating projection onto unit-norm columns and onto tight frames with
/// bound `k/n`, started from `f`, finished by Gauss-Newton when it stalls.
pub fn project_to_stf<T: Scalar>(f: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (n, k) = f.shape();
    if k <= n {
        return Err(Error::InvalidArgument(format!("need k > n, got k = {k}, n = {n}")));
    }
    let bound = k as f64 / n as f64;
    let scale = bound.sqrt();
    let mut m = f.clone();
    for _ in 0..STF_ITERS {
        normalize_columns(&mut m)?;
        let (vals, vecs) = sorted_eigen(&(&m * m.adjoint()));
        if vals[n - 1] <= 0.0 {
            return Err(Error::PathFailed("rank-deficient frame during projection".into()));
        }
        let inv_sqrt = DMatrix::from_diagonal(&DVector::from_iterator(n, vals.iter().map(|v| T::of_real(scale / v.sqrt()))));
        m = &vecs * inv_sqrt * vecs.adjoint() * m;
        let worst = m.column_iter().map(|c| (c.norm() - 1.0).abs()).fold(0.0, f64::max);
        if worst < STF_TOL {
            normalize_columns(&mut m)?;
            return Ok(m);
        }
    }
    let res = newton_polish(&mut m, bound);
    if res < 1e-13 {
        normalize_columns(&mut m)?;
        return Ok(m);
    }
    Err(Error::PathFailed(format!("frame projection did not converge (residual {res:e})")))
}

/// A random spherical tight frame: Gaussian start pushed onto the variety.
pub fn random_stf<T: Gaussian, R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Result<Frame<T>> {
    let start = DMatrix::from_fn(n, k, |_, _| T::gaussian(rng));
    Frame::new(project_to_stf(&start)?)
}

/// A Haar-distributed orthogonal or unitary matrix (QR with phase fix).
pub fn random_unitary<T: Gaussian, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<T> {
    let g = DMatrix::from_fn(n, n, |_, _| T::gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let m = d.modulus();
        let ph = if m == 0.0 { T::one() } else { d.unscale(m) };
        q.column_mut(j).iter_mut().for_each(|x| *x *= ph);
    }
    q
}

pub fn random_permutation<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    p.shuffle(rng);
    p
}

/// Unimodular phases; `+-1` in the real case.
pub fn random_phases<T: Gaussian, R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<T> {
    (0..k).map(|_| T::random_phase(rng)).collect()
}

fn unit<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(-PI..PI))
}

/// Two unit numbers summing to `target` (`|target| <= 2`), in random order.
fn complete_pair<R: Rng + ?Sized>(target: Complex64, rng: &mut R) -> (Complex64, Complex64) {
    let r = target.norm();
    let d = if r > 0.0 { target / r } else { unit(rng) };
    let h = (1.0 - r * r / 4.0).max(0.0).sqrt();
    let off = Complex64::i() * d * h;
    let (a, b) = (target / 2.0 + off, target / 2.0 - off);
    let (a, b) = (a / a.norm(), b / b.norm());
    if rng.random::<bool>() {
        (a, b)
    } else {
        (b, a)
    }
}

/// A random closed unit chain of length `k >= 3`: `k - 2` free links and a
/// completing pair, resampled when the pair cannot close the chain.
pub fn random_chain<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    if k < 3 {
        return Err(Error::InvalidArgument("chains need k >= 3".into()));
    }
    loop {
        let mut w: Vec<Complex64> = (0..k - 2).map(|_| unit(rng)).collect();
        let s: Complex64 = w.iter().sum();
        if s.norm() > 2.0 {
            continue;
        }
        let (a, b) = complete_pair(-s, rng);
        w.push(a);
        w.push(b);
        return Ok(w);
    }
}

/// A random planar frame: `z_j` with `sum z_j^2 = 0`, from a random chain with
/// random square-root signs.
pub fn random_planar<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Vec<Complex64>> {
    Ok(random_chain(k, rng)?
        .into_iter()
        .map(|w| {
            let z = w.sqrt();
            if rng.random::<bool>() {
                z
            } else {
                -z
            }
        })
        .collect())
}
