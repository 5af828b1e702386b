//! Commutant partitions, orthodecomposability, tangent ranks, dimension
//! formulas, harmonic frames and regular-point construction.

use crate::error::{Error, Result};
use crate::frames::{AnyFrame, Frame};
use crate::grassmann::{gram, sorted_eigen, GramPoint};
use crate::scalar::{max_abs, Field, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// A partition of `{0..k}` with sorted blocks ordered by minimum element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    k: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(k: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; k];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidArgument("empty block".into()));
            }
            for &i in b {
                if i >= k || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidArgument(format!("index {i} repeated or out of range")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument("blocks do not cover 0..k".into()));
        }
        Ok(Self::canonical(k, blocks))
    }

    fn canonical(k: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        Self { k, blocks }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Zero-based blocks.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Connected components of the support graph: `i ~ j` when
/// `|M_ij| > tol * max |M|`.
pub fn commutant_partition<T: Scalar>(m: &DMatrix<T>, tol: f64) -> Partition {
    let k = m.nrows().min(m.ncols());
    let thresh = tol * max_abs(m);
    let mut parent: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in 0..k {
            if i != j && m[(i, j)].modulus() > thresh {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    Partition::canonical(k, blocks)
}

/// `rho_F`, and whether it has more than one block.
pub fn is_orthodecomposable<T: Scalar>(f: &Frame<T>, tol: f64) -> Result<(bool, Partition)> {
    let r = gram(f, tol)?;
    let p = commutant_partition(r.matrix(), tol);
    Ok((p.len() > 1, p))
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Every block size is a multiple of `k / gcd(k, n)`.
pub fn check_block_cardinalities(p: &Partition, k: usize, n: usize) -> bool {
    let kp = k / gcd(k, n);
    p.k == k && p.blocks.iter().all(|b| b.len() % kp == 0)
}

/// Closed-form dimensions of `G`, `F`, `N` and `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dimensions {
    pub dim_g: i64,
    pub dim_f: i64,
    pub dim_n: i64,
    pub dim_m: i64,
}

pub fn expected_dimensions(k: usize, n: usize, field: Field) -> Result<Dimensions> {
    if n < 1 || k <= n {
        return Err(Error::InvalidArgument(format!("need k > n >= 1, got k = {k}, n = {n}")));
    }
    let (k, n) = (k as i64, n as i64);
    let (g, f) = match field {
        Field::R => ((k - n - 1) * (n - 1), (2 * k - n - 2) * (n - 1) / 2),
        Field::C => {
            let g = 2 * n * (k - n) - k + 1;
            (g, g + n * n)
        }
    };
    Ok(Dimensions { dim_g: g, dim_f: f, dim_n: g, dim_m: f })
}

/// Rank of the diagonal-extraction differential at a Gram point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TangentReport {
    pub rank: usize,
    pub regular: bool,
    pub stratum_dim: i64,
    pub ambient_dim: i64,
}

/// Relative cutoff for numerical rank.
pub const RANK_CUTOFF: f64 = 1e-8;

pub fn tangent_report<T: Scalar>(r: &GramPoint<T>, tol: f64) -> Result<TangentReport> {
    let (k, n) = (r.k(), r.n());
    let p = r.projection();
    let (_, u) = sorted_eigen(&(&p + p.adjoint()).scale(0.5));
    let complex = T::FIELD == Field::C;
    let per = if complex { 2 } else { 1 };
    let mut span = DMatrix::<f64>::zeros(k, per * n * (k - n));
    let mut col = 0;
    for a in 0..n {
        for b in n..k {
            for l in 0..k {
                let x = u[(l, a)] * u[(l, b)].conjugate();
                span[(l, col)] = x.real();
                if complex {
                    span[(l, col + 1)] = x.imaginary();
                }
            }
            col += per;
        }
    }
    let sv = span.singular_values();
    let smax = sv.max();
    let rank = sv.iter().filter(|s| **s > smax * RANK_CUTOFF).count();

    let field = T::FIELD;
    let mut stratum_dim = 0;
    for block in commutant_partition(r.matrix(), tol).blocks() {
        let kb = block.len();
        if (kb * n) % k != 0 {
            return Err(Error::NotGramPoint(format!("block of size {kb} has non-integral rank")));
        }
        let nb = kb * n / k;
        stratum_dim += expected_dimensions(kb, nb, field)?.dim_g;
    }
    let ambient = (per * n * (k - n)) as i64;
    Ok(TangentReport { rank, regular: rank == k - 1, stratum_dim, ambient_dim: ambient })
}

/// Rows of the `k x k` unitary DFT for frequencies `0..n`, scaled to unit columns.
pub fn harmonic_frame_complex(k: usize, n: usize) -> Result<Frame<Complex64>> {
    check_kn(k, n)?;
    let s = 1.0 / (n as f64).sqrt();
    Frame::new(DMatrix::from_fn(n, k, |j, t| {
        Complex64::from_polar(s, 2.0 * PI * ((j * t) % k) as f64 / k as f64)
    }))
}

/// Real Fourier rows: cosine/sine pairs at frequencies `1..=n/2`, plus the
/// constant row when `n` is odd, scaled by `sqrt(k/n)`.
pub fn harmonic_frame_real(k: usize, n: usize) -> Result<Frame<f64>> {
    check_kn(k, n)?;
    let (kf, nf) = (k as f64, n as f64);
    let scale = (kf / nf).sqrt();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    if n % 2 == 1 {
        rows.push(vec![scale / kf.sqrt(); k]);
    }
    let c = scale * (2.0 / kf).sqrt();
    for j in 1..=n / 2 {
        let ang = |t: usize| 2.0 * PI * ((j * t) % k) as f64 / kf;
        rows.push((0..k).map(|t| c * ang(t).cos()).collect());
        rows.push((0..k).map(|t| c * ang(t).sin()).collect());
    }
    Frame::new(DMatrix::from_fn(n, k, |r, t| rows[r][t]))
}

pub fn harmonic_frame(k: usize, n: usize, field: Field) -> Result<AnyFrame> {
    Ok(match field {
        Field::R => harmonic_frame_real(k, n)?.into(),
        Field::C => harmonic_frame_complex(k, n)?.into(),
    })
}

fn check_kn(k: usize, n: usize) -> Result<()> {
    if n < 1 || k <= n {
        return Err(Error::InvalidArgument(format!("need k > n >= 1, got k = {k}, n = {n}")));
    }
    Ok(())
}

/// Orthonormal type-II DCT matrix transposed, so its first column is constant.
fn dct2_transposed(d: usize) -> DMatrix<f64> {
    let df = d as f64;
    DMatrix::from_fn(d, d, |j, m| {
        let c = if m == 0 { (1.0 / df).sqrt() } else { (2.0 / df).sqrt() };
        c * (PI * m as f64 * (2 * j + 1) as f64 / (2.0 * df)).cos()
    })
}

/// A real Gram point with trivial commutant partition. For `gcd(k, n) = d > 1`
/// the harmonic point of `G(k/d, n/d)` is repeated in `d` diagonal blocks and
/// the first coordinates of the blocks are mixed by a DCT rotation.
pub fn construct_regular_point(k: usize, n: usize, tol: f64) -> Result<GramPoint<f64>> {
    check_kn(k, n)?;
    let d = gcd(k, n);
    if d == 1 {
        return gram(&harmonic_frame_real(k, n)?, tol);
    }
    let (kp, np) = (k / d, n / d);
    let seed = gram(&harmonic_frame_real(kp, np)?, tol)?;
    let mut r = DMatrix::<f64>::zeros(k, k);
    for b in 0..d {
        r.view_mut((b * kp, b * kp), (kp, kp)).copy_from(seed.matrix());
    }
    // w[j] is the image of basis vector j: the first d go to block heads
    let mut w: Vec<usize> = (0..d).map(|j| j * kp).collect();
    w.extend((0..k).filter(|i| i % kp != 0));
    let mut wm = DMatrix::<f64>::zeros(k, k);
    for (j, &i) in w.iter().enumerate() {
        wm[(i, j)] = 1.0;
    }
    let mut inner = DMatrix::<f64>::identity(k, k);
    inner.view_mut((0, 0), (d, d)).copy_from(&dct2_transposed(d));
    let v = &wm * inner * wm.transpose();
    let s = v.transpose() * r * &v;
    GramPoint::new(s, n, tol.max(1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cross() -> Frame<f64> {
        Frame::from_columns(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap()
    }

    #[test]
    fn partition_of_block_matrix() {
        let mut m = DMatrix::<f64>::zeros(5, 5);
        m[(0, 1)] = 0.5;
        m[(1, 0)] = 0.5;
        m[(2, 3)] = 0.3;
        m[(3, 4)] = 0.3;
        m.fill_diagonal(1.0);
        assert_eq!(commutant_partition(&m, 1e-9).blocks(), &[vec![0, 1], vec![2, 3, 4]]);
    }

    #[test]
    fn partition_of_simplex_and_cross() {
        let s = gram(&crate::frames::simplex_frame(4).unwrap(), 1e-9).unwrap();
        assert!(commutant_partition(s.matrix(), 1e-9).is_trivial());
        let (dec, p) = is_orthodecomposable(&cross(), 1e-9).unwrap();
        assert!(dec);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 3]]);
        assert!(!is_orthodecomposable(&crate::frames::simplex_frame(3).unwrap(), 1e-9).unwrap().0);
        let (dec, p) = is_orthodecomposable(&harmonic_frame_real(4, 2).unwrap(), 1e-9).unwrap();
        assert!(dec);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn block_cardinalities() {
        let p = Partition::new(4, vec![vec![0, 2], vec![1, 3]]).unwrap();
        assert!(check_block_cardinalities(&p, 4, 2));
        let q = Partition::new(5, vec![vec![0, 1], vec![2, 3, 4]]).unwrap();
        assert!(!check_block_cardinalities(&q, 5, 2));
        let r = Partition::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(check_block_cardinalities(&r, 6, 4));
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn dimensions() {
        let d = expected_dimensions(5, 2, Field::R).unwrap();
        assert_eq!((d.dim_g, d.dim_f), (2, 3));
        assert_eq!(expected_dimensions(4, 3, Field::R).unwrap().dim_g, 0);
        let c = expected_dimensions(3, 2, Field::C).unwrap();
        assert_eq!((c.dim_g, c.dim_f), (2, 6));
        assert!(expected_dimensions(2, 2, Field::R).is_err());
    }

    #[test]
    fn tangent_of_simplex() {
        for n in 1..6 {
            let g = gram(&crate::frames::simplex_frame(n).unwrap(), 1e-9).unwrap();
            let t = tangent_report(&g, 1e-9).unwrap();
            assert_eq!((t.rank, t.regular, t.stratum_dim), (n, true, 0));
        }
    }

    #[test]
    fn tangent_of_cross() {
        let g = gram(&cross(), 1e-9).unwrap();
        let t = tangent_report(&g, 1e-9).unwrap();
        assert_eq!((t.rank, t.regular, t.stratum_dim, t.ambient_dim), (2, false, 0, 4));
    }

    #[test]
    fn harmonic_shapes() {
        let m = harmonic_frame_real(3, 2).unwrap();
        for t in 0..3 {
            let a = 2.0 * PI * t as f64 / 3.0;
            assert!((m.matrix()[(0, t)] - a.cos()).abs() < 1e-15);
            assert!((m.matrix()[(1, t)] - a.sin()).abs() < 1e-15);
        }
        let c = harmonic_frame_real(4, 2).unwrap();
        let want = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (t, w) in want.iter().enumerate() {
            assert!((c.matrix()[(0, t)] - w[0]).abs() < 1e-15 && (c.matrix()[(1, t)] - w[1]).abs() < 1e-15);
        }
        for (k, n) in [(5, 2), (7, 3), (9, 4), (6, 5)] {
            assert!(gram(&harmonic_frame_real(k, n).unwrap(), 1e-10).is_ok());
            assert!(gram(&harmonic_frame_complex(k, n).unwrap(), 1e-10).is_ok());
        }
    }

    #[test]
    fn regular_points() {
        for (k, n) in [(4, 2), (6, 3), (6, 4), (8, 6), (9, 3), (5, 2)] {
            let s = construct_regular_point(k, n, 1e-9).unwrap();
            assert!(commutant_partition(s.matrix(), 1e-9).is_trivial(), "({k},{n})");
            assert!(tangent_report(&s, 1e-9).unwrap().regular, "({k},{n})");
        }
    }
}
