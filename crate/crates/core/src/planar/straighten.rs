//! Straightening of closed unit chains to the standard chain.
//!
//! Edges are grouped into consecutive pairs (after a reserved triple when `k`
//! is odd). Each pair sum shrinks linearly to zero along its own direction
//! while the two links follow the elbow over it, which leaves the pair
//! antipodal. The reserved triple absorbs the complementary sum `(1 - t) T_0`:
//! one edge is held fixed and the other two ride an elbow over the remaining
//! difference. Antipodal pairs and the final zero-sum triple are then rotated
//! into place. A triple that lands with reversed orientation is moved to the
//! standard one by an exact lattice path on the first five edges.

use super::lattice::{self, Move, Weight};
use super::{Chain, FramePath, PathBuilder, PathKind};
use crate::error::{Error, Result};
use num_complex::Complex64;

type C = Complex64;

/// Below this clearance from the origin the triple elbow is badly conditioned.
const MIN_CLEARANCE: f64 = 1e-9;

/// Elbow over `q` with bend side `sigma`: two unit links summing to `q`.
fn elbow(q: C, sigma: f64) -> (C, C) {
    elbow_along(q, q / q.norm(), sigma)
}

/// Elbow over `q` measured against the unit direction `d`; continuous as `q`
/// shrinks to zero along `d`.
fn elbow_along(q: C, d: C, sigma: f64) -> (C, C) {
    let r = q.norm();
    let h = (1.0 - r * r / 4.0).max(0.0).sqrt();
    let off = C::i() * d * (sigma * h);
    (q / 2.0 + off, q / 2.0 - off)
}

/// Side of the elbow that reproduces `(a, b)` over `a + b`.
fn bend_side(a: C, b: C) -> f64 {
    let q = a + b;
    let d = q / q.norm();
    if ((a - b) * (C::i() * d).conj()).re >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy)]
struct Pair {
    i: usize,
    sum0: C,
    sigma: f64,
    fixed: bool,
}

impl Pair {
    fn new(w: &[C], i: usize) -> Self {
        let sum0 = w[i] + w[i + 1];
        let fixed = sum0.norm() < 1e-12;
        let sigma = if fixed { 1.0 } else { bend_side(w[i], w[i + 1]) };
        Self { i, sum0, sigma, fixed }
    }

    fn at(&self, w0: &[C], t: f64) -> (C, C) {
        if self.fixed {
            (w0[self.i], w0[self.i + 1])
        } else {
            elbow_along(self.sum0 * (1.0 - t), self.sum0 / self.sum0.norm(), self.sigma)
        }
    }
}

/// One stage of the reserved triple on `[t0, t1]`: edge `pivot` fixed.
#[derive(Debug, Clone, Copy)]
struct TripleStage {
    pivot: usize,
    wa: C,
    t0: f64,
    t1: f64,
    sigma: f64,
}

impl TripleStage {
    fn q(total0: C, wa: C, t: f64) -> C {
        total0 * (1.0 - t) - wa
    }

    fn at(&self, total0: C, t: f64) -> [C; 3] {
        let (b, c) = others(self.pivot);
        let (wb, wc) = elbow(Self::q(total0, self.wa, t), self.sigma);
        let mut out = [C::default(); 3];
        out[self.pivot] = self.wa;
        out[b] = wb;
        out[c] = wc;
        out
    }
}

fn others(p: usize) -> (usize, usize) {
    match p {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Distance from the origin to the segment `[a, b]`.
fn clearance(a: C, b: C) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let s = (-(a.conj() * d).re / len2).clamp(0.0, 1.0);
    (a + d * s).norm()
}

fn plan_triple(tri: [C; 3], total0: C) -> Result<Vec<TripleStage>> {
    let mut stages = Vec::new();
    let mut cur = tri;
    let mut t0 = 0.0;
    let big = total0.norm();
    if big > 2.0 {
        // while |T| >= 2 any pivot keeps |q| >= 1; pick one that ends inside the disc of radius 2
        let ts = 1.0 - 2.0 / big;
        let dir = total0 / big;
        let pivot = (0..3).max_by(|&x, &y| (cur[x] * dir.conj()).re.total_cmp(&(cur[y] * dir.conj()).re)).unwrap();
        let (b, c) = others(pivot);
        let st = TripleStage { pivot, wa: cur[pivot], t0, t1: ts, sigma: bend_side(cur[b], cur[c]) };
        cur = st.at(total0, ts);
        stages.push(st);
        t0 = ts;
    }
    let mut best: Option<(f64, usize)> = None;
    for a in 0..3 {
        let cl = clearance(TripleStage::q(total0, cur[a], t0), TripleStage::q(total0, cur[a], 1.0));
        if best.is_none_or(|(bc, _)| cl > bc) {
            best = Some((cl, a));
        }
    }
    let (cl, pivot) = best.unwrap();
    if cl < MIN_CLEARANCE {
        return Err(Error::PathFailed(format!("no admissible pivot for the reserved triple (clearance {cl:e})")));
    }
    let (b, c) = others(pivot);
    stages.push(TripleStage { pivot, wa: cur[pivot], t0, t1: 1.0, sigma: bend_side(cur[b], cur[c]) });
    Ok(stages)
}

/// The standard chain: `(1, -1, ...)` for even `k`,
/// `(w, conj w, 1, 1, -1, 1, -1, ...)` with `w = e^{2 pi i/3}` for odd `k`.
pub fn standard_chain_exponents(k: usize) -> Vec<u8> {
    if k % 2 == 0 {
        (0..k).map(|j| if j % 2 == 0 { 0 } else { 6 }).collect()
    } else {
        let mut m = vec![4, 8, 0];
        m.extend((3..k).map(|j| if j % 2 == 1 { 0 } else { 6 }));
        m
    }
}

pub fn standard_chain(k: usize) -> Vec<C> {
    standard_chain_exponents(k).into_iter().map(|m| lattice::cis(m as f64)).collect()
}

/// A sampled path of closed chains from `c` to the standard chain.
pub fn chain_straighten(c: &Chain, max_step: f64) -> Result<FramePath> {
    let w0 = c.w.clone();
    let k = w0.len();
    if k < 4 {
        return Err(Error::Unsupported(format!("chain straightening needs k >= 4, got {k}")));
    }
    let odd = k % 2 == 1;
    let first = if odd { 3 } else { 0 };
    let pairs: Vec<Pair> = (first..k).step_by(2).map(|i| Pair::new(&w0, i)).collect();
    let mut b = PathBuilder::new(PathKind::Chain, w0.clone(), max_step)?;

    let set_pairs = |out: &mut Vec<C>, t: f64| {
        for p in &pairs {
            let (x, y) = p.at(&w0, t);
            out[p.i] = x;
            out[p.i + 1] = y;
        }
    };

    if odd {
        let total0 = w0[0] + w0[1] + w0[2];
        for st in plan_triple([w0[0], w0[1], w0[2]], total0)? {
            b.push_segment(|s| {
                let t = st.t0 + s * (st.t1 - st.t0);
                let mut out = w0.clone();
                out[..3].copy_from_slice(&st.at(total0, t));
                set_pairs(&mut out, t);
                out
            })?;
        }
    } else {
        b.push_segment(|t| {
            let mut out = w0.clone();
            set_pairs(&mut out, t);
            out
        })?;
    }

    // rotate antipodal pairs to (1, -1) and the triple so that its third edge is 1
    let mid = b.last().to_vec();
    let angles: Vec<f64> = (0..k)
        .map(|j| {
            if odd && j < 3 {
                mid[2].arg()
            } else {
                let head = if (j - first) % 2 == 0 { j } else { j - 1 };
                mid[head].arg()
            }
        })
        .collect();
    b.push_segment(|s| mid.iter().zip(&angles).map(|(z, a)| z * C::from_polar(1.0, -s * a)).collect())?;

    let target = standard_chain_exponents(k);
    if odd {
        let end = b.last().to_vec();
        let reversed = (end[0] - lattice::cis(8.0)).norm() < 0.1;
        if reversed {
            let mut cfg = target.clone();
            cfg[0] = 8;
            cfg[1] = 4;
            b.replace_last(cfg.iter().map(|&m| lattice::cis(m as f64)).collect())?;
            let moves = lattice::search(&cfg[..5], &target[..5], Weight::Linear)
                .ok_or_else(|| Error::PathFailed("no lattice path for the reversed triple".into()))?;
            push_lattice_moves(&mut b, &mut cfg, &[0, 1, 2, 3, 4], &moves)?;
        }
    }
    b.replace_last(target.iter().map(|&m| lattice::cis(m as f64)).collect())?;
    Ok(b.finish())
}

/// Appends the rotations of `moves` acting on the coordinates `idx` of `cfg`.
pub(crate) fn push_lattice_moves(b: &mut PathBuilder, cfg: &mut [u8], idx: &[usize], moves: &[Move]) -> Result<()> {
    for mv in moves {
        let base: Vec<u8> = cfg.to_vec();
        b.push_segment(|s| {
            base.iter()
                .enumerate()
                .map(|(j, &m)| {
                    let hit = idx.iter().position(|&i| i == j).is_some_and(|p| mv.mask >> p & 1 == 1);
                    lattice::cis(m as f64 + if hit { mv.dir as f64 * s } else { 0.0 })
                })
                .collect()
        })?;
        let sub: Vec<u8> = idx.iter().map(|&i| cfg[i]).collect();
        for (p, m) in lattice::apply(&sub, *mv).into_iter().enumerate() {
            cfg[idx[p]] = m;
        }
    }
    Ok(())
}
