//! Exact breadth-first search over configurations whose entries are twelfth
//! roots of unity `e^{i pi m / 6}`. A move rotates a nonempty subset by
//! `+-pi/6`; it is allowed when the subset's weights (the entries themselves,
//! or their squares) sum to zero, so every point of the rotation stays in the
//! constraint set.

use num_complex::Complex64;
use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weight {
    Linear,
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Move {
    pub mask: u32,
    pub dir: i8,
}

/// `zeta^m`, `zeta = e^{i pi/6}`, in the integral basis `1, zeta, zeta^2, zeta^3`
/// (`zeta^4 = zeta^2 - 1`).
const ROOTS: [[i64; 4]; 6] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 1, 0], [0, -1, 0, 1]];

fn root(m: u8) -> [i64; 4] {
    let base = ROOTS[(m % 6) as usize];
    if m % 12 < 6 {
        base
    } else {
        base.map(|x| -x)
    }
}

fn weight(m: u8, w: Weight) -> u8 {
    match w {
        Weight::Linear => m % 12,
        Weight::Square => (2 * m) % 12,
    }
}

fn zero_sum(cfg: &[u8], mask: u32, w: Weight) -> bool {
    let mut acc = [0i64; 4];
    for (j, &m) in cfg.iter().enumerate() {
        if mask >> j & 1 == 1 {
            let r = root(weight(m, w));
            for (a, b) in acc.iter_mut().zip(r) {
                *a += b;
            }
        }
    }
    acc == [0; 4]
}

pub(crate) fn apply(cfg: &[u8], mv: Move) -> Vec<u8> {
    cfg.iter()
        .enumerate()
        .map(|(j, &m)| if mv.mask >> j & 1 == 1 { ((m as i16 + mv.dir as i16).rem_euclid(12)) as u8 } else { m })
        .collect()
}

/// Shortest move sequence from `start` to `goal`, or `None` if unreachable.
pub(crate) fn search(start: &[u8], goal: &[u8], w: Weight) -> Option<Vec<Move>> {
    assert_eq!(start.len(), goal.len());
    let k = start.len();
    assert!(k <= 16, "lattice search is meant for short windows");
    let masks: Vec<u32> = (1u32..(1 << k)).collect();
    let mut prev: HashMap<Vec<u8>, (Vec<u8>, Move)> = HashMap::new();
    let mut queue = VecDeque::from([start.to_vec()]);
    let mut seen = std::collections::HashSet::from([start.to_vec()]);
    while let Some(cur) = queue.pop_front() {
        if cur == goal {
            let mut moves = Vec::new();
            let mut at = cur;
            while let Some((p, mv)) = prev.get(&at) {
                moves.push(*mv);
                at = p.clone();
            }
            moves.reverse();
            return Some(moves);
        }
        for &mask in &masks {
            if !zero_sum(&cur, mask, w) {
                continue;
            }
            for dir in [1i8, -1] {
                let mv = Move { mask, dir };
                let next = apply(&cur, mv);
                if seen.insert(next.clone()) {
                    prev.insert(next.clone(), (cur.clone(), mv));
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

pub(crate) fn cis(m: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * m / 6.0)
}

/// Nearest lattice exponent of a unit number, if within `tol`.
pub(crate) fn snap(z: Complex64, tol: f64) -> Option<u8> {
    let m = (z.arg() * 6.0 / PI).round().rem_euclid(12.0) as u8 % 12;
    ((z - cis(m as f64)).norm() <= tol).then_some(m)
}
