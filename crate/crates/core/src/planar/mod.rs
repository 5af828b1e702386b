//! Frames of `k` unit vectors in the plane as unit complex numbers with
//! `sum z_j^2 = 0`, the squaring cover onto closed unit chains, path lifting
//! and explicit connecting paths.

mod lattice;
mod straighten;

use crate::error::{Error, Result};
use crate::frames::Frame;
use lattice::Weight;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub use straighten::{chain_straighten, standard_chain, standard_chain_exponents};

type C = Complex64;

fn cis(theta: f64) -> C {
    C::from_polar(1.0, theta)
}

fn unit_defect(z: &[C]) -> f64 {
    z.iter().map(|x| finite_or_inf((x.norm() - 1.0).abs())).fold(0.0, f64::max)
}

/// Unit complex numbers with vanishing sum of squares.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarFrame {
    pub z: Vec<C>,
}

/// Unit complex numbers with vanishing sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub w: Vec<C>,
}

impl PlanarFrame {
    pub fn new(z: Vec<C>, tol: f64) -> Result<Self> {
        let u = unit_defect(&z);
        if u > tol {
            return Err(Error::NotTightFrame(format!("entries are not unit modulus ({u:e})")));
        }
        let s = finite_or_inf(z.iter().map(|x| x * x).sum::<C>().norm());
        if s > tol {
            return Err(Error::NotTightFrame(format!("sum of squares is {s:e}, not 0")));
        }
        Ok(Self { z })
    }

    pub fn k(&self) -> usize {
        self.z.len()
    }
}

impl Chain {
    pub fn new(w: Vec<C>, tol: f64) -> Result<Self> {
        let u = unit_defect(&w);
        if u > tol {
            return Err(Error::InvalidArgument(format!("chain links are not unit length ({u:e})")));
        }
        let s = finite_or_inf(w.iter().sum::<C>().norm());
        if s > tol {
            return Err(Error::InvalidArgument(format!("chain does not close (gap {s:e})")));
        }
        Ok(Self { w })
    }

    pub fn k(&self) -> usize {
        self.w.len()
    }
}

/// Columns `(x_j, y_j)` become `z_j = x_j + i y_j`.
pub fn to_planar(f: &Frame<f64>, tol: f64) -> Result<PlanarFrame> {
    if f.n() != 2 {
        return Err(Error::Dimension(format!("planar frames need n = 2, got n = {}", f.n())));
    }
    let m = f.matrix();
    PlanarFrame::new((0..f.k()).map(|j| C::new(m[(0, j)], m[(1, j)])).collect(), tol)
}

pub fn from_planar(z: &[C]) -> Result<Frame<f64>> {
    Frame::new(DMatrix::from_fn(2, z.len(), |r, j| if r == 0 { z[j].re } else { z[j].im }))
}

pub fn square_map(z: &PlanarFrame) -> Chain {
    Chain { w: z.z.iter().map(|x| x * x).collect() }
}

/// What a sampled path lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Planar,
    Chain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub z: Vec<C>,
}

/// A sampled homotopy with `t` increasing from 0 to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePath {
    pub kind: PathKind,
    pub k: usize,
    pub samples: Vec<Sample>,
    pub max_step: f64,
}

impl FramePath {
    pub fn start(&self) -> &[C] {
        &self.samples[0].z
    }

    pub fn end(&self) -> &[C] {
        &self.samples[self.samples.len() - 1].z
    }
}

/// Max-norm distance; infinite when any coordinate is not finite.
pub(crate) fn max_dist(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| finite_or_inf((x - y).norm())).fold(0.0, f64::max)
}

fn finite(z: Vec<C>, s: f64) -> Result<Vec<C>> {
    if z.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
        Ok(z)
    } else {
        Err(Error::PathFailed(format!("segment is not finite at s = {s}")))
    }
}

fn finite_or_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Initial uniform subdivision of each segment before bisection.
const SEGMENT_PIECES: usize = 16;
const MAX_DEPTH: u32 = 40;
/// Largest jump tolerated where consecutive segments meet.
const JOIN_TOL: f64 = 1e-9;

/// Concatenates continuous segments `[0, 1] -> C^k`, sampled so that
/// consecutive points are within `max_step`.
pub(crate) struct PathBuilder {
    kind: PathKind,
    max_step: f64,
    pts: Vec<Vec<C>>,
}

impl PathBuilder {
    pub(crate) fn new(kind: PathKind, start: Vec<C>, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0 && max_step < 1.0) {
            return Err(Error::InvalidArgument(format!("max_step must lie in (0, 1), got {max_step}")));
        }
        Ok(Self { kind, max_step, pts: vec![start] })
    }

    pub(crate) fn last(&self) -> &[C] {
        self.pts.last().unwrap()
    }

    pub(crate) fn replace_last(&mut self, z: Vec<C>) -> Result<()> {
        let d = max_dist(self.last(), &z);
        if d > 1e-6 {
            return Err(Error::PathFailed(format!("endpoint snap moved by {d:e}")));
        }
        if self.pts.len() == 1 {
            self.pts.push(z);
        } else {
            *self.pts.last_mut().unwrap() = z;
        }
        Ok(())
    }

    pub(crate) fn push_segment(&mut self, f: impl Fn(f64) -> Vec<C>) -> Result<()> {
        let f0 = finite(f(0.0), 0.0)?;
        let jump = max_dist(self.last(), &f0);
        if jump > JOIN_TOL {
            return Err(Error::PathFailed(format!("segments do not join (gap {jump:e})")));
        }
        let step = self.max_step;
        let mut prev = (0.0, f0);
        for i in 1..=SEGMENT_PIECES {
            let s = i as f64 / SEGMENT_PIECES as f64;
            let next = (s, finite(f(s), s)?);
            self.refine(&f, &prev, &next, step, 0)?;
            prev = next;
        }
        Ok(())
    }

    fn refine(
        &mut self,
        f: &impl Fn(f64) -> Vec<C>,
        a: &(f64, Vec<C>),
        b: &(f64, Vec<C>),
        step: f64,
        depth: u32,
    ) -> Result<()> {
        if depth >= MAX_DEPTH || max_dist(&a.1, &b.1) <= step {
            self.pts.push(b.1.clone());
            return Ok(());
        }
        let s = 0.5 * (a.0 + b.0);
        let m = (s, finite(f(s), s)?);
        self.refine(f, a, &m, step, depth + 1)?;
        self.refine(f, &m, b, step, depth + 1)
    }

    pub(crate) fn finish(mut self) -> FramePath {
        if self.pts.len() == 1 {
            let p = self.pts[0].clone();
            self.pts.push(p);
        }
        let n = self.pts.len() - 1;
        let k = self.pts[0].len();
        let samples = self
            .pts
            .into_iter()
            .enumerate()
            .map(|(i, z)| Sample { t: if i == n { 1.0 } else { i as f64 / n as f64 }, z })
            .collect();
        FramePath { kind: self.kind, k, samples, max_step: self.max_step }
    }
}

/// Below this `|Re(conj(z_prev) r)|` the two square roots are too close to call.
const LIFT_MARGIN: f64 = 0.5;

/// Lifts a chain path through the squaring map starting at `start`.
pub fn lift_path(cp: &FramePath, start: &PlanarFrame, tol: f64) -> Result<FramePath> {
    if cp.kind != PathKind::Chain {
        return Err(Error::InvalidArgument("lift_path needs a chain path".into()));
    }
    if start.k() != cp.k || cp.samples.iter().any(|s| s.z.len() != cp.k) {
        return Err(Error::Dimension(format!("start has {} entries, path has k = {}", start.k(), cp.k)));
    }
    let base = cp.start();
    let mismatch = start.z.iter().zip(base).map(|(z, w)| (z * z - w).norm()).fold(0.0, f64::max);
    if mismatch > tol {
        return Err(Error::InvalidArgument(format!("start does not square to the path start (off by {mismatch:e})")));
    }
    let mut samples = vec![Sample { t: cp.samples[0].t, z: start.z.clone() }];
    for (idx, s) in cp.samples.iter().enumerate().skip(1) {
        let prev = &samples[idx - 1].z;
        let mut z = Vec::with_capacity(cp.k);
        for (j, w) in s.z.iter().enumerate() {
            let r = w.sqrt();
            let dot = (prev[j].conj() * r).re;
            if dot.abs() < LIFT_MARGIN {
                return Err(Error::StepTooLarge {
                    index: idx,
                    t: s.t,
                    reason: format!("square roots of coordinate {j} are nearly equidistant"),
                });
            }
            z.push(if dot >= 0.0 { r } else { -r });
        }
        samples.push(Sample { t: s.t, z });
    }
    Ok(FramePath { kind: PathKind::Planar, k: cp.k, samples, max_step: cp.max_step })
}

/// Which check a path violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Modulus,
    Constraint,
    Step,
    Parameter,
    StartPoint,
    EndPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub index: usize,
    pub t: f64,
    pub coordinate: Option<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    pub valid: bool,
    pub max_modulus_error: f64,
    pub max_constraint_error: f64,
    pub max_step_seen: f64,
    /// The first failing check, or the worst modulus/constraint deviation when valid.
    pub worst: Option<Violation>,
}

/// Checks unit modulus, the constraint, the step bound, the parameter and,
/// when given, the declared endpoints.
pub fn validate_path(p: &FramePath, tol: f64, endpoints: Option<(&[C], &[C])>) -> PathReport {
    let mut fail: Option<Violation> = None;
    let note = |v: Violation, fail: &mut Option<Violation>| {
        if fail.is_none() {
            *fail = Some(v);
        }
    };
    let mut worst_dev: Option<Violation> = None;
    let (mut mod_err, mut con_err, mut step_seen) = (0.0_f64, 0.0_f64, 0.0_f64);
    let slack = 1e-12;
    if p.samples.is_empty() {
        return PathReport {
            valid: false,
            max_modulus_error: 0.0,
            max_constraint_error: 0.0,
            max_step_seen: 0.0,
            worst: Some(Violation { kind: ViolationKind::Parameter, index: 0, t: 0.0, coordinate: None, value: 0.0 }),
        };
    }
    for (i, s) in p.samples.iter().enumerate() {
        if s.z.len() != p.k {
            note(Violation { kind: ViolationKind::Parameter, index: i, t: s.t, coordinate: None, value: s.z.len() as f64 }, &mut fail);
            continue;
        }
        for (j, z) in s.z.iter().enumerate() {
            let e = finite_or_inf((z.norm() - 1.0).abs());
            if e > mod_err {
                mod_err = e;
                if worst_dev.as_ref().is_none_or(|w| e > w.value) {
                    worst_dev = Some(Violation { kind: ViolationKind::Modulus, index: i, t: s.t, coordinate: Some(j), value: e });
                }
            }
            if e > tol {
                note(Violation { kind: ViolationKind::Modulus, index: i, t: s.t, coordinate: Some(j), value: e }, &mut fail);
            }
        }
        let c = match p.kind {
            PathKind::Planar => s.z.iter().map(|x| x * x).sum::<C>().norm(),
            PathKind::Chain => s.z.iter().sum::<C>().norm(),
        };
        let c = finite_or_inf(c);
        if c > con_err {
            con_err = c;
            if worst_dev.as_ref().is_none_or(|w| c > w.value) {
                worst_dev = Some(Violation { kind: ViolationKind::Constraint, index: i, t: s.t, coordinate: None, value: c });
            }
        }
        if c > tol {
            note(Violation { kind: ViolationKind::Constraint, index: i, t: s.t, coordinate: None, value: c }, &mut fail);
        }
        if i > 0 {
            let prev = &p.samples[i - 1];
            let d = max_dist(&prev.z, &s.z);
            step_seen = step_seen.max(d);
            if d > p.max_step + slack {
                note(Violation { kind: ViolationKind::Step, index: i, t: s.t, coordinate: None, value: d }, &mut fail);
            }
            if !(s.t > prev.t) {
                note(Violation { kind: ViolationKind::Parameter, index: i, t: s.t, coordinate: None, value: s.t }, &mut fail);
            }
        }
    }
    let last = p.samples.len() - 1;
    if p.samples[0].t != 0.0 || p.samples[last].t != 1.0 || last == 0 {
        note(Violation { kind: ViolationKind::Parameter, index: 0, t: p.samples[0].t, coordinate: None, value: p.samples[last].t }, &mut fail);
    }
    if let Some((a, b)) = endpoints {
        let da = if a.len() == p.k { max_dist(a, p.start()) } else { f64::INFINITY };
        if da > tol {
            note(Violation { kind: ViolationKind::StartPoint, index: 0, t: 0.0, coordinate: None, value: da }, &mut fail);
        }
        let db = if b.len() == p.k { max_dist(b, p.end()) } else { f64::INFINITY };
        if db > tol {
            note(Violation { kind: ViolationKind::EndPoint, index: last, t: 1.0, coordinate: None, value: db }, &mut fail);
        }
    }
    PathReport {
        valid: fail.is_none(),
        max_modulus_error: mod_err,
        max_constraint_error: con_err,
        max_step_seen: step_seen,
        worst: fail.or(worst_dev),
    }
}

type Leg = Box<dyn Fn(f64) -> Vec<C>>;

/// The two legs from `b = (1, i, 1, i)` to `a = (1, -i, 1, -i)`, through
/// `(-1, -i, 1, i)`. Each leg is parameterized over `[0, 1]`.
fn case1_legs() -> Vec<Leg> {
    let i = C::i();
    let one = C::new(1.0, 0.0);
    vec![
        Box::new(move |s| {
            let e = cis(PI * s);
            vec![e, i * e, one, i]
        }),
        Box::new(move |s| {
            let e = cis(PI * s);
            vec![-e, -i, one, i * e]
        }),
    ]
}

/// The five legs from `b = (e^{i pi/3}, e^{-i pi/3}, 1, 1, i)` to
/// `a = (e^{-i pi/3}, e^{i pi/3}, 1, 1, -i)`.
fn case3_legs() -> Vec<Leg> {
    let one = C::new(1.0, 0.0);
    let p3 = PI / 3.0;
    vec![
        Box::new(move |s| {
            let th = s * p3;
            vec![cis(p3), cis(-p3), cis(th), one, C::i() * cis(th)]
        }),
        Box::new(move |s| {
            let th = s * 4.0 * p3;
            vec![cis(th + p3), cis(-p3), cis(p3), one, cis(th + 5.0 * PI / 6.0)]
        }),
        Box::new(move |s| {
            let th = s * PI / 6.0;
            vec![cis(-p3), cis(th - p3), cis(p3), one, cis(th + PI / 6.0)]
        }),
        Box::new(move |s| {
            let th = s * PI / 2.0;
            vec![cis(-p3), cis(th - PI / 6.0), cis(th + p3), one, cis(p3)]
        }),
        Box::new(move |s| {
            let th = s * 7.0 * PI / 6.0;
            vec![cis(-p3), cis(p3), cis(th + 5.0 * PI / 6.0), one, cis(th + p3)]
        }),
    ]
}

fn legs_path(legs: &[Leg], max_step: f64) -> Result<FramePath> {
    let mut b = PathBuilder::new(PathKind::Planar, legs[0](0.0), max_step)?;
    for leg in legs {
        b.push_segment(leg)?;
    }
    Ok(b.finish())
}

/// The explicit `k = 4` path from `b` to `a`.
pub fn case1_explicit_path(max_step: f64) -> Result<FramePath> {
    legs_path(&case1_legs(), max_step)
}

/// The explicit `k = 5` path from `b` to `a`.
pub fn case3_explicit_path(max_step: f64) -> Result<FramePath> {
    legs_path(&case3_legs(), max_step)
}

/// Lattice exponents of the canonical fiber element `b`:
/// `(1, i, 1, i, ...)` for even `k`, `(e^{i pi/3}, e^{-i pi/3}, 1, 1, i, 1, i, ...)` for odd `k`.
pub fn canonical_b_exponents(k: usize) -> Vec<u8> {
    if k % 2 == 0 {
        (0..k).map(|j| if j % 2 == 0 { 0 } else { 3 }).collect()
    } else {
        let mut m = vec![2, 10, 0];
        m.extend((3..k).map(|j| if j % 2 == 1 { 0 } else { 3 }));
        m
    }
}

pub fn canonical_b(k: usize) -> Vec<C> {
    canonical_b_exponents(k).into_iter().map(|m| lattice::cis(m as f64)).collect()
}

const A4: [u8; 4] = [0, 9, 0, 9];
const A5: [u8; 5] = [10, 2, 0, 0, 9];

/// Tolerance for recognizing the lifted endpoint as a fiber element.
const FIBER_SNAP: f64 = 1e-6;

/// Moves the coordinates `idx` of `cfg` (a fiber element of the window) to `goal`.
fn connect_window(b: &mut PathBuilder, cfg: &mut [u8], idx: &[usize], goal: &[u8]) -> Result<()> {
    let sub: Vec<u8> = idx.iter().map(|&i| cfg[i]).collect();
    if sub == goal {
        return Ok(());
    }
    let legs = match (sub.as_slice(), idx.len()) {
        (s, 4) if s == A4 && goal == canonical_b_exponents(4) => Some(case1_legs()),
        (s, 5) if s == A5 && goal == canonical_b_exponents(5) => Some(case3_legs()),
        _ => None,
    };
    if let Some(legs) = legs {
        let base: Vec<C> = cfg.iter().map(|&m| lattice::cis(m as f64)).collect();
        for leg in legs.iter().rev() {
            b.push_segment(|s| {
                let mut out = base.clone();
                for (p, v) in leg(1.0 - s).into_iter().enumerate() {
                    out[idx[p]] = v;
                }
                out
            })?;
        }
        for (p, &g) in goal.iter().enumerate() {
            cfg[idx[p]] = g;
        }
        return Ok(());
    }
    let moves = lattice::search(&sub, goal, Weight::Square)
        .ok_or_else(|| Error::PathFailed(format!("fiber element {sub:?} not connected to {goal:?}")))?;
    straighten::push_lattice_moves(b, cfg, idx, &moves)
}

/// A path from `z` to the canonical element `b`: straighten the squared chain,
/// lift it from `z`, then connect inside the fiber over the standard chain,
/// window by window from the left.
pub fn connect_to_standard(z: &PlanarFrame, max_step: f64, tol: f64) -> Result<FramePath> {
    let k = z.k();
    if k < 4 {
        return Err(Error::Unsupported(format!("planar connection needs k >= 4, got {k}")));
    }
    let cp = chain_straighten(&square_map(z), max_step)?;
    let lifted = lift_path(&cp, z, tol.max(1e-12))?;
    let mut b = PathBuilder::new(PathKind::Planar, z.z.clone(), max_step)?;
    for s in &lifted.samples[1..] {
        b.pts.push(s.z.clone());
    }
    let mut cfg = Vec::with_capacity(k);
    for (j, x) in lifted.end().iter().enumerate() {
        cfg.push(lattice::snap(*x, FIBER_SNAP).ok_or_else(|| {
            Error::PathFailed(format!("lifted endpoint coordinate {j} is not a fiber element"))
        })?);
    }
    b.replace_last(cfg.iter().map(|&m| lattice::cis(m as f64)).collect())?;

    let goal = canonical_b_exponents(k);
    if k % 2 == 0 {
        for w in (0..k - 2).step_by(2) {
            let idx = [w, w + 1, w + 2, w + 3];
            connect_window(&mut b, &mut cfg, &idx, &goal[..4])?;
        }
    } else {
        connect_window(&mut b, &mut cfg, &[0, 1, 2, 3, 4], &goal[..5])?;
        for j in (5..k).step_by(2) {
            let idx = [0, 1, 2, j, j + 1];
            connect_window(&mut b, &mut cfg, &idx, &goal[..5])?;
        }
    }
    b.replace_last(canonical_b(k))?;
    Ok(b.finish())
}
