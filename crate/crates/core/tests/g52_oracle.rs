//! Numerical reconstruction of the sixteen 20-gons of G(5,2) from their
//! boundary parametrization. Raw vertices and edges are identified by
//! coincidence of the corresponding planar frames, and the result is compared
//! against the complex built from the transcribed identification lists.

use framelab::cellcomplex::{build_g52, Complex2};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;

type C = Complex64;
type Z = [C; 4];

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn sq(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

fn i_left(t: f64) -> Z {
    let (a, b) = (sq(0.5 + t / 4.0), sq(0.5 - t / 4.0));
    let (p, q) = (sq(0.5 - (t + 1.0) / 4.0), sq(0.5 + (t + 1.0) / 4.0));
    [c(-a, b), c(a, b), c(p, q), c(p, -q)]
}

fn i_mid(t: f64) -> Z {
    let (a, b) = (sq(0.5 + t / 4.0), sq(0.5 - t / 4.0));
    let (p, q) = (sq(0.5 - (t + 1.0) / 4.0), sq(0.5 + (t + 1.0) / 4.0));
    [c(-a, b), c(a, b), c(p, -q), c(-p, -q)]
}

fn i_right(t: f64) -> Z {
    let (a, b) = (sq(0.5 + t / 4.0), sq(0.5 - t / 4.0));
    let (p, q) = (sq(0.5 - (t + 1.0) / 4.0), sq(0.5 + (t + 1.0) / 4.0));
    [c(a, b), c(a, -b), c(p, -q), c(-p, -q)]
}

fn u0(th: f64) -> Z {
    let s3 = 3f64.sqrt() / 2.0;
    [C::from_polar(1.0, th / 2.0 + PI / 4.0), C::from_polar(1.0, th / 2.0 - PI / 4.0), c(0.5, -s3), c(-0.5, -s3)]
}

fn u_minus(th: f64) -> Z {
    let s3 = 3f64.sqrt() / 2.0;
    [c(-0.5, s3), c(0.5, s3), C::from_polar(1.0, th / 2.0 - PI / 4.0), C::from_polar(1.0, th / 2.0 - 3.0 * PI / 4.0)]
}

/// One quarter of the boundary, `lam` in `[0, 5]`.
fn bottom(lam: f64) -> Z {
    let seg = lam.floor().min(4.0);
    let f = lam - seg;
    match seg as u8 {
        0 => i_left(-2.0 + f),
        1 => u_minus(PI * (1.0 - f)),
        2 if f == 0.0 => u_minus(0.0),
        2 => i_mid(-1.0 + f),
        3 => u0(PI * (1.0 - f)),
        _ if f == 0.0 => u0(0.0),
        _ => i_right(f),
    }
}

/// Klein four-group acting by coordinate swaps.
fn act(g: u8, z: Z) -> Z {
    match g {
        0 => z,
        1 => [z[1], z[0], z[2], z[3]],
        2 => [z[0], z[1], z[3], z[2]],
        _ => [z[1], z[0], z[3], z[2]],
    }
}

/// Boundary point of the face `eps`, `x` in `[0, 20]`.
fn walk(eps: &[i8; 4], x: f64) -> Z {
    let z = if x <= 5.0 {
        act(0, bottom(x))
    } else if x <= 10.0 {
        act(2, bottom(10.0 - x))
    } else if x <= 15.0 {
        act(3, bottom(x - 10.0))
    } else {
        act(1, bottom(20.0 - x))
    };
    std::array::from_fn(|j| z[j] * f64::from(eps[j]))
}

/// Same point of the orbit space under rotation and conjugation, after
/// appending the fixed fifth vector `1`.
fn same(a: &Z, b: &Z) -> bool {
    let d = |u: &Z, v: &Z| u.iter().zip(v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let bc = b.map(|x| x.conj());
    d(a, b) < 1e-7 || d(a, &bc) < 1e-7
}

/// Second route: equality of the real 5 x 5 Gram matrices.
fn same_gram(a: &Z, b: &Z) -> bool {
    let g = |z: &Z| -> Vec<f64> {
        let v: Vec<C> = z.iter().copied().chain(std::iter::once(c(1.0, 0.0))).collect();
        let mut out = Vec::with_capacity(25);
        for p in &v {
            for q in &v {
                out.push((p.conj() * q).re);
            }
        }
        out
    };
    g(a).iter().zip(g(b)).all(|(x, y)| (x - y).abs() < 1e-7)
}

fn signs() -> Vec<[i8; 4]> {
    (0..16u32).map(|b| std::array::from_fn(|j| if b >> (3 - j) & 1 == 1 { -1 } else { 1 })).collect()
}

fn face_label(eps: &[i8; 4]) -> String {
    let s: Vec<&str> = eps.iter().map(|&x| if x > 0 { "+" } else { "-" }).collect();
    format!("B({})", s.join(","))
}

/// For face `eps` and boundary position `j`: the vertex label at `j` and the
/// edge label with its walk direction on `[j, j+1]`.
fn cells(c: &Complex2) -> HashMap<([i8; 4], usize), (String, String, i8)> {
    let ends: HashMap<&str, &[String; 2]> = c.edges.iter().map(|e| (e.id.as_str(), &e.ends)).collect();
    let mut out = HashMap::new();
    for eps in signs() {
        let face = c.faces.iter().find(|f| f.id == face_label(&eps)).expect("face present");
        assert_eq!(face.walk.len(), 20);
        for (j, st) in face.walk.iter().enumerate() {
            let e = ends[st.edge.as_str()];
            let v = if st.dir > 0 { &e[0] } else { &e[1] };
            out.insert((eps, j), (v.clone(), st.edge.clone(), st.dir));
        }
    }
    out
}

#[test]
fn boundary_is_continuous_and_on_the_variety() {
    for x in 1..20 {
        let x = x as f64;
        for eps in signs() {
            let a = walk(&eps, x - 1e-12);
            let b = walk(&eps, x + 1e-12);
            let d = a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            assert!(d < 1e-5, "jump {d:e} at x = {x}");
        }
    }
    for eps in signs() {
        for s in 0..=400 {
            let z = walk(&eps, s as f64 / 20.0);
            let sum: C = z.iter().map(|w| w * w).sum();
            assert!((sum + 1.0).norm() < 1e-12);
            assert!(z.iter().all(|w| (w.norm() - 1.0).abs() < 1e-12));
        }
    }
}

#[test]
fn vertex_classes_match_numerics() {
    let c = build_g52().unwrap();
    let cells = cells(&c);
    let raw: Vec<([i8; 4], usize)> = signs().into_iter().flat_map(|e| (0..20).map(move |j| (e, j))).collect();
    let pts: Vec<Z> = raw.iter().map(|(e, j)| walk(e, *j as f64)).collect();
    let mut sizes: HashMap<&str, usize> = HashMap::new();
    for (a, ka) in raw.iter().enumerate() {
        *sizes.entry(cells[ka].0.as_str()).or_default() += 1;
        for (b, kb) in raw.iter().enumerate().take(a) {
            let numeric = same(&pts[a], &pts[b]);
            assert_eq!(numeric, same_gram(&pts[a], &pts[b]));
            assert_eq!(numeric, cells[ka].0 == cells[kb].0, "raw vertices {ka:?} and {kb:?}");
        }
    }
    assert_eq!(sizes.len(), 96);
    let mut hist: HashMap<usize, usize> = HashMap::new();
    for s in sizes.values() {
        *hist.entry(*s).or_default() += 1;
    }
    assert_eq!(hist, HashMap::from([(2, 32), (4, 64)]));
}

#[test]
fn edge_gluings_match_numerics() {
    let c = build_g52().unwrap();
    let cells = cells(&c);
    let raw: Vec<([i8; 4], usize)> = signs().into_iter().flat_map(|e| (0..20).map(move |j| (e, j))).collect();
    let mut glued = 0;
    for (a, ka) in raw.iter().enumerate() {
        let mid = walk(&ka.0, ka.1 as f64 + 0.5);
        let mut partners = 0;
        for (b, kb) in raw.iter().enumerate() {
            if a == b {
                continue;
            }
            let hit = same(&mid, &walk(&kb.0, kb.1 as f64 + 0.5));
            assert_eq!(hit, cells[ka].1 == cells[kb].1, "raw edges {ka:?} and {kb:?}");
            if hit {
                partners += 1;
                let along = same(&walk(&ka.0, ka.1 as f64 + 0.3), &walk(&kb.0, kb.1 as f64 + 0.3));
                let against = same(&walk(&ka.0, ka.1 as f64 + 0.3), &walk(&kb.0, kb.1 as f64 + 0.7));
                assert!(along != against);
                assert_eq!(along, cells[ka].2 == cells[kb].2, "direction of {ka:?} against {kb:?}");
                glued += 1;
            }
        }
        assert_eq!(partners, 1, "raw edge {ka:?}");
    }
    assert_eq!(glued / 2, 160);
}
