//! Reference values used by the acceptance suite, written out independently of
//! the `framelab` implementation.

use num_complex::Complex64;
use std::f64::consts::PI;

pub type C = Complex64;

/// Dimension of a regular stratum of real STF Gram points, `(k - n - 1)(n - 1)`.
pub fn real_regular_dim(k: usize, n: usize) -> i64 {
    let (k, n) = (k as i64, n as i64);
    (k - n - 1) * (n - 1)
}

/// Dimension of a regular stratum of complex STF Gram points, `2n(k - n) - k + 1`.
pub fn complex_regular_dim(k: usize, n: usize) -> i64 {
    let (k, n) = (k as i64, n as i64);
    2 * n * (k - n) - k + 1
}

/// Stated number of permutation orbits of the 1-redundant real points in `R^n`.
pub fn one_redundant_orbits(n: usize) -> usize {
    n / 2 + 1
}

/// Frame bound of the unit-norm simplex in `R^n`.
pub fn simplex_bound(n: usize) -> f64 {
    (n as f64 + 1.0) / n as f64
}

/// Coprime `(k, n)` pairs sampled for the regular dimension check.
pub const COPRIME_PAIRS: [(usize, usize); 7] = [(3, 2), (4, 3), (5, 2), (5, 3), (5, 4), (7, 3), (7, 4)];

fn cis(t: f64) -> C {
    C::from_polar(1.0, t)
}

/// Waypoints of the explicit four-vector path between the two tight points.
pub fn case1_waypoints() -> Vec<Vec<C>> {
    let (one, i) = (C::new(1.0, 0.0), C::i());
    vec![vec![one, i, one, i], vec![-one, -i, one, i], vec![one, -i, one, -i]]
}

/// Waypoints of the explicit five-vector path.
pub fn case3_waypoints() -> Vec<Vec<C>> {
    let (one, i) = (C::new(1.0, 0.0), C::i());
    let p3 = PI / 3.0;
    vec![
        vec![cis(p3), cis(-p3), one, one, i],
        vec![cis(p3), cis(-p3), cis(p3), one, cis(5.0 * PI / 6.0)],
        vec![cis(-p3), cis(-p3), cis(p3), one, cis(PI / 6.0)],
        vec![cis(-p3), cis(-PI / 6.0), cis(p3), one, cis(p3)],
        vec![cis(-p3), cis(p3), cis(5.0 * PI / 6.0), one, cis(p3)],
        vec![cis(-p3), cis(p3), one, one, -i],
    ]
}

/// Surface data expected of the G(5,2) complex: `(v, e, f)`, Euler
/// characteristic and orientable genus.
pub const G52_CELLS: (usize, usize, usize) = (96, 160, 16);
pub const G52_EULER: i64 = -48;
pub const G52_GENUS: i64 = 25;
