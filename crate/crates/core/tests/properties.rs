use framelab::cellcomplex::{build_g52, g52_recipe, surface_report};
use framelab::frames::simplex_frame;
use framelab::grassmann::{complement, frame_from_gram, gram, holonomy_sign, refine_loop, GramPoint, HOLONOMY_STEP};
use framelab::io::FrameJson;
use framelab::planar::{
    canonical_b, case1_explicit_path, chain_straighten, connect_to_standard, from_planar, lift_path, square_map,
    validate_path, Chain, FramePath, PathKind, PlanarFrame,
};
use framelab::sampling::{
    project_to_stf, random_chain, random_permutation, random_phases, random_planar, random_stf, random_unitary, rng,
    Gaussian,
};
use framelab::stratification::{
    check_block_cardinalities, commutant_partition, expected_dimensions, gcd, harmonic_frame_complex,
    harmonic_frame_real, tangent_report,
};
use framelab::{AnyFrame, Frame, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use std::collections::BTreeSet;

type C = Complex64;

fn max_abs<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.iter().map(|x| x.modulus()).fold(0.0, f64::max)
}

/// (k, n) with k > n >= 1 and k small enough for quick eigen work.
fn kn() -> impl Strategy<Value = (usize, usize)> {
    (1usize..5).prop_flat_map(|n| (n + 1..n + 5).prop_map(move |k| (k, n)))
}

fn stf<T: Gaussian>(k: usize, n: usize, seed: u64) -> Frame<T> {
    random_stf(k, n, &mut rng(seed)).unwrap()
}

fn gram_of<T: Scalar>(f: &Frame<T>) -> GramPoint<T> {
    gram(f, 1e-9).unwrap()
}

fn frame_props<T: Gaussian>(k: usize, n: usize, seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed ^ 0x5eed);
    let f: Frame<T> = stf(k, n, seed);
    let g = f.matrix().adjoint() * f.matrix();
    for j in 0..k {
        prop_assert!((g[(j, j)].modulus() - 1.0) < 1e-12);
    }
    let b0 = f.frame_bounds().unwrap();
    let u: DMatrix<T> = random_unitary(n, &mut r);
    let perm = random_permutation(k, &mut r);
    let zeta: Vec<T> = random_phases(k, &mut r);
    for h in [f.act_orthogonal(&u, 1e-9).unwrap(), f.act_permutation(&perm).unwrap(), f.act_phases(&zeta, 1e-9).unwrap()] {
        let b = h.frame_bounds().unwrap();
        prop_assert!((b.lower - b0.lower).abs() < 1e-10 && (b.upper - b0.upper).abs() < 1e-10);
    }
    Ok(())
}

/// Tightness decided entrywise on `FF*`.
fn tight_entrywise<T: Scalar>(f: &Frame<T>, tol: f64) -> bool {
    let s = f.frame_operator();
    let n = f.n();
    let b = (0..n).map(|i| s[(i, i)].real()).sum::<f64>() / n as f64;
    let d = &s - DMatrix::<T>::identity(n, n).scale(b);
    max_abs(&d) <= tol * b
}

fn gram_props<T: Gaussian>(k: usize, n: usize, seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed ^ 0xabc);
    let f: Frame<T> = stf(k, n, seed);
    let g = gram_of(&f);
    let u: DMatrix<T> = random_unitary(n, &mut r);
    let go = gram_of(&f.act_orthogonal(&u, 1e-9).unwrap());
    prop_assert!(go.max_distance(&g) < 1e-10);

    let cc = complement(&complement(&g));
    prop_assert!(cc.max_distance(&g) < 1e-12);

    let perm = random_permutation(k, &mut r);
    let gp = gram_of(&f.act_permutation(&perm).unwrap());
    let zeta: Vec<T> = random_phases(k, &mut r);
    let gz = gram_of(&f.act_phases(&zeta, 1e-9).unwrap());
    for i in 0..k {
        for j in 0..k {
            let want = g.matrix()[(perm[i], perm[j])];
            prop_assert!((gp.matrix()[(i, j)] - want).modulus() < 1e-12);
            let want = zeta[i].conjugate() * g.matrix()[(i, j)] * zeta[j];
            prop_assert!((gz.matrix()[(i, j)] - want).modulus() < 1e-12);
        }
    }
    // the complement intertwines both actions
    let (c, cp, cz) = (complement(&g), complement(&gp), complement(&gz));
    for i in 0..k {
        for j in 0..k {
            prop_assert!((cp.matrix()[(i, j)] - c.matrix()[(perm[i], perm[j])]).modulus() < 1e-12);
            let want = zeta[i].conjugate() * c.matrix()[(i, j)] * zeta[j];
            prop_assert!((cz.matrix()[(i, j)] - want).modulus() < 1e-12);
        }
    }

    let h = frame_from_gram(&g, 1e-9).unwrap();
    let s = h.frame_operator() - DMatrix::<T>::identity(n, n).scale(k as f64 / n as f64);
    prop_assert!(max_abs(&s) < 1e-9);
    prop_assert!(gram_of(&h).max_distance(&g) < 1e-9);
    Ok(())
}

/// `d` copies of a random spherical tight frame placed on orthogonal subspaces.
fn block_frame(kp: usize, np: usize, d: usize, seed: u64) -> Frame<f64> {
    let mut m = DMatrix::<f64>::zeros(np * d, kp * d);
    for b in 0..d {
        let f: Frame<f64> = stf(kp, np, seed.wrapping_add(b as u64));
        m.view_mut((b * np, b * kp), (np, kp)).copy_from(f.matrix());
    }
    Frame::new(m).unwrap()
}

fn relabel(blocks: &[Vec<usize>], perm: &[usize]) -> BTreeSet<BTreeSet<usize>> {
    blocks.iter().map(|b| b.iter().map(|&i| perm[i]).collect()).collect()
}

fn chain_path_close(p: &FramePath, tol: f64) -> bool {
    p.samples.iter().all(|s| s.z.iter().sum::<C>().norm() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn frames_unit_diagonal_and_action_invariant_bounds((k, n) in kn(), seed in any::<u64>()) {
        frame_props::<f64>(k, n, seed)?;
        frame_props::<C>(k, n, seed)?;
    }

    #[test]
    fn tightness_matches_entrywise_check((k, n) in kn(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let f: Frame<f64> = stf(k, n, seed);
        prop_assert_eq!(f.is_tight(1e-9).unwrap().tight, tight_entrywise(&f, 1e-9));
        let g = Frame::new(DMatrix::from_fn(n, k, |_, _| f64::gaussian(&mut r))).unwrap();
        prop_assert_eq!(g.is_tight(1e-9).unwrap().tight, tight_entrywise(&g, 1e-9));
        let h: Frame<C> = stf(k, n, seed);
        prop_assert_eq!(h.is_tight(1e-9).unwrap().tight, tight_entrywise(&h, 1e-9));
    }

    #[test]
    fn gram_equivariance_and_complement((k, n) in kn(), seed in any::<u64>()) {
        gram_props::<f64>(k, n, seed)?;
        gram_props::<C>(k, n, seed)?;
    }

    #[test]
    fn partition_relabels_under_permutation(k in 2usize..12, seed in any::<u64>(), density in 0.0f64..0.4) {
        let mut r = rng(seed);
        let mut m = DMatrix::<f64>::identity(k, k);
        for i in 0..k {
            for j in 0..i {
                if rand::Rng::random::<f64>(&mut r) < density {
                    let x = f64::gaussian(&mut r);
                    m[(i, j)] = x;
                    m[(j, i)] = x;
                }
            }
        }
        let perm = random_permutation(k, &mut r);
        let pm = DMatrix::from_fn(k, k, |i, j| m[(perm[i], perm[j])]);
        let a = commutant_partition(&m, 1e-9);
        let b = commutant_partition(&pm, 1e-9);
        prop_assert_eq!(relabel(b.blocks(), &perm), relabel(a.blocks(), &(0..k).collect::<Vec<_>>()));
    }

    #[test]
    fn blocks_count_matches_tangent_corank(kp in 2usize..5, np in 1usize..3, d in 1usize..4, seed in any::<u64>()) {
        prop_assume!(kp > np);
        let mut r = rng(seed);
        let f = block_frame(kp, np, d, seed).act_permutation(&random_permutation(kp * d, &mut r)).unwrap();
        let g = gram_of(&f);
        let p = commutant_partition(g.matrix(), 1e-9);
        let t = tangent_report(&g, 1e-9).unwrap();
        prop_assert_eq!(p.len(), g.k() - t.rank);
        prop_assert!(check_block_cardinalities(&p, g.k(), g.n()));
        // rank is unchanged by a further relabeling of the frame vectors
        let perm = random_permutation(g.k(), &mut r);
        let t2 = tangent_report(&gram_of(&f.act_permutation(&perm).unwrap()), 1e-9).unwrap();
        prop_assert_eq!(t.rank, t2.rank);
    }

    #[test]
    fn coprime_perturbed_harmonic_points_are_regular((k, n) in kn(), seed in any::<u64>()) {
        prop_assume!(gcd(k, n) == 1);
        let mut r = rng(seed);
        let hr = harmonic_frame_real(k, n).unwrap().into_matrix()
            + DMatrix::from_fn(n, k, |_, _| 0.05 * f64::gaussian(&mut r));
        let gr = gram_of(&Frame::new(project_to_stf(&hr).unwrap()).unwrap());
        let hc = harmonic_frame_complex(k, n).unwrap().into_matrix()
            + DMatrix::from_fn(n, k, |_, _| C::gaussian(&mut r) * 0.05);
        let gc = gram_of(&Frame::new(project_to_stf(&hc).unwrap()).unwrap());
        for (t, field) in [
            (tangent_report(&gr, 1e-9).unwrap(), framelab::Field::R),
            (tangent_report(&gc, 1e-9).unwrap(), framelab::Field::C),
        ] {
            prop_assert!(t.regular);
            prop_assert_eq!(t.rank, k - 1);
            prop_assert_eq!(t.stratum_dim, expected_dimensions(k, n, field).unwrap().dim_g);
        }
    }

    #[test]
    fn rotation_keeps_planar_frames_valid(k in 3usize..10, seed in any::<u64>(), theta in -10.0f64..10.0) {
        let z = random_planar(k, &mut rng(seed)).unwrap();
        let rot: Vec<C> = z.iter().map(|x| x * C::from_polar(1.0, theta)).collect();
        prop_assert!(PlanarFrame::new(rot, 1e-12).is_ok());
    }

    #[test]
    fn lift_projects_back_to_the_chain_path(k in 4usize..9, seed in any::<u64>()) {
        let tol = 1e-9;
        let z = random_planar(k, &mut rng(seed)).unwrap();
        let pf = PlanarFrame::new(z, tol).unwrap();
        let cp = chain_straighten(&square_map(&pf), 0.05).unwrap();
        let lifted = lift_path(&cp, &pf, tol).unwrap();
        prop_assert_eq!(lifted.samples.len(), cp.samples.len());
        for (a, b) in lifted.samples.iter().zip(&cp.samples) {
            for (x, w) in a.z.iter().zip(&b.z) {
                prop_assert!((x * x - w).norm() <= 2.0 * tol);
            }
        }
    }

    #[test]
    fn connection_starts_at_input_and_ends_at_b(k in 4usize..9, seed in any::<u64>()) {
        let z = random_planar(k, &mut rng(seed)).unwrap();
        let p = connect_to_standard(&PlanarFrame::new(z.clone(), 1e-9).unwrap(), 0.05, 1e-9).unwrap();
        prop_assert_eq!(p.start(), &z[..]);
        let b = canonical_b(k);
        let r = validate_path(&p, 1e-6, Some((&z, &b)));
        prop_assert!(r.valid, "{:?}", r);
    }

    #[test]
    fn frame_json_round_trips_exactly((k, n) in kn(), seed in any::<u64>()) {
        for f in [AnyFrame::Real(stf(k, n, seed)), AnyFrame::Complex(stf(k, n, seed))] {
            let s = serde_json::to_string(&FrameJson::from_any(&f)).unwrap();
            let back: FrameJson = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back.to_frame().unwrap(), f);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn holonomy_sign_survives_refinement(seed in any::<u64>(), phi in -3.0f64..3.0) {
        let mut r = rng(seed);
        let perm = random_permutation(4, &mut r);
        let eps: Vec<f64> = random_phases(4, &mut r);
        let path = case1_explicit_path(0.05).unwrap();
        let pts: Vec<GramPoint<f64>> = path
            .samples
            .iter()
            .map(|s| {
                let z: Vec<C> = (0..4).map(|j| s.z[perm[j]] * eps[j] * C::from_polar(1.0, phi)).collect();
                gram_of(&from_planar(&z).unwrap())
            })
            .collect();
        let s = holonomy_sign(&pts, 1e-9, HOLONOMY_STEP).unwrap();
        prop_assert_eq!(s, -1);
        let fine = refine_loop(&pts, 1e-9).unwrap();
        prop_assert_eq!(holonomy_sign(&fine, 1e-9, HOLONOMY_STEP).unwrap(), s);
        let doubled: Vec<GramPoint<f64>> = pts.iter().chain(pts.iter().skip(1)).cloned().collect();
        prop_assert_eq!(holonomy_sign(&doubled, 1e-9, HOLONOMY_STEP).unwrap(), 1);
    }
}

#[test]
fn simplex_gram_closed_form() {
    for n in 1..=30 {
        let f = simplex_frame(n).unwrap();
        let g = f.matrix().transpose() * f.matrix();
        let nf = n as f64;
        let k = n + 1;
        let want = DMatrix::from_fn(k, k, |i, j| (nf + 1.0) / nf * (if i == j { 1.0 } else { 0.0 } - 1.0 / (nf + 1.0)));
        assert!((g - want).amax() < 1e-12, "n = {n}");
    }
}

#[test]
fn straightening_keeps_chains_closed() {
    let mut r = rng(2024);
    for k in 4..=10 {
        for _ in 0..100 {
            let w = random_chain(k, &mut r).unwrap();
            let p = chain_straighten(&Chain::new(w, 1e-9).unwrap(), 0.05).unwrap();
            assert_eq!(p.kind, PathKind::Chain);
            assert!(chain_path_close(&p, 1e-9), "k = {k}");
            assert!(validate_path(&p, 1e-9, None).valid);
        }
    }
}

#[test]
fn g52_is_closed_with_single_cycle_links() {
    let r = surface_report(&build_g52().unwrap()).unwrap();
    assert!(r.closed_surface);
    let recipe = g52_recipe();
    let sizes: Vec<usize> = recipe.vertex_classes.iter().map(|c| c.members.len()).collect();
    assert_eq!(sizes, vec![2, 4, 4, 4, 4, 2]);
}
