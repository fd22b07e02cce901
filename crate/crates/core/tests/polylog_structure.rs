//! Worked examples on the polylogarithm structure `H(z)` and on the random
//! Hodge-Tate family that the acceptance criteria do not spell out.

mod common;

use std::f64::consts::PI;

use mixed_hodge::deligne::{delta_splitting, Tolerances};
use mixed_hodge::framed::{conjugate_framed, dual_framed, frame_elements, twist_framed, HeightData};
use mixed_hodge::linalg::{c, frobenius, inverse, nilpotent_exp, CMatrix, CVector, Scalar};
use mixed_hodge::mhs::{random_hodge_tate_sample, two_pi_i};
use mixed_hodge::polylog::{build_matrices, polylog_framed, polylog_mhs, sv_brown, tau, PolylogContext};

fn ctx(re: f64, im: f64, n: usize) -> PolylogContext {
    PolylogContext::new(c(re, im), n).unwrap()
}

fn unit(n: usize, k: usize) -> CVector {
    CVector::from_fn(n, |i, _| c(f64::from(u8::from(i == k)), 0.0))
}

#[test]
fn frame_elements_are_period_multiples_of_standard_vectors() {
    let n = 4;
    for z in [c(0.3, 0.4), c(-1.2, 0.7)] {
        let cx = PolylogContext::new(z, n).unwrap();
        for a in 0..n {
            for b in a + 1..=n {
                let fh = polylog_framed(&cx, a, b).unwrap();
                let fe = frame_elements(&fh).unwrap();
                let e = fh.mhs.to_de_rham_vector(&fe.e_h).unwrap();
                let f = fh.mhs.to_de_rham_functional(&fe.e_hdual).unwrap();
                let want_e = unit(n + 1, a) * two_pi_i().powi(a as i32);
                let want_f = unit(n + 1, b) * two_pi_i().powi(-(b as i32));
                assert!((e - want_e).norm() < 1e-10, "z = {z}, a = {a}");
                assert!((f - want_f).norm() < 1e-10, "z = {z}, b = {b}");
            }
        }
    }
}

#[test]
fn conjugation_matrix_entries() {
    let n = 6;
    let z = c(0.3, 0.2);
    let cx = PolylogContext::new(z, n).unwrap();
    let m = build_matrices(&cx).unwrap();
    let g = m.conjugation_matrix().unwrap();
    let l = (z * z.conj()).re.ln();
    let mut fact = 1.0;
    let mut facts = vec![1.0];
    for k in 1..=n {
        fact *= k as f64;
        facts.push(fact);
    }
    for row in 0..=n {
        for col in 0..=n {
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            let want = if col > row {
                c(0.0, 0.0)
            } else if col == row {
                c(sign, 0.0)
            } else if col > 0 {
                c(sign * l.powi((row - col) as i32) / facts[row - col], 0.0)
            } else {
                -sv_brown(row, &cx).unwrap()
            };
            assert!((g[(row, col)] - want).norm() < 1e-10, "entry ({row}, {col})");
        }
    }
    assert!(m.closed_form_residual().unwrap() < 1e-10);
    assert!(m.block_identity_residual().unwrap() < 1e-10);
    let b = &m.b;
    for i in 0..=n {
        assert!((b[(i, i)] - c(1.0, 0.0)).norm() < 1e-12);
        for j in i + 1..=n {
            assert!(b[(i, j)].norm() < 1e-12);
        }
    }
    assert!(frobenius(&(b - &g * tau(n + 1, c(-1.0, 0.0)))) < 1e-12);
}

#[test]
fn structure_shape_over_a_grid() {
    for n in 1..=8 {
        for z in common::disc_grid()
            .into_iter()
            .chain(common::outer_points())
            .step_by(3)
        {
            let h = polylog_mhs(&PolylogContext::new(z, n).unwrap()).unwrap();
            assert!(h.validate().is_valid(), "N = {n}, z = {z}");
            let d = delta_splitting(&h).unwrap();
            let pieces: Vec<_> = d.bigrading.pieces().iter().filter(|(_, s)| s.dim() > 0).collect();
            assert_eq!(pieces.len(), n + 1);
            for ((p, q), s) in pieces {
                assert!(p == q && (-(n as i32)..=0).contains(p) && s.dim() == 1);
            }
            let y = d.bigrading.grading_operator();
            for k in 0..=n {
                let v = d.bigrading.piece(-(k as i32), -(k as i32)).basis_vectors()[0].clone();
                assert!((&y * &v - &v * c(-2.0 * k as f64, 0.0)).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn dual_and_twist_weights() {
    let n = 5;
    let h = polylog_mhs(&ctx(0.3, 0.0, n)).unwrap();
    assert!(h.validate().is_valid());
    let up: Vec<i32> = (0..=n as i32).map(|k| 2 * k).collect();
    assert_eq!(h.dual().unwrap().weight().weights(), up);
    let down: Vec<i32> = (1..=n as i32 + 1).rev().map(|k| -2 * k).collect();
    assert_eq!(h.twist(1).unwrap().weight().weights(), down);
}

#[test]
fn weight_one_height() {
    for z in common::disc_grid().into_iter().chain(common::outer_points()) {
        let fh = polylog_framed(&PolylogContext::new(z, 1).unwrap(), 0, 1).unwrap();
        let ht1 = HeightData::compute(&fh).unwrap().height1();
        assert!((ht1 + (1.0 - z).norm().ln() / PI).abs() < 1e-10, "z = {z}");
    }
}

#[test]
fn framing_operations_on_polylog_structures() {
    let n = 4;
    for z in [c(0.4, 0.3), c(-0.7, -0.5), c(1.5, 1.0)] {
        let cx = PolylogContext::new(z, n).unwrap();
        for a in 0..n {
            for b in a + 1..=n {
                let fh = polylog_framed(&cx, a, b).unwrap();
                let base = HeightData::compute(&fh).unwrap();
                let (h1, h2) = (base.height1(), base.height2().unwrap());
                let close = |x: f64, y: f64| (x - y).abs() < 1e-9 * (1.0 + y.abs());
                let d = HeightData::compute(&dual_framed(&fh).unwrap()).unwrap();
                assert!(close(d.height1(), -h1) && close(d.height2().unwrap(), -h2));
                for p in -2..=2 {
                    let t = HeightData::compute(&twist_framed(&fh, p).unwrap()).unwrap();
                    assert!(close(t.height1(), h1) && close(t.height2().unwrap(), h2));
                }
                let sign = if (a + b + 1) % 2 == 0 { 1.0 } else { -1.0 };
                let cj = HeightData::compute(&conjugate_framed(&fh).unwrap()).unwrap();
                assert!(close(cj.height1(), sign * h1) && close(cj.height2().unwrap(), sign * h2));
            }
        }
    }
    let fh = polylog_framed(&ctx(0.6, -0.2, 2), 0, 2).unwrap();
    assert!(
        HeightData::compute(&fh)
            .unwrap()
            .biextension_defect()
            .unwrap()
            .abs()
            < 1e-12
    );
}

#[test]
fn delta_of_dual_and_conjugate() {
    let mut structures: Vec<_> = common::random_suite(40)
        .into_iter()
        .map(|c| c.sample.mhs)
        .collect();
    structures.push(polylog_mhs(&ctx(-0.5, 0.6, 4)).unwrap());
    for h in &structures {
        let d = delta_splitting(h).unwrap().delta;
        let dc = delta_splitting(&h.conjugate().unwrap()).unwrap().delta;
        let dd = delta_splitting(&h.dual().unwrap()).unwrap().delta;
        let scale = 1.0 + frobenius(&d);
        assert!(frobenius(&(&dc + &d)) < 1e-9 * scale);
        assert!(frobenius(&(&dd + d.transpose())) < 1e-9 * scale);
    }
}

#[test]
fn hodge_components_of_lowering_operators() {
    let n = 4;
    let cx = ctx(0.2, -0.6, n);
    let m = build_matrices(&cx).unwrap();
    let h = polylog_mhs(&cx).unwrap();
    let s = delta_splitting(&h).unwrap();
    let x = inverse(&m.a).unwrap() * &m.e0 * &m.a;
    let comps = s.bigrading.hodge_components(&x);
    let support: Vec<_> = comps
        .iter()
        .filter(|(_, v)| frobenius(v) > 1e-12)
        .map(|(k, _)| *k)
        .collect();
    assert_eq!(support, vec![(-1, -1)]);
    let y = s.bigrading.hodge_components(&s.y);
    let support: Vec<_> = y
        .iter()
        .filter(|(_, v)| frobenius(v) > 1e-12)
        .map(|(k, _)| *k)
        .collect();
    assert_eq!(support, vec![(0, 0)]);
}

#[test]
fn graded_delta_powers_are_real() {
    for case in common::random_suite(60) {
        let s = delta_splitting(&case.sample.mhs).unwrap();
        let b = &s.bigrading;
        let weights = b.weights();
        let mut power = CMatrix::identity(b.dimension(), b.dimension());
        for _ in 1..=3 {
            power = &power * &s.delta;
            for &k in &weights {
                for &k2 in weights.iter().filter(|&&k2| k2 < k) {
                    let m = b.graded_projection(k2) * &power * b.graded_lift(k);
                    let im = m.iter().map(|z: &Scalar| z.im.abs()).fold(0.0, f64::max);
                    assert!(im < 1e-9, "seed {}: k = {k}, k' = {k2}", case.seed);
                }
            }
        }
    }
}

#[test]
fn grading_moves_with_lambda() {
    for seed in 0..40 {
        let s = random_hodge_tate_sample(&common::random_blocks(seed), seed, 1.0).unwrap();
        let y = delta_splitting(&s.mhs).unwrap().y;
        let y0 = delta_splitting(&s.split).unwrap().y;
        let g = nilpotent_exp(&s.lambda).unwrap();
        let moved = &g * y0 * inverse(&g).unwrap();
        assert!(frobenius(&(y - moved)) < 1e-8, "seed {seed}");
    }
}

#[test]
fn frame_identities_on_the_suite() {
    let tol = Tolerances::default();
    for case in common::random_suite(60) {
        for fh in common::framings(&case) {
            let hd = HeightData::compute_with(&fh, &tol).unwrap();
            assert!(
                hd.conjugation_identity_residual().unwrap() < 1e-8,
                "seed {}",
                case.seed
            );
            for r in 1..=3 {
                assert!(
                    hd.delta_power_pairing(r).im.abs() < 1e-9,
                    "seed {}, r = {r}",
                    case.seed
                );
            }
        }
    }
}
