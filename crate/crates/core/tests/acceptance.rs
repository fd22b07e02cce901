//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed. The
//! process fails only when a criterion outside `KNOWN_FAILURES` fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use mixed_hodge::deligne::{bigrading, delta_fixed_point, delta_splitting, Tolerances};
use mixed_hodge::framed::{
    conjugate_framed, dual_framed, frame_elements, framed_morphism_check, twist_framed, FramedMhs, HeightData,
};
use mixed_hodge::io::evaluate_point;
use mixed_hodge::linalg::{c, inverse, nilpotent_exp, pair, CMatrix, Scalar, Subspace};
use mixed_hodge::mhs::{
    random_hodge_tate_sample, rational_rows_to_matrix, split_hodge_tate, HodgeFiltration,
    MixedHodgeStructure, WeightFiltration,
};
use mixed_hodge::polylog::{
    build_matrices, polylog_framed, polylog_mhs_from, sv_bd_from, sv_brown_from, PolylogContext,
};
use mixed_hodge::rational::{int, ratio, QVector, Rational, RationalSubspace};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{disc_grid, framings, outer_points, random_suite};

/// Eq. 44 of the source states `Ht₂ = −log zz̄/(2π)`; the pipeline and the
/// expansion of `e^{−2iδ}` both give `+log zz̄/(4π)`. See the README.
const KNOWN_FAILURES: &[u32] = &[3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let tol = Tolerances::default();
    let framings: Vec<(usize, usize)> = (1..=6).map(|b| (0, b)).collect();
    let mut err: f64 = 0.0;
    for z in disc_grid() {
        let ctx = PolylogContext::new(z, 6).unwrap();
        for row in evaluate_point(&ctx, &framings, &tol).unwrap() {
            err = err.max((row.ht1_pipeline - row.ht1_closed).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let (ref_err, ref_points) = mpmath_ht1_error();
    outcome(
        err < 1e-8 && ref_err < 1e-8 && secs < 30.0,
        format!(
            "grid max |Δ| = {err:.2e}, frozen mpmath max |Δ| = {ref_err:.2e} over {ref_points} points, {secs:.2}s"
        ),
    )
}

/// Pipeline `Ht₁` for `a = 0` against values frozen from an mpmath evaluation.
fn mpmath_ht1_error() -> (f64, usize) {
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(include_str!("reference/polylog_mpmath.json")).unwrap();
    let num = |v: &serde_json::Value| v.as_str().unwrap().parse::<f64>().unwrap();
    let tol = Tolerances::default();
    let framings: Vec<(usize, usize)> = (1..=6).map(|b| (0, b)).collect();
    let mut err: f64 = 0.0;
    for r in &rows {
        let z = c(num(&r["z"][0]), num(&r["z"][1]));
        let ctx = PolylogContext::new(z, 6).unwrap();
        for (row, want) in evaluate_point(&ctx, &framings, &tol)
            .unwrap()
            .iter()
            .zip(r["ht1_a0"].as_array().unwrap())
        {
            err = err.max((row.ht1_pipeline - num(want)).abs());
        }
    }
    (err, rows.len())
}

fn criterion_2() -> Outcome {
    let tol = Tolerances::default();
    let framings: Vec<(usize, usize)> = (1..6).flat_map(|a| (a + 1..=6).map(move |b| (a, b))).collect();
    let (mut err, mut even): (f64, f64) = (0.0, 0.0);
    for z in disc_grid().into_iter().chain(outer_points()) {
        let ctx = PolylogContext::new(z, 6).unwrap();
        for row in evaluate_point(&ctx, &framings, &tol).unwrap() {
            err = err.max((row.ht1_pipeline - row.ht1_closed).abs());
            if (row.b - row.a) % 2 == 0 {
                even = even.max(row.ht1_pipeline.abs());
            }
        }
    }
    outcome(
        err < 1e-8 && even < 1e-12,
        format!("max |Δ| = {err:.2e}, max |Ht₁| for even b-a = {even:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let tol = Tolerances::default();
    let all: Vec<(usize, usize)> = (0..6).flat_map(|a| (a + 1..=6).map(move |b| (a, b))).collect();
    let (mut eq45, mut zero, mut eq44): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut ratio_to_ht1: f64 = 0.0;
    for z in disc_grid().into_iter().chain(outer_points()) {
        let ctx = PolylogContext::new(z, 6).unwrap();
        for row in evaluate_point(&ctx, &all, &tol).unwrap() {
            let gap = (row.ht2_pipeline - row.ht2_closed).abs();
            if row.a == 0 {
                eq45 = eq45.max(gap);
            } else if row.b == row.a + 1 {
                eq44 = eq44.max(gap);
                // what the pipeline actually produces: -Ht₁/2 = log zz̄/(4π)
                ratio_to_ht1 = ratio_to_ht1.max((row.ht2_pipeline + 0.5 * row.ht1_pipeline).abs());
            } else {
                zero = zero.max(row.ht2_pipeline.abs());
            }
        }
    }
    let stated = eq44 < 1e-8;
    outcome(
        eq45 < 1e-8 && zero < 1e-10 && stated,
        format!(
            "a=0 closed form max |Δ| = {eq45:.2e}; zero cases max = {zero:.2e}; \
             b=a+1>1 vs -log zz̄/(2π) max |Δ| = {eq44:.2e}, while |Ht₂ + Ht₁/2| ≤ {ratio_to_ht1:.2e}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let tol = Tolerances::default();
    let (mut d, mut split, mut real): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut count = 0;
    for n in 1..=6 {
        for z in disc_grid().into_iter().chain(outer_points()) {
            let ctx = PolylogContext::new(z, n).unwrap();
            let row = evaluate_point(&ctx, &[(0, n)], &tol).unwrap();
            d = d.max(row[0].delta_residual);
            let m = build_matrices(&ctx).unwrap();
            let h = polylog_mhs_from(n, &m).unwrap();
            let s = delta_splitting(&h).unwrap();
            split = split.max(s.residual);
            real = real.max(s.reality_residual);
            count += 1;
        }
    }
    outcome(
        d < 1e-9 && split < 1e-9 && real < 1e-9,
        format!("{count} instances: closed form {d:.2e}, splitting equation {split:.2e}, reality {real:.2e}"),
    )
}

/// Random `λ ∈ Λ^{-1,-1}` of the structure with bigrading `b`.
fn random_lambda(b: &mixed_hodge::deligne::Bigrading, seed: u64) -> CMatrix {
    let n = b.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = CMatrix::from_fn(n, n, |_, _| {
        c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))
    });
    let mut lambda = CMatrix::zeros(n, n);
    for ((p, q), m) in b.hodge_components(&x) {
        if p <= -1 && q <= -1 {
            lambda += m;
        }
    }
    lambda
}

fn polylog_instances() -> Vec<MixedHodgeStructure> {
    let mut out = Vec::new();
    for n in 1..=6 {
        for z in disc_grid().into_iter().chain(outer_points()) {
            let ctx = PolylogContext::new(z, n).unwrap();
            out.push(polylog_mhs_from(n, &build_matrices(&ctx).unwrap()).unwrap());
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let mut structures: Vec<MixedHodgeStructure> =
        random_suite(220).into_iter().map(|c| c.sample.mhs).collect();
    let random_count = structures.len();
    structures.extend(polylog_instances());
    let (mut axioms, mut min_indep, mut lambda_eq): (f64, f64, f64) = (0.0, f64::INFINITY, 0.0);
    let mut lambda_ok = true;
    for (i, h) in structures.iter().enumerate() {
        let b = bigrading(h).unwrap();
        let r = b.axiom_residuals(h).unwrap();
        axioms = axioms.max(r.max());
        min_indep = min_indep.min(r.independence);
        let lambda = random_lambda(&b, i as u64);
        let g = nilpotent_exp(&lambda).unwrap();
        let moved = h.transform_hodge(&g).unwrap();
        let b2 = bigrading(&moved).unwrap();
        for (&(p, q), piece) in b.pieces() {
            let want = piece.image(&g).unwrap();
            let got = b2.piece(p, q);
            lambda_ok &= got.same_as_at(&want, 1e-8);
            lambda_eq = lambda_eq
                .max(got.containment_residual(&want))
                .max(want.containment_residual(&got));
        }
    }
    outcome(
        axioms < 1e-8 && min_indep > 1e-8 && lambda_ok,
        format!(
            "{random_count} random + {} polylog: axioms {axioms:.2e}, min σ ratio {min_indep:.2e}, e^λ equivariance {lambda_eq:.2e}",
            structures.len() - random_count
        ),
    )
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / 1f64.max(y.abs())
}

/// `(M·H, M)` for a random unimodular `M`.
fn pushforward(h: &MixedHodgeStructure, seed: u64) -> (MixedHodgeStructure, Vec<QVector>) {
    let n = h.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m: Vec<QVector> = (0..n)
        .map(|i| (0..n).map(|j| int(i64::from(i == j))).collect())
        .collect();
    for _ in 0..n {
        if n < 2 {
            break;
        }
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let k = int(rng.random_range(-2..=2));
        let row_j = m[j].clone();
        for (x, y) in m[i].iter_mut().zip(row_j) {
            *x += &k * y;
        }
    }
    let mc = rational_rows_to_matrix(&m);
    let mut w = WeightFiltration::new(n);
    for (k, s) in h.weight().jumps() {
        w.insert(*k, s.image(&m));
    }
    let mut f = HodgeFiltration::new(n);
    for (p, s) in h.hodge().jumps() {
        f.insert(*p, s.image(&mc).unwrap());
    }
    (MixedHodgeStructure::new(w, f, None).unwrap(), m)
}

fn mat_vec(m: &[QVector], v: &[Rational]) -> QVector {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn integer_inverse_transpose(m: &[QVector]) -> Vec<QVector> {
    let inv = inverse(&rational_rows_to_matrix(m)).unwrap();
    let n = m.len();
    (0..n)
        .map(|i| (0..n).map(|j| int(inv[(j, i)].re.round() as i64)).collect())
        .collect()
}

/// Morphism residual and height gap for `M: H → M·H` and for `H ↪ H ⊕ T`.
fn morphism_checks(fh: &FramedMhs, seed: u64, tol: &Tolerances) -> (bool, f64) {
    let (m1, m2) = (2i64, 3i64);
    let (h2, m) = pushforward(&fh.mhs, seed);
    let phi2: QVector = mat_vec(&m, &fh.phi_class)
        .into_iter()
        .map(|x| x * int(m1))
        .collect();
    let psi2: QVector = mat_vec(&integer_inverse_transpose(&m), &fh.psi_functional)
        .into_iter()
        .map(|x| x / int(m2))
        .collect();
    let fh2 = FramedMhs::new(h2, fh.a, fh.b, phi2, psi2).unwrap();
    let r1 = framed_morphism_check(&rational_rows_to_matrix(&m), fh, &fh2, m1, m2, tol).unwrap();

    let n = fh.mhs.dimension();
    let t = split_hodge_tate(&[2 * fh.a, 2 * fh.b, 2 * fh.b - 2]).unwrap();
    let sum = fh.mhs.direct_sum(&t).unwrap();
    let pad = |v: &QVector, s: Rational| -> QVector {
        v.iter()
            .map(|x| x * &s)
            .chain(std::iter::repeat_n(int(0), 3))
            .collect()
    };
    let fh3 = FramedMhs::new(
        sum,
        fh.a,
        fh.b,
        pad(&fh.phi_class, int(m1)),
        pad(&fh.psi_functional, ratio(1, m2)),
    )
    .unwrap();
    let inclusion = CMatrix::from_fn(n + 3, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let r2 = framed_morphism_check(&inclusion, fh, &fh3, m1, m2, tol).unwrap();
    let gap = [&r1, &r2]
        .iter()
        .map(|r| rel(r.height1.0, r.height1.1).max(rel(r.height2.0, r.height2.1)))
        .fold(0.0, f64::max);
    (r1.is_framed_morphism && r2.is_framed_morphism, gap)
}

fn criterion_6() -> Outcome {
    let tol = Tolerances::default();
    let (mut dual, mut twist, mut conj, mut morph, mut via): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut morphisms_ok = true;
    let mut count = 0;
    for case in random_suite(220) {
        for (k, fh) in framings(&case).iter().enumerate() {
            count += 1;
            let d = HeightData::compute(fh).unwrap();
            let (h1, h2) = (d.height1(), d.height2().unwrap());
            via = via.max(rel(d.height1_via_delta().unwrap(), h1));

            let dd = HeightData::compute(&dual_framed(fh).unwrap()).unwrap();
            dual = dual
                .max(rel(dd.height1(), -h1))
                .max(rel(dd.height2().unwrap(), -h2));

            for p in [-1, 1, 2] {
                let td = HeightData::compute(&twist_framed(fh, p).unwrap()).unwrap();
                twist = twist
                    .max(rel(td.height1(), h1))
                    .max(rel(td.height2().unwrap(), h2));
            }

            let sign = if (fh.a - fh.b + 1).rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            };
            let cd = HeightData::compute(&conjugate_framed(fh).unwrap()).unwrap();
            conj = conj
                .max(rel(cd.height1(), sign * h1))
                .max(rel(cd.height2().unwrap(), sign * h2));

            let (ok, gap) = morphism_checks(fh, case.seed * 31 + k as u64, &tol);
            morphisms_ok &= ok;
            morph = morph.max(gap);
        }
    }
    let worst = max_of([dual, twist, conj, morph, via]);
    outcome(
        worst < 1e-9 && morphisms_ok,
        format!(
            "{count} framings (relative to max(1,|Ht|)): dual {dual:.2e}, twist {twist:.2e}, conjugate {conj:.2e}, \
             morphism {morph:.2e}, via δ {via:.2e}"
        ),
    )
}

/// `⟨e_{H∨}, δ^r e_H⟩` for `r = 0..=3`, with `δ` from the fixed-point solver.
fn oracle_pairings(fh: &FramedMhs) -> [Scalar; 4] {
    let tol = Tolerances::default();
    let delta = delta_fixed_point(&fh.mhs, &tol, 200).unwrap().delta;
    let fe = frame_elements(fh).unwrap();
    let mut v = fe.e_h.clone();
    let mut out = [c(0.0, 0.0); 4];
    for slot in out.iter_mut() {
        *slot = pair(&fe.e_hdual, &v);
        v = &delta * v;
    }
    out
}

/// Term-by-term `Im⟨e∨, e^{−2iδ} e⟩`, and from it `Ht₂ + Ht₁/2`, as a
/// multiple of `⟨e∨, δ³e⟩`.
fn oracle_coefficient(cs: &[Scalar; 4]) -> (f64, f64) {
    let mut expansion = c(0.0, 0.0);
    let mut fact = 1.0;
    for (r, cr) in cs.iter().enumerate() {
        if r > 0 {
            fact *= r as f64;
        }
        expansion += c(0.0, -2.0).powi(r as i32) / fact * cr;
    }
    let ht1 = expansion.im;
    let defect = cs[1].re + 0.5 * ht1;
    (ht1, defect / cs[3].re)
}

fn criterion_7() -> Outcome {
    let tol = Tolerances::default();
    let mut short: f64 = 0.0;
    let mut short_count = 0;
    for case in random_suite(220) {
        for fh in framings(&case) {
            if fh.a - fh.b <= 2 {
                let d = HeightData::compute(&fh).unwrap();
                short = short.max(d.biextension_defect().unwrap().abs());
                short_count += 1;
            }
        }
    }
    for z in disc_grid().into_iter().chain(outer_points()) {
        let ctx = PolylogContext::new(z, 6).unwrap();
        for (a, b) in (0..6).flat_map(|a| (a + 1..=(a + 2).min(6)).map(move |b| (a, b))) {
            let d = HeightData::compute_with(&polylog_framed(&ctx, a, b).unwrap(), &tol).unwrap();
            short = short.max(d.biextension_defect().unwrap().abs());
            short_count += 1;
        }
    }

    // the four-step configuration Q(0), Q(1), Q(2), Q(3) with the (0,-3)-framing
    let mut four: Vec<FramedMhs> = (0..60)
        .map(|seed| {
            let s = random_hodge_tate_sample(&[(0, 1), (-2, 1), (-4, 1), (-6, 1)], 1000 + seed, 1.0).unwrap();
            mixed_hodge::framed::sample_framing(&s, 0, -3).unwrap()
        })
        .collect();
    for z in disc_grid() {
        four.push(polylog_framed(&PolylogContext::new(z, 3).unwrap(), 0, 3).unwrap());
    }
    let (mut oracle_ht1, mut kappa_spread, mut magnitude, mut signed, mut paper_sign): (
        f64,
        f64,
        f64,
        f64,
        f64,
    ) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut kappas = Vec::new();
    for fh in &four {
        let cs = oracle_pairings(fh);
        let (o_ht1, kappa) = oracle_coefficient(&cs);
        let d = HeightData::compute(fh).unwrap();
        let defect = d.biextension_defect().unwrap();
        let c3 = d.delta_power_pairing(3).re;
        oracle_ht1 = oracle_ht1.max((o_ht1 - d.height1()).abs());
        kappas.push(kappa);
        magnitude = magnitude.max((defect.abs() - 2.0 / 3.0 * c3.abs()).abs());
        signed = signed.max((defect - 2.0 / 3.0 * c3).abs());
        paper_sign = paper_sign.max((defect + 2.0 / 3.0 * c3).abs());
    }
    let kappa = kappas.iter().sum::<f64>() / kappas.len() as f64;
    for k in &kappas {
        kappa_spread = kappa_spread.max((k - kappa).abs());
    }
    let oracle_sign_positive = kappa > 0.0;
    let pass = short < 1e-9
        && oracle_ht1 < 1e-9
        && (kappa.abs() - 2.0 / 3.0).abs() < 1e-9
        && kappa_spread < 1e-6
        && magnitude < 1e-9
        && oracle_sign_positive
        && signed < 1e-9;
    outcome(
        pass,
        format!(
            "{short_count} framings spanning ≤ 3 steps: max |Ht₂+Ht₁/2| = {short:.2e}; {} four-step cases: \
             oracle coefficient {kappa:+.12} (spread {kappa_spread:.1e}), | |defect| - (2/3)|c₃| | = {magnitude:.2e}, \
             |defect - (2/3)c₃| = {signed:.2e}, |defect + (2/3)c₃| = {paper_sign:.2e}",
            four.len()
        ),
    )
}

fn criterion_8() -> Outcome {
    let z = c(2.5, 0.5);
    let paths = [
        Vec::new(),
        vec![c(0.4, 0.0), c(0.5, -1.0), c(2.5, -1.0)],
        vec![
            c(0.4, 0.0),
            c(0.0, 0.6),
            c(-0.6, 0.0),
            c(0.0, -0.6),
            c(0.5, -1.0),
            c(2.5, -1.0),
        ],
    ];
    let branches: Vec<_> = paths
        .iter()
        .map(|p| {
            PolylogContext::with_path(z, 6, p.clone())
                .unwrap()
                .branch(6)
                .unwrap()
        })
        .collect();
    let (mut sv, mut min_jump): (f64, f64) = (0.0, f64::INFINITY);
    for other in &branches[1..] {
        for b in 1..=6 {
            sv = sv.max((sv_brown_from(b, other) - sv_brown_from(b, &branches[0])).norm());
            sv = sv.max((sv_bd_from(b, other) - sv_bd_from(b, &branches[0])).norm());
            min_jump = min_jump.min((other.li(b) - branches[0].li(b)).norm());
        }
    }
    // the loop around 1 changes Li_k by ±2πi log^{k-1}z/(k-1)!
    let log_z = branches[0].log_z;
    let mut predicted: f64 = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let mut worst: f64 = 0.0;
        let mut fact = 1.0;
        for k in 1..=6 {
            if k > 1 {
                fact *= (k - 1) as f64;
            }
            let jump = c(0.0, 2.0 * PI * sign) * log_z.powi(k as i32 - 1) / fact;
            worst = worst.max((branches[1].li(k) - branches[0].li(k) - jump).norm());
        }
        predicted = predicted.min(worst);
    }
    let log_jump = (branches[2].log_z - branches[0].log_z - c(0.0, 2.0 * PI)).norm();
    outcome(
        sv < 1e-6 && min_jump > 1e-3 && predicted < 1e-6 && log_jump < 1e-9,
        format!(
            "3 paths to {z}: single-valued max |Δ| = {sv:.2e}, min raw |ΔLi_k| = {min_jump:.2e}, \
             monodromy formula error {predicted:.2e}"
        ),
    )
}

/// Rank by exact Gaussian elimination over the rationals.
fn exact_rank(mut rows: Vec<QVector>, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = Rational::one() / &rows[rank][col];
        let pivot_row: QVector = rows[rank].iter().map(|x| x * &inv).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

fn random_generators(rng: &mut ChaCha8Rng, n: usize) -> Vec<QVector> {
    let k = rng.random_range(0..=n);
    let mut out: Vec<QVector> = Vec::with_capacity(k);
    for _ in 0..k {
        // repeat earlier directions often, so ranks drop
        if !out.is_empty() && rng.random_bool(0.3) {
            let a = out[rng.random_range(0..out.len())].clone();
            let b = out[rng.random_range(0..out.len())].clone();
            let (s, t) = (int(rng.random_range(-2..=2)), int(rng.random_range(-2..=2)));
            out.push(a.iter().zip(&b).map(|(x, y)| x * &s + y * &t).collect());
        } else {
            out.push(
                (0..n)
                    .map(|_| ratio(rng.random_range(-3..=3), rng.random_range(1..=3)))
                    .collect(),
            );
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    let mut containment: f64 = 0.0;
    let complex = |vs: &[QVector], n: usize| {
        Subspace::span(
            n,
            &vs.iter()
                .map(|v| mixed_hodge::rational::to_complex(v))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    };
    for _ in 0..500 {
        let n = rng.random_range(1..=8);
        let mut ga = random_generators(&mut rng, n);
        let gb = random_generators(&mut rng, n);
        // share directions between the two sides
        if !gb.is_empty() && rng.random_bool(0.5) {
            ga.push(gb[0].clone());
        }
        let da = exact_rank(ga.clone(), n);
        let db = exact_rank(gb.clone(), n);
        let dsum = exact_rank(ga.iter().chain(&gb).cloned().collect(), n);
        let dint = da + db - dsum;
        let (a, b) = (complex(&ga, n), complex(&gb, n));
        let sum = a.sum(&b).unwrap();
        let int_ab = a.intersect(&b).unwrap();
        let ann = a.annihilator();
        let (qa, qb) = (RationalSubspace::span(n, &ga), RationalSubspace::span(n, &gb));
        let exact_int = qa.annihilator().sum(&qb.annihilator()).annihilator();
        let dims = [
            (a.dim(), da),
            (b.dim(), db),
            (sum.dim(), dsum),
            (int_ab.dim(), dint),
            (ann.dim(), n - da),
            (qa.sum(&qb).dim(), dsum),
            (exact_int.dim(), dint),
            (qa.annihilator().dim(), n - da),
        ];
        if dims.iter().any(|(x, y)| x != y) {
            mismatches += 1;
        }
        containment = containment
            .max(a.containment_residual(&int_ab))
            .max(b.containment_residual(&int_ab))
            .max(sum.containment_residual(&a))
            .max(sum.containment_residual(&b));
        // the annihilator kills every generator exactly
        for v in ga.iter().map(|v| mixed_hodge::rational::to_complex(v)) {
            for f in ann.basis_vectors() {
                containment = containment.max(pair(&f, &v).norm());
            }
        }
    }
    outcome(
        mismatches == 0 && containment < 1e-9,
        format!("500 cases: {mismatches} dimension mismatches, max containment residual {containment:.2e}"),
    )
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (n, f) in criteria
        .into_iter()
        .filter(|(n, _)| std::env::var("ONLY").map_or(true, |o| o == n.to_string()))
    {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_FAILURES.contains(&n) {
            " [known]"
        } else {
            ""
        };
        println!("criterion {n}: {status}{note} ({}) [{secs:.1}s]", o.detail);
        if !o.pass && !KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
