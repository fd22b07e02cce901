//! Framed mixed Hodge structures and their two heights.
//!
//! An `(a,b)`-framing is a rational class `φ ∈ W_{2a}` of type `(a,a)` on
//! `Gr^W_{2a}` and a rational functional `ψ` on `W_{2b}`, vanishing on
//! `W_{2b-1}`, of type `(b,b)`. Functionals are vectors in the dual Betti
//! coordinates, paired with `⟨f, x⟩ = Σ f_i x_i`.

use log::warn;
use num_traits::Zero;
use thiserror::Error;

use crate::deligne::{
    bigrading_unchecked, bigrading_with, delta_splitting_with, Bigrading, DeligneError, SplittingData,
    Tolerances,
};
use crate::linalg::{c, frobenius, inverse, nilpotent_exp, pair, pseudo_inverse, CMatrix, CVector, Scalar};
use crate::mhs::{rational_rows_to_matrix, HodgeTateSample, MhsError, MixedHodgeStructure};
use crate::rational::{dot, int, to_complex, QVector, Rational};

#[derive(Debug, Clone, Error)]
pub enum FramedError {
    #[error("invalid framing: {0}")]
    InvalidFraming(String),
    #[error("framing type error: {0}")]
    FramingTypeError(String),
    #[error("height is not real: imaginary part {imag:.3e} exceeds {tolerance:.3e}")]
    RealityViolation { imag: f64, tolerance: f64 },
    #[error(transparent)]
    Deligne(#[from] DeligneError),
    #[error(transparent)]
    Mhs(#[from] MhsError),
}

#[derive(Debug, Clone)]
pub struct FramedMhs {
    pub mhs: MixedHodgeStructure,
    pub a: i32,
    pub b: i32,
    /// Representative of `φ(𝟙(-a))` in `W_{2a}`.
    pub phi_class: QVector,
    /// `ψ` as a functional on `W_{2b}`.
    pub psi_functional: QVector,
}

impl FramedMhs {
    /// Checks the rational conditions on `φ` and `ψ`; the Hodge type is
    /// checked when frame elements are computed.
    pub fn new(
        mhs: MixedHodgeStructure,
        a: i32,
        b: i32,
        phi_class: QVector,
        psi_functional: QVector,
    ) -> Result<Self, FramedError> {
        let n = mhs.dimension();
        if phi_class.len() != n || psi_functional.len() != n {
            return Err(FramedError::InvalidFraming(format!(
                "framing vectors must have length {n}"
            )));
        }
        let w = mhs.weight();
        if !w.get(2 * a).contains_vector(&phi_class) {
            return Err(FramedError::InvalidFraming(format!("φ is not in W_{}", 2 * a)));
        }
        if w.get(2 * a - 1).contains_vector(&phi_class) {
            return Err(FramedError::InvalidFraming(format!(
                "φ vanishes in Gr^W_{}",
                2 * a
            )));
        }
        let low = w.get(2 * b - 1);
        if low.basis().iter().any(|v| !dot(&psi_functional, v).is_zero()) {
            return Err(FramedError::InvalidFraming(format!(
                "ψ does not vanish on W_{}",
                2 * b - 1
            )));
        }
        if w.get(2 * b)
            .basis()
            .iter()
            .all(|v| dot(&psi_functional, v).is_zero())
        {
            return Err(FramedError::InvalidFraming(format!("ψ vanishes on W_{}", 2 * b)));
        }
        if b > a {
            warn!("framing ({a},{b}) has b > a; heights are computed literally");
        }
        Ok(FramedMhs {
            mhs,
            a,
            b,
            phi_class,
            psi_functional,
        })
    }
}

#[derive(Debug, Clone)]
pub struct FrameElements {
    /// `e_H ∈ I^{a,a}(H)`, Betti coordinates of `H`.
    pub e_h: CVector,
    /// `e_{H∨} ∈ I^{-b,-b}(H∨)`, dual Betti coordinates.
    pub e_hdual: CVector,
    /// Residuals of the two lifts.
    pub lift_residuals: (f64, f64),
}

/// The unique vector of `I^{a,a}` congruent to `v` modulo `W_{2a-1}`.
fn lift_to_diagonal(
    h: &MixedHodgeStructure,
    bigrading: &Bigrading,
    a: i32,
    v: &[Rational],
    tol: &Tolerances,
) -> Result<(CVector, f64), FramedError> {
    let n = h.dimension();
    let target = to_complex(v);
    let piece = bigrading.piece(a, a);
    let low = h.w(2 * a - 1);
    let mut m = CMatrix::zeros(n, piece.dim() + low.dim());
    m.view_mut((0, 0), (n, piece.dim())).copy_from(piece.basis());
    m.view_mut((0, piece.dim()), (n, low.dim()))
        .copy_from(low.basis());
    let coeffs = pseudo_inverse(&m, tol.rank) * &target;
    let residual = (&m * &coeffs - &target).norm() / target.norm().max(f64::MIN_POSITIVE);
    if residual > tol.subspace {
        return Err(FramedError::FramingTypeError(format!(
            "class is not of type ({a},{a}) on Gr^W_{} (residual {residual:.3e})",
            2 * a
        )));
    }
    let e = piece.basis() * coeffs.rows(0, piece.dim());
    Ok((e, residual))
}

pub fn frame_elements(fh: &FramedMhs) -> Result<FrameElements, FramedError> {
    frame_elements_with(fh, &Tolerances::default())
}

pub fn frame_elements_with(fh: &FramedMhs, tol: &Tolerances) -> Result<FrameElements, FramedError> {
    let b_h = bigrading_with(&fh.mhs, tol)?;
    let dual = fh.mhs.dual()?;
    let b_dual = bigrading_with(&dual, tol)?;
    frame_elements_from(fh, &b_h, &dual, &b_dual, tol)
}

fn frame_elements_from(
    fh: &FramedMhs,
    b_h: &Bigrading,
    dual: &MixedHodgeStructure,
    b_dual: &Bigrading,
    tol: &Tolerances,
) -> Result<FrameElements, FramedError> {
    let (e_h, r1) = lift_to_diagonal(&fh.mhs, b_h, fh.a, &fh.phi_class, tol)?;
    let (e_hdual, r2) = lift_to_diagonal(dual, b_dual, -fh.b, &fh.psi_functional, tol)?;
    Ok(FrameElements {
        e_h,
        e_hdual,
        lift_residuals: (r1, r2),
    })
}

/// The splitting of `H` and the bigrading of `H∨`, reusable across framings of `H`.
#[derive(Debug, Clone)]
pub struct SharedSplitting {
    pub splitting: SplittingData,
    dual: MixedHodgeStructure,
    dual_bigrading: Bigrading,
    tolerances: Tolerances,
}

impl SharedSplitting {
    pub fn new(h: &MixedHodgeStructure, tol: &Tolerances) -> Result<Self, FramedError> {
        let splitting = delta_splitting_with(h, tol)?;
        // the splitting has validated `h`, hence its dual
        let dual = h.dual_unchecked()?;
        let dual_bigrading = bigrading_unchecked(&dual, tol)?;
        Ok(SharedSplitting {
            splitting,
            dual,
            dual_bigrading,
            tolerances: *tol,
        })
    }

    /// Heights of `fh`, whose structure must be the one this was built from.
    pub fn heights(&self, fh: &FramedMhs) -> Result<HeightData, FramedError> {
        if fh.a == fh.b {
            warn!(
                "equal framing weights a = b = {}; returning the computed value",
                fh.a
            );
        }
        let tol = &self.tolerances;
        let frame = frame_elements_from(
            fh,
            &self.splitting.bigrading,
            &self.dual,
            &self.dual_bigrading,
            tol,
        )?;
        Ok(HeightData {
            frame,
            splitting: self.splitting.clone(),
            tolerances: *tol,
        })
    }
}

/// Everything needed to evaluate both heights of one framed structure.
#[derive(Debug, Clone)]
pub struct HeightData {
    pub frame: FrameElements,
    pub splitting: SplittingData,
    pub tolerances: Tolerances,
}

impl HeightData {
    pub fn compute(fh: &FramedMhs) -> Result<Self, FramedError> {
        Self::compute_with(fh, &Tolerances::default())
    }

    pub fn compute_with(fh: &FramedMhs, tol: &Tolerances) -> Result<Self, FramedError> {
        SharedSplitting::new(&fh.mhs, tol)?.heights(fh)
    }

    fn e(&self) -> &CVector {
        &self.frame.e_h
    }

    fn e_dual(&self) -> &CVector {
        &self.frame.e_hdual
    }

    /// `Im⟨e_{H∨}, conj(e_H)⟩`.
    pub fn height1(&self) -> f64 {
        pair(self.e_dual(), &self.e().map(|z| z.conj())).im
    }

    /// `Im⟨e_{H∨}, e^{-2iδ} e_H⟩`.
    pub fn height1_via_delta(&self) -> Result<f64, FramedError> {
        let g = nilpotent_exp(&(&self.splitting.delta * c(0.0, -2.0))).map_err(DeligneError::from)?;
        Ok(pair(self.e_dual(), &(g * self.e())).im)
    }

    /// `⟨e_{H∨}, δ^r e_H⟩` without any reality check.
    pub fn delta_power_pairing(&self, r: u32) -> Scalar {
        let mut v = self.e().clone();
        for _ in 0..r {
            v = &self.splitting.delta * v;
        }
        pair(self.e_dual(), &v)
    }

    /// `⟨e_{H∨}, δ e_H⟩`, whose imaginary part must vanish.
    pub fn height2(&self) -> Result<f64, FramedError> {
        let z = self.delta_power_pairing(1);
        let tolerance = self.tolerances.reality * z.re.abs().max(1.0);
        if z.im.abs() > tolerance {
            return Err(FramedError::RealityViolation {
                imag: z.im,
                tolerance,
            });
        }
        Ok(z.re)
    }

    /// `Ht₂ + Ht₁/2`, which vanishes when `δ³ e_H = 0`.
    pub fn biextension_defect(&self) -> Result<f64, FramedError> {
        Ok(self.height2()? + 0.5 * self.height1())
    }

    /// `‖conj(e_H) − e^{−2iδ} e_H‖`.
    pub fn conjugation_identity_residual(&self) -> Result<f64, FramedError> {
        let g = nilpotent_exp(&(&self.splitting.delta * c(0.0, -2.0))).map_err(DeligneError::from)?;
        Ok((self.e().map(|z| z.conj()) - g * self.e()).norm())
    }

    pub fn delta_cubed_norm(&self) -> f64 {
        let d = &self.splitting.delta;
        (d * d * d * self.e()).norm()
    }
}

pub fn height1(fh: &FramedMhs) -> Result<f64, FramedError> {
    let tol = Tolerances::default();
    let frame = frame_elements_with(fh, &tol)?;
    Ok(pair(&frame.e_hdual, &frame.e_h.map(|z| z.conj())).im)
}

pub fn height1_via_delta(fh: &FramedMhs) -> Result<f64, FramedError> {
    HeightData::compute(fh)?.height1_via_delta()
}

pub fn height2(fh: &FramedMhs) -> Result<f64, FramedError> {
    HeightData::compute(fh)?.height2()
}

pub fn biextension_defect(fh: &FramedMhs) -> Result<f64, FramedError> {
    HeightData::compute(fh)?.biextension_defect()
}

/// `(H∨, ψ∨, φ∨)`, framed by `(-b, -a)`.
pub fn dual_framed(fh: &FramedMhs) -> Result<FramedMhs, FramedError> {
    FramedMhs::new(
        fh.mhs.dual()?,
        -fh.b,
        -fh.a,
        fh.psi_functional.clone(),
        fh.phi_class.clone(),
    )
}

/// `H(p)` framed by `(a-p, b-p)`; the Betti vectors are unchanged.
pub fn twist_framed(fh: &FramedMhs, p: i32) -> Result<FramedMhs, FramedError> {
    FramedMhs::new(
        fh.mhs.twist(p)?,
        fh.a - p,
        fh.b - p,
        fh.phi_class.clone(),
        fh.psi_functional.clone(),
    )
}

fn sign_power(k: i32) -> Rational {
    if k.rem_euclid(2) == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// `conj(H)` framed by `(-1)^a φ` and `(-1)^b ψ`.
pub fn conjugate_framed(fh: &FramedMhs) -> Result<FramedMhs, FramedError> {
    let sa = sign_power(fh.a);
    let sb = sign_power(fh.b);
    FramedMhs::new(
        fh.mhs.conjugate()?,
        fh.a,
        fh.b,
        fh.phi_class.iter().map(|x| x * &sa).collect(),
        fh.psi_functional.iter().map(|x| x * &sb).collect(),
    )
}

#[derive(Debug, Clone)]
pub struct MorphismReport {
    /// `max_k` residual of `f(W_k) ⊆ W'_k`.
    pub weight_residual: f64,
    /// `max_p` residual of `f(F^p) ⊆ F'^p`.
    pub hodge_residual: f64,
    /// Distance of `φ' − m₁ f(φ)` from `W'_{2a-1}`.
    pub phi_residual: f64,
    /// Largest value of `ψ − m₂ ψ'∘f` on a basis of `W_{2b}`.
    pub psi_residual: f64,
    pub is_framed_morphism: bool,
    /// `(m₁ Ht₁(H), m₂ Ht₁(H'))`.
    pub height1: (f64, f64),
    /// `(m₁ Ht₂(H), m₂ Ht₂(H'))`.
    pub height2: (f64, f64),
}

impl MorphismReport {
    pub fn heights_agree(&self, tol: f64) -> bool {
        (self.height1.0 - self.height1.1).abs() <= tol && (self.height2.0 - self.height2.1).abs() <= tol
    }
}

/// Checks that `f: H → H'` (Betti coordinates) is a morphism with
/// `φ' = m₁ f(φ)` and `ψ = m₂ ψ'∘f` on graded pieces, and evaluates both sides
/// of `m₁ Ht_i(H) = m₂ Ht_i(H')`.
pub fn framed_morphism_check(
    f: &CMatrix,
    fh: &FramedMhs,
    fh2: &FramedMhs,
    m1: i64,
    m2: i64,
    tol: &Tolerances,
) -> Result<MorphismReport, FramedError> {
    let (h, h2) = (&fh.mhs, &fh2.mhs);
    if f.nrows() != h2.dimension() || f.ncols() != h.dimension() {
        return Err(FramedError::InvalidFraming(format!(
            "morphism must be {}x{}",
            h2.dimension(),
            h.dimension()
        )));
    }
    if fh.a != fh2.a || fh.b != fh2.b {
        return Err(FramedError::InvalidFraming(
            "framings have different weights".into(),
        ));
    }
    let (wlo, whi) = h.weight_range();
    let mut weight_residual: f64 = 0.0;
    for k in wlo..=whi {
        let img = h.w(k).image(f).map_err(DeligneError::from)?;
        weight_residual = weight_residual.max(h2.w(k).containment_residual(&img));
    }
    let (flo, fhi) = h.hodge_range();
    let mut hodge_residual: f64 = 0.0;
    for p in flo..=fhi {
        let img = h.f(p).image(f).map_err(DeligneError::from)?;
        hodge_residual = hodge_residual.max(h2.f(p).containment_residual(&img));
    }
    let m1c = c(m1 as f64, 0.0);
    let m2c = c(m2 as f64, 0.0);
    let phi_gap = to_complex(&fh2.phi_class) - f * to_complex(&fh.phi_class) * m1c;
    let phi_residual = h2.w(2 * fh.a - 1).residual(&phi_gap);
    let psi_gap = to_complex(&fh.psi_functional) - f.transpose() * to_complex(&fh2.psi_functional) * m2c;
    let psi_residual = h
        .w(2 * fh.b)
        .basis_vectors()
        .iter()
        .map(|v| pair(&psi_gap, v).norm())
        .fold(0.0, f64::max);
    let is_framed_morphism = [weight_residual, hodge_residual, phi_residual, psi_residual]
        .iter()
        .all(|&r| r <= tol.subspace * (1.0 + frobenius(f)));

    let d1 = HeightData::compute_with(fh, tol)?;
    let d2 = HeightData::compute_with(fh2, tol)?;
    Ok(MorphismReport {
        weight_residual,
        hodge_residual,
        phi_residual,
        psi_residual,
        is_framed_morphism,
        height1: (m1 as f64 * d1.height1(), m2 as f64 * d2.height1()),
        height2: (m1 as f64 * d1.height2()?, m2 as f64 * d2.height2()?),
    })
}

/// Frames a random Hodge-Tate sample by the first generator of the weight
/// `2a` block and the matching dual coordinate of the weight `2b` block.
pub fn sample_framing(s: &HodgeTateSample, a: i32, b: i32) -> Result<FramedMhs, FramedError> {
    let mut offset = 0;
    let mut phi = None;
    let mut psi_row = None;
    for (w, cols) in &s.blocks {
        if *w == 2 * a {
            phi = cols.first().cloned();
        }
        if *w == 2 * b && !cols.is_empty() {
            psi_row = Some(offset);
        }
        offset += cols.len();
    }
    let (Some(phi), Some(row)) = (phi, psi_row) else {
        return Err(FramedError::InvalidFraming(format!(
            "sample has no blocks of weights {} and {}",
            2 * a,
            2 * b
        )));
    };
    // the basis change is unimodular, so its inverse is integral
    let g_inv = inverse(&rational_rows_to_matrix(&s.basis_change)).map_err(DeligneError::from)?;
    let psi: QVector = g_inv.row(row).iter().map(|z| int(z.re.round() as i64)).collect();
    FramedMhs::new(s.mhs.clone(), a, b, phi, psi)
}
