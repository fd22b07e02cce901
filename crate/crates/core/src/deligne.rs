//! Deligne bigrading, grading operator, Hodge components and the δ-splitting.
//!
//! Everything is computed in the Betti coordinates of the input structure.
//! Projectors are oblique: `Π_{p,q}` is the identity on `I^{p,q}` and kills
//! every other piece.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::linalg::{
    c, conj_matrix, frobenius, inverse, nilpotent_exp, nilpotent_log_with_tolerance, pseudo_inverse, svd,
    CMatrix, LinalgError, Subspace, DEFAULT_RANK_TOLERANCE,
};
use crate::mhs::{MixedHodgeStructure, ValidationReport};
use crate::rational::{to_complex, QVector};

/// Environment variable overriding every numerical tolerance at once.
pub const TOLERANCE_ENV: &str = "MHS_TOLERANCE";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative singular value cutoff for rank decisions.
    pub rank: f64,
    /// Subspace residuals in axiom and lift checks.
    pub subspace: f64,
    /// Residual of `conj(Y) = e^{-2iδ}·Y`.
    pub splitting: f64,
    /// Imaginary parts that must vanish.
    pub reality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank: DEFAULT_RANK_TOLERANCE,
            subspace: 1e-8,
            splitting: 1e-9,
            reality: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            rank: tol,
            subspace: tol,
            splitting: tol,
            reality: tol,
        }
    }

    /// Defaults, or `MHS_TOLERANCE` for all four when it parses as a positive float.
    pub fn from_env() -> Self {
        match std::env::var(TOLERANCE_ENV) {
            Ok(s) => Self::parse_override(&s).unwrap_or_default(),
            Err(_) => Self::default(),
        }
    }

    pub fn parse_override(s: &str) -> Option<Self> {
        let t: f64 = s.trim().parse().ok()?;
        (t.is_finite() && t > 0.0).then(|| Self::uniform(t))
    }
}

#[derive(Debug, Clone, Error)]
pub enum DeligneError {
    #[error("invalid mixed Hodge structure: {0}")]
    InvalidMhs(ValidationReport),
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("{what}: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ResidualTooLarge {
        what: &'static str,
        residual: f64,
        tolerance: f64,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `V_C = ⊕ I^{p,q}` together with the oblique projectors it defines.
#[derive(Debug, Clone)]
pub struct Bigrading {
    dimension: usize,
    pieces: BTreeMap<(i32, i32), Subspace>,
    /// Columns: bases of the pieces in key order.
    change: CMatrix,
    change_inv: CMatrix,
    offsets: BTreeMap<(i32, i32), (usize, usize)>,
    graded_bases: BTreeMap<i32, Vec<QVector>>,
    graded_coords: BTreeMap<i32, CMatrix>,
}

/// `U^r_s = Σ_{j≥0} F^{r-j} ∩ W_{s-j}`.
/// Memoised `F^p ∩ W_k` and `conj F^p ∩ W_k`, and their sums along diagonals.
struct Meets<'a> {
    h: &'a MixedHodgeStructure,
    meets: HashMap<(i32, i32, bool), Subspace>,
    sums: HashMap<(i32, i32, bool), Subspace>,
}

impl<'a> Meets<'a> {
    fn new(h: &'a MixedHodgeStructure) -> Self {
        Meets {
            h,
            meets: HashMap::new(),
            sums: HashMap::new(),
        }
    }

    fn meet(&mut self, p: i32, k: i32, conj: bool) -> Result<Subspace, LinalgError> {
        if let Some(s) = self.meets.get(&(p, k, conj)) {
            return Ok(s.clone());
        }
        let f = if conj { self.h.f_conj(p) } else { self.h.f(p) };
        let s = f.intersect(&self.h.w(k))?;
        self.meets.insert((p, k, conj), s.clone());
        Ok(s)
    }

    /// `U^r_s = Σ_{j≥0} F^{r-j} ∩ W_{s-j}` (conjugated when `conj`).
    fn u_space(&mut self, r: i32, s: i32, conj: bool) -> Result<Subspace, LinalgError> {
        let (wlo, _) = self.h.weight_range();
        if s < wlo {
            return Ok(Subspace::zero(self.h.dimension()));
        }
        if let Some(u) = self.sums.get(&(r, s, conj)) {
            return Ok(u.clone());
        }
        let u = self.meet(r, s, conj)?.sum(&self.u_space(r - 1, s - 1, conj)?)?;
        self.sums.insert((r, s, conj), u.clone());
        Ok(u)
    }
}

/// Deligne's `I^{p,q} = F^p ∩ W_{p+q} ∩ (conj F^q ∩ W_{p+q} + conj U^{q-1}_{p+q-2})`.
pub fn bigrading(h: &MixedHodgeStructure) -> Result<Bigrading, DeligneError> {
    bigrading_with(h, &Tolerances::default())
}

pub fn bigrading_with(h: &MixedHodgeStructure, tol: &Tolerances) -> Result<Bigrading, DeligneError> {
    let report = h.validate();
    if !report.is_valid() {
        return Err(DeligneError::InvalidMhs(report));
    }
    bigrading_unchecked(h, tol)
}

/// As [`bigrading_with`] for a structure already known to be valid.
pub(crate) fn bigrading_unchecked(
    h: &MixedHodgeStructure,
    tol: &Tolerances,
) -> Result<Bigrading, DeligneError> {
    let n = h.dimension();
    let mut pieces = BTreeMap::new();
    if n > 0 {
        let (flo, fhi) = h.hodge_range();
        let mut meets = Meets::new(h);
        for k in h.weight().weights() {
            for p in flo..=fhi {
                let q = k - p;
                let left = meets.meet(p, k, false)?;
                if left.is_zero() {
                    continue;
                }
                let right = meets.meet(q, k, true)?.sum(&meets.u_space(q - 1, k - 2, true)?)?;
                let piece = left.intersect(&right)?;
                if !piece.is_zero() {
                    pieces.insert((p, q), piece);
                }
            }
        }
    }
    Bigrading::from_pieces(h, pieces, tol)
}

impl Bigrading {
    fn from_pieces(
        h: &MixedHodgeStructure,
        pieces: BTreeMap<(i32, i32), Subspace>,
        tol: &Tolerances,
    ) -> Result<Self, DeligneError> {
        let n = h.dimension();
        let total: usize = pieces.values().map(Subspace::dim).sum();
        if total != n {
            return Err(DeligneError::NumericalDegeneracy(format!(
                "bigrading pieces have total dimension {total}, expected {n}"
            )));
        }
        let mut change = CMatrix::zeros(n, n);
        let mut offsets = BTreeMap::new();
        let mut col = 0;
        for (&key, s) in &pieces {
            change.view_mut((0, col), (n, s.dim())).copy_from(s.basis());
            offsets.insert(key, (col, s.dim()));
            col += s.dim();
        }
        if n > 0 {
            let (_, sigma, _) = svd(&change);
            let smax = sigma.first().copied().unwrap_or(0.0);
            let smin = sigma.last().copied().unwrap_or(0.0);
            if smin <= tol.rank * smax {
                return Err(DeligneError::NumericalDegeneracy(format!(
                    "bigrading pieces are not independent (σ_min/σ_max = {:.3e})",
                    smin / smax
                )));
            }
        }
        let change_inv = inverse(&change)?;

        let mut graded_bases = BTreeMap::new();
        let mut graded_coords = BTreeMap::new();
        for k in h.weight().weights() {
            let wk = h.weight().get(k);
            let wk1 = h.weight().get(k - 1);
            let g = wk.complement_of(&wk1);
            if g.is_empty() {
                continue;
            }
            // coordinates on W_k relative to [G_k | basis of W_{k-1}], first block only
            let mut frame = CMatrix::zeros(n, wk.dim());
            for (j, v) in g.iter().chain(wk1.basis()).enumerate() {
                frame.set_column(j, &to_complex(v));
            }
            let pinv = pseudo_inverse(&frame, tol.rank);
            graded_coords.insert(k, pinv.rows(0, g.len()).into_owned());
            graded_bases.insert(k, g);
        }
        Ok(Bigrading {
            dimension: n,
            pieces,
            change,
            change_inv,
            offsets,
            graded_bases,
            graded_coords,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Nonzero pieces only.
    pub fn pieces(&self) -> &BTreeMap<(i32, i32), Subspace> {
        &self.pieces
    }

    pub fn piece(&self, p: i32, q: i32) -> Subspace {
        self.pieces
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| Subspace::zero(self.dimension))
    }

    pub fn dim(&self, p: i32, q: i32) -> usize {
        self.pieces.get(&(p, q)).map_or(0, Subspace::dim)
    }

    /// Weights `p+q` carried by some nonzero piece.
    pub fn weights(&self) -> Vec<i32> {
        let mut w: Vec<i32> = self.pieces.keys().map(|&(p, q)| p + q).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    fn projector_where(&self, pred: impl Fn(i32, i32) -> bool) -> CMatrix {
        let n = self.dimension;
        let mut e = CMatrix::zeros(n, n);
        for (&(p, q), &(start, len)) in &self.offsets {
            if pred(p, q) {
                for i in start..start + len {
                    e[(i, i)] = c(1.0, 0.0);
                }
            }
        }
        &self.change * e * &self.change_inv
    }

    /// `Π_{p,q}`.
    pub fn projector(&self, p: i32, q: i32) -> CMatrix {
        self.projector_where(|a, b| a == p && b == q)
    }

    /// `Π_k = Σ_{p+q=k} Π_{p,q}`.
    pub fn weight_projector(&self, k: i32) -> CMatrix {
        self.projector_where(|a, b| a + b == k)
    }

    /// `Y = Σ_k k Π_k`.
    pub fn grading_operator(&self) -> CMatrix {
        let n = self.dimension;
        let mut d = CMatrix::zeros(n, n);
        for (&(p, q), &(start, len)) in &self.offsets {
            for i in start..start + len {
                d[(i, i)] = c(f64::from(p + q), 0.0);
            }
        }
        &self.change * d * &self.change_inv
    }

    /// Rational vectors of `W_k` whose classes form the chosen basis of `Gr^W_k`.
    pub fn graded_basis(&self, k: i32) -> &[QVector] {
        self.graded_bases.get(&k).map_or(&[], Vec::as_slice)
    }

    /// `π_k`: `V_C → Gr^W_k`, in the coordinates of [`Self::graded_basis`].
    pub fn graded_projection(&self, k: i32) -> CMatrix {
        match self.graded_coords.get(&k) {
            Some(m) => m * self.weight_projector(k),
            None => CMatrix::zeros(0, self.dimension),
        }
    }

    /// `ι_k`: `Gr^W_k → I_k = ⊕_{p+q=k} I^{p,q}`.
    pub fn graded_lift(&self, k: i32) -> CMatrix {
        let g = self.graded_basis(k);
        let mut gm = CMatrix::zeros(self.dimension, g.len());
        for (j, v) in g.iter().enumerate() {
            gm.set_column(j, &to_complex(v));
        }
        self.weight_projector(k) * gm
    }

    pub fn projectors(&self) -> Projectors {
        let pq = self
            .pieces
            .keys()
            .map(|&(p, q)| ((p, q), self.projector(p, q)))
            .collect();
        let weights = self.weights();
        let by_weight = |f: &dyn Fn(i32) -> CMatrix| weights.iter().map(|&k| (k, f(k))).collect();
        Projectors {
            pq,
            weight: by_weight(&|k| self.weight_projector(k)),
            graded_projection: by_weight(&|k| self.graded_projection(k)),
            graded_lift: by_weight(&|k| self.graded_lift(k)),
        }
    }

    /// `X^{a,b} = Σ Π_{p+a,q+b} X Π_{p,q}`; components below `prune` (Frobenius) are dropped.
    pub fn hodge_components(&self, x: &CMatrix) -> BTreeMap<(i32, i32), CMatrix> {
        let prune = 1e-13 * (1.0 + frobenius(x));
        let split = &self.change_inv * x * &self.change;
        let n = self.dimension;
        let mut out: BTreeMap<(i32, i32), CMatrix> = BTreeMap::new();
        for (&(p, q), &(cs, cl)) in &self.offsets {
            for (&(p2, q2), &(rs, rl)) in &self.offsets {
                let block = split.view((rs, cs), (rl, cl));
                let mut e = CMatrix::zeros(n, n);
                e.view_mut((rs, cs), (rl, cl)).copy_from(&block);
                let comp = out
                    .entry((p2 - p, q2 - q))
                    .or_insert_with(|| CMatrix::zeros(n, n));
                *comp += e;
            }
        }
        out.into_iter()
            .map(|(k, e)| (k, &self.change * e * &self.change_inv))
            .filter(|(_, m)| frobenius(m) > prune)
            .collect()
    }

    /// `X_(d) = Σ_k Π_{k+d} X Π_k`, the part of `X` shifting the weight by `d`.
    pub fn degree_component(&self, x: &CMatrix, d: i32) -> CMatrix {
        let split = &self.change_inv * x * &self.change;
        let n = self.dimension;
        let mut e = CMatrix::zeros(n, n);
        for (&(p, q), &(cs, cl)) in &self.offsets {
            for (&(p2, q2), &(rs, rl)) in &self.offsets {
                if p2 + q2 - (p + q) == d {
                    e.view_mut((rs, cs), (rl, cl))
                        .copy_from(&split.view((rs, cs), (rl, cl)));
                }
            }
        }
        &self.change * e * &self.change_inv
    }

    pub fn axiom_residuals(&self, h: &MixedHodgeStructure) -> Result<AxiomResiduals, LinalgError> {
        let n = self.dimension;
        let span_where = |pred: &dyn Fn(i32, i32) -> bool| -> Result<Subspace, LinalgError> {
            let mut acc = Subspace::zero(n);
            for (&(p, q), s) in &self.pieces {
                if pred(p, q) {
                    acc = acc.sum(s)?;
                }
            }
            Ok(acc)
        };
        let distance = |a: &Subspace, b: &Subspace| -> f64 {
            if a.dim() != b.dim() {
                return f64::INFINITY;
            }
            a.containment_residual(b).max(b.containment_residual(a))
        };
        let mut out = AxiomResiduals::default();

        let (_, sigma, _) = svd(&self.change);
        let total: usize = self.pieces.values().map(Subspace::dim).sum();
        out.independence = match (sigma.first(), sigma.last()) {
            _ if n == 0 => 1.0,
            (Some(&hi), Some(&lo)) if total == n && hi > 0.0 => lo / hi,
            _ => 0.0,
        };
        if n == 0 {
            return Ok(out);
        }

        let (flo, fhi) = h.hodge_range();
        for p in flo..=fhi + 1 {
            let s = span_where(&|a, _| a >= p)?;
            out.hodge = out.hodge.max(distance(&s, &h.f(p)));
        }
        let (wlo, whi) = h.weight_range();
        for k in wlo - 1..=whi {
            let s = span_where(&|a, b| a + b <= k)?;
            out.weight = out.weight.max(distance(&s, &h.w(k)));
        }
        for (&(p, q), s) in &self.pieces {
            let target = span_where(&|a, b| (a == q && b == p) || (a < q && b < p))?;
            out.conjugation = out.conjugation.max(target.containment_residual(&s.conj()));
        }
        Ok(out)
    }
}

/// Largest subspace residual for each bigrading axiom.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AxiomResiduals {
    /// `σ_min/σ_max` of the stacked piece bases; `0` on a dimension mismatch.
    pub independence: f64,
    /// `F^p = ⊕_{p'≥p} I^{p',q}`.
    pub hodge: f64,
    /// `W_k = ⊕_{p+q≤k} I^{p,q}`.
    pub weight: f64,
    /// `conj I^{p,q} ⊆ I^{q,p} + ⊕_{p'<p,q'<q} I^{q',p'}`.
    pub conjugation: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        self.hodge.max(self.weight).max(self.conjugation)
    }
}

#[derive(Debug, Clone)]
pub struct Projectors {
    pub pq: BTreeMap<(i32, i32), CMatrix>,
    pub weight: BTreeMap<i32, CMatrix>,
    pub graded_projection: BTreeMap<i32, CMatrix>,
    pub graded_lift: BTreeMap<i32, CMatrix>,
}

#[derive(Debug, Clone)]
pub struct SplittingData {
    pub bigrading: Bigrading,
    pub y: CMatrix,
    pub delta: CMatrix,
    pub delta_components: BTreeMap<(i32, i32), CMatrix>,
    /// `‖conj(Y) − e^{−2iδ}·Y·e^{2iδ}‖_F`.
    pub residual: f64,
    /// `max |Im δ_ij|`.
    pub reality_residual: f64,
    /// Frobenius norm of the Hodge components of δ outside `Λ^{-1,-1}`.
    pub lambda_residual: f64,
}

impl SplittingData {
    pub fn projectors(&self) -> Projectors {
        self.bigrading.projectors()
    }
}

/// `Ad(e^{-2iδ}) Y`.
pub fn conjugated_grading(y: &CMatrix, delta: &CMatrix) -> Result<CMatrix, LinalgError> {
    let g = nilpotent_exp(&(delta * c(0.0, -2.0)))?;
    let g_inv = nilpotent_exp(&(delta * c(0.0, 2.0)))?;
    Ok(g * y * g_inv)
}

fn weight_span(b: &Bigrading) -> i32 {
    let w = b.weights();
    match (w.first(), w.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0,
    }
}

/// The real `δ ∈ Λ^{-1,-1}` with `conj(Y) = e^{-2iδ}·Y`, solved one weight
/// drop at a time.
pub fn delta_splitting(h: &MixedHodgeStructure) -> Result<SplittingData, DeligneError> {
    delta_splitting_with(h, &Tolerances::default())
}

pub fn delta_splitting_with(
    h: &MixedHodgeStructure,
    tol: &Tolerances,
) -> Result<SplittingData, DeligneError> {
    let b = bigrading_with(h, tol)?;
    let n = b.dimension();
    let y = b.grading_operator();
    let y_bar = conj_matrix(&y);
    let mut delta = CMatrix::zeros(n, n);
    for m in 1..=weight_span(&b) {
        let r = conjugated_grading(&y, &delta)?;
        let step = (b.degree_component(&r, -m) - b.degree_component(&y_bar, -m)) / c(0.0, 2.0 * f64::from(m));
        delta += step;
    }
    finish(b, y, delta, tol)
}

/// Independent solver: Newton-like iteration on the full defining equation.
pub fn delta_fixed_point(
    h: &MixedHodgeStructure,
    tol: &Tolerances,
    max_iter: usize,
) -> Result<SplittingData, DeligneError> {
    let b = bigrading_with(h, tol)?;
    let n = b.dimension();
    let y = b.grading_operator();
    let y_bar = conj_matrix(&y);
    let span = weight_span(&b);
    let mut delta = CMatrix::zeros(n, n);
    for _ in 0..max_iter {
        let r = &y_bar - conjugated_grading(&y, &delta)?;
        if frobenius(&r) <= tol.splitting * 1e-3 {
            break;
        }
        for m in 1..=span {
            delta += b.degree_component(&r, -m) / c(0.0, -2.0 * f64::from(m));
        }
    }
    finish(b, y, delta, tol)
}

/// `δ = (i/2) log Σ_k conj(Π_k) Π_k`, read off from `e^{-2iδ}` mapping each
/// `I_k` onto `conj(I_k)` and acting trivially on `Gr^W`.
pub fn delta_from_projectors(b: &Bigrading) -> Result<CMatrix, LinalgError> {
    let n = b.dimension();
    let mut g = CMatrix::zeros(n, n);
    for k in b.weights() {
        let pk = b.weight_projector(k);
        g += conj_matrix(&pk) * pk;
    }
    Ok(nilpotent_log_with_tolerance(&g, 1e-8)? * c(0.0, 0.5))
}

fn finish(b: Bigrading, y: CMatrix, delta: CMatrix, tol: &Tolerances) -> Result<SplittingData, DeligneError> {
    let y_bar = conj_matrix(&y);
    let residual = frobenius(&(&y_bar - conjugated_grading(&y, &delta)?));
    let scale = 1.0 + frobenius(&y);
    if residual > tol.splitting * scale {
        return Err(DeligneError::ResidualTooLarge {
            what: "splitting equation",
            residual,
            tolerance: tol.splitting * scale,
        });
    }
    let reality_residual = delta.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let components = b.hodge_components(&delta);
    let lambda_residual = components
        .iter()
        .filter(|((a, bb), _)| *a >= 0 || *bb >= 0)
        .map(|(_, m)| frobenius(m))
        .fold(0.0, f64::max);
    Ok(SplittingData {
        bigrading: b,
        y,
        delta,
        delta_components: components,
        residual,
        reality_residual,
        lambda_residual,
    })
}
