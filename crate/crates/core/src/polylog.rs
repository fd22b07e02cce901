//! Polylogarithms along continuation paths, single-valued polylogarithms, and
//! the polylogarithm structure `H(z)`.
//!
//! `Li_k` is evaluated by its series for `|t| ≤ 1/2`. Farther out the values
//! are transported along a polyline: on each segment, with `u = log t`,
//!
//! `Li_k(t_e) = Σ_{j=0}^{k-2} Li_{k-j}(t_s) Δu^j / j! + ∫ (u_e - u)^{k-2}/(k-2)! Li_1(t) dt/t`
//!
//! while `log t` and `Li_1 = -log(1-t)` are continued by principal increments,
//! which is exact for straight segments avoiding `0` and `1`.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::deligne::DeligneError;
use crate::framed::{FramedError, FramedMhs};
use crate::linalg::{
    c, conj_matrix, frobenius, identity, inverse, nilpotent_exp, nilpotent_log, CMatrix, LinalgError, Scalar,
    Subspace,
};
use crate::mhs::{two_pi_i, HodgeFiltration, MhsError, MixedHodgeStructure, WeightFiltration};
use crate::rational::{unit_vector, RationalSubspace};

pub const DEFAULT_SERIES_TERMS: usize = 400;
pub const DEFAULT_QUADRATURE_STEP: f64 = 0.1;
pub const DEFAULT_QUADRATURE_ORDER: usize = 20;
/// Successive quadrature refinements must agree to this.
pub const QUADRATURE_TOLERANCE: f64 = 1e-11;
const SERIES_RADIUS: f64 = 0.5;
const MAX_PANELS: usize = 1 << 16;

#[derive(Debug, Clone, Error)]
pub enum PolylogError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("z = {0} lies on a branch cut of the principal branch; give an explicit path")]
    OnBranchCut(Scalar),
    #[error("path segment {segment} passes through the singularity {point}")]
    PathThroughSingularity { segment: usize, point: f64 },
    #[error("{0} did not converge")]
    NonConvergent(&'static str),
    #[error("invalid polylogarithm structure: {0}")]
    InvalidMhs(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Mhs(#[from] MhsError),
    #[error(transparent)]
    Deligne(#[from] DeligneError),
    #[error(transparent)]
    Framed(#[from] FramedError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolylogContext {
    pub z: Scalar,
    /// Truncation rank; matrices are `(N+1) x (N+1)`.
    pub n: usize,
    /// Polyline from a start point with `|t| ≤ 1/2` to `z`; empty means the
    /// principal branch. `z` itself is appended when missing.
    pub path: Vec<Scalar>,
    pub series_terms: usize,
    /// Initial panel length along each segment.
    pub quadrature_step: f64,
    pub quadrature_order: usize,
}

impl PolylogContext {
    pub fn new(z: Scalar, n: usize) -> Result<Self, PolylogError> {
        Self::with_path(z, n, Vec::new())
    }

    pub fn with_path(z: Scalar, n: usize, path: Vec<Scalar>) -> Result<Self, PolylogError> {
        let ctx = PolylogContext {
            z,
            n,
            path,
            series_terms: DEFAULT_SERIES_TERMS,
            quadrature_step: DEFAULT_QUADRATURE_STEP,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        };
        ctx.check()?;
        Ok(ctx)
    }

    fn check(&self) -> Result<(), PolylogError> {
        let z = self.z;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(PolylogError::InvalidArgument(format!("z = {z} is not finite")));
        }
        if z.norm() == 0.0 || (z - 1.0).norm() == 0.0 {
            return Err(PolylogError::InvalidArgument(format!(
                "z = {z} is a singular point"
            )));
        }
        if self.n == 0 {
            return Err(PolylogError::InvalidArgument("N must be at least 1".into()));
        }
        if self.path.is_empty() && on_principal_cut(z) {
            return Err(PolylogError::OnBranchCut(z));
        }
        Ok(())
    }

    /// The polyline actually integrated along, `None` when the series suffices.
    fn polyline(&self) -> Result<Option<Vec<Scalar>>, PolylogError> {
        let mut pts = if self.path.is_empty() {
            if self.z.norm() <= SERIES_RADIUS {
                return Ok(None);
            }
            vec![self.z / self.z.norm() * SERIES_RADIUS]
        } else {
            self.path.clone()
        };
        let start = pts[0];
        // 0.5·z/|z| can round to just above the radius
        if start.norm() > SERIES_RADIUS * (1.0 + 1e-12) || start.norm() == 0.0 || on_principal_cut(start) {
            return Err(PolylogError::InvalidArgument(format!(
                "path must start at a nonzero point with |t| ≤ 1/2 off (-∞,0], got {start}"
            )));
        }
        if pts.last() != Some(&self.z) {
            pts.push(self.z);
        }
        for (i, w) in pts.windows(2).enumerate() {
            for s in [0.0, 1.0] {
                if segment_distance(w[0], w[1], c(s, 0.0)) < 1e-12 {
                    return Err(PolylogError::PathThroughSingularity { segment: i, point: s });
                }
            }
        }
        Ok(Some(pts))
    }

    /// `log z` and `Li_1(z), …, Li_{k_max}(z)` on the branch fixed by the path.
    pub fn branch(&self, k_max: usize) -> Result<Branch, PolylogError> {
        self.check()?;
        let k_max = k_max.max(1);
        match self.polyline()? {
            None => Ok(Branch {
                log_z: self.z.ln(),
                li: li_series_all(k_max, self.z, self.series_terms)?,
            }),
            Some(pts) => {
                let mut state = Branch {
                    log_z: pts[0].ln(),
                    li: li_series_all(k_max, pts[0], self.series_terms)?,
                };
                for w in pts.windows(2) {
                    state = transport(&state, w[0], w[1], self)?;
                }
                Ok(state)
            }
        }
    }
}

fn on_principal_cut(z: Scalar) -> bool {
    z.im == 0.0 && (z.re <= 0.0 || z.re >= 1.0)
}

fn segment_distance(a: Scalar, b: Scalar, p: Scalar) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * s - p).norm()
}

/// Values of `log` and `Li_1..Li_K` at one point of a continuation.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub log_z: Scalar,
    /// `li[k-1] = Li_k`.
    pub li: Vec<Scalar>,
}

impl Branch {
    pub fn li(&self, k: usize) -> Scalar {
        self.li[k - 1]
    }

    /// `log(z z̄) = 2 Re log z`, independent of the branch.
    pub fn log_zzbar(&self) -> f64 {
        2.0 * self.log_z.re
    }
}

/// `Σ_{n≥1} z^n / n^k` for `k = 1..=k_max`.
pub fn li_series_all(k_max: usize, z: Scalar, terms: usize) -> Result<Vec<Scalar>, PolylogError> {
    let mut out = vec![c(0.0, 0.0); k_max];
    if z.norm() >= 1.0 {
        return Err(PolylogError::NonConvergent("polylogarithm series"));
    }
    let mut zn = c(1.0, 0.0);
    for n in 1..=terms {
        zn *= z;
        let nf = n as f64;
        let mut scale = 1.0;
        for slot in out.iter_mut() {
            scale /= nf;
            *slot += zn * scale;
        }
        if zn.norm() / nf < 1e-18 {
            return Ok(out);
        }
    }
    Err(PolylogError::NonConvergent("polylogarithm series"))
}

pub fn li_series(k: usize, z: Scalar, terms: usize) -> Result<Scalar, PolylogError> {
    Ok(li_series_all(k.max(1), z, terms)?[k.max(1) - 1])
}

fn gauss_nodes(order: usize) -> Vec<(f64, f64)> {
    let order = NonZeroUsize::new(order.max(2)).expect("order is positive");
    GaussLegendre::new(order).as_node_weight_pairs().to_vec()
}

fn factorials(m: usize) -> Vec<f64> {
    let mut f = vec![1.0; m + 1];
    for i in 1..=m {
        f[i] = f[i - 1] * i as f64;
    }
    f
}

/// `I_m = ∫ (u_e - u)^m / m! Li_1(t) dt/t` over `[t_s, t_e]`, `m = 0..k_max-2`.
#[allow(clippy::too_many_arguments)]
fn remainder_integrals(
    from: &Branch,
    ts: Scalar,
    te: Scalar,
    u_e: Scalar,
    panels: usize,
    nodes: &[(f64, f64)],
    m_max: usize,
    inv_fact: &[f64],
) -> Vec<Scalar> {
    let li1_s = from.li(1);
    let d = te - ts;
    let h = 1.0 / panels as f64;
    let mut acc = vec![c(0.0, 0.0); m_max + 1];
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for &(x, w) in nodes {
            let s = mid + 0.5 * h * x;
            let t = ts + d * s;
            let u = from.log_z + (t / ts).ln();
            let li1 = li1_s - ((1.0 - t) / (1.0 - ts)).ln();
            let base = li1 * d / t * (0.5 * h * w);
            let gap = u_e - u;
            let mut power = c(1.0, 0.0);
            for (m, slot) in acc.iter_mut().enumerate() {
                *slot += base * power * inv_fact[m];
                power *= gap;
            }
        }
    }
    acc
}

fn transport(from: &Branch, ts: Scalar, te: Scalar, ctx: &PolylogContext) -> Result<Branch, PolylogError> {
    let k_max = from.li.len();
    let du = (te / ts).ln();
    let u_e = from.log_z + du;
    let li1_e = from.li(1) - ((1.0 - te) / (1.0 - ts)).ln();
    let mut li = vec![li1_e; k_max];
    if k_max >= 2 {
        let fact = factorials(k_max);
        let inv_fact: Vec<f64> = fact.iter().map(|f| 1.0 / f).collect();
        let nodes = gauss_nodes(ctx.quadrature_order);
        let step = if ctx.quadrature_step > 0.0 {
            ctx.quadrature_step
        } else {
            DEFAULT_QUADRATURE_STEP
        };
        let mut panels = ((te - ts).norm() / step).ceil().max(1.0) as usize;
        let m_max = k_max - 2;
        let mut prev = remainder_integrals(from, ts, te, u_e, panels, &nodes, m_max, &inv_fact);
        let integrals = loop {
            panels *= 2;
            if panels > MAX_PANELS {
                return Err(PolylogError::NonConvergent("path quadrature"));
            }
            let next = remainder_integrals(from, ts, te, u_e, panels, &nodes, m_max, &inv_fact);
            let diff = prev
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
                .fold(0.0, f64::max);
            if diff < QUADRATURE_TOLERANCE {
                break next;
            }
            prev = next;
        };
        for k in 2..=k_max {
            let mut v = integrals[k - 2];
            let mut power = c(1.0, 0.0);
            for j in 0..=k - 2 {
                v += from.li(k - j) * power * inv_fact[j];
                power *= du;
            }
            li[k - 1] = v;
        }
    }
    Ok(Branch { log_z: u_e, li })
}

/// `Li_k(z)` on the branch of `ctx`.
pub fn li(k: usize, ctx: &PolylogContext) -> Result<Scalar, PolylogError> {
    if k == 0 {
        return Err(PolylogError::InvalidArgument("k must be at least 1".into()));
    }
    Ok(ctx.branch(k)?.li(k))
}

/// Bernoulli numbers `B_0..B_{n-1}` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n);
    for m in 0..n {
        if m == 0 {
            b.push(BigRational::one());
            continue;
        }
        // Σ_{k=0}^{m} C(m+1, k) B_k = 0
        let mut binom = BigRational::one();
        let mut sum = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            sum += &binom * bk;
            binom = binom * BigRational::from_integer((m + 1 - k).into())
                / BigRational::from_integer((k + 1).into());
        }
        b.push(-sum / binom);
    }
    b
}

fn bernoulli_f64(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        bernoulli_numbers(64)
            .iter()
            .map(|q| q.to_f64().unwrap_or(f64::NAN))
            .collect()
    });
    table
        .get(k)
        .copied()
        .unwrap_or_else(|| bernoulli_numbers(k + 1)[k].to_f64().unwrap_or(f64::NAN))
}

/// Brown's `𝓛_b = Li_b − Σ_{k=0}^{b-1} (−1)^{b−k} (log z z̄)^k/k! conj(Li_{b−k})`.
pub fn sv_brown_from(b: usize, br: &Branch) -> Scalar {
    let l = br.log_zzbar();
    let fact = factorials(b);
    let mut out = br.li(b);
    for k in 0..b {
        let sign = if (b - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        out -= br.li(b - k).conj() * (sign * l.powi(k as i32) / fact[k]);
    }
    out
}

/// `D_b`: real parts for odd `b`, `i` times imaginary parts for even `b`,
/// weighted by `B_k (log z z̄)^k / k!`.
pub fn sv_bd_from(b: usize, br: &Branch) -> Scalar {
    let l = br.log_zzbar();
    let fact = factorials(b);
    let mut sum = 0.0;
    for k in 0..b {
        let part = if b % 2 == 1 {
            br.li(b - k).re
        } else {
            br.li(b - k).im
        };
        sum += bernoulli_f64(k) * l.powi(k as i32) / fact[k] * part;
    }
    if b % 2 == 1 {
        c(sum, 0.0)
    } else {
        c(0.0, sum)
    }
}

pub fn sv_brown(b: usize, ctx: &PolylogContext) -> Result<Scalar, PolylogError> {
    if b == 0 {
        return Err(PolylogError::InvalidArgument("b must be at least 1".into()));
    }
    Ok(sv_brown_from(b, &ctx.branch(b)?))
}

pub fn sv_bd(b: usize, ctx: &PolylogContext) -> Result<Scalar, PolylogError> {
    if b == 0 {
        return Err(PolylogError::InvalidArgument("b must be at least 1".into()));
    }
    Ok(sv_bd_from(b, &ctx.branch(b)?))
}

pub fn tau(n: usize, lambda: Scalar) -> CMatrix {
    let mut t = CMatrix::zeros(n, n);
    let mut p = c(1.0, 0.0);
    for i in 0..n {
        t[(i, i)] = p;
        p *= lambda;
    }
    t
}

#[derive(Debug, Clone)]
pub struct PolylogMatrices {
    pub l: CMatrix,
    pub a: CMatrix,
    pub b: CMatrix,
    pub e0: CMatrix,
    pub ell: Vec<Scalar>,
    pub branch: Branch,
}

impl PolylogMatrices {
    /// `A conj(A)^{-1}`.
    pub fn conjugation_matrix(&self) -> Result<CMatrix, LinalgError> {
        Ok(&self.a * inverse(&conj_matrix(&self.a))?)
    }

    /// `[[1,0],[ℓ,Id]] e^{log(z z̄) e_0} τ(−1) [[1,0],[−conj ℓ,Id]]`, which
    /// equals `A conj(A)^{-1}`.
    pub fn conjugation_matrix_closed_form(&self) -> Result<CMatrix, LinalgError> {
        let n = self.l.nrows();
        let mut left = identity(n);
        let mut right = identity(n);
        for (i, v) in self.ell.iter().enumerate() {
            left[(i + 1, 0)] = *v;
            right[(i + 1, 0)] = -v.conj();
        }
        let shift = nilpotent_exp(&(&self.e0 * c(self.branch.log_zzbar(), 0.0)))?;
        Ok(left * shift * tau(n, c(-1.0, 0.0)) * right)
    }

    /// `‖A conj(A)^{-1} τ(−1) − closed form · τ(−1)‖_F`.
    pub fn closed_form_residual(&self) -> Result<f64, LinalgError> {
        let t = tau(self.l.nrows(), c(-1.0, 0.0));
        Ok(frobenius(&(&self.b - self.conjugation_matrix_closed_form()? * t)))
    }

    /// `(L^{-1}·[[1,0],[ℓ,Id]] e^{log z e_0})` should be the identity.
    pub fn block_identity_residual(&self) -> Result<f64, LinalgError> {
        let n = self.l.nrows();
        let mut left = identity(n);
        for (i, v) in self.ell.iter().enumerate() {
            left[(i + 1, 0)] = *v;
        }
        let expected = left * nilpotent_exp(&(&self.e0 * self.branch.log_z))?;
        Ok(frobenius(&(&self.l - expected)))
    }
}

pub fn build_matrices(ctx: &PolylogContext) -> Result<PolylogMatrices, PolylogError> {
    let n = ctx.n + 1;
    let br = ctx.branch(ctx.n)?;
    let fact = factorials(ctx.n);
    let mut l = identity(n);
    for row in 1..n {
        l[(row, 0)] = -br.li(row);
        for col in 1..row {
            l[(row, col)] = br.log_z.powi((row - col) as i32) / fact[row - col];
        }
    }
    let a = &l * tau(n, two_pi_i());
    let b = &a * inverse(&conj_matrix(&a))? * tau(n, c(-1.0, 0.0));
    let mut e0 = CMatrix::zeros(n, n);
    for k in 1..n - 1 {
        e0[(k + 1, k)] = c(1.0, 0.0);
    }
    let ell = (1..n).map(|k| -br.li(k)).collect();
    Ok(PolylogMatrices {
        l,
        a,
        b,
        e0,
        ell,
        branch: br,
    })
}

/// `H(z)` in Betti coordinates: `W_{-2k} = Q^{[k,N]}`,
/// `F^{-k} = A(z)^{-1} C^{[0,k]}`, comparison matrix `A(z)`.
pub fn polylog_mhs(ctx: &PolylogContext) -> Result<MixedHodgeStructure, PolylogError> {
    let m = build_matrices(ctx)?;
    polylog_mhs_from(ctx.n, &m)
}

pub fn polylog_mhs_from(big_n: usize, m: &PolylogMatrices) -> Result<MixedHodgeStructure, PolylogError> {
    let n = big_n + 1;
    let top = -2 * big_n as i32;
    let weight = WeightFiltration::from_fn(n, top, 0, |w| {
        let start = (-w + 1).div_euclid(2) as usize;
        RationalSubspace::coordinate(n, start..n)
    });
    let a_inv = inverse(&m.a)?;
    let hodge = HodgeFiltration::from_fn(n, -(big_n as i32), 0, |p| {
        let k = (-p) as usize;
        Subspace::from_columns(
            &a_inv.columns(0, k + 1).into_owned(),
            crate::linalg::DEFAULT_RANK_TOLERANCE,
        )
        .expect("finite entries")
    });
    let h = MixedHodgeStructure::new(weight, hodge, Some(m.a.clone()))?;
    let report = h.validate();
    if !report.is_valid() {
        return Err(PolylogError::InvalidMhs(report.to_string()));
    }
    Ok(h)
}

/// `H(z)_{-a,-b}` with `φ = e_a`, `ψ = e_b^∨`.
pub fn polylog_framed(ctx: &PolylogContext, a: usize, b: usize) -> Result<FramedMhs, PolylogError> {
    if a >= b || b > ctx.n {
        return Err(PolylogError::InvalidArgument(format!(
            "framing needs 0 ≤ a < b ≤ N, got a = {a}, b = {b}, N = {}",
            ctx.n
        )));
    }
    let h = polylog_mhs(ctx)?;
    let n = ctx.n + 1;
    Ok(FramedMhs::new(
        h,
        -(a as i32),
        -(b as i32),
        unit_vector(n, a),
        unit_vector(n, b),
    )?)
}

/// `(i/2) log B(z)` in de Rham coordinates.
pub fn delta_closed_form(ctx: &PolylogContext) -> Result<CMatrix, PolylogError> {
    let m = build_matrices(ctx)?;
    Ok(delta_closed_form_from(&m)?)
}

pub fn delta_closed_form_from(m: &PolylogMatrices) -> Result<CMatrix, LinalgError> {
    Ok(nilpotent_log(&m.b)? * c(0.0, 0.5))
}

/// Residual of Betti reality `c(δ) = δ` for the closed form, with
/// `c(X) = A conj(A)^{-1} conj(X) (A conj(A)^{-1})^{-1}`.
pub fn closed_form_reality_residual(m: &PolylogMatrices) -> Result<f64, LinalgError> {
    let d = delta_closed_form_from(m)?;
    let cm = m.conjugation_matrix()?;
    let cd = &cm * conj_matrix(&d) * inverse(&cm)?;
    Ok(frobenius(&(cd - d)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormHeights {
    pub ht1: f64,
    pub ht2: f64,
}

/// Closed forms for `H(z)_{-a,-b}`:
/// `Ht₁ = Im(−𝓛_b/(2πi)^b)` and `Ht₂ = D_b/(i (2πi)^b)` for `a = 0`;
/// `Ht₁ = Im((log z z̄/2πi)^{b−a}/(b−a)!)` for `a > 0`;
/// `Ht₂ = −log z z̄/(2π)` for `b = a+1 > 1` and `0` for other `a > 0`.
pub fn heights_closed_form(
    ctx: &PolylogContext,
    a: usize,
    b: usize,
) -> Result<ClosedFormHeights, PolylogError> {
    let br = ctx.branch(b.max(1))?;
    Ok(heights_closed_form_from(&br, a, b))
}

pub fn heights_closed_form_from(br: &Branch, a: usize, b: usize) -> ClosedFormHeights {
    let tpi = two_pi_i();
    let l = br.log_zzbar();
    if a == 0 {
        let tb = tpi.powi(b as i32);
        ClosedFormHeights {
            ht1: (-sv_brown_from(b, br) / tb).im,
            ht2: (sv_bd_from(b, br) / (c(0.0, 1.0) * tb)).re,
        }
    } else {
        let d = (b - a) as i32;
        let ht1 = ((c(l, 0.0) / tpi).powi(d) / factorials(b - a)[b - a]).im;
        let ht2 = if b == a + 1 {
            -l / (2.0 * std::f64::consts::PI)
        } else {
            0.0
        };
        ClosedFormHeights { ht1, ht2 }
    }
}
