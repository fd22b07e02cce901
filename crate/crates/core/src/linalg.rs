//! Tolerance-aware complex linear algebra.
//!
//! Subspaces are stored as orthonormal column bases. Every rank decision goes
//! through a singular value decomposition, with singular values below
//! `rank_tolerance * sigma_max` treated as zero.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Scalar field for all floating computations.
///
/// Everything downstream is written against this alias and the `CMatrix` /
/// `CVector` aliases below; switching to a wider float means swapping these
/// three lines and the `f64` tolerances.
pub type Scalar = Complex64;
pub type CMatrix = DMatrix<Scalar>;
pub type CVector = DVector<Scalar>;

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-9;

/// Threshold used when re-orthonormalising a projector, whose singular values
/// are 0 or 1 up to rounding.
const PROJECTOR_SPLIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not unipotent: |(U - Id)^n| = {residual:e}")]
    NotUnipotent { residual: f64 },
    #[error("matrix is not nilpotent: |L^n| = {residual:e}")]
    NotNilpotent { residual: f64 },
    #[error("non-finite entry encountered")]
    NonFinite,
    #[error("matrix is singular to working precision")]
    Singular,
}

pub fn c(re: f64, im: f64) -> Scalar {
    Scalar::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn conj_matrix(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |s, z| s + z.norm_sqr()).sqrt()
}

pub fn max_abs_imag(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    m.clone().try_inverse().ok_or(LinalgError::Singular)
}

/// Bilinear pairing `sum f_i x_i` between dual coordinates and coordinates.
pub fn pair(f: &CVector, x: &CVector) -> Scalar {
    f.iter().zip(x.iter()).map(|(a, b)| a * b).sum()
}

/// Orthonormal basis of the column span of `m`, keeping singular values above
/// `rel_tol * sigma_max`. Columns that are already orthonormal to rounding
/// are kept verbatim, so serialised bases reload bit for bit.
fn orthonormal_columns(m: &CMatrix, rel_tol: f64) -> CMatrix {
    if m.ncols() > 0 && m.ncols() <= m.nrows() {
        let gram = m.adjoint() * m - identity(m.ncols());
        if frobenius(&gram) <= 8.0 * f64::EPSILON * m.ncols() as f64 {
            return m.clone();
        }
    }
    left_singular_basis(m, |sigma_max| rel_tol * sigma_max)
}

/// Left singular vectors whose singular value exceeds `threshold(sigma_max)`.
fn left_singular_basis(m: &CMatrix, threshold: impl Fn(f64) -> f64) -> CMatrix {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return CMatrix::zeros(n, 0);
    }
    let (u, sigma, _) = svd(m);
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let cut = threshold(sigma_max).max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > cut).collect();
    let mut out = CMatrix::zeros(n, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

/// Thin SVD `m = U diag(sigma) V^H`, singular values in decreasing order.
///
/// nalgebra's complex SVD loses orthogonality on nearly rank-deficient
/// projectors, so the factorisation goes through faer.
pub fn svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (r, k) = (m.nrows(), m.ncols());
    let k_min = r.min(k);
    if k_min == 0 {
        return (CMatrix::zeros(r, 0), Vec::new(), CMatrix::zeros(k, 0));
    }
    if let Some(out) = faer_svd(m) {
        return out;
    }
    // faer occasionally stalls on entries many orders below the rounding
    // level; those do not affect any rank decision, so drop them and retry
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let flushed = m.map(|z| {
        if z.norm() <= f64::EPSILON * 1e-3 * scale {
            c(0.0, 0.0)
        } else {
            z
        }
    });
    if let Some(out) = faer_svd(&flushed) {
        return out;
    }
    if let Some((v, sigma, u)) = faer_svd(&flushed.adjoint()) {
        return (u, sigma, v);
    }
    log::warn!("faer svd did not converge on a {r}x{k} matrix; using nalgebra");
    let dec = flushed.svd(true, true);
    let mut order: Vec<usize> = (0..k_min).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    let u_all = dec.u.expect("requested");
    let vt = dec.v_t.expect("requested");
    let u = CMatrix::from_fn(r, k_min, |i, j| u_all[(i, order[j])]);
    let v = CMatrix::from_fn(k, k_min, |i, j| vt[(order[j], i)].conj());
    let sigma = order.iter().map(|&i| dec.singular_values[i]).collect();
    (u, sigma, v)
}

/// All `n` left singular vectors of an `n x k` matrix.
fn full_left_vectors(m: &CMatrix) -> Option<CMatrix> {
    let (r, k) = (m.nrows(), m.ncols());
    let fm = faer::Mat::<Scalar>::from_fn(r, k, |i, j| m[(i, j)]);
    let dec = fm.svd().ok()?;
    let fu = dec.U();
    Some(CMatrix::from_fn(r, r, |i, j| fu[(i, j)]))
}

fn faer_svd(m: &CMatrix) -> Option<(CMatrix, Vec<f64>, CMatrix)> {
    let (r, k) = (m.nrows(), m.ncols());
    let k_min = r.min(k);
    let fm = faer::Mat::<Scalar>::from_fn(r, k, |i, j| m[(i, j)]);
    let dec = fm.thin_svd().ok()?;
    let (fu, fs, fv) = (dec.U(), dec.S(), dec.V());
    let u = CMatrix::from_fn(r, k_min, |i, j| fu[(i, j)]);
    let v = CMatrix::from_fn(k, k_min, |i, j| fv[(i, j)]);
    let sigma = (0..k_min).map(|i| fs[i].re).collect();
    Some((u, sigma, v))
}

/// Moore-Penrose pseudo-inverse, dropping singular values below `rel_tol * σ_max`.
pub fn pseudo_inverse(m: &CMatrix, rel_tol: f64) -> CMatrix {
    let (u, sigma, v) = svd(m);
    let smax = sigma.first().copied().unwrap_or(0.0);
    let mut out = CMatrix::zeros(m.ncols(), m.nrows());
    for (i, &s) in sigma.iter().enumerate() {
        if s > rel_tol * smax && s > 0.0 {
            out += v.column(i) * u.column(i).adjoint() / c(s, 0.0);
        }
    }
    out
}

/// Complex linear subspace of `C^n`, normalised to an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: CMatrix,
    rank_tolerance: f64,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            basis: CMatrix::zeros(ambient_dim, 0),
            rank_tolerance: DEFAULT_RANK_TOLERANCE,
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            basis: identity(ambient_dim),
            rank_tolerance: DEFAULT_RANK_TOLERANCE,
        }
    }

    /// Span of the columns of `generators`.
    pub fn from_columns(generators: &CMatrix, rank_tolerance: f64) -> Result<Self, LinalgError> {
        if !is_finite(generators) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Subspace {
            basis: orthonormal_columns(generators, rank_tolerance),
            rank_tolerance,
        })
    }

    pub fn span(ambient_dim: usize, vectors: &[CVector]) -> Result<Self, LinalgError> {
        Self::span_with_tolerance(ambient_dim, vectors, DEFAULT_RANK_TOLERANCE)
    }

    pub fn span_with_tolerance(
        ambient_dim: usize,
        vectors: &[CVector],
        rank_tolerance: f64,
    ) -> Result<Self, LinalgError> {
        let mut m = CMatrix::zeros(ambient_dim, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != ambient_dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: ambient_dim,
                    found: v.len(),
                });
            }
            m.set_column(j, v);
        }
        Self::from_columns(&m, rank_tolerance)
    }

    /// Span of standard basis vectors `e_i` for `i` in `indices`.
    pub fn coordinate(ambient_dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let vectors: Vec<CVector> = indices
            .into_iter()
            .map(|i| {
                let mut v = CVector::zeros(ambient_dim);
                v[i] = c(1.0, 0.0);
                v
            })
            .collect();
        Self::span(ambient_dim, &vectors).expect("coordinate vectors are finite")
    }

    pub fn with_tolerance(mut self, rank_tolerance: f64) -> Self {
        self.rank_tolerance = rank_tolerance;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    /// Orthonormal basis, one vector per column.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<CVector> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient_dim(),
                found: other.ambient_dim(),
            });
        }
        Ok(())
    }

    /// Distance from `v` to the subspace.
    pub fn residual(&self, v: &CVector) -> f64 {
        let proj = &self.basis * (self.basis.adjoint() * v);
        (v - proj).norm()
    }

    /// `v` lies in the subspace iff its residual is below `rank_tolerance * |v|`.
    pub fn contains_vector(&self, v: &CVector) -> bool {
        self.contains_vector_at(v, self.rank_tolerance)
    }

    pub fn contains_vector_at(&self, v: &CVector, rel_tol: f64) -> bool {
        if v.len() != self.ambient_dim() {
            return false;
        }
        self.residual(v) <= rel_tol * v.norm()
    }

    /// Largest residual of an orthonormal basis vector of `other` against `self`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        other
            .basis
            .column_iter()
            .map(|col| self.residual(&col.into_owned()))
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.contains_at(other, self.rank_tolerance.max(other.rank_tolerance))
    }

    pub fn contains_at(&self, other: &Subspace, tol: f64) -> bool {
        other.ambient_dim() == self.ambient_dim() && self.containment_residual(other) <= tol
    }

    /// Equality as mutual containment.
    pub fn same_as(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains(other) && other.contains(self)
    }

    pub fn same_as_at(&self, other: &Subspace, tol: f64) -> bool {
        self.dim() == other.dim() && self.contains_at(other, tol) && other.contains_at(self, tol)
    }

    /// Hermitian orthogonal complement.
    pub fn orthogonal_complement(&self) -> Subspace {
        let n = self.ambient_dim();
        let d = self.dim();
        if d == 0 {
            return Subspace::full(n).with_tolerance(self.rank_tolerance);
        }
        if d == n {
            return Subspace::zero(n).with_tolerance(self.rank_tolerance);
        }
        // the basis is orthonormal, so the trailing left singular vectors span the complement
        let basis = match full_left_vectors(&self.basis) {
            Some(u) => u.columns(d, n - d).into_owned(),
            None => {
                let residual_projector = identity(n) - self.projector();
                left_singular_basis(&residual_projector, |_| PROJECTOR_SPLIT)
            }
        };
        Subspace {
            basis,
            rank_tolerance: self.rank_tolerance,
        }
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same_ambient(other)?;
        let tol = self.rank_tolerance.max(other.rank_tolerance);
        if other.is_zero() || self.is_full() {
            return Ok(self.clone().with_tolerance(tol));
        }
        if self.is_zero() || other.is_full() {
            return Ok(other.clone().with_tolerance(tol));
        }
        let n = self.ambient_dim();
        let mut m = CMatrix::zeros(n, self.dim() + other.dim());
        m.view_mut((0, 0), (n, self.dim())).copy_from(&self.basis);
        m.view_mut((0, self.dim()), (n, other.dim()))
            .copy_from(&other.basis);
        Subspace::from_columns(&m, tol)
    }

    /// `A ∩ B = (A^⊥ + B^⊥)^⊥`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_same_ambient(other)?;
        let tol = self.rank_tolerance.max(other.rank_tolerance);
        if self.is_zero() || other.is_full() {
            return Ok(self.clone().with_tolerance(tol));
        }
        if other.is_zero() || self.is_full() {
            return Ok(other.clone().with_tolerance(tol));
        }
        let perp = self.orthogonal_complement().sum(&other.orthogonal_complement())?;
        Ok(perp.orthogonal_complement())
    }

    /// `{f : sum_i f_i v_i = 0 for all v}` in dual coordinates.
    ///
    /// The pairing is bilinear, so this is the entrywise conjugate of the
    /// Hermitian complement.
    pub fn annihilator(&self) -> Subspace {
        self.orthogonal_complement().conj()
    }

    pub fn conj(&self) -> Subspace {
        Subspace {
            basis: conj_matrix(&self.basis),
            rank_tolerance: self.rank_tolerance,
        }
    }

    /// Image under a linear map.
    pub fn image(&self, m: &CMatrix) -> Result<Subspace, LinalgError> {
        if m.ncols() != self.ambient_dim() {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient_dim(),
                found: m.ncols(),
            });
        }
        Subspace::from_columns(&(m * &self.basis), self.rank_tolerance)
    }

    /// Dimension of the quotient `self / sub`, assuming `sub ⊆ self`.
    pub fn quotient_dim(&self, sub: &Subspace) -> usize {
        self.dim().saturating_sub(sub.dim())
    }
}

fn check_square(m: &CMatrix) -> Result<usize, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if !is_finite(m) {
        return Err(LinalgError::NonFinite);
    }
    Ok(m.nrows())
}

/// Relative nilpotency residual `|N^n| / (1 + |N|)^n`.
fn nilpotency_residual(nil: &CMatrix) -> f64 {
    let n = nil.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut power = nil.clone();
    for _ in 1..n {
        power = &power * nil;
    }
    frobenius(&power) / (1.0 + frobenius(nil)).powi(n as i32)
}

/// Logarithm of a unipotent matrix via the terminating Mercator series.
pub fn nilpotent_log(u: &CMatrix) -> Result<CMatrix, LinalgError> {
    nilpotent_log_with_tolerance(u, DEFAULT_RANK_TOLERANCE)
}

pub fn nilpotent_log_with_tolerance(u: &CMatrix, tol: f64) -> Result<CMatrix, LinalgError> {
    let n = check_square(u)?;
    let nil = u - identity(n);
    let residual = nilpotency_residual(&nil);
    if residual > tol {
        return Err(LinalgError::NotUnipotent { residual });
    }
    let mut out = CMatrix::zeros(n, n);
    let mut power = nil.clone();
    for k in 1..n {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out += &power * c(sign / k as f64, 0.0);
        power = &power * &nil;
    }
    Ok(out)
}

/// Exponential of a nilpotent matrix via its terminating Taylor series.
pub fn nilpotent_exp(l: &CMatrix) -> Result<CMatrix, LinalgError> {
    nilpotent_exp_with_tolerance(l, DEFAULT_RANK_TOLERANCE)
}

pub fn nilpotent_exp_with_tolerance(l: &CMatrix, tol: f64) -> Result<CMatrix, LinalgError> {
    let n = check_square(l)?;
    let residual = nilpotency_residual(l);
    if residual > tol {
        return Err(LinalgError::NotNilpotent { residual });
    }
    Ok(exp_series(l, n))
}

/// `sum_{k<terms} L^k / k!` without a nilpotency check.
pub(crate) fn exp_series(l: &CMatrix, terms: usize) -> CMatrix {
    let n = l.nrows();
    let mut out = identity(n);
    let mut power = identity(n);
    let mut factorial = 1.0;
    for k in 1..terms.max(1) {
        power = &power * l;
        factorial *= k as f64;
        out += &power * c(1.0 / factorial, 0.0);
    }
    out
}

/// `g X g^{-1}`.
pub fn conjugate_by(g: &CMatrix, x: &CMatrix) -> Result<CMatrix, LinalgError> {
    Ok(g * x * inverse(g)?)
}
