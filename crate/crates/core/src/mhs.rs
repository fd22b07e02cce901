//! Mixed Hodge structures in Betti coordinates.
//!
//! A structure lives on `Q^n`. The weight filtration is stored exactly (rational
//! echelon bases), the Hodge filtration as complex subspaces of `C^n` pulled
//! back to Betti coordinates. Complex conjugation is therefore entrywise. An
//! optional comparison matrix `A` maps Betti coordinates to a chosen de Rham
//! basis and is only used to report results on the de Rham side.
//!
//! Both filtrations are stored sparsely by jump index:
//! `W_k` is the stored subspace with the largest key `<= k` (zero below the
//! first key), `F^p` is the stored subspace with the smallest key `>= p` (zero
//! above the last key).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{
    c, conj_matrix, inverse, nilpotent_exp, CMatrix, CVector, LinalgError, Scalar, Subspace,
};
use crate::rational::{int, to_complex, QVector, RationalSubspace};

#[derive(Debug, Clone, Error)]
pub enum MhsError {
    #[error("invalid mixed Hodge structure: {0}")]
    InvalidInput(ValidationReport),
    #[error("{what}: expected dimension {expected}, found {found}")]
    Dimension {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("weight {0} is odd; Hodge-Tate blocks need even weights")]
    OddWeight(i32),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightFiltration {
    ambient_dim: usize,
    jumps: BTreeMap<i32, RationalSubspace>,
}

impl WeightFiltration {
    pub fn new(ambient_dim: usize) -> Self {
        WeightFiltration {
            ambient_dim,
            jumps: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, k: i32, space: RationalSubspace) {
        self.jumps.insert(k, space);
    }

    /// Builds the sparse form of `k -> f(k)` on `lo..=hi`, which must reach the
    /// full space at `hi`.
    pub fn from_fn(ambient_dim: usize, lo: i32, hi: i32, mut f: impl FnMut(i32) -> RationalSubspace) -> Self {
        let mut out = Self::new(ambient_dim);
        let mut prev_dim = 0;
        for k in lo..=hi {
            let s = f(k);
            if s.dim() != prev_dim {
                prev_dim = s.dim();
                out.jumps.insert(k, s);
            }
        }
        out
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn jumps(&self) -> &BTreeMap<i32, RationalSubspace> {
        &self.jumps
    }

    pub fn get(&self, k: i32) -> RationalSubspace {
        self.jumps
            .range(..=k)
            .next_back()
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| RationalSubspace::zero(self.ambient_dim))
    }

    pub fn complex(&self, k: i32) -> Subspace {
        self.get(k).complex().clone()
    }

    /// `(first key, last key)`.
    pub fn range(&self) -> Option<(i32, i32)> {
        Some((*self.jumps.keys().next()?, *self.jumps.keys().next_back()?))
    }

    pub fn graded_dim(&self, k: i32) -> usize {
        self.get(k).dim().saturating_sub(self.get(k - 1).dim())
    }

    /// Weights with nonzero graded piece.
    pub fn weights(&self) -> Vec<i32> {
        match self.range() {
            None => Vec::new(),
            Some((lo, hi)) => (lo..=hi).filter(|&k| self.graded_dim(k) > 0).collect(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct HodgeFiltration {
    ambient_dim: usize,
    jumps: BTreeMap<i32, Subspace>,
}

impl HodgeFiltration {
    pub fn new(ambient_dim: usize) -> Self {
        HodgeFiltration {
            ambient_dim,
            jumps: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, p: i32, space: Subspace) {
        self.jumps.insert(p, space);
    }

    /// Sparse form of `p -> f(p)` on `lo..=hi`; `f(lo)` must be the full space.
    pub fn from_fn(ambient_dim: usize, lo: i32, hi: i32, mut f: impl FnMut(i32) -> Subspace) -> Self {
        let mut out = Self::new(ambient_dim);
        let mut next_dim = 0;
        for p in (lo..=hi).rev() {
            let s = f(p);
            if s.dim() != next_dim {
                next_dim = s.dim();
                out.jumps.insert(p, s);
            }
        }
        out
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn jumps(&self) -> &BTreeMap<i32, Subspace> {
        &self.jumps
    }

    pub fn get(&self, p: i32) -> Subspace {
        self.jumps
            .range(p..)
            .next()
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| Subspace::zero(self.ambient_dim))
    }

    pub fn range(&self) -> Option<(i32, i32)> {
        Some((*self.jumps.keys().next()?, *self.jumps.keys().next_back()?))
    }

    fn map(&self, f: impl Fn(&Subspace) -> Subspace) -> Self {
        HodgeFiltration {
            ambient_dim: self.ambient_dim,
            jumps: self.jumps.iter().map(|(&p, s)| (p, f(s))).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    WeightNotIncreasing { k: i32 },
    WeightNotExhaustive,
    HodgeNotDecreasing { p: i32 },
    HodgeNotExhaustive,
    AmbientMismatch { what: String },
    Purity { n: i32, p: i32, detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WeightNotIncreasing { k } => {
                write!(
                    f,
                    "weight filtration not increasing: W_{} not inside W_{}",
                    k - 1,
                    k
                )
            }
            Violation::WeightNotExhaustive => {
                write!(f, "weight filtration does not reach the full space")
            }
            Violation::HodgeNotDecreasing { p } => {
                write!(
                    f,
                    "Hodge filtration not decreasing: F^{} not inside F^{}",
                    p + 1,
                    p
                )
            }
            Violation::HodgeNotExhaustive => {
                write!(f, "Hodge filtration does not start at the full space")
            }
            Violation::AmbientMismatch { what } => write!(f, "ambient dimension mismatch in {what}"),
            Violation::Purity { n, p, detail } => {
                write!(f, "purity fails on Gr^W_{n} at p={p}: {detail}")
            }
        }
    }
}

/// Every violated invariant; empty means the structure is a valid MHS.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

#[derive(Debug, Clone)]
pub struct MixedHodgeStructure {
    dimension: usize,
    weight: WeightFiltration,
    hodge: HodgeFiltration,
    comparison: Option<CMatrix>,
}

impl MixedHodgeStructure {
    pub fn new(
        weight: WeightFiltration,
        hodge: HodgeFiltration,
        comparison: Option<CMatrix>,
    ) -> Result<Self, MhsError> {
        let dimension = weight.ambient_dim();
        if hodge.ambient_dim() != dimension {
            return Err(MhsError::Dimension {
                what: "Hodge filtration".into(),
                expected: dimension,
                found: hodge.ambient_dim(),
            });
        }
        if let Some(a) = &comparison {
            if a.nrows() != dimension || a.ncols() != dimension {
                return Err(MhsError::Dimension {
                    what: "comparison matrix".into(),
                    expected: dimension,
                    found: a.nrows(),
                });
            }
        }
        Ok(MixedHodgeStructure {
            dimension,
            weight,
            hodge,
            comparison,
        })
    }

    /// From explicit jump lists: `(k, rational basis of W_k)` and
    /// `(p, complex basis of F^p)`.
    pub fn from_jumps(
        dimension: usize,
        weight: &[(i32, Vec<QVector>)],
        hodge: &[(i32, Vec<CVector>)],
        comparison: Option<CMatrix>,
    ) -> Result<Self, MhsError> {
        let mut w = WeightFiltration::new(dimension);
        for (k, basis) in weight {
            if let Some(v) = basis.iter().find(|v| v.len() != dimension) {
                return Err(MhsError::Dimension {
                    what: format!("W_{k} basis vector"),
                    expected: dimension,
                    found: v.len(),
                });
            }
            w.insert(*k, RationalSubspace::span(dimension, basis));
        }
        let mut f = HodgeFiltration::new(dimension);
        for (p, basis) in hodge {
            f.insert(*p, Subspace::span(dimension, basis)?);
        }
        Self::new(w, f, comparison)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn weight(&self) -> &WeightFiltration {
        &self.weight
    }

    pub fn hodge(&self) -> &HodgeFiltration {
        &self.hodge
    }

    pub fn comparison(&self) -> Option<&CMatrix> {
        self.comparison.as_ref()
    }

    pub fn w(&self, k: i32) -> Subspace {
        self.weight.complex(k)
    }

    pub fn f(&self, p: i32) -> Subspace {
        self.hodge.get(p)
    }

    pub fn f_conj(&self, p: i32) -> Subspace {
        self.hodge.get(p).conj()
    }

    /// Indices `p` with `F^p` different from both the full space and zero,
    /// widened by one on each side.
    pub fn hodge_range(&self) -> (i32, i32) {
        self.hodge.range().unwrap_or((0, 0))
    }

    pub fn weight_range(&self) -> (i32, i32) {
        self.weight.range().unwrap_or((0, 0))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.dimension;
        if n == 0 {
            return report;
        }
        let v = &mut report.violations;

        let (wlo, whi) = match self.weight.range() {
            Some(r) => r,
            None => {
                v.push(Violation::WeightNotExhaustive);
                return report;
            }
        };
        for k in wlo + 1..=whi {
            if !self.weight.get(k).contains(&self.weight.get(k - 1)) {
                v.push(Violation::WeightNotIncreasing { k });
            }
        }
        if self.weight.get(whi).dim() != n {
            v.push(Violation::WeightNotExhaustive);
        }

        let (flo, fhi) = match self.hodge.range() {
            Some(r) => r,
            None => {
                v.push(Violation::HodgeNotExhaustive);
                return report;
            }
        };
        for p in flo..fhi {
            if !self.f(p).contains(&self.f(p + 1)) {
                v.push(Violation::HodgeNotDecreasing { p });
            }
        }
        if self.f(flo).dim() != n {
            v.push(Violation::HodgeNotExhaustive);
        }
        if !v.is_empty() {
            return report;
        }

        for k in self.weight.weights() {
            let wk = self.w(k);
            let wk1 = self.w(k - 1);
            let gr = wk.dim() - wk1.dim();
            for p in flo..=fhi + 1 {
                let fp = self.f(p).intersect(&wk).and_then(|s| s.sum(&wk1));
                let fq = self.f_conj(k - p + 1).intersect(&wk).and_then(|s| s.sum(&wk1));
                let (fp, fq) = match (fp, fq) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => {
                        v.push(Violation::AmbientMismatch {
                            what: format!("Gr^W_{k}"),
                        });
                        continue;
                    }
                };
                let dp = fp.dim() - wk1.dim();
                let dq = fq.dim() - wk1.dim();
                let meet = fp.intersect(&fq).map(|s| s.dim()).unwrap_or(usize::MAX);
                if dp + dq != gr {
                    v.push(Violation::Purity {
                        n: k,
                        p,
                        detail: format!(
                            "dim Gr F^{p} + dim Gr conj F^{} = {} but dim Gr^W_{k} = {gr}",
                            k - p + 1,
                            dp + dq
                        ),
                    });
                } else if meet != wk1.dim() {
                    v.push(Violation::Purity {
                        n: k,
                        p,
                        detail: format!("F^{p} and conj F^{} meet nontrivially", k - p + 1),
                    });
                }
            }
        }
        report
    }

    pub fn ensure_valid(&self) -> Result<(), MhsError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(MhsError::InvalidInput(report))
        }
    }

    /// `W_k(H^∨) = Ann(W_{-k-1})`, `F^p(H^∨) = Ann(F^{1-p})`, in dual coordinates.
    pub fn dual(&self) -> Result<Self, MhsError> {
        self.ensure_valid()?;
        self.dual_unchecked()
    }

    pub(crate) fn dual_unchecked(&self) -> Result<Self, MhsError> {
        let n = self.dimension;
        let (wlo, whi) = self.weight_range();
        let weight = WeightFiltration::from_fn(n, -whi - 1, -wlo, |k| self.weight.get(-k - 1).annihilator());
        let (flo, fhi) = self.hodge_range();
        let hodge = HodgeFiltration::from_fn(n, -fhi, 1 - flo, |p| self.f(1 - p).annihilator());
        let comparison = match &self.comparison {
            Some(a) => Some(inverse(a)?.transpose()),
            None => None,
        };
        Self::new(weight, hodge, comparison)
    }

    /// `H(p)`: `W_k(H(p)) = W_{k+2p}`, `F^q(H(p)) = F^{q+p}`.
    pub fn twist(&self, p: i32) -> Result<Self, MhsError> {
        self.ensure_valid()?;
        let mut weight = WeightFiltration::new(self.dimension);
        for (k, s) in self.weight.jumps() {
            weight.insert(k - 2 * p, s.clone());
        }
        let mut hodge = HodgeFiltration::new(self.dimension);
        for (q, s) in self.hodge.jumps() {
            hodge.insert(q - p, s.clone());
        }
        let comparison = self.comparison.as_ref().map(|a| a * two_pi_i().powi(p));
        Self::new(weight, hodge, comparison)
    }

    /// Same Betti data and weights, entrywise conjugated Hodge filtration.
    pub fn conjugate(&self) -> Result<Self, MhsError> {
        self.ensure_valid()?;
        Ok(self.conjugate_unchecked())
    }

    pub(crate) fn conjugate_unchecked(&self) -> Self {
        MixedHodgeStructure {
            dimension: self.dimension,
            weight: self.weight.clone(),
            hodge: self.hodge.map(Subspace::conj),
            comparison: self.comparison.as_ref().map(conj_matrix),
        }
    }

    /// `H ⊕ H'` on `Q^{n+m}`, `H` on the first `n` coordinates. A missing
    /// comparison matrix on one side is filled with the identity.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, MhsError> {
        let (n, m) = (self.dimension, other.dimension);
        let pad_q = |v: &QVector, first: bool| -> QVector {
            let zeros = |k| std::iter::repeat_n(int(0), k);
            if first {
                v.iter().cloned().chain(zeros(m)).collect()
            } else {
                zeros(n).chain(v.iter().cloned()).collect()
            }
        };
        let pad_c = |v: CVector, first: bool| -> CVector {
            let mut out = CVector::zeros(n + m);
            let offset = if first { 0 } else { n };
            out.rows_mut(offset, v.len()).copy_from(&v);
            out
        };
        let mut weight = WeightFiltration::new(n + m);
        let keys: std::collections::BTreeSet<i32> = self
            .weight
            .jumps()
            .keys()
            .chain(other.weight.jumps().keys())
            .copied()
            .collect();
        for k in keys {
            let mut vs: Vec<QVector> = self
                .weight
                .get(k)
                .basis()
                .iter()
                .map(|v| pad_q(v, true))
                .collect();
            vs.extend(other.weight.get(k).basis().iter().map(|v| pad_q(v, false)));
            weight.insert(k, RationalSubspace::span(n + m, &vs));
        }
        let mut hodge = HodgeFiltration::new(n + m);
        let keys: std::collections::BTreeSet<i32> = self
            .hodge
            .jumps()
            .keys()
            .chain(other.hodge.jumps().keys())
            .copied()
            .collect();
        for p in keys {
            let mut vs: Vec<CVector> = self
                .f(p)
                .basis_vectors()
                .into_iter()
                .map(|v| pad_c(v, true))
                .collect();
            vs.extend(other.f(p).basis_vectors().into_iter().map(|v| pad_c(v, false)));
            hodge.insert(p, Subspace::span(n + m, &vs)?);
        }
        let comparison = if self.comparison.is_none() && other.comparison.is_none() {
            None
        } else {
            let mut a = CMatrix::identity(n + m, n + m);
            if let Some(x) = &self.comparison {
                a.view_mut((0, 0), (n, n)).copy_from(x);
            }
            if let Some(x) = &other.comparison {
                a.view_mut((n, n), (m, m)).copy_from(x);
            }
            Some(a)
        };
        Self::new(weight, hodge, comparison)
    }

    /// `(g . F, W)` for an invertible matrix `g`.
    pub fn transform_hodge(&self, g: &CMatrix) -> Result<Self, MhsError> {
        let mut hodge = HodgeFiltration::new(self.dimension);
        for (p, s) in self.hodge.jumps() {
            hodge.insert(*p, s.image(g)?);
        }
        Self::new(self.weight.clone(), hodge, self.comparison.clone())
    }

    /// Betti coordinates to de Rham coordinates, when a comparison matrix is set.
    pub fn to_de_rham_vector(&self, x: &CVector) -> Option<CVector> {
        self.comparison.as_ref().map(|a| a * x)
    }

    pub fn to_de_rham_functional(&self, f: &CVector) -> Option<CVector> {
        let a = self.comparison.as_ref()?;
        let inv = inverse(a).ok()?;
        Some(inv.transpose() * f)
    }

    pub fn to_de_rham_operator(&self, x: &CMatrix) -> Option<CMatrix> {
        let a = self.comparison.as_ref()?;
        let inv = inverse(a).ok()?;
        Some(a * x * inv)
    }
}

pub fn two_pi_i() -> Scalar {
    c(0.0, 2.0 * PI)
}

/// `Q(a)`: rank one, weight `-2a`, Hodge type `(-a,-a)`, period `(2πi)^a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TateStructure {
    pub a: i32,
}

impl TateStructure {
    pub fn new(a: i32) -> Self {
        TateStructure { a }
    }

    pub fn to_mhs(self) -> MixedHodgeStructure {
        let mut weight = WeightFiltration::new(1);
        weight.insert(-2 * self.a, RationalSubspace::full(1));
        let mut hodge = HodgeFiltration::new(1);
        hodge.insert(-self.a, Subspace::full(1));
        let mut alpha = CMatrix::zeros(1, 1);
        alpha[(0, 0)] = two_pi_i().powi(self.a);
        MixedHodgeStructure::new(weight, hodge, Some(alpha)).expect("rank one data is consistent")
    }

    /// The Betti generator `1(a)`.
    pub fn betti_generator(self) -> QVector {
        vec![int(1)]
    }
}

/// A random Hodge-Tate structure together with the data it was built from.
#[derive(Debug, Clone)]
pub struct HodgeTateSample {
    /// `(F, W)` with `F = e^λ F_split`.
    pub mhs: MixedHodgeStructure,
    /// The split structure before applying `e^λ`.
    pub split: MixedHodgeStructure,
    /// `λ` in Betti coordinates; lies in `Λ^{-1,-1}` of the split structure.
    pub lambda: CMatrix,
    /// Rational change of basis from block coordinates to Betti coordinates.
    pub basis_change: Vec<QVector>,
    /// For each block weight `2k`, the Betti vectors spanning the `Q(-k)^d` summand.
    pub blocks: Vec<(i32, Vec<QVector>)>,
}

/// Valid Hodge-Tate MHS with `Gr^W_{2k} = Q(-k)^d` for each `(2k, d)` in `blocks`,
/// deterministic in `seed`.
pub fn random_hodge_tate(blocks: &[(i32, usize)], seed: u64) -> Result<MixedHodgeStructure, MhsError> {
    Ok(random_hodge_tate_sample(blocks, seed, 1.0)?.mhs)
}

/// As [`random_hodge_tate`], with `λ` entries drawn at `lambda_scale`
/// (0 gives the split structure).
pub fn random_hodge_tate_sample(
    blocks: &[(i32, usize)],
    seed: u64,
    lambda_scale: f64,
) -> Result<HodgeTateSample, MhsError> {
    let mut merged: BTreeMap<i32, usize> = BTreeMap::new();
    for &(w, d) in blocks {
        if w.rem_euclid(2) != 0 {
            return Err(MhsError::OddWeight(w));
        }
        if d > 0 {
            *merged.entry(w).or_default() += d;
        }
    }
    let n: usize = merged.values().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // block coordinates: weight of each coordinate
    let weights: Vec<i32> = merged
        .iter()
        .flat_map(|(&w, &d)| std::iter::repeat_n(w, d))
        .collect();

    let g = random_unimodular(n, &mut rng);
    let g_c = rational_rows_to_matrix(&g);
    let column = |j: usize| -> QVector { g.iter().map(|row| row[j].clone()).collect() };

    let mut lambda_block = CMatrix::zeros(n, n);
    if lambda_scale != 0.0 {
        for i in 0..n {
            for j in 0..n {
                if weights[i] < weights[j] {
                    let re: f64 = rng.random_range(-1.0..1.0);
                    let im: f64 = rng.random_range(-1.0..1.0);
                    lambda_block[(i, j)] = c(re, im) * lambda_scale;
                }
            }
        }
    }
    let g_inv = inverse(&g_c)?;
    let lambda = &g_c * &lambda_block * &g_inv;

    let (wlo, whi) = match (weights.iter().min(), weights.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0, 0),
    };
    let weight = WeightFiltration::from_fn(n, wlo, whi, |k| {
        let cols: Vec<QVector> = (0..n).filter(|&j| weights[j] <= k).map(column).collect();
        RationalSubspace::span(n, &cols)
    });
    let hodge_split = HodgeFiltration::from_fn(n, wlo / 2, whi / 2, |p| {
        let cols: Vec<CVector> = (0..n)
            .filter(|&j| weights[j] / 2 >= p)
            .map(|j| to_complex(&column(j)))
            .collect();
        Subspace::span(n, &cols).expect("finite")
    });
    let split = MixedHodgeStructure::new(weight, hodge_split, None)?;
    let mhs = split.transform_hodge(&nilpotent_exp(&lambda)?)?;
    let blocks = merged
        .keys()
        .map(|&w| {
            let cols = (0..n).filter(|&j| weights[j] == w).map(column).collect();
            (w, cols)
        })
        .collect();
    Ok(HodgeTateSample {
        mhs,
        split,
        lambda,
        basis_change: g,
        blocks,
    })
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> Vec<QVector> {
    let mut g: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    if n > 1 {
        for _ in 0..n {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let k: i64 = rng.random_range(-1..=1);
            for col in 0..n {
                g[i][col] += k * g[j][col];
            }
        }
    }
    g.into_iter()
        .map(|row| row.into_iter().map(int).collect())
        .collect()
}

pub fn rational_rows_to_matrix(rows: &[QVector]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    let mut out = CMatrix::zeros(n, m);
    for (i, row) in rows.iter().enumerate() {
        for (j, q) in row.iter().enumerate() {
            out[(i, j)] = c(crate::rational::to_f64(q), 0.0);
        }
    }
    out
}

/// Split Hodge-Tate `⊕ Q(-k_i)` on coordinate vectors, weights given per coordinate.
pub fn split_hodge_tate(weights: &[i32]) -> Result<MixedHodgeStructure, MhsError> {
    let n = weights.len();
    if let Some(&w) = weights.iter().find(|w| w.rem_euclid(2) != 0) {
        return Err(MhsError::OddWeight(w));
    }
    let lo = weights.iter().copied().min().unwrap_or(0);
    let hi = weights.iter().copied().max().unwrap_or(0);
    let weight = WeightFiltration::from_fn(n, lo, hi, |k| {
        RationalSubspace::coordinate(n, (0..n).filter(|&j| weights[j] <= k))
    });
    let hodge = HodgeFiltration::from_fn(n, lo / 2, hi / 2, |p| {
        Subspace::coordinate(n, (0..n).filter(|&j| weights[j] / 2 >= p))
    });
    MixedHodgeStructure::new(weight, hodge, None)
}

/// Pure Hodge structure of weight `n` on `C^dim` from explicit Hodge jumps.
pub fn pure_structure(
    dim: usize,
    n: i32,
    hodge: &[(i32, Vec<CVector>)],
) -> Result<MixedHodgeStructure, MhsError> {
    let weight = vec![(
        n,
        (0..dim).map(|i| crate::rational::unit_vector(dim, i)).collect(),
    )];
    MixedHodgeStructure::from_jumps(dim, &weight, hodge, None)
}
