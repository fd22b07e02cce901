//! Exact rational vectors and subspaces for Betti data.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{c, CMatrix, CVector, Subspace, DEFAULT_RANK_TOLERANCE};

pub type Rational = BigRational;
pub type QVector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer in rational literal {0:?}")]
    BadInteger(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let parse_int = |t: &str| -> Result<BigInt, ParseRationalError> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| ParseRationalError::BadInteger(s.to_string()))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator(s.to_string()));
            }
            Ok(Rational::new(parse_int(p)?, den))
        }
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn unit_vector(n: usize, i: usize) -> QVector {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn to_complex(v: &[Rational]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|q| c(to_f64(q), 0.0)))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Matrix-vector product with a rational matrix given by rows.
pub fn mat_vec(rows: &[QVector], v: &[Rational]) -> QVector {
    rows.iter().map(|r| dot(r, v)).collect()
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(mut rows: Vec<QVector>, ncols: usize) -> (Vec<QVector>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                for j in 0..ncols {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Basis of `{x : row . x = 0 for every row}`.
pub fn nullspace(rows: &[QVector], ncols: usize) -> Vec<QVector> {
    let (reduced, pivots) = rref(rows.to_vec(), ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Rational subspace of `Q^n`, kept exactly in reduced echelon form together
/// with its complexification.
#[derive(Clone)]
pub struct RationalSubspace {
    ambient_dim: usize,
    rows: Vec<QVector>,
    pivots: Vec<usize>,
    complex: Subspace,
}

impl fmt::Debug for RationalSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(format_rational).collect())
            .collect();
        f.debug_struct("RationalSubspace")
            .field("ambient_dim", &self.ambient_dim)
            .field("basis", &rows)
            .finish()
    }
}

impl PartialEq for RationalSubspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.rows == other.rows
    }
}

impl Eq for RationalSubspace {}

impl RationalSubspace {
    pub fn span(ambient_dim: usize, vectors: &[QVector]) -> Self {
        let (rows, pivots) = rref(vectors.to_vec(), ambient_dim);
        let complex = if rows.is_empty() {
            Subspace::zero(ambient_dim)
        } else {
            let mut m = CMatrix::zeros(ambient_dim, rows.len());
            for (j, r) in rows.iter().enumerate() {
                m.set_column(j, &to_complex(r));
            }
            Subspace::from_columns(&m, DEFAULT_RANK_TOLERANCE).expect("rational entries are finite")
        };
        RationalSubspace {
            ambient_dim,
            rows,
            pivots,
            complex,
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self::span(ambient_dim, &[])
    }

    pub fn full(ambient_dim: usize) -> Self {
        let vs: Vec<QVector> = (0..ambient_dim).map(|i| unit_vector(ambient_dim, i)).collect();
        Self::span(ambient_dim, &vs)
    }

    pub fn coordinate(ambient_dim: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let vs: Vec<QVector> = indices.into_iter().map(|i| unit_vector(ambient_dim, i)).collect();
        Self::span(ambient_dim, &vs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Echelon basis.
    pub fn basis(&self) -> &[QVector] {
        &self.rows
    }

    pub fn complex(&self) -> &Subspace {
        &self.complex
    }

    pub fn contains_vector(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        let mut rest = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if rest[p].is_zero() {
                continue;
            }
            let factor = rest[p].clone();
            for (x, r) in rest.iter_mut().zip(row) {
                *x -= &factor * r;
            }
        }
        rest.iter().all(Zero::is_zero)
    }

    pub fn contains(&self, other: &RationalSubspace) -> bool {
        other.rows.iter().all(|r| self.contains_vector(r))
    }

    pub fn sum(&self, other: &RationalSubspace) -> Self {
        let mut vs = self.rows.clone();
        vs.extend(other.rows.iter().cloned());
        Self::span(self.ambient_dim, &vs)
    }

    /// Annihilator under the standard dot product.
    pub fn annihilator(&self) -> Self {
        Self::span(self.ambient_dim, &nullspace(&self.rows, self.ambient_dim))
    }

    /// Image under a rational matrix given by rows.
    pub fn image(&self, rows: &[QVector]) -> Self {
        let out_dim = rows.len();
        let vs: Vec<QVector> = self.rows.iter().map(|v| mat_vec(rows, v)).collect();
        Self::span(out_dim, &vs)
    }

    /// Vectors of `self` whose classes form a basis of `self / sub`.
    pub fn complement_of(&self, sub: &RationalSubspace) -> Vec<QVector> {
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for v in &self.rows {
            if !acc.contains_vector(v) {
                out.push(v.clone());
                acc = acc.sum(&Self::span(self.ambient_dim, std::slice::from_ref(v)));
            }
        }
        out
    }
}
