//! JSON documents for structures and sweeps, and CSV output for sweeps.
//!
//! Rationals are strings `"p"` or `"p/q"`; complex numbers are strings
//! `"a+bi"` written with the shortest decimal that round-trips.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deligne::{DeligneError, SplittingData, Tolerances};
use crate::framed::{FramedError, FramedMhs, SharedSplitting};
use crate::linalg::{c, frobenius, CMatrix, CVector, LinalgError, Scalar, Subspace};
use crate::mhs::{HodgeFiltration, MhsError, MixedHodgeStructure, ValidationReport, WeightFiltration};
use crate::polylog::{
    build_matrices, delta_closed_form_from, heights_closed_form_from, polylog_mhs_from, PolylogContext,
    PolylogError,
};
use crate::rational::{format_rational, parse_rational, unit_vector, QVector, Rational, RationalSubspace};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Validation(String),
    #[error("numerical degeneracy: {0}")]
    Numerical(String),
    #[error("usage: {0}")]
    Usage(String),
}

impl IoError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            IoError::Validation(_) | IoError::Parse { .. } => 2,
            IoError::Numerical(_) => 3,
            IoError::Usage(_) => 4,
            IoError::Io { .. } => 5,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<ValidationReport> for IoError {
    fn from(r: ValidationReport) -> Self {
        IoError::Validation(format!("invalid mixed Hodge structure: {r}"))
    }
}

impl From<MhsError> for IoError {
    fn from(e: MhsError) -> Self {
        match e {
            MhsError::InvalidInput(r) => r.into(),
            MhsError::Linalg(l) => l.into(),
            other => IoError::Validation(other.to_string()),
        }
    }
}

impl From<LinalgError> for IoError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::DimensionMismatch { .. } | LinalgError::NotSquare { .. } => {
                IoError::Validation(e.to_string())
            }
            _ => IoError::Numerical(e.to_string()),
        }
    }
}

impl From<DeligneError> for IoError {
    fn from(e: DeligneError) -> Self {
        match e {
            DeligneError::InvalidMhs(r) => r.into(),
            DeligneError::Linalg(l) => l.into(),
            other => IoError::Numerical(other.to_string()),
        }
    }
}

impl From<FramedError> for IoError {
    fn from(e: FramedError) -> Self {
        match e {
            FramedError::InvalidFraming(_) | FramedError::FramingTypeError(_) => {
                IoError::Validation(e.to_string())
            }
            FramedError::RealityViolation { .. } => IoError::Numerical(e.to_string()),
            FramedError::Deligne(d) => d.into(),
            FramedError::Mhs(m) => m.into(),
        }
    }
}

impl From<PolylogError> for IoError {
    fn from(e: PolylogError) -> Self {
        match e {
            PolylogError::InvalidArgument(_)
            | PolylogError::OnBranchCut(_)
            | PolylogError::PathThroughSingularity { .. } => IoError::Validation(e.to_string()),
            PolylogError::InvalidMhs(_) => IoError::Validation(e.to_string()),
            PolylogError::NonConvergent(_) => IoError::Numerical(e.to_string()),
            PolylogError::Linalg(l) => l.into(),
            PolylogError::Mhs(m) => m.into(),
            PolylogError::Deligne(d) => d.into(),
            PolylogError::Framed(f) => f.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid complex literal {0:?}")]
pub struct ParseComplexError(pub String);

/// Parses `"a"`, `"bi"`, `"a+bi"`, `"a-bi"`, `"i"`, `"-i"`; whitespace is ignored.
pub fn parse_complex(s: &str) -> Result<Scalar, ParseComplexError> {
    let err = || ParseComplexError(s.to_string());
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err());
    }
    let number = |x: &str| -> Result<f64, ParseComplexError> {
        let v: f64 = x.parse().map_err(|_| err())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err())
        }
    };
    let Some(body) = t.strip_suffix('i') else {
        return Ok(c(number(&t)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => number(x)?,
    };
    let re = if re_part.is_empty() { 0.0 } else { number(re_part)? };
    Ok(c(re, im))
}

pub fn format_complex(z: Scalar) -> String {
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im.is_sign_negative() {
        format!("{}-{}i", z.re, -im)
    } else {
        format!("{}+{}i", z.re, im)
    }
}

/// A complex number serialised as `"a+bi"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexString(pub Scalar);

impl Serialize for ComplexString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_complex(self.0))
    }
}

impl<'de> Deserialize<'de> for ComplexString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = ComplexString;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a complex string \"a+bi\" or a number")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ComplexString, E> {
                parse_complex(v).map(ComplexString).map_err(E::custom)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ComplexString, E> {
                Ok(ComplexString(c(v, 0.0)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ComplexString, E> {
                Ok(ComplexString(c(v as f64, 0.0)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ComplexString, E> {
                Ok(ComplexString(c(v as f64, 0.0)))
            }
        }
        d.deserialize_any(V)
    }
}

/// An exact rational serialised as `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalString(pub Rational);

impl Serialize for RationalString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = RationalString;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<RationalString, E> {
                parse_rational(v).map(RationalString).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<RationalString, E> {
                Ok(RationalString(crate::rational::int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<RationalString, E> {
                i64::try_from(v)
                    .map(|v| RationalString(crate::rational::int(v)))
                    .map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightJump {
    pub weight: i32,
    pub basis: Vec<Vec<RationalString>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HodgeJump {
    pub p: i32,
    pub basis: Vec<Vec<ComplexString>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramingDoc {
    pub a: i32,
    pub b: i32,
    pub phi: Vec<RationalString>,
    pub psi: Vec<RationalString>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MhsDocument {
    pub dimension: usize,
    pub weight_filtration: Vec<WeightJump>,
    pub hodge_filtration: Vec<HodgeJump>,
    /// Rows of the comparison matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison_matrix: Option<Vec<Vec<ComplexString>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framing: Option<FramingDoc>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<T, IoError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        IoError::Parse {
            path: if path.is_empty() {
                "$".into()
            } else {
                format!("$.{path}")
            },
            message: e.into_inner().to_string(),
        }
    })
}

fn check_len(len: usize, n: usize, path: String) -> Result<(), IoError> {
    if len != n {
        return Err(IoError::Parse {
            path,
            message: format!("expected {n} entries, found {len}"),
        });
    }
    Ok(())
}

fn rationals(v: &[RationalString]) -> QVector {
    v.iter().map(|q| q.0.clone()).collect()
}

impl MhsDocument {
    pub fn from_json(bytes: &[u8]) -> Result<Self, IoError> {
        parse_json(bytes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialise")
    }

    /// The structure described, without validating it.
    pub fn to_mhs_unchecked(&self) -> Result<MixedHodgeStructure, IoError> {
        let n = self.dimension;
        let mut w = WeightFiltration::new(n);
        for (i, jump) in self.weight_filtration.iter().enumerate() {
            for (j, v) in jump.basis.iter().enumerate() {
                check_len(v.len(), n, format!("$.weight_filtration[{i}].basis[{j}]"))?;
            }
            let vs: Vec<QVector> = jump.basis.iter().map(|v| rationals(v)).collect();
            w.insert(jump.weight, RationalSubspace::span(n, &vs));
        }
        let mut f = HodgeFiltration::new(n);
        for (i, jump) in self.hodge_filtration.iter().enumerate() {
            let mut vs = Vec::new();
            for (j, v) in jump.basis.iter().enumerate() {
                check_len(v.len(), n, format!("$.hodge_filtration[{i}].basis[{j}]"))?;
                vs.push(CVector::from_iterator(n, v.iter().map(|z| z.0)));
            }
            f.insert(jump.p, Subspace::span(n, &vs)?);
        }
        let comparison = match &self.comparison_matrix {
            None => None,
            Some(rows) => {
                check_len(rows.len(), n, "$.comparison_matrix".into())?;
                for (i, r) in rows.iter().enumerate() {
                    check_len(r.len(), n, format!("$.comparison_matrix[{i}]"))?;
                }
                Some(CMatrix::from_fn(n, n, |i, j| rows[i][j].0))
            }
        };
        Ok(MixedHodgeStructure::new(w, f, comparison)?)
    }

    /// Parses and validates the structure.
    pub fn to_mhs(&self) -> Result<MixedHodgeStructure, IoError> {
        let h = self.to_mhs_unchecked()?;
        let report = h.validate();
        if !report.is_valid() {
            return Err(report.into());
        }
        Ok(h)
    }

    pub fn to_framed(&self) -> Result<Option<FramedMhs>, IoError> {
        let Some(fr) = &self.framing else {
            return Ok(None);
        };
        let n = self.dimension;
        check_len(fr.phi.len(), n, "$.framing.phi".into())?;
        check_len(fr.psi.len(), n, "$.framing.psi".into())?;
        let h = self.to_mhs()?;
        Ok(Some(FramedMhs::new(
            h,
            fr.a,
            fr.b,
            rationals(&fr.phi),
            rationals(&fr.psi),
        )?))
    }

    pub fn from_mhs(h: &MixedHodgeStructure) -> Self {
        let weight_filtration = h
            .weight()
            .jumps()
            .iter()
            .map(|(&weight, s)| WeightJump {
                weight,
                basis: s
                    .basis()
                    .iter()
                    .map(|v| v.iter().cloned().map(RationalString).collect())
                    .collect(),
            })
            .collect();
        let hodge_filtration = h
            .hodge()
            .jumps()
            .iter()
            .map(|(&p, s)| HodgeJump {
                p,
                basis: s
                    .basis_vectors()
                    .iter()
                    .map(|v| v.iter().map(|&z| ComplexString(z)).collect())
                    .collect(),
            })
            .collect();
        let comparison_matrix = h.comparison().map(matrix_rows);
        MhsDocument {
            dimension: h.dimension(),
            weight_filtration,
            hodge_filtration,
            comparison_matrix,
            framing: None,
        }
    }

    pub fn from_framed(fh: &FramedMhs) -> Self {
        let mut doc = Self::from_mhs(&fh.mhs);
        doc.framing = Some(FramingDoc {
            a: fh.a,
            b: fh.b,
            phi: fh.phi_class.iter().cloned().map(RationalString).collect(),
            psi: fh.psi_functional.iter().cloned().map(RationalString).collect(),
        });
        doc
    }
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<ComplexString>> {
    m.row_iter()
        .map(|r| r.iter().map(|&z| ComplexString(z)).collect())
        .collect()
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, IoError> {
    std::fs::read(path).map_err(|e| IoError::io(path, e))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    std::fs::write(path, contents).map_err(|e| IoError::io(path, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceReport {
    pub p: i32,
    pub q: i32,
    pub dim: usize,
    pub basis: Vec<Vec<ComplexString>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub a: i32,
    pub b: i32,
    pub matrix: Vec<Vec<ComplexString>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplittingDiagnostics {
    pub splitting_residual: f64,
    pub reality_residual: f64,
    pub lambda_residual: f64,
}

/// Serialised output of a splitting computation.
#[derive(Debug, Clone, Serialize)]
pub struct SplittingReport {
    pub dimension: usize,
    pub pieces: Vec<PieceReport>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<ComplexString>>,
    pub delta: Vec<Vec<ComplexString>>,
    /// δ in de Rham coordinates, when a comparison matrix is present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_de_rham: Option<Vec<Vec<ComplexString>>>,
    pub delta_components: Vec<ComponentReport>,
    pub diagnostics: SplittingDiagnostics,
}

impl SplittingReport {
    pub fn new(h: &MixedHodgeStructure, s: &SplittingData) -> Self {
        SplittingReport {
            dimension: h.dimension(),
            pieces: s
                .bigrading
                .pieces()
                .iter()
                .map(|(&(p, q), sub)| PieceReport {
                    p,
                    q,
                    dim: sub.dim(),
                    basis: sub
                        .basis_vectors()
                        .iter()
                        .map(|v| v.iter().map(|&z| ComplexString(z)).collect())
                        .collect(),
                })
                .collect(),
            y: matrix_rows(&s.y),
            delta: matrix_rows(&s.delta),
            delta_de_rham: h.to_de_rham_operator(&s.delta).as_ref().map(matrix_rows),
            delta_components: s
                .delta_components
                .iter()
                .map(|(&(a, b), m)| ComponentReport {
                    a,
                    b,
                    matrix: matrix_rows(m),
                })
                .collect(),
            diagnostics: SplittingDiagnostics {
                splitting_residual: s.residual,
                reality_residual: s.reality_residual,
                lambda_residual: s.lambda_residual,
            },
        }
    }
}

/// Rectangle `[re_min, re_max] x [im_min, im_max]` sampled on an `nx x ny`
/// grid, row by row from `im_min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Rectangle {
    pub fn points(&self) -> Vec<Scalar> {
        let at = |lo: f64, hi: f64, n: usize, i: usize| {
            if n <= 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push(c(
                    at(self.re_min, self.re_max, self.nx, i),
                    at(self.im_min, self.im_max, self.ny, j),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Points(Vec<ComplexString>),
    Rectangle(Rectangle),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PathPolicy {
    Principal,
    /// One polyline per grid point, in grid order.
    Explicit(Vec<Vec<ComplexString>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub grid: Grid,
    #[serde(rename = "N")]
    pub n: usize,
    /// `(a, b)` pairs, the framing of `H(z)_{-a,-b}`.
    pub framings: Vec<(usize, usize)>,
    #[serde(default = "principal")]
    pub path: PathPolicy,
}

fn principal() -> PathPolicy {
    PathPolicy::Principal
}

impl SweepSpec {
    pub fn from_json(bytes: &[u8]) -> Result<Self, IoError> {
        parse_json(bytes)
    }

    pub fn points(&self) -> Vec<Scalar> {
        match &self.grid {
            Grid::Points(p) => p.iter().map(|z| z.0).collect(),
            Grid::Rectangle(r) => r.points(),
        }
    }

    /// Grid points paired with their continuation paths.
    pub fn jobs(&self) -> Result<Vec<(Scalar, Vec<Scalar>)>, IoError> {
        let pts = self.points();
        match &self.path {
            PathPolicy::Principal => Ok(pts.into_iter().map(|z| (z, Vec::new())).collect()),
            PathPolicy::Explicit(paths) => {
                if paths.len() != pts.len() {
                    return Err(IoError::Parse {
                        path: "$.path.explicit".into(),
                        message: format!("expected {} paths, found {}", pts.len(), paths.len()),
                    });
                }
                Ok(pts
                    .into_iter()
                    .zip(paths)
                    .map(|(z, p)| (z, p.iter().map(|w| w.0).collect()))
                    .collect())
            }
        }
    }
}

/// One line of a height sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub re_z: f64,
    pub im_z: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub ht1_pipeline: f64,
    pub ht1_closed: f64,
    pub ht2_pipeline: f64,
    pub ht2_closed: f64,
    pub delta_residual: f64,
}

pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Pipeline and closed-form heights of `H(z)_{-a,-b}` for each framing at one
/// point, sharing the period matrices and the splitting.
pub fn evaluate_point(
    ctx: &PolylogContext,
    framings: &[(usize, usize)],
    tol: &Tolerances,
) -> Result<Vec<SweepRow>, IoError> {
    let m = build_matrices(ctx)?;
    let h = polylog_mhs_from(ctx.n, &m)?;
    let closed = delta_closed_form_from(&m)?;
    let shared = SharedSplitting::new(&h, tol)?;
    let delta_residual = {
        let d = h
            .to_de_rham_operator(&shared.splitting.delta)
            .expect("polylog structures carry a comparison matrix");
        frobenius(&(d - &closed))
    };
    let mut rows = Vec::with_capacity(framings.len());
    for &(a, b) in framings {
        if a >= b || b > ctx.n {
            return Err(IoError::Validation(format!(
                "framing needs 0 <= a < b <= N, got a = {a}, b = {b}, N = {}",
                ctx.n
            )));
        }
        let n = ctx.n + 1;
        let fh = FramedMhs::new(
            h.clone(),
            -(a as i32),
            -(b as i32),
            unit_vector(n, a),
            unit_vector(n, b),
        )?;
        let hd = shared.heights(&fh)?;
        let cf = heights_closed_form_from(&m.branch, a, b);
        rows.push(SweepRow {
            re_z: ctx.z.re,
            im_z: ctx.z.im,
            n: ctx.n,
            a,
            b,
            ht1_pipeline: hd.height1(),
            ht1_closed: cf.ht1,
            ht2_pipeline: hd.height2()?,
            ht2_closed: cf.ht2,
            delta_residual,
        });
    }
    Ok(rows)
}

pub fn run_sweep(spec: &SweepSpec, tol: &Tolerances) -> Result<Vec<SweepRow>, IoError> {
    if spec.framings.is_empty() {
        return Err(IoError::Parse {
            path: "$.framings".into(),
            message: "at least one framing is required".into(),
        });
    }
    let mut rows = Vec::new();
    for (i, (z, path)) in spec.jobs()?.into_iter().enumerate() {
        let ctx = PolylogContext::with_path(z, spec.n, path).map_err(|e| match IoError::from(e) {
            IoError::Validation(m) => IoError::Validation(format!("grid point {i}: {m}")),
            other => other,
        })?;
        rows.extend(evaluate_point(&ctx, &spec.framings, tol)?);
    }
    Ok(rows)
}
