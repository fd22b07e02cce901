//! Browser bindings for the polylog structure `H(z)`.
//!
//! Every function returns a JSON string; failures surface as JS exceptions.

use mixed_hodge::deligne::{delta_splitting_with, Tolerances};
use mixed_hodge::io::evaluate_point;
use mixed_hodge::linalg::{c, frobenius, CMatrix, Scalar};
use mixed_hodge::polylog::{
    build_matrices, delta_closed_form_from, polylog_mhs_from, sv_bd_from, sv_brown_from, PolylogContext,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_N: usize = 8;
const MAX_SAMPLES: usize = 2000;

fn context(re: f64, im: f64, n: usize) -> Result<PolylogContext, String> {
    if !(1..=MAX_N).contains(&n) {
        return Err(format!("N must be between 1 and {MAX_N}"));
    }
    PolylogContext::new(c(re, im), n).map_err(|e| e.to_string())
}

fn pair(z: Scalar) -> [f64; 2] {
    [z.re, z.im]
}

fn rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter()
        .map(|r| r.iter().map(|&z| pair(z)).collect())
        .collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serialises")
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Pipeline and closed-form heights of `H(z)` framed by `(-a,-b)`.
pub fn heights_json(re: f64, im: f64, n: usize, a: usize, b: usize) -> Result<String, String> {
    let ctx = context(re, im, n)?;
    let rows = evaluate_point(&ctx, &[(a, b)], &Tolerances::default()).map_err(|e| e.to_string())?;
    Ok(to_json(&rows[0]))
}

#[derive(Serialize)]
struct CurvePoint {
    t: f64,
    ht1: Option<f64>,
    ht2: Option<f64>,
    ht1_closed: Option<f64>,
    ht2_closed: Option<f64>,
}

/// Heights at `count` points of the segment from `z0` to `z1`; points where
/// the evaluation fails (a cut, `0`, `1`) are `null`.
pub fn height_curve_json(
    z0: [f64; 2],
    z1: [f64; 2],
    count: usize,
    n: usize,
    a: usize,
    b: usize,
) -> Result<String, String> {
    if !(2..=MAX_SAMPLES).contains(&count) {
        return Err(format!("sample count must be between 2 and {MAX_SAMPLES}"));
    }
    if !(1..=MAX_N).contains(&n) || a >= b || b > n {
        return Err(format!("need 0 <= a < b <= N <= {MAX_N}"));
    }
    let tol = Tolerances::default();
    let out: Vec<CurvePoint> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            let z = c(z0[0] + t * (z1[0] - z0[0]), z0[1] + t * (z1[1] - z0[1]));
            let row = PolylogContext::new(z, n)
                .ok()
                .and_then(|ctx| evaluate_point(&ctx, &[(a, b)], &tol).ok())
                .map(|mut r| r.remove(0));
            CurvePoint {
                t,
                ht1: row.as_ref().map(|r| r.ht1_pipeline),
                ht2: row.as_ref().map(|r| r.ht2_pipeline),
                ht1_closed: row.as_ref().map(|r| r.ht1_closed),
                ht2_closed: row.as_ref().map(|r| r.ht2_closed),
            }
        })
        .collect();
    Ok(to_json(&out))
}

#[derive(Serialize)]
struct DeltaReport {
    betti: Vec<Vec<[f64; 2]>>,
    de_rham: Vec<Vec<[f64; 2]>>,
    closed_form: Vec<Vec<[f64; 2]>>,
    residual: f64,
    splitting_residual: f64,
}

/// δ of `H(z)` from the general splitting, next to its closed form.
pub fn delta_json(re: f64, im: f64, n: usize) -> Result<String, String> {
    let ctx = context(re, im, n)?;
    let m = build_matrices(&ctx).map_err(|e| e.to_string())?;
    let h = polylog_mhs_from(n, &m).map_err(|e| e.to_string())?;
    let s = delta_splitting_with(&h, &Tolerances::default()).map_err(|e| e.to_string())?;
    let closed = delta_closed_form_from(&m).map_err(|e| e.to_string())?;
    let de_rham = h
        .to_de_rham_operator(&s.delta)
        .ok_or("comparison matrix is singular")?;
    Ok(to_json(&DeltaReport {
        betti: rows(&s.delta),
        residual: frobenius(&(&de_rham - &closed)),
        de_rham: rows(&de_rham),
        closed_form: rows(&closed),
        splitting_residual: s.residual,
    }))
}

#[derive(Serialize)]
struct PolylogValue {
    k: usize,
    li: [f64; 2],
    sv_brown: [f64; 2],
    sv_bd: [f64; 2],
}

/// Principal `Li_k(z)` and both single-valued versions for `k = 1..=n`.
pub fn polylogs_json(re: f64, im: f64, n: usize) -> Result<String, String> {
    let ctx = context(re, im, n)?;
    let br = ctx.branch(n).map_err(|e| e.to_string())?;
    let out: Vec<PolylogValue> = (1..=n)
        .map(|k| PolylogValue {
            k,
            li: pair(br.li(k)),
            sv_brown: pair(sv_brown_from(k, &br)),
            sv_bd: pair(sv_bd_from(k, &br)),
        })
        .collect();
    Ok(to_json(&out))
}

#[wasm_bindgen]
pub fn heights(re: f64, im: f64, n: usize, a: usize, b: usize) -> Result<String, JsError> {
    heights_json(re, im, n, a, b).map_err(js)
}

#[wasm_bindgen(js_name = heightCurve)]
#[allow(clippy::too_many_arguments)]
pub fn height_curve(
    re0: f64,
    im0: f64,
    re1: f64,
    im1: f64,
    count: usize,
    n: usize,
    a: usize,
    b: usize,
) -> Result<String, JsError> {
    height_curve_json([re0, im0], [re1, im1], count, n, a, b).map_err(js)
}

#[wasm_bindgen]
pub fn delta(re: f64, im: f64, n: usize) -> Result<String, JsError> {
    delta_json(re, im, n).map_err(js)
}

#[wasm_bindgen]
pub fn polylogs(re: f64, im: f64, n: usize) -> Result<String, JsError> {
    polylogs_json(re, im, n).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn heights_agree_with_closed_form() {
        let v: Value = serde_json::from_str(&heights_json(0.3, 0.4, 3, 0, 2).unwrap()).unwrap();
        let (p, cf) = (
            v["ht1_pipeline"].as_f64().unwrap(),
            v["ht1_closed"].as_f64().unwrap(),
        );
        assert!((p - cf).abs() < 1e-10);
    }

    #[test]
    fn curve_marks_the_cut() {
        let v: Value =
            serde_json::from_str(&height_curve_json([-1.0, 0.5], [-1.0, -0.5], 3, 2, 0, 1).unwrap()).unwrap();
        let pts = v.as_array().unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts[0]["ht1"].is_f64() && pts[2]["ht1"].is_f64());
        assert!(pts[1]["ht1"].is_null());
    }

    #[test]
    fn delta_matches_closed_form() {
        let v: Value = serde_json::from_str(&delta_json(-0.4, 0.7, 4).unwrap()).unwrap();
        assert!(v["residual"].as_f64().unwrap() < 1e-9);
        assert_eq!(v["betti"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn polylog_values() {
        let v: Value = serde_json::from_str(&polylogs_json(0.5, 0.0001, 2).unwrap()).unwrap();
        let li1 = v[0]["li"][0].as_f64().unwrap();
        assert!((li1 - 2f64.ln()).abs() < 1e-3);
        assert!(heights_json(1.0, 0.0, 2, 0, 1).is_err());
        assert!(polylogs_json(0.3, 0.1, 0).is_err());
    }
}
