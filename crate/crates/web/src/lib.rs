//! Browser bindings: each export takes plain parameters and returns a JSON
//! string, or throws a string on invalid input.

use foliakit::foliation::{decomposability_check, integrability_check, omega_from_field, pullback_form, RationalMap};
use foliakit::graded::{jouanolou_field, kernel_test, WeightVector};
use foliakit::numeric::{chart_field, classify_hyperbolic, solve_singularities, Classification, NumericConfig};
use foliakit::{VectorField, Q};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct SingularPoint {
    /// Real and imaginary parts of each homogeneous coordinate.
    pub coordinates: Vec<[f64; 2]>,
    pub residual: f64,
    pub classification: Option<Classification>,
}

#[derive(Debug, Serialize)]
pub struct Singularities {
    pub expected: u64,
    pub found: usize,
    pub method: String,
    pub points: Vec<SingularPoint>,
}

/// Singular points of the cyclic field of degree `d` on `P^{n−1}`.
pub fn singularities(n: usize, d: u32, seed: u64) -> Result<Singularities, String> {
    if !(2..=4).contains(&n) || !(1..=4).contains(&d) {
        return Err("choose 2 <= n <= 4 and 1 <= d <= 4".into());
    }
    let g = omega_from_field(&jouanolou_field(n, d)).map_err(|e| e.to_string())?;
    let cfg = NumericConfig { seed, ..NumericConfig::default() };
    let rep = solve_singularities(&g, &cfg).map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    for rec in &rep.points {
        let cf = chart_field(&g, rec.chart).map_err(|e| e.to_string())?;
        let classification = classify_hyperbolic(rec, &cf, &cfg).ok().and_then(|c| c.classification);
        points.push(SingularPoint {
            coordinates: rec.point.iter().map(|c| [c.re, c.im]).collect(),
            residual: rec.residual,
            classification,
        });
    }
    Ok(Singularities { expected: rep.expected, found: rep.found, method: rep.method.clone(), points })
}

#[derive(Debug, Serialize)]
pub struct PullbackSummary {
    pub coefficient_degree: Option<u32>,
    pub degree: i64,
    pub components: usize,
    pub terms: usize,
    pub decomposable: bool,
    pub integrable: bool,
}

/// Pull-back of the cyclic field of degree `d` on `P^{n−1}` by
/// `F_i = z_i^ν − (i+1)^2 z_n^ν`.
pub fn pullback(nu: u32, d: u32, n: usize) -> Result<PullbackSummary, String> {
    if !(3..=5).contains(&n) || !(1..=3).contains(&nu) || !(1..=3).contains(&d) {
        return Err("choose 3 <= n <= 5, 1 <= nu <= 3 and 1 <= d <= 3".into());
    }
    let c: Vec<Q> = (1..=n as i64).map(|i| Q::from(i * i)).collect();
    let f = RationalMap::diagonal_difference_scaled(n, nu, &c).map_err(|e| e.to_string())?;
    let g = omega_from_field(&jouanolou_field(n, d)).map_err(|e| e.to_string())?;
    let eta = pullback_form(&f, &g).map_err(|e| e.to_string())?.foliation;
    let form = eta.form();
    Ok(PullbackSummary {
        coefficient_degree: form.coefficient_degree().ok().flatten(),
        degree: eta.degree(),
        components: form.num_components(),
        terms: form.components().map(|(_, p)| p.len()).sum(),
        decomposable: decomposability_check(form),
        integrable: integrability_check(form).unwrap_or(false),
    })
}

#[derive(Debug, Serialize)]
pub struct KernelSummary {
    pub level: i64,
    pub domain_dim: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub kernel: Vec<Vec<String>>,
}

/// Kernel of `W ↦ [X, W]` on linear fields, for `X` given by one expression
/// per component in the variables `x0, x1, …`.
pub fn kernel(components: &[String]) -> Result<KernelSummary, String> {
    let exprs: Vec<&str> = components.iter().map(|s| s.trim()).collect();
    let x = VectorField::parse(&exprs).map_err(|e| e.to_string())?;
    let rep = kernel_test(&x, &WeightVector::radial(x.nvars())).map_err(|e| e.to_string())?;
    Ok(KernelSummary {
        level: rep.level,
        domain_dim: rep.domain_dim,
        rank: rep.rank,
        kernel_dim: rep.kernel_dim,
        kernel: rep.kernel_basis.iter().map(|w| w.components().iter().map(|p| p.to_string()).collect()).collect(),
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.map(|v| serde_json::to_string(&v).expect("serializable")).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = singularities)]
pub fn singularities_js(n: usize, d: u32, seed: u32) -> Result<String, JsValue> {
    to_js(singularities(n, d, seed as u64))
}

#[wasm_bindgen(js_name = pullback)]
pub fn pullback_js(nu: u32, d: u32, n: usize) -> Result<String, JsValue> {
    to_js(pullback(nu, d, n))
}

/// Components separated by `;`.
#[wasm_bindgen(js_name = kernel)]
pub fn kernel_js(components: &str) -> Result<String, JsValue> {
    let parts: Vec<String> = components.split(';').map(str::to_owned).collect();
    to_js(kernel(&parts))
}
