//! WebAssembly bindings for the static demo page in `www/`. Each export
//! returns a JSON string of sampled curves; the plain functions behind them
//! are usable natively.

use hmftrace::field::make_quadratic_field;
use hmftrace::specfun::SphericalSolution;
use hmftrace::transforms::{TestFunction, TransformTriple};
use hmftrace::zeta::{zeta_continued, ZetaContext};
use hmftrace::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_SAMPLES: usize = 400;

#[derive(Serialize)]
pub struct TransformCurves {
    pub w: Vec<f64>,
    pub q: Vec<f64>,
    pub u: Vec<f64>,
    pub g: Vec<f64>,
    pub r: Vec<f64>,
    pub h: Vec<f64>,
}

#[derive(Serialize)]
pub struct SphericalCurves {
    pub r: Vec<f64>,
    pub radial_re: Vec<f64>,
    pub radial_im: Vec<f64>,
    pub theta: Vec<f64>,
    pub angular_re: Vec<f64>,
    pub angular_im: Vec<f64>,
}

#[derive(Serialize)]
pub struct ZetaLine {
    pub field: String,
    pub sigma: f64,
    pub t: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

fn grid(lo: f64, hi: f64, samples: usize) -> Result<Vec<f64>> {
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(Error::Domain(format!("samples must lie in 2..={MAX_SAMPLES}")));
    }
    Ok((0..samples).map(|j| lo + (hi - lo) * j as f64 / (samples - 1) as f64).collect())
}

fn to_json<T: Serialize>(x: &T) -> Result<String> {
    serde_json::to_string(x).map_err(|e| Error::Domain(e.to_string()))
}

/// One-dimensional bump `ψ` centred at `center` with half-width `width`, and
/// its transforms `Q`, `g` and `h` on their natural ranges.
pub fn transform_curves_json(center: f64, width: f64, r_max: f64, samples: usize) -> Result<String> {
    let t = TransformTriple::new(TestFunction::new(vec![center], vec![width], 1.0)?)?;
    let w = grid(0.0, center + width, samples)?;
    let u = grid(0.0, t.g_radius(0), samples)?;
    let r = grid(0.0, r_max, samples)?;
    let q = w.iter().map(|x| t.q(&[*x])).collect::<Result<_>>()?;
    let g = u.iter().map(|x| t.g(&[*x])).collect::<Result<_>>()?;
    let h = r.iter().map(|x| t.h(&[*x])).collect();
    to_json(&TransformCurves { w, q, u, g, r, h })
}

/// Radial `g_μ` on `[0, r_max]` and angular `f_μ` on `[0, 1.5]`.
pub fn spherical_curves_json(mu_re: f64, mu_im: f64, r_max: f64, samples: usize) -> Result<String> {
    let mu = Complex64::new(mu_re, mu_im);
    let radial = SphericalSolution::radial(mu, r_max)?;
    let angular = SphericalSolution::angular(mu, 1.5)?;
    let r = grid(0.0, r_max, samples)?;
    let theta = grid(0.0, 1.5, samples)?;
    let g = r.iter().map(|x| radial.eval(*x)).collect::<Result<Vec<_>>>()?;
    let f = theta.iter().map(|x| angular.eval(*x)).collect::<Result<Vec<_>>>()?;
    to_json(&SphericalCurves {
        r,
        radial_re: g.iter().map(|z| z.re).collect(),
        radial_im: g.iter().map(|z| z.im).collect(),
        theta,
        angular_re: f.iter().map(|z| z.re).collect(),
        angular_im: f.iter().map(|z| z.im).collect(),
    })
}

/// `Z(σ + it, m)` for the ring of integers of Q(√d), `t ∈ [0, t_max]`.
pub fn zeta_line_json(radicand: i64, m: i64, sigma: f64, t_max: f64, samples: usize) -> Result<String> {
    let field = make_quadratic_field(radicand)?;
    let ctx = ZetaContext::for_field(&field, vec![m])?;
    let t = grid(0.0, t_max, samples)?;
    let z = t.iter().map(|y| zeta_continued(&ctx, Complex64::new(sigma, *y)).map(|v| v.value)).collect::<Result<Vec<_>>>()?;
    to_json(&ZetaLine { field: field.label(), sigma, re: z.iter().map(|v| v.re).collect(), im: z.iter().map(|v| v.im).collect(), t })
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn transform_curves(center: f64, width: f64, r_max: f64, samples: usize) -> std::result::Result<String, JsError> {
    js(transform_curves_json(center, width, r_max, samples))
}

#[wasm_bindgen]
pub fn spherical_curves(mu_re: f64, mu_im: f64, r_max: f64, samples: usize) -> std::result::Result<String, JsError> {
    js(spherical_curves_json(mu_re, mu_im, r_max, samples))
}

#[wasm_bindgen]
pub fn zeta_line(radicand: i64, m: i64, sigma: f64, t_max: f64, samples: usize) -> std::result::Result<String, JsError> {
    js(zeta_line_json(radicand, m, sigma, t_max, samples))
}
