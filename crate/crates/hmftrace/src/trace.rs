//! Class contributions to the truncated trace: elliptic, mixed, hyperbolic-parabolic
//! and parabolic terms, with brute-force integrals over the upper half-space for
//! cross-checking the closed forms.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FieldEmbedding, Integral};
use crate::lattice::{quotient_reps_mod_units, CuspFrame, MultiplierGroup};
use crate::modgroup::{classify, pair_argument, CoordinateKind, ElementKind, GroupElementN, Point};
use crate::quad::{self, Estimate, Tolerance};
use crate::serial::{self, ComplexPair};
use crate::specfun::{complex_gamma, gamma_ratio, SphericalSolution};
use crate::transforms::{HGrid, TestFunction, TransformTriple};
use crate::zeta::{zeta_continued, ZetaContext};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `z ↦ u(z)` on `ℍⁿ`.
pub type Evaluator = Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>;

/// `r ↦ ũ(r·i)` for `r ∈ (ℝ⁺)ⁿ`.
pub type RegularizedForm = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

/// Constant-term coefficients of the form at one cusp.
#[derive(Clone, Debug)]
pub struct CuspData {
    pub label: String,
    pub frame: CuspFrame,
    pub eta: Complex64,
    pub phi: Complex64,
}

/// Eigenfunction data entering the class terms.
#[derive(Clone)]
pub struct AutomorphicFormData {
    pub s: Complex64,
    pub m_u: Vec<i64>,
    pub cusps: Vec<CuspData>,
    pub evaluator: Evaluator,
    pub eigen_exponents: Vec<Complex64>,
}

impl fmt::Debug for AutomorphicFormData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AutomorphicFormData")
            .field("s", &self.s)
            .field("m_u", &self.m_u)
            .field("cusps", &self.cusps)
            .field("eigen_exponents", &self.eigen_exponents)
            .finish_non_exhaustive()
    }
}

impl AutomorphicFormData {
    pub fn new(s: Complex64, m_u: Vec<i64>, cusps: Vec<CuspData>, evaluator: Evaluator, multipliers: &MultiplierGroup) -> Result<Self> {
        if m_u.len() != multipliers.rank() {
            return Err(Error::Domain(format!("m_u needs {} entries", multipliers.rank())));
        }
        let zero_coeffs = cusps.iter().all(|k| k.eta == ZERO && k.phi == ZERO);
        if zero_coeffs && m_u.iter().any(|m| *m != 0) {
            return Err(Error::Domain("a form with vanishing constant terms must have m_u = 0".into()));
        }
        let eigen_exponents = multipliers.exponents_from(s, &m_u);
        Ok(AutomorphicFormData { s, m_u, cusps, evaluator, eigen_exponents })
    }

    /// The constant-term model `u = η ∏ y_k^{s_k} + φ ∏ y_k^{1−s_k}` at the cusp at infinity.
    pub fn constant_term_model(field: &FieldEmbedding, s: Complex64, m_u: Vec<i64>, eta: Complex64, phi: Complex64) -> Result<Self> {
        let frame = CuspFrame::infinity(field)?;
        let exps = frame.multipliers.exponents_from(s, &m_u);
        let ex = exps.clone();
        let evaluator: Evaluator = Arc::new(move |z: &Point| {
            let mut a = eta;
            let mut b = phi;
            for (w, sk) in z.iter().zip(&ex) {
                let ly = w.im.ln();
                a *= (sk * ly).exp();
                b *= ((1.0 - sk) * ly).exp();
            }
            a + b
        });
        let multipliers = frame.multipliers.clone();
        let cusps = vec![CuspData { label: "inf".into(), frame, eta, phi }];
        Self::new(s, m_u, cusps, evaluator, &multipliers)
    }

    /// Leading constant term of the Eisenstein series at infinity (`η = 1`, `φ = 0`).
    pub fn demo_eisenstein(field: &FieldEmbedding, s: Complex64, m_u: Vec<i64>) -> Result<Self> {
        Self::constant_term_model(field, s, m_u, c(1.0, 0.0), ZERO)
    }

    /// The zero form: every coefficient and the evaluator vanish.
    pub fn cusp_form_zero(field: &FieldEmbedding, s: Complex64) -> Result<Self> {
        let frame = CuspFrame::infinity(field)?;
        let multipliers = frame.multipliers.clone();
        let m_u = vec![0; multipliers.rank()];
        let cusps = vec![CuspData { label: "inf".into(), frame, eta: ZERO, phi: ZERO }];
        Self::new(s, m_u, cusps, Arc::new(|_: &Point| ZERO), &multipliers)
    }

    pub fn dim(&self) -> usize {
        self.eigen_exponents.len()
    }

    pub fn eval(&self, z: &Point) -> Complex64 {
        (self.evaluator)(z)
    }

    /// `μ_k = s_k(s_k − 1)`.
    pub fn eigen_mu(&self) -> Vec<Complex64> {
        self.eigen_exponents.iter().map(|s| s * (s - 1.0)).collect()
    }

    pub fn is_cusp_form(&self) -> bool {
        self.cusps.iter().all(|k| k.eta == ZERO && k.phi == ZERO)
    }

    pub fn character_is_trivial(&self) -> bool {
        self.m_u.iter().all(|m| *m == 0)
    }

    pub fn check_critical_strip(&self) -> Result<()> {
        if self.s.re > 0.0 && self.s.re < 1.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("class terms need 0 < Re s < 1, got Re s = {}", self.s.re)))
        }
    }
}

/// How a term depends on the truncation height `A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ADependence {
    None,
    /// `value = a_s·A^s + a_one_minus_s·A^{1−s} + (A-independent part)`.
    Powers {
        #[serde(serialize_with = "serial::complex")]
        a_s: Complex64,
        #[serde(serialize_with = "serial::complex")]
        a_one_minus_s: Complex64,
    },
}

impl ADependence {
    pub fn coefficients(&self) -> (Complex64, Complex64) {
        match self {
            ADependence::None => (ZERO, ZERO),
            ADependence::Powers { a_s, a_one_minus_s } => (*a_s, *a_one_minus_s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub name: String,
    #[serde(serialize_with = "serial::complex")]
    pub value: Complex64,
}

fn comp(name: impl Into<String>, value: Complex64) -> Component {
    Component { name: name.into(), value }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermResult {
    #[serde(serialize_with = "serial::complex")]
    pub value: Complex64,
    pub a_dependence: ADependence,
    pub error_estimate: f64,
    pub components: Vec<Component>,
}

impl TermResult {
    pub fn zero() -> Self {
        TermResult { value: ZERO, a_dependence: ADependence::None, error_estimate: 0.0, components: Vec::new() }
    }

    fn constant(value: Complex64, error_estimate: f64, components: Vec<Component>) -> Self {
        TermResult { value, a_dependence: ADependence::None, error_estimate, components }
    }

    fn add(&mut self, other: &TermResult) {
        self.value += other.value;
        self.error_estimate += other.error_estimate;
        let (a1, b1) = self.a_dependence.coefficients();
        let (a2, b2) = other.a_dependence.coefficients();
        if matches!(self.a_dependence, ADependence::Powers { .. }) || matches!(other.a_dependence, ADependence::Powers { .. }) {
            self.a_dependence = ADependence::Powers { a_s: a1 + a2, a_one_minus_s: b1 + b2 };
        }
    }
}

/// Half-open parallelotope `{anchor + Σ t_j edge_j : t ∈ [0,1)^m}` in log coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Parallelotope {
    pub anchor: Vec<f64>,
    pub edges: Vec<Vec<f64>>,
}

impl Parallelotope {
    pub fn new(anchor: Vec<f64>, edges: Vec<Vec<f64>>) -> Result<Self> {
        let m = anchor.len();
        if m == 0 || edges.len() != m || edges.iter().any(|e| e.len() != m) {
            return Err(Error::Domain("a cell needs as many edges as coordinates".into()));
        }
        let p = Parallelotope { anchor, edges };
        if !(p.volume() > 1e-12) {
            return Err(Error::Domain("degenerate cell".into()));
        }
        Ok(p)
    }

    /// `[a, b)` on the line.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![vec![b - a]])
    }

    /// Cell spanned by the multiplier logarithms and the norm direction, with
    /// `Σ_k log r_k` ranging over `[−half_width, half_width)`.
    pub fn norm_window(group: &MultiplierGroup, half_width: f64) -> Result<Self> {
        let n = group.degree();
        let mut edges: Vec<Vec<f64>> = group.generators.iter().map(|g| g.iter().map(|x| x.ln()).collect()).collect();
        edges.push(vec![2.0 * half_width / n as f64; n]);
        Self::new(vec![-half_width / n as f64; n], edges)
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn volume(&self) -> f64 {
        let m = self.dim();
        DMatrix::from_fn(m, m, |i, j| self.edges[j][i]).determinant().abs()
    }

    pub fn point(&self, t: &[f64]) -> Vec<f64> {
        let mut p = self.anchor.clone();
        for (tj, e) in t.iter().zip(&self.edges) {
            for (pk, ek) in p.iter_mut().zip(e) {
                *pk += tj * ek;
            }
        }
        p
    }

    pub fn shifted(&self, delta: &[f64]) -> Self {
        let anchor = self.anchor.iter().zip(delta).map(|(a, d)| a + d).collect();
        Parallelotope { anchor, edges: self.edges.clone() }
    }
}

fn check_angles(angles: &[f64]) -> Result<()> {
    for &t in angles {
        if !(t > 1e-12 && t < PI - 1e-12) {
            return Err(Error::DegenerateAngle(format!("rotation angle {t} is not in (0, π)")));
        }
    }
    Ok(())
}

fn quad_check<T>(est: Estimate<T>, what: &str) -> Result<Estimate<T>> {
    if est.converged {
        Ok(est)
    } else {
        Err(Error::Quadrature { what: what.into(), estimate: est.error })
    }
}

/// Sorted breakpoints from candidates inside `[lo, hi]`.
fn breakpoints(lo: f64, hi: f64, inner: &[f64]) -> Vec<f64> {
    let mut b = vec![lo];
    let mut mids: Vec<f64> = inner.iter().copied().filter(|x| *x > lo && *x < hi).collect();
    mids.sort_by(f64::total_cmp);
    b.extend(mids);
    b.push(hi);
    b
}

/// Hyperbolic radius where `(2 sinh r sin θ)²` reaches `w`.
fn elliptic_radius(w: f64, angle: f64) -> f64 {
    (w.max(0.0).sqrt() / (2.0 * angle.sin().abs())).asinh()
}

/// `∫ ψ_k((2 sinh r sin θ)²) g_μ(r) sinh r dr` over `r ≥ 0`.
fn elliptic_axis(psi: &TestFunction, k: usize, angle: f64, mu: Complex64, tol: Tolerance) -> Result<(Complex64, f64)> {
    let (lo, hi) = psi.support(k);
    let r_hi = elliptic_radius(hi, angle);
    let r_lo = elliptic_radius(lo, angle);
    let r_mid = elliptic_radius(psi.centers[k], angle);
    let sol = if mu == ZERO { None } else { Some(SphericalSolution::radial(mu, r_hi)?) };
    let failure = std::cell::RefCell::new(None);
    let sn = angle.sin();
    let mut f = |r: f64| -> Complex64 {
        let w = 2.0 * r.sinh() * sn;
        let p = psi.factor(k, w * w);
        if p == 0.0 {
            return ZERO;
        }
        let g = match &sol {
            None => c(1.0, 0.0),
            Some(s) => s.eval(r).unwrap_or_else(|e| {
                failure.replace(Some(e));
                ZERO
            }),
        };
        g * (p * r.sinh())
    };
    let est = quad::adaptive_from(&mut f, &breakpoints(r_lo, r_hi, &[r_mid]), tol);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let est = quad_check(est, "elliptic radial integral")?;
    Ok((est.value, est.error))
}

/// `∫ ψ_k(a/cos²θ) f_μ(θ) dθ/cos²θ` over `|θ| < π/2`, folded onto `θ ≥ 0` when `folded`.
fn angular_axis(psi: &TestFunction, k: usize, a: f64, mu: Complex64, folded: bool, tol: Tolerance) -> Result<(Complex64, f64)> {
    let (lo, hi) = psi.support(k);
    if a >= hi {
        return Ok((ZERO, 0.0));
    }
    let theta_of = |w: f64| if w <= a { 0.0 } else { (a / w).sqrt().acos() };
    let t_hi = theta_of(hi);
    let t_lo = theta_of(lo);
    let t_mid = theta_of(psi.centers[k]);
    let sol = if mu == ZERO { None } else { Some(SphericalSolution::angular(mu, t_hi)?) };
    let failure = std::cell::RefCell::new(None);
    let mut f = |t: f64| -> Complex64 {
        let cs = t.cos();
        let p = psi.factor(k, a / (cs * cs));
        if p == 0.0 {
            return ZERO;
        }
        let fv = match &sol {
            None => c(1.0, 0.0),
            Some(s) => s.eval(t).unwrap_or_else(|e| {
                failure.replace(Some(e));
                ZERO
            }),
        };
        fv * (p / (cs * cs))
    };
    let pos = breakpoints(t_lo, t_hi, &[t_mid]);
    let est = if folded {
        let e = quad::adaptive_from(&mut f, &pos, tol);
        Estimate { value: e.value * 2.0, error: 2.0 * e.error, ..e }
    } else {
        let mut neg: Vec<f64> = pos.iter().rev().map(|x| -x).collect();
        if t_lo > 0.0 {
            let left = quad::adaptive_from(&mut f, &neg, tol);
            let right = quad::adaptive_from(&mut f, &pos, tol);
            Estimate {
                value: left.value + right.value,
                error: left.error + right.error,
                evals: left.evals + right.evals,
                converged: left.converged && right.converged,
            }
        } else {
            neg.extend_from_slice(&pos[1..]);
            quad::adaptive_from(&mut f, &neg, tol)
        }
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let est = quad_check(est, "angular integral")?;
    Ok((est.value, est.error))
}

fn combine_product(factors: &[(Complex64, f64)], scale: Complex64) -> (Complex64, f64) {
    let mut v = scale;
    let mut rel = 0.0;
    for (f, e) in factors {
        v *= f;
        if f.norm() > 0.0 {
            rel += e / f.norm();
        }
    }
    (v, rel * v.norm())
}

/// Contribution of a totally elliptic class with rotation angles `angles` and
/// centralizer order `order`:
/// `(2π)ⁿ/order · u(z_γ) · ∫ ψ((2 sinh r_k sin θ_k)²) ∏ g_{μ_k}(r_k) sinh r_k dr_k`.
pub fn elliptic_term(
    psi: &TestFunction,
    angles: &[f64],
    order: u32,
    u_at_fixed_point: Complex64,
    mu: &[Complex64],
    tol: Tolerance,
) -> Result<TermResult> {
    let n = psi.dim();
    if angles.len() != n || mu.len() != n {
        return Err(Error::Domain("angles and eigenvalues must match the dimension".into()));
    }
    if order == 0 {
        return Err(Error::Domain("centralizer order must be positive".into()));
    }
    check_angles(angles)?;
    if psi.is_zero() || u_at_fixed_point == ZERO {
        return Ok(TermResult::zero());
    }
    let axes: Vec<(Complex64, f64)> = (0..n).map(|k| elliptic_axis(psi, k, angles[k], mu[k], tol)).collect::<Result<_>>()?;
    let scale = u_at_fixed_point * ((2.0 * PI).powi(n as i32) / order as f64 * psi.amplitude);
    let (value, err) = combine_product(&axes, scale);
    let mut components = vec![comp("u_at_fixed_point", u_at_fixed_point)];
    for (k, (v, _)) in axes.iter().enumerate() {
        components.push(comp(format!("radial_integral_{k}"), *v));
    }
    Ok(TermResult::constant(value, err, components))
}

fn elliptic_fixed_point(a: f64, cc: f64, d: f64) -> Option<Complex64> {
    let tr = a + d;
    if tr.abs() >= 2.0 || cc == 0.0 {
        return None;
    }
    Some(c((a - d) / (2.0 * cc), (4.0 - tr * tr).sqrt() / (2.0 * cc.abs())))
}

/// Per-axis Cartesian description of the hyperbolic disk of radius `radius` about `i`.
fn disk_breaks(radius: f64, level_is_y: bool, y: f64) -> Vec<f64> {
    let (ch, sh) = (radius.cosh(), radius.sinh());
    if level_is_y {
        breakpoints((-radius).exp(), radius.exp(), &[1.0, ch])
    } else {
        let half = (sh * sh - (y - ch) * (y - ch)).max(0.0).sqrt();
        if half == 0.0 {
            vec![]
        } else {
            vec![-half, 0.0, half]
        }
    }
}

/// Brute-force `∫_{ℍⁿ} k(z, γz) u(z) dμ(z)` for a totally elliptic `γ` fixing `(i, …, i)`,
/// over the product of hyperbolic disks outside of which the kernel vanishes.
pub fn elliptic_oracle(
    psi: &TestFunction,
    element: &GroupElementN,
    u: &(dyn Fn(&Point) -> Complex64 + Sync),
    tol: Tolerance,
) -> Result<Estimate<Complex64>> {
    let n = element.dim();
    if psi.dim() != n {
        return Err(Error::Domain("test function and element have different dimensions".into()));
    }
    let mut radii = Vec::with_capacity(n);
    for k in 0..n {
        let tr = element.a[k] + element.d[k];
        if !(tr.abs() < 2.0 - 1e-12) {
            return Err(Error::DegenerateAngle(format!("coordinate {k} is not elliptic (trace {tr})")));
        }
        let fixed = elliptic_fixed_point(element.a[k], element.c[k], element.d[k]);
        if !fixed.is_some_and(|z| (z - c(0.0, 1.0)).norm() < 1e-9) {
            return Err(Error::Domain(format!("coordinate {k} does not fix i")));
        }
        let sin_theta = (1.0 - tr * tr / 4.0).sqrt();
        radii.push((psi.support(k).1.sqrt() / (2.0 * sin_theta)).asinh());
    }
    if psi.is_zero() {
        return Ok(Estimate { value: ZERO, error: 0.0, evals: 0, converged: true });
    }
    let integrand = |v: &[f64]| -> Complex64 {
        let z: Point = (0..n).map(|k| c(v[2 * k + 1], v[2 * k])).collect();
        let gz = element.act(&z);
        let args: Vec<f64> = z.iter().zip(&gz).map(|(a, b)| pair_argument(*a, *b)).collect();
        let kv = psi.eval(&args);
        if kv == 0.0 {
            return ZERO;
        }
        let jac: f64 = z.iter().map(|w| w.im * w.im).product();
        u(&z) * (kv / jac)
    };
    let breaks = |level: usize, prefix: &[f64]| {
        let k = level / 2;
        let y = if level % 2 == 1 { prefix[level - 1] } else { 0.0 };
        disk_breaks(radii[k], level.is_multiple_of(2), y)
    };
    let est = quad::parallel_iterated(&integrand, &breaks, 2 * n, tol.with_budget(1024), tol);
    quad_check(est, "elliptic brute-force integral")
}

/// Contribution of a mixed class with hyperbolic coordinates first:
/// `(2π)^{n−m} F_γ(0) ∫ ψ(N(θ,γ), S(r,θ_γ)) ∏ f_μ(θ) dθ/cos²θ ∏ g_μ(r) sinh r dr`
/// with `N(θ, γ) = (N + N⁻¹ − 2)/cos²θ`.
pub fn mixed_term(
    psi: &TestFunction,
    norms: &[f64],
    angles: &[f64],
    f0: Complex64,
    mu: &[Complex64],
    tol: Tolerance,
) -> Result<TermResult> {
    let n = psi.dim();
    let m = norms.len();
    if m + angles.len() != n || mu.len() != n {
        return Err(Error::Domain("norms, angles and eigenvalues must match the dimension".into()));
    }
    if let Some(nk) = norms.iter().find(|nk| !(**nk > 1.0)) {
        return Err(Error::Domain(format!("hyperbolic norm {nk} must exceed 1")));
    }
    check_angles(angles)?;
    if psi.is_zero() || f0 == ZERO {
        return Ok(TermResult::zero());
    }
    let spreads: Vec<f64> = norms.iter().map(|nk| nk + 1.0 / nk - 2.0).collect();
    if let Some(k) = (0..m).find(|&k| spreads[k] >= psi.support(k).1) {
        return Ok(TermResult::constant(ZERO, 0.0, vec![comp(format!("outside_support_{k}"), ZERO)]));
    }
    let mut axes = Vec::with_capacity(n);
    for k in 0..m {
        axes.push(angular_axis(psi, k, spreads[k], mu[k], true, tol)?);
    }
    for k in m..n {
        axes.push(elliptic_axis(psi, k, angles[k - m], mu[k], tol)?);
    }
    let scale = f0 * ((2.0 * PI).powi((n - m) as i32) * psi.amplitude);
    let (value, err) = combine_product(&axes, scale);
    let mut components = vec![comp("F0", f0)];
    for (k, (v, _)) in axes.iter().enumerate() {
        let kind = if k < m { "angular" } else { "radial" };
        components.push(comp(format!("{kind}_integral_{k}"), *v));
    }
    Ok(TermResult::constant(value, err, components))
}

/// `∫_{log r ∈ P} u(ϱ(r i), ϱ i) ∏ dr_k/r_k`: the first `m` coordinates run along
/// the geodesics `ϱ_k(r_k i)`, the rest sit at `ϱ_k(i)`.
pub fn f0_of_centralizer(
    u: &(dyn Fn(&Point) -> Complex64 + Sync),
    conjugator: &GroupElementN,
    cell: &Parallelotope,
    m: usize,
    tol: Tolerance,
) -> Result<Estimate<Complex64>> {
    let n = conjugator.dim();
    if m == 0 || m > n || cell.dim() != m {
        return Err(Error::Domain(format!("cell dimension {} does not match {m} hyperbolic coordinates", cell.dim())));
    }
    let vol = cell.volume();
    let integrand = |t: &[f64]| -> Complex64 {
        let logs = cell.point(t);
        let w: Point = (0..n).map(|k| if k < m { c(0.0, logs[k].exp()) } else { c(0.0, 1.0) }).collect();
        u(&conjugator.act(&w)) * vol
    };
    let breaks = |_: usize, _: &[f64]| vec![0.0, 0.5, 1.0];
    quad_check(quad::iterated(&integrand, &breaks, m, tol), "centralizer integral")
}

/// Brute-force mixed integral for `γ = (D_{N_1}, …, D_{N_m}, R(θ_1), …)` with
/// `D_N: z ↦ N z`: polar coordinates `1 ≤ |z_k| < period_k` on the hyperbolic
/// coordinates and Cartesian disks on the elliptic ones.
pub fn mixed_oracle(
    psi: &TestFunction,
    norms: &[f64],
    angles: &[f64],
    periods: &[f64],
    u: &(dyn Fn(&Point) -> Complex64 + Sync),
    tol: Tolerance,
) -> Result<Estimate<Complex64>> {
    let m = norms.len();
    let n = m + angles.len();
    if psi.dim() != n || periods.len() != m {
        return Err(Error::Domain("dimension mismatch in the mixed brute-force integral".into()));
    }
    if norms.iter().chain(periods).any(|x| !(*x > 1.0)) {
        return Err(Error::Domain("norms and periods must exceed 1".into()));
    }
    check_angles(angles)?;
    let mut coords: Vec<[f64; 4]> = norms.iter().map(|nk| [nk.sqrt(), 0.0, 0.0, 1.0 / nk.sqrt()]).collect();
    coords.extend(angles.iter().map(|t| [t.cos(), t.sin(), -t.sin(), t.cos()]));
    let element = GroupElementN::from_coordinates(&coords);
    let mut phi_lo = Vec::with_capacity(m);
    for k in 0..m {
        let ratio = (norms[k] + 1.0 / norms[k] - 2.0) / psi.support(k).1;
        if ratio >= 1.0 || psi.is_zero() {
            return Ok(Estimate { value: ZERO, error: 0.0, evals: 0, converged: true });
        }
        phi_lo.push(ratio.sqrt().asin());
    }
    let radii: Vec<f64> = (m..n).map(|k| elliptic_radius(psi.support(k).1, angles[k - m])).collect();
    let integrand = |v: &[f64]| -> Complex64 {
        let mut z: Point = Vec::with_capacity(n);
        let mut jac = 1.0;
        for k in 0..m {
            let (rho, phi) = (v[2 * k], v[2 * k + 1]);
            z.push(Complex64::from_polar(rho, phi));
            let sp = phi.sin();
            jac /= rho * sp * sp;
        }
        for k in m..n {
            let (y, x) = (v[2 * k], v[2 * k + 1]);
            z.push(c(x, y));
            jac /= y * y;
        }
        let gz = element.act(&z);
        let args: Vec<f64> = z.iter().zip(&gz).map(|(a, b)| pair_argument(*a, *b)).collect();
        let kv = psi.eval(&args);
        if kv == 0.0 {
            return ZERO;
        }
        u(&z) * (kv * jac)
    };
    let breaks = |level: usize, prefix: &[f64]| {
        let k = level / 2;
        if k < m {
            if level.is_multiple_of(2) {
                vec![1.0, periods[k]]
            } else {
                vec![phi_lo[k], 0.5 * PI, PI - phi_lo[k]]
            }
        } else {
            let y = if level % 2 == 1 { prefix[level - 1] } else { 0.0 };
            disk_breaks(radii[k - m], level.is_multiple_of(2), y)
        }
    };
    let est = quad::parallel_iterated(&integrand, &breaks, 2 * n, tol.with_budget(1024), tol);
    quad_check(est, "mixed brute-force integral")
}

fn check_e_vector(e_m: &[f64], n: usize) -> Result<()> {
    if e_m.len() != n {
        return Err(Error::Domain("E_m has the wrong dimension".into()));
    }
    if e_m.iter().any(|x| *x == 0.0 || !x.is_finite()) {
        return Err(Error::Domain("E_m has a zero coordinate".into()));
    }
    Ok(())
}

fn theta_factor_impl(psi: &TestFunction, e_m: &[f64], mu: &[Complex64], folded: bool, tol: Tolerance) -> Result<Complex64> {
    let n = psi.dim();
    check_e_vector(e_m, n)?;
    if mu.len() != n {
        return Err(Error::Domain("eigenvalues have the wrong dimension".into()));
    }
    if psi.is_zero() {
        return Ok(ZERO);
    }
    let mut v = c(psi.amplitude, 0.0);
    for k in 0..n {
        let (a, _) = angular_axis(psi, k, e_m[k] * e_m[k], mu[k], folded, tol)?;
        v *= a;
    }
    Ok(v)
}

/// `∫ ψ(E_m²/cos²θ) ∏ f_{μ_k}(θ_k) dθ_k/cos²θ_k` over `(−π/2, π/2)ⁿ`, folded onto `[0, π/2)ⁿ`.
pub fn hyp_par_theta_factor(psi: &TestFunction, e_m: &[f64], mu: &[Complex64], tol: Tolerance) -> Result<Complex64> {
    theta_factor_impl(psi, e_m, mu, true, tol)
}

/// [`hyp_par_theta_factor`] integrated over the full symmetric range.
pub fn hyp_par_theta_factor_unfolded(psi: &TestFunction, e_m: &[f64], mu: &[Complex64], tol: Tolerance) -> Result<Complex64> {
    theta_factor_impl(psi, e_m, mu, false, tol)
}

/// A multiplier `u_m = ∏ ε_j^{m_j}` with `g(log u_m) ≠ 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContributingUnit {
    pub m: Vec<i64>,
    pub unit: Vec<f64>,
    /// `E_m = u_m^{1/2} − u_m^{−1/2}` coordinate-wise.
    pub e_vector: Vec<f64>,
    pub g_value: f64,
}

/// All nonzero `m` for which `g(log u_m)` does not vanish, in lexicographic order.
///
/// `|m_j|` is bounded by `Σ_k |e_j^{(k)}| U_k` with `U_k` the support radius of `g_k`.
pub fn contributing_units(group: &MultiplierGroup, transforms: &TransformTriple) -> Result<Vec<ContributingUnit>> {
    let n = group.degree();
    let r = group.rank();
    if transforms.dim() != n {
        return Err(Error::Domain("transforms and multipliers have different dimensions".into()));
    }
    let bounds: Vec<i64> = (0..r)
        .map(|j| (0..n).map(|k| group.e_coeff(j, k).abs() * transforms.g_radius(k)).sum::<f64>().floor() as i64)
        .collect();
    let mut out = Vec::new();
    let mut m = bounds.iter().map(|b| -b).collect::<Vec<i64>>();
    if r == 0 {
        return Ok(out);
    }
    loop {
        if m.iter().any(|x| *x != 0) {
            let unit = group.apply_powers(&vec![1.0; n], &m);
            let logs: Vec<f64> = unit.iter().map(|x| x.ln()).collect();
            let g = transforms.g(&logs)?;
            if g != 0.0 {
                let e_vector = unit.iter().map(|x| x.sqrt() - 1.0 / x.sqrt()).collect();
                out.push(ContributingUnit { m: m.clone(), unit, e_vector, g_value: g });
            }
        }
        let mut j = r;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            m[j] += 1;
            if m[j] <= bounds[j] {
                break;
            }
            m[j] = -bounds[j];
        }
    }
}

/// `M(A) = δ_{m_u} (|det ℰ|/n) Σ_κ (η_κ A^s/s + φ_κ A^{1−s}/(1−s)) Σ_{m≠0} g(log u_m)`.
pub fn hyp_par_main_term(a_cut: f64, transforms: &TransformTriple, form: &AutomorphicFormData) -> Result<TermResult> {
    if !(a_cut > 0.0) {
        return Err(Error::Domain("the truncation height A must be positive".into()));
    }
    let zero_powers = TermResult { a_dependence: ADependence::Powers { a_s: ZERO, a_one_minus_s: ZERO }, ..TermResult::zero() };
    if !form.character_is_trivial() || form.is_cusp_form() {
        return Ok(zero_powers);
    }
    let s = form.s;
    let mut a_s = ZERO;
    let mut a_1ms = ZERO;
    let mut components = Vec::new();
    for cusp in &form.cusps {
        let group = &cusp.frame.multipliers;
        let units = contributing_units(group, transforms)?;
        let g_sum: f64 = units.iter().map(|u| u.g_value).sum();
        for u in &units {
            components.push(comp(format!("{}:g(log u_{:?})", cusp.label, u.m), c(u.g_value, 0.0)));
        }
        let weight = group.det_e.abs() / group.degree() as f64 * g_sum;
        a_s += cusp.eta / s * weight;
        a_1ms += cusp.phi / (1.0 - s) * weight;
    }
    let value = a_s * c(a_cut, 0.0).powc(s) + a_1ms * c(a_cut, 0.0).powc(1.0 - s);
    Ok(TermResult {
        value,
        a_dependence: ADependence::Powers { a_s, a_one_minus_s: a_1ms },
        error_estimate: 1e-10 * value.norm(),
        components,
    })
}

const C_TERM_BUDGET: usize = 200;

/// `C = ½ · theta_factor · ∫_{log r ∈ P} ũ(r i) ∏ dr_k/r_k`, refined once to confirm convergence.
pub fn hyp_par_c_term(
    theta_factor: Complex64,
    regularized_form: &(dyn Fn(&[f64]) -> Complex64 + Sync),
    cell: &Parallelotope,
    tol: Tolerance,
) -> Result<TermResult> {
    let vol = cell.volume();
    let n = cell.dim();
    let integrand = |t: &[f64]| -> Complex64 {
        let r: Vec<f64> = cell.point(t).iter().map(|x| x.exp()).collect();
        regularized_form(&r) * vol
    };
    let breaks = |_: usize, _: &[f64]| vec![0.0, 0.25, 0.5, 0.75, 1.0];
    let tol = tol.with_budget(C_TERM_BUDGET);
    let coarse = quad::iterated(&integrand, &breaks, n, tol);
    if !coarse.converged {
        return Err(Error::NonIntegrable(format!("regularized form integral did not settle (error {:.3e})", coarse.error)));
    }
    let fine_tol = Tolerance { abs: tol.abs * 1e-2, rel: tol.rel * 1e-2, ..tol };
    let fine = quad::iterated(&integrand, &breaks, n, fine_tol);
    let v = fine.value;
    let drift = (fine.value - coarse.value).norm();
    if !v.re.is_finite() || !v.im.is_finite() || !fine.converged || drift > 1e-6 * v.norm().max(1e-300) + 1e-300 {
        return Err(Error::NonIntegrable(format!(
            "regularized form integral changes by {drift:.3e} under refinement"
        )));
    }
    let value = 0.5 * theta_factor * v;
    Ok(TermResult::constant(
        value,
        0.5 * theta_factor.norm() * (fine.error + drift),
        vec![comp("theta_factor", theta_factor), comp("cell_integral", v)],
    ))
}

fn check_open_strip(s_k: &[Complex64]) -> Result<()> {
    if let Some(s) = s_k.iter().find(|s| !(s.re > 0.0 && s.re < 1.0)) {
        return Err(Error::Domain(format!("exponent {s} must satisfy 0 < Re s_k < 1")));
    }
    Ok(())
}

/// `∫_0^∞ ψ_k(t²) t^a dt`, with `t = τ^p`, `p = 1/(1 + Re a)` removing the power at 0.
fn f_axis(psi: &TestFunction, k: usize, a: Complex64, tol: Tolerance) -> Result<Complex64> {
    let (lo, hi) = psi.support(k);
    let p = 1.0 / (1.0 + a.re);
    let tau_of = |t2: f64| t2.sqrt().powf(1.0 / p);
    let b = a * p + (p - 1.0);
    let mut f = |tau: f64| -> Complex64 {
        if tau <= 0.0 {
            return ZERO;
        }
        let t = tau.powf(p);
        let v = psi.factor(k, t * t);
        if v == 0.0 {
            return ZERO;
        }
        (b * tau.ln()).exp() * (p * v)
    };
    let breaks = breakpoints(tau_of(lo), tau_of(hi), &[tau_of(psi.centers[k])]);
    let est = quad::adaptive_from(&mut f, &breaks, tol.with_budget(tol.max_intervals.max(4000)));
    Ok(quad_check(est, "Mellin integral of ψ")?.value)
}

/// `∫_{(0,∞)ⁿ} ψ(t_1², …, t_n²) ∏ t_k^{a_k} dt`, for `Re a_k > −1`.
pub fn f_transform(psi: &TestFunction, exponents: &[Complex64], tol: Tolerance) -> Result<Complex64> {
    if exponents.len() != psi.dim() {
        return Err(Error::Domain("exponents have the wrong dimension".into()));
    }
    if let Some(a) = exponents.iter().find(|a| !(a.re > -1.0)) {
        return Err(Error::Domain(format!("exponent {a} is not integrable at 0")));
    }
    if psi.is_zero() {
        return Ok(ZERO);
    }
    let mut v = c(psi.amplitude, 0.0);
    for (k, a) in exponents.iter().enumerate() {
        v *= f_axis(psi, k, *a, tol)?;
    }
    Ok(v)
}

/// `F(0) = ∫ ψ(t²) ∏ t_k^{−s_k} dt`.
pub fn f0_direct(psi: &TestFunction, s_k: &[Complex64], tol: Tolerance) -> Result<Complex64> {
    check_open_strip(s_k)?;
    let a: Vec<Complex64> = s_k.iter().map(|s| -s).collect();
    f_transform(psi, &a, tol)
}

/// `F̃(0) = ∫ ψ(t²) ∏ t_k^{s_k − 1} dt`.
pub fn f0tilde_direct(psi: &TestFunction, s_k: &[Complex64], tol: Tolerance) -> Result<Complex64> {
    check_open_strip(s_k)?;
    let a: Vec<Complex64> = s_k.iter().map(|s| s - 1.0).collect();
    f_transform(psi, &a, tol)
}

/// `prefactor_k · ∫_ℝ h(r) ∏ ratio_k(r_k) r_k dr_k`, folded onto `r ≥ 0` and summed
/// by the trapezoid rule on the grid nodes.
fn gamma_formula<R>(grid: &HGrid, prefactors: &[Complex64], ratio: R) -> Result<Complex64>
where
    R: Fn(usize, Complex64) -> Result<Complex64>,
{
    let n = grid.dim();
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let dr = grid.spacing[k];
        let mut w = Vec::with_capacity(grid.counts[k]);
        for j in 0..grid.counts[k] {
            let r = grid.node(k, j);
            if j == 0 {
                w.push(ZERO);
                continue;
            }
            let odd = ratio(k, c(0.0, r))? - ratio(k, c(0.0, -r))?;
            w.push(prefactors[k] * odd * (r * dr));
        }
        weights.push(w);
    }
    Ok(grid.weighted_sum(&weights))
}

/// `F(0)` from `h`: `∏_k (i Γ((1−s_k)/2)² / (2^{2+s_k} π²)) ∫ h(r) ∏ Γ(s_k/2 + i r_k)/Γ(1 − s_k/2 + i r_k) r_k dr`.
pub fn f0_gamma_formula(grid: &HGrid, s_k: &[Complex64]) -> Result<Complex64> {
    check_open_strip(s_k)?;
    if s_k.len() != grid.dim() {
        return Err(Error::Domain("exponents have the wrong dimension".into()));
    }
    if grid.amplitude == 0.0 {
        return Ok(ZERO);
    }
    let pre: Vec<Complex64> = s_k
        .iter()
        .map(|s| {
            let g = complex_gamma((1.0 - s) / 2.0)?;
            Ok(c(0.0, 1.0) * g * g / (c(2.0, 0.0).powc(2.0 + s) * PI * PI))
        })
        .collect::<Result<_>>()?;
    gamma_formula(grid, &pre, |k, ir| gamma_ratio(s_k[k] / 2.0 + ir, 1.0 - s_k[k] / 2.0 + ir))
}

/// `F̃(0)` from `h`: `∏_k (i Γ(s_k/2)² / (2^{3−s_k} π²)) ∫ h(r) ∏ Γ((1−s_k)/2 + i r_k)/Γ((1+s_k)/2 + i r_k) r_k dr`.
pub fn f0tilde_gamma_formula(grid: &HGrid, s_k: &[Complex64]) -> Result<Complex64> {
    check_open_strip(s_k)?;
    if s_k.len() != grid.dim() {
        return Err(Error::Domain("exponents have the wrong dimension".into()));
    }
    if grid.amplitude == 0.0 {
        return Ok(ZERO);
    }
    let pre: Vec<Complex64> = s_k
        .iter()
        .map(|s| {
            let g = complex_gamma(s / 2.0)?;
            Ok(c(0.0, 1.0) * g * g / (c(2.0, 0.0).powc(3.0 - s) * PI * PI))
        })
        .collect::<Result<_>>()?;
    gamma_formula(grid, &pre, |k, ir| gamma_ratio((1.0 - s_k[k]) / 2.0 + ir, (1.0 + s_k[k]) / 2.0 + ir))
}

/// Parabolic contribution
/// `Σ_κ δ_{m_u}(|det ℰ|/n)(η_κ A^s/s + φ_κ A^{1−s}/(1−s)) g(0) + vol(ℝⁿ/𝐭_κ)(η_κ Z_κ(1−s, −m_u) F(0) + φ_κ Z_κ(s, m_u) F̃(0))`.
pub fn parabolic_term(a_cut: f64, transforms: &TransformTriple, form: &AutomorphicFormData, tol: Tolerance) -> Result<TermResult> {
    if !(a_cut > 0.0) {
        return Err(Error::Domain("the truncation height A must be positive".into()));
    }
    form.check_critical_strip()?;
    if form.is_cusp_form() || transforms.source.is_zero() {
        return Ok(TermResult { a_dependence: ADependence::Powers { a_s: ZERO, a_one_minus_s: ZERO }, ..TermResult::zero() });
    }
    let psi = &transforms.source;
    let s = form.s;
    let exps = &form.eigen_exponents;
    let g0 = transforms.g(&vec![0.0; psi.dim()])?;
    let any_eta = form.cusps.iter().any(|k| k.eta != ZERO);
    let any_phi = form.cusps.iter().any(|k| k.phi != ZERO);
    let f0 = if any_eta { f0_direct(psi, exps, tol)? } else { ZERO };
    let f0t = if any_phi { f0tilde_direct(psi, exps, tol)? } else { ZERO };
    let delta = if form.character_is_trivial() { 1.0 } else { 0.0 };
    let neg_m: Vec<i64> = form.m_u.iter().map(|m| -m).collect();
    let mut a_s = ZERO;
    let mut a_1ms = ZERO;
    let mut constant = ZERO;
    let mut err = 0.0;
    let mut components = vec![comp("g(0)", c(g0, 0.0)), comp("F(0)", f0), comp("F~(0)", f0t)];
    for cusp in &form.cusps {
        let group = &cusp.frame.multipliers;
        let weight = delta * group.det_e.abs() / group.degree() as f64 * g0;
        a_s += cusp.eta / s * weight;
        a_1ms += cusp.phi / (1.0 - s) * weight;
        let vol = cusp.frame.lattice.covolume;
        if cusp.eta != ZERO {
            let ctx = ZetaContext::new(cusp.frame.lattice.clone(), group.clone(), neg_m.clone())?;
            let z = zeta_continued(&ctx, 1.0 - s)?;
            components.push(comp(format!("{}:Z(1-s,-m_u)", cusp.label), z.value));
            constant += vol * cusp.eta * z.value * f0;
            err += vol * (cusp.eta * f0).norm() * z.error_estimate;
        }
        if cusp.phi != ZERO {
            let ctx = ZetaContext::new(cusp.frame.lattice.clone(), group.clone(), form.m_u.clone())?;
            let z = zeta_continued(&ctx, s)?;
            components.push(comp(format!("{}:Z(s,m_u)", cusp.label), z.value));
            constant += vol * cusp.phi * z.value * f0t;
            err += vol * (cusp.phi * f0t).norm() * z.error_estimate;
        }
    }
    components.push(comp("zeta_part", constant));
    let value = a_s * c(a_cut, 0.0).powc(s) + a_1ms * c(a_cut, 0.0).powc(1.0 - s) + constant;
    Ok(TermResult {
        value,
        a_dependence: ADependence::Powers { a_s, a_one_minus_s: a_1ms },
        error_estimate: err + 1e-10 * value.norm(),
        components,
    })
}

/// A totally elliptic conjugacy class.
#[derive(Clone, Debug)]
pub struct EllipticClass {
    pub label: String,
    pub angles: Vec<f64>,
    pub order: u32,
    pub fixed_point: Point,
}

/// A mixed class, hyperbolic coordinates first, with the centralizer data used for `F_γ(0)`.
#[derive(Clone, Debug)]
pub struct MixedClass {
    pub label: String,
    pub norms: Vec<f64>,
    pub angles: Vec<f64>,
    pub conjugator: GroupElementN,
    pub cell: Parallelotope,
}

/// Regularized constant-term data for the hyperbolic-parabolic `C` terms.
#[derive(Clone)]
pub struct RegularizedInput {
    pub label: String,
    pub form: RegularizedForm,
    pub cell: Parallelotope,
}

impl fmt::Debug for RegularizedInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegularizedInput").field("label", &self.label).field("cell", &self.cell).finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ClassInventory {
    pub elliptic: Vec<EllipticClass>,
    pub mixed: Vec<MixedClass>,
    pub regularized: Option<RegularizedInput>,
}

/// Fixed points of coordinate `k`, the one in the upper half-plane (or the larger) first.
fn fixed_points(g: &GroupElementN, k: usize) -> (Complex64, Complex64) {
    let (a, cc, d) = (g.a[k], g.c[k], g.d[k]);
    let disc = c((a + d) * (a + d) - 4.0, 0.0).sqrt();
    let z1 = (a - d + disc) / (2.0 * cc);
    let z2 = (a - d - disc) / (2.0 * cc);
    if z1.im > z2.im || (z1.im == z2.im && z1.re >= z2.re) {
        (z1, z2)
    } else {
        (z2, z1)
    }
}

/// Conjugator `ϱ` with `ϱ⁻¹γϱ` diagonal on hyperbolic and a rotation about `i` on elliptic coordinates.
pub fn standard_conjugator(g: &GroupElementN, kinds: &[CoordinateKind]) -> Result<GroupElementN> {
    let mut coords = Vec::with_capacity(kinds.len());
    for (k, kind) in kinds.iter().enumerate() {
        if g.c[k].abs() < 1e-14 {
            return Err(Error::Unsupported("conjugator for an upper-triangular coordinate".into()));
        }
        let (z1, z2) = fixed_points(g, k);
        match kind {
            CoordinateKind::Hyperbolic => {
                let (p, q) = if z1.re > z2.re { (z1.re, z2.re) } else { (z2.re, z1.re) };
                let sc = 1.0 / (p - q).sqrt();
                coords.push([p * sc, q * sc, sc, sc]);
            }
            CoordinateKind::Elliptic => {
                let sy = z1.im.sqrt();
                coords.push([sy, z1.re / sy, 0.0, 1.0 / sy]);
            }
            CoordinateKind::Parabolic => return Err(Error::Unsupported("parabolic coordinate in a mixed class".into())),
        }
    }
    Ok(GroupElementN::from_coordinates(&coords))
}

impl ClassInventory {
    /// Small known classes: `S` (order 2), `ST` (order 3), the mixed class of
    /// `[[1+ω, −1], [1, 0]]` with its own norm as period, and the synthetic
    /// regularized form `exp(−(Nr + 1/Nr))` on a norm window of half-width 5.
    pub fn demo(field: &FieldEmbedding) -> Result<Self> {
        let n = field.degree;
        let s = GroupElementN::s(n);
        let st = s.compose_exact(&GroupElementN::t(n), field)?;
        let mut elliptic = Vec::new();
        for (label, g, order) in [("S", &s, 2u32), ("ST", &st, 3u32)] {
            let cl = classify(g, Some(field))?;
            if cl.kind != ElementKind::TotallyElliptic {
                return Err(Error::Inconsistency(format!("{label} is not totally elliptic")));
            }
            let fixed_point = (0..n).map(|k| fixed_points(g, k).0).collect();
            elliptic.push(EllipticClass { label: label.into(), angles: cl.angles, order, fixed_point });
        }
        let one = Integral::ONE;
        let g = GroupElementN::from_exact(field, [Integral::new(1, 1), -one, one, Integral::ZERO])?;
        let cl = classify(&g, Some(field))?;
        let mut mixed = Vec::new();
        let hyperbolic_first = cl.coordinates.iter().position(|k| *k != CoordinateKind::Hyperbolic).is_none_or(|first| {
            cl.coordinates[first..].iter().all(|k| *k != CoordinateKind::Hyperbolic)
        });
        if cl.kind == ElementKind::Mixed && hyperbolic_first {
            let conjugator = standard_conjugator(&g, &cl.coordinates)?;
            let m = cl.norms.len();
            let cell = Parallelotope::new(
                vec![0.0; m],
                (0..m).map(|j| (0..m).map(|i| if i == j { cl.norms[j].ln() } else { 0.0 }).collect()).collect(),
            )?;
            mixed.push(MixedClass { label: "[[1+w,-1],[1,0]]".into(), norms: cl.norms, angles: cl.angles, conjugator, cell });
        }
        let group = MultiplierGroup::for_field(field)?;
        let regularized = Some(RegularizedInput {
            label: "exp(-(Nr+1/Nr))".into(),
            form: Arc::new(|r: &[f64]| {
                let nr: f64 = r.iter().product();
                c((-(nr + 1.0 / nr)).exp(), 0.0)
            }),
            cell: Parallelotope::norm_window(&group, 5.0)?,
        });
        Ok(ClassInventory { elliptic, mixed, regularized })
    }
}

/// The four families of terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    Elliptic,
    Mixed,
    Parabolic,
    HypPar,
}

impl TermKind {
    pub const ALL: [TermKind; 4] = [TermKind::Elliptic, TermKind::Mixed, TermKind::Parabolic, TermKind::HypPar];

    pub fn name(&self) -> &'static str {
        match self {
            TermKind::Elliptic => "elliptic",
            TermKind::Mixed => "mixed",
            TermKind::Parabolic => "parabolic",
            TermKind::HypPar => "hyp-par",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// One row of a trace report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermReport {
    pub term: String,
    pub value_re: f64,
    pub value_im: f64,
    #[serde(rename = "A_s_coeff")]
    pub a_s_coeff: ComplexPair,
    #[serde(rename = "A_1ms_coeff")]
    pub a_1ms_coeff: ComplexPair,
    pub components: Vec<Component>,
    pub error_estimate: f64,
}

impl TermReport {
    fn from_result(term: &str, r: &TermResult) -> Self {
        let (a, b) = r.a_dependence.coefficients();
        TermReport {
            term: term.into(),
            value_re: r.value.re,
            value_im: r.value.im,
            a_s_coeff: a.into(),
            a_1ms_coeff: b.into(),
            components: r.components.clone(),
            error_estimate: r.error_estimate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    pub field: String,
    #[serde(rename = "A")]
    pub a_cut: f64,
    #[serde(serialize_with = "serial::complex")]
    pub s: Complex64,
    pub m_u: Vec<i64>,
    pub terms: Vec<TermReport>,
    pub total: TermReport,
}

fn elliptic_sum(transforms: &TransformTriple, form: &AutomorphicFormData, classes: &[EllipticClass], tol: Tolerance) -> Result<TermResult> {
    let mu = form.eigen_mu();
    let mut total = TermResult::zero();
    for cl in classes {
        let u = form.eval(&cl.fixed_point);
        let r = elliptic_term(&transforms.source, &cl.angles, cl.order, u, &mu, tol)?;
        total.add(&r);
        total.components.push(comp(cl.label.clone(), r.value));
    }
    Ok(total)
}

fn mixed_sum(transforms: &TransformTriple, form: &AutomorphicFormData, classes: &[MixedClass], tol: Tolerance) -> Result<TermResult> {
    let mu = form.eigen_mu();
    let mut total = TermResult::zero();
    let u = |z: &Point| form.eval(z);
    for cl in classes {
        let f0 = f0_of_centralizer(&u, &cl.conjugator, &cl.cell, cl.norms.len(), tol)?;
        let mut r = mixed_term(&transforms.source, &cl.norms, &cl.angles, f0.value, &mu, tol)?;
        r.error_estimate += f0.error * r.value.norm() / f0.value.norm().max(1e-300);
        total.add(&r);
        total.components.push(comp(format!("{}:F0", cl.label), f0.value));
        total.components.push(comp(cl.label.clone(), r.value));
    }
    Ok(total)
}

fn hyp_par_sum(
    a_cut: f64,
    transforms: &TransformTriple,
    form: &AutomorphicFormData,
    regularized: Option<&RegularizedInput>,
    tol: Tolerance,
) -> Result<TermResult> {
    let mut total = hyp_par_main_term(a_cut, transforms, form)?;
    let main_value = total.value;
    total.components.push(comp("main_term", main_value));
    let Some(reg) = regularized else {
        return Ok(total);
    };
    let mu = form.eigen_mu();
    for cusp in &form.cusps {
        for unit in contributing_units(&cusp.frame.multipliers, transforms)? {
            let theta = hyp_par_theta_factor(&transforms.source, &unit.e_vector, &mu, tol)?;
            let classes = quotient_reps_mod_units(&cusp.frame.lattice, &unit.unit, &cusp.frame.multipliers)?;
            for (alpha, _) in classes.iter().enumerate() {
                let r = hyp_par_c_term(theta, &*reg.form, &reg.cell, tol)?;
                total.add(&r);
                total.components.push(comp(format!("{}:C(m={:?},alpha={alpha})", cusp.label, unit.m), r.value));
            }
        }
    }
    Ok(total)
}

/// `Tr_u^A K = Σ_ell + Σ_mix + Σ_par + Σ_hyp-par` restricted to `selection`.
pub fn assemble_geometric_trace(
    a_cut: f64,
    field: &FieldEmbedding,
    transforms: &TransformTriple,
    form: &AutomorphicFormData,
    inventory: &ClassInventory,
    selection: &[TermKind],
    tol: Tolerance,
) -> Result<TraceReport> {
    if !(a_cut > 0.0) {
        return Err(Error::Domain("the truncation height A must be positive".into()));
    }
    form.check_critical_strip()?;
    if transforms.dim() != field.degree || form.dim() != field.degree {
        return Err(Error::Domain("field, test function and form dimensions differ".into()));
    }
    let results: Vec<(TermKind, TermResult)> = selection
        .par_iter()
        .map(|kind| {
            let r = match kind {
                TermKind::Elliptic => elliptic_sum(transforms, form, &inventory.elliptic, tol),
                TermKind::Mixed => mixed_sum(transforms, form, &inventory.mixed, tol),
                TermKind::Parabolic => parabolic_term(a_cut, transforms, form, tol),
                TermKind::HypPar => hyp_par_sum(a_cut, transforms, form, inventory.regularized.as_ref(), tol),
            }?;
            Ok((*kind, r))
        })
        .collect::<Result<_>>()?;
    let mut total = TermResult { a_dependence: ADependence::Powers { a_s: ZERO, a_one_minus_s: ZERO }, ..TermResult::zero() };
    for (kind, r) in &results {
        total.add(r);
        total.components.push(comp(kind.name(), r.value));
    }
    Ok(TraceReport {
        field: field.label(),
        a_cut,
        s: form.s,
        m_u: form.m_u.clone(),
        terms: results.iter().map(|(k, r)| TermReport::from_result(k.name(), r)).collect(),
        total: TermReport::from_result("total", &total),
    })
}
