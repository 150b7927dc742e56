//! Lattice zeta functions twisted by Grössencharacters: theta sums, direct
//! Dirichlet summation, analytic continuation through incomplete theta
//! integrals, the completed function and its functional equation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::FieldEmbedding;
use crate::lattice::{EmbeddedLattice, MultiplierGroup};
use crate::quad::{self, Tolerance};
use crate::specfun::ln_gamma;

/// Largest character index accepted per coordinate.
pub const MAX_CHARACTER_INDEX: i64 = 8;

/// Visits every nonzero `v ∈ ℤⁿ` with `vᵀ G v ≤ bound`, passing the form value.
pub fn for_each_short_vector<F: FnMut(&[i64], f64)>(gram: &DMatrix<f64>, bound: f64, mut f: F) -> Result<()> {
    let n = gram.nrows();
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Domain("quadratic form is not positive definite".into()))?;
    let r = chol.l().transpose();
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)]).collect();
    let mu: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| r[(i, j)] / r[(i, i)]).collect()).collect();
    let mut v = vec![0i64; n];
    fn rec<F: FnMut(&[i64], f64)>(
        i: usize,
        rem: f64,
        acc: f64,
        diag: &[f64],
        mu: &[Vec<f64>],
        v: &mut Vec<i64>,
        f: &mut F,
    ) {
        let n = v.len();
        let center: f64 = -((i + 1)..n).map(|j| mu[i][j] * v[j] as f64).sum::<f64>();
        let radius = rem.max(0.0).sqrt() / diag[i].abs();
        let lo = (center - radius).ceil() as i64;
        let hi = (center + radius).floor() as i64;
        for vi in lo..=hi {
            let d = vi as f64 - center;
            let term = diag[i] * diag[i] * d * d;
            if term > rem {
                continue;
            }
            v[i] = vi;
            if i == 0 {
                if v.iter().any(|x| *x != 0) {
                    f(v, acc + term);
                }
            } else {
                rec(i - 1, rem - term, acc + term, diag, mu, v, f);
            }
        }
        v[i] = 0;
    }
    rec(n - 1, bound, 0.0, &diag, &mu, &mut v, &mut f);
    Ok(())
}

fn weighted_gram(l: &EmbeddedLattice, x: &[f64]) -> DMatrix<f64> {
    let n = l.dim();
    let mut d = l.basis.clone();
    for k in 0..n {
        for j in 0..n {
            d[(k, j)] *= x[k];
        }
    }
    let g = l.basis.transpose() * d;
    (&g + g.transpose()) * 0.5
}

// Terms with π·Re(z)·Q beyond this are below e^{-50} ≈ 2e-22.
const THETA_EXPONENT_CUTOFF: f64 = 50.0;

/// `Θ_L(x) = Σ_{l∈L} exp(−π Σ_k x_k l_k²)`.
pub fn theta(l: &EmbeddedLattice, x: &[f64]) -> Result<f64> {
    Ok(1.0 + theta_tail(l, x, Complex64::new(1.0, 0.0))?.re)
}

/// `Θ_L(z·x) − 1` for a scalar `z` with `Re z > 0`, without the cancellation of
/// subtracting the zero vector.
pub fn theta_tail(l: &EmbeddedLattice, x: &[f64], z: Complex64) -> Result<Complex64> {
    Ok(theta_tail_with_modulus(l, x, z)?.0)
}

/// `Θ_L(z·x) − 1` together with the sum of the moduli of its terms.
pub fn theta_tail_with_modulus(l: &EmbeddedLattice, x: &[f64], z: Complex64) -> Result<(Complex64, f64)> {
    if x.len() != l.dim() || x.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::Domain("theta needs positive finite arguments".into()));
    }
    if !(z.re > 0.0) {
        return Err(Error::Domain("theta needs a rotation with positive real part".into()));
    }
    let gram = weighted_gram(l, x);
    let bound = THETA_EXPONENT_CUTOFF / (PI * z.re);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut modulus = 0.0;
    let pz = -PI * z;
    for_each_short_vector(&gram, bound, |_, q| {
        let t = (pz * q).exp();
        acc += t;
        modulus += (pz.re * q).exp();
    })?;
    Ok((acc, modulus))
}

/// Relative residual of `Θ_L(x) = Θ_{L*}(1/x) / (vol(ℝⁿ/L) √(Nx))`.
pub fn poisson_residual(l: &EmbeddedLattice, x: &[f64]) -> Result<f64> {
    let lhs = theta(l, x)?;
    let inv: Vec<f64> = x.iter().map(|v| 1.0 / v).collect();
    let nx: f64 = x.iter().product();
    let rhs = theta(&l.dual(), &inv)? / (l.covolume * nx.sqrt());
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()))
}

/// A lattice, its multiplier group and a character index.
#[derive(Clone, Debug)]
pub struct ZetaContext {
    pub lattice: EmbeddedLattice,
    pub multipliers: MultiplierGroup,
    pub m: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaValue {
    #[serde(serialize_with = "crate::serial::complex")]
    pub s: Complex64,
    pub m: Vec<i64>,
    #[serde(serialize_with = "crate::serial::complex")]
    pub value: Complex64,
    pub method: String,
    pub error_estimate: f64,
}

impl ZetaContext {
    pub fn new(lattice: EmbeddedLattice, multipliers: MultiplierGroup, m: Vec<i64>) -> Result<Self> {
        let n = lattice.dim();
        if multipliers.degree() != n {
            return Err(Error::Domain("multiplier group and lattice have different dimensions".into()));
        }
        if m.len() != multipliers.rank() {
            return Err(Error::Domain(format!("character index needs {} entries", multipliers.rank())));
        }
        if m.iter().any(|v| v.abs() > MAX_CHARACTER_INDEX) {
            return Err(Error::Unsupported(format!("character indices beyond ±{MAX_CHARACTER_INDEX}")));
        }
        if !lattice.is_zeta_eligible() {
            return Err(Error::Domain("lattice has nonzero vectors with a vanishing coordinate".into()));
        }
        for g in &multipliers.generators {
            for j in 0..n {
                let col: Vec<f64> = (0..n).map(|k| lattice.basis[(k, j)] * g[k]).collect();
                let c = lattice.coordinates(&col);
                if c.iter().any(|x| (x - x.round()).abs() > 1e-8) {
                    return Err(Error::Inconsistency("lattice is not invariant under the multipliers".into()));
                }
            }
        }
        Ok(ZetaContext { lattice, multipliers, m })
    }

    /// Ring of integers with the squares of units and character index `m`.
    pub fn for_field(field: &FieldEmbedding, m: Vec<i64>) -> Result<Self> {
        ZetaContext::new(EmbeddedLattice::ring_of_integers(field), MultiplierGroup::for_field(field)?, m)
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Same multipliers on the dual lattice, with the opposite character.
    pub fn dual(&self) -> ZetaContext {
        ZetaContext {
            lattice: self.lattice.dual(),
            multipliers: self.multipliers.clone(),
            m: self.m.iter().map(|v| -v).collect(),
        }
    }

    pub fn with_character(&self, m: Vec<i64>) -> ZetaContext {
        ZetaContext { m, ..self.clone() }
    }

    /// True when a unit `u` with `|u|² ∈ M` maps `L` to itself while `λ_m(|u|) = −1`:
    /// then the orbits `l` and `u·l` cancel and `Z(s, m)` vanishes identically.
    pub fn vanishes_identically(&self) -> bool {
        let n = self.dim();
        for (j, g) in self.multipliers.generators.iter().enumerate() {
            if self.m[j] % 2 == 0 {
                continue;
            }
            let root: Vec<f64> = g.iter().map(|x| x.sqrt()).collect();
            for signs in 0..(1u32 << n) {
                let u: Vec<f64> = root
                    .iter()
                    .enumerate()
                    .map(|(k, r)| if signs >> k & 1 == 1 { -r } else { *r })
                    .collect();
                if self.lattice.multiplication_matrix(&u).is_ok() {
                    let phase = self.multipliers.lambda_character(&self.m, &root).unwrap_or(Complex64::new(1.0, 0.0));
                    if (phase + 1.0).norm() < 1e-9 {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn is_trivial_character(&self) -> bool {
        self.m.iter().all(|v| *v == 0)
    }

    fn check_pole(&self, s: Complex64) -> Result<()> {
        if self.is_trivial_character() && (s.norm() < 1e-6 || (s - 1.0).norm() < 1e-6) {
            return Err(Error::Pole(format!("zeta has a pole at s = {s} for the trivial character")));
        }
        Ok(())
    }
}

/// Residue at `s = 1` of the untwisted zeta function: `2ⁿ|det ℰ|/(n·vol(ℝⁿ/L))`.
pub fn residue_at_one(ctx: &ZetaContext) -> Result<f64> {
    if !ctx.is_trivial_character() {
        return Err(Error::Domain("only the trivial character has a pole at 1".into()));
    }
    let n = ctx.dim() as f64;
    Ok(2f64.powi(ctx.dim() as i32) * ctx.multipliers.det_e.abs() / (n * ctx.lattice.covolume))
}

/// Default enumeration bound on `|N l|` for the direct sum at real part `sigma`.
pub fn default_direct_bound(sigma: f64) -> f64 {
    let b = 1e-8f64.powf(-1.0 / (sigma - 0.5));
    b.clamp(2e4, 1.5e7)
}

pub fn zeta_direct(ctx: &ZetaContext, s: Complex64) -> Result<ZetaValue> {
    zeta_direct_bounded(ctx, s, default_direct_bound(s.re))
}

/// `Σ_{l ∈ (L∖0)/M, |Nl| ≤ B} λ_{−m}(|l|)/|Nl|^s`, plus the mean tail `res·B^{1−s}/(s−1)`
/// for the trivial character. The error estimate compares with the same sum cut at `B/4`.
pub fn zeta_direct_bounded(ctx: &ZetaContext, s: Complex64, bound: f64) -> Result<ZetaValue> {
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("direct summation needs Re s > 1, got {s}")));
    }
    if ctx.dim() != 2 {
        return Err(Error::Unsupported("direct summation is implemented for degree 2".into()));
    }
    let mg = &ctx.multipliers;
    let exps = mg.exponents_from(s, &ctx.m);
    let eps = &mg.generators[0];
    let e0 = [mg.e_coeff(0, 0), mg.e_coeff(0, 1)];
    let root = bound.sqrt();
    let b = [root * eps[0].max(1.0), root * eps[1].max(1.0)];
    let a = &ctx.lattice.basis;
    let inv = a.clone().try_inverse().expect("lattice basis invertible");
    let v2_max = (inv[(1, 0)].abs() * b[0] + inv[(1, 1)].abs() * b[1]).floor() as i64;
    let quarter = bound / 4.0;
    let rows: Vec<(Complex64, Complex64)> = (-v2_max..=v2_max)
        .into_par_iter()
        .map(|v2| {
            let v2f = v2 as f64;
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for k in 0..2 {
                let c1 = a[(k, 0)];
                let c0 = a[(k, 1)] * v2f;
                if c1 == 0.0 {
                    if c0.abs() > b[k] {
                        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                    }
                    continue;
                }
                let (p, q) = ((-b[k] - c0) / c1, (b[k] - c0) / c1);
                lo = lo.max(p.min(q));
                hi = hi.min(p.max(q));
            }
            let mut full = Complex64::new(0.0, 0.0);
            let mut part = Complex64::new(0.0, 0.0);
            if lo > hi {
                return (full, part);
            }
            for v1 in (lo.ceil() as i64)..=(hi.floor() as i64) {
                let v1f = v1 as f64;
                let l0 = (a[(0, 0)] * v1f + a[(0, 1)] * v2f).abs();
                let l1 = (a[(1, 0)] * v1f + a[(1, 1)] * v2f).abs();
                let norm = l0 * l1;
                if norm == 0.0 || norm > bound {
                    continue;
                }
                let (g0, g1) = (l0.ln(), l1.ln());
                let t = e0[0] * g0 + e0[1] * g1;
                let r = t.round();
                let snapped = if (t - r).abs() < 1e-9 { r } else { t };
                if snapped.floor() != 0.0 {
                    continue;
                }
                let term = (-(exps[0] * g0 + exps[1] * g1)).exp();
                full += term;
                if norm <= quarter {
                    part += term;
                }
            }
            (full, part)
        })
        .collect();
    let mut full = Complex64::new(0.0, 0.0);
    let mut part = Complex64::new(0.0, 0.0);
    for (f, p) in rows {
        full += f;
        part += p;
    }
    if ctx.is_trivial_character() {
        let res = residue_at_one(ctx)?;
        full += res * Complex64::new(bound, 0.0).powc(1.0 - s) / (s - 1.0);
        part += res * Complex64::new(quarter, 0.0).powc(1.0 - s) / (s - 1.0);
    }
    Ok(ZetaValue {
        s,
        m: ctx.m.clone(),
        value: full,
        method: "direct".into(),
        error_estimate: (full - part).norm(),
    })
}

/// Contour rotation used for `Im s = t`: zero for small `|t|`, approaching `±π/2` so
/// that the completed function is not the small difference of large terms.
pub fn rotation_angle(t: f64, n: usize) -> f64 {
    let gap = 4.0 / (n as f64 * t.abs().max(1e-300));
    if gap >= PI / 2.0 {
        0.0
    } else {
        t.signum() * (PI / 2.0 - gap)
    }
}

struct IncompleteIntegral {
    value: Complex64,
    error: f64,
}

/// `∫_{Nx>1, mod M²} (Θ_L(z x) − 1) ∏ x_k^{a_k} dx/x` with `a_k = exps[k]/2`.
fn incomplete_theta_integral(
    l: &EmbeddedLattice,
    mg: &MultiplierGroup,
    exps: &[Complex64],
    z: Complex64,
) -> Result<IncompleteIntegral> {
    let n = l.dim();
    let rank = mg.rank();
    let logs: Vec<Vec<f64>> = mg.generators.iter().map(|g| g.iter().map(|x| 2.0 * x.ln()).collect()).collect();
    let jac = 2f64.powi(rank as i32) * mg.det_e.abs();
    let half: Vec<Complex64> = exps.iter().map(|s| s * 0.5).collect();
    let failure = std::cell::RefCell::new(None::<Error>);
    // Phases of size ~50·tan δ limit the attainable relative accuracy.
    let settle = 2e-16 * (20.0 + 50.0 * (z.im / z.re).abs());

    let integrand_at = |y0: f64, y: &[f64]| -> (Complex64, f64, f64) {
        let mut lx = vec![y0; n];
        for (j, yj) in y.iter().enumerate() {
            for k in 0..n {
                lx[k] += yj * logs[j][k];
            }
        }
        let x: Vec<f64> = lx.iter().map(|v| v.exp()).collect();
        let (th, th_mod) = match theta_tail_with_modulus(l, &x, z) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                return (Complex64::new(0.0, 0.0), 0.0, 0.0);
            }
        };
        let w: Complex64 = half.iter().zip(&lx).map(|(a, v)| a * v).sum::<Complex64>().exp();
        (th * w, th_mod * w.norm(), w.norm())
    };

    // Cell average, mean of the summed term moduli, and the largest weight modulus
    // (the theta truncation contributes jumps of relative size e^{-50} to it).
    let trapezoid = |y0: f64, k: usize| -> (Complex64, f64, f64) {
        let total = k.pow(rank as u32);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        let mut wmax = 0.0f64;
        let mut y = vec![0.0; rank];
        for idx in 0..total {
            let mut r = idx;
            for yj in y.iter_mut() {
                *yj = (r % k) as f64 / k as f64;
                r /= k;
            }
            let (v, m, w) = integrand_at(y0, &y);
            acc += v;
            mag += m;
            wmax = wmax.max(w);
        }
        (acc / total as f64, mag / total as f64, wmax)
    };

    // Cell average with the mean modulus and weight bound of the accepted rule.
    let cell_stats = |y0: f64| -> (Complex64, f64, f64) {
        let mut k = 16usize;
        let (mut prev, _, _) = trapezoid(y0, k);
        loop {
            k *= 2;
            let (cur, mag, wmax) = trapezoid(y0, k);
            let diff = (cur - prev).norm();
            if diff <= settle * mag + 1e-17 * wmax || mag == 0.0 {
                return (cur, mag, wmax);
            }
            if k >= 8192 {
                failure.borrow_mut().get_or_insert(Error::Accuracy(format!(
                    "periodic cell average did not settle at y0 = {y0}"
                )));
                return (cur, mag, wmax);
            }
            prev = cur;
        }
    };

    // Upper limit: the integrand modulus has decayed by 1e-22 relative to its start.
    let (_, start, w0) = cell_stats(0.0);
    let mut scale = start;
    let mut noise = w0;
    let mut y_max = 0.5;
    loop {
        let (_, mag, wmax) = cell_stats(y_max);
        if mag <= 1e-22 * start || y_max > 60.0 {
            break;
        }
        scale = scale.max(mag);
        noise = noise.max(wmax);
        y_max += 0.5;
    }
    let mut breaks = Vec::new();
    let mut b = 0.0;
    while b < y_max {
        breaks.push(b);
        b += 0.25;
    }
    breaks.push(y_max);
    let mut f = |y0: f64| cell_stats(y0).0;
    let abs_tol = (1e-15 * scale + 1e-17 * noise) * y_max;
    let est = quad::adaptive_from(&mut f, &breaks, Tolerance::new(abs_tol, 1e-13).with_budget(20_000));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if !est.converged {
        return Err(Error::Quadrature { what: "incomplete theta integral".into(), estimate: est.error });
    }
    Ok(IncompleteIntegral { value: est.value * jac, error: est.error * jac })
}

/// Completed function `Ξ(s,m) = π^{−ns/2} ∏Γ(s_k/2) Z(s,m)` with an explicit
/// contour rotation angle.
pub fn completed_xi_rotated(ctx: &ZetaContext, s: Complex64, delta: f64) -> Result<ZetaValue> {
    ctx.check_pole(s)?;
    if !(delta.abs() < PI / 2.0) {
        return Err(Error::Domain("rotation angle must lie in (−π/2, π/2)".into()));
    }
    if ctx.vanishes_identically() {
        return Ok(ZetaValue { s, m: ctx.m.clone(), value: Complex64::new(0.0, 0.0), method: "xi".into(), error_estimate: 0.0 });
    }
    let n = ctx.dim();
    let nf = n as f64;
    let z = Complex64::from_polar(1.0, delta);
    let mg = &ctx.multipliers;
    let exps = mg.exponents_from(s, &ctx.m);
    let dual_exps: Vec<Complex64> = mg
        .exponents_from(1.0 - s, &ctx.m.iter().map(|v| -v).collect::<Vec<_>>())
        .into_iter()
        .collect();
    let dual = ctx.lattice.dual();
    let vol = ctx.lattice.covolume;
    let j1 = incomplete_theta_integral(&ctx.lattice, mg, &exps, z)?;
    let j2 = incomplete_theta_integral(&dual, mg, &dual_exps, z.conj())?;
    let z_half_n = Complex64::from_polar(1.0, -nf * delta / 2.0);
    let mut bracket = j1.value + j2.value * z_half_n / vol;
    if ctx.is_trivial_character() {
        let c = 2f64.powi(n as i32) * mg.det_e.abs() / nf;
        bracket += z_half_n * c / (vol * (s - 1.0)) - c / s;
    }
    let rot = (Complex64::new(0.0, delta) * nf * s / 2.0).exp();
    Ok(ZetaValue {
        s,
        m: ctx.m.clone(),
        value: rot * bracket,
        method: "xi".into(),
        error_estimate: rot.norm() * (j1.error + j2.error / vol),
    })
}

pub fn completed_xi(ctx: &ZetaContext, s: Complex64) -> Result<ZetaValue> {
    completed_xi_rotated(ctx, s, rotation_angle(s.im, ctx.dim()))
}

/// `log(π^{ns/2} / ∏Γ(s_k/2))`, or `None` where some `Γ(s_k/2)` has a pole.
fn gamma_factor_log(ctx: &ZetaContext, s: Complex64) -> Option<Complex64> {
    let nf = ctx.dim() as f64;
    let mut acc = nf * s / 2.0 * PI.ln();
    for sk in ctx.multipliers.exponents_from(s, &ctx.m) {
        acc -= ln_gamma(sk / 2.0).ok()?;
    }
    Some(acc)
}

/// Analytically continued `Z_{L,M}(s,m)`.
pub fn zeta_continued(ctx: &ZetaContext, s: Complex64) -> Result<ZetaValue> {
    let xi = completed_xi(ctx, s)?;
    let (value, err) = match gamma_factor_log(ctx, s) {
        Some(lg) => {
            let f = lg.exp();
            (xi.value * f, xi.error_estimate * f.norm())
        }
        None => (Complex64::new(0.0, 0.0), 0.0),
    };
    Ok(ZetaValue { s, m: ctx.m.clone(), value, method: "continued".into(), error_estimate: err })
}

/// Relative residual of `vol(L)^{1/2} Ξ_L(s,m) = vol(L*)^{1/2} Ξ_{L*}(1−s,−m)`;
/// the right side is evaluated on a different rotated contour.
pub fn functional_equation_residual(ctx: &ZetaContext, s: Complex64) -> Result<f64> {
    ctx.check_pole(s)?;
    if ctx.vanishes_identically() {
        return Ok(0.0);
    }
    let n = ctx.dim();
    let dual = ctx.dual();
    let lhs = completed_xi(ctx, s)?.value * ctx.lattice.covolume.sqrt();
    let s2 = 1.0 - s;
    let delta = 0.9 * rotation_angle(s2.im, n);
    let rhs = completed_xi_rotated(&dual, s2, delta)?.value * dual.lattice.covolume.sqrt();
    Ok((lhs - rhs).norm() / (lhs.norm() + rhs.norm() + 1e-300))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityRow {
    pub sigma: f64,
    pub exponent: f64,
    pub bound: f64,
    pub within_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub m: Vec<i64>,
    pub rows: Vec<ConvexityRow>,
    /// Largest `|Z(2+it)|` over the grid and `Z(2)` itself.
    pub line_two_max: f64,
    pub line_two_at_zero: f64,
    pub monotone: bool,
}

fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Fits the growth exponent of `max |Z(σ+it)|` over windows of `t` (log-log
/// regression of windowed maxima) for each `σ`.
pub fn convexity_spot_check(ctx: &ZetaContext, sigmas: &[f64], t_grid: &[f64], windows: usize) -> Result<ConvexityReport> {
    if t_grid.len() < 2 * windows || windows < 2 {
        return Err(Error::Domain("t grid too small for the requested windows".into()));
    }
    let n = ctx.dim() as f64;
    let mut rows = Vec::new();
    for &sigma in sigmas {
        let vals: Vec<f64> = t_grid
            .par_iter()
            .map(|&t| zeta_continued(ctx, Complex64::new(sigma, t)).map(|v| v.value.norm()))
            .collect::<Result<Vec<_>>>()?;
        let per = t_grid.len() / windows;
        let mut pts = Vec::new();
        for w in 0..windows {
            let lo = w * per;
            let hi = if w + 1 == windows { t_grid.len() } else { lo + per };
            let mx = vals[lo..hi].iter().cloned().fold(0.0, f64::max);
            let tc = (t_grid[lo] * t_grid[hi - 1]).sqrt();
            pts.push((tc.ln(), mx.max(1e-300).ln()));
        }
        let exponent = log_log_slope(&pts);
        let bound = n * (1.0 - sigma) / 2.0 + 0.3;
        rows.push(ConvexityRow { sigma, exponent, bound, within_bound: exponent <= bound });
    }
    let monotone = rows.windows(2).all(|w| w[1].exponent < w[0].exponent || w[1].sigma <= w[0].sigma);
    let z2 = zeta_continued(ctx, Complex64::new(2.0, 0.0))?.value.norm();
    let line: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| zeta_continued(ctx, Complex64::new(2.0, t)).map(|v| v.value.norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvexityReport {
        m: ctx.m.clone(),
        rows,
        line_two_max: line.into_iter().fold(0.0, f64::max),
        line_two_at_zero: z2,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_quadratic_field;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q2(m: i64) -> ZetaContext {
        ZetaContext::for_field(&make_quadratic_field(2).unwrap(), vec![m]).unwrap()
    }

    #[test]
    fn theta_product_lattice() {
        let z2 = EmbeddedLattice::new(DMatrix::identity(2, 2)).unwrap();
        let one: f64 = 1.0 + 2.0 * (1..20).map(|k| (-PI * (k * k) as f64).exp()).sum::<f64>();
        assert!((one - 1.086_434_81).abs() < 1e-8);
        let v = theta(&z2, &[1.0, 1.0]).unwrap();
        assert!((v - one * one).abs() < 1e-14);
        assert!((v - 1.180_340_6).abs() < 1e-7);
        assert!((theta(&z2, &[80.0, 90.0]).unwrap() - 1.0).abs() < 1e-100);
        assert!(theta(&z2, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn poisson_identity() {
        let k = make_quadratic_field(2).unwrap();
        let l = EmbeddedLattice::ring_of_integers(&k);
        assert!(poisson_residual(&l, &[0.7, 1.3]).unwrap() <= 1e-12);
    }

    #[test]
    fn short_vectors_match_brute_force() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.7, 0.7, 1.5]);
        let mut found = Vec::new();
        for_each_short_vector(&g, 30.0, |v, q| found.push((v.to_vec(), q))).unwrap();
        let mut brute = 0;
        for a in -20i64..=20 {
            for b in -20i64..=20 {
                let q = 2.0 * (a * a) as f64 + 1.4 * (a * b) as f64 + 1.5 * (b * b) as f64;
                if (a, b) != (0, 0) && q <= 30.0 {
                    brute += 1;
                }
            }
        }
        assert_eq!(found.len(), brute);
        for (v, q) in found {
            let e = 2.0 * (v[0] * v[0]) as f64 + 1.4 * (v[0] * v[1]) as f64 + 1.5 * (v[1] * v[1]) as f64;
            assert!((e - q).abs() < 1e-9);
        }
    }

    #[test]
    fn residues() {
        let r = residue_at_one(&q2(0)).unwrap();
        assert!((r - 2.492_900_96).abs() < 1e-8);
        assert!((r - 2f64.sqrt() * (3.0 + 2.0 * 2f64.sqrt()).ln()).abs() < 1e-12);
        let k5 = ZetaContext::for_field(&make_quadratic_field(5).unwrap(), vec![0]).unwrap();
        let r5 = residue_at_one(&k5).unwrap();
        let golden = (0.5 * (1.0 + 5f64.sqrt())).ln();
        // Four times the Dedekind residue 2·log φ/√5.
        assert!((r5 - 8.0 * golden / 5f64.sqrt()).abs() < 1e-12);
        assert!((r5 - 1.721_635_76).abs() < 1e-8, "{r5}");
        let ctx = q2(0);
        let doubled = ZetaContext::new(ctx.lattice.scaled(2.0), ctx.multipliers.clone(), vec![0]).unwrap();
        assert!((residue_at_one(&doubled).unwrap() - r / 4.0).abs() < 1e-14);
        assert!(residue_at_one(&q2(1)).is_err());
    }

    /// `4 ζ_{Q(√2)}(2) = 4 ζ(2) L(2, χ_8)` with `L(2, χ_8) = π²/(8√2)`.
    #[test]
    fn direct_matches_dedekind() {
        let v = zeta_direct(&q2(0), c(2.0, 0.0)).unwrap();
        let dedekind = 4.0 * (PI * PI / 6.0) * (PI * PI / (8.0 * 2f64.sqrt()));
        assert!(((v.value.re - dedekind) / dedekind).abs() < 1e-6, "{} {dedekind}", v.value);
        assert!((dedekind - 5.7398).abs() < 1e-4);
    }

    #[test]
    fn direct_conjugation_and_positivity() {
        let a = zeta_direct(&q2(1), c(2.5, 1.3)).unwrap().value;
        let b = zeta_direct(&q2(-1), c(2.5, -1.3)).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-10);
        let z3 = zeta_direct(&q2(0), c(3.0, 0.0)).unwrap().value;
        assert!(z3.re > 0.0 && z3.im == 0.0);
        assert!(zeta_direct(&q2(0), c(1.0, 3.0)).is_err());
    }

    #[test]
    fn continued_matches_direct_at_two() {
        let ctx = q2(0);
        let a = zeta_continued(&ctx, c(2.0, 0.0)).unwrap().value;
        let b = zeta_direct(&ctx, c(2.0, 0.0)).unwrap().value;
        assert!(((a - b) / b).norm() < 1e-8, "{a} {b}");
    }

    #[test]
    fn continued_special_values() {
        let v = zeta_continued(&q2(1), c(1.0, 0.0)).unwrap().value;
        assert!(v.norm().is_finite());
        let h = zeta_continued(&q2(0), c(0.5, 0.0)).unwrap().value;
        assert!(h.im.abs() < 1e-10, "{h}");
        assert!(matches!(zeta_continued(&q2(0), c(1.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(zeta_continued(&q2(0), c(0.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn odd_characters_vanish() {
        assert!(q2(1).vanishes_identically() && q2(-3).vanishes_identically());
        assert!(!q2(2).vanishes_identically() && !q2(0).vanishes_identically());
        let d = zeta_direct(&q2(1), c(2.0, 3.0)).unwrap();
        assert!(d.value.norm() < 1e-12);
        assert_eq!(zeta_continued(&q2(1), c(2.0, 3.0)).unwrap().value, c(0.0, 0.0));
    }

    #[test]
    fn functional_equation_examples() {
        let r = functional_equation_residual(&q2(0), c(0.3, 2.0)).unwrap();
        assert!(r <= 1e-8, "{r}");
        let r = functional_equation_residual(&q2(1), c(0.5, 0.0)).unwrap();
        assert!(r <= 1e-8, "{r}");
        let s = c(0.3, 2.0);
        let a = functional_equation_residual(&q2(0), s).unwrap();
        let b = functional_equation_residual(&q2(0), 1.0 - s.conj()).unwrap();
        assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn residue_matches_limit() {
        let ctx = q2(0);
        let eps = 1e-4;
        let v = zeta_continued(&ctx, c(1.0 + eps, 0.0)).unwrap().value * eps;
        let r = residue_at_one(&ctx).unwrap();
        assert!(((v.re - r) / r).abs() < 1e-3);
    }
}
