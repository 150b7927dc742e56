//! Complex Gamma, Bessel K of complex order, and the radial and angular
//! spherical functions.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_pole(z: Complex64) -> Result<()> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole(format!("Gamma has a pole at {}", z.re)));
    }
    Ok(())
}

fn lanczos_ln(z: Complex64) -> Complex64 {
    // Valid for Re z ≥ 1/2.
    let z = z - 1.0;
    let mut x = c(LANCZOS[0], 0.0);
    for (i, p) in LANCZOS.iter().enumerate().skip(1) {
        x += *p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 {
        let s = (z * PI).sin();
        Ok(PI / (s * lanczos_ln(1.0 - z).exp()))
    } else {
        Ok(lanczos_ln(z).exp())
    }
}

/// Principal-branch-free log Gamma: continuous along horizontal lines in the right
/// half-plane, obtained by upward recurrence elsewhere.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re >= 0.5 {
        return Ok(lanczos_ln(z));
    }
    let shift = (0.5 - z.re).ceil() as usize;
    let mut acc = c(0.0, 0.0);
    for j in 0..shift {
        acc += (z + j as f64).ln();
    }
    Ok(lanczos_ln(z + shift as f64) - acc)
}

/// `Γ(a)/Γ(b)` through log-Gammas.
pub fn gamma_ratio(a: Complex64, b: Complex64) -> Result<Complex64> {
    Ok((ln_gamma(a)? - ln_gamma(b)?).exp())
}

/// `K_ν(x) = ∫_0^∞ e^{-x cosh t} cosh(νt) dt`.
pub fn bessel_k(nu: Complex64, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("bessel_k needs x > 0, got {x}")));
    }
    let a = nu.re.abs();
    // Solve x cosh T − a T = 45 for the upper limit.
    let target = 45.0;
    let f = |t: f64| x * t.cosh() - a * t - target;
    let mut lo = if a > x { (a / x).asinh() } else { 0.0 };
    let mut hi = lo.max(1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    if f(lo) >= 0.0 {
        hi = lo.max(1e-3);
        lo = 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let upper = hi;
    let peak = if a > x { (a / x).asinh() } else { 0.0 };
    let mut breaks = vec![0.0];
    if peak > 0.0 && peak < upper {
        breaks.push(peak);
    }
    let osc = (nu.im.abs() * upper / PI).ceil() as usize;
    let pieces = osc.clamp(4, 400);
    let mut b = Vec::new();
    for w in breaks.windows(2).map(|w| (w[0], w[1])).chain(std::iter::once((*breaks.last().unwrap(), upper))) {
        for j in 0..pieces {
            b.push(w.0 + (w.1 - w.0) * j as f64 / pieces as f64);
        }
    }
    b.push(upper);
    b.dedup();
    let mut g = |t: f64| (-x * t.cosh()).exp() * (nu * t).cosh();
    let est = quad::adaptive_from(&mut g, &b, Tolerance::new(1e-300, 1e-14));
    if !est.converged && est.error > 1e-10 * est.value.norm() {
        return Err(Error::Quadrature { what: "Bessel K integral".into(), estimate: est.error });
    }
    Ok(est.value)
}

/// Which of the two spherical ODEs a solution belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphericalKind {
    /// `g″ + coth(r) g′ = μ g`, regular at 0.
    Radial,
    /// `cos²θ F″ = μ F`.
    Angular,
}

#[derive(Clone, Debug)]
struct DenseStep {
    x0: f64,
    h: f64,
    coeffs: [[Complex64; 2]; 5],
}

/// Tabulated solution with Dormand–Prince dense output.
#[derive(Clone, Debug)]
pub struct SphericalSolution {
    pub kind: SphericalKind,
    pub eigen_mu: Complex64,
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub derivatives: Vec<Complex64>,
    start: f64,
    initial: [Complex64; 2],
    steps: Vec<DenseStep>,
}

const RK_ATOL: f64 = 1e-11;
const RK_RTOL: f64 = 1e-11;
const SERIES_START: f64 = 1e-3;

fn rhs(kind: SphericalKind, mu: Complex64, x: f64, y: [Complex64; 2]) -> [Complex64; 2] {
    match kind {
        SphericalKind::Radial => [y[1], mu * y[0] - y[1] / x.tanh()],
        SphericalKind::Angular => {
            let cs = x.cos();
            [y[1], mu * y[0] / (cs * cs)]
        }
    }
}

fn radial_series(mu: Complex64, r: f64) -> [Complex64; 2] {
    let a1 = mu / 4.0;
    let a2 = mu * (mu - 2.0 / 3.0) / 64.0;
    let r2 = r * r;
    [1.0 + a1 * r2 + a2 * r2 * r2, 2.0 * a1 * r + 4.0 * a2 * r2 * r]
}

impl SphericalSolution {
    /// Radial solution on `[0, r_max]`.
    pub fn radial(mu: Complex64, r_max: f64) -> Result<Self> {
        if !(r_max >= 0.0) {
            return Err(Error::Domain("radial range must be nonnegative".into()));
        }
        let start = SERIES_START.min(r_max);
        let init = radial_series(mu, start);
        Self::integrate(SphericalKind::Radial, mu, start, init, r_max.max(start))
    }

    /// Angular solution on `[0, theta_max]` with `F(0) = f0`, `F′(0) = df0`.
    pub fn angular_with(mu: Complex64, theta_max: f64, f0: Complex64, df0: Complex64) -> Result<Self> {
        if !(0.0..PI / 2.0).contains(&theta_max) {
            return Err(Error::Domain(format!("angular range {theta_max} must lie in [0, π/2)")));
        }
        Self::integrate(SphericalKind::Angular, mu, 0.0, [f0, df0], theta_max)
    }

    /// The even angular solution, `F(0) = 1`, `F′(0) = 0`.
    pub fn angular(mu: Complex64, theta_max: f64) -> Result<Self> {
        Self::angular_with(mu, theta_max, c(1.0, 0.0), c(0.0, 0.0))
    }

    fn integrate(kind: SphericalKind, mu: Complex64, x0: f64, y0: [Complex64; 2], x_end: f64) -> Result<Self> {
        const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
        const A: [[f64; 6]; 7] = [
            [0.0; 6],
            [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
            [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
            [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
            [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
            [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
            [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        const E: [f64; 7] = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        const D: [f64; 7] = [
            -12715105075.0 / 11282082432.0,
            0.0,
            87487479700.0 / 32700410799.0,
            -10690763975.0 / 1880347072.0,
            701980252875.0 / 199316789632.0,
            -1453857185.0 / 822651844.0,
            69997945.0 / 29380423.0,
        ];

        let mut sol = SphericalSolution {
            kind,
            eigen_mu: mu,
            grid: vec![x0],
            values: vec![y0[0]],
            derivatives: vec![y0[1]],
            start: x0,
            initial: y0,
            steps: Vec::new(),
        };
        if x_end <= x0 {
            return Ok(sol);
        }
        let mut x = x0;
        let mut y = y0;
        let mut h = ((x_end - x0) / 64.0).min(0.02);
        let mut k1 = rhs(kind, mu, x, y);
        let mut guard = 0usize;
        while x < x_end {
            guard += 1;
            if guard > 2_000_000 {
                return Err(Error::Resource("spherical ODE step budget exhausted".into()));
            }
            if x + h > x_end {
                h = x_end - x;
            }
            let mut k = [[c(0.0, 0.0); 2]; 7];
            k[0] = k1;
            for i in 1..7 {
                let mut yi = y;
                for j in 0..i {
                    for v in 0..2 {
                        yi[v] += k[j][v] * (h * A[i][j]);
                    }
                }
                k[i] = rhs(kind, mu, x + C[i] * h, yi);
            }
            let mut y1 = y;
            for j in 0..6 {
                for v in 0..2 {
                    y1[v] += k[j][v] * (h * A[6][j]);
                }
            }
            let mut err = 0.0;
            for v in 0..2 {
                let mut e = c(0.0, 0.0);
                for j in 0..7 {
                    e += k[j][v] * (h * E[j]);
                }
                let sc = RK_ATOL + RK_RTOL * y[v].norm().max(y1[v].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / 2.0).sqrt();
            if err <= 1.0 {
                let mut coeffs = [[c(0.0, 0.0); 2]; 5];
                for v in 0..2 {
                    let ydiff = y1[v] - y[v];
                    let bspl = k[0][v] * h - ydiff;
                    coeffs[0][v] = y[v];
                    coeffs[1][v] = ydiff;
                    coeffs[2][v] = bspl;
                    coeffs[3][v] = ydiff - k[6][v] * h - bspl;
                    let mut d = c(0.0, 0.0);
                    for j in 0..7 {
                        d += k[j][v] * D[j];
                    }
                    coeffs[4][v] = d * h;
                }
                sol.steps.push(DenseStep { x0: x, h, coeffs });
                x = if x + h >= x_end { x_end } else { x + h };
                y = y1;
                k1 = k[6];
                sol.grid.push(x);
                sol.values.push(y[0]);
                sol.derivatives.push(y[1]);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        }
        Ok(sol)
    }

    pub fn x_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// Value and derivative at `x` (absolute value of `x` for the even solutions).
    pub fn eval_pair(&self, x: f64) -> Result<[Complex64; 2]> {
        let odd = self.kind == SphericalKind::Angular && self.initial[0] == c(0.0, 0.0);
        let (xa, flip) = if x < 0.0 { (-x, true) } else { (x, false) };
        if xa > self.x_max() * (1.0 + 1e-14) + 1e-300 {
            return Err(Error::Domain(format!("{xa} outside the tabulated range [0, {}]", self.x_max())));
        }
        let y = if xa <= self.start {
            match self.kind {
                SphericalKind::Radial => radial_series(self.eigen_mu, xa),
                SphericalKind::Angular => self.initial,
            }
        } else {
            let i = match self.steps.binary_search_by(|s| s.x0.partial_cmp(&xa).unwrap()) {
                Ok(i) => i,
                Err(i) => i.saturating_sub(1),
            }
            .min(self.steps.len() - 1);
            let s = &self.steps[i];
            let t = ((xa - s.x0) / s.h).clamp(0.0, 1.0);
            let t1 = 1.0 - t;
            let mut out = [c(0.0, 0.0); 2];
            for v in 0..2 {
                let cf = &s.coeffs;
                out[v] = cf[0][v] + (cf[1][v] + (cf[2][v] + (cf[3][v] + cf[4][v] * t1) * t) * t1) * t;
            }
            out
        };
        Ok(if flip {
            if odd {
                [-y[0], y[1]]
            } else {
                [y[0], -y[1]]
            }
        } else {
            y
        })
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        Ok(self.eval_pair(x)?[0])
    }
}

/// Regular radial spherical function `g_μ(r)`.
pub fn spherical_g(mu: Complex64, r: f64) -> Result<Complex64> {
    if !(r >= 0.0) {
        return Err(Error::Domain("r must be nonnegative".into()));
    }
    if mu == c(0.0, 0.0) {
        return Ok(c(1.0, 0.0));
    }
    SphericalSolution::radial(mu, r)?.eval(r)
}

/// Even angular spherical function `f_μ(θ)`.
pub fn angular_f(mu: Complex64, theta: f64) -> Result<Complex64> {
    if !(theta.abs() < PI / 2.0) {
        return Err(Error::Domain(format!("|θ| = {} must be below π/2", theta.abs())));
    }
    if mu == c(0.0, 0.0) {
        return Ok(c(1.0, 0.0));
    }
    SphericalSolution::angular(mu, theta.abs())?.eval(theta)
}

const TAYLOR_TERMS: usize = 60;

fn hypergeometric_start(mu: Complex64, r: f64) -> [Complex64; 2] {
    // 2F1(s, 1−s; 1; −x), x = sinh²(r/2), with (s+j)(1−s+j) = j(j+1) − μ.
    let x = (0.5 * r).sinh().powi(2);
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    let mut dsum = c(0.0, 0.0);
    for k in 1..200 {
        let j = (k - 1) as f64;
        term = term * (j * (j + 1.0) - mu) / ((k * k) as f64) * (-x);
        sum += term;
        dsum += term * k as f64;
        if term.norm() < 1e-18 * sum.norm() && k > 5 {
            break;
        }
    }
    // d/dr of (−x)^k is k (−x)^{k−1} (−sinh(r)/2), so dsum/x · sinh(r)/2 up to sign.
    let deriv = if x > 0.0 { dsum / x * (0.5 * r.sinh()) } else { c(0.0, 0.0) };
    [sum, deriv]
}

fn taylor_step(kind: SphericalKind, mu: Complex64, x0: f64, y: [Complex64; 2], h: f64) -> [Complex64; 2] {
    let n = TAYLOR_TERMS;
    let mut a = vec![c(0.0, 0.0); n + 2];
    a[0] = y[0];
    a[1] = y[1];
    let mut fact = vec![1.0f64; n + 2];
    for j in 1..n + 2 {
        fact[j] = fact[j - 1] * j as f64;
    }
    match kind {
        SphericalKind::Radial => {
            let (sh, ch) = (x0.sinh(), x0.cosh());
            let sig: Vec<f64> = (0..n + 2).map(|j| if j % 2 == 0 { sh } else { ch } / fact[j]).collect();
            let cc: Vec<f64> = (0..n + 2).map(|j| if j % 2 == 0 { ch } else { sh } / fact[j]).collect();
            for j in 0..n {
                let mut acc = c(0.0, 0.0);
                for i in 1..=j {
                    acc += a[j - i + 2] * (sig[i] * ((j - i + 2) * (j - i + 1)) as f64);
                }
                for i in 0..=j {
                    acc += a[j - i + 1] * (cc[i] * (j - i + 1) as f64);
                    acc -= mu * a[j - i] * sig[i];
                }
                a[j + 2] = -acc / (sig[0] * ((j + 2) * (j + 1)) as f64);
            }
        }
        SphericalKind::Angular => {
            let kap: Vec<f64> = (0..n + 2)
                .map(|j| {
                    if j == 0 {
                        x0.cos().powi(2)
                    } else {
                        0.5 * 2f64.powi(j as i32) / fact[j] * (2.0 * x0 + j as f64 * PI / 2.0).cos()
                    }
                })
                .collect();
            for j in 0..n {
                let mut acc = mu * a[j];
                for i in 1..=j {
                    acc -= a[j - i + 2] * (kap[i] * ((j - i + 2) * (j - i + 1)) as f64);
                }
                a[j + 2] = acc / (kap[0] * ((j + 2) * (j + 1)) as f64);
            }
        }
    }
    let mut v = c(0.0, 0.0);
    let mut d = c(0.0, 0.0);
    for j in (0..n + 2).rev() {
        v = v * h + a[j];
        if j >= 1 {
            d = d * h + a[j] * j as f64;
        }
    }
    [v, d]
}

/// Radial function by hypergeometric start and analytic (Taylor) continuation;
/// independent of the Runge–Kutta path.
pub fn spherical_g_series(mu: Complex64, r: f64) -> Result<[Complex64; 2]> {
    if !(r >= 0.0) {
        return Err(Error::Domain("r must be nonnegative".into()));
    }
    let r_start = r.min(1.0);
    let mut y = hypergeometric_start(mu, r_start);
    let mut x = r_start;
    while x < r {
        let h = (0.5 * x).min(0.5).min(r - x);
        y = taylor_step(SphericalKind::Radial, mu, x, y, h);
        x += h;
    }
    Ok(y)
}

/// Angular solution with initial data `(f0, df0)` at 0 by Taylor continuation.
pub fn angular_series(mu: Complex64, theta: f64, f0: Complex64, df0: Complex64) -> Result<[Complex64; 2]> {
    if !(theta.abs() < PI / 2.0) {
        return Err(Error::Domain("|θ| must be below π/2".into()));
    }
    let dir = theta.signum();
    let target = theta.abs();
    // Reflect: the equation is invariant under θ ↦ −θ.
    let mut y = [f0, df0 * dir];
    let mut x = 0.0;
    while x < target {
        let h = (0.45 * (PI / 2.0 - x)).min(0.4).min(target - x);
        y = taylor_step(SphericalKind::Angular, mu, x, y, h);
        x += h;
    }
    Ok([y[0], y[1] * dir])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn gamma_values() {
        assert!(close(complex_gamma(c(1.0, 0.0)).unwrap(), c(1.0, 0.0), 1e-13));
        assert!(close(complex_gamma(c(0.5, 0.0)).unwrap(), c(PI.sqrt(), 0.0), 1e-13));
        assert!(close(complex_gamma(c(6.0, 0.0)).unwrap(), c(120.0, 0.0), 1e-13));
        assert!(close(complex_gamma(c(1.0, 1.0)).unwrap(), c(0.498_015_668_118_356, -0.154_949_828_301_810_7), 1e-12));
        assert!(close(complex_gamma(c(-0.5, 0.0)).unwrap(), c(-2.0 * PI.sqrt(), 0.0), 1e-12));
        assert!(matches!(complex_gamma(c(-2.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(complex_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn gamma_duplication() {
        let z = c(0.7, 0.3);
        let lhs = complex_gamma(z).unwrap() * complex_gamma(z + 0.5).unwrap();
        let rhs = c(2.0, 0.0).powc(1.0 - 2.0 * z) * PI.sqrt() * complex_gamma(2.0 * z).unwrap();
        assert!((lhs - rhs).norm() <= 1e-11 * rhs.norm());
    }

    fn stirling_ln(z: Complex64) -> Complex64 {
        // Independent oracle for large |z|.
        let b = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0, 1.0 / 156.0];
        let mut s = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
        let mut zp = z;
        for (k, bk) in b.iter().enumerate() {
            s += *bk / zp;
            let _ = k;
            zp *= z * z;
        }
        s
    }

    #[test]
    fn gamma_against_stirling() {
        for z in [c(25.0, 3.0), c(30.0, -17.0), c(22.5, 40.0)] {
            let a = ln_gamma(z).unwrap();
            let b = stirling_ln(z);
            assert!((a - b).norm() < 1e-11 * b.norm(), "{z} {a} {b}");
        }
    }

    #[test]
    fn ln_gamma_consistent_left() {
        for z in [c(-1.3, 0.4), c(0.2, -3.0), c(-4.7, 9.0)] {
            let a = ln_gamma(z).unwrap().exp();
            let b = complex_gamma(z).unwrap();
            assert!((a - b).norm() <= 1e-12 * b.norm(), "{z}");
        }
    }

    #[test]
    fn bessel_values() {
        let k = bessel_k(c(0.5, 0.0), 1.0).unwrap();
        assert!((k.re - (PI / 2.0).sqrt() * (-1.0f64).exp()).abs() < 1e-13);
        let a = bessel_k(c(0.3, 2.0), 1.5).unwrap();
        let b = bessel_k(c(-0.3, -2.0), 1.5).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm().max(1e-3));
        assert!(bessel_k(c(1.0, 0.0), 0.0).is_err());
    }

    fn k0_series(x: f64) -> f64 {
        // K_0(x) = −(ln(x/2)+γ) I_0(x) + Σ (x²/4)^k/(k!)² H_k.
        let euler = 0.577_215_664_901_532_9;
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut i0 = 1.0;
        let mut tail = 0.0;
        let mut hk = 0.0;
        for k in 1..60 {
            term *= q / (k * k) as f64;
            hk += 1.0 / k as f64;
            i0 += term;
            tail += term * hk;
        }
        -((x / 2.0).ln() + euler) * i0 + tail
    }

    #[test]
    fn bessel_k0_series_oracle() {
        let a = bessel_k(c(0.0, 0.0), 2.0).unwrap();
        let b = k0_series(2.0);
        assert!((a.re - b).abs() < 1e-10 && a.im.abs() < 1e-15, "{a} {b}");
    }

    #[test]
    fn mu_zero_trivial() {
        let s = SphericalSolution::radial(c(0.0, 0.0), 4.0).unwrap();
        for v in &s.values {
            assert_eq!(*v, c(1.0, 0.0));
        }
        assert_eq!(spherical_g(c(0.0, 0.0), 2.5).unwrap(), c(1.0, 0.0));
        assert_eq!(angular_f(c(0.0, 0.0), 1.2).unwrap(), c(1.0, 0.0));
        assert_eq!(spherical_g(c(-0.25, 0.0), 0.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn radial_dual_integrators() {
        for mu in [c(-0.25, 0.0), c(-0.24, 0.0), c(-0.25 - 4.0, 0.0), c(0.5, 1.5)] {
            let sol = SphericalSolution::radial(mu, 3.0).unwrap();
            for r in [0.3, 1.0, 1.7, 2.9] {
                let a = sol.eval(r).unwrap();
                let b = spherical_g_series(mu, r).unwrap()[0];
                assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "mu={mu} r={r} {a} {b}");
            }
        }
        let golden = spherical_g_series(c(-0.25, 0.0), 1.0).unwrap()[0];
        assert!((golden.re - 0.940_862_159_249_349_8).abs() < 1e-9, "{golden}");
    }

    #[test]
    fn angular_dual_integrators_and_evenness() {
        for mu in [c(-0.25, 0.0), c(0.6, -0.8)] {
            let sol = SphericalSolution::angular(mu, 1.45).unwrap();
            for th in [0.2, PI / 4.0, 1.2, 1.44] {
                let a = sol.eval(th).unwrap();
                let b = angular_series(mu, th, c(1.0, 0.0), c(0.0, 0.0)).unwrap()[0];
                assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "{mu} {th} {a} {b}");
                assert!((sol.eval(-th).unwrap() - a).norm() < 1e-12);
                assert!((angular_f(mu, -th).unwrap() - angular_f(mu, th).unwrap()).norm() < 1e-12);
            }
        }
        let golden = angular_series(c(-0.25, 0.0), PI / 4.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap()[0];
        assert!((golden.re - 0.914_717_119_658_283).abs() < 1e-9, "{golden}");
        assert!(angular_f(c(1.0, 0.0), PI / 2.0).is_err());
    }

    #[test]
    fn ode_residuals() {
        let mu = c(-0.24, 0.3);
        let g = SphericalSolution::radial(mu, 3.5).unwrap();
        let hs = 1e-4;
        for i in 0..40 {
            let r = 0.01 + (3.0 - 0.01) * i as f64 / 39.0;
            let d2 = (g.eval_pair(r + hs).unwrap()[1] - g.eval_pair(r - hs).unwrap()[1]) / (2.0 * hs);
            let [v, d] = g.eval_pair(r).unwrap();
            let res = d2 + d / r.tanh() - mu * v;
            assert!(res.norm() <= 1e-6, "r={r} {res}");
        }
        let f = SphericalSolution::angular(mu, 1.45).unwrap();
        for i in 0..40 {
            let th = -1.4 + 2.8 * i as f64 / 39.0;
            let d2 = (f.eval_pair(th + hs).unwrap()[1] - f.eval_pair(th - hs).unwrap()[1]) / (2.0 * hs);
            let v = f.eval(th).unwrap();
            let res = th.cos().powi(2) * d2 - mu * v;
            assert!(res.norm() <= 1e-6, "θ={th} {res}");
        }
    }

    #[test]
    fn rotational_average_pins_sign() {
        let s = 0.6;
        let mu = c(s * (s - 1.0), 0.0);
        for r in [0.5f64, 1.0] {
            let w = c(0.0, (-r).exp());
            let avg = quad::adaptive(
                |phi: f64| {
                    let (cs, sn) = (phi.cos(), phi.sin());
                    let z = (w * cs + sn) / (w * (-sn) + cs);
                    z.im.powf(s)
                },
                0.0,
                PI,
                Tolerance::new(1e-14, 1e-12),
            )
            .value
                / PI;
            let g = spherical_g(mu, r).unwrap();
            assert!((avg - g.re).abs() < 1e-6 && g.im.abs() < 1e-14, "r={r} {avg} {g}");
        }
    }

    #[test]
    fn wronskian_is_one() {
        let mu = c(-0.3, 0.7);
        let f = SphericalSolution::angular(mu, 1.4).unwrap();
        let ft = SphericalSolution::angular_with(mu, 1.4, c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        for th in [-1.3, -0.5, 0.0, 0.4, 1.0, 1.39] {
            let [a, da] = f.eval_pair(th).unwrap();
            let [b, db] = ft.eval_pair(th).unwrap();
            let w = a * db - da * b;
            assert!((w - 1.0).norm() < 1e-8, "{th} {w}");
        }
    }

    #[test]
    fn dense_output_midpoints() {
        let mu = c(-2.0, 1.0);
        let sol = SphericalSolution::radial(mu, 2.0).unwrap();
        for w in sol.grid.windows(2).step_by(3) {
            let m = 0.5 * (w[0] + w[1]);
            if m < 0.05 {
                continue;
            }
            let a = sol.eval(m).unwrap();
            let b = spherical_g_series(mu, m).unwrap()[0];
            assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "{m}");
        }
    }
}
