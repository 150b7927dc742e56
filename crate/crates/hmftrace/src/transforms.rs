//! Product test functions and the transform chain ψ → Q → g → h with its inverses.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, gauss_legendre, Tolerance};

/// One-variable bump `exp(-1/(1-x²))` on `(-1, 1)`.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// Smooth step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, C^∞ in between.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }
}

/// `ψ(t) = amplitude · ∏ bump((t_k − c_k)/w_k)`, cut off smoothly at 0 when a
/// factor would otherwise reach negative arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
    pub amplitude: f64,
}

impl TestFunction {
    pub fn new(centers: Vec<f64>, widths: Vec<f64>, amplitude: f64) -> Result<Self> {
        if centers.is_empty() || centers.len() != widths.len() {
            return Err(Error::Domain("centers and widths must be nonempty and of equal length".into()));
        }
        if centers.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Domain("bump centers must be finite and nonnegative".into()));
        }
        if widths.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::Domain("bump widths must be positive".into()));
        }
        if !amplitude.is_finite() {
            return Err(Error::Domain("amplitude must be finite".into()));
        }
        Ok(TestFunction { centers, widths, amplitude })
    }

    /// Bump centred at 4.5 with width 4.5 in every coordinate: support `[0, 9]ⁿ`.
    pub fn default_bump(n: usize) -> Self {
        TestFunction { centers: vec![4.5; n], widths: vec![4.5; n], amplitude: 1.0 }
    }

    pub fn zero(n: usize) -> Self {
        TestFunction { amplitude: 0.0, ..Self::default_bump(n) }
    }

    pub fn dim(&self) -> usize {
        self.centers.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    /// Normalised one-variable factor (without amplitude).
    pub fn factor(&self, k: usize, t: f64) -> f64 {
        let c = self.centers[k];
        let w = self.widths[k];
        let base = bump((t - c) / w);
        if c >= w || base == 0.0 {
            base
        } else {
            base * smooth_step(t / self.cutoff_width(k))
        }
    }

    fn cutoff_width(&self, k: usize) -> f64 {
        (self.centers[k] + self.widths[k]) / 8.0
    }

    pub fn eval(&self, t: &[f64]) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let mut v = self.amplitude;
        for (k, &tk) in t.iter().enumerate() {
            v *= self.factor(k, tk);
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    }

    /// Closed support interval of factor `k`.
    pub fn support(&self, k: usize) -> (f64, f64) {
        let lo = (self.centers[k] - self.widths[k]).max(0.0);
        (lo, self.centers[k] + self.widths[k])
    }

    pub fn support_max(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.support(k).1).collect()
    }
}

/// `4 sinh²(u/2)`, the kernel argument attached to a displacement `u`.
pub fn sinh_argument(u: f64) -> f64 {
    let s = (0.5 * u).sinh();
    4.0 * s * s
}

/// Radius of the support of a one-variable `g` factor when `Q` vanishes past `w_max`.
pub fn g_support_radius(w_max: f64) -> f64 {
    2.0 * (0.5 * w_max.sqrt()).asinh()
}

/// One axis of `Q(w) = ∫ ψ(t)/√(t − w) dt`, computed as `∫ 2 ψ(w + τ²) dτ`.
pub fn q_factor(psi: &TestFunction, k: usize, w: f64, tol: Tolerance) -> Result<f64> {
    let (lo, hi) = psi.support(k);
    if w >= hi {
        return Ok(0.0);
    }
    let tau_hi = (hi - w).sqrt();
    let mut breaks = vec![0.0];
    if lo > w {
        let t_lo = (lo - w).sqrt();
        if t_lo > 0.0 && t_lo < tau_hi {
            breaks.push(t_lo);
        }
    }
    let mid = (psi.centers[k] - w).max(0.0).sqrt();
    if mid > *breaks.last().unwrap() && mid < tau_hi {
        breaks.push(mid);
    }
    breaks.push(tau_hi);
    let mut f = |tau: f64| 2.0 * psi.factor(k, w + tau * tau);
    let est = quad::adaptive_from(&mut f, &breaks, tol);
    if !est.converged {
        return Err(Error::Quadrature { what: "Q transform".into(), estimate: est.error });
    }
    Ok(est.value)
}

/// Per-axis tabulation of `g` on Gauss–Legendre panels for fast `h` evaluation.
#[derive(Clone, Debug)]
struct AxisTable {
    radius: f64,
    nodes: Vec<f64>,
    weighted_g: Vec<f64>,
}

const PANELS: usize = 128;
const PANEL_ORDER: usize = 16;

/// Cached transform chain of a product test function.
#[derive(Clone, Debug)]
pub struct TransformTriple {
    pub source: TestFunction,
    pub tolerance: Tolerance,
    axes: Vec<AxisTable>,
}

impl TransformTriple {
    pub fn new(source: TestFunction) -> Result<Self> {
        Self::with_tolerance(source, Tolerance::new(1e-14, 1e-11))
    }

    pub fn with_tolerance(source: TestFunction, tolerance: Tolerance) -> Result<Self> {
        let (x, w) = gauss_legendre(PANEL_ORDER);
        let mut axes = Vec::with_capacity(source.dim());
        for k in 0..source.dim() {
            let radius = g_support_radius(source.support(k).1);
            let width = radius / PANELS as f64;
            let mut nodes = Vec::with_capacity(PANELS * PANEL_ORDER);
            let mut weighted_g = Vec::with_capacity(PANELS * PANEL_ORDER);
            for p in 0..PANELS {
                let a = p as f64 * width;
                for (xi, wi) in x.iter().zip(&w) {
                    let u = a + 0.5 * width * (xi + 1.0);
                    let g = q_factor(&source, k, sinh_argument(u), tolerance)?;
                    nodes.push(u);
                    weighted_g.push(0.5 * width * wi * g);
                }
            }
            axes.push(AxisTable { radius, nodes, weighted_g });
        }
        Ok(TransformTriple { source, tolerance, axes })
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// Radius beyond which the `k`-th factor of `g` vanishes.
    pub fn g_radius(&self, k: usize) -> f64 {
        self.axes[k].radius
    }

    pub fn q(&self, w: &[f64]) -> Result<f64> {
        q_of_tol(&self.source, w, self.tolerance)
    }

    pub fn g(&self, u: &[f64]) -> Result<f64> {
        let w: Vec<f64> = u.iter().map(|&x| sinh_argument(x)).collect();
        self.q(&w)
    }

    pub fn g_factor(&self, k: usize, u: f64) -> Result<f64> {
        q_factor(&self.source, k, sinh_argument(u), self.tolerance)
    }

    /// `h_k(r) = ∫ g_k(u) cos(r u) du` over the support of `g_k`.
    pub fn h_factor(&self, k: usize, r: f64) -> f64 {
        let ax = &self.axes[k];
        let mut acc = 0.0;
        for (u, wg) in ax.nodes.iter().zip(&ax.weighted_g) {
            acc += wg * (r * u).cos();
        }
        2.0 * acc
    }

    pub fn h(&self, r: &[f64]) -> f64 {
        if self.source.is_zero() {
            return 0.0;
        }
        let mut v = self.source.amplitude;
        for (k, &rk) in r.iter().enumerate() {
            v *= self.h_factor(k, rk);
        }
        v
    }

    /// `h` at complex spectral parameters, via the same tabulation.
    pub fn h_complex(&self, r: &[Complex64]) -> Complex64 {
        let mut v = Complex64::new(self.source.amplitude, 0.0);
        for (k, &rk) in r.iter().enumerate() {
            let ax = &self.axes[k];
            let mut acc = Complex64::new(0.0, 0.0);
            for (u, wg) in ax.nodes.iter().zip(&ax.weighted_g) {
                acc += (rk * u).cos() * *wg;
            }
            v *= acc * 2.0;
        }
        v
    }
}

fn q_of_tol(psi: &TestFunction, w: &[f64], tol: Tolerance) -> Result<f64> {
    if w.len() != psi.dim() {
        return Err(Error::Domain("dimension mismatch in Q".into()));
    }
    if psi.is_zero() {
        return Ok(0.0);
    }
    let mut v = psi.amplitude;
    for (k, &wk) in w.iter().enumerate() {
        v *= q_factor(psi, k, wk, tol)?;
        if v == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(v)
}

pub fn q_of(psi: &TestFunction, w: &[f64]) -> Result<f64> {
    q_of_tol(psi, w, Tolerance::new(1e-14, 1e-11))
}

pub fn g_of(psi: &TestFunction, u: &[f64]) -> Result<f64> {
    let w: Vec<f64> = u.iter().map(|&x| sinh_argument(x)).collect();
    q_of(psi, &w)
}

pub fn h_of(psi: &TestFunction, r: &[f64]) -> Result<Complex64> {
    if psi.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let t = TransformTriple::new(psi.clone())?;
    Ok(Complex64::new(t.h(r), 0.0))
}

/// `h` sampled on the tensor grid `r_k = j·Δ_k`, `0 ≤ j < count_k`.
///
/// Only nonnegative nodes are stored; `h` is even in every coordinate.
#[derive(Clone, Debug)]
pub struct HGrid {
    pub spacing: Vec<f64>,
    pub counts: Vec<usize>,
    pub amplitude: f64,
    axes: Vec<Vec<f64>>,
}

impl HGrid {
    /// Spacing `π/(U_k · oversample)` where `U_k` is the support radius of `g_k`;
    /// the range extends until `|h_k|` stays below `tail · max|h_k|` over a full window.
    pub fn from_transforms(t: &TransformTriple, oversample: f64, tail: f64) -> Result<Self> {
        if oversample < 1.0 {
            return Err(Error::Domain("oversampling factor must be at least 1".into()));
        }
        let mut spacing = Vec::new();
        let mut axes = Vec::new();
        for k in 0..t.dim() {
            let delta = std::f64::consts::PI / (t.g_radius(k) * oversample);
            let h0 = t.h_factor(k, 0.0).abs().max(f64::MIN_POSITIVE);
            let window = (20.0 / delta).ceil() as usize;
            let mut vals = Vec::new();
            let mut quiet = 0usize;
            let mut j = 0usize;
            loop {
                let v = t.h_factor(k, j as f64 * delta);
                vals.push(v);
                if v.abs() < tail * h0 {
                    quiet += 1;
                } else {
                    quiet = 0;
                }
                if quiet >= window {
                    break;
                }
                j += 1;
                if j > 400_000 {
                    return Err(Error::Resource("h grid does not decay to the requested tail".into()));
                }
            }
            spacing.push(delta);
            axes.push(vals);
        }
        let counts = axes.iter().map(|a| a.len()).collect();
        Ok(HGrid { spacing, counts, amplitude: t.source.amplitude, axes })
    }

    pub fn with_spacing(t: &TransformTriple, spacing: &[f64], r_max: &[f64]) -> Self {
        let axes: Vec<Vec<f64>> = (0..t.dim())
            .map(|k| {
                let m = (r_max[k] / spacing[k]).ceil() as usize + 1;
                (0..m).map(|j| t.h_factor(k, j as f64 * spacing[k])).collect()
            })
            .collect();
        let counts = axes.iter().map(|a| a.len()).collect();
        HGrid { spacing: spacing.to_vec(), counts, amplitude: t.source.amplitude, axes }
    }

    pub fn zero(n: usize, spacing: f64, count: usize) -> Self {
        HGrid { spacing: vec![spacing; n], counts: vec![count; n], amplitude: 0.0, axes: vec![vec![0.0; count]; n] }
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, k: usize, j: usize) -> f64 {
        j as f64 * self.spacing[k]
    }

    /// Value at multi-index `idx`.
    pub fn value(&self, idx: &[usize]) -> f64 {
        let mut v = self.amplitude;
        for (k, &j) in idx.iter().enumerate() {
            v *= self.axes[k][j];
        }
        v
    }

    /// `Σ_idx value(idx) · ∏_k weights[k][idx_k]` over the full tensor grid.
    pub fn weighted_sum(&self, weights: &[Vec<Complex64>]) -> Complex64 {
        let n = self.dim();
        let mut idx = vec![0usize; n];
        let mut acc = Complex64::new(0.0, 0.0);
        if self.is_empty() {
            return acc;
        }
        loop {
            let mut w = Complex64::new(self.value(&idx), 0.0);
            for k in 0..n {
                w *= weights[k][idx[k]];
            }
            acc += w;
            let mut k = n;
            loop {
                if k == 0 {
                    return acc;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.counts[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// Fourier inversion `g(u) = (2π)^{-n} ∫ h(r) e^{-i r·u} dr` by the trapezoid
/// rule on the grid, using evenness of `h`.
pub fn g_from_h(grid: &HGrid, u: &[f64]) -> Result<f64> {
    if u.len() != grid.dim() {
        return Err(Error::Domain("dimension mismatch in g_from_h".into()));
    }
    let weights: Vec<Vec<Complex64>> = (0..grid.dim())
        .map(|k| {
            (0..grid.counts[k])
                .map(|j| {
                    let w = if j == 0 { 0.5 } else { 1.0 };
                    Complex64::new(w * grid.spacing[k] * (grid.node(k, j) * u[k]).cos() / std::f64::consts::PI, 0.0)
                })
                .collect()
        })
        .collect();
    Ok(grid.weighted_sum(&weights).re)
}

/// Inversion `ψ(t) = (−1)ⁿ π^{−n} ∫_{w ≥ t} ∂ⁿQ/∂w_1…∂w_n ∏ (w_k − t_k)^{−1/2} dw`.
///
/// The mixed derivative is taken by central differences with step `1e-3 · width_k`;
/// `support_max[k]` bounds where `Q` can be nonzero.
pub fn psi_from_q<Q>(q: &Q, t: &[f64], support_max: &[f64], widths: &[f64]) -> Result<f64>
where
    Q: Fn(&[f64]) -> Result<f64> + ?Sized,
{
    let n = t.len();
    if support_max.len() != n || widths.len() != n {
        return Err(Error::Domain("dimension mismatch in psi_from_q".into()));
    }
    if (0..n).any(|k| t[k] >= support_max[k]) {
        return Ok(0.0);
    }
    let steps: Vec<f64> = widths.iter().map(|w| 1e-3 * w).collect();
    let failure = std::cell::Cell::new(None::<Error>);
    let mixed = |w: &[f64]| -> f64 {
        let mut acc = 0.0;
        let mut pt = vec![0.0; n];
        for mask in 0..(1usize << n) {
            let mut sign = 1.0;
            for k in 0..n {
                if mask >> k & 1 == 1 {
                    pt[k] = w[k] + steps[k];
                } else {
                    pt[k] = w[k] - steps[k];
                    sign = -sign;
                }
            }
            match q(&pt) {
                Ok(v) => acc += sign * v,
                Err(e) => {
                    failure.set(Some(e));
                    return 0.0;
                }
            }
        }
        acc / steps.iter().map(|h| 2.0 * h).product::<f64>()
    };
    let integrand = |tau: &[f64]| -> f64 {
        let w: Vec<f64> = (0..n).map(|k| t[k] + tau[k] * tau[k]).collect();
        mixed(&w) * 2f64.powi(n as i32)
    };
    let breaks = |level: usize, _: &[f64]| vec![0.0, (support_max[level] - t[level]).sqrt()];
    let est = quad::iterated(&integrand, &breaks, n, Tolerance::new(1e-12, 1e-7));
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * est.value / std::f64::consts::PI.powi(n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle_q2(psi: &TestFunction, w: &[f64]) -> f64 {
        // Direct 2-D integral in t, with the endpoint singularity left to tanh-sinh.
        let (_, hi0) = psi.support(0);
        let (_, hi1) = psi.support(1);
        let tol = Tolerance::new(1e-15, 1e-11);
        quad::tanh_sinh(
            |t0: f64| {
                quad::tanh_sinh(|t1: f64| psi.eval(&[t0, t1]) / ((t0 - w[0]) * (t1 - w[1])).sqrt(), w[1], hi1, tol).value
            },
            w[0],
            hi0,
            tol,
        )
        .value
    }

    #[test]
    fn q_matches_direct_oracle() {
        let psi = TestFunction::default_bump(2);
        let a = q_of(&psi, &[0.0, 0.0]).unwrap();
        let b = oracle_q2(&psi, &[0.0, 0.0]);
        assert!(((a - b) / b).abs() < 1e-6, "{a} {b}");
        let a = q_of(&psi, &[1.3, 2.7]).unwrap();
        let b = oracle_q2(&psi, &[1.3, 2.7]);
        assert!(((a - b) / b).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn q_trivial_cases() {
        assert_eq!(q_of(&TestFunction::zero(2), &[1.0, 1.0]).unwrap(), 0.0);
        let psi = TestFunction::default_bump(2);
        assert_eq!(q_of(&psi, &[9.0, 1.0]).unwrap(), 0.0);
        assert_eq!(q_of(&psi, &[0.5, 12.0]).unwrap(), 0.0);
    }

    #[test]
    fn g_even_and_at_zero() {
        let psi = TestFunction::default_bump(2);
        let a = g_of(&psi, &[0.7, -1.1]).unwrap();
        for u in [[-0.7, -1.1], [0.7, 1.1], [-0.7, 1.1]] {
            assert!((g_of(&psi, &u).unwrap() - a).abs() < 1e-10);
        }
        assert_eq!(g_of(&psi, &[0.0, 0.0]).unwrap(), q_of(&psi, &[0.0, 0.0]).unwrap());
    }

    #[test]
    fn g_support_at_unit_logs() {
        let psi = TestFunction::default_bump(2);
        let l = (3.0 + 2.0 * 2f64.sqrt()).ln();
        // Conjugate embedding has log −l.
        assert!(g_of(&psi, &[l, -l]).unwrap() != 0.0);
        assert!(g_of(&psi, &[-l, l]).unwrap() != 0.0);
        assert_eq!(g_of(&psi, &[2.0 * l, -2.0 * l]).unwrap(), 0.0);
        assert!((sinh_argument(l) - 4.0).abs() < 1e-12);
        assert!((sinh_argument(2.0 * l) - 32.0).abs() < 1e-10);
    }

    #[test]
    fn support_bookkeeping_grid() {
        let psi = TestFunction::default_bump(2);
        let u_max = g_support_radius(9.0);
        for i in 0..30 {
            for j in 0..30 {
                let u = [-4.0 + 8.0 * i as f64 / 29.0, -4.0 + 8.0 * j as f64 / 29.0];
                if u.iter().any(|x| sinh_argument(*x) > 9.0) {
                    assert_eq!(g_of(&psi, &u).unwrap(), 0.0);
                    assert!(u.iter().any(|x| x.abs() > u_max - 1e-12));
                }
            }
        }
    }

    #[test]
    fn h_at_zero_is_integral_of_g() {
        let psi = TestFunction::default_bump(2);
        let t = TransformTriple::new(psi.clone()).unwrap();
        let r = t.g_radius(0);
        let direct = quad::adaptive(
            |u0: f64| quad::adaptive(|u1: f64| g_of(&psi, &[u0, u1]).unwrap(), -r, r, Tolerance::new(1e-13, 1e-10)).value,
            -r,
            r,
            Tolerance::new(1e-13, 1e-10),
        )
        .value;
        let h0 = t.h(&[0.0, 0.0]);
        assert!(((h0 - direct) / direct).abs() < 1e-8, "{h0} {direct}");
    }

    #[test]
    fn h_even_real_and_zero() {
        let psi = TestFunction::default_bump(2);
        let t = TransformTriple::new(psi.clone()).unwrap();
        let a = t.h(&[1.3, 0.4]);
        assert!((t.h(&[-1.3, 0.4]) - a).abs() < 1e-8);
        assert!((t.h(&[1.3, -0.4]) - a).abs() < 1e-8);
        let c = t.h_complex(&[Complex64::new(1.3, 0.0), Complex64::new(0.4, 0.0)]);
        assert!((c.re - a).abs() < 1e-12 && c.im.abs() < 1e-14);
        assert_eq!(h_of(&TestFunction::zero(2), &[1.0, 2.0]).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn h_decays() {
        let t = TransformTriple::new(TestFunction::default_bump(1)).unwrap();
        let h0 = t.h(&[0.0]).abs();
        let scaled: Vec<(f64, f64)> = (0..=1200)
            .map(|j| {
                let r = 0.5 * j as f64;
                (r, t.h(&[r]).abs() * (1.0 + r).powi(6))
            })
            .collect();
        let c = scaled.iter().map(|p| p.1).fold(0.0, f64::max);
        assert!(c.is_finite());
        for (r, v) in &scaled {
            if *r >= 550.0 {
                assert!(*v < 0.5 * c, "r={r}");
            }
        }
        assert!(t.h(&[300.0]).abs() < 1e-6 * h0);
    }

    #[test]
    fn round_trip_g_from_h() {
        let psi = TestFunction::default_bump(2);
        let t = TransformTriple::new(psi.clone()).unwrap();
        let grid = HGrid::from_transforms(&t, 2.0, 1e-10).unwrap();
        let g0 = g_of(&psi, &[0.0, 0.0]).unwrap();
        assert!((g_from_h(&grid, &[0.0, 0.0]).unwrap() - g0).abs() < 1e-5);
        let mut rng = 12345u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        let r = t.g_radius(0);
        for _ in 0..10 {
            let u = [(2.0 * next() - 1.0) * r, (2.0 * next() - 1.0) * r];
            let a = g_from_h(&grid, &u).unwrap();
            let b = g_of(&psi, &u).unwrap();
            assert!((a - b).abs() < 1e-5, "{u:?} {a} {b}");
        }
        let z = HGrid::zero(2, 0.1, 50);
        assert_eq!(g_from_h(&z, &[0.3, 0.2]).unwrap(), 0.0);
    }

    #[test]
    fn psi_round_trip() {
        let psi = TestFunction::default_bump(2);
        let q = |w: &[f64]| q_of(&psi, w);
        let sm = psi.support_max();
        let v = psi_from_q(&q, &[4.5, 4.5], &sm, &psi.widths).unwrap();
        let e = psi.eval(&[4.5, 4.5]);
        assert!(((v - e) / e).abs() < 1e-3, "{v} {e}");
        let v = psi_from_q(&q, &[3.0, 6.0], &sm, &psi.widths).unwrap();
        let e = psi.eval(&[3.0, 6.0]);
        assert!(((v - e) / e).abs() < 1e-3, "{v} {e}");
        assert!(psi_from_q(&q, &[9.5, 4.0], &sm, &psi.widths).unwrap().abs() <= 1e-6);
        let zero = |_: &[f64]| Ok(0.0);
        assert_eq!(psi_from_q(&zero, &[4.0, 4.0], &sm, &psi.widths).unwrap(), 0.0);
    }

    #[test]
    fn cutoff_variant_is_supported_on_half_line() {
        let psi = TestFunction::new(vec![1.0], vec![3.0], 1.0).unwrap();
        assert_eq!(psi.eval(&[-0.5]), 0.0);
        assert_eq!(psi.eval(&[0.0]), 0.0);
        assert!(psi.eval(&[1.0]) > 0.0);
        assert!(psi.eval(&[1e-3]) < 1e-100);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn q_nonnegative(w0 in -2.0f64..10.0, c in 1.0f64..6.0, wd in 0.5f64..1.0) {
                let psi = TestFunction::new(vec![c], vec![wd * c], 1.0).unwrap();
                prop_assert!(q_of(&psi, &[w0]).unwrap() >= 0.0);
            }

            #[test]
            fn g_even_each_coordinate(u0 in -3.0f64..3.0, u1 in -3.0f64..3.0) {
                let psi = TestFunction::default_bump(2);
                let a = g_of(&psi, &[u0, u1]).unwrap();
                prop_assert!((g_of(&psi, &[-u0, u1]).unwrap() - a).abs() < 1e-10);
                prop_assert!((g_of(&psi, &[u0, -u1]).unwrap() - a).abs() < 1e-10);
            }
        }
    }
}
