//! Elements of PSL(2,ℝ)ⁿ, the Hilbert modular group of a quadratic field,
//! conjugacy-type classification, point-pair kernels and Eisenstein series.

use crate::error::{Error, Result};
use crate::field::{FieldEmbedding, Integral};
use crate::lattice::MultiplierGroup;
use crate::transforms::TestFunction;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeSet;

/// A point of ℍⁿ.
pub type Point = Vec<Complex64>;

/// `(az+b)/(cz+d)` acting coordinate-wise; entries are real n-vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElementN {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub exact: Option<[Integral; 4]>,
}

impl GroupElementN {
    pub fn identity(n: usize) -> Self {
        GroupElementN {
            a: vec![1.0; n],
            b: vec![0.0; n],
            c: vec![0.0; n],
            d: vec![1.0; n],
            exact: Some([Integral::ONE, Integral::ZERO, Integral::ZERO, Integral::ONE]),
        }
    }

    /// The same real matrix in every coordinate.
    pub fn diagonal_sl2(n: usize, m: [f64; 4]) -> Self {
        GroupElementN {
            a: vec![m[0]; n],
            b: vec![m[1]; n],
            c: vec![m[2]; n],
            d: vec![m[3]; n],
            exact: None,
        }
        .normalized()
    }

    /// Per-coordinate matrices `[a, b, c, d]`.
    pub fn from_coordinates(ms: &[[f64; 4]]) -> Self {
        GroupElementN {
            a: ms.iter().map(|m| m[0]).collect(),
            b: ms.iter().map(|m| m[1]).collect(),
            c: ms.iter().map(|m| m[2]).collect(),
            d: ms.iter().map(|m| m[3]).collect(),
            exact: None,
        }
        .normalized()
    }

    /// Element of SL(2, 𝒪_K) from exact entries; fails unless `ad − bc = 1`.
    pub fn from_exact(field: &FieldEmbedding, e: [Integral; 4]) -> Result<Self> {
        let det = field.mul_int(e[0], e[3]) - field.mul_int(e[1], e[2]);
        if det != Integral::ONE {
            return Err(Error::Domain(format!("determinant {det:?} is not 1")));
        }
        Ok(GroupElementN {
            a: field.embed_int(e[0]),
            b: field.embed_int(e[1]),
            c: field.embed_int(e[2]),
            d: field.embed_int(e[3]),
            exact: Some(e),
        }
        .normalized())
    }

    /// `S = [[0,−1],[1,0]]` in every coordinate.
    pub fn s(n: usize) -> Self {
        let mut g = GroupElementN::diagonal_sl2(n, [0.0, -1.0, 1.0, 0.0]);
        g.exact = Some([Integral::ZERO, Integral::ONE, -Integral::ONE, Integral::ZERO]);
        g
    }

    /// `T = [[1,1],[0,1]]` in every coordinate.
    pub fn t(n: usize) -> Self {
        let mut g = GroupElementN::diagonal_sl2(n, [1.0, 1.0, 0.0, 1.0]);
        g.exact = Some([Integral::ONE, Integral::ONE, Integral::ZERO, Integral::ONE]);
        g
    }

    /// Rotation `[[cos θ, sin θ], [−sin θ, cos θ]]` per coordinate.
    pub fn rotation(angles: &[f64]) -> Self {
        let ms: Vec<[f64; 4]> = angles
            .iter()
            .map(|t| [t.cos(), t.sin(), -t.sin(), t.cos()])
            .collect();
        GroupElementN::from_coordinates(&ms)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Sign normalization: the first nonzero entry of coordinate 1 is positive.
    pub fn normalized(mut self) -> Self {
        let first = [self.a[0], self.b[0], self.c[0], self.d[0]]
            .into_iter()
            .find(|x| x.abs() > 1e-300)
            .unwrap_or(1.0);
        if first < 0.0 {
            for v in [&mut self.a, &mut self.b, &mut self.c, &mut self.d] {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
            if let Some(e) = self.exact.as_mut() {
                for x in e.iter_mut() {
                    *x = -*x;
                }
            }
        }
        self
    }

    pub fn determinants(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|k| self.a[k] * self.d[k] - self.b[k] * self.c[k])
            .collect()
    }

    pub fn inverse(&self) -> Self {
        GroupElementN {
            a: self.d.clone(),
            b: self.b.iter().map(|x| -x).collect(),
            c: self.c.iter().map(|x| -x).collect(),
            d: self.a.clone(),
            exact: self.exact.map(|e| [e[3], -e[1], -e[2], e[0]]),
        }
        .normalized()
    }

    /// Matrix product `self · other` (exact data is dropped unless a field is given).
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.dim();
        let mut out = GroupElementN {
            a: vec![0.0; n],
            b: vec![0.0; n],
            c: vec![0.0; n],
            d: vec![0.0; n],
            exact: None,
        };
        for k in 0..n {
            out.a[k] = self.a[k] * other.a[k] + self.b[k] * other.c[k];
            out.b[k] = self.a[k] * other.b[k] + self.b[k] * other.d[k];
            out.c[k] = self.c[k] * other.a[k] + self.d[k] * other.c[k];
            out.d[k] = self.c[k] * other.b[k] + self.d[k] * other.d[k];
        }
        out.normalized()
    }

    pub fn compose_exact(&self, other: &Self, field: &FieldEmbedding) -> Result<Self> {
        match (self.exact, other.exact) {
            (Some(x), Some(y)) => {
                let m = |p: Integral, q: Integral| field.mul_int(p, q);
                GroupElementN::from_exact(
                    field,
                    [
                        m(x[0], y[0]) + m(x[1], y[2]),
                        m(x[0], y[1]) + m(x[1], y[3]),
                        m(x[2], y[0]) + m(x[3], y[2]),
                        m(x[2], y[1]) + m(x[3], y[3]),
                    ],
                )
            }
            _ => Ok(self.compose(other)),
        }
    }

    pub fn act(&self, z: &Point) -> Point {
        (0..self.dim())
            .map(|k| (z[k] * self.a[k] + self.b[k]) / (z[k] * self.c[k] + self.d[k]))
            .collect()
    }

    pub fn traces(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.a[k] + self.d[k]).collect()
    }
}

pub fn act(g: &GroupElementN, z: &Point) -> Point {
    g.act(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementKind {
    Identity,
    TotallyElliptic,
    TotallyParabolic,
    TotallyHyperbolic,
    HyperbolicParabolic,
    Mixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoordinateKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub kind: ElementKind,
    pub coordinates: Vec<CoordinateKind>,
    /// Rotation angles in `(0, π)` of the elliptic coordinates, in coordinate order.
    pub angles: Vec<f64>,
    /// Norms `> 1` of the hyperbolic coordinates, in coordinate order.
    pub norms: Vec<f64>,
    /// Derivative of the element at a fixed cusp (hyperbolic-parabolic elements only).
    pub multiplier: Option<Vec<f64>>,
}

const TRACE_BAND: f64 = 1e-9;

/// Integral square root, if `x` is a square in the ring of integers.
fn integral_sqrt(field: &FieldEmbedding, x: Integral) -> Option<Integral> {
    let e = field.embed_int(x);
    if e.iter().any(|v| *v < -1e-9) {
        return None;
    }
    let r: Vec<f64> = e.iter().map(|v| v.max(0.0).sqrt()).collect();
    let w = &field.basis_matrix;
    for s2 in [1.0, -1.0] {
        // solve p + q·ω_k = ±√x_k
        let y1 = r[0];
        let y2 = s2 * r[1];
        let q = (y1 - y2) / (w[(0, 1)] - w[(1, 1)]);
        let p = y1 - q * w[(0, 1)];
        let cand = Integral::new(p.round() as i64, q.round() as i64);
        if field.mul_int(cand, cand) == x {
            return Some(cand);
        }
    }
    None
}

/// Classifies by per-coordinate traces, deciding `|tr| = 2` exactly when field data is present.
pub fn classify(g: &GroupElementN, field: Option<&FieldEmbedding>) -> Result<ClassificationResult> {
    let n = g.dim();
    let is_identity = (0..n).all(|k| {
        g.b[k].abs() < 1e-12 && g.c[k].abs() < 1e-12 && (g.a[k].abs() - 1.0).abs() < 1e-12 && (g.d[k].abs() - 1.0).abs() < 1e-12
    });
    let exact_tr = match (g.exact, field) {
        (Some(e), Some(f)) => Some((f, e[0] + e[3])),
        _ => None,
    };
    if let (Some(e), Some(_)) = (g.exact, field) {
        if e[1].is_zero() && e[2].is_zero() && is_identity {
            return Ok(ClassificationResult {
                kind: ElementKind::Identity,
                coordinates: vec![CoordinateKind::Parabolic; n],
                angles: vec![],
                norms: vec![],
                multiplier: None,
            });
        }
    } else if is_identity {
        return Ok(ClassificationResult {
            kind: ElementKind::Identity,
            coordinates: vec![CoordinateKind::Parabolic; n],
            angles: vec![],
            norms: vec![],
            multiplier: None,
        });
    }
    let traces = g.traces();
    let mut coords = Vec::with_capacity(n);
    for k in 0..n {
        let t = traces[k].abs();
        let kind = if (t - 2.0).abs() <= TRACE_BAND {
            match exact_tr {
                Some((f, tr)) => {
                    let disc = f.mul_int(tr, tr) - Integral::new(4, 0);
                    if disc.is_zero() {
                        CoordinateKind::Parabolic
                    } else if f.embed_int(disc)[k] > 0.0 {
                        CoordinateKind::Hyperbolic
                    } else {
                        CoordinateKind::Elliptic
                    }
                }
                None => {
                    return Err(Error::AmbiguousClassification(format!(
                        "|tr| = {t} in coordinate {k} is within {TRACE_BAND:e} of 2"
                    )))
                }
            }
        } else if t < 2.0 {
            CoordinateKind::Elliptic
        } else {
            CoordinateKind::Hyperbolic
        };
        coords.push(kind);
    }
    let mut angles = Vec::new();
    let mut norms = Vec::new();
    for k in 0..n {
        match coords[k] {
            CoordinateKind::Elliptic => {
                // representative with c < 0 rotates counter-clockwise by 2θ about its fixed point
                let sign = if g.c[k] < 0.0 { 1.0 } else { -1.0 };
                let half = (sign * traces[k] / 2.0).clamp(-1.0, 1.0);
                angles.push(half.acos());
            }
            CoordinateKind::Hyperbolic => {
                let t = traces[k].abs();
                let root = 0.5 * (t + (t * t - 4.0).max(0.0).sqrt());
                norms.push(root * root);
            }
            CoordinateKind::Parabolic => {}
        }
    }
    let all = |c: CoordinateKind| coords.iter().all(|x| *x == c);
    let any = |c: CoordinateKind| coords.contains(&c);
    let mut multiplier = None;
    let kind = if all(CoordinateKind::Elliptic) {
        ElementKind::TotallyElliptic
    } else if all(CoordinateKind::Parabolic) {
        ElementKind::TotallyParabolic
    } else if all(CoordinateKind::Hyperbolic) {
        match cusp_multiplier(g, field) {
            Some(m) => {
                multiplier = Some(m);
                ElementKind::HyperbolicParabolic
            }
            None => ElementKind::TotallyHyperbolic,
        }
    } else if any(CoordinateKind::Parabolic) {
        return Err(Error::Domain(
            "parabolic coordinates mixed with other types do not occur in the Hilbert modular group".into(),
        ));
    } else {
        ElementKind::Mixed
    };
    Ok(ClassificationResult { kind, coordinates: coords, angles, norms, multiplier })
}

/// If a fixed point lies in ℙ¹(K), the derivative `1/(cκ+d)²` there (∞ preferred).
fn cusp_multiplier(g: &GroupElementN, field: Option<&FieldEmbedding>) -> Option<Vec<f64>> {
    let (e, f) = match (g.exact, field) {
        (Some(e), Some(f)) => (e, f),
        _ => return None,
    };
    let n = g.dim();
    if e[2].is_zero() {
        return Some((0..n).map(|k| g.a[k] * g.a[k]).collect());
    }
    let tr = e[0] + e[3];
    let disc = f.mul_int(tr, tr) - Integral::new(4, 0);
    let y = integral_sqrt(f, disc)?;
    let ye = f.embed_int(y);
    Some(
        (0..n)
            .map(|k| {
                let kappa = (g.a[k] - g.d[k] + ye[k]) / (2.0 * g.c[k]);
                let den = g.c[k] * kappa + g.d[k];
                1.0 / (den * den)
            })
            .collect(),
    )
}

/// Hyperbolic point-pair argument `|z−w|²/(Im z · Im w)`.
pub fn pair_argument(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm_sqr() / (z.im * w.im)
}

/// `k(z,w) = ψ(|z_k−w_k|²/(Im z_k Im w_k))_k`.
pub fn kernel_k(psi: &TestFunction, z: &Point, w: &Point) -> f64 {
    let args: Vec<f64> = z.iter().zip(w).map(|(a, b)| pair_argument(*a, *b)).collect();
    psi.eval(&args)
}

/// `Σ_γ k(z, γw)` over a finite list of elements.
pub fn automorphic_kernel_partial(psi: &TestFunction, elements: &[GroupElementN], z: &Point, w: &Point) -> f64 {
    elements.iter().map(|g| kernel_k(psi, z, &g.act(w))).sum()
}

/// Ring elements with every embedding bounded by `bound` in absolute value.
pub fn integrals_in_box(field: &FieldEmbedding, bounds: &[f64]) -> Vec<Integral> {
    let w1 = field.basis_matrix[(0, 1)];
    let w2 = field.basis_matrix[(1, 1)];
    let bmax = ((bounds[0] + bounds[1]) / (w1 - w2).abs()).floor() as i64 + 1;
    let mut out = Vec::new();
    for b in -bmax..=bmax {
        let lo = (-bounds[0] - b as f64 * w1).max(-bounds[1] - b as f64 * w2).ceil() as i64;
        let hi = (bounds[0] - b as f64 * w1).min(bounds[1] - b as f64 * w2).floor() as i64;
        for a in lo - 1..=hi + 1 {
            let x = Integral::new(a, b);
            let e = field.embed_int(x);
            if e[0].abs() <= bounds[0] + 1e-12 && e[1].abs() <= bounds[1] + 1e-12 {
                out.push(x);
            }
        }
    }
    out.sort();
    out
}

/// Default cap on the number of enumerated elements.
pub const ELEMENT_CAP: usize = 500_000;

/// All elements of PSL(2, 𝒪_K) whose entries have every embedding bounded by `height_bound`.
pub fn enumerate_group_elements(field: &FieldEmbedding, height_bound: f64) -> Result<Vec<GroupElementN>> {
    enumerate_group_elements_capped(field, height_bound, ELEMENT_CAP)
}

pub fn enumerate_group_elements_capped(field: &FieldEmbedding, height_bound: f64, cap: usize) -> Result<Vec<GroupElementN>> {
    if field.degree != 2 {
        return Err(Error::UnsupportedDegree(field.degree));
    }
    let elems = integrals_in_box(field, &[height_bound, height_bound]);
    let ok = |x: Integral| {
        let e = field.embed_int(x);
        e[0].abs() <= height_bound + 1e-12 && e[1].abs() <= height_bound + 1e-12
    };
    let mut found: BTreeSet<[Integral; 4]> = BTreeSet::new();
    let push = |e: [Integral; 4], found: &mut BTreeSet<[Integral; 4]>| -> Result<()> {
        let g = GroupElementN::from_exact(field, e)?;
        found.insert(g.exact.expect("exact by construction"));
        if found.len() > cap {
            return Err(Error::Resource(format!("more than {cap} elements below height {height_bound}")));
        }
        Ok(())
    };
    for &a in &elems {
        for &b in &elems {
            for &c in &elems {
                if a.is_zero() {
                    if field.mul_int(b, c) != -Integral::ONE {
                        continue;
                    }
                    for &d in &elems {
                        push([a, b, c, d], &mut found)?;
                    }
                } else {
                    let num = Integral::ONE + field.mul_int(b, c);
                    if let Some(d) = field.div_exact(num, a) {
                        if ok(d) {
                            push([a, b, c, d], &mut found)?;
                        }
                    }
                }
            }
        }
    }
    found
        .into_iter()
        .map(|e| GroupElementN::from_exact(field, e))
        .collect()
}

/// Index of the ideal `(c, d)` in the ring of integers.
pub fn ideal_index(field: &FieldEmbedding, c: Integral, d: Integral) -> i64 {
    let w = Integral::new(0, 1);
    let gens = [c, field.mul_int(c, w), d, field.mul_int(d, w)];
    let mut g = 0i64;
    for i in 0..4 {
        for j in i + 1..4 {
            let minor = gens[i].a * gens[j].b - gens[i].b * gens[j].a;
            g = gcd(g, minor.abs());
        }
    }
    g
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

/// Coset representatives of Γ_∞\Γ as bottom rows `(c, d)`, together with the
/// exponents of the series and the height cut used.
#[derive(Clone, Debug)]
pub struct EisensteinSum {
    pub exponents: Vec<Complex64>,
    pub rows: Vec<(Integral, Integral)>,
    pub height_bound: f64,
    embedded: Vec<(Vec<f64>, Vec<f64>)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EisensteinValue {
    pub value: Complex64,
    pub tail_estimate: f64,
    pub terms: usize,
}

impl EisensteinSum {
    /// Enumerates all cosets with `∏_k |c_k z_k + d_k|² / y_k ≤ height_bound`.
    ///
    /// This cut is Γ-equivariant: the coset set at `γz` is the translate of the set at `z`.
    pub fn enumerate(field: &FieldEmbedding, s: Complex64, m: &[i64], z: &Point, height_bound: f64) -> Result<Self> {
        if s.re <= 1.0 {
            return Err(Error::Domain(format!("Eisenstein series needs Re s > 1, got {s}")));
        }
        if field.degree != 2 {
            return Err(Error::UnsupportedDegree(field.degree));
        }
        let lambda = MultiplierGroup::for_field(field)?;
        let exponents = lambda.exponents_from(s, m);
        let unit = field.fundamental_unit()?;
        let ue: Vec<f64> = field.embed_int(unit).iter().map(|x| x.abs()).collect();
        let units = MultiplierGroup::new(vec![ue.clone()])?;
        let ny: f64 = z.iter().map(|w| w.im).product();
        let mut rows = vec![(Integral::ZERO, Integral::ONE)];
        let cmax = (height_bound / ny).sqrt();
        if cmax >= 1.0 {
            // reduced c: |c_1|/|c_2| ∈ [1, ue_1²) and |N c| ≤ cmax
            let b0 = ue[0] * cmax.sqrt() * 1.000001;
            let b1 = cmax.sqrt() * 1.000001;
            for c in integrals_in_box(field, &[b0, b1]) {
                if c.is_zero() {
                    continue;
                }
                let ce = field.embed_int(c);
                if ce[0] <= 0.0 || (ce[0] * ce[1]).abs() > cmax * (1.0 + 1e-12) {
                    continue;
                }
                let (_, p) = units.reduce_mod_multipliers(&ce)?;
                if p[0] != 0 {
                    continue;
                }
                let bounds: Vec<f64> = (0..2)
                    .map(|k| {
                        let other = 1 - k;
                        let cap = height_bound * ny / (ce[other] * ce[other] * z[other].im * z[other].im);
                        (cap - ce[k] * ce[k] * z[k].im * z[k].im).max(0.0).sqrt()
                    })
                    .collect();
                // d ranges over a box centred at −c·x
                let center: Vec<f64> = (0..2).map(|k| -ce[k] * z[k].re).collect();
                let shifted = integrals_in_shifted_box(field, &center, &bounds);
                for d in shifted {
                    let de = field.embed_int(d);
                    let h: f64 = (0..2)
                        .map(|k| ((ce[k] * z[k] + de[k]).norm_sqr()) / z[k].im)
                        .product();
                    if h <= height_bound && ideal_index(field, c, d) == 1 {
                        rows.push((c, d));
                    }
                }
            }
        }
        rows.sort();
        let embedded = rows
            .iter()
            .map(|(c, d)| (field.embed_int(*c), field.embed_int(*d)))
            .collect();
        Ok(EisensteinSum { exponents, rows, height_bound, embedded })
    }

    /// Sums the fixed coset list at `z`.
    pub fn evaluate(&self, z: &Point) -> EisensteinValue {
        let sigma = self.exponents[0].re;
        let mut total = Complex64::new(0.0, 0.0);
        for (ce, de) in &self.embedded {
            let mut term = Complex64::new(1.0, 0.0);
            for k in 0..z.len() {
                let im = z[k].im / (z[k] * ce[k] + de[k]).norm_sqr();
                term *= Complex64::new(im, 0.0).powc(self.exponents[k]);
            }
            total += term;
        }
        let count = self.rows.len() as f64;
        let kappa = count / self.height_bound;
        let tail = kappa * sigma / (sigma - 1.0) * self.height_bound.powf(1.0 - sigma);
        EisensteinValue { value: total, tail_estimate: tail, terms: self.rows.len() }
    }
}

/// `y_k²(∂²_{x_k} + ∂²_{y_k})` of a fixed truncated series at `z`, by centred second
/// differences with step `step`.
pub fn eisenstein_laplacian_fd(sum: &EisensteinSum, z: &Point, k: usize, step: f64) -> Complex64 {
    let at = |dz: Complex64| {
        let mut w = z.clone();
        w[k] += dz;
        sum.evaluate(&w).value
    };
    let centre = at(Complex64::new(0.0, 0.0));
    let h = Complex64::new(step, 0.0);
    let ih = Complex64::new(0.0, step);
    let second = (at(h) + at(-h) + at(ih) + at(-ih) - centre * 4.0) / (step * step);
    second * z[k].im * z[k].im
}

fn integrals_in_shifted_box(field: &FieldEmbedding, center: &[f64], bounds: &[f64]) -> Vec<Integral> {
    let w1 = field.basis_matrix[(0, 1)];
    let w2 = field.basis_matrix[(1, 1)];
    let lo = [center[0] - bounds[0], center[1] - bounds[1]];
    let hi = [center[0] + bounds[0], center[1] + bounds[1]];
    // b = (x1 − x2)/(w1 − w2)
    let bmin = ((lo[0] - hi[1]) / (w1 - w2)).min((hi[0] - lo[1]) / (w1 - w2)).floor() as i64 - 1;
    let bmax = ((lo[0] - hi[1]) / (w1 - w2)).max((hi[0] - lo[1]) / (w1 - w2)).ceil() as i64 + 1;
    let mut out = Vec::new();
    for b in bmin..=bmax {
        let amin = (lo[0] - b as f64 * w1).max(lo[1] - b as f64 * w2).ceil() as i64;
        let amax = (hi[0] - b as f64 * w1).min(hi[1] - b as f64 * w2).floor() as i64;
        for a in amin - 1..=amax + 1 {
            let x = Integral::new(a, b);
            let e = field.embed_int(x);
            if (0..2).all(|k| (e[k] - center[k]).abs() <= bounds[k] + 1e-12) {
                out.push(x);
            }
        }
    }
    out
}

/// Truncated Eisenstein series at the cusp ∞ evaluated by direct summation.
pub fn eisenstein_direct(field: &FieldEmbedding, s: Complex64, m: &[i64], z: &Point, height_bound: f64) -> Result<EisensteinValue> {
    Ok(EisensteinSum::enumerate(field, s, m, z, height_bound)?.evaluate(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_quadratic_field;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    fn random_element(rng: &mut ChaCha8Rng, n: usize) -> GroupElementN {
        let ms: Vec<[f64; 4]> = (0..n)
            .map(|_| {
                let a: f64 = rng.gen_range(0.3..2.0);
                let b: f64 = rng.gen_range(-2.0..2.0);
                let cc: f64 = rng.gen_range(-2.0..2.0);
                [a, b, cc, (1.0 + b * cc) / a]
            })
            .collect();
        GroupElementN::from_coordinates(&ms)
    }

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Point {
        (0..n).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(0.2..3.0))).collect()
    }

    #[test]
    fn action_basics() {
        let z = vec![c(0.3, 1.2), c(-0.7, 0.4)];
        let id = GroupElementN::identity(2);
        assert_eq!(id.act(&z), z);
        let i2 = vec![c(0.0, 1.0); 2];
        let w = GroupElementN::s(2).act(&i2);
        assert!(w.iter().all(|p| (p - c(0.0, 1.0)).norm() < 1e-15));
    }

    #[test]
    fn composition_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g1 = random_element(&mut rng, 2);
            let g2 = random_element(&mut rng, 2);
            let z = random_point(&mut rng, 2);
            let lhs = g1.act(&g2.act(&z));
            let rhs = g1.compose(&g2).act(&z);
            for k in 0..2 {
                assert!((lhs[k] - rhs[k]).norm() < 1e-10 * (1.0 + lhs[k].norm()));
                assert!(lhs[k].im > 0.0);
            }
            let im = z[0].im / (z[0] * g2.c[0] + g2.d[0]).norm_sqr();
            assert!((g2.act(&z)[0].im - im).abs() < 1e-12);
        }
    }

    #[test]
    fn classification_examples() {
        let k = make_quadratic_field(2).unwrap();
        let s = classify(&GroupElementN::s(2), Some(&k)).unwrap();
        assert_eq!(s.kind, ElementKind::TotallyElliptic);
        assert!(s.angles.iter().all(|a| (a - std::f64::consts::FRAC_PI_2).abs() < 1e-12));
        let t = classify(&GroupElementN::t(2), Some(&k)).unwrap();
        assert_eq!(t.kind, ElementKind::TotallyParabolic);
        assert!(matches!(
            classify(&GroupElementN::diagonal_sl2(2, [1.0, 1.0, 0.0, 1.0]), None),
            Err(Error::AmbiguousClassification(_))
        ));
        let u = k.fundamental_unit().unwrap();
        let uinv = k.div_exact(Integral::ONE, u).unwrap();
        let g = GroupElementN::from_exact(&k, [u, Integral::ZERO, Integral::ZERO, uinv]).unwrap();
        let r = classify(&g, Some(&k)).unwrap();
        assert_eq!(r.kind, ElementKind::HyperbolicParabolic);
        let m = r.multiplier.unwrap();
        assert!((m[0] - 5.82842712).abs() < 1e-8 && (m[1] - 0.17157288).abs() < 1e-8);
        for (tr, nn) in g.traces().iter().zip(&r.norms) {
            assert!((tr.abs() - (nn.sqrt() + 1.0 / nn.sqrt())).abs() < 1e-10);
            assert!((tr.abs() - 2.82842712).abs() < 1e-8);
        }
        // trace 1+√2: hyperbolic then elliptic
        let one = Integral::ONE;
        let g = GroupElementN::from_exact(&k, [Integral::new(1, 1), -one, one, Integral::ZERO]).unwrap();
        let r = classify(&g, Some(&k)).unwrap();
        assert_eq!(r.kind, ElementKind::Mixed);
        assert_eq!(r.coordinates, vec![CoordinateKind::Hyperbolic, CoordinateKind::Elliptic]);
        assert!((r.norms[0] - 3.5463).abs() < 1e-3);
        assert!(((2.0 * r.angles[0].cos()).abs() - 0.41421356).abs() < 1e-8);
        let id = classify(&GroupElementN::identity(2), Some(&k)).unwrap();
        assert_eq!(id.kind, ElementKind::Identity);
    }

    #[test]
    fn classification_is_conjugation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = GroupElementN::from_coordinates(&[
            [0.6f64.cos(), 0.6f64.sin(), -0.6f64.sin(), 0.6f64.cos()],
            [2.0, 0.3, 0.0, 0.5],
        ]);
        let r0 = classify(&base, None).unwrap();
        assert_eq!(r0.kind, ElementKind::Mixed);
        for _ in 0..20 {
            let h = random_element(&mut rng, 2);
            let conj = h.compose(&base).compose(&h.inverse());
            let r = classify(&conj, None).unwrap();
            assert!((r.angles[0] - r0.angles[0]).abs() < 1e-8);
            assert!((r.norms[0] - r0.norms[0]).abs() < 1e-8);
        }
    }

    #[test]
    fn kernel_properties() {
        let psi = TestFunction::default_bump(2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = vec![c(0.1, 1.0), c(0.2, 0.8)];
        assert!((kernel_k(&psi, &z, &z) - psi.eval(&[0.0, 0.0])).abs() < 1e-15);
        for _ in 0..50 {
            let z = random_point(&mut rng, 2);
            let w = random_point(&mut rng, 2);
            let g = random_element(&mut rng, 2);
            let a = kernel_k(&psi, &z, &w);
            let b = kernel_k(&psi, &g.act(&z), &g.act(&w));
            assert!((a - b).abs() < 1e-10);
        }
        let far = vec![c(0.0, 100.0), c(0.0, 1.0)];
        assert_eq!(kernel_k(&psi, &z, &far), 0.0);
        assert_eq!(automorphic_kernel_partial(&psi, &[], &z, &z), 0.0);
        let one = automorphic_kernel_partial(&psi, &[GroupElementN::identity(2)], &z, &z);
        assert!((one - psi.eval(&[0.0, 0.0])).abs() < 1e-15);
    }

    #[test]
    fn small_elements() {
        let k = make_quadratic_field(2).unwrap();
        let els = enumerate_group_elements(&k, 1.5).unwrap();
        let has = |g: &GroupElementN| els.iter().any(|e| e.exact == g.exact);
        assert!(has(&GroupElementN::identity(2)));
        assert!(has(&GroupElementN::s(2)));
        assert!(has(&GroupElementN::t(2)));
        assert!(has(&GroupElementN::t(2).inverse()));
        for e in &els {
            let x = e.exact.unwrap();
            assert_eq!(k.mul_int(x[0], x[3]) - k.mul_int(x[1], x[2]), Integral::ONE);
        }
    }

    /// Coefficient-box scan over all four entries, independent of the divisibility shortcut.
    #[test]
    fn enumeration_count_matches_box_scan() {
        let k = make_quadratic_field(2).unwrap();
        let bound = 3.0;
        let mut box_elems = Vec::new();
        for b in -3i64..=3 {
            for a in -7i64..=7 {
                let x = Integral::new(a, b);
                let e = k.embed_int(x);
                if e[0].abs() <= bound && e[1].abs() <= bound {
                    box_elems.push(x);
                }
            }
        }
        let mut set = BTreeSet::new();
        for &a in &box_elems {
            for &b in &box_elems {
                for &cc in &box_elems {
                    for &d in &box_elems {
                        if k.mul_int(a, d) - k.mul_int(b, cc) == Integral::ONE {
                            let first = [a, b, cc, d].into_iter().map(|x| k.embed_int(x)[0]).find(|v| v.abs() > 0.0).unwrap();
                            let e = if first < 0.0 { [-a, -b, -cc, -d] } else { [a, b, cc, d] };
                            set.insert(e);
                        }
                    }
                }
            }
        }
        let els = enumerate_group_elements(&k, bound).unwrap();
        assert_eq!(els.len(), set.len());
        assert!(matches!(enumerate_group_elements_capped(&k, bound, 10), Err(Error::Resource(_))));
    }

    #[test]
    fn kernel_sum_is_stable_once_support_is_covered() {
        let k = make_quadratic_field(2).unwrap();
        let psi = TestFunction::default_bump(2);
        let z = vec![c(0.0, 1.0); 2];
        // ψ vanishes unless a²+b²+c²+d² ≤ 11 in each coordinate
        let small = enumerate_group_elements(&k, 3.4).unwrap();
        let large = enumerate_group_elements(&k, 4.5).unwrap();
        let a = automorphic_kernel_partial(&psi, &small, &z, &z);
        let b = automorphic_kernel_partial(&psi, &large, &z, &z);
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn ideal_index_basics() {
        let k = make_quadratic_field(2).unwrap();
        assert_eq!(ideal_index(&k, Integral::new(2, 0), Integral::new(1, 0)), 1);
        assert_eq!(ideal_index(&k, Integral::new(2, 0), Integral::new(0, 2)), 4);
        assert_eq!(ideal_index(&k, Integral::new(0, 1), Integral::new(2, 0)), 2);
    }

    #[test]
    fn eisenstein_high_in_cusp() {
        let k = make_quadratic_field(2).unwrap();
        let s = c(2.5, 0.0);
        let z = vec![c(0.0, 10.0); 2];
        let e = eisenstein_direct(&k, s, &[0], &z, 2000.0).unwrap();
        let lead = 100f64.powf(2.5);
        assert!(((e.value.re - lead) / lead).abs() < 1e-3);
        assert!(eisenstein_direct(&k, c(1.0, 0.0), &[0], &z, 10.0).is_err());
    }

    #[test]
    fn eisenstein_is_invariant() {
        let k = make_quadratic_field(2).unwrap();
        let s = c(2.5, 0.0);
        let z = vec![c(0.31, 1.12), c(-0.17, 0.93)];
        let base = eisenstein_direct(&k, s, &[0], &z, 400.0).unwrap();
        for g in [GroupElementN::s(2), GroupElementN::t(2)] {
            let moved = eisenstein_direct(&k, s, &[0], &g.act(&z), 400.0).unwrap();
            let gap = (moved.value - base.value).norm();
            assert!(gap <= 10.0 * base.tail_estimate, "{gap} {}", base.tail_estimate);
        }
    }

    #[test]
    fn eisenstein_eigen_equation() {
        let k = make_quadratic_field(2).unwrap();
        let s = c(2.5, 0.0);
        let z = vec![c(0.0, 1.0); 2];
        let sum = EisensteinSum::enumerate(&k, s, &[0], &z, 400.0).unwrap();
        let e = sum.evaluate(&z).value;
        for j in 0..2 {
            let lap = eisenstein_laplacian_fd(&sum, &z, j, 1e-3);
            let eig = sum.exponents[j] * (sum.exponents[j] - 1.0);
            assert!(((lap - eig * e) / (eig * e)).norm() < 1e-3, "{lap} {}", eig * e);
        }
    }
}
