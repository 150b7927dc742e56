//! Real quadratic fields: integral basis, embeddings, exact arithmetic and units.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_rational::Rational64;
use serde::Serialize;

/// A totally real field given by the embedding matrix of an integral basis.
///
/// Row `k` of `basis_matrix` holds the `k`-th embedding of the basis, so that
/// column `j` lists the embeddings of the `j`-th basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldEmbedding {
    pub degree: usize,
    pub radicand: i64,
    pub basis_matrix: DMatrix<f64>,
    pub discriminant: i64,
}

/// An element of the field in integral-basis coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub coeffs: Vec<Rational64>,
}

/// An element `a + b·ω` of the ring of integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Integral {
    pub a: i64,
    pub b: i64,
}

impl Integral {
    pub const ZERO: Integral = Integral { a: 0, b: 0 };
    pub const ONE: Integral = Integral { a: 1, b: 0 };

    pub const fn new(a: i64, b: i64) -> Self {
        Integral { a, b }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
}

impl std::ops::Add for Integral {
    type Output = Integral;
    fn add(self, o: Integral) -> Integral {
        Integral::new(self.a + o.a, self.b + o.b)
    }
}

impl std::ops::Sub for Integral {
    type Output = Integral;
    fn sub(self, o: Integral) -> Integral {
        Integral::new(self.a - o.a, self.b - o.b)
    }
}

impl std::ops::Neg for Integral {
    type Output = Integral;
    fn neg(self) -> Integral {
        Integral::new(-self.a, -self.b)
    }
}

fn is_squarefree(d: i64) -> bool {
    let mut p = 2;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Builds `Q(√d)` with basis `{1, √d}` or `{1, (1+√d)/2}` according to `d mod 4`.
pub fn make_quadratic_field(d: i64) -> Result<FieldEmbedding> {
    if d < 2 {
        return Err(Error::InvalidField(format!("d = {d} must be at least 2")));
    }
    if !is_squarefree(d) {
        return Err(Error::InvalidField(format!("d = {d} is not squarefree")));
    }
    let r = (d as f64).sqrt();
    let (w1, w2, disc) = if d % 4 == 1 {
        ((1.0 + r) / 2.0, (1.0 - r) / 2.0, d)
    } else {
        (r, -r, 4 * d)
    };
    Ok(FieldEmbedding {
        degree: 2,
        radicand: d,
        basis_matrix: DMatrix::from_row_slice(2, 2, &[1.0, w1, 1.0, w2]),
        discriminant: disc,
    })
}

impl FieldEmbedding {
    /// `ω² = p + q·ω`.
    fn omega_relation(&self) -> (i64, i64) {
        if self.radicand % 4 == 1 {
            ((self.radicand - 1) / 4, 1)
        } else {
            (self.radicand, 0)
        }
    }

    /// Trace of `ω`.
    pub fn omega_trace(&self) -> i64 {
        self.omega_relation().1
    }

    pub fn embed(&self, x: &FieldElement) -> Vec<f64> {
        (0..self.degree)
            .map(|k| {
                (0..self.degree)
                    .map(|j| self.basis_matrix[(k, j)] * rat_to_f64(x.coeffs[j]))
                    .sum()
            })
            .collect()
    }

    pub fn embed_int(&self, x: Integral) -> Vec<f64> {
        (0..2)
            .map(|k| x.a as f64 + x.b as f64 * self.basis_matrix[(k, 1)])
            .collect()
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let (p, q) = self.omega_relation();
        let (a, b) = (x.coeffs[0], x.coeffs[1]);
        let (c, e) = (y.coeffs[0], y.coeffs[1]);
        let be = b * e;
        FieldElement {
            coeffs: vec![a * c + be * p, a * e + b * c + be * q],
        }
    }

    pub fn mul_int(&self, x: Integral, y: Integral) -> Integral {
        let (p, q) = self.omega_relation();
        let be = x.b * y.b;
        Integral::new(x.a * y.a + be * p, x.a * y.b + x.b * y.a + be * q)
    }

    pub fn conj_int(&self, x: Integral) -> Integral {
        let q = self.omega_trace();
        Integral::new(x.a + x.b * q, -x.b)
    }

    pub fn norm_int(&self, x: Integral) -> i64 {
        let (p, q) = self.omega_relation();
        x.a * x.a + x.a * x.b * q - p * x.b * x.b
    }

    pub fn trace_int(&self, x: Integral) -> i64 {
        2 * x.a + x.b * self.omega_trace()
    }

    /// Exact quotient `x / y` when it lies in the ring of integers.
    pub fn div_exact(&self, x: Integral, y: Integral) -> Option<Integral> {
        let n = self.norm_int(y);
        if n == 0 {
            return None;
        }
        let t = self.mul_int(x, self.conj_int(y));
        if t.a % n == 0 && t.b % n == 0 {
            Some(Integral::new(t.a / n, t.b / n))
        } else {
            None
        }
    }

    pub fn is_unit(&self, x: Integral) -> bool {
        self.norm_int(x).abs() == 1
    }

    /// Fundamental unit `> 1` of the ring of integers, from the continued fraction of `ω`.
    pub fn fundamental_unit(&self) -> Result<Integral> {
        if self.degree != 2 {
            return Err(Error::UnsupportedDegree(self.degree));
        }
        let d = self.radicand;
        let tr = self.omega_trace();
        // ω = (P + √d) / Q with Q | d − P²
        let (mut pp, mut qq) = if tr == 1 { (1i64, 2i64) } else { (0, 1) };
        let sd = (d as f64).sqrt();
        let (mut h0, mut h1) = (0i64, 1i64);
        let (mut k0, mut k1) = (1i64, 0i64);
        for _ in 0..200 {
            let a = ((pp as f64 + sd) / qq as f64).floor() as i64;
            let h2 = a * h1 + h0;
            let k2 = a * k1 + k0;
            h0 = h1;
            h1 = h2;
            k0 = k1;
            k1 = k2;
            let cand = Integral::new(h1 - tr * k1, k1);
            if self.is_unit(cand) {
                let v = self.embed_int(cand)[0];
                return Ok(if v > 0.0 { cand } else { -cand });
            }
            pp = a * qq - pp;
            qq = (d - pp * pp) / qq;
        }
        Err(Error::Inconsistency("continued fraction did not reach a unit".into()))
    }

    /// Generator of the squares of units; it is totally positive.
    pub fn multiplier_generator(&self) -> Result<Integral> {
        let u = self.fundamental_unit()?;
        Ok(self.mul_int(u, u))
    }

    /// Embedded generator `ε` of the multiplier group (squares of units).
    pub fn fundamental_totally_positive_unit(&self) -> Result<Vec<f64>> {
        Ok(self.embed_int(self.multiplier_generator()?))
    }

    /// Human-readable label such as `Q(sqrt 2)`.
    pub fn label(&self) -> String {
        format!("Q(sqrt {})", self.radicand)
    }

    /// Formats `a + b·ω` with the basis symbol spelled out.
    pub fn format_int(&self, x: Integral) -> String {
        let w = if self.omega_trace() == 1 {
            format!("(1+sqrt{})/2", self.radicand)
        } else {
            format!("sqrt{}", self.radicand)
        };
        match (x.a, x.b) {
            (a, 0) => a.to_string(),
            (0, b) => format!("{b}*{w}"),
            (a, b) if b < 0 => format!("{a}-{}*{w}", -b),
            (a, b) => format!("{a}+{b}*{w}"),
        }
    }
}

fn rat_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl FieldElement {
    pub fn from_ints(a: i64, b: i64) -> Self {
        FieldElement { coeffs: vec![Rational64::from_integer(a), Rational64::from_integer(b)] }
    }

    pub fn to_integral(&self) -> Option<Integral> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(Integral::new(self.coeffs[0].to_integer(), self.coeffs[1].to_integer()))
        } else {
            None
        }
    }
}

/// Parses `Q(sqrt D)` (spaces optional) into the radicand.
pub fn parse_field_label(s: &str) -> Result<i64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = t
        .strip_prefix("Q(sqrt")
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::InvalidField(format!("expected Q(sqrt D), got {s:?}")))?;
    inner
        .parse::<i64>()
        .map_err(|_| Error::InvalidField(format!("bad radicand in {s:?}")))
}
