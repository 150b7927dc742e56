//! Serialization helpers: complex numbers are written as `{re, im}` objects.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexPair {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexPair {
    fn from(z: Complex64) -> Self {
        ComplexPair { re: z.re, im: z.im }
    }
}

pub fn complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    ComplexPair::from(*z).serialize(s)
}

pub fn complex_vec<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    let pairs: Vec<ComplexPair> = v.iter().map(|z| ComplexPair::from(*z)).collect();
    pairs.serialize(s)
}
