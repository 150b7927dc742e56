//! Embedded lattices, multiplier groups, Grössencharacters, unit-orbit
//! quotients and cusp coordinates.

use crate::error::{Error, Result};
use crate::field::FieldEmbedding;
use crate::modgroup::{GroupElementN, Point};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Full-rank lattice `A·ℤⁿ ⊂ ℝⁿ`; the columns of `basis` are the basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedLattice {
    pub basis: DMatrix<f64>,
    pub covolume: f64,
}

impl EmbeddedLattice {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::Domain("lattice basis must be square".into()));
        }
        let det = basis.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Domain("lattice basis is singular".into()));
        }
        Ok(EmbeddedLattice { basis, covolume: det.abs() })
    }

    /// The ring of integers embedded through the basis matrix.
    pub fn ring_of_integers(field: &FieldEmbedding) -> Self {
        EmbeddedLattice::new(field.basis_matrix.clone()).expect("integral basis is invertible")
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn point(&self, coords: &[i64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|k| (0..n).map(|j| self.basis[(k, j)] * coords[j] as f64).sum())
            .collect()
    }

    /// Real coordinates of `v` in the lattice basis.
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        let inv = self.basis.clone().try_inverse().expect("checked at construction");
        (inv * DVector::from_column_slice(v)).iter().copied().collect()
    }

    /// `L* = (A⁻¹)ᵀ ℤⁿ`.
    pub fn dual(&self) -> EmbeddedLattice {
        let inv = self.basis.clone().try_inverse().expect("checked at construction");
        EmbeddedLattice::new(inv.transpose()).expect("inverse is invertible")
    }

    pub fn scaled(&self, c: f64) -> EmbeddedLattice {
        EmbeddedLattice::new(&self.basis * c).expect("nonzero scale")
    }

    /// No lattice vector with coordinates bounded by 20 has a vanishing embedding.
    pub fn is_zeta_eligible(&self) -> bool {
        let n = self.dim();
        if n != 2 {
            return true;
        }
        for a in -20i64..=20 {
            for b in -20i64..=20 {
                if a == 0 && b == 0 {
                    continue;
                }
                let p = self.point(&[a, b]);
                if p.iter().any(|x| x.abs() < 1e-9) {
                    return false;
                }
            }
        }
        true
    }

    /// Integer matrix of coordinate-wise multiplication by `u` in the lattice basis.
    pub fn multiplication_matrix(&self, u: &[f64]) -> Result<Vec<Vec<i64>>> {
        let inv = self.basis.clone().try_inverse().expect("checked at construction");
        let m = inv * DMatrix::from_diagonal(&DVector::from_column_slice(u)) * &self.basis;
        let n = self.dim();
        let mut out = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let r = m[(i, j)].round();
                if (m[(i, j)] - r).abs() > 1e-6 {
                    return Err(Error::Inconsistency(format!(
                        "multiplication by {u:?} does not preserve the lattice (entry {})",
                        m[(i, j)]
                    )));
                }
                out[i][j] = r as i64;
            }
        }
        Ok(out)
    }
}

pub fn covolume(l: &EmbeddedLattice) -> f64 {
    l.covolume
}

pub fn dual_lattice(l: &EmbeddedLattice) -> EmbeddedLattice {
    l.dual()
}

pub fn vector_norm(v: &[f64]) -> f64 {
    v.iter().product()
}

/// Rank-(n−1) group of totally positive norm-one multipliers.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierGroup {
    pub generators: Vec<Vec<f64>>,
    pub e_matrix: DMatrix<f64>,
    pub e_inverse: DMatrix<f64>,
    pub det_e: f64,
}

impl MultiplierGroup {
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let n = generators.len() + 1;
        for g in &generators {
            if g.len() != n {
                return Err(Error::Domain("generator length must equal rank + 1".into()));
            }
            if g.iter().any(|x| *x <= 0.0) {
                return Err(Error::Domain("generators must be totally positive".into()));
            }
            if (vector_norm(g) - 1.0).abs() > 1e-10 {
                return Err(Error::Domain(format!("generator {g:?} does not have norm 1")));
            }
        }
        let mut e = DMatrix::zeros(n, n);
        for k in 0..n {
            e[(k, 0)] = 1.0;
            for (j, g) in generators.iter().enumerate() {
                e[(k, j + 1)] = g[k].ln();
            }
        }
        let det_e = e.determinant();
        let e_inverse = e
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Domain("multiplier logarithms are dependent".into()))?;
        Ok(MultiplierGroup { generators, e_matrix: e, e_inverse, det_e })
    }

    /// Squares of units of the field.
    pub fn for_field(field: &FieldEmbedding) -> Result<Self> {
        MultiplierGroup::new(vec![field.fundamental_totally_positive_unit()?])
    }

    /// The group generated by the squares of the generators.
    pub fn squared(&self) -> MultiplierGroup {
        MultiplierGroup::new(
            self.generators
                .iter()
                .map(|g| g.iter().map(|x| x * x).collect())
                .collect(),
        )
        .expect("squares of valid generators are valid")
    }

    pub fn degree(&self) -> usize {
        self.e_matrix.nrows()
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `e_j^{(k)}`: entry `(j+1, k)` of the inverse of the log matrix.
    pub fn e_coeff(&self, j: usize, k: usize) -> f64 {
        self.e_inverse[(j + 1, k)]
    }

    /// Coordinates of `log y` along the generator logarithms (the mean direction dropped).
    pub fn log_coordinates(&self, logs: &[f64]) -> Vec<f64> {
        (0..self.rank())
            .map(|j| (0..self.degree()).map(|k| self.e_coeff(j, k) * logs[k]).sum())
            .collect()
    }

    /// `λ_m(y) = exp(2πi Σ_k Σ_j m_j e_j^{(k)} log y_k)`.
    pub fn lambda_character(&self, m: &[i64], y: &[f64]) -> Result<Complex64> {
        if y.iter().any(|v| *v <= 0.0) {
            return Err(Error::Domain("character needs positive arguments".into()));
        }
        let logs: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        Ok(self.lambda_from_logs(m, &logs))
    }

    pub fn lambda_from_logs(&self, m: &[i64], logs: &[f64]) -> Complex64 {
        let t = self.log_coordinates(logs);
        let phase: f64 = m.iter().zip(&t).map(|(mj, tj)| *mj as f64 * tj).sum();
        Complex64::from_polar(1.0, 2.0 * PI * phase)
    }

    /// `s_k = s + Σ_j 2πi m_j e_j^{(k)}`.
    pub fn exponents_from(&self, s: Complex64, m: &[i64]) -> Vec<Complex64> {
        (0..self.degree())
            .map(|k| {
                let im: f64 = m
                    .iter()
                    .enumerate()
                    .map(|(j, mj)| 2.0 * PI * *mj as f64 * self.e_coeff(j, k))
                    .sum();
                s + Complex64::new(0.0, im)
            })
            .collect()
    }

    /// Coordinate-wise product `ε^p ⊙ v`.
    pub fn apply_powers(&self, v: &[f64], powers: &[i64]) -> Vec<f64> {
        let mut out = v.to_vec();
        for (g, p) in self.generators.iter().zip(powers) {
            for k in 0..out.len() {
                out[k] *= g[k].powi(*p as i32);
            }
        }
        out
    }

    fn reduce_with(&self, v: &[f64], offset: f64) -> Result<(Vec<f64>, Vec<i64>)> {
        if v.iter().any(|x| *x == 0.0 || !x.is_finite()) {
            return Err(Error::Domain("cannot reduce a vector with a zero coordinate".into()));
        }
        let logs: Vec<f64> = v.iter().map(|x| x.abs().ln()).collect();
        let t = self.log_coordinates(&logs);
        let powers: Vec<i64> = t
            .iter()
            .map(|tj| {
                let shifted = tj + offset;
                let r = shifted.round();
                let snapped = if (shifted - r).abs() < 1e-9 { r } else { shifted };
                -(snapped.floor() as i64)
            })
            .collect();
        Ok((self.apply_powers(v, &powers), powers))
    }

    /// Moves `v` so that its log-projection lies in the half-open cell `[0,1)^{n−1}`.
    pub fn reduce_mod_multipliers(&self, v: &[f64]) -> Result<(Vec<f64>, Vec<i64>)> {
        self.reduce_with(v, 0.0)
    }

    /// As [`Self::reduce_mod_multipliers`] but for the centered cell `[−½,½)^{n−1}`.
    pub fn reduce_centered(&self, v: &[f64]) -> Result<(Vec<f64>, Vec<i64>)> {
        self.reduce_with(v, 0.5)
    }
}

/// Smith normal form `U·M·V = D` of a small integer matrix, with `U⁻¹` tracked.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<i128>,
    pub u: Vec<Vec<i128>>,
    pub u_inv: Vec<Vec<i128>>,
}

pub fn smith_normal_form(m: &[Vec<i64>]) -> SmithForm {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|x| *x as i128).collect()).collect();
    let id = |n: usize| -> Vec<Vec<i128>> {
        (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
    };
    let mut u = id(n);
    let mut u_inv = id(n);
    // row op: row_i += c·row_j  (U ← E·U, U⁻¹ ← U⁻¹·E⁻¹)
    let row_add = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, ui: &mut Vec<Vec<i128>>, i: usize, j: usize, c: i128| {
        for k in 0..n {
            a[i][k] += c * a[j][k];
            u[i][k] += c * u[j][k];
            ui[k][j] -= c * ui[k][i];
        }
    };
    let row_swap = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, ui: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        a.swap(i, j);
        u.swap(i, j);
        for row in ui.iter_mut() {
            row.swap(i, j);
        }
    };
    let row_neg = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, ui: &mut Vec<Vec<i128>>, i: usize| {
        for k in 0..n {
            a[i][k] = -a[i][k];
            u[i][k] = -u[i][k];
            ui[k][i] = -ui[k][i];
        }
    };
    for t in 0..n {
        loop {
            // smallest nonzero pivot in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            row_swap(&mut a, &mut u, &mut u_inv, t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    row_add(&mut a, &mut u, &mut u_inv, i, t, -q);
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    for row in a.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility condition on the trailing block
            let mut fixed = true;
            'outer: for i in t + 1..n {
                for j in t + 1..n {
                    if a[i][j] % a[t][t] != 0 {
                        row_add(&mut a, &mut u, &mut u_inv, t, i, 1);
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if a[t][t] < 0 {
            row_neg(&mut a, &mut u, &mut u_inv, t);
        }
    }
    SmithForm { diagonal: (0..n).map(|i| a[i][i]).collect(), u, u_inv }
}

/// Order of `L/(u−1)L`.
pub fn quotient_size(l: &EmbeddedLattice, u: &[f64]) -> Result<u64> {
    let um1: Vec<f64> = u.iter().map(|x| x - 1.0).collect();
    if um1.iter().any(|x| x.abs() < 1e-12) {
        return Err(Error::Domain("u − 1 has a zero coordinate".into()));
    }
    let m = l.multiplication_matrix(&um1)?;
    let snf = smith_normal_form(&m);
    let size: i128 = snf.diagonal.iter().product();
    let float_size = vector_norm(&um1).abs();
    if (size as f64 - float_size).abs() > 1e-6 * float_size.max(1.0) {
        return Err(Error::Inconsistency(format!(
            "Smith form size {size} disagrees with |N(u−1)| = {float_size}"
        )));
    }
    Ok(size as u64)
}

/// A class of `L/(u−1)L` up to the multiplier action, with its orbit size.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientClass {
    pub coords: Vec<i64>,
    pub point: Vec<f64>,
    pub orbit_size: u64,
}

fn mat_vec(m: &[Vec<i128>], x: &[i128]) -> Vec<i128> {
    m.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

/// Orbits of the multiplier generators acting on `L/(u−1)L`.
pub fn quotient_reps_mod_units(l: &EmbeddedLattice, u: &[f64], group: &MultiplierGroup) -> Result<Vec<QuotientClass>> {
    let size = quotient_size(l, u)?;
    let um1: Vec<f64> = u.iter().map(|x| x - 1.0).collect();
    let snf = smith_normal_form(&l.multiplication_matrix(&um1)?);
    let diag = snf.diagonal.clone();
    let key_of = |x: &[i128]| -> Vec<i128> {
        mat_vec(&snf.u, x)
            .iter()
            .zip(&diag)
            .map(|(y, d)| y.rem_euclid(*d))
            .collect()
    };
    let actions: Vec<Vec<Vec<i128>>> = group
        .generators
        .iter()
        .map(|g| {
            l.multiplication_matrix(g)
                .map(|m| m.iter().map(|r| r.iter().map(|x| *x as i128).collect()).collect())
        })
        .collect::<Result<_>>()?;
    // enumerate all classes as mixed-radix keys
    let mut all_keys: Vec<Vec<i128>> = vec![vec![]];
    for d in &diag {
        let mut next = Vec::new();
        for k in &all_keys {
            for r in 0..*d {
                let mut kk = k.clone();
                kk.push(r);
                next.push(kk);
            }
        }
        all_keys = next;
    }
    if all_keys.len() as u64 != size {
        return Err(Error::Inconsistency("class enumeration size mismatch".into()));
    }
    let mut seen: BTreeMap<Vec<i128>, bool> = BTreeMap::new();
    let mut out = Vec::new();
    for key in &all_keys {
        if seen.contains_key(key) {
            continue;
        }
        let rep = mat_vec(&snf.u_inv, key);
        let mut orbit = vec![rep.clone()];
        seen.insert(key.clone(), true);
        let mut frontier = vec![rep.clone()];
        let mut steps = 0u64;
        while let Some(x) = frontier.pop() {
            for act in &actions {
                let y = mat_vec(act, &x);
                let ky = key_of(&y);
                if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(ky) {
                    e.insert(true);
                    orbit.push(y.clone());
                    frontier.push(y);
                }
            }
            steps += 1;
            if steps > size {
                return Err(Error::Inconsistency("orbit did not close".into()));
            }
        }
        let coords: Vec<i64> = rep.iter().map(|x| *x as i64).collect();
        out.push(QuotientClass {
            point: l.point(&coords),
            coords,
            orbit_size: orbit.len() as u64,
        });
    }
    let total: u64 = out.iter().map(|c| c.orbit_size).sum();
    if total != size {
        return Err(Error::Inconsistency(format!("orbit sizes sum to {total}, expected {size}")));
    }
    Ok(out)
}

/// Data attached to a cusp: scaling element, translation lattice and multipliers.
#[derive(Clone, Debug)]
pub struct CuspFrame {
    pub scaling_element: GroupElementN,
    pub lattice: EmbeddedLattice,
    pub multipliers: MultiplierGroup,
}

/// Coordinates `(X, Y₀, Y)` of a point relative to a cusp frame.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspCoordinates {
    pub x: Vec<f64>,
    pub y0: f64,
    pub y: Vec<f64>,
}

impl CuspFrame {
    /// The cusp at infinity of the Hilbert modular group.
    pub fn infinity(field: &FieldEmbedding) -> Result<Self> {
        Ok(CuspFrame {
            scaling_element: GroupElementN::identity(field.degree),
            lattice: EmbeddedLattice::ring_of_integers(field),
            multipliers: MultiplierGroup::for_field(field)?,
        })
    }

    pub fn coordinates(&self, z: &Point) -> Result<CuspCoordinates> {
        if z.iter().any(|w| w.im <= 0.0) {
            return Err(Error::Domain("point is not in the upper half-space".into()));
        }
        let w = self.scaling_element.inverse().act(z);
        let xs: Vec<f64> = w.iter().map(|c| c.re).collect();
        let ys: Vec<f64> = w.iter().map(|c| c.im).collect();
        let logs: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
        Ok(CuspCoordinates {
            x: self.lattice.coordinates(&xs),
            y0: vector_norm(&ys),
            y: self.multipliers.log_coordinates(&logs),
        })
    }

    /// Inverse of [`Self::coordinates`].
    pub fn point_from(&self, c: &CuspCoordinates) -> Point {
        let n = self.lattice.dim();
        let xs: Vec<f64> = (0..n)
            .map(|k| (0..n).map(|j| self.lattice.basis[(k, j)] * c.x[j]).sum())
            .collect();
        let mean = c.y0.ln() / n as f64;
        let ys: Vec<f64> = (0..n)
            .map(|k| {
                let mut l = mean;
                for (j, g) in self.multipliers.generators.iter().enumerate() {
                    l += c.y[j] * g[k].ln();
                }
                l.exp()
            })
            .collect();
        let w: Point = xs.iter().zip(&ys).map(|(x, y)| Complex64::new(*x, *y)).collect();
        self.scaling_element.act(&w)
    }
}

pub fn cusp_coordinates(frame: &CuspFrame, z: &Point) -> Result<CuspCoordinates> {
    frame.coordinates(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_quadratic_field;
    use proptest::prelude::*;

    fn q2() -> (FieldEmbedding, EmbeddedLattice, MultiplierGroup) {
        let k = make_quadratic_field(2).unwrap();
        let l = EmbeddedLattice::ring_of_integers(&k);
        let m = MultiplierGroup::for_field(&k).unwrap();
        (k, l, m)
    }

    #[test]
    fn dual_examples() {
        let id = EmbeddedLattice::new(DMatrix::identity(2, 2)).unwrap();
        assert!((id.dual().basis.clone() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-15);
        assert_eq!(covolume(&id), 1.0);
        let (_, l, _) = q2();
        let d = l.dual();
        let expect = [0.5, 0.5, 0.35355339, -0.35355339];
        let got = [d.basis[(0, 0)], d.basis[(1, 0)], d.basis[(0, 1)], d.basis[(1, 1)]];
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-8);
        }
        assert!((l.covolume * d.covolume - 1.0).abs() < 1e-12);
        assert!((d.dual().covolume - l.covolume).abs() < 1e-12);
        assert!((l.covolume - 2.82842712).abs() < 1e-8);
        let k5 = make_quadratic_field(5).unwrap();
        assert!((EmbeddedLattice::ring_of_integers(&k5).covolume - 2.23606798).abs() < 1e-8);
    }

    #[test]
    fn norms() {
        assert_eq!(vector_norm(&[1.0, 1.0]), 1.0);
        assert!((vector_norm(&[5.82842712474619, 0.1715728752538099]) - 1.0).abs() < 1e-10);
        let r = 2f64.sqrt();
        assert!((vector_norm(&[2.0 + 2.0 * r, 2.0 - 2.0 * r]) + 4.0).abs() < 1e-12);
    }

    #[test]
    fn e_matrix_values() {
        let (_, _, m) = q2();
        let closed = 1.0 / (2.0 * (3.0 + 2.0 * 2f64.sqrt()).ln());
        assert!((m.e_coeff(0, 0) - closed).abs() < 1e-12);
        assert!((m.e_coeff(0, 0) - 0.28364816).abs() < 1e-8);
        assert!((m.det_e.abs() - 3.52549434).abs() < 1e-8);
        let prod = &m.e_matrix * &m.e_inverse;
        assert!((prod - DMatrix::<f64>::identity(2, 2)).norm() < 1e-10);
        let logs: f64 = m.generators[0].iter().map(|x| x.ln()).sum();
        assert!(logs.abs() < 1e-10);
        let k5 = make_quadratic_field(5).unwrap();
        let m5 = MultiplierGroup::for_field(&k5).unwrap();
        assert!((m5.det_e.abs() - 1.92484730).abs() < 1e-8);
    }

    #[test]
    fn character_examples() {
        let (_, _, m) = q2();
        assert_eq!(m.lambda_character(&[0], &[3.0, 0.2]).unwrap(), Complex64::new(1.0, 0.0));
        let v = m.lambda_character(&[1], &[2.0, 1.0]).unwrap();
        let phase = 2.0 * PI * 2f64.ln() / (2.0 * (3.0 + 2.0 * 2f64.sqrt()).ln());
        assert!((v - Complex64::from_polar(1.0, phase)).norm() < 1e-12);
        assert!((v - Complex64::new(0.32920, 0.94426)).norm() < 1e-5);
        for mm in -3..=3 {
            let v = m.lambda_character(&[mm], &m.generators[0]).unwrap();
            assert!((v - 1.0).norm() < 1e-12);
        }
        assert!(m.lambda_character(&[1], &[-1.0, 1.0]).is_err());
    }

    #[test]
    fn exponent_examples() {
        let (_, _, m) = q2();
        let s = Complex64::new(0.5, 0.0);
        assert_eq!(m.exponents_from(s, &[0]), vec![s, s]);
        let e = m.exponents_from(s, &[1]);
        assert!((e[0] - Complex64::new(0.5, 1.78221)).norm() < 1e-5);
        assert!((e[1] - Complex64::new(0.5, -1.78221)).norm() < 1e-5);
    }

    #[test]
    fn reduction_examples() {
        let (_, _, m) = q2();
        let (rep, p) = m.reduce_mod_multipliers(&[11.65685425, 0.34314575]).unwrap();
        assert_eq!(p, vec![-1]);
        assert!((rep[0] - 2.0).abs() < 1e-7 && (rep[1] - 2.0).abs() < 1e-7);
        let (rep2, p2) = m.reduce_mod_multipliers(&[2.0, 2.0]).unwrap();
        assert_eq!(p2, vec![0]);
        assert_eq!(rep2, vec![2.0, 2.0]);
        let w = [2.1, 1.3];
        let v = m.apply_powers(&w, &[1]);
        let (rep, p) = m.reduce_mod_multipliers(&v).unwrap();
        assert_eq!(p, vec![-1]);
        assert!((rep[0] - w[0]).abs() < 1e-10 && (rep[1] - w[1]).abs() < 1e-10);
        assert!(m.reduce_mod_multipliers(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn snf_small() {
        let s = smith_normal_form(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(s.diagonal, vec![2, 4]);
        let s = smith_normal_form(&[vec![0, 0], vec![0, 3]]);
        assert_eq!(s.diagonal, vec![3, 0]);
        let s = smith_normal_form(&[vec![4, 0], vec![0, 6]]);
        assert_eq!(s.diagonal, vec![2, 12]);
    }

    #[test]
    fn quotient_examples() {
        let (k, l, m) = q2();
        let e = k.fundamental_totally_positive_unit().unwrap();
        assert_eq!(quotient_size(&l, &e).unwrap(), 4);
        let e2: Vec<f64> = e.iter().map(|x| x * x).collect();
        assert_eq!(quotient_size(&l, &e2).unwrap(), 32);
        let classes = quotient_reps_mod_units(&l, &e, &m).unwrap();
        assert_eq!(classes.iter().map(|c| c.orbit_size).sum::<u64>(), 4);
        assert!(classes.iter().any(|c| c.coords == vec![0, 0] && c.orbit_size >= 1));
        let k5 = make_quadratic_field(5).unwrap();
        let l5 = EmbeddedLattice::ring_of_integers(&k5);
        let m5 = MultiplierGroup::for_field(&k5).unwrap();
        let e5 = k5.fundamental_totally_positive_unit().unwrap();
        assert_eq!(quotient_size(&l5, &e5).unwrap(), 1);
        let c5 = quotient_reps_mod_units(&l5, &e5, &m5).unwrap();
        assert_eq!(c5.len(), 1);
        assert_eq!(c5[0].orbit_size, 1);
    }

    /// Orbit sizes found by brute force over a coefficient box modulo (u−1)L.
    #[test]
    fn orbit_sizes_match_enumeration() {
        let (k, l, m) = q2();
        let u = k.multiplier_generator().unwrap();
        let um1 = u - crate::field::Integral::ONE;
        let same_class = |x: crate::field::Integral, y: crate::field::Integral| k.div_exact(x - y, um1).is_some();
        let mut reps: Vec<crate::field::Integral> = Vec::new();
        for a in -3..=3 {
            for b in -3..=3 {
                let x = crate::field::Integral::new(a, b);
                if !reps.iter().any(|r| same_class(*r, x)) {
                    reps.push(x);
                }
            }
        }
        assert_eq!(reps.len(), 4);
        let mut sizes = Vec::new();
        let mut done = [false; 4];
        for i in 0..4 {
            if done[i] {
                continue;
            }
            let mut size = 0;
            let mut x = reps[i];
            loop {
                let j = reps.iter().position(|r| same_class(*r, x)).unwrap();
                if done[j] {
                    break;
                }
                done[j] = true;
                size += 1;
                x = k.mul_int(u, x);
            }
            sizes.push(size);
        }
        sizes.sort();
        let e = k.fundamental_totally_positive_unit().unwrap();
        let mut got: Vec<u64> = quotient_reps_mod_units(&l, &e, &m).unwrap().iter().map(|c| c.orbit_size).collect();
        got.sort();
        assert_eq!(got, sizes);
    }

    #[test]
    fn cusp_coordinate_examples() {
        let k = make_quadratic_field(2).unwrap();
        let f = CuspFrame::infinity(&k).unwrap();
        let c = f.coordinates(&vec![Complex64::new(0.0, 1.0); 2]).unwrap();
        assert!(c.x.iter().all(|x| x.abs() < 1e-15));
        assert!((c.y0 - 1.0).abs() < 1e-15 && c.y[0].abs() < 1e-15);
        let c = f.coordinates(&vec![Complex64::new(0.0, 2.0), Complex64::new(0.0, 0.5)]).unwrap();
        assert!((c.y0 - 1.0).abs() < 1e-14);
        assert!((c.y[0] - 0.39321985).abs() < 1e-8);
        let z = vec![Complex64::new(1.0, 1.0); 2];
        let c = f.coordinates(&z).unwrap();
        assert!((c.x[0] - 1.0).abs() < 1e-12 && c.x[1].abs() < 1e-12);
        let back = f.point_from(&c);
        assert!(back.iter().zip(&z).all(|(a, b)| (a - b).norm() < 1e-10));
        assert!(f.coordinates(&vec![Complex64::new(0.0, -1.0); 2]).is_err());
    }

    #[test]
    fn dual_is_multiplier_invariant() {
        use rand::{Rng, SeedableRng};
        let (_, l, m) = q2();
        let d = l.dual();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c = [rng.gen_range(-20..=20), rng.gen_range(-20..=20)];
            let v = d.point(&c);
            let w: Vec<f64> = v.iter().zip(&m.generators[0]).map(|(a, b)| a * b).collect();
            let coords = d.coordinates(&w);
            assert!(coords.iter().all(|x| (x - x.round()).abs() < 1e-8));
        }
    }

    proptest! {
        #[test]
        fn character_is_multiplicative(a in 0.1f64..10.0, b in 0.1f64..10.0, c in 0.1f64..10.0, d in 0.1f64..10.0, mm in -4i64..4) {
            let (_, _, m) = q2();
            let lhs = m.lambda_character(&[mm], &[a * c, b * d]).unwrap();
            let rhs = m.lambda_character(&[mm], &[a, b]).unwrap() * m.lambda_character(&[mm], &[c, d]).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-10);
            prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn reduction_idempotent_norm_preserving(a in 0.01f64..100.0, b in 0.01f64..100.0, sa in prop::bool::ANY, sb in prop::bool::ANY) {
            let (_, _, m) = q2();
            let v = [if sa { a } else { -a }, if sb { b } else { -b }];
            let (rep, _) = m.reduce_mod_multipliers(&v).unwrap();
            prop_assert!((vector_norm(&rep) - vector_norm(&v)).abs() <= 1e-10 * vector_norm(&v).abs().max(1.0));
            let (rep2, p2) = m.reduce_mod_multipliers(&rep).unwrap();
            prop_assert_eq!(p2, vec![0]);
            prop_assert!(rep2.iter().zip(&rep).all(|(x, y)| (x - y).abs() < 1e-12 * x.abs().max(1.0)));
            let mean: Vec<f64> = rep.iter().map(|x| x.abs().ln()).collect();
            let t = m.log_coordinates(&mean)[0];
            prop_assert!((-1e-9..1.0).contains(&t));
        }

        #[test]
        fn exponents_average_to_s(re in -2.0f64..3.0, im in -5.0f64..5.0, mm in -5i64..5) {
            let (_, _, m) = q2();
            let s = Complex64::new(re, im);
            let e = m.exponents_from(s, &[mm]);
            let mean = (e[0] + e[1]) / 2.0;
            prop_assert!((mean - s).norm() < 1e-10);
        }
    }
}
