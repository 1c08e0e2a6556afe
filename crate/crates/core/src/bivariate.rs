//! Real bivariate polynomials supported on the Newton triangle `i + j <= d`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePolynomial {
    d: usize,
    // (i, j) stored at tri_index(d, i, j)
    coeffs: Vec<f64>,
}

#[inline]
fn tri_index(d: usize, i: usize, j: usize) -> usize {
    // rows of constant i hold d - i + 1 entries
    i * (d + 1) - i * (i.saturating_sub(1)) / 2 + j
}

/// One monomial coefficient, the JSON representation of a term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyFile {
    d: usize,
    coeffs: Vec<Term>,
}

impl BivariatePolynomial {
    pub fn zero(d: usize) -> Self {
        BivariatePolynomial { d, coeffs: vec![0.0; (d + 1) * (d + 2) / 2] }
    }

    /// Builds a polynomial from `(i, j, v)` terms; repeated monomials add up.
    pub fn from_terms(d: usize, terms: &[(usize, usize, f64)]) -> Result<Self> {
        let mut p = Self::zero(d);
        for &(i, j, v) in terms {
            if i + j > d {
                return Err(Error::invalid(format!("monomial z^{i} w^{j} outside the triangle of side {d}")));
            }
            if !v.is_finite() {
                return Err(Error::invalid("non-finite coefficient"));
            }
            p.coeffs[tri_index(d, i, j)] += v;
        }
        Ok(p)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.d {
            0.0
        } else {
            self.coeffs[tri_index(self.d, i, j)]
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, v: f64) {
        assert!(i + j <= self.d, "monomial outside the Newton triangle");
        self.coeffs[tri_index(self.d, i, j)] = v;
    }

    /// Nonzero terms ordered by `i`, then `j`.
    pub fn terms(&self) -> Vec<Term> {
        let mut out = Vec::new();
        for i in 0..=self.d {
            for j in 0..=self.d - i {
                let v = self.coeff(i, j);
                if v != 0.0 {
                    out.push(Term { i, j, v });
                }
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        BivariatePolynomial { d: self.d, coeffs: self.coeffs.iter().map(|v| v * s).collect() }
    }

    /// Representative with `p00 = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let p00 = self.coeff(0, 0);
        if p00 == 0.0 {
            return Err(Error::invalid("constant coefficient vanishes"));
        }
        Ok(self.scaled(1.0 / p00))
    }

    /// `P(sz z, sw w)`.
    pub fn substitute_scale(&self, sz: f64, sw: f64) -> Self {
        let mut out = self.clone();
        for i in 0..=self.d {
            for j in 0..=self.d - i {
                let idx = tri_index(self.d, i, j);
                out.coeffs[idx] *= sz.powi(i as i32) * sw.powi(j as i32);
            }
        }
        out
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in (0..=self.d).rev() {
            acc = acc * w + self.w_coeff_at(j, z);
        }
        acc
    }

    pub fn eval_real(&self, z: f64, w: f64) -> f64 {
        let mut acc = 0.0;
        for j in (0..=self.d).rev() {
            let mut q = 0.0;
            for i in (0..=self.d - j).rev() {
                q = q * z + self.coeff(i, j);
            }
            acc = acc * w + q;
        }
        acc
    }

    /// `(P, dP/dz, dP/dw)` at a real point.
    pub fn eval_real_with_gradient(&self, z: f64, w: f64) -> (f64, f64, f64) {
        let (mut p, mut pz, mut pw) = (0.0, 0.0, 0.0);
        for i in 0..=self.d {
            for j in 0..=self.d - i {
                let v = self.coeff(i, j);
                if v == 0.0 {
                    continue;
                }
                let zi = z.powi(i as i32);
                let wj = w.powi(j as i32);
                p += v * zi * wj;
                if i > 0 {
                    pz += v * i as f64 * z.powi(i as i32 - 1) * wj;
                }
                if j > 0 {
                    pw += v * j as f64 * zi * w.powi(j as i32 - 1);
                }
            }
        }
        (p, pz, pw)
    }

    /// Second derivatives `(P_zz, P_zw, P_ww)` at a real point.
    pub fn hessian_real(&self, z: f64, w: f64) -> (f64, f64, f64) {
        let (mut hzz, mut hzw, mut hww) = (0.0, 0.0, 0.0);
        for t in self.terms() {
            let (i, j) = (t.i as i32, t.j as i32);
            if i >= 2 {
                hzz += t.v * (i * (i - 1)) as f64 * z.powi(i - 2) * w.powi(j);
            }
            if i >= 1 && j >= 1 {
                hzw += t.v * (i * j) as f64 * z.powi(i - 1) * w.powi(j - 1);
            }
            if j >= 2 {
                hww += t.v * (j * (j - 1)) as f64 * z.powi(i) * w.powi(j - 2);
            }
        }
        (hzz, hzw, hww)
    }

    /// Sum of `|p_ij| |z|^i |w|^j`, the natural scale for residuals at `(z, w)`.
    pub fn abs_scale(&self, z: f64, w: f64) -> f64 {
        let (az, aw) = (z.abs(), w.abs());
        let mut s = 0.0;
        for i in 0..=self.d {
            for j in 0..=self.d - i {
                s += self.coeff(i, j).abs() * az.powi(i as i32) * aw.powi(j as i32);
            }
        }
        s
    }

    #[inline]
    fn w_coeff_at(&self, j: usize, z: Complex64) -> Complex64 {
        let mut q = Complex64::new(0.0, 0.0);
        for i in (0..=self.d - j).rev() {
            q = q * z + self.coeff(i, j);
        }
        q
    }

    /// Coefficients of `w ↦ P(z, w)` in ascending powers of `w`.
    pub fn w_poly_at(&self, z: Complex64) -> Vec<Complex64> {
        (0..=self.d).map(|j| self.w_coeff_at(j, z)).collect()
    }

    /// Coefficients of `z ↦ P(z, w)` in ascending powers of `z`.
    pub fn z_poly_at(&self, w: Complex64) -> Vec<Complex64> {
        (0..=self.d)
            .map(|i| {
                let mut q = Complex64::new(0.0, 0.0);
                for j in (0..=self.d - i).rev() {
                    q = q * w + self.coeff(i, j);
                }
                q
            })
            .collect()
    }

    /// The polynomial with `z` and `w` exchanged.
    pub fn swapped(&self) -> Self {
        let mut out = Self::zero(self.d);
        for t in self.terms() {
            out.set_coeff(t.j, t.i, t.v);
        }
        out
    }

    /// `u^d P(1/u, v/u)`, the chart in which the tentacles at infinity
    /// point towards `u -> 0`. Log coordinates map as `(x, y) -> (-x, y - x)`.
    pub fn diagonal_chart(&self) -> Self {
        let mut out = Self::zero(self.d);
        for t in self.terms() {
            out.set_coeff(self.d - t.i - t.j, t.j, t.v);
        }
        out
    }

    /// Lattice points strictly inside the triangle.
    pub fn interior_points(&self) -> Vec<(usize, usize)> {
        let d = self.d;
        let mut out = Vec::new();
        for i in 1..d {
            for j in 1..d {
                if i + j < d {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Lattice points on the boundary of the triangle.
    pub fn boundary_lattice_points(&self) -> Vec<(usize, usize)> {
        let d = self.d;
        let mut out = Vec::new();
        for i in 0..=d {
            for j in 0..=d - i {
                if i == 0 || j == 0 || i + j == d {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(PolyFile { d: self.d, coeffs: self.terms() }).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: PolyFile = serde_json::from_str(s)?;
        let terms: Vec<_> = f.coeffs.iter().map(|t| (t.i, t.j, t.v)).collect();
        Self::from_terms(f.d, &terms)
    }
}

impl Serialize for BivariatePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyFile { d: self.d, coeffs: self.terms() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BivariatePolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let f = PolyFile::deserialize(de)?;
        let terms: Vec<_> = f.coeffs.iter().map(|t| (t.i, t.j, t.v)).collect();
        Self::from_terms(f.d, &terms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> BivariatePolynomial {
        BivariatePolynomial::from_terms(1, &[(0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn triangular_indexing_is_a_bijection() {
        for d in 0..7 {
            let mut seen = vec![false; (d + 1) * (d + 2) / 2];
            for i in 0..=d {
                for j in 0..=d - i {
                    let k = tri_index(d, i, j);
                    assert!(!seen[k]);
                    seen[k] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn evaluation_agrees_across_forms() {
        let p = BivariatePolynomial::from_terms(2, &[(0, 0, 1.0), (1, 0, -2.0), (2, 0, 1.0), (1, 1, 3.0), (0, 2, 0.5)])
            .unwrap();
        let (z, w) = (Complex64::new(0.3, -1.1), Complex64::new(-0.7, 0.4));
        let direct = p.eval(z, w);
        let via_w = crate::numerics::horner(&p.w_poly_at(z), w);
        let via_z = crate::numerics::horner(&p.z_poly_at(w), z);
        assert!((direct - via_w).norm() < 1e-14);
        assert!((direct - via_z).norm() < 1e-14);
        let (v, gz, gw) = p.eval_real_with_gradient(0.4, -1.3);
        assert!((v - p.eval_real(0.4, -1.3)).abs() < 1e-14);
        let h = 1e-6;
        assert!((gz - (p.eval_real(0.4 + h, -1.3) - p.eval_real(0.4 - h, -1.3)) / (2.0 * h)).abs() < 1e-8);
        assert!((gw - (p.eval_real(0.4, -1.3 + h) - p.eval_real(0.4, -1.3 - h)) / (2.0 * h)).abs() < 1e-8);
    }

    #[test]
    fn rejects_terms_outside_triangle() {
        assert!(BivariatePolynomial::from_terms(1, &[(1, 1, 1.0)]).is_err());
    }

    #[test]
    fn lattice_points() {
        let p = BivariatePolynomial::zero(4);
        assert_eq!(p.interior_points(), vec![(1, 1), (1, 2), (2, 1)]);
        assert_eq!(p.boundary_lattice_points().len(), 12);
        assert!(line().interior_points().is_empty());
    }

    #[test]
    fn json_round_trip() {
        let p = line().substitute_scale(2.0, 3.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"d":1,"coeffs":[{"i":0,"j":0,"v":1.0},{"i":0,"j":1,"v":3.0},{"i":1,"j":0,"v":2.0}]}"#);
        assert_eq!(BivariatePolynomial::from_json_str(&s).unwrap(), p);
    }
}
