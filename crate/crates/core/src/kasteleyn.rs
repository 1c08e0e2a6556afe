//! The Kasteleyn operator, its characteristic polynomial and boundary points.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};
use crate::lattice::{zigzag_product, EdgeWeights, Orientation, ZigZagCycle};
use crate::numerics::{det_complex, ComplexPoly};

const INTERPOLATION_TOL: f64 = 1e-9;
const BOUNDARY_IMAG_TOL: f64 = 1e-8;

/// Weighted adjacency matrix with Bloch multipliers.
///
/// Rows are white vertices and columns black vertices, both indexed
/// `y*d + x`. No sign twist is needed on the honeycomb.
pub fn assemble_k(w: &EdgeWeights, z: Complex64, wv: Complex64) -> DMatrix<Complex64> {
    let d = w.d();
    let mut k = DMatrix::zeros(d * d, d * d);
    for y in 0..d {
        for x in 0..d {
            let row = w.index(x, y);
            k[(row, w.index(x, y))] += Complex64::new(w.c(x, y), 0.0);
            let za = if x == d - 1 { z } else { Complex64::new(1.0, 0.0) };
            k[(row, w.index(x + 1, y))] += za * w.a(x, y);
            let wb = if y == d - 1 { wv } else { Complex64::new(1.0, 0.0) };
            k[(row, w.index(x, y + 1))] += wb * w.b(x, y);
        }
    }
    k
}

/// `det K(z, w)`.
pub fn spectral_det(w: &EdgeWeights, z: Complex64, wv: Complex64) -> Complex64 {
    det_complex(&assemble_k(w, z, wv))
}

fn geometric_mean_abs(v: &[f64]) -> f64 {
    (v.iter().map(|x| x.abs().ln()).sum::<f64>() / v.len() as f64).exp()
}

/// Recovers `P(z, w) = det K(z, w)` by sampling on a grid of roots of unity
/// and inverting the 2-D discrete Fourier transform.
///
/// The result is normalized to `p00 > 0` (sign only). Coefficients below
/// `1e-13 * max|p|` are snapped to zero.
pub fn characteristic_polynomial(w: &EdgeWeights) -> Result<BivariatePolynomial> {
    let d = w.d();
    let (p, residual) = interpolate(w, 1.0, 1.0)?;
    let p = match p {
        Some(p) => p,
        None => {
            // dynamic range too wide at unit radii: balance |z| and |w|
            let horizontal: Vec<f64> = (0..d)
                .map(|i| zigzag_product(w, ZigZagCycle { orientation: Orientation::Horizontal, index: i }))
                .collect::<Result<_>>()?;
            let vertical: Vec<f64> = (0..d)
                .map(|i| zigzag_product(w, ZigZagCycle { orientation: Orientation::Vertical, index: i }))
                .collect::<Result<_>>()?;
            let (rz, rw) = (geometric_mean_abs(&horizontal), geometric_mean_abs(&vertical));
            match interpolate(w, rz, rw)? {
                (Some(p), _) => p,
                (None, _) => return Err(Error::InterpolationInconsistency { residual, threshold: INTERPOLATION_TOL }),
            }
        }
    };
    Ok(p)
}

// Ok((None, _)) signals a dynamic range above 1e12 at these radii.
fn interpolate(w: &EdgeWeights, rz: f64, rw: f64) -> Result<(Option<BivariatePolynomial>, f64)> {
    let d = w.d();
    let n = d + 1;
    let root = |k: usize| Complex64::from_polar(1.0, TAU * k as f64 / n as f64);
    let samples: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (k, l) = (idx / n, idx % n);
            spectral_det(w, root(k) * rz, root(l) * rw)
        })
        .collect();
    let max = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let min = samples.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    let wide = min == 0.0 || max / min > 1e12;

    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, row) in coeffs.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    acc += samples[k * n + l] * root((n * n - (i * k + j * l) % n) % n);
                }
            }
            *out = acc / (n * n) as f64 / (rz.powi(i as i32) * rw.powi(j as i32));
        }
    }
    let cmax = coeffs.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    let threshold = INTERPOLATION_TOL * cmax;
    let mut residual: f64 = 0.0;
    for (i, row) in coeffs.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            residual = residual.max(c.im.abs());
            if i + j > d {
                residual = residual.max(c.re.abs());
            }
        }
    }
    if residual > threshold {
        if wide {
            return Ok((None, residual / cmax));
        }
        return Err(Error::InterpolationInconsistency { residual: residual / cmax, threshold: INTERPOLATION_TOL });
    }
    let mut p = BivariatePolynomial::zero(d);
    for (i, row) in coeffs.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            if i + j <= d && c.re.abs() > 1e-13 * cmax {
                p.set_coeff(i, j, c.re);
            }
        }
    }
    if p.coeff(0, 0) < 0.0 {
        p = p.scaled(-1.0);
    }
    Ok((Some(p), residual / cmax))
}

/// The `3d` intersection points of the curve with the coordinate lines.
///
/// Each list holds `d` real values with multiplicity, sorted ascending:
/// `on_w0` are the `z` roots of `P(z, 0)`, `on_z0` the `w` roots of
/// `P(0, w)` and `at_inf` the ratios `z/w` of the points at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoints {
    pub on_w0: Vec<f64>,
    pub on_z0: Vec<f64>,
    pub at_inf: Vec<f64>,
}

fn real_roots(coeffs: &[f64], what: &str) -> Result<Vec<f64>> {
    let poly = ComplexPoly::from_real_exact(coeffs);
    if poly.degree() != Some(coeffs.len() - 1) {
        return Err(Error::invalid(format!("{what}: corner coefficient vanishes")));
    }
    let mut out = Vec::new();
    for cl in poly.clustered_roots()? {
        let r = cl.value;
        if r.im.abs() > BOUNDARY_IMAG_TOL * r.norm().max(1.0) {
            return Err(Error::NonHarnackBoundary(format!("{what} has a complex root {r}")));
        }
        out.extend(std::iter::repeat_n(r.re, cl.multiplicity));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

pub fn boundary_points(p: &BivariatePolynomial) -> Result<BoundaryPoints> {
    let d = p.d();
    if d == 0 {
        return Err(Error::invalid("constant polynomial has no boundary points"));
    }
    if p.coeff(0, 0) == 0.0 || p.coeff(d, 0) == 0.0 || p.coeff(0, d) == 0.0 {
        return Err(Error::invalid("corner coefficients p00, pd0, p0d must be nonzero"));
    }
    let on_w0: Vec<f64> = (0..=d).map(|i| p.coeff(i, 0)).collect();
    let on_z0: Vec<f64> = (0..=d).map(|j| p.coeff(0, j)).collect();
    let at_inf: Vec<f64> = (0..=d).map(|i| p.coeff(i, d - i)).collect();
    Ok(BoundaryPoints {
        on_w0: real_roots(&on_w0, "P(z,0)")?,
        on_z0: real_roots(&on_z0, "P(0,w)")?,
        at_inf: real_roots(&at_inf, "leading form")?,
    })
}

/// One boundary point computed twice: from its zig-zag cycle and as a root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMatch {
    pub cycle: ZigZagCycle,
    pub zigzag: f64,
    pub root: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    /// Matches in canonical order: on `{w=0}`, on `{z=0}`, at infinity,
    /// each family sorted by value.
    pub matches: Vec<BoundaryMatch>,
    pub max_relative_error: f64,
    pub pass: bool,
}

/// Compares the boundary roots of the characteristic polynomial with the
/// zig-zag products, pairing sorted values within each family.
pub fn verify_boundary_vs_zigzag(w: &EdgeWeights) -> Result<BoundaryReport> {
    let p = characteristic_polynomial(w)?;
    let bp = boundary_points(&p)?;
    let d = w.d();
    let mut matches = Vec::with_capacity(3 * d);
    let mut max_rel: f64 = 0.0;
    for (orientation, roots) in
        [(Orientation::Horizontal, &bp.on_w0), (Orientation::Vertical, &bp.on_z0), (Orientation::NwSe, &bp.at_inf)]
    {
        let mut zz: Vec<(usize, f64)> = (0..d)
            .map(|index| zigzag_product(w, ZigZagCycle { orientation, index }).map(|v| (index, v)))
            .collect::<Result<_>>()?;
        zz.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        for ((index, v), &r) in zz.into_iter().zip(roots.iter()) {
            max_rel = max_rel.max((v - r).abs() / v.abs());
            matches.push(BoundaryMatch { cycle: ZigZagCycle { orientation, index }, zigzag: v, root: r });
        }
    }
    Ok(BoundaryReport { matches, max_relative_error: max_rel, pass: max_rel < 1e-8 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{apply_gauge, apply_magnetic_field, GaugeVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_by_one_operator() {
        let w = EdgeWeights::constant(1, 2.0, 3.0, 5.0).unwrap();
        let (z, wv) = (c(0.3, 0.2), c(-1.0, 0.5));
        let k = assemble_k(&w, z, wv);
        assert_eq!(k.shape(), (1, 1));
        assert!((k[(0, 0)] - (5.0 + 2.0 * z + 3.0 * wv)).norm() < 1e-15);
        assert!((assemble_k(&EdgeWeights::uniform(1), c(1.0, 0.0), c(1.0, 0.0))[(0, 0)] - 3.0).norm() < 1e-15);
    }

    #[test]
    fn uniform_d2_row_sums() {
        let k = assemble_k(&EdgeWeights::uniform(2), c(1.0, 0.0), c(1.0, 0.0));
        for r in 0..4 {
            let s: Complex64 = k.row(r).iter().sum();
            assert!((s - 3.0).norm() < 1e-15);
        }
    }

    #[test]
    fn d1_polynomials() {
        let p = characteristic_polynomial(&EdgeWeights::uniform(1)).unwrap();
        let expect = BivariatePolynomial::from_terms(1, &[(0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(p.terms().len(), 3);
        for t in expect.terms() {
            assert!((p.coeff(t.i, t.j) - t.v).abs() < 1e-12);
        }
        let p = characteristic_polynomial(&EdgeWeights::constant(1, 2.0, 3.0, 5.0).unwrap()).unwrap();
        assert!((p.coeff(0, 0) - 5.0).abs() < 1e-12);
        assert!((p.coeff(1, 0) - 2.0).abs() < 1e-12);
        assert!((p.coeff(0, 1) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_d2_expansion() {
        let p = characteristic_polynomial(&EdgeWeights::uniform(2)).unwrap();
        let expect = [(0, 0, 1.0), (1, 0, -2.0), (2, 0, 1.0), (0, 1, -2.0), (1, 1, -2.0), (0, 2, 1.0)];
        for (i, j, v) in expect {
            assert!((p.coeff(i, j) - v).abs() < 1e-12, "p{i}{j} = {}", p.coeff(i, j));
        }
    }

    #[test]
    fn determinant_matches_polynomial_off_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..5 {
            let w = EdgeWeights::random(d, &mut rng);
            let p = characteristic_polynomial(&w).unwrap();
            for _ in 0..5 {
                let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let wv = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let det = spectral_det(&w, z, wv);
                let val = p.eval(z, wv);
                // equal up to the sign fixed by p00 > 0
                let err = (det - val).norm().min((det + val).norm());
                assert!(err < 1e-9 * det.norm().max(val.norm()).max(1.0));
            }
        }
    }

    #[test]
    fn boundary_of_line() {
        let p = BivariatePolynomial::from_terms(1, &[(0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0)]).unwrap();
        let b = boundary_points(&p).unwrap();
        assert_eq!((b.on_w0.clone(), b.on_z0.clone(), b.at_inf.clone()), (vec![-1.0], vec![-1.0], vec![-1.0]));
    }

    #[test]
    fn boundary_d1_weighted() {
        let w = EdgeWeights::constant(1, 2.0, 3.0, 5.0).unwrap();
        let b = boundary_points(&characteristic_polynomial(&w).unwrap()).unwrap();
        assert!((b.on_w0[0] + 2.5).abs() < 1e-12);
        let h = zigzag_product(&w, ZigZagCycle { orientation: Orientation::Horizontal, index: 0 }).unwrap();
        assert!((b.on_w0[0] - h).abs() < 1e-12);
    }

    #[test]
    fn uniform_d2_double_boundary_root() {
        let b = boundary_points(&characteristic_polynomial(&EdgeWeights::uniform(2)).unwrap()).unwrap();
        for list in [&b.on_w0, &b.on_z0, &b.at_inf] {
            assert_eq!(list.len(), 2);
            for v in list.iter() {
                assert!((v - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn complex_boundary_is_rejected() {
        let p = BivariatePolynomial::from_terms(2, &[(0, 0, 1.0), (2, 0, 1.0), (0, 2, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(boundary_points(&p), Err(Error::NonHarnackBoundary(_))));
    }

    #[test]
    fn zigzag_agreement_random_d3() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let r = verify_boundary_vs_zigzag(&EdgeWeights::random(3, &mut rng)).unwrap();
            assert!(r.pass, "{}", r.max_relative_error);
            assert_eq!(r.matches.len(), 9);
        }
    }

    #[test]
    fn gauge_invariance_of_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for d in 1..5 {
            let w = EdgeWeights::random(d, &mut rng);
            let g = GaugeVector::random(d, &mut rng);
            let p = characteristic_polynomial(&w).unwrap().normalized().unwrap();
            let q = characteristic_polynomial(&apply_gauge(&w, &g).unwrap()).unwrap().normalized().unwrap();
            for t in p.terms() {
                assert!((t.v - q.coeff(t.i, t.j)).abs() < 1e-10 * t.v.abs().max(1.0));
            }
        }
    }

    #[test]
    fn magnetic_field_rescales_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = EdgeWeights::random(3, &mut rng);
        let (bx, by) = (0.7, -0.4);
        let p = characteristic_polynomial(&w).unwrap().normalized().unwrap();
        let q = characteristic_polynomial(&apply_magnetic_field(&w, bx, by)).unwrap().normalized().unwrap();
        for t in p.terms() {
            let expect = t.v * (t.i as f64 * bx + t.j as f64 * by).exp();
            assert!((q.coeff(t.i, t.j) - expect).abs() < 1e-10 * expect.abs().max(1.0));
        }
    }
}
