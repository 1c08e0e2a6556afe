//! Root moduli over a circle `|z| = e^x`, shared by the amoeba and Ronkin code.

use num_complex::Complex64;

use crate::bivariate::BivariatePolynomial;
use crate::numerics::roots_warm;

/// The `w`-roots of `P(e^{x+iφ}, w)` as `φ` varies, with warm starts.
///
/// Requires the `w^d` coefficient to be the nonzero constant `p0d`.
pub(crate) struct Fiber {
    // scaled[j][i] = p_ij e^{ix}
    scaled: Vec<Vec<f64>>,
    coeffs: Vec<Complex64>,
    roots: Vec<Complex64>,
    logs: Vec<f64>,
}

impl Fiber {
    pub(crate) fn new(p: &BivariatePolynomial, x: f64) -> Self {
        let d = p.d();
        assert!(p.coeff(0, d) != 0.0, "w^d coefficient must be nonzero");
        let scaled = (0..=d).map(|j| (0..=d - j).map(|i| p.coeff(i, j) * (i as f64 * x).exp()).collect()).collect();
        Fiber { scaled, coeffs: vec![Complex64::new(0.0, 0.0); d + 1], roots: Vec::new(), logs: vec![0.0; d] }
    }

    /// Roots at angle `phi`, unsorted.
    pub(crate) fn roots_at(&mut self, phi: f64) -> &[Complex64] {
        let u = Complex64::from_polar(1.0, phi);
        for (c, row) in self.coeffs.iter_mut().zip(&self.scaled) {
            *c = row.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &v| acc * u + v);
        }
        roots_warm(&self.coeffs, &mut self.roots);
        &self.roots
    }

    /// `log|w_k|` at angle `phi`, ascending.
    pub(crate) fn logs_at(&mut self, phi: f64) -> &[f64] {
        self.roots_at(phi);
        for (l, r) in self.logs.iter_mut().zip(&self.roots) {
            *l = r.norm().ln();
        }
        self.logs.sort_by(f64::total_cmp);
        &self.logs
    }

    /// Number of roots with `log|w| < y` at angle `phi`.
    pub(crate) fn count_below(&mut self, phi: f64, y: f64) -> usize {
        self.logs_at(phi).iter().filter(|&&l| l < y).count()
    }

    /// `Σ_k max(y, log|w_k|)` at angle `phi`.
    pub(crate) fn jensen_sum(&mut self, phi: f64, y: f64) -> f64 {
        self.logs_at(phi).iter().map(|&l| l.max(y)).sum()
    }
}

/// Angles in `[a, b]` where the count of roots below `y` changes, located
/// by bisection to `tol`. Only changes visible between the endpoints are
/// found; several changes inside one bracket are split recursively.
#[allow(clippy::too_many_arguments)]
pub(crate) fn count_changes(
    fiber: &mut Fiber,
    y: f64,
    a: f64,
    na: usize,
    b: f64,
    nb: usize,
    tol: f64,
    out: &mut Vec<f64>,
) {
    if na == nb {
        return;
    }
    if b - a <= tol {
        out.push(0.5 * (a + b));
        return;
    }
    let m = 0.5 * (a + b);
    let nm = fiber.count_below(m, y);
    count_changes(fiber, y, a, na, m, nm, tol, out);
    count_changes(fiber, y, m, nm, b, nb, tol, out);
}
