//! Univariate complex polynomials and simultaneous root finding.

use num_complex::Complex64;

use crate::error::{Error, Result};

const TRIM_RELATIVE: f64 = 1e-14;
const MAX_ABERTH_ITERATIONS: usize = 200;

/// Polynomial with complex coefficients in ascending degree order.
///
/// Trailing coefficients below `1e-14 * max|coeff|` are trimmed on
/// construction, so the stored leading coefficient is always significant.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while let Some(last) = coeffs.last() {
            if last.norm() <= TRIM_RELATIVE * max || max == 0.0 {
                coeffs.pop();
            } else {
                break;
            }
        }
        ComplexPoly { coeffs }
    }

    /// Drops only exactly-zero trailing coefficients. For polynomials whose
    /// leading coefficient is structurally nonzero but may be tiny next to
    /// the others.
    pub fn exact(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    pub fn from_real_exact(coeffs: &[f64]) -> Self {
        Self::exact(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Degree after trimming; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    /// `max|coeff| * max(1,|r|)^deg`, the scale residuals are measured against.
    pub fn residual_scale(&self, r: Complex64) -> f64 {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let deg = self.coeffs.len().saturating_sub(1) as i32;
        max * r.norm().max(1.0).powi(deg)
    }

    /// All roots with multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        solve_stored(&self.coeffs)
    }

    pub fn derivative(&self) -> ComplexPoly {
        ComplexPoly { coeffs: (1..self.coeffs.len()).map(|k| self.coeffs[k] * k as f64).collect() }
    }

    /// Roots merged by [`cluster_roots`], each multiple root then refined by
    /// Newton's method on the derivative of order `m-1`, where it is simple.
    pub fn clustered_roots(&self) -> Result<Vec<ClusteredRoot>> {
        let mut clusters = cluster_roots(&self.roots()?);
        for cl in clusters.iter_mut().filter(|c| c.multiplicity > 1) {
            let mut q = self.clone();
            for _ in 1..cl.multiplicity {
                q = q.derivative();
            }
            let dq = q.derivative();
            let mut r = cl.value;
            for _ in 0..8 {
                let step = q.eval(r) / dq.eval(r);
                if !step.is_finite() || step.norm() > 1e-2 * r.norm().max(1.0) {
                    break;
                }
                r -= step;
                if step.norm() <= 4.0 * f64::EPSILON * r.norm().max(1.0) {
                    break;
                }
            }
            cl.value = r;
        }
        Ok(clusters)
    }
}

#[inline]
pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

#[inline]
fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of `coeffs[0] + coeffs[1] z + ...`, with multiplicity.
///
/// Degrees one and two are solved in closed form; higher degrees use
/// Aberth-Ehrlich iteration started on a circle of the geometric-mean root
/// radius (capped by the Cauchy bound) followed by a
/// Newton polish of every root.
pub fn roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    ComplexPoly::new(coeffs.to_vec()).roots()
}

/// [`roots`] without the relative trimming: every nonzero coefficient
/// counts, so the degree is that of the last nonzero entry.
pub fn roots_exact(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    ComplexPoly::exact(coeffs.to_vec()).roots()
}

fn solve_stored(c: &[Complex64]) -> Result<Vec<Complex64>> {
    match c.len() {
        0 => Err(Error::ZeroPolynomial),
        1 => Err(Error::invalid("constant polynomial has no roots")),
        _ => {
            // zero roots factor out exactly
            let zeros = c.iter().take_while(|v| v.norm() == 0.0).count();
            let mut out = vec![Complex64::new(0.0, 0.0); zeros];
            let rest = &c[zeros..];
            let mut guesses = Vec::new();
            solve_nonzero(rest, &mut guesses);
            out.extend(guesses);
            Ok(out)
        }
    }
}

/// Like [`roots`] but refines `guesses` in place, using them as starting
/// points when they have the right length. Used for continuation sweeps
/// where consecutive polynomials are close.
///
/// `coeffs` must have a nonzero leading coefficient.
pub fn roots_warm(coeffs: &[Complex64], guesses: &mut Vec<Complex64>) {
    solve_nonzero(coeffs, guesses);
}

fn solve_nonzero(c: &[Complex64], guesses: &mut Vec<Complex64>) {
    let deg = c.len() - 1;
    match deg {
        0 => guesses.clear(),
        1 => {
            guesses.clear();
            guesses.push(-c[0] / c[1]);
        }
        2 => {
            guesses.clear();
            let (r1, r2) = quadratic(c[0], c[1], c[2]);
            guesses.push(r1);
            guesses.push(r2);
        }
        _ => {
            if guesses.len() != deg || guesses.iter().any(|g| !g.is_finite()) {
                initial_guesses(c, guesses);
            }
            aberth(c, guesses);
        }
    }
}

fn quadratic(c0: Complex64, c1: Complex64, c2: Complex64) -> (Complex64, Complex64) {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    let s1 = c1 + disc;
    let s2 = c1 - disc;
    let q = if s1.norm() >= s2.norm() { -0.5 * s1 } else { -0.5 * s2 };
    if q.norm() == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    (q / c2, c0 / q)
}

fn initial_guesses(c: &[Complex64], guesses: &mut Vec<Complex64>) {
    let deg = c.len() - 1;
    let lead = c[deg].norm();
    // Cauchy bound: 1 + max |c_i / c_n|
    let cauchy = 1.0 + c[..deg].iter().map(|v| v.norm() / lead).fold(0.0, f64::max);
    // the geometric-mean radius is usually much closer to the root moduli;
    // keep the Cauchy bound as the ceiling
    let mean = (c[0].norm() / lead).powf(1.0 / deg as f64);
    let radius = if mean > 0.0 && mean.is_finite() { mean.min(cauchy) } else { cauchy };
    guesses.clear();
    for k in 0..deg {
        let angle = std::f64::consts::TAU * k as f64 / deg as f64 + 0.4;
        guesses.push(Complex64::from_polar(radius, angle));
    }
}

fn aberth(c: &[Complex64], z: &mut [Complex64]) {
    let n = z.len();
    let deriv: Vec<Complex64> = (1..c.len()).map(|k| c[k] * k as f64).collect();
    let abs_coeffs: Vec<f64> = c.iter().map(|v| v.norm()).collect();
    let mut frozen = vec![false; n];
    for _ in 0..MAX_ABERTH_ITERATIONS {
        let mut converged = true;
        for k in 0..n {
            if frozen[k] {
                continue;
            }
            let zk = z[k];
            let p = horner(c, zk);
            // below the Horner roundoff bound the iterate is as good as it gets
            let bound = abs_coeffs.iter().rev().fold(0.0, |acc, &a| acc * zk.norm() + a);
            if p.norm() <= 4.0 * f64::EPSILON * bound {
                frozen[k] = true;
                continue;
            }
            let dp = horner(&deriv, zk);
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != k {
                    let diff = zk - zj;
                    if diff.norm() > 0.0 {
                        sum += diff.inv();
                    }
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !step.is_finite() {
                continue;
            }
            z[k] = zk - step;
            if step.norm() > 4.0 * f64::EPSILON * zk.norm().max(f64::MIN_POSITIVE) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    // one Newton polish per root
    for zk in z.iter_mut() {
        let (p, dp) = horner_with_derivative(c, *zk);
        if dp.norm() > 0.0 {
            let step = p / dp;
            if step.is_finite() && step.norm() < 1e-6 * zk.norm().max(1.0) {
                *zk -= step;
            }
        }
    }
}

/// A root together with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusteredRoot {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Merges numerically multiple roots.
///
/// An `m`-fold root computed in double precision is smeared over a disc of
/// radius about `eps^(1/m)`, so the merge radius depends on the multiplicity
/// being tested: for `m` from the largest candidate down to 2, single-linkage
/// components at distance `max(1e-6, 10 eps^(1/m)) * max(1,|r|)` that contain
/// exactly `m` unassigned roots are merged. The centroid of a smeared group is
/// accurate to roughly machine precision.
pub fn cluster_roots(roots: &[Complex64]) -> Vec<ClusteredRoot> {
    let n = roots.len();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for m in (2..=n).rev() {
        let tol_rel = (10.0 * f64::EPSILON.powf(1.0 / m as f64)).max(1e-6);
        for comp in linkage_components(roots, &assigned, tol_rel) {
            if comp.len() == m {
                let value = comp.iter().map(|&i| roots[i]).sum::<Complex64>() / m as f64;
                for &i in &comp {
                    assigned[i] = true;
                }
                out.push(ClusteredRoot { value, multiplicity: m });
            }
        }
    }
    for (i, r) in roots.iter().enumerate() {
        if !assigned[i] {
            out.push(ClusteredRoot { value: *r, multiplicity: 1 });
        }
    }
    out
}

fn linkage_components(roots: &[Complex64], skip: &[bool], tol_rel: f64) -> Vec<Vec<usize>> {
    let n = roots.len();
    let mut seen = skip.to_vec();
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut k = 0;
        while k < comp.len() {
            let ri = roots[comp[k]];
            for j in 0..n {
                if !seen[j] {
                    let rj = roots[j];
                    let scale = ri.norm().max(rj.norm()).max(1.0);
                    if (ri - rj).norm() < tol_rel * scale {
                        seen[j] = true;
                        comp.push(j);
                    }
                }
            }
            k += 1;
        }
        comps.push(comp);
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn z_squared_plus_one() {
        let r = sorted_re(roots(&[c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap());
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn double_root_within_sqrt_eps() {
        // (z-1)^2 = 1 - 2z + z^2
        let r = ComplexPoly::from_real(&[1.0, -2.0, 1.0]).roots().unwrap();
        assert_eq!(r.len(), 2);
        for root in &r {
            assert!((root - c(1.0, 0.0)).norm() < 1e-5);
        }
        let cl = cluster_roots(&r);
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].multiplicity, 2);
        assert!((cl[0].value - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn linear() {
        let r = ComplexPoly::from_real(&[3.0, 2.0]).roots().unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(-1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert!(matches!(roots(&[c(0.0, 0.0), c(0.0, 0.0)]), Err(Error::ZeroPolynomial)));
        assert!(ComplexPoly::from_real(&[2.0]).roots().is_err());
    }

    #[test]
    fn trims_negligible_leading_terms() {
        let p = ComplexPoly::from_real(&[1.0, 1.0, 1e-20]);
        assert_eq!(p.degree(), Some(1));
    }

    #[test]
    fn quadruple_root_cluster() {
        // (z+1)^4
        let p = ComplexPoly::from_real(&[1.0, 4.0, 6.0, 4.0, 1.0]);
        let cl = p.clustered_roots().unwrap();
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].multiplicity, 4);
        assert!((cl[0].value + 1.0).norm() < 1e-10, "{:?}", cl[0].value);
    }

    #[test]
    fn zero_roots_factor_out() {
        // z^2 (z - 2)
        let r = sorted_re(ComplexPoly::from_real(&[0.0, 0.0, -2.0, 1.0]).roots().unwrap());
        assert_eq!(r[0], c(0.0, 0.0));
        assert_eq!(r[1], c(0.0, 0.0));
        assert!((r[2] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn warm_start_tracks_moving_roots() {
        let mut guesses = Vec::new();
        for k in 0..50 {
            let t = k as f64 * 0.01;
            let coeffs = [c(-6.0 - t, 0.0), c(11.0, 0.0), c(-6.0, t), c(1.0, 0.0)];
            roots_warm(&coeffs, &mut guesses);
            for g in &guesses {
                assert!(horner(&coeffs, *g).norm() < 1e-10);
            }
        }
    }

    proptest! {
        #[test]
        fn vieta_relations(coeffs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..8)) {
            let mut cs: Vec<Complex64> = coeffs.iter().map(|&(a, b)| c(a, b)).collect();
            let n = cs.len() - 1;
            cs[n] = c(1.0 + cs[n].re.abs(), cs[n].im);
            prop_assume!(cs[0].norm() > 1e-3);
            let r = roots(&cs).unwrap();
            prop_assert_eq!(r.len(), n);
            let sum: Complex64 = r.iter().sum();
            let prod: Complex64 = r.iter().product();
            let expect_sum = -cs[n - 1] / cs[n];
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            let expect_prod = sign * cs[0] / cs[n];
            let scale_sum = expect_sum.norm().max(r.iter().map(|v| v.norm()).fold(1.0, f64::max));
            prop_assert!((sum - expect_sum).norm() <= 1e-8 * scale_sum);
            prop_assert!((prod - expect_prod).norm() <= 1e-8 * expect_prod.norm().max(1.0));
            let p = ComplexPoly::new(cs.clone());
            for root in &r {
                prop_assert!(p.eval(*root).norm() <= 1e-10 * p.residual_scale(*root));
            }
        }
    }
}
