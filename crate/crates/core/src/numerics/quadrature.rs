//! Quadrature rules for periodic and piecewise-smooth integrands.

use std::f64::consts::TAU;

/// Integral estimate with its convergence status.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
    /// False when the sample cap was reached before the tolerance.
    pub converged: bool,
}

pub const DEFAULT_SAMPLE_CAP: usize = 1 << 16;

/// Trapezoid rule for a `2π`-periodic integrand, starting from `n` samples
/// and doubling until successive estimates differ by less than `tol`.
///
/// Doubling reuses every previous sample, so the total cost is twice the
/// final sample count. Hitting `cap` returns the last estimate with
/// `converged = false`.
pub fn periodic_quadrature<F: FnMut(f64) -> f64>(mut f: F, n: usize, tol: f64, cap: usize) -> Quadrature {
    assert!(n >= 8, "periodic_quadrature needs at least 8 samples");
    let mut n = n;
    let mut sum: f64 = (0..n).map(|k| f(TAU * k as f64 / n as f64)).sum();
    let mut estimate = TAU * sum / n as f64;
    let mut evaluations = n;
    loop {
        if 2 * n > cap {
            return Quadrature { value: estimate, error: f64::INFINITY, evaluations, converged: false };
        }
        // odd samples of the refined grid
        let h = TAU / (2 * n) as f64;
        let mid: f64 = (0..n).map(|k| f(h * (2 * k + 1) as f64)).sum();
        evaluations += n;
        sum += mid;
        n *= 2;
        let refined = TAU * sum / n as f64;
        let diff = (refined - estimate).abs();
        estimate = refined;
        if diff < tol {
            return Quadrature { value: estimate, error: diff, evaluations, converged: true };
        }
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature on `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the
/// summed estimate drops below `tol` or `max_evaluations` is exhausted.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_evaluations: usize) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, error: 0.0, evaluations: 0, converged: true };
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let value: f64 = pieces.iter().map(|p| p.2).sum();
        let error: f64 = pieces.iter().map(|p| p.3).sum();
        // roundoff floor: no panel can do better than a few ulps of its value
        let floor = 50.0 * f64::EPSILON * pieces.iter().map(|p| p.2.abs()).sum::<f64>();
        if error <= tol.max(floor) {
            return Quadrature { value, error, evaluations, converged: true };
        }
        if evaluations + 30 > max_evaluations {
            return Quadrature { value, error, evaluations, converged: false };
        }
        let (idx, _) =
            pieces.iter().enumerate().fold((0, -1.0), |best, (i, p)| if p.3 > best.1 { (i, p.3) } else { best });
        let (pa, pb, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // interval exhausted at double precision
            let value: f64 = pieces.iter().map(|p| p.2).sum::<f64>() + v;
            return Quadrature { value, error, evaluations, converged: false };
        }
        let (v1, e1) = gk15(&mut f, pa, mid);
        let (v2, e2) = gk15(&mut f, mid, pb);
        evaluations += 30;
        pieces.push((pa, mid, v1, e1));
        pieces.push((mid, pb, v2, e2));
    }
}

/// Nodes and weights of the 4-point Gauss-Legendre rule on `[-1, 1]`.
pub const GAUSS_LEGENDRE_4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_integrates_to_zero() {
        let q = periodic_quadrature(f64::cos, 8, 1e-14, DEFAULT_SAMPLE_CAP);
        assert!(q.value.abs() < 1e-14);
        assert!(q.converged);
    }

    #[test]
    fn constant_integrates_to_two_pi() {
        let q = periodic_quadrature(|_| 1.0, 8, 1e-14, DEFAULT_SAMPLE_CAP);
        assert!((q.value - TAU).abs() < 1e-14);
    }

    #[test]
    fn jensen_inner_integral() {
        // (1/2π) ∫ log|2 + e^{iθ}| dθ = log 2 by Jensen's formula
        let q = periodic_quadrature(|t| (2.0 + t.cos()).hypot(t.sin()).ln(), 8, 1e-14, DEFAULT_SAMPLE_CAP);
        assert!((q.value / TAU - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn spectral_convergence_rate() {
        // exact: 2π / sqrt(1 - r^2) for 1/(1 - r cos θ)
        let r: f64 = 0.6;
        let exact = TAU / (1.0 - r * r).sqrt();
        let err = |n: usize| {
            let s: f64 = (0..n).map(|k| 1.0 / (1.0 - r * (TAU * k as f64 / n as f64).cos())).sum();
            (TAU * s / n as f64 - exact).abs()
        };
        let (e8, e16) = (err(8), err(16));
        assert!(e8 / e16 > 10.0, "{e8} {e16}");
    }

    #[test]
    fn cap_reports_nonconvergence() {
        let q = periodic_quadrature(|t| (t - 1.0).abs().sqrt(), 8, 1e-15, 64);
        assert!(!q.converged);
    }

    #[test]
    fn kronrod_polynomial_exact() {
        let q = gauss_kronrod(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, 1e-14, 10_000);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((q.value - exact).abs() < 1e-12);
    }

    #[test]
    fn kronrod_kink() {
        let q = gauss_kronrod(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-12, 100_000);
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-11);
        assert!(q.converged);
    }

    #[test]
    fn legendre_weights_sum_to_two() {
        let s: f64 = GAUSS_LEGENDRE_4.iter().map(|p| p.1).sum();
        assert!((s - 2.0).abs() < 1e-15);
        // exact for degree 7
        let m: f64 = GAUSS_LEGENDRE_4.iter().map(|p| p.1 * p.0.powi(6)).sum();
        assert!((m - 2.0 / 7.0).abs() < 1e-15);
    }
}
