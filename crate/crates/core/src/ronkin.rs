//! Ronkin function, its gradient, Hessian, Legendre dual and volume differences.
//!
//! `R(x, y)` is evaluated through Jensen's formula in `w`:
//!
//! ```text
//! R(x, y) = log|p0d| + (1/π) ∫_0^π Σ_k max(y, log|w_k(e^{x+iφ})|) dφ
//! ```
//!
//! The integrand is smooth except where some `|w_k| = e^y`, where the root
//! count below `e^y` jumps. Those kinks are located by bisection and the
//! pieces between them are integrated by adaptive Gauss-Kronrod. Without
//! kinks the integrand is smooth and periodic and the trapezoid rule is used.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amoeba::{amoeba_membership, dominant_monomial, require_leading_w, Window};
use crate::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};
use crate::fiber::{count_changes, Fiber};
use crate::numerics::{gauss_kronrod, GAUSS_LEGENDRE_4};

const COARSE: usize = 32;
const KINK_TOL: f64 = 1e-15;
const QUAD_TOL: f64 = 1e-13;
const MAX_EVALS: usize = 40_000;

/// Value of the Ronkin function with its quadrature status.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RonkinValue {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

fn corner_dominance(p: &BivariatePolynomial, x: f64, y: f64) -> Option<f64> {
    let d = p.d();
    match dominant_monomial(p, x, y) {
        // only a vertex of the Newton polygon gives an exact facet
        Some((i, j)) if (i, j) == (0, 0) || (i, j) == (d, 0) || (i, j) == (0, d) => {
            Some(p.coeff(i, j).abs().ln() + i as f64 * x + j as f64 * y)
        }
        _ => None,
    }
}

/// Kink angles in `(0, π)` for the fiber at `x` and height `y`.
fn kinks(fiber: &mut Fiber, y: f64) -> Vec<f64> {
    let phis: Vec<f64> = (0..=COARSE).map(|k| PI * k as f64 / COARSE as f64).collect();
    let counts: Vec<usize> = phis.iter().map(|&phi| fiber.count_below(phi, y)).collect();
    let mut out = Vec::new();
    for k in 0..COARSE {
        count_changes(fiber, y, phis[k], counts[k], phis[k + 1], counts[k + 1], KINK_TOL * PI, &mut out);
    }
    out
}

/// Trapezoid rule on `[0, π]` for an even `2π`-periodic integrand,
/// doubling until successive estimates agree to `tol`.
fn even_trapezoid<F: FnMut(f64) -> f64>(mut f: F, tol: f64) -> (f64, f64, bool) {
    let mut n = 16;
    let ends = 0.5 * (f(0.0) + f(PI));
    let mut inner: f64 = (1..n).map(|k| f(PI * k as f64 / n as f64)).sum();
    let mut est = PI * (ends + inner) / n as f64;
    while n < (1 << 15) {
        let added: f64 = (0..n).map(|k| f(PI * (2 * k + 1) as f64 / (2 * n) as f64)).sum();
        inner += added;
        n *= 2;
        let next = PI * (ends + inner) / n as f64;
        let diff = (next - est).abs();
        est = next;
        if diff < tol {
            return (est, diff, true);
        }
    }
    (est, f64::INFINITY, false)
}

/// `R(x, y)` by Jensen's formula in `w`. Needs `p0d ≠ 0`.
pub fn ronkin_detailed(p: &BivariatePolynomial, x: f64, y: f64) -> Result<RonkinValue> {
    require_leading_w(p)?;
    if let Some(v) = corner_dominance(p, x, y) {
        return Ok(RonkinValue { value: v, error: 0.0, converged: true });
    }
    let lead = p.coeff(0, p.d()).abs().ln();
    let mut fiber = Fiber::new(p, x);
    let ks = kinks(&mut fiber, y);
    let scale = (p.d() as f64 * y.abs()).max(1.0);
    let (integral, error, converged) = if ks.is_empty() {
        even_trapezoid(|phi| fiber.jensen_sum(phi, y), QUAD_TOL * scale)
    } else {
        let mut edges = Vec::with_capacity(ks.len() + 2);
        edges.push(0.0);
        edges.extend(ks);
        edges.push(PI);
        let tol = QUAD_TOL * scale / (edges.len() - 1) as f64;
        let mut total = (0.0, 0.0, true);
        for w in edges.windows(2) {
            let q = gauss_kronrod(|phi| fiber.jensen_sum(phi, y), w[0], w[1], tol, MAX_EVALS);
            total = (total.0 + q.value, total.1 + q.error, total.2 && q.converged);
        }
        total
    };
    Ok(RonkinValue { value: lead + integral / PI, error: error / PI, converged })
}

/// `R(x, y)`; non-converged quadrature is returned as an error.
pub fn ronkin(p: &BivariatePolynomial, x: f64, y: f64) -> Result<f64> {
    let r = ronkin_detailed(p, x, y)?;
    if !r.converged {
        return Err(Error::NoConvergence {
            what: format!("Ronkin quadrature at ({x}, {y})"),
            residual: r.error,
            iterations: MAX_EVALS,
        });
    }
    Ok(r.value)
}

/// `R(x, y)` by Jensen's formula in `z` instead of `w`. Needs `pd0 ≠ 0`.
pub fn ronkin_via_z(p: &BivariatePolynomial, x: f64, y: f64) -> Result<f64> {
    ronkin(&p.swapped(), y, x)
}

/// `(1/π) ∫_0^π N(φ) dφ`, the mean number of roots below `e^y`.
fn mean_count(fiber: &mut Fiber, y: f64) -> f64 {
    let ks = kinks(fiber, y);
    let mut edges = Vec::with_capacity(ks.len() + 2);
    edges.push(0.0);
    edges.extend(ks);
    edges.push(PI);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let n = fiber.count_below(0.5 * (w[0] + w[1]), y) as f64;
        total += n * (w[1] - w[0]);
    }
    total / PI
}

/// Gradient of `R`: `∂R/∂y` is the mean number of `w`-roots below `e^y`,
/// `∂R/∂x` the mean number of `z`-roots below `e^x`. Outside the amoeba
/// both are integers, the lattice point of the facet.
pub fn ronkin_gradient(p: &BivariatePolynomial, x: f64, y: f64) -> Result<(f64, f64)> {
    require_leading_w(p)?;
    let d = p.d();
    if p.coeff(d, 0) == 0.0 {
        return Err(Error::invalid("coefficient of z^d must be nonzero"));
    }
    if let Some((i, j)) = dominant_monomial(p, x, y) {
        return Ok((i as f64, j as f64));
    }
    let gy = mean_count(&mut Fiber::new(p, x), y);
    let gx = mean_count(&mut Fiber::new(&p.swapped(), y), x);
    Ok((gx, gy))
}

/// Central-difference Hessian of `R` from nine values at spacing `h`.
pub fn ronkin_hessian(p: &BivariatePolynomial, x: f64, y: f64, h: f64) -> Result<[[f64; 2]; 2]> {
    let offsets = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 0), (0, 1), (1, -1), (1, 0), (1, 1)];
    let vals: Vec<f64> =
        offsets.par_iter().map(|&(i, j)| ronkin(p, x + i as f64 * h, y + j as f64 * h)).collect::<Result<_>>()?;
    let v = |i: i32, j: i32| vals[((i + 1) * 3 + (j + 1)) as usize];
    let hxx = (v(1, 0) - 2.0 * v(0, 0) + v(-1, 0)) / (h * h);
    let hyy = (v(0, 1) - 2.0 * v(0, 0) + v(0, -1)) / (h * h);
    let hxy = (v(1, 1) - v(1, -1) - v(-1, 1) + v(-1, -1)) / (4.0 * h * h);
    Ok([[hxx, hxy], [hxy, hyy]])
}

fn det2(m: &[[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Requires the center and the eight stencil points at distance `3h` to lie
/// in the amoeba.
fn require_inside(p: &BivariatePolynomial, x: f64, y: f64, h: f64) -> Result<()> {
    for i in -1..=1 {
        for j in -1..=1 {
            if !amoeba_membership(p, x + 3.0 * h * i as f64, y + 3.0 * h * j as f64)? {
                return Err(Error::OutsideAmoeba { x, y });
            }
        }
    }
    Ok(())
}

/// `det Hess R - 1/π²` with a plain central-difference Hessian at step `h`.
pub fn monge_ampere_residual(p: &BivariatePolynomial, x: f64, y: f64, h: f64) -> Result<f64> {
    require_inside(p, x, y, h)?;
    Ok(det2(&ronkin_hessian(p, x, y, h)?) - 1.0 / (PI * PI))
}

/// As [`monge_ampere_residual`] with the Hessian Richardson-extrapolated
/// from steps `h` and `h/2`.
pub fn monge_ampere_residual_extrapolated(p: &BivariatePolynomial, x: f64, y: f64, h: f64) -> Result<f64> {
    require_inside(p, x, y, h)?;
    let a = ronkin_hessian(p, x, y, h)?;
    let b = ronkin_hessian(p, x, y, 0.5 * h)?;
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = (4.0 * b[i][j] - a[i][j]) / 3.0;
        }
    }
    Ok(det2(&m) - 1.0 / (PI * PI))
}

/// Value of the Legendre dual with the maximizing point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreValue {
    pub value: f64,
    /// Maximizer `(x, y)`; absent when the supremum is approached at infinity.
    pub argmax: Option<(f64, f64)>,
}

fn in_triangle(d: usize, s: f64, t: f64) -> bool {
    let eps = 1e-12;
    s >= -eps && t >= -eps && s + t <= d as f64 + eps
}

/// Legendre transform of the univariate Ronkin function of the edge
/// polynomial `Σ coeffs[k] u^k` at slope `sigma ∈ [0, n]`.
fn edge_legendre(coeffs: &[f64], sigma: f64) -> Result<f64> {
    let n = coeffs.len() - 1;
    let poly = crate::numerics::ComplexPoly::from_real_exact(coeffs);
    let logs: Vec<f64> = poly.roots()?.iter().map(|r| r.norm().ln()).collect();
    let lead = coeffs[n].abs().ln();
    let r = |x: f64| lead + logs.iter().map(|&l| l.max(x)).sum::<f64>();
    // piecewise linear: the supremum sits at a breakpoint or at ±∞
    let mut best = f64::NEG_INFINITY;
    for &x in &logs {
        best = best.max(sigma * x - r(x));
    }
    if sigma.abs() < 1e-12 {
        best = best.max(-coeffs[0].abs().ln());
    }
    if (sigma - n as f64).abs() < 1e-12 {
        best = best.max(-lead);
    }
    Ok(best)
}

/// `R∨(s, t) = sup_{x,y} (s x + t y - R(x, y))` for `(s, t)` in the Newton
/// triangle.
///
/// Interior slopes are found by damped Newton ascent on the concave
/// objective with gradient `(s, t) - ∇R`, falling back to Armijo gradient
/// steps where the Hessian degenerates. On the triangle's boundary the
/// supremum escapes along a tentacle and equals the Legendre transform of
/// the edge polynomial's Ronkin function.
pub fn legendre_transform(p: &BivariatePolynomial, s: f64, t: f64) -> Result<LegendreValue> {
    legendre_from(p, s, t, None)
}

fn legendre_from(p: &BivariatePolynomial, s: f64, t: f64, start: Option<(f64, f64)>) -> Result<LegendreValue> {
    let d = p.d();
    if !in_triangle(d, s, t) {
        return Err(Error::invalid(format!("slope ({s}, {t}) outside the Newton triangle")));
    }
    let eps = 1e-12;
    if t.abs() < eps {
        let c: Vec<f64> = (0..=d).map(|i| p.coeff(i, 0)).collect();
        return Ok(LegendreValue { value: edge_legendre(&c, s)?, argmax: None });
    }
    if s.abs() < eps {
        let c: Vec<f64> = (0..=d).map(|j| p.coeff(0, j)).collect();
        return Ok(LegendreValue { value: edge_legendre(&c, t)?, argmax: None });
    }
    if (s + t - d as f64).abs() < eps {
        // along x - y = const, R ~ d y + r(x - y) with r the Ronkin function
        // of Σ p_{i,d-i} u^i; the slope splits as (s, t) = (σ, d - σ)
        let c: Vec<f64> = (0..=d).map(|i| p.coeff(i, d - i)).collect();
        return Ok(LegendreValue { value: edge_legendre(&c, s)?, argmax: None });
    }

    let objective = |x: f64, y: f64| -> Result<f64> { Ok(s * x + t * y - ronkin(p, x, y)?) };
    let (mut x, mut y) = match start {
        Some(pt) => pt,
        None => Window::auto(p, 1.0)?.center(),
    };
    let mut g = objective(x, y)?;
    let mut step_scale = 1.0;
    for iter in 0..200 {
        let (rx, ry) = ronkin_gradient(p, x, y)?;
        let grad = (s - rx, t - ry);
        let gnorm = grad.0.hypot(grad.1);
        if gnorm < 1e-11 {
            return Ok(LegendreValue { value: g, argmax: Some((x, y)) });
        }
        // Hessian of R from differences of the exact gradient
        let dh = 1e-5;
        let (ax, ay) = ronkin_gradient(p, x + dh, y)?;
        let (bx, by) = ronkin_gradient(p, x - dh, y)?;
        let (cx, cy) = ronkin_gradient(p, x, y + dh)?;
        let (ex, ey) = ronkin_gradient(p, x, y - dh)?;
        let hxx = (ax - bx) / (2.0 * dh);
        let hyy = (cy - ey) / (2.0 * dh);
        let hxy = 0.5 * ((ay - by) + (cx - ex)) / (2.0 * dh);
        let det = hxx * hyy - hxy * hxy;
        let newton = det > 1e-10 && hxx > 0.0;
        let dir = if newton {
            ((hyy * grad.0 - hxy * grad.1) / det, (hxx * grad.1 - hxy * grad.0) / det)
        } else {
            (grad.0 * step_scale / gnorm, grad.1 * step_scale / gnorm)
        };
        let slope = grad.0 * dir.0 + grad.1 * dir.1;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let (nx, ny) = (x + alpha * dir.0, y + alpha * dir.1);
            let ng = objective(nx, ny)?;
            if ng >= g + 1e-4 * alpha * slope - 1e-14 * g.abs().max(1.0) {
                x = nx;
                y = ny;
                g = ng;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                what: "Legendre ascent line search".into(),
                residual: gnorm,
                iterations: iter,
            });
        }
        // grow gradient steps across flat facets, shrink after backtracking
        step_scale =
            if !newton && alpha == 1.0 { (step_scale * 2.0).min(8.0) } else { step_scale.max(0.05) * alpha.max(0.25) };
    }
    Err(Error::NoConvergence { what: "Legendre ascent".into(), residual: f64::NAN, iterations: 200 })
}

/// `det Hess R∨ - π²` by central differences of `R∨` at spacing `h`.
pub fn dual_monge_ampere_residual(p: &BivariatePolynomial, s: f64, t: f64, h: f64) -> Result<f64> {
    let center = legendre_transform(p, s, t)?;
    let start = center.argmax;
    let offsets = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];
    let mut vals = [[0.0; 3]; 3];
    vals[1][1] = center.value;
    for (i, j) in offsets {
        vals[(i + 1) as usize][(j + 1) as usize] = legendre_from(p, s + i as f64 * h, t + j as f64 * h, start)?.value;
    }
    let v = |i: i32, j: i32| vals[(i + 1) as usize][(j + 1) as usize];
    let hss = (v(1, 0) - 2.0 * v(0, 0) + v(-1, 0)) / (h * h);
    let htt = (v(0, 1) - 2.0 * v(0, 0) + v(0, -1)) / (h * h);
    let hst = (v(1, 1) - v(1, -1) - v(-1, 1) + v(-1, -1)) / (4.0 * h * h);
    Ok(hss * htt - hst * hst - PI * PI)
}

/// Result of integrating `R1 - R2` over the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeDifference {
    pub value: f64,
    /// Half-width of the final integration square.
    pub half_width: f64,
    /// Contribution of the last ring.
    pub last_ring: f64,
    pub converged: bool,
}

const RING: f64 = 0.5;
const MAX_HALF_WIDTH: f64 = 30.0;

/// `∫∫ (R1 - R2) dx dy` over the plane for curves with equal boundary data.
///
/// Both polynomials are normalized to `p00 = 1`; their coefficients on the
/// boundary of the triangle must then agree. The integral is accumulated
/// over square rings of `0.5 × 0.5` panels with a 4×4 Gauss-Legendre rule,
/// stopping once a ring adds less than `1e-4` of the total.
pub fn volume_difference(p1: &BivariatePolynomial, p2: &BivariatePolynomial) -> Result<VolumeDifference> {
    if p1.d() != p2.d() {
        return Err(Error::DifferentBoundaryData);
    }
    let (q1, q2) = (p1.normalized()?, p2.normalized()?);
    for (i, j) in q1.boundary_lattice_points() {
        let (a, b) = (q1.coeff(i, j), q2.coeff(i, j));
        if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
            return Err(Error::DifferentBoundaryData);
        }
    }
    require_leading_w(&q1)?;
    let window = Window::auto(&q1, 1.0)?;
    let (cx, cy) = window.center();
    let half0 = (0.5 * window.width().max(window.height()) / RING).ceil() * RING;

    let panel = |x0: f64, y0: f64| -> Result<f64> {
        let mut acc = 0.0;
        for &(u, wu) in &GAUSS_LEGENDRE_4 {
            for &(v, wv) in &GAUSS_LEGENDRE_4 {
                let x = x0 + 0.5 * RING * (u + 1.0);
                let y = y0 + 0.5 * RING * (v + 1.0);
                let diff = match (corner_dominance(&q1, x, y), corner_dominance(&q2, x, y)) {
                    (Some(a), Some(b)) => a - b,
                    _ => ronkin(&q1, x, y)? - ronkin(&q2, x, y)?,
                };
                acc += wu * wv * diff;
            }
        }
        Ok(acc * 0.25 * RING * RING)
    };
    let sum_panels = |cells: Vec<(f64, f64)>| -> Result<f64> {
        let vals: Vec<f64> = cells.par_iter().map(|&(x0, y0)| panel(x0, y0)).collect::<Result<_>>()?;
        Ok(vals.iter().sum())
    };

    let n0 = (2.0 * half0 / RING).round() as i64;
    let core: Vec<(f64, f64)> = (0..n0)
        .flat_map(|i| (0..n0).map(move |j| (i, j)))
        .map(|(i, j)| (cx - half0 + i as f64 * RING, cy - half0 + j as f64 * RING))
        .collect();
    let mut total = sum_panels(core)?;
    let mut half = half0;
    let mut last = f64::INFINITY;
    while half < MAX_HALF_WIDTH {
        let outer = half + RING;
        let n = (2.0 * outer / RING).round() as i64;
        let ring: Vec<(f64, f64)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i == 0 || j == 0 || i == n - 1 || j == n - 1)
            .map(|(i, j)| (cx - outer + i as f64 * RING, cy - outer + j as f64 * RING))
            .collect();
        last = sum_panels(ring)?;
        total += last;
        half = outer;
        if last.abs() < 1e-4 * total.abs() || last.abs() < 1e-13 {
            return Ok(VolumeDifference { value: total, half_width: half, last_ring: last, converged: true });
        }
    }
    Ok(VolumeDifference { value: total, half_width: half, last_ring: last, converged: false })
}
