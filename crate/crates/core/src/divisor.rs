//! Divisors of white vertices on the real part of the spectral curve.
//!
//! On the curve `K(z, w)` has a one-dimensional cokernel, spanned by a left
//! null vector `u` indexed by white vertices. The divisor of a white vertex
//! `v` is where the component `u_v` vanishes. At real points `K` is real, so
//! `u` can be taken real. Following `u` continuously around a compact oval,
//! the zeros of `u_v` are its sign changes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amoeba::Window;
use crate::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};
use crate::kasteleyn::{assemble_k, characteristic_polynomial};
use crate::lattice::EdgeWeights;
use crate::ovals::{find_real_nodes, trace_real_ovals, RealOval};

/// A point must satisfy `σ_min < ON_CURVE_TOL ‖K(|z|, |w|)‖_F`, a scale free of cancellation.
pub const ON_CURVE_TOL: f64 = 1e-8;
/// The second smallest singular value must exceed the smallest by this factor.
pub const SMOOTH_GAP: f64 = 1e3;
const BISECTION_STEPS: usize = 60;
const PROJECTION_STEPS: usize = 8;
// ovals smaller than this in log coordinates are treated as nodes
const DEGENERATE_DIAMETER: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorPoint {
    /// White vertex `(x, y)`.
    pub vertex: (usize, usize),
    /// Index into the ovals returned by [`divisor_ovals`]; `None` for a point
    /// placed on an isolated real node.
    pub oval_id: Option<usize>,
    pub z: f64,
    pub w: f64,
}

fn singular_pair(values: &DVector<f64>) -> (usize, f64, f64) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let second = if idx.len() > 1 { values[idx[1]] } else { f64::INFINITY };
    (idx[0], values[idx[0]], second)
}

/// Unit vector `u` with `u K(z, w) = 0`.
///
/// The phase is fixed so that the largest component is real and positive;
/// at real points the whole vector is then real.
pub fn left_null_vector(w: &EdgeWeights, z: Complex64, wv: Complex64) -> Result<DVector<Complex64>> {
    let kt = assemble_k(w, z, wv).transpose();
    let svd = kt.svd(false, true);
    let (k, smallest, second) = singular_pair(&svd.singular_values);
    let scale = assemble_k(w, Complex64::new(z.norm(), 0.0), Complex64::new(wv.norm(), 0.0)).norm();
    if smallest > ON_CURVE_TOL * scale {
        return Err(Error::invalid(format!(
            "({z}, {wv}) is not on the spectral curve (relative sigma_min {:.3e})",
            smallest / scale
        )));
    }
    if second < SMOOTH_GAP * smallest {
        return Err(Error::SingularPoint { smallest, second });
    }
    // null vector of Kᵀ is the conjugate of the k-th row of Vᴴ
    let v_t = svd.v_t.expect("requested");
    let mut u: DVector<Complex64> = DVector::from_iterator(v_t.ncols(), v_t.row(k).iter().map(|c| c.conj()));
    let big = u.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("non-empty");
    let phase = big.conj() / big.norm();
    u *= phase;
    Ok(u)
}

/// Real null vector at a real point, without the precondition checks.
fn real_null_vector(w: &EdgeWeights, z: f64, wv: f64) -> DVector<f64> {
    let k = assemble_k(w, Complex64::new(z, 0.0), Complex64::new(wv, 0.0));
    let kt: DMatrix<f64> = DMatrix::from_fn(k.ncols(), k.nrows(), |i, j| k[(j, i)].re);
    let svd = kt.svd(false, true);
    let (i, _, _) = singular_pair(&svd.singular_values);
    svd.v_t.expect("requested").row(i).transpose()
}

/// Moves a real point onto the curve along the gradient in log coordinates.
fn project(p: &BivariatePolynomial, sz: f64, sw: f64, mut x: f64, mut y: f64) -> (f64, f64) {
    for _ in 0..PROJECTION_STEPS {
        let (z, w) = (sz * x.exp(), sw * y.exp());
        let (f, pz, pw) = p.eval_real_with_gradient(z, w);
        let (gx, gy) = (z * pz, w * pw);
        let g2 = gx * gx + gy * gy;
        if g2 == 0.0 || f.abs() <= 1e-15 * p.abs_scale(z, w) {
            break;
        }
        x -= f * gx / g2;
        y -= f * gy / g2;
    }
    (sz * x.exp(), sw * y.exp())
}

/// Zero of `u_v` between two neighbouring points of an oval, where the
/// continued null vectors `ua`, `ub` have opposite `v`-components.
fn bisect(
    w: &EdgeWeights,
    p: &BivariatePolynomial,
    v: usize,
    a: (f64, f64),
    b: (f64, f64),
    ua: &DVector<f64>,
) -> (f64, f64) {
    let (sz, sw) = (a.0.signum(), a.1.signum());
    let la = (a.0.abs().ln(), a.1.abs().ln());
    let lb = (b.0.abs().ln(), b.1.abs().ln());
    let (mut lo, mut hi) = (0.0, 1.0);
    let sa = ua[v].signum();
    let mut best = a;
    for _ in 0..BISECTION_STEPS {
        let m = 0.5 * (lo + hi);
        let q = project(p, sz, sw, la.0 + m * (lb.0 - la.0), la.1 + m * (lb.1 - la.1));
        let mut u = real_null_vector(w, q.0, q.1);
        if u.dot(ua) < 0.0 {
            u = -u;
        }
        if u[v].signum() == sa {
            lo = m;
        } else {
            hi = m;
        }
        best = q;
        if hi - lo < 1e-14 {
            break;
        }
    }
    best
}

/// Polynomial, window and traced ovals used by [`vertex_divisor`].
pub fn divisor_ovals(w: &EdgeWeights) -> Result<(BivariatePolynomial, Window, Vec<RealOval>)> {
    let p = characteristic_polynomial(w)?;
    let window = Window::auto(&p, 1.0)?;
    let ovals = trace_real_ovals(&p, &window)?;
    Ok((p, window, ovals))
}

/// Zeros of `u_v` along every compact oval, plus one point on each isolated
/// real node. The total must equal `(d-1)(d-2)/2`.
pub fn vertex_divisor(w: &EdgeWeights, vertex: (usize, usize)) -> Result<Vec<DivisorPoint>> {
    let d = w.d();
    if vertex.0 >= d || vertex.1 >= d {
        return Err(Error::invalid(format!("white vertex {vertex:?} outside the {d}x{d} domain")));
    }
    divisors(w, &[vertex]).map(|mut v| v.remove(0))
}

/// [`vertex_divisor`] for every white vertex, indexed `y*d + x`, sharing one
/// trace of the ovals.
pub fn all_vertex_divisors(w: &EdgeWeights) -> Result<Vec<Vec<DivisorPoint>>> {
    let d = w.d();
    let vertices: Vec<(usize, usize)> = (0..d).flat_map(|y| (0..d).map(move |x| (x, y))).collect();
    divisors(w, &vertices)
}

fn divisors(w: &EdgeWeights, vertices: &[(usize, usize)]) -> Result<Vec<Vec<DivisorPoint>>> {
    let d = w.d();
    let (p, window, ovals) = divisor_ovals(w)?;
    let nodes: Vec<_> = find_real_nodes(&p, &window)?.into_iter().filter(|n| n.isolated).collect();
    let mut out = vec![Vec::new(); vertices.len()];
    let mut per_oval = vec![Vec::new(); vertices.len()];
    for (id, oval) in ovals.iter().enumerate() {
        if !oval.compact || oval.log_diameter() < DEGENERATE_DIAMETER {
            continue;
        }
        let pts = &oval.points;
        let n = pts.len();
        // null vectors continued along the oval; the last one closes the loop
        // and may return with the opposite sign
        let mut us = Vec::with_capacity(n + 1);
        us.push(real_null_vector(w, pts[0].0, pts[0].1));
        for k in 1..=n {
            let mut u = if k < n { real_null_vector(w, pts[k].0, pts[k].1) } else { us[0].clone() };
            if u.dot(&us[k - 1]) < 0.0 {
                u = -u;
            }
            us.push(u);
        }
        for (slot, &vertex) in vertices.iter().enumerate() {
            let v = w.index(vertex.0, vertex.1);
            let mut found = 0;
            for k in 1..=n {
                if us[k][v] * us[k - 1][v] < 0.0 {
                    let (z, wv) = bisect(w, &p, v, pts[k - 1], pts[k % n], &us[k - 1]);
                    out[slot].push(DivisorPoint { vertex, oval_id: Some(id), z, w: wv });
                    found += 1;
                }
            }
            per_oval[slot].push((id, found));
        }
    }
    let expected = (d - 1) * d.saturating_sub(2) / 2;
    for (slot, &vertex) in vertices.iter().enumerate() {
        out[slot].extend(nodes.iter().map(|nd| DivisorPoint { vertex, oval_id: None, z: nd.z, w: nd.w }));
        if out[slot].len() != expected {
            return Err(Error::DivisorCount {
                found: out[slot].len(),
                expected,
                detail: format!("vertex {vertex:?}, zeros per compact oval (id, count): {:?}", per_oval[slot]),
            });
        }
    }
    Ok(out)
}

/// True iff every nondegenerate compact oval carries exactly one point and
/// no point lies elsewhere on an oval.
pub fn is_standard_divisor(points: &[DivisorPoint], ovals: &[RealOval]) -> bool {
    let mut counts = vec![0usize; ovals.len()];
    for pt in points {
        match pt.oval_id {
            Some(i) if i < ovals.len() && ovals[i].compact => counts[i] += 1,
            Some(_) => return false,
            None => {}
        }
    }
    ovals
        .iter()
        .zip(&counts)
        .filter(|(o, _)| o.compact && o.log_diameter() >= DEGENERATE_DIAMETER)
        .all(|(_, &c)| c == 1)
}
