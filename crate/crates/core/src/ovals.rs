//! Real part of the curve: connected components in each open quadrant of
//! `(R*)^2`, and real singular points.
//!
//! Components are traced in logarithmic coordinates by sweeping columns
//! `u = log|z|` and linking the real `w`-roots of neighbouring columns.
//! Columns are bisected wherever the root count changes or a root moves
//! too far, so folds and axis crossings are resolved locally.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amoeba::{require_leading_w, Window};
use crate::bivariate::BivariatePolynomial;
use crate::error::Result;
use crate::numerics::roots_exact;

const BASE_COLUMNS: usize = 400;
const MAX_STEP_V: f64 = 0.05;
const MIN_STEP_U: f64 = 1e-9;
const CANDIDATE_TOL: f64 = 1e-4;
const SIGN_TOL: f64 = 1e-7;
// components smaller than this in log coordinates are isolated points
const DEGENERATE_DIAMETER: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealOval {
    /// Signs of `(z, w)` on this component.
    pub quadrant: (i8, i8),
    /// Real points `(z, w)` in order along the component.
    pub points: Vec<(f64, f64)>,
    /// Closed inside the quadrant and inside the window.
    pub compact: bool,
}

impl RealOval {
    pub fn log_points(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|&(z, w)| (z.abs().ln(), w.abs().ln())).collect()
    }

    /// Largest `|P| / Σ|p_ij z^i w^j|` over the traced points.
    pub fn max_residual(&self, p: &BivariatePolynomial) -> f64 {
        self.points.iter().map(|&(z, w)| p.eval_real(z, w).abs() / p.abs_scale(z, w)).fold(0.0, f64::max)
    }

    /// Signed area enclosed in log coordinates (shoelace).
    pub fn log_area(&self) -> f64 {
        let pts = self.log_points();
        let n = pts.len();
        let mut s = 0.0;
        for k in 0..n {
            let (a, b) = (pts[k], pts[(k + 1) % n]);
            s += a.0 * b.1 - a.1 * b.0;
        }
        0.5 * s
    }

    /// Log-coordinate diameter of the bounding box.
    pub fn log_diameter(&self) -> f64 {
        let pts = self.log_points();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        (x1 - x0).hypot(y1 - y0)
    }
}

struct Column {
    u: f64,
    vs: Vec<f64>,
}

fn real_horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

// A near-real root is accepted only if the real polynomial changes sign
// across it. Complex pairs close to the axis, and roots whose imaginary
// part is pure roundoff, are told apart this way.
fn column(p: &BivariatePolynomial, sz: f64, sw: f64, u: f64) -> Column {
    let z = Complex64::new(sz * u.exp(), 0.0);
    let coeffs = p.w_poly_at(z);
    let real: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
    let mut vs: Vec<f64> = roots_exact(&coeffs)
        .unwrap_or_default()
        .into_iter()
        .filter(|r| {
            let m = r.norm();
            if m == 0.0 || r.im.abs() > CANDIDATE_TOL * m || r.re * sw <= 0.0 {
                return false;
            }
            let delta = (4.0 * r.im.abs()).max(SIGN_TOL * m);
            real_horner(&real, r.re - delta) * real_horner(&real, r.re + delta) <= 0.0
        })
        .map(|r| r.re.abs().ln())
        .collect();
    vs.sort_by(f64::total_cmp);
    Column { u, vs }
}

fn needs_split(a: &Column, b: &Column) -> bool {
    if b.u - a.u <= MIN_STEP_U {
        return false;
    }
    a.vs.len() != b.vs.len() || a.vs.iter().zip(&b.vs).any(|(x, y)| (x - y).abs() > MAX_STEP_V)
}

fn sweep(p: &BivariatePolynomial, sz: f64, sw: f64, window: &Window) -> Vec<Column> {
    let du = window.width() / BASE_COLUMNS as f64;
    let mut out = vec![column(p, sz, sw, window.x_min)];
    for k in 1..=BASE_COLUMNS {
        let next = column(p, sz, sw, window.x_min + du * k as f64);
        // depth-first refinement between out.last() and next
        let mut stack = vec![next];
        while let Some(b) = stack.pop() {
            let a = out.last().expect("nonempty");
            if needs_split(a, &b) {
                let m = column(p, sz, sw, 0.5 * (a.u + b.u));
                stack.push(b);
                stack.push(m);
            } else {
                out.push(b);
            }
        }
    }
    out
}

/// Monotone matching of the shorter list into the longer one minimizing
/// the total displacement. Returns for each entry of `short` its partner in
/// `long`.
fn ordered_matching(short: &[f64], long: &[f64]) -> Vec<usize> {
    let (n, m) = (short.len(), long.len());
    debug_assert!(n <= m);
    // cost[i][j]: best cost matching short[..i] into long[..j]
    let mut cost = vec![vec![f64::INFINITY; m + 1]; n + 1];
    cost[0].iter_mut().for_each(|c| *c = 0.0);
    for i in 1..=n {
        for j in i..=m {
            let skip = cost[i][j - 1];
            let take = cost[i - 1][j - 1] + (short[i - 1] - long[j - 1]).abs();
            cost[i][j] = skip.min(take);
        }
    }
    let mut out = vec![0; n];
    let (mut i, mut j) = (n, m);
    while i > 0 {
        let take = cost[i - 1][j - 1] + (short[i - 1] - long[j - 1]).abs();
        if cost[i][j] == take {
            out[i - 1] = j - 1;
            i -= 1;
        }
        j -= 1;
    }
    out
}

struct Graph {
    // node -> up to two neighbours
    adj: Vec<Vec<usize>>,
    open: Vec<bool>,
}

impl Graph {
    fn link(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }
}

fn trace_quadrant(p: &BivariatePolynomial, sz: f64, sw: f64, window: &Window) -> Vec<RealOval> {
    let cols = sweep(p, sz, sw, window);
    let mut offset = Vec::with_capacity(cols.len());
    let mut nodes = Vec::new();
    for (k, c) in cols.iter().enumerate() {
        offset.push(nodes.len());
        nodes.extend(c.vs.iter().map(|&v| (k, v)));
    }
    let mut g = Graph { adj: vec![Vec::new(); nodes.len()], open: vec![false; nodes.len()] };
    for k in 0..cols.len().saturating_sub(1) {
        let (a, b) = (&cols[k], &cols[k + 1]);
        let (oa, ob) = (offset[k], offset[k + 1]);
        let (short, long, os, ol) =
            if a.vs.len() <= b.vs.len() { (&a.vs, &b.vs, oa, ob) } else { (&b.vs, &a.vs, ob, oa) };
        let m = ordered_matching(short, long);
        let mut used = vec![false; long.len()];
        for (i, &j) in m.iter().enumerate() {
            g.link(os + i, ol + j);
            used[j] = true;
        }
        // unmatched neighbours in the longer column meet at a fold
        let mut j = 0;
        while j < long.len() {
            if used[j] {
                j += 1;
            } else if j + 1 < long.len() && !used[j + 1] {
                g.link(ol + j, ol + j + 1);
                j += 2;
            } else {
                g.open[ol + j] = true;
                j += 1;
            }
        }
    }
    let last = cols.len() - 1;
    let mut seen = vec![false; nodes.len()];
    let mut out = Vec::new();
    for start in 0..nodes.len() {
        if seen[start] {
            continue;
        }
        // collect the component
        let mut comp = vec![start];
        seen[start] = true;
        let mut q = 0;
        while q < comp.len() {
            let n = comp[q];
            q += 1;
            for &m in &g.adj[n] {
                if !seen[m] {
                    seen[m] = true;
                    comp.push(m);
                }
            }
        }
        let compact = comp.iter().all(|&n| g.adj[n].len() == 2 && !g.open[n] && nodes[n].0 != 0 && nodes[n].0 != last);
        // walk from an end if there is one
        let first = comp.iter().copied().find(|&n| g.adj[n].len() < 2).unwrap_or(comp[0]);
        let mut order = vec![first];
        let mut prev = usize::MAX;
        let mut cur = first;
        loop {
            let next = g.adj[cur].iter().copied().find(|&m| m != prev && !(order.len() > 1 && m == first));
            match next {
                Some(m) if order.len() < comp.len() => {
                    order.push(m);
                    prev = cur;
                    cur = m;
                }
                _ => break,
            }
        }
        let points = order
            .iter()
            .map(|&n| {
                let (k, v) = nodes[n];
                (sz * cols[k].u.exp(), sw * v.exp())
            })
            .collect();
        let oval = RealOval { quadrant: (sz as i8, sw as i8), points, compact };
        if oval.compact && oval.log_diameter() < DEGENERATE_DIAMETER {
            continue;
        }
        out.push(oval);
    }
    out
}

/// Traces every real component visible in `window` (log coordinates).
///
/// Compact ovals are closed loops that stay inside one quadrant and inside
/// the window. Everything else is reported with `compact == false`.
/// Components shrunk to an isolated point are omitted; see
/// [`find_real_nodes`].
pub fn trace_real_ovals(p: &BivariatePolynomial, window: &Window) -> Result<Vec<RealOval>> {
    require_leading_w(p)?;
    let mut out = Vec::new();
    for (sz, sw) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
        out.extend(trace_quadrant(p, sz, sw, window));
    }
    Ok(out)
}

/// A real singular point of the curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealNode {
    pub z: f64,
    pub w: f64,
    /// Definite Hessian: an isolated real point. Otherwise a crossing.
    pub isolated: bool,
}

impl RealNode {
    pub fn log_point(&self) -> (f64, f64) {
        (self.z.abs().ln(), self.w.abs().ln())
    }
}

/// Real points with `P = P_z = P_w = 0` and `zw != 0`, found by Newton's
/// method on the gradient from a grid of starts in every quadrant.
pub fn find_real_nodes(p: &BivariatePolynomial, window: &Window) -> Result<Vec<RealNode>> {
    require_leading_w(p)?;
    const STARTS: usize = 12;
    let mut out: Vec<RealNode> = Vec::new();
    for (sz, sw) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
        for a in 0..STARTS {
            for b in 0..STARTS {
                let u = window.x_min + window.width() * (a as f64 + 0.5) / STARTS as f64;
                let v = window.y_min + window.height() * (b as f64 + 0.5) / STARTS as f64;
                let (mut z, mut w) = (sz * u.exp(), sw * v.exp());
                let mut ok = false;
                for _ in 0..60 {
                    let (_, gz, gw) = p.eval_real_with_gradient(z, w);
                    let (hzz, hzw, hww) = p.hessian_real(z, w);
                    let det = hzz * hww - hzw * hzw;
                    if det == 0.0 || !det.is_finite() {
                        break;
                    }
                    let dz = (hww * gz - hzw * gw) / det;
                    let dw = (hzz * gw - hzw * gz) / det;
                    z -= dz;
                    w -= dw;
                    if !(z.is_finite() && w.is_finite()) || z * sz <= 0.0 || w * sw <= 0.0 {
                        break;
                    }
                    if dz.abs() <= 1e-14 * z.abs() && dw.abs() <= 1e-14 * w.abs() {
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    // accept slow final convergence if the residual is tiny
                    if !(z.is_finite() && w.is_finite()) || z * sz <= 0.0 || w * sw <= 0.0 {
                        continue;
                    }
                }
                let scale = p.abs_scale(z, w);
                let (v0, gz, gw) = p.eval_real_with_gradient(z, w);
                if v0.abs() > 1e-8 * scale || (gz * z).hypot(gw * w) > 1e-6 * scale {
                    continue;
                }
                if out.iter().any(|n| (n.z - z).abs() <= 1e-6 * z.abs() && (n.w - w).abs() <= 1e-6 * w.abs()) {
                    continue;
                }
                let (hzz, hzw, hww) = p.hessian_real(z, w);
                out.push(RealNode { z, w, isolated: hzz * hww - hzw * hzw > 0.0 });
            }
        }
    }
    out.sort_by(|a, b| a.z.total_cmp(&b.z).then(a.w.total_cmp(&b.w)));
    Ok(out)
}
