//! Genus-zero Harnack curves in the circle chart of the real projective line.
//!
//! A curve is given by three families of `d` angles and two positive prefactors:
//!
//! ```text
//! z(t) = ρ_z Π sin((t-α_i)/2) / sin((t-β_i)/2)
//! w(t) = ρ_w Π sin((t-γ_i)/2) / sin((t-β_i)/2)
//! ```
//!
//! The `α_i` are the zeros of `z`, the `γ_i` the zeros of `w` and the `β_i`
//! their common poles. Counterclockwise the angles run through all α's, then
//! all β's, then all γ's. Each family is sorted counterclockwise from `α_1`.
//!
//! The boundary values are read off where the curve meets the coordinate lines:
//! `A_i = w(α_i)`, `B_i = 1/z(γ_i)` and `C_i = lim z/w` at `β_i`. For positive
//! prefactors `A > 0`, `B > 0` and `C` has sign `(-1)^d`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};

/// Parameters closer than this to a pole are rejected.
pub const POLE_TOL: f64 = 1e-12;
/// Allowed defect of `Π A_i B_i C_i = (-1)^d` for a boundary target.
pub const PRODUCT_TOL: f64 = 1e-8;
/// Newton stops once the max-norm of the log-ratio residual is below this.
pub const NEWTON_TOL: f64 = 1e-10;
const NEWTON_MAX_STEPS: usize = 200;
const STAGNATION_STEPS: usize = 50;
const IMPLICIT_RESIDUAL: f64 = 1e-9;
const NULL_SPACE_REL: f64 = 1e-7;

#[inline]
fn half_sin(x: f64, y: f64) -> f64 {
    ((x - y) / 2.0).sin()
}

/// Offsets of all `3d` angles from `α_1`, in `[0, 2π)`, in the order α, β, γ.
fn offsets(alpha: &[f64], beta: &[f64], gamma: &[f64]) -> Vec<f64> {
    let base = alpha[0];
    alpha.iter().chain(beta).chain(gamma).map(|&t| (t - base).rem_euclid(TAU)).collect()
}

/// Checks the counterclockwise order α's, β's, γ's. Ties are allowed only
/// inside a family, and only when `strict` is false.
pub(crate) fn check_cyclic_order(alpha: &[f64], beta: &[f64], gamma: &[f64], strict: bool) -> Result<()> {
    let d = alpha.len();
    if d == 0 || beta.len() != d || gamma.len() != d {
        return Err(Error::invalid("angle families must be non-empty and of equal length"));
    }
    if alpha.iter().chain(beta).chain(gamma).any(|t| !t.is_finite()) {
        return Err(Error::invalid("non-finite angle"));
    }
    let o = offsets(alpha, beta, gamma);
    for k in 1..o.len() {
        let across = k % d == 0;
        let ok = if across || strict { o[k] > o[k - 1] } else { o[k] >= o[k - 1] };
        if !ok {
            return Err(Error::invalid(format!(
                "angles are not in counterclockwise order alpha, beta, gamma (position {k})"
            )));
        }
    }
    Ok(())
}

/// Smallest cyclic gap between consecutive angles of the full sequence.
fn min_gap(o: &[f64]) -> f64 {
    let mut g = TAU - o[o.len() - 1] + o[0];
    for k in 1..o.len() {
        g = g.min(o[k] - o[k - 1]);
    }
    g
}

/// Middle of the largest cyclic gap, a point far from every parameter.
fn largest_gap_middle(alpha: &[f64], beta: &[f64], gamma: &[f64]) -> f64 {
    let o = offsets(alpha, beta, gamma);
    let (mut best, mut mid) = (TAU - o[o.len() - 1], o[o.len() - 1] + (TAU - o[o.len() - 1]) / 2.0);
    for k in 1..o.len() {
        if o[k] - o[k - 1] > best {
            best = o[k] - o[k - 1];
            mid = (o[k] + o[k - 1]) / 2.0;
        }
    }
    (alpha[0] + mid).rem_euclid(TAU)
}

/// Angles are stored lifted: `α_1` in `[0, 2π)` and every other angle in
/// `[α_1, α_1 + 2π)`, increasing. The sine products depend on the lift, since
/// moving one angle by `2π` flips the sign of `z` or `w`; this lift is the
/// one for which `A` and `B` are positive.
#[derive(Clone, Debug, PartialEq)]
pub struct Genus0Curve {
    d: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    rho_z: f64,
    rho_w: f64,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    d: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
    #[serde(default = "one")]
    rho_z: f64,
    #[serde(default = "one")]
    rho_w: f64,
}

fn one() -> f64 {
    1.0
}

impl Serialize for Genus0Curve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wrap = |v: &[f64]| v.iter().map(|t| t.rem_euclid(TAU)).collect();
        RawCurve {
            d: self.d,
            alpha: wrap(&self.alpha),
            beta: wrap(&self.beta),
            gamma: wrap(&self.gamma),
            rho_z: self.rho_z,
            rho_w: self.rho_w,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Genus0Curve {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = RawCurve::deserialize(de)?;
        if r.alpha.len() != r.d {
            return Err(serde::de::Error::custom(format!("d = {} but {} alpha angles", r.d, r.alpha.len())));
        }
        Genus0Curve::new(r.alpha, r.beta, r.gamma, r.rho_z, r.rho_w).map_err(serde::de::Error::custom)
    }
}

impl Genus0Curve {
    /// Any representatives mod `2π` are accepted.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>, rho_z: f64, rho_w: f64) -> Result<Self> {
        check_cyclic_order(&alpha, &beta, &gamma, false)?;
        if !(rho_z > 0.0 && rho_z.is_finite() && rho_w > 0.0 && rho_w.is_finite()) {
            return Err(Error::invalid("prefactors rho_z, rho_w must be positive"));
        }
        let d = alpha.len();
        let base = alpha[0].rem_euclid(TAU);
        let o = offsets(&alpha, &beta, &gamma);
        let lift = |k: usize| o[k * d..(k + 1) * d].iter().map(|x| base + x).collect();
        Ok(Genus0Curve { d, alpha: lift(0), beta: lift(1), gamma: lift(2), rho_z, rho_w })
    }

    /// Each family equally spaced within its third of the circle, starting at
    /// `0`, `2π/3` and `4π/3`. The prefactors are 1.
    pub fn equally_spaced(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("d must be positive"));
        }
        let fam = |start: f64| (0..d).map(|i| start + i as f64 * (TAU / 3.0) / d as f64).collect();
        Genus0Curve::new(fam(0.0), fam(TAU / 3.0), fam(2.0 * TAU / 3.0), 1.0, 1.0)
    }

    /// Random curve: cyclic gaps uniform in `[0.25, 1]` before normalization,
    /// a random rotation and prefactors log-uniform in `[1/2, 2]`.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("d must be positive"));
        }
        let gaps: Vec<f64> = (0..3 * d).map(|_| rng.gen_range(0.25..1.0)).collect();
        let total: f64 = gaps.iter().sum();
        let mut t = rng.gen_range(0.0..TAU);
        let mut all = Vec::with_capacity(3 * d);
        for g in gaps {
            all.push(t);
            t += g / total * TAU;
        }
        let rho = |rng: &mut R| (rng.gen_range(-1.0..1.0) * 2f64.ln()).exp();
        let (rz, rw) = (rho(rng), rho(rng));
        Genus0Curve::new(all[..d].to_vec(), all[d..2 * d].to_vec(), all[2 * d..].to_vec(), rz, rw)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Lifted angles, see the type documentation.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn rho_z(&self) -> f64 {
        self.rho_z
    }

    pub fn rho_w(&self) -> f64 {
        self.rho_w
    }

    /// The same angles with new prefactors.
    pub fn with_prefactors(&self, rho_z: f64, rho_w: f64) -> Result<Self> {
        Genus0Curve::new(self.alpha.clone(), self.beta.clone(), self.gamma.clone(), rho_z, rho_w)
    }

    /// Smallest cyclic gap between any two parameters.
    pub fn min_gap(&self) -> f64 {
        min_gap(&offsets(&self.alpha, &self.beta, &self.gamma))
    }

    /// Sine products without the prefactors; `t` must not be a pole.
    fn unit_point(&self, t: f64) -> (f64, f64) {
        let (mut z, mut w) = (1.0, 1.0);
        for i in 0..self.d {
            let s = half_sin(t, self.beta[i]);
            z *= half_sin(t, self.alpha[i]) / s;
            w *= half_sin(t, self.gamma[i]) / s;
        }
        (z, w)
    }

    /// The parametrization continued to `u` off the unit circle; on the circle
    /// `u = e^{it}` it agrees with [`evaluate_parametrization`].
    pub fn eval_complex(&self, u: Complex64) -> (Complex64, Complex64) {
        let mut z = Complex64::new(self.rho_z, 0.0);
        let mut w = Complex64::new(self.rho_w, 0.0);
        for i in 0..self.d {
            let b = Complex64::from_polar(1.0, self.beta[i]);
            let a = Complex64::from_polar(1.0, self.alpha[i]);
            let c = Complex64::from_polar(1.0, self.gamma[i]);
            z *= Complex64::from_polar(1.0, (self.beta[i] - self.alpha[i]) / 2.0) * (u - a) / (u - b);
            w *= Complex64::from_polar(1.0, (self.beta[i] - self.gamma[i]) / 2.0) * (u - c) / (u - b);
        }
        (z, w)
    }

    /// Applies a Möbius map of the unit circle to the parameter. The result
    /// describes the same curve, so the prefactors are recomputed.
    pub(crate) fn transported(&self, m: &Mobius) -> Result<Self> {
        let map = |v: &[f64]| -> Vec<f64> { v.iter().map(|&t| m.apply_angle(t)).collect() };
        let unit = Genus0Curve::new(map(&self.alpha), map(&self.beta), map(&self.gamma), 1.0, 1.0)?;
        let t0 = largest_gap_middle(&self.alpha, &self.beta, &self.gamma);
        let (z0, w0) = evaluate_parametrization(self, t0)?;
        let (z1, w1) = unit.unit_point(m.apply_angle(t0));
        let (rz, rw) = (z0 / z1, w0 / w1);
        if !(rz > 0.0 && rw > 0.0) {
            return Err(Error::invalid("map reverses the orientation of the circle"));
        }
        unit.with_prefactors(rz, rw)
    }

    /// The same curve reparametrized so that `α_1 = 0`, `β_1 = 2π/3` and
    /// `γ_1 = 4π/3`. Two parametrizations of one curve agree after this.
    pub fn gauge_normalized(&self) -> Result<Self> {
        let from = [self.alpha[0], self.beta[0], self.gamma[0]].map(|t| Complex64::from_polar(1.0, t));
        let to = [0.0, TAU / 3.0, 2.0 * TAU / 3.0].map(|t| Complex64::from_polar(1.0, t));
        let mut out = self.transported(&Mobius::through(from, to))?;
        // land exactly on the gauge values
        out.alpha[0] = 0.0;
        out.beta[0] = TAU / 3.0;
        out.gamma[0] = 2.0 * TAU / 3.0;
        Ok(out)
    }
}

/// Möbius map `u ↦ (m00 u + m01) / (m10 u + m11)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Mobius {
    m: [[Complex64; 2]; 2],
}

impl Mobius {
    pub(crate) fn new(m: [[Complex64; 2]; 2]) -> Self {
        Mobius { m }
    }

    // sends u1, u2, u3 to 0, 1, ∞
    fn to_standard(u: [Complex64; 3]) -> Self {
        let [u1, u2, u3] = u;
        Mobius { m: [[u2 - u3, -u1 * (u2 - u3)], [u2 - u1, -u3 * (u2 - u1)]] }
    }

    fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        Mobius { m: [[d, -b], [-c, a]] }
    }

    fn compose(&self, inner: &Mobius) -> Self {
        let (p, q) = (self.m, inner.m);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = p[i][0] * q[0][j] + p[i][1] * q[1][j];
            }
        }
        Mobius { m }
    }

    /// The map sending `from[k]` to `to[k]`.
    pub(crate) fn through(from: [Complex64; 3], to: [Complex64; 3]) -> Self {
        Mobius::to_standard(to).inverse().compose(&Mobius::to_standard(from))
    }

    pub(crate) fn apply(&self, u: Complex64) -> Complex64 {
        let [[a, b], [c, d]] = self.m;
        (a * u + b) / (c * u + d)
    }

    /// Image of `e^{it}` as an angle in `[0, 2π)`; the map must preserve the circle.
    pub(crate) fn apply_angle(&self, t: f64) -> f64 {
        self.apply(Complex64::from_polar(1.0, t)).arg().rem_euclid(TAU)
    }
}

pub fn evaluate_parametrization(c: &Genus0Curve, t: f64) -> Result<(f64, f64)> {
    for &b in &c.beta {
        let r = (t - b).rem_euclid(TAU);
        if r.min(TAU - r) < POLE_TOL {
            return Err(Error::invalid(format!("t = {t} is a pole of the parametrization")));
        }
    }
    let (z, w) = c.unit_point(t);
    Ok((c.rho_z * z, c.rho_w * w))
}

/// Values where the curve meets `z = 0`, `w = 0` and the line at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTriple")]
pub struct BoundaryTriple {
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTriple {
    #[serde(rename = "A")]
    a: Vec<f64>,
    #[serde(rename = "B")]
    b: Vec<f64>,
    #[serde(rename = "C")]
    c: Vec<f64>,
}

impl TryFrom<RawTriple> for BoundaryTriple {
    type Error = Error;
    fn try_from(r: RawTriple) -> Result<Self> {
        BoundaryTriple::new(r.a, r.b, r.c)
    }
}

fn constant_sign(v: &[f64]) -> bool {
    v.iter().all(|&x| x > 0.0) || v.iter().all(|&x| x < 0.0)
}

impl BoundaryTriple {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if a.is_empty() || b.len() != a.len() || c.len() != a.len() {
            return Err(Error::invalid("A, B and C must be non-empty and of equal length"));
        }
        if a.iter().chain(&b).chain(&c).any(|x| !x.is_finite() || *x == 0.0) {
            return Err(Error::invalid("boundary values must be finite and nonzero"));
        }
        Ok(BoundaryTriple { a, b, c })
    }

    pub fn d(&self) -> usize {
        self.a.len()
    }

    /// `|log|Π A_i B_i C_i||`, or infinity when the sign of the product is not `(-1)^d`.
    pub fn product_defect(&self) -> f64 {
        let all = || self.a.iter().chain(&self.b).chain(&self.c);
        let negatives = all().filter(|x| **x < 0.0).count();
        if negatives % 2 != self.d() % 2 {
            return f64::INFINITY;
        }
        all().map(|x| x.abs().ln()).sum::<f64>().abs()
    }

    pub fn has_constant_signs(&self) -> bool {
        constant_sign(&self.a) && constant_sign(&self.b) && constant_sign(&self.c)
    }
}

pub fn boundary_map(c: &Genus0Curve) -> BoundaryTriple {
    let d = c.d;
    let (al, be, ga) = (&c.alpha, &c.beta, &c.gamma);
    let prod = |x: f64, num: &[f64], den: &[f64]| -> f64 {
        (0..d).map(|j| half_sin(x, num[j]) / half_sin(x, den[j])).product()
    };
    BoundaryTriple {
        a: al.iter().map(|&x| c.rho_w * prod(x, ga, be)).collect(),
        b: ga.iter().map(|&x| prod(x, be, al) / c.rho_z).collect(),
        c: be.iter().map(|&x| c.rho_z / c.rho_w * prod(x, al, ga)).collect(),
    }
}

/// One rank-one block for a triple `(a, b, c)` of the line chart: the zero of
/// `z`, the zero of `w` and the pole. Rows and columns are ordered
/// `(A, B, C)` and `(a, b, c)`.
pub fn elementary_block(a: f64, b: f64, c: f64) -> [[f64; 3]; 3] {
    let (p, q, r) = (1.0 / (a - b), 1.0 / (c - a), 1.0 / (b - c));
    [[p + q, -p, -q], [-p, p + r, -r], [-q, -r, q + r]]
}

/// Line chart `x = tan((t - θ0)/2)` with the point at infinity in the widest
/// gap between parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct LineChart {
    pub theta0: f64,
    /// Images of the zeros of `z`, the zeros of `w` and the poles.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl LineChart {
    pub fn new(curve: &Genus0Curve) -> Self {
        let theta0 = (largest_gap_middle(&curve.alpha, &curve.beta, &curve.gamma) + PI).rem_euclid(TAU);
        let x = |v: &[f64]| v.iter().map(|&t| ((t - theta0) / 2.0).tan()).collect();
        LineChart { theta0, a: x(&curve.alpha), b: x(&curve.gamma), c: x(&curve.beta) }
    }

    /// Sum of the elementary blocks over all `d³` triples, divided by `d`:
    /// the Jacobian of `log |A, B, C|` in this chart with its leading constants fixed.
    pub fn jacobian(&self) -> DMatrix<f64> {
        let d = self.a.len();
        let mut j = DMatrix::zeros(3 * d, 3 * d);
        for (i, &a) in self.a.iter().enumerate() {
            for (jj, &b) in self.b.iter().enumerate() {
                for (k, &c) in self.c.iter().enumerate() {
                    let blk = elementary_block(a, b, c);
                    let idx = [i, d + jj, 2 * d + k];
                    for r in 0..3 {
                        for s in 0..3 {
                            j[(idx[r], idx[s])] += blk[r][s];
                        }
                    }
                }
            }
        }
        j / d as f64
    }

    /// `(1, …, 1)` and `(a, b, c)`, the infinitesimal affine maps of the line.
    pub fn kernel_vectors(&self) -> [DVector<f64>; 2] {
        let n = 3 * self.a.len();
        let coords: Vec<f64> = self.a.iter().chain(&self.b).chain(&self.c).copied().collect();
        [DVector::from_element(n, 1.0), DVector::from_vec(coords)]
    }

    /// `dt/dx` for every parameter, in the order of [`LineChart::jacobian`].
    fn dtheta_dx(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).chain(&self.c).map(|x| 2.0 / (1.0 + x * x)).collect()
    }

    /// The kernel vectors of the line chart carried to the angles.
    pub fn kernel_vectors_on_circle(&self) -> [DVector<f64>; 2] {
        let s = DVector::from_vec(self.dtheta_dx());
        self.kernel_vectors().map(|v| v.component_mul(&s))
    }
}

/// Angles in the column order of [`jacobian_log_abc`]: zeros of `z`, zeros of `w`, poles.
pub fn jacobian_parameters(c: &Genus0Curve) -> Vec<f64> {
    c.alpha.iter().chain(&c.gamma).chain(&c.beta).copied().collect()
}

/// Jacobian of `(log|A|, log|B|, log|C|)` with respect to the angles at fixed
/// prefactors.
///
/// Columns are `(α, γ, β)`, so that column `k` is the parameter whose boundary
/// value is row `k` and the matrix is symmetric. The line-chart block sum is
/// carried to the angles by the chain rule, including the dependence of the
/// line chart's leading constants on the angles. Rotating every angle at once
/// is in the kernel. Affine maps of the line chart move the prefactors, so
/// their images land in the span of [`torus_directions`] instead.
pub fn jacobian_log_abc(c: &Genus0Curve) -> DMatrix<f64> {
    let d = c.d;
    let chart = LineChart::new(c);
    let mut j = chart.jacobian();
    let dx: Vec<f64> = chart.dtheta_dx().iter().map(|s| 1.0 / s).collect();
    for col in 0..3 * d {
        for row in 0..3 * d {
            j[(row, col)] *= dx[col];
        }
    }
    // z leading constant a0 = ρ_z Π cos((α-θ0)/2) / cos((β-θ0)/2), w's b0 likewise with γ
    let half_tan = |t: f64| 0.5 * ((t - chart.theta0) / 2.0).tan();
    let mut g_a0 = vec![0.0; 3 * d];
    let mut g_b0 = vec![0.0; 3 * d];
    for i in 0..d {
        g_a0[i] = -half_tan(c.alpha[i]);
        g_b0[d + i] = -half_tan(c.gamma[i]);
        g_a0[2 * d + i] = half_tan(c.beta[i]);
        g_b0[2 * d + i] = half_tan(c.beta[i]);
    }
    let [t_z, t_w] = torus_directions(d);
    for row in 0..3 * d {
        for col in 0..3 * d {
            j[(row, col)] += t_z[row] * g_a0[col] + t_w[row] * g_b0[col];
        }
    }
    j
}

/// Changes of `log |A, B, C|` under `z ↦ λz` and `w ↦ μw`, per unit of `log λ`, `log μ`.
pub fn torus_directions(d: usize) -> [DVector<f64>; 2] {
    let mut tz = DVector::zeros(3 * d);
    let mut tw = DVector::zeros(3 * d);
    for i in 0..d {
        tz[d + i] = -1.0;
        tz[2 * d + i] = 1.0;
        tw[i] = 1.0;
        tw[2 * d + i] = -1.0;
    }
    [tz, tw]
}

/// Index order that sorts `v` by increasing absolute value.
fn order_by_abs(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()));
    idx
}

/// `+1` if `v` increases in absolute value along the index, `-1` if it decreases.
fn abs_direction(v: &[f64]) -> f64 {
    if v.len() < 2 || v[v.len() - 1].abs() >= v[0].abs() {
        1.0
    } else {
        -1.0
    }
}

fn arrange(target: &[f64], direction: f64) -> Vec<f64> {
    let mut out: Vec<f64> = order_by_abs(target).into_iter().map(|i| target[i]).collect();
    if direction < 0.0 {
        out.reverse();
    }
    out
}

struct NewtonState {
    d: usize,
    target: [Vec<f64>; 3],
}

impl NewtonState {
    fn curve(&self, free: &[f64]) -> Result<Genus0Curve> {
        let d = self.d;
        let fam = |start: f64, k: usize| -> Vec<f64> {
            std::iter::once(start).chain(free[k * (d - 1)..(k + 1) * (d - 1)].iter().copied()).collect()
        };
        Genus0Curve::new(fam(0.0, 0), fam(TAU / 3.0, 1), fam(2.0 * TAU / 3.0, 2), 1.0, 1.0)
    }

    /// Log-ratios `log|X_i/X_1|` of the curve minus those of the target, `i ≥ 2`.
    fn residual(&self, c: &Genus0Curve) -> DVector<f64> {
        let bt = boundary_map(c);
        let got = [&bt.a, &bt.b, &bt.c];
        let mut r = Vec::with_capacity(3 * (self.d - 1));
        for (have_f, want_f) in got.iter().zip(&self.target) {
            for i in 1..self.d {
                let have = (have_f[i] / have_f[0]).abs().ln();
                let want = (want_f[i] / want_f[0]).abs().ln();
                r.push(have - want);
            }
        }
        DVector::from_vec(r)
    }

    /// Derivative of the residual with respect to the free angles.
    fn jacobian(&self, c: &Genus0Curve) -> DMatrix<f64> {
        let d = self.d;
        let j = jacobian_log_abc(c);
        // residual families (A, B, C) pair with angle families (α, γ, β) in J's column order;
        // free angles are ordered (α, β, γ)
        let col_of = |k: usize| -> usize {
            let (fam, i) = (k / (d - 1), k % (d - 1) + 1);
            [0, 2 * d, d][fam] + i
        };
        let n = 3 * (d - 1);
        DMatrix::from_fn(n, n, |r, k| {
            let (fam, i) = (r / (d - 1), r % (d - 1) + 1);
            j[(fam * d + i, col_of(k))] - j[(fam * d, col_of(k))]
        })
    }
}

/// Result of [`invert_boundary`] together with iteration diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Inversion {
    pub curve: Genus0Curve,
    pub steps: usize,
    pub residual: f64,
}

/// The genus-zero curve with the given boundary values, in the gauge
/// `α_1 = 0`, `β_1 = 2π/3`, `γ_1 = 4π/3`.
pub fn invert_boundary(target: &BoundaryTriple) -> Result<Genus0Curve> {
    invert_boundary_detailed(target).map(|inv| inv.curve)
}

pub fn invert_boundary_detailed(target: &BoundaryTriple) -> Result<Inversion> {
    let d = target.d();
    if !target.has_constant_signs() {
        return Err(Error::invalid("each of A, B, C must have constant sign"));
    }
    if target.a[0] < 0.0 || target.b[0] < 0.0 {
        return Err(Error::invalid("A and B must be positive; substitute w -> -w or z -> -z first"));
    }
    let defect = target.product_defect();
    if defect > PRODUCT_TOL {
        return Err(Error::invalid(format!("product of A_i B_i C_i differs from (-1)^d (log defect {defect:.3e})")));
    }

    let start = Genus0Curve::equally_spaced(d)?;
    // boundary values are monotone along each family; match the target to that order
    let s = boundary_map(&start);
    let state = NewtonState {
        d,
        target: [
            arrange(&target.a, abs_direction(&s.a)),
            arrange(&target.b, abs_direction(&s.b)),
            arrange(&target.c, abs_direction(&s.c)),
        ],
    };

    let mut x: Vec<f64> = [&start.alpha, &start.beta, &start.gamma].iter().flat_map(|v| v[1..].to_vec()).collect();
    let mut curve = start;
    let mut r = state.residual(&curve);
    let mut steps = 0;
    let (mut best, mut since_best) = (r.amax(), 0);
    while r.amax() >= NEWTON_TOL {
        if steps >= NEWTON_MAX_STEPS || since_best >= STAGNATION_STEPS {
            return Err(Error::NoConvergence {
                what: "boundary inversion".into(),
                residual: r.amax(),
                iterations: steps,
            });
        }
        let jac = state.jacobian(&curve);
        let dx = jac.lu().solve(&(-&r)).ok_or_else(|| Error::NoConvergence {
            what: "boundary inversion: singular Jacobian".into(),
            residual: r.amax(),
            iterations: steps,
        })?;
        let clip = 0.5 * curve.min_gap() / dx.amax().max(f64::MIN_POSITIVE);
        let mut lambda = clip.min(1.0);
        let norm = r.norm();
        let accepted = loop {
            let trial: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a + lambda * b).collect();
            if let Ok(c) = state.curve(&trial) {
                let rt = state.residual(&c);
                if rt.norm() <= (1.0 - 1e-4 * lambda) * norm {
                    break Some((trial, c, rt));
                }
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                break None;
            }
        };
        steps += 1;
        match accepted {
            Some((trial, c, rt)) => {
                x = trial;
                curve = c;
                r = rt;
            }
            None => since_best = STAGNATION_STEPS,
        }
        if r.amax() < 0.999 * best {
            best = r.amax();
            since_best = 0;
        } else {
            since_best += 1;
        }
    }

    // the torus action fixes the prefactors: A_1 = ρ_w A_1(ρ=1), B_1 = B_1(ρ=1)/ρ_z
    let unit = boundary_map(&curve);
    let rho_w = state.target[0][0] / unit.a[0];
    let rho_z = unit.b[0] / state.target[1][0];
    let curve = curve.with_prefactors(rho_z, rho_w)?;
    Ok(Inversion { curve, steps, residual: r.amax() })
}

/// Parameter values used to sample the curve: `n` points evenly spread over
/// the circle, nudged away from the poles.
fn sample_parameters(c: &Genus0Curve, n: usize, phase: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let mut t = c.alpha[0] + TAU * (k as f64 + phase) / n as f64;
            while c.beta.iter().any(|&b| half_sin(t, b).abs() < 1e-4) {
                t += 1e-3;
            }
            t
        })
        .collect()
}

/// Implicit equation of the curve, normalized to max coefficient 1 with
/// `p00 > 0` (or the first nonzero coefficient positive).
pub fn implicitize(c: &Genus0Curve) -> Result<BivariatePolynomial> {
    let d = c.d;
    let monomials: Vec<(usize, usize)> = (0..=d).flat_map(|i| (0..=d - i).map(move |j| (i, j))).collect();
    let m = monomials.len();
    let n = m + 10;
    let pts: Vec<(f64, f64)> =
        sample_parameters(c, 3 * n, 0.37).into_iter().map(|t| evaluate_parametrization(c, t)).collect::<Result<_>>()?;

    // geometric-mean scales keep the monomial columns comparable
    let gm =
        |f: &dyn Fn(&(f64, f64)) -> f64| (pts.iter().map(|p| f(p).abs().ln()).sum::<f64>() / pts.len() as f64).exp();
    let (sz, sw) = (gm(&|p| p.0), gm(&|p| p.1));
    let mut a = DMatrix::from_fn(pts.len(), m, |r, k| {
        let (i, j) = monomials[k];
        (pts[r].0 / sz).powi(i as i32) * (pts[r].1 / sw).powi(j as i32)
    });
    for mut row in a.row_iter_mut() {
        let nrm = row.norm();
        row /= nrm;
    }
    let svd = a.svd(false, true);
    let sv = &svd.singular_values;
    let smax = sv.max();
    let nullity = sv.iter().filter(|&&s| s < NULL_SPACE_REL * smax).count();
    if nullity != 1 {
        return Err(Error::ParametrizationDegenerate(format!("null space of dimension {nullity}")));
    }
    let kmin = sv.imin();
    let v_t = svd.v_t.expect("requested");
    let mut p = BivariatePolynomial::zero(d);
    for (k, &(i, j)) in monomials.iter().enumerate() {
        p.set_coeff(i, j, v_t[(kmin, k)] / (sz.powi(i as i32) * sw.powi(j as i32)));
    }
    let lead = if p.coeff(0, 0) != 0.0 {
        p.coeff(0, 0)
    } else {
        monomials.iter().map(|&(i, j)| p.coeff(i, j)).find(|v| *v != 0.0).unwrap_or(1.0)
    };
    let p = p.scaled(lead.signum() / p.max_abs_coeff());

    let mut worst = 0.0f64;
    for t in sample_parameters(c, 100, 0.61) {
        let (z, w) = evaluate_parametrization(c, t)?;
        worst = worst.max(p.eval_real(z, w).abs() / p.abs_scale(z, w));
    }
    if worst > IMPLICIT_RESIDUAL {
        return Err(Error::ParametrizationDegenerate(format!("implicit residual {worst:.3e} on fresh samples")));
    }
    Ok(p)
}
