//! Isoradial dimer weights and the prefactor-free genus-zero curves.
//!
//! Each zig-zag path of the honeycomb carries one unit vector `e^{iθ}`: the
//! row paths carry the γ's, the column paths the α's and the diagonal paths
//! the β's. An edge lies on two paths with angles `θ, θ'` and gets weight
//! `2|sin((θ - θ')/2)|`, the length of the rhombus diagonal dual to the edge.
//! With all Kasteleyn signs positive the spectral curve is the prefactor-free
//! sine parametrization with both coordinates multiplied by `(-1)^d`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amoeba::amoeba_membership;
use crate::error::{Error, Result};
use crate::genus0::{check_cyclic_order, evaluate_parametrization, implicitize, Genus0Curve, Mobius};
use crate::kasteleyn::characteristic_polynomial;
use crate::lattice::EdgeWeights;

pub const SPECTRAL_TOL: f64 = 1e-8;
const CHECK_SAMPLES: usize = 100;
const SHIFT_TOL: f64 = 1e-13;
const SHIFT_STARTS: usize = 5;
const SHIFT_MAX_STEPS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoradialAngles {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

#[derive(Deserialize)]
struct RawAngles {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl<'de> Deserialize<'de> for IsoradialAngles {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = RawAngles::deserialize(de)?;
        IsoradialAngles::new(r.alpha, r.beta, r.gamma).map_err(serde::de::Error::custom)
    }
}

impl IsoradialAngles {
    /// Fails with [`Error::NotIsoradial`] unless the three families occupy
    /// disjoint arcs in the order α, β, γ.
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        check_cyclic_order(&alpha, &beta, &gamma, false).map_err(|_| Error::NotIsoradial)?;
        Ok(IsoradialAngles { alpha, beta, gamma })
    }

    pub fn d(&self) -> usize {
        self.alpha.len()
    }

    /// The curve with the same angles and unit prefactors.
    pub fn curve(&self) -> Genus0Curve {
        Genus0Curve::new(self.alpha.clone(), self.beta.clone(), self.gamma.clone(), 1.0, 1.0)
            .expect("validated on construction")
    }

    pub fn from_curve(c: &Genus0Curve) -> Self {
        IsoradialAngles { alpha: c.alpha().to_vec(), beta: c.beta().to_vec(), gamma: c.gamma().to_vec() }
    }

    /// Families with repeated angles. Such angles are accepted; they only make
    /// rhombi of parallel tracks, which no edge of the honeycomb crosses.
    pub fn coincidences(&self) -> Vec<&'static str> {
        let rep = |v: &[f64]| v.windows(2).any(|p| (p[1] - p[0]).abs() < 1e-12);
        [("alpha", &self.alpha), ("beta", &self.beta), ("gamma", &self.gamma)]
            .into_iter()
            .filter(|(_, v)| rep(v))
            .map(|(n, _)| n)
            .collect()
    }
}

fn chord(s: f64, t: f64) -> f64 {
    2.0 * ((s - t) / 2.0).sin().abs()
}

pub fn isoradial_weights(ang: &IsoradialAngles) -> Result<EdgeWeights> {
    let d = ang.d();
    let (al, be, ga) = (&ang.alpha, &ang.beta, &ang.gamma);
    // c(x,y) lies on row path y and column path x, a(x,y) on row path y and
    // diagonal path x+y, b(x,y) on column path x and diagonal path x+y
    let c = (0..d).map(|y| (0..d).map(|x| chord(ga[y], al[x])).collect()).collect();
    let a = (0..d).map(|y| (0..d).map(|x| chord(ga[y], be[(x + y) % d])).collect()).collect();
    let b = (0..d).map(|y| (0..d).map(|x| chord(al[x], be[(x + y) % d])).collect()).collect();
    EdgeWeights::new(d, a, b, c)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCheck {
    pub pass: bool,
    /// Largest `|P(z, w)| / Σ|p_ij||z|^i|w|^j` over the samples.
    pub max_residual: f64,
    pub samples: usize,
    /// Factor `(-1)^d` applied to both coordinates of the parametrization.
    pub sign: f64,
}

/// Evaluates the spectral curve of [`isoradial_weights`] along the
/// prefactor-free parametrization.
pub fn isoradial_spectral_check(ang: &IsoradialAngles) -> Result<SpectralCheck> {
    let p = characteristic_polynomial(&isoradial_weights(ang)?)?;
    let curve = ang.curve();
    let sign = if ang.d().is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut worst = 0.0f64;
    let mut samples = 0;
    for k in 0..CHECK_SAMPLES {
        let t = std::f64::consts::TAU * (k as f64 + 0.5) / CHECK_SAMPLES as f64;
        let Ok((z, w)) = evaluate_parametrization(&curve, t) else { continue };
        let (z, w) = (sign * z, sign * w);
        worst = worst.max(p.eval_real(z, w).abs() / p.abs_scale(z, w));
        samples += 1;
    }
    Ok(SpectralCheck { pass: worst < SPECTRAL_TOL, max_residual: worst, samples, sign })
}

/// `(log|z(u)|, log|w(u)|)` and its Jacobian in `(Re u, Im u)`.
fn torus_residual(c: &Genus0Curve, u: Complex64) -> ([f64; 2], [[f64; 2]; 2]) {
    let (z, w) = c.eval_complex(u);
    let mut dz = Complex64::new(0.0, 0.0);
    let mut dw = Complex64::new(0.0, 0.0);
    for i in 0..c.d() {
        let pole = 1.0 / (u - Complex64::from_polar(1.0, c.beta()[i]));
        dz += 1.0 / (u - Complex64::from_polar(1.0, c.alpha()[i])) - pole;
        dw += 1.0 / (u - Complex64::from_polar(1.0, c.gamma()[i])) - pole;
    }
    // ∇ log|f| = (Re f'/f, -Im f'/f)
    ([z.norm().ln(), w.norm().ln()], [[dz.re, -dz.im], [dw.re, -dw.im]])
}

/// Damped Newton for the parameter inside the unit disk where the curve meets
/// the unit torus.
fn torus_point(c: &Genus0Curve, start: Complex64) -> Option<Complex64> {
    let mut u = start;
    let (mut f, mut jac) = torus_residual(c, u);
    for _ in 0..SHIFT_MAX_STEPS {
        let norm = f[0].hypot(f[1]);
        if norm < SHIFT_TOL {
            return Some(u);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let dx = -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det;
        let dy = -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det;
        let step = Complex64::new(dx, dy);
        // stay strictly inside the disk
        let room = 1.0 - u.norm();
        let mut lambda = if step.norm() > 0.5 * room { 0.5 * room / step.norm() } else { 1.0 };
        loop {
            let trial = u + step * lambda;
            let (ft, jt) = torus_residual(c, trial);
            if ft[0].hypot(ft[1]) <= (1.0 - 1e-4 * lambda) * norm {
                u = trial;
                f = ft;
                jac = jt;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return None;
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub enum ShiftOutcome {
    /// `T(u) = (u - ζ)/(1 - ζ̄u)` reparametrizes `c` into the prefactor-free
    /// curve `shifted`; `T(0) = -ζ` is the parameter on the unit torus.
    Isoradial {
        zeta: Complex64,
        shifted: Genus0Curve,
    },
    NotIsoradial,
}

pub fn find_isoradial_shift(c: &Genus0Curve) -> Result<ShiftOutcome> {
    if !amoeba_membership(&implicitize(c)?, 0.0, 0.0)? {
        return Ok(ShiftOutcome::NotIsoradial);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut starts = vec![Complex64::new(0.0, 0.0)];
    while starts.len() < SHIFT_STARTS {
        let (r, t): (f64, f64) = (rand::Rng::gen_range(&mut rng, 0.0..0.9), rand::Rng::gen_range(&mut rng, 0.0..6.3));
        starts.push(Complex64::from_polar(r, t));
    }
    let found: Vec<Complex64> = starts.iter().filter_map(|&s| torus_point(c, s)).collect();
    let Some(&u0) = found.first() else {
        let (f, _) = torus_residual(c, Complex64::new(0.0, 0.0));
        return Err(Error::NoConvergence {
            what: "isoradial shift".into(),
            residual: f[0].hypot(f[1]),
            iterations: SHIFT_MAX_STEPS,
        });
    };
    if let Some(other) = found.iter().find(|v| (**v - u0).norm() > 1e-8) {
        return Err(Error::invalid(format!("two torus points {u0} and {other} inside the disk")));
    }
    let zeta = -u0;
    let one = Complex64::new(1.0, 0.0);
    // T⁻¹(u) = (u + ζ)/(1 + ζ̄u) sends u0 to 0
    let t_inv = Mobius::new([[one, zeta], [zeta.conj(), one]]);
    let shifted = c.transported(&t_inv)?;
    Ok(ShiftOutcome::Isoradial { zeta, shifted })
}
