//! Composite numerical certificate that a real curve is Harnack.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amoeba::{amoeba_area, random_interior_points, rasterize_amoeba, two_to_one_check, Window};
use crate::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};
use crate::holes::detect_holes;
use crate::kasteleyn::{boundary_points, BoundaryPoints};
use crate::ovals::{find_real_nodes, trace_real_ovals};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackOptions {
    pub seed: u64,
    /// Raster side length for the area and hole checks.
    pub resolution: usize,
    /// Padding of the automatic window, in log units.
    pub pad: f64,
    pub area_tolerance: f64,
    pub sample_points: usize,
}

impl Default for HarnackOptions {
    fn default() -> Self {
        HarnackOptions { seed: 0, resolution: 600, pad: 12.0, area_tolerance: 0.02, sample_points: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCheck {
    pub pass: bool,
    pub points: Option<BoundaryPoints>,
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaCheck {
    pub pass: bool,
    pub area: f64,
    pub error: f64,
    /// `π² d² / 2`.
    pub target: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub x: f64,
    pub y: f64,
    pub preimages: usize,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoToOneCheck {
    pub pass: bool,
    pub samples: Vec<SamplePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OvalCheck {
    pub pass: bool,
    pub compact_ovals: usize,
    pub isolated_nodes: usize,
    /// Holes above the node threshold on the raster.
    pub hole_genus: usize,
    pub max_genus: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackCertificate {
    pub pass: bool,
    pub boundary: BoundaryCheck,
    pub area: AreaCheck,
    pub two_to_one: TwoToOneCheck,
    pub ovals: OvalCheck,
}

fn constant_sign(v: &[f64]) -> bool {
    v.iter().all(|&x| x > 0.0) || v.iter().all(|&x| x < 0.0)
}

fn check_boundary(p: &BivariatePolynomial) -> Result<BoundaryCheck> {
    match boundary_points(p) {
        Ok(bp) => {
            let signs = [&bp.on_w0, &bp.on_z0, &bp.at_inf].iter().all(|v| constant_sign(v));
            let detail = (!signs).then(|| "boundary points change sign".to_string());
            Ok(BoundaryCheck { pass: signs, points: Some(bp), detail })
        }
        Err(Error::NonHarnackBoundary(msg)) => Ok(BoundaryCheck { pass: false, points: None, detail: Some(msg) }),
        Err(e) => Err(e),
    }
}

pub fn verify_harnack(p: &BivariatePolynomial) -> Result<HarnackCertificate> {
    verify_harnack_with(p, &HarnackOptions::default())
}

pub fn verify_harnack_with(p: &BivariatePolynomial, opts: &HarnackOptions) -> Result<HarnackCertificate> {
    let d = p.d();
    if d == 0 {
        return Err(Error::invalid("constant polynomial"));
    }
    let boundary = check_boundary(p)?;

    let window = Window::auto(p, opts.pad)?;
    let grid = rasterize_amoeba(p, window, opts.resolution, opts.resolution)?;
    let est = amoeba_area(&grid);
    let target = PI * PI * (d * d) as f64 / 2.0;
    let ratio = est.area / target;
    let area =
        AreaCheck { pass: (ratio - 1.0).abs() <= opts.area_tolerance, area: est.area, error: est.error, target, ratio };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples = Vec::new();
    for (x, y) in random_interior_points(&grid, opts.sample_points, 2, &mut rng) {
        let pre = two_to_one_check(p, x, y)?;
        samples.push(SamplePoint { x, y, preimages: pre.total_multiplicity(), degenerate: pre.degenerate() });
    }
    let two_to_one = TwoToOneCheck {
        pass: samples.len() == opts.sample_points && samples.iter().all(|s| s.preimages == 2 && !s.degenerate),
        samples,
    };

    let max_genus = (d - 1) * d.saturating_sub(2) / 2;
    let compact_ovals = trace_real_ovals(p, &window)?.iter().filter(|o| o.compact).count();
    let isolated_nodes = find_real_nodes(p, &window)?.iter().filter(|n| n.isolated).count();
    let hole_genus = match detect_holes(p, &grid) {
        Ok(r) => r.genus,
        Err(Error::HoleAssignmentFailed(_)) => usize::MAX,
        Err(e) => return Err(e),
    };
    // a Harnack curve is maximal: every missing oval is an isolated real node
    let ovals = OvalCheck {
        pass: compact_ovals + isolated_nodes == max_genus && hole_genus <= max_genus,
        compact_ovals,
        isolated_nodes,
        hole_genus,
        max_genus,
    };

    Ok(HarnackCertificate {
        pass: boundary.pass && area.pass && two_to_one.pass && ovals.pass,
        boundary,
        area,
        two_to_one,
        ovals,
    })
}
