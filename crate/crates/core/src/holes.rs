//! Bounded complement components of the amoeba and the affine pieces of the
//! Ronkin function over all complement components.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amoeba::{boundary_box, rasterize_amoeba, require_leading_w, AmoebaGrid, Window};
use crate::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};
use crate::numerics::roots_exact;
use crate::ovals::find_real_nodes;
use crate::ronkin::{ronkin, ronkin_gradient};

/// Holes up to this many pixels are reported as candidate nodes.
pub const NODE_PIXELS: usize = 4;
const FAR: f64 = 20.0;
const GRADIENT_TOL: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    /// Interior lattice point `(i, j)`: the gradient of `R` on the hole.
    pub order: (usize, usize),
    pub pixels: usize,
    pub area: f64,
    /// Pixel center nearest the centroid.
    pub center: (f64, f64),
    /// `R - i x - j y` on the hole.
    pub intercept: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeSource {
    /// A complement component of at most [`NODE_PIXELS`] pixels.
    SmallHole,
    /// An isolated real singular point.
    RealNode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateNode {
    pub point: (f64, f64),
    pub source: NodeSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoleReport {
    pub genus: usize,
    pub holes: Vec<Hole>,
    pub candidate_nodes: Vec<CandidateNode>,
}

struct Component {
    pixels: Vec<(usize, usize)>,
    bounded: bool,
}

// 4-connected components of pixels outside both the amoeba and its band
fn complement_components(grid: &AmoebaGrid) -> Vec<Component> {
    let (nx, ny) = (grid.nx, grid.ny);
    let free = |ix: usize, iy: usize| !grid.membership[iy * nx + ix] && !grid.band[iy * nx + ix];
    let mut label = vec![usize::MAX; nx * ny];
    let mut out = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            if !free(ix, iy) || label[iy * nx + ix] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = Component { pixels: Vec::new(), bounded: true };
            let mut queue = VecDeque::from([(ix, iy)]);
            label[iy * nx + ix] = id;
            while let Some((a, b)) = queue.pop_front() {
                comp.pixels.push((a, b));
                if a == 0 || b == 0 || a == nx - 1 || b == ny - 1 {
                    comp.bounded = false;
                }
                let mut visit = |c: usize, e: usize| {
                    if free(c, e) && label[e * nx + c] == usize::MAX {
                        label[e * nx + c] = id;
                        queue.push_back((c, e));
                    }
                };
                if a > 0 {
                    visit(a - 1, b);
                }
                if a + 1 < nx {
                    visit(a + 1, b);
                }
                if b > 0 {
                    visit(a, b - 1);
                }
                if b + 1 < ny {
                    visit(a, b + 1);
                }
            }
            out.push(comp);
        }
    }
    out
}

fn lattice_point(g: (f64, f64)) -> Option<(usize, usize)> {
    let (i, j) = (g.0.round(), g.1.round());
    if (g.0 - i).abs() > GRADIENT_TOL || (g.1 - j).abs() > GRADIENT_TOL || i < 0.0 || j < 0.0 {
        return None;
    }
    Some((i as usize, j as usize))
}

/// Finds the bounded complement components in `grid`, assigns each its
/// interior lattice point and reads off the Ronkin intercept there.
///
/// `genus` counts holes larger than [`NODE_PIXELS`]. Smaller components,
/// and isolated real singular points inside the window, are listed as
/// candidate nodes.
pub fn detect_holes(p: &BivariatePolynomial, grid: &AmoebaGrid) -> Result<HoleReport> {
    require_leading_w(p)?;
    let d = p.d();
    let mut holes = Vec::new();
    let mut candidate_nodes = Vec::new();
    for comp in complement_components(grid).into_iter().filter(|c| c.bounded) {
        let n = comp.pixels.len() as f64;
        let cx = comp.pixels.iter().map(|&(a, _)| grid.x_at(a)).sum::<f64>() / n;
        let cy = comp.pixels.iter().map(|&(_, b)| grid.y_at(b)).sum::<f64>() / n;
        let &(a, b) = comp
            .pixels
            .iter()
            .min_by(|&&(a, b), &&(c, e)| {
                let da = (grid.x_at(a) - cx).hypot(grid.y_at(b) - cy);
                let dc = (grid.x_at(c) - cx).hypot(grid.y_at(e) - cy);
                da.total_cmp(&dc)
            })
            .expect("nonempty component");
        let center = (grid.x_at(a), grid.y_at(b));
        if comp.pixels.len() <= NODE_PIXELS {
            candidate_nodes.push(CandidateNode { point: center, source: NodeSource::SmallHole });
            continue;
        }
        let g = ronkin_gradient(p, center.0, center.1)?;
        let order = lattice_point(g).ok_or_else(|| {
            Error::HoleAssignmentFailed(format!(
                "gradient ({:.4}, {:.4}) at {center:?} is not a lattice point",
                g.0, g.1
            ))
        })?;
        if order.0 == 0 || order.1 == 0 || order.0 + order.1 >= d {
            return Err(Error::HoleAssignmentFailed(format!("order {order:?} is not an interior lattice point")));
        }
        if holes.iter().any(|h: &Hole| h.order == order) {
            return Err(Error::HoleAssignmentFailed(format!("two holes share order {order:?}")));
        }
        let intercept = ronkin(p, center.0, center.1)? - order.0 as f64 * center.0 - order.1 as f64 * center.1;
        holes.push(Hole { order, pixels: comp.pixels.len(), area: n * grid.pixel_area(), center, intercept });
    }
    let win = &grid.window;
    for node in find_real_nodes(p, win)?.into_iter().filter(|n| n.isolated) {
        let (x, y) = node.log_point();
        let inside = x > win.x_min && x < win.x_max && y > win.y_min && y < win.y_max;
        let near = candidate_nodes
            .iter()
            .any(|c| (c.point.0 - x).abs() <= 3.0 * grid.dx() && (c.point.1 - y).abs() <= 3.0 * grid.dy());
        if inside && !near {
            candidate_nodes.push(CandidateNode { point: (x, y), source: NodeSource::RealNode });
        }
    }
    holes.sort_by_key(|h| h.order);
    Ok(HoleReport { genus: holes.len(), holes, candidate_nodes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FacetKind {
    Vertex,
    Edge,
    Hole,
}

/// `R(x, y) = intercept + i x + j y` on the complement component of order
/// `(i, j)`, recovered at `point`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetIntercept {
    pub order: (usize, usize),
    pub kind: FacetKind,
    pub point: (f64, f64),
    pub intercept: f64,
}

fn sorted_log_moduli(coeffs: Vec<f64>) -> Result<Vec<f64>> {
    let cs: Vec<Complex64> = coeffs.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let mut out: Vec<f64> = roots_exact(&cs)?.iter().map(|r| r.norm().ln()).collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn facet_at(p: &BivariatePolynomial, order: (usize, usize), kind: FacetKind, x: f64, y: f64) -> Result<FacetIntercept> {
    let g = ronkin_gradient(p, x, y)?;
    if lattice_point(g) != Some(order) {
        return Err(Error::HoleAssignmentFailed(format!(
            "expected gradient {order:?} at ({x:.3}, {y:.3}), found ({:.4}, {:.4})",
            g.0, g.1
        )));
    }
    let intercept = ronkin(p, x, y)? - order.0 as f64 * x - order.1 as f64 * y;
    Ok(FacetIntercept { order, kind, point: (x, y), intercept })
}

/// Intercepts on every complement component: the three vertices, each
/// unbounded component between two distinct tentacles, and each hole found
/// on `grid`.
///
/// Unbounded components are sampled far out between the tentacle
/// asymptotes. Components squeezed out by coincident tentacles are absent.
pub fn facet_intercepts_on(p: &BivariatePolynomial, grid: &AmoebaGrid) -> Result<Vec<FacetIntercept>> {
    require_leading_w(p)?;
    let d = p.d();
    let [x0, x1, y0, y1] = boundary_box(p)?;
    let xs = sorted_log_moduli((0..=d).map(|i| p.coeff(i, 0)).collect())?;
    let ys = sorted_log_moduli((0..=d).map(|j| p.coeff(0, j)).collect())?;
    let cs = sorted_log_moduli((0..=d).map(|i| p.coeff(i, d - i)).collect())?;
    let (left, right, bottom, top) = (x0 - FAR, x1 + FAR, y0 - FAR, y1 + FAR);
    let mut out = vec![
        facet_at(p, (0, 0), FacetKind::Vertex, left, bottom)?,
        facet_at(p, (d, 0), FacetKind::Vertex, right, bottom)?,
        facet_at(p, (0, d), FacetKind::Vertex, left, top)?,
    ];
    let far = right.max(top);
    for k in 1..d {
        if xs[k] - xs[k - 1] > 1e-6 {
            out.push(facet_at(p, (k, 0), FacetKind::Edge, 0.5 * (xs[k - 1] + xs[k]), bottom)?);
        }
        if ys[k] - ys[k - 1] > 1e-6 {
            out.push(facet_at(p, (0, k), FacetKind::Edge, left, 0.5 * (ys[k - 1] + ys[k]))?);
        }
        if cs[k] - cs[k - 1] > 1e-6 {
            // x - y = c with k roots of the leading form below e^c
            let c = 0.5 * (cs[k - 1] + cs[k]);
            out.push(facet_at(p, (k, d - k), FacetKind::Edge, far + 0.5 * c, far - 0.5 * c)?);
        }
    }
    for h in detect_holes(p, grid)?.holes {
        out.push(FacetIntercept { order: h.order, kind: FacetKind::Hole, point: h.center, intercept: h.intercept });
    }
    out.sort_by_key(|f| f.order);
    Ok(out)
}

/// [`facet_intercepts_on`] with a 400 x 400 raster of the automatic window.
pub fn facet_intercepts(p: &BivariatePolynomial) -> Result<Vec<FacetIntercept>> {
    let grid = rasterize_amoeba(p, Window::auto(p, 1.0)?, 400, 400)?;
    facet_intercepts_on(p, &grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kasteleyn::characteristic_polynomial;
    use crate::lattice::EdgeWeights;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn line_has_only_vertex_facets() {
        let p = BivariatePolynomial::from_terms(1, &[(0, 0, 2.0), (1, 0, 3.0), (0, 1, 5.0)]).unwrap();
        let f = facet_intercepts(&p).unwrap();
        assert_eq!(f.len(), 3);
        for fi in f {
            let expect = p.coeff(fi.order.0, fi.order.1).ln();
            assert!((fi.intercept - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn random_d3_has_one_hole() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = characteristic_polynomial(&EdgeWeights::random(3, &mut rng)).unwrap();
        let grid = rasterize_amoeba(&p, Window::auto(&p, 1.0).unwrap(), 300, 300).unwrap();
        let r = detect_holes(&p, &grid).unwrap();
        assert_eq!(r.genus, 1, "{r:?}");
        assert_eq!(r.holes[0].order, (1, 1));
        // R is affine on the hole: the intercept agrees across its pixels
        let h = &r.holes[0];
        let (x, y) = h.center;
        for (dx, dy) in [(grid.dx(), 0.0), (0.0, -grid.dy())] {
            let (a, b) = (x + dx, y + dy);
            if let Some((ix, iy)) = grid.pixel_of(a, b) {
                if !grid.is_member(ix, iy) && !grid.band[iy * grid.nx + ix] {
                    let c = ronkin(&p, a, b).unwrap() - a - b;
                    assert!((c - h.intercept).abs() < 1e-9);
                }
            }
        }
        let f = facet_intercepts_on(&p, &grid).unwrap();
        assert_eq!(f.len(), 10);
        for fi in f.iter().filter(|f| f.kind == FacetKind::Vertex) {
            assert!((fi.intercept - p.coeff(fi.order.0, fi.order.1).abs().ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn uniform_d3_node_is_a_candidate() {
        let p = characteristic_polynomial(&EdgeWeights::uniform(3)).unwrap();
        let grid = rasterize_amoeba(&p, Window::auto(&p, 1.0).unwrap(), 200, 200).unwrap();
        let r = detect_holes(&p, &grid).unwrap();
        assert_eq!(r.genus, 0);
        assert!(r.candidate_nodes.iter().any(|c| c.point.0.abs() < 0.05 && c.point.1.abs() < 0.05), "{r:?}");
    }
}
