//! Amoeba membership, rasters and areas.
//!
//! For fixed `x` the `w`-roots over the circle `|z| = e^x` do not depend on
//! `y`. Sorting their log-moduli gives continuous functions `L_1(φ) <= ... <=
//! L_d(φ)`, and the number of roots below `e^y` changes with `φ` exactly
//! when `y` lies in some range `[min L_k, max L_k]`. One root sweep per
//! column therefore classifies the whole column.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};
use crate::fiber::{count_changes, Fiber};
use crate::kasteleyn::boundary_points;
use crate::numerics::{cluster_roots, gauss_kronrod, roots_exact};

/// Angular samples on `[0, π]` per column; conjugation symmetry covers the rest.
pub const DEFAULT_PHI_SAMPLES: usize = 256;

/// Rectangle in log coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max) || ![x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("window must satisfy x_min < x_max and y_min < y_max"));
        }
        Ok(Window { x_min, x_max, y_min, y_max })
    }

    /// Bounding box of the log-moduli of all boundary points, padded.
    ///
    /// Boundary points at infinity enter through both coordinates of the
    /// point where their tentacle meets the box of the other two families.
    /// Complex boundary points are allowed, so non-Harnack curves get a
    /// window too.
    pub fn auto(p: &BivariatePolynomial, pad: f64) -> Result<Self> {
        let [x_min, x_max, y_min, y_max] = boundary_box(p)?;
        Window::new(x_min - pad, x_max + pad, y_min - pad, y_max + pad)
    }

    /// Parses `x0,x1,y0,y1`.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad window component {t:?}"))))
            .collect::<Result<_>>()?;
        if v.len() != 4 {
            return Err(Error::invalid("window needs four comma-separated numbers"));
        }
        Window::new(v[0], v[1], v[2], v[3])
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Window { x_min: self.x_min + dx, x_max: self.x_max + dx, y_min: self.y_min + dy, y_max: self.y_max + dy }
    }
}

/// `[x_min, x_max, y_min, y_max]` of the boundary-point logarithms, the
/// window of [`Window::auto`] before padding. May be degenerate.
pub(crate) fn boundary_box(p: &BivariatePolynomial) -> Result<[f64; 4]> {
    require_leading_w(p)?;
    let d = p.d();
    if p.coeff(0, 0) == 0.0 || p.coeff(d, 0) == 0.0 {
        return Err(Error::invalid("corner coefficients p00, pd0, p0d must be nonzero"));
    }
    let log_moduli = |c: Vec<f64>| -> Result<Vec<f64>> {
        let cs: Vec<Complex64> = c.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        Ok(roots_exact(&cs)?.iter().map(|r| r.norm().ln()).collect())
    };
    let xs = log_moduli((0..=d).map(|i| p.coeff(i, 0)).collect())?;
    let ys = log_moduli((0..=d).map(|j| p.coeff(0, j)).collect())?;
    let ss = log_moduli((0..=d).map(|i| p.coeff(i, d - i)).collect())?;
    let mut x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut y_min = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut y_max = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for s in ss {
        // tentacle x - y = s: make sure the box reaches it
        x_max = x_max.max(y_max + s);
        y_max = y_max.max(x_max - s);
        x_min = x_min.min(y_min + s);
        y_min = y_min.min(x_min - s);
    }
    Ok([x_min, x_max, y_min, y_max])
}

pub(crate) fn require_leading_w(p: &BivariatePolynomial) -> Result<()> {
    if p.d() == 0 {
        return Err(Error::invalid("polynomial of degree 0 has an empty amoeba"));
    }
    if p.coeff(0, p.d()) == 0.0 {
        return Err(Error::invalid("coefficient of w^d must be nonzero"));
    }
    Ok(())
}

/// Some monomial exceeds the sum of all the others on the torus `(e^x, e^y)`.
pub(crate) fn dominant_monomial(p: &BivariatePolynomial, x: f64, y: f64) -> Option<(usize, usize)> {
    let mut total = 0.0;
    let mut best = (0.0, (0, 0));
    for t in p.terms() {
        let m = t.v.abs() * (t.i as f64 * x + t.j as f64 * y).exp();
        total += m;
        if m > best.0 {
            best = (m, (t.i, t.j));
        }
    }
    (best.0 > total - best.0).then_some(best.1)
}

/// Ranges `[min_φ L_k, max_φ L_k]` of the sorted root log-moduli over the
/// circle `|z| = e^x`, sampled at `samples + 1` angles in `[0, π]`.
pub fn column_intervals(p: &BivariatePolynomial, x: f64, samples: usize) -> Vec<(f64, f64)> {
    let d = p.d();
    let mut fiber = Fiber::new(p, x);
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for k in 0..=samples {
        let phi = PI * k as f64 / samples as f64;
        for (idx, &l) in fiber.logs_at(phi).iter().enumerate() {
            lo[idx] = lo[idx].min(l);
            hi[idx] = hi[idx].max(l);
        }
    }
    lo.into_iter().zip(hi).collect()
}

/// Classification of a point of the `(x, y)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    /// The count of roots below `e^y` changes with `φ`.
    Inside,
    /// Not inside, but some root modulus comes within the band tolerance.
    Band,
    Outside,
}

fn classify_in_column(intervals: &[(f64, f64)], y: f64, band: f64) -> PointClass {
    if intervals.iter().any(|&(lo, hi)| lo < y && y <= hi) {
        return PointClass::Inside;
    }
    let dist = intervals.iter().map(|&(lo, hi)| (y - lo).abs().min((y - hi).abs())).fold(f64::INFINITY, f64::min);
    if dist < band {
        PointClass::Band
    } else {
        PointClass::Outside
    }
}

/// Classifies `(x, y)` with `samples` angles and band tolerance `band`.
pub fn classify_point(p: &BivariatePolynomial, x: f64, y: f64, samples: usize, band: f64) -> Result<PointClass> {
    require_leading_w(p)?;
    if dominant_monomial(p, x, y).is_some() {
        return Ok(PointClass::Outside);
    }
    Ok(classify_in_column(&column_intervals(p, x, samples), y, band))
}

/// True iff the torus `|z| = e^x, |w| = e^y` meets the curve, decided by a
/// change of the root count over the circle.
pub fn amoeba_membership(p: &BivariatePolynomial, x: f64, y: f64) -> Result<bool> {
    Ok(classify_point(p, x, y, DEFAULT_PHI_SAMPLES, 0.0)? == PointClass::Inside)
}

/// Rasterized amoeba over a window.
///
/// Pixel `(ix, iy)` is centered at `x_min + (ix + 1/2) dx`, `y_min + (iy +
/// 1/2) dy` and stored at `iy * nx + ix`. `membership` holds count-change
/// pixels only; `band` marks the remaining pixels within half a pixel height
/// of some root modulus. `columns[ix]` keeps the exact `y`-ranges of the
/// amoeba over the column center.
#[derive(Clone, Debug, PartialEq)]
pub struct AmoebaGrid {
    pub window: Window,
    pub nx: usize,
    pub ny: usize,
    pub membership: Vec<bool>,
    pub band: Vec<bool>,
    pub columns: Vec<Vec<(f64, f64)>>,
    pub ronkin: Option<Vec<f64>>,
    pub poly: BivariatePolynomial,
}

impl AmoebaGrid {
    pub fn dx(&self) -> f64 {
        self.window.width() / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.window.height() / self.ny as f64
    }

    pub fn pixel_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x_at(&self, ix: usize) -> f64 {
        self.window.x_min + (ix as f64 + 0.5) * self.dx()
    }

    pub fn y_at(&self, iy: usize) -> f64 {
        self.window.y_min + (iy as f64 + 0.5) * self.dy()
    }

    pub fn is_member(&self, ix: usize, iy: usize) -> bool {
        self.membership[iy * self.nx + ix]
    }

    pub fn member_count(&self) -> usize {
        self.membership.iter().filter(|&&m| m).count()
    }

    /// Pixel containing `(x, y)`, if any.
    pub fn pixel_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fx = (x - self.window.x_min) / self.dx();
        let fy = (y - self.window.y_min) / self.dy();
        if fx < 0.0 || fy < 0.0 || fx >= self.nx as f64 || fy >= self.ny as f64 {
            return None;
        }
        Some((fx as usize, fy as usize))
    }
}

pub fn rasterize_amoeba(p: &BivariatePolynomial, window: Window, nx: usize, ny: usize) -> Result<AmoebaGrid> {
    rasterize_amoeba_with(p, window, nx, ny, DEFAULT_PHI_SAMPLES)
}

/// Column intervals and the classification of each pixel in the column.
type Column = (Vec<(f64, f64)>, Vec<PointClass>);

pub fn rasterize_amoeba_with(
    p: &BivariatePolynomial,
    window: Window,
    nx: usize,
    ny: usize,
    samples: usize,
) -> Result<AmoebaGrid> {
    require_leading_w(p)?;
    if nx < 16 || ny < 16 {
        return Err(Error::invalid("raster needs at least 16x16 pixels"));
    }
    let mut grid = AmoebaGrid {
        window,
        nx,
        ny,
        membership: vec![false; nx * ny],
        band: vec![false; nx * ny],
        columns: Vec::new(),
        ronkin: None,
        poly: p.clone(),
    };
    let half = 0.5 * grid.dy();
    let columns: Vec<Column> = (0..nx)
        .into_par_iter()
        .map(|ix| {
            let x = window.x_min + (ix as f64 + 0.5) * window.width() / nx as f64;
            let intervals = column_intervals(p, x, samples);
            let classes = (0..ny)
                .map(|iy| {
                    let y = window.y_min + (iy as f64 + 0.5) * window.height() / ny as f64;
                    classify_in_column(&intervals, y, half)
                })
                .collect();
            (intervals, classes)
        })
        .collect();
    for (ix, (intervals, col)) in columns.into_iter().enumerate() {
        grid.columns.push(intervals);
        for (iy, class) in col.into_iter().enumerate() {
            match class {
                PointClass::Inside => grid.membership[iy * nx + ix] = true,
                PointClass::Band => grid.band[iy * nx + ix] = true,
                PointClass::Outside => {}
            }
        }
    }
    Ok(grid)
}

/// Amoeba area inside the window with a resolution error bar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    /// `in_window + tails`.
    pub area: f64,
    pub in_window: f64,
    pub tails: f64,
    /// Half the area of boundary and band pixels.
    pub error: f64,
    pub warnings: Vec<String>,
}

fn boundary_pixel_count(grid: &AmoebaGrid) -> usize {
    let (nx, ny) = (grid.nx, grid.ny);
    let mut count = 0;
    for iy in 0..ny {
        for ix in 0..nx {
            if !grid.is_member(ix, iy) {
                continue;
            }
            let edge = ix == 0
                || iy == 0
                || ix + 1 == nx
                || iy + 1 == ny
                || !grid.is_member(ix - 1, iy)
                || !grid.is_member(ix + 1, iy)
                || !grid.is_member(ix, iy - 1)
                || !grid.is_member(ix, iy + 1);
            if edge {
                count += 1;
            }
        }
    }
    count
}

/// Length of the union of `intervals` clipped to `[lo, hi]`.
pub(crate) fn union_length(intervals: &[(f64, f64)], lo: f64, hi: f64) -> f64 {
    let mut iv: Vec<(f64, f64)> =
        intervals.iter().map(|&(a, b)| (a.max(lo), b.min(hi))).filter(|(a, b)| a < b).collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (a, b) in iv {
        cur = match cur {
            Some((ca, cb)) if a <= cb => Some((ca, cb.max(b))),
            Some((ca, cb)) => {
                total += cb - ca;
                Some((a, b))
            }
            None => Some((a, b)),
        };
    }
    if let Some((ca, cb)) = cur {
        total += cb - ca;
    }
    total
}

// angular samples for columns that only feed area integrals
const AREA_PHI_SAMPLES: usize = 64;
// tails are integrated this far beyond the window; further out the
// tentacle widths sit below the root finder's resolution of clusters
const TAIL_LENGTH: f64 = 40.0;

fn column_length(p: &BivariatePolynomial, x: f64, lo: f64, hi: f64, samples: usize) -> f64 {
    union_length(&column_intervals(p, x, samples), lo, hi)
}

/// `∫_0^T f(t) dt` for an exponentially decaying `f`, on doubling panels.
fn tail_integral<F: Fn(f64) -> f64>(f: F) -> f64 {
    let (mut a, mut len, mut total) = (0.0, 0.5, 0.0);
    while a < TAIL_LENGTH {
        let b = (a + len).min(TAIL_LENGTH);
        let q = gauss_kronrod(&f, a, b, 1e-9, 2_000);
        total += q.value;
        if q.value.abs() < 1e-12 && a > 1.0 {
            break;
        }
        a = b;
        len = (2.0 * len).min(8.0);
    }
    total
}

/// Area of the amoeba outside the window, by tentacle.
///
/// The plane outside `[x0,x1] x [y0,y1]` splits into the strips `x < x0`,
/// `x > x1`, and `y < y0`, `y > y1` over `[x0,x1]`. Each is integrated in
/// a monomial chart where its tentacles run towards `-∞`: columns of `P`
/// on the left, columns of `P(w, z)` below, and columns of
/// `u^d P(1/u, v/u)` for the right and top strips. The last chart maps
/// `(x, y)` to `(-x, y - x)` and preserves area.
fn tail_area(p: &BivariatePolynomial, w: &Window) -> f64 {
    let s = AREA_PHI_SAMPLES;
    let swapped = p.swapped();
    let diag = p.diagonal_chart();
    let inf = f64::INFINITY;
    let left = tail_integral(|t| column_length(p, w.x_min - t, -inf, inf, s));
    let right = tail_integral(|t| column_length(&diag, -w.x_max - t, -inf, inf, s));
    let bottom = tail_integral(|t| column_length(&swapped, w.y_min - t, w.x_min, w.x_max, s));
    let top = gauss_kronrod(|u| column_length(&diag, u, w.y_max + u, inf, s), -w.x_max, -w.x_min, 1e-9, 4_000).value;
    left + right + bottom + top
}

// strips this close to a downward tentacle are integrated, not sampled:
// its profile ~ log|x - x0| spoils the midpoint rule well beyond one strip
const SPIKE_STRIPS: f64 = 16.0;

/// In-window area of column strip `ix`. The midpoint value is used unless
/// a downward tentacle lies nearby.
fn strip_area(grid: &AmoebaGrid, ix: usize, spikes: &[f64]) -> f64 {
    let (lo, hi) = (grid.window.y_min, grid.window.y_max);
    let dx = grid.dx();
    let (a, b) = (grid.x_at(ix) - 0.5 * dx, grid.x_at(ix) + 0.5 * dx);
    let reach = SPIKE_STRIPS * dx;
    if !spikes.iter().any(|&s| s > a - reach && s < b + reach) {
        return dx * union_length(&grid.columns[ix], lo, hi);
    }
    let mut cuts = vec![a];
    cuts.extend(spikes.iter().copied().filter(|&s| s > a && s < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    let f = |x: f64| column_length(&grid.poly, x, lo, hi, DEFAULT_PHI_SAMPLES);
    cuts.windows(2).map(|c| gauss_kronrod(f, c[0], c[1], 1e-9 * dx, 4_000).value).sum()
}

fn contains(outer: &Window, [x0, x1, y0, y1]: [f64; 4]) -> bool {
    outer.x_min <= x0 && outer.x_max >= x1 && outer.y_min <= y0 && outer.y_max >= y1
}

/// Amoeba area: the column-exact area inside the window plus the tentacle
/// tails outside it.
///
/// Inside, each column strip contributes its width times the length of its
/// `y`-ranges; counting pixel centers instead aliases tentacles that run
/// along pixel rows or diagonals. Tails are added only when the window
/// contains every boundary-point logarithm, so that nothing but tentacles
/// leaves it.
pub fn amoeba_area(grid: &AmoebaGrid) -> AreaEstimate {
    let p = &grid.poly;
    let d = p.d();
    let spikes: Vec<f64> = {
        let cs: Vec<Complex64> = (0..=d).map(|i| Complex64::new(p.coeff(i, 0), 0.0)).collect();
        roots_exact(&cs).unwrap_or_default().iter().map(|r| r.norm().ln()).collect()
    };
    let in_window: f64 =
        (0..grid.nx).into_par_iter().map(|ix| strip_area(grid, ix, &spikes)).collect::<Vec<_>>().iter().sum();
    let mut warnings = Vec::new();
    let tails = match boundary_box(p) {
        Ok(body) if contains(&grid.window, body) => tail_area(p, &grid.window),
        _ => {
            warnings.push("window does not contain the boundary-point box; tentacle tails omitted".to_string());
            0.0
        }
    };
    let band = grid.band.iter().filter(|&&b| b).count();
    let error = 0.5 * (boundary_pixel_count(grid) + band) as f64 * grid.pixel_area();
    AreaEstimate { area: in_window + tails, in_window, tails, error, warnings }
}

/// [`amoeba_area`] plus a check that the amoeba only leaves the window
/// along the tentacles predicted by the boundary points of `p`.
pub fn amoeba_area_checked(p: &BivariatePolynomial, grid: &AmoebaGrid) -> Result<AreaEstimate> {
    let mut est = amoeba_area(grid);
    let bp = boundary_points(p)?;
    let slack = 0.5 + 2.0 * grid.dx().max(grid.dy());
    let mut stray = 0;
    let (nx, ny) = (grid.nx, grid.ny);
    let frame = (0..nx).flat_map(|ix| [(ix, 0), (ix, ny - 1)]).chain((0..ny).flat_map(|iy| [(0, iy), (nx - 1, iy)]));
    for (ix, iy) in frame {
        if !grid.is_member(ix, iy) {
            continue;
        }
        let (x, y) = (grid.x_at(ix), grid.y_at(iy));
        let near_down = bp.on_w0.iter().any(|r| (x - r.abs().ln()).abs() < slack);
        let near_left = bp.on_z0.iter().any(|r| (y - r.abs().ln()).abs() < slack);
        let near_diag = bp.at_inf.iter().any(|s| (x - y - s.abs().ln()).abs() < slack * 2f64.sqrt());
        if !(near_down || near_left || near_diag) {
            stray += 1;
        }
    }
    if stray > 0 {
        est.warnings.push(format!("{stray} frame pixels lie off the predicted tentacles; widen the window"));
    }
    Ok(est)
}

/// Torus preimages of an amoeba point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preimages {
    /// `(φ, arg w)` of each distinct preimage.
    pub points: Vec<(f64, f64)>,
    pub multiplicities: Vec<usize>,
}

impl Preimages {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Fewer distinct points than the counted multiplicity.
    pub fn degenerate(&self) -> bool {
        self.multiplicities.iter().any(|&m| m > 1)
    }
}

fn angle_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Counts points of the curve on the torus over `(x, y)`.
///
/// Crossings are located by bisecting changes of the root count over a
/// `φ`-sweep; tangential contacts are local minima of `min_k |L_k - y|`
/// below `1e-7` and carry multiplicity 2. Points closer than `1e-6` in
/// `(φ, arg w)` are merged.
pub fn two_to_one_check(p: &BivariatePolynomial, x: f64, y: f64) -> Result<Preimages> {
    require_leading_w(p)?;
    const SWEEP: usize = 720;
    const TOUCH: f64 = 1e-7;
    let mut fiber = Fiber::new(p, x);
    let phis: Vec<f64> = (0..=SWEEP).map(|k| TAU * k as f64 / SWEEP as f64).collect();
    let counts: Vec<usize> = phis.iter().map(|&phi| fiber.count_below(phi, y)).collect();
    let gaps: Vec<f64> = phis
        .iter()
        .map(|&phi| fiber.logs_at(phi).iter().map(|l| (l - y).abs()).fold(f64::INFINITY, f64::min))
        .collect();

    let mut found: Vec<((f64, f64), usize)> = Vec::new();
    let mut locate = |fiber: &mut Fiber, phi: f64, mult: usize| {
        let roots = fiber.roots_at(phi).to_vec();
        for cl in cluster_roots(&roots) {
            if (cl.value.norm().ln() - y).abs() < 1e-6 {
                found.push(((phi.rem_euclid(TAU), cl.value.arg()), mult.max(cl.multiplicity)));
            }
        }
    };

    for k in 0..SWEEP {
        if counts[k] != counts[k + 1] {
            let mut crossings = Vec::new();
            count_changes(&mut fiber, y, phis[k], counts[k], phis[k + 1], counts[k + 1], 1e-14, &mut crossings);
            for phi in crossings {
                locate(&mut fiber, phi, 1);
            }
        }
    }
    for k in 0..SWEEP {
        let (prev, next) = (gaps[(k + SWEEP - 1) % SWEEP], gaps[k + 1]);
        let changed = counts[(k + SWEEP - 1) % SWEEP] != counts[k] || counts[k] != counts[k + 1];
        if gaps[k] <= prev && gaps[k] <= next && !changed {
            // golden-section refinement of the local minimum
            let (mut a, mut b) = (phis[k] - TAU / SWEEP as f64, phis[k] + TAU / SWEEP as f64);
            let g = 0.5 * (5f64.sqrt() - 1.0);
            let mut gap_at = |phi: f64| fiber.logs_at(phi).iter().map(|l| (l - y).abs()).fold(f64::INFINITY, f64::min);
            for _ in 0..80 {
                let c = b - g * (b - a);
                let e = a + g * (b - a);
                if gap_at(c) < gap_at(e) {
                    b = e;
                } else {
                    a = c;
                }
            }
            let phi = 0.5 * (a + b);
            if gap_at(phi) < TOUCH {
                locate(&mut fiber, phi, 2);
            }
        }
    }

    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    for (pt, m) in found {
        match points.iter().position(|q| angle_dist(q.0, pt.0) < 1e-6 && angle_dist(q.1, pt.1) < 1e-6) {
            Some(i) => multiplicities[i] = multiplicities[i].max(m),
            None => {
                points.push(pt);
                multiplicities.push(m);
            }
        }
    }
    Ok(Preimages { points, multiplicities })
}

/// Pixel centers strictly inside the amoeba, at least `margin` pixels from
/// any non-member pixel, drawn uniformly.
pub fn random_interior_points<R: Rng + ?Sized>(
    grid: &AmoebaGrid,
    count: usize,
    margin: usize,
    rng: &mut R,
) -> Vec<(f64, f64)> {
    let (nx, ny) = (grid.nx, grid.ny);
    let m = margin as isize;
    let deep: Vec<(usize, usize)> = (0..ny)
        .flat_map(|iy| (0..nx).map(move |ix| (ix, iy)))
        .filter(|&(ix, iy)| {
            (-m..=m).all(|dy| {
                (-m..=m).all(|dx| {
                    let (jx, jy) = (ix as isize + dx, iy as isize + dy);
                    jx >= 0
                        && jy >= 0
                        && (jx as usize) < nx
                        && (jy as usize) < ny
                        && grid.is_member(jx as usize, jy as usize)
                })
            })
        })
        .collect();
    if deep.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let (ix, iy) = deep[rng.gen_range(0..deep.len())];
            // jitter inside the pixel to avoid grid-aligned samples
            let x = grid.x_at(ix) + (rng.gen::<f64>() - 0.5) * grid.dx();
            let y = grid.y_at(iy) + (rng.gen::<f64>() - 0.5) * grid.dy();
            (x, y)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> BivariatePolynomial {
        BivariatePolynomial::from_terms(1, &[(0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0)]).unwrap()
    }

    fn uniform2() -> BivariatePolynomial {
        BivariatePolynomial::from_terms(
            2,
            &[(0, 0, 1.0), (1, 0, -2.0), (2, 0, 1.0), (0, 1, -2.0), (1, 1, -2.0), (0, 2, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn line_membership_examples() {
        let p = line();
        assert!(amoeba_membership(&p, 0.0, 0.0).unwrap());
        assert!(!amoeba_membership(&p, -10.0, -10.0).unwrap());
        assert!(!amoeba_membership(&p, 10.0, 0.0).unwrap());
    }

    #[test]
    fn constant_polynomial_is_rejected() {
        let p = BivariatePolynomial::from_terms(0, &[(0, 0, 1.0)]).unwrap();
        assert!(rasterize_amoeba(&p, Window::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 16, 16).is_err());
    }

    #[test]
    fn line_area_on_small_window() {
        // slice of the line amoeba over x is [log|1 - e^x|, log(1 + e^x)]
        let clip = |v: f64| v.clamp(-4.0, 4.0);
        let n = 200_000;
        let h = 8.0 / n as f64;
        let oracle: f64 = (0..n)
            .map(|k| {
                let x = -4.0 + (k as f64 + 0.5) * h;
                h * (clip((1.0 + x.exp()).ln()) - clip((1.0 - x.exp()).abs().ln()))
            })
            .sum();
        let grid = rasterize_amoeba(&line(), Window::new(-4.0, 4.0, -4.0, 4.0).unwrap(), 400, 400).unwrap();
        let est = amoeba_area(&grid);
        assert!((est.in_window - oracle).abs() < 1e-4 * oracle, "{} vs {oracle}", est.in_window);
        // with the tails added the full area is recovered
        assert!((est.area / (PI * PI / 2.0) - 1.0).abs() < 1e-4, "{}", est.area);
    }

    #[test]
    fn line_area_is_maximal() {
        let grid = rasterize_amoeba(&line(), Window::new(-10.0, 10.0, -10.0, 10.0).unwrap(), 600, 600).unwrap();
        let a = amoeba_area(&grid).area;
        assert!((a / (PI * PI / 2.0) - 1.0).abs() < 0.02, "{a}");
    }

    #[test]
    fn union_of_overlapping_ranges() {
        assert_eq!(union_length(&[(0.0, 2.0), (1.0, 3.0), (5.0, 6.0)], -10.0, 10.0), 4.0);
        assert_eq!(union_length(&[(0.0, 2.0), (1.0, 3.0), (5.0, 6.0)], 1.5, 5.5), 2.0);
    }

    #[test]
    fn empty_window_has_zero_area() {
        let grid = rasterize_amoeba(&line(), Window::new(20.0, 21.0, -30.0, -29.0).unwrap(), 16, 16).unwrap();
        let est = amoeba_area(&grid);
        assert_eq!(est.area, 0.0);
        assert_eq!(est.warnings.len(), 1);
    }

    #[test]
    fn translation_shifts_raster() {
        // P(z/2, w) has its amoeba moved by log 2 in x
        let p = line();
        let q = p.substitute_scale(0.5, 1.0);
        let w = Window::new(-4.0, 4.0, -4.0, 4.0).unwrap();
        let shift = 2f64.ln();
        let g1 = rasterize_amoeba(&p, w, 64, 64).unwrap();
        let g2 = rasterize_amoeba(&q, w.translated(shift, 0.0), 64, 64).unwrap();
        let differing = g1.membership.iter().zip(&g2.membership).filter(|(a, b)| a != b).count();
        assert!(differing <= 2, "{differing}");
    }

    #[test]
    fn auto_window_contains_boundary_logs() {
        let w = Window::auto(&uniform2(), 2.0).unwrap();
        assert!(w.x_min <= -2.0 && w.x_max >= 2.0 && w.y_min <= -2.0 && w.y_max >= 2.0);
    }

    #[test]
    fn line_has_two_preimages_at_origin() {
        let pre = two_to_one_check(&line(), 0.0, 0.0).unwrap();
        assert_eq!(pre.count(), 2, "{pre:?}");
        // e^{±2πi/3} with conjugate w
        let mut phis: Vec<f64> = pre.points.iter().map(|p| p.0).collect();
        phis.sort_by(f64::total_cmp);
        assert!((phis[0] - TAU / 3.0).abs() < 1e-10);
        assert!((phis[1] - 2.0 * TAU / 3.0).abs() < 1e-10);
    }

    #[test]
    fn uniform_d2_interior_point_is_two_to_one() {
        let pre = two_to_one_check(&uniform2(), 0.3, -0.2).unwrap();
        assert_eq!(pre.count(), 2, "{pre:?}");
        assert!(!pre.degenerate());
    }

    #[test]
    fn node_gives_one_double_preimage() {
        // the uniform d=3 curve has a node at (1,1)
        let p = BivariatePolynomial::from_terms(
            3,
            &[
                (0, 0, 1.0),
                (1, 0, 3.0),
                (2, 0, 3.0),
                (3, 0, 1.0),
                (0, 1, 3.0),
                (1, 1, -21.0),
                (2, 1, 3.0),
                (0, 2, 3.0),
                (1, 2, 3.0),
                (0, 3, 1.0),
            ],
        )
        .unwrap();
        let pre = two_to_one_check(&p, 0.0, 0.0).unwrap();
        assert_eq!(pre.count(), 1, "{pre:?}");
        assert_eq!(pre.total_multiplicity(), 2);
    }
}
