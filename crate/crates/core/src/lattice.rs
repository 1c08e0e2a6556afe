//! Weighted hexagonal fundamental domains.
//!
//! The white vertex at column `x`, row `y` of the `d×d` domain is joined to
//! three black vertices:
//!
//! * `c(x,y)` to black `(x, y)`,
//! * `a(x,y)` to black `(x+1, y)`, crossing the right side of the domain when `x = d-1`,
//! * `b(x,y)` to black `(x, y+1)`, crossing the top side of the domain when `y = d-1`.
//!
//! Weight arrays are stored row-major, `a[y][x]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported fundamental-domain side.
pub const MAX_SIDE: usize = 16;

/// Positive edge weights on a `d×d` fundamental domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeights")]
pub struct EdgeWeights {
    d: usize,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawWeights {
    d: usize,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
    c: Vec<Vec<f64>>,
}

impl TryFrom<RawWeights> for EdgeWeights {
    type Error = Error;
    fn try_from(r: RawWeights) -> Result<Self> {
        EdgeWeights::new(r.d, r.a, r.b, r.c)
    }
}

fn check_array(name: &str, d: usize, v: &[Vec<f64>]) -> Result<()> {
    if v.len() != d || v.iter().any(|row| row.len() != d) {
        return Err(Error::invalid(format!("weight array {name} is not {d}x{d}")));
    }
    if v.iter().flatten().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::invalid(format!("weight array {name} has a non-positive entry")));
    }
    Ok(())
}

impl EdgeWeights {
    pub fn new(d: usize, a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, c: Vec<Vec<f64>>) -> Result<Self> {
        if d == 0 || d > MAX_SIDE {
            return Err(Error::invalid(format!("side d = {d} outside 1..={MAX_SIDE}")));
        }
        check_array("a", d, &a)?;
        check_array("b", d, &b)?;
        check_array("c", d, &c)?;
        Ok(EdgeWeights { d, a, b, c })
    }

    /// All weights equal to one.
    pub fn uniform(d: usize) -> Self {
        Self::constant(d, 1.0, 1.0, 1.0).expect("uniform weights are valid for d in range")
    }

    /// The same `(a, b, c)` at every white vertex.
    pub fn constant(d: usize, a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(d, vec![vec![a; d]; d], vec![vec![b; d]; d], vec![vec![c; d]; d])
    }

    /// Weights `exp(U(-1, 1))`, independently per edge.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let mut draw = || -> Vec<Vec<f64>> {
            (0..d).map(|_| (0..d).map(|_| rng.gen_range(-1.0f64..1.0).exp()).collect()).collect()
        };
        let a = draw();
        let b = draw();
        let c = draw();
        Self::new(d, a, b, c).expect("random weights are positive")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a(&self, x: usize, y: usize) -> f64 {
        self.a[y % self.d][x % self.d]
    }

    pub fn b(&self, x: usize, y: usize) -> f64 {
        self.b[y % self.d][x % self.d]
    }

    pub fn c(&self, x: usize, y: usize) -> f64 {
        self.c[y % self.d][x % self.d]
    }

    pub fn a_rows(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b_rows(&self) -> &[Vec<f64>] {
        &self.b
    }

    pub fn c_rows(&self) -> &[Vec<f64>] {
        &self.c
    }

    /// Flat index of the vertex at `(x, y)`, reduced mod `d`.
    pub fn index(&self, x: usize, y: usize) -> usize {
        (y % self.d) * self.d + (x % self.d)
    }
}

/// Nonzero multipliers attached to every vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeVector {
    pub white: Vec<Vec<f64>>,
    pub black: Vec<Vec<f64>>,
}

impl GaugeVector {
    pub fn identity(d: usize) -> Self {
        GaugeVector { white: vec![vec![1.0; d]; d], black: vec![vec![1.0; d]; d] }
    }

    /// Entries `exp(U(-1, 1))`.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let mut draw = || -> Vec<Vec<f64>> {
            (0..d).map(|_| (0..d).map(|_| rng.gen_range(-1.0f64..1.0).exp()).collect()).collect()
        };
        let white = draw();
        let black = draw();
        GaugeVector { white, black }
    }
}

/// Scales each edge by the gauge factors of its two endpoints.
pub fn apply_gauge(w: &EdgeWeights, g: &GaugeVector) -> Result<EdgeWeights> {
    let d = w.d;
    for arr in [&g.white, &g.black] {
        if arr.len() != d || arr.iter().any(|r| r.len() != d) {
            return Err(Error::invalid(format!("gauge arrays must be {d}x{d}")));
        }
        if arr.iter().flatten().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::invalid("gauge entries must be nonzero"));
        }
    }
    let gw = |x: usize, y: usize| g.white[y % d][x % d];
    let gb = |x: usize, y: usize| g.black[y % d][x % d];
    let mut a = w.a.clone();
    let mut b = w.b.clone();
    let mut c = w.c.clone();
    for y in 0..d {
        for x in 0..d {
            c[y][x] *= gw(x, y) * gb(x, y);
            a[y][x] *= gw(x, y) * gb(x + 1, y);
            b[y][x] *= gw(x, y) * gb(x, y + 1);
        }
    }
    let all = a.iter().chain(&b).chain(&c).flatten();
    if all.clone().any(|&v| v <= 0.0) {
        return Err(Error::GaugeBreaksPositivity);
    }
    EdgeWeights::new(d, a, b, c)
}

/// Alternating edge products around a spanning set of cycles.
///
/// Entry `y*d + x` is the hexagonal face whose lower-left white vertex is
/// `(x, y)`; the last two entries are the horizontal torus cycle along row 0
/// (`Π c/a`) and the vertical torus cycle along column 0 (`Π c/b`). The face
/// entries multiply to one.
pub fn loop_invariants(w: &EdgeWeights) -> Vec<f64> {
    let d = w.d;
    let mut out = Vec::with_capacity(d * d + 2);
    for y in 0..d {
        for x in 0..d {
            let num = w.a(x, y) * w.b(x + 1, y) * w.c(x, y + 1);
            let den = w.c(x + 1, y) * w.a(x, y + 1) * w.b(x, y);
            out.push(num / den);
        }
    }
    out.push((0..d).map(|x| w.c(x, 0) / w.a(x, 0)).product());
    out.push((0..d).map(|y| w.c(0, y) / w.b(0, y)).product());
    out
}

/// One of the three families of straight edge chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Row `index`, alternating `c` and `a` edges.
    Horizontal,
    /// Vertices with `(x + y) mod d = index`, alternating `a` and `b` edges.
    NwSe,
    /// Column `index`, alternating `c` and `b` edges.
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZigZagCycle {
    pub orientation: Orientation,
    pub index: usize,
}

/// Signed alternating product along a zig-zag cycle.
///
/// This is the boundary point the cycle contributes: the `z` coordinate on
/// `{w = 0}` for horizontal cycles, the `w` coordinate on `{z = 0}` for
/// vertical cycles and the ratio `z/w` at infinity for NW-SE cycles.
pub fn zigzag_product(w: &EdgeWeights, cycle: ZigZagCycle) -> Result<f64> {
    let d = w.d;
    if cycle.index >= d {
        return Err(Error::invalid(format!("cycle index {} out of range 0..{d}", cycle.index)));
    }
    let sign = if d.is_multiple_of(2) { 1.0 } else { -1.0 };
    let i = cycle.index;
    let prod: f64 = match cycle.orientation {
        Orientation::Horizontal => (0..d).map(|x| w.c(x, i) / w.a(x, i)).product(),
        Orientation::Vertical => (0..d).map(|y| w.c(i, y) / w.b(i, y)).product(),
        Orientation::NwSe => (0..d)
            .map(|x| {
                let y = (i + d - x) % d;
                w.b(x, y) / w.a(x, y)
            })
            .product(),
    };
    Ok(sign * prod)
}

/// Rescales `a` by `exp(bx/d)` and `b` by `exp(by/d)`.
///
/// The spectral curve becomes `P(e^bx z, e^by w)`, so the amoeba moves by
/// `(-bx, -by)`.
pub fn apply_magnetic_field(w: &EdgeWeights, bx: f64, by: f64) -> EdgeWeights {
    let d = w.d as f64;
    let (fa, fb) = ((bx / d).exp(), (by / d).exp());
    let scale =
        |v: &Vec<Vec<f64>>, f: f64| -> Vec<Vec<f64>> { v.iter().map(|r| r.iter().map(|x| x * f).collect()).collect() };
    EdgeWeights { d: w.d, a: scale(&w.a, fa), b: scale(&w.b, fb), c: w.c.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * x.abs().max(1.0))
    }

    #[test]
    fn scalar_gauge() {
        let w = EdgeWeights::uniform(1);
        let g = GaugeVector { white: vec![vec![2.0]], black: vec![vec![1.0]] };
        let out = apply_gauge(&w, &g).unwrap();
        assert_eq!((out.a(0, 0), out.b(0, 0), out.c(0, 0)), (2.0, 2.0, 2.0));
    }

    #[test]
    fn identity_gauge() {
        let w = EdgeWeights::constant(1, 2.0, 3.0, 5.0).unwrap();
        assert_eq!(apply_gauge(&w, &GaugeVector::identity(1)).unwrap(), w);
    }

    #[test]
    fn negative_gauge_is_rejected() {
        let w = EdgeWeights::uniform(2);
        let mut g = GaugeVector::identity(2);
        g.white[0][1] = -1.0;
        assert!(matches!(apply_gauge(&w, &g), Err(Error::GaugeBreaksPositivity)));
        g.white[0][1] = 0.0;
        assert!(matches!(apply_gauge(&w, &g), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn rejects_bad_shapes_and_signs() {
        assert!(EdgeWeights::new(2, vec![vec![1.0; 2]; 2], vec![vec![1.0; 2]; 1], vec![vec![1.0; 2]; 2]).is_err());
        assert!(EdgeWeights::constant(2, 1.0, -1.0, 1.0).is_err());
        assert!(EdgeWeights::constant(0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn uniform_invariants_are_one() {
        for d in 1..4 {
            assert!(loop_invariants(&EdgeWeights::uniform(d)).iter().all(|&v| (v - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn horizontal_cycle_invariant_is_c_over_a() {
        let w = EdgeWeights::constant(1, 2.0, 3.0, 5.0).unwrap();
        let inv = loop_invariants(&w);
        assert_eq!(inv.len(), 3);
        assert!((inv[1] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn zigzag_d1() {
        let w = EdgeWeights::constant(1, 2.0, 3.0, 5.0).unwrap();
        let h = zigzag_product(&w, ZigZagCycle { orientation: Orientation::Horizontal, index: 0 }).unwrap();
        assert!((h + 2.5).abs() < 1e-15);
        let v = zigzag_product(&w, ZigZagCycle { orientation: Orientation::Vertical, index: 0 }).unwrap();
        assert!((v + 5.0 / 3.0).abs() < 1e-15);
        let s = zigzag_product(&w, ZigZagCycle { orientation: Orientation::NwSe, index: 0 }).unwrap();
        assert!((s + 1.5).abs() < 1e-15);
        assert!(zigzag_product(&w, ZigZagCycle { orientation: Orientation::NwSe, index: 1 }).is_err());
    }

    #[test]
    fn zigzag_d2_uniform() {
        let w = EdgeWeights::uniform(2);
        for i in 0..2 {
            let h = zigzag_product(&w, ZigZagCycle { orientation: Orientation::Horizontal, index: i }).unwrap();
            assert_eq!(h, 1.0);
        }
    }

    #[test]
    fn magnetic_field_moves_boundary_root() {
        let w = apply_magnetic_field(&EdgeWeights::uniform(1), 2f64.ln(), 0.0);
        assert!((w.a(0, 0) - 2.0).abs() < 1e-15);
        // root of c + a z
        assert!((-w.c(0, 0) / w.a(0, 0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_field_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = EdgeWeights::random(3, &mut rng);
        assert_eq!(apply_magnetic_field(&w, 0.0, 0.0), w);
    }

    #[test]
    fn face_invariants_multiply_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in 1..6 {
            let w = EdgeWeights::random(d, &mut rng);
            let inv = loop_invariants(&w);
            let p: f64 = inv[..d * d].iter().product();
            assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gauge_orbit_keeps_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..100 {
            let d = 1 + trial % 4;
            let w = EdgeWeights::random(d, &mut rng);
            let g = GaugeVector::random(d, &mut rng);
            let before = loop_invariants(&w);
            let after = loop_invariants(&apply_gauge(&w, &g).unwrap());
            assert!(close(&before, &after, 1e-12));
        }
    }

    #[test]
    fn json_round_trip() {
        let w = EdgeWeights::constant(2, 1.5, 2.5, 0.5).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        let back: EdgeWeights = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<EdgeWeights>(r#"{"d":1,"a":[[0]],"b":[[1]],"c":[[1]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn magnetic_field_inverts(seed in any::<u64>(), bx in -3.0f64..3.0, by in -3.0f64..3.0, d in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = EdgeWeights::random(d, &mut rng);
            let back = apply_magnetic_field(&apply_magnetic_field(&w, bx, by), -bx, -by);
            for (r1, r2) in [(w.a_rows(), back.a_rows()), (w.b_rows(), back.b_rows()), (w.c_rows(), back.c_rows())] {
                for (x, y) in r1.iter().flatten().zip(r2.iter().flatten()) {
                    prop_assert!((x - y).abs() < 1e-12 * x);
                }
            }
        }

        #[test]
        fn gauge_preserves_zigzags(seed in any::<u64>(), d in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = EdgeWeights::random(d, &mut rng);
            let g = GaugeVector::random(d, &mut rng);
            let h = apply_gauge(&w, &g).unwrap();
            for orientation in [Orientation::Horizontal, Orientation::NwSe, Orientation::Vertical] {
                for index in 0..d {
                    let cyc = ZigZagCycle { orientation, index };
                    let (p, q) = (zigzag_product(&w, cyc).unwrap(), zigzag_product(&h, cyc).unwrap());
                    prop_assert!((p - q).abs() < 1e-12 * p.abs());
                }
            }
        }
    }
}
