//! Boundary values of a random genus-zero curve, recovery of the curve from
//! them by Newton's method, and its implicit equation.

use harnack::genus0::{boundary_map, implicitize, invert_boundary_detailed, Genus0Curve};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> harnack::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let curve = Genus0Curve::random(3, &mut rng)?;
    let target = boundary_map(&curve);
    println!("A = {:.6?}\nB = {:.6?}\nC = {:.6?}", target.a, target.b, target.c);
    println!("product defect {:.1e}", target.product_defect());

    let inv = invert_boundary_detailed(&target)?;
    let (g, h) = (curve.gauge_normalized()?, inv.curve.gauge_normalized()?);
    let err = g
        .alpha()
        .iter()
        .chain(g.beta())
        .chain(g.gamma())
        .zip(h.alpha().iter().chain(h.beta()).chain(h.gamma()))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    println!("Newton steps {}, residual {:.1e}, angle error after gauge fixing {err:.1e}", inv.steps, inv.residual);

    let p = implicitize(&inv.curve)?;
    println!("implicit equation:");
    for t in p.terms() {
        println!("  z^{} w^{}  {:+.8}", t.i, t.j, t.v);
    }
    Ok(())
}
