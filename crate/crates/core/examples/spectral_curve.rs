//! Characteristic polynomial of a random 3x3 fundamental domain and the
//! agreement of its boundary points with zig-zag products.

use harnack::kasteleyn::{characteristic_polynomial, verify_boundary_vs_zigzag};
use harnack::lattice::EdgeWeights;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> harnack::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = EdgeWeights::random(3, &mut rng);
    let p = characteristic_polynomial(&w)?.normalized()?;
    println!("P(z, w), normalized so p00 = 1:");
    for t in p.terms() {
        println!("  z^{} w^{}  {:+.6}", t.i, t.j, t.v);
    }
    let report = verify_boundary_vs_zigzag(&w)?;
    println!("boundary roots vs zig-zag products: max relative error {:.2e}", report.max_relative_error);
    Ok(())
}
