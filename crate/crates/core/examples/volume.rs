//! Volume under the Ronkin function relative to the genus-zero curve with
//! the same boundary: opening the node into an oval raises it.

use harnack::kasteleyn::characteristic_polynomial;
use harnack::lattice::EdgeWeights;
use harnack::ronkin::volume_difference;

fn main() -> harnack::Result<()> {
    let p0 = characteristic_polynomial(&EdgeWeights::uniform(3))?.normalized()?;
    for f in [1.02, 1.05, 1.1, 1.2] {
        let mut p = p0.clone();
        p.set_coeff(1, 1, p0.coeff(1, 1) * f);
        let v = volume_difference(&p, &p0)?;
        println!(
            "p11 x {f:<4}: Vol - Vol0 = {:.6} on a square of half-width {} (last ring {:.1e})",
            v.value, v.half_width, v.last_ring
        );
    }
    Ok(())
}
