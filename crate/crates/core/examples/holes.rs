//! Holes of a genus-3 amoeba, their orders and Ronkin intercepts, and the
//! effect of moving one interior coefficient.

use harnack::amoeba::{rasterize_amoeba, Window};
use harnack::holes::detect_holes;
use harnack::kasteleyn::characteristic_polynomial;
use harnack::lattice::EdgeWeights;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> harnack::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = characteristic_polynomial(&EdgeWeights::random(4, &mut rng))?;
    let window = Window::auto(&p, 1.0)?;
    let before = detect_holes(&p, &rasterize_amoeba(&p, window, 400, 400)?)?;
    println!("genus {}", before.genus);
    for h in &before.holes {
        println!("  hole {:?}: {} pixels, area {:.4}, intercept {:.5}", h.order, h.pixels, h.area, h.intercept);
    }

    // lowering |p_ij| lowers the intercept of hole (i, j) and shrinks it
    let (i, j) = before.holes.iter().max_by_key(|h| h.pixels).expect("genus 3").order;
    let mut q = p.clone();
    q.set_coeff(i, j, p.coeff(i, j) * 0.95);
    let after = detect_holes(&q, &rasterize_amoeba(&q, window, 400, 400)?)?;
    println!("after scaling p{i}{j} by 0.95:");
    for h in &after.holes {
        println!("  hole {:?}: {} pixels, intercept {:.5}", h.order, h.pixels, h.intercept);
    }
    Ok(())
}
