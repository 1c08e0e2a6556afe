//! Divisor of every white vertex of a random d = 3 model: one point on the
//! compact oval per vertex.

use harnack::divisor::{all_vertex_divisors, divisor_ovals, is_standard_divisor};
use harnack::lattice::EdgeWeights;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> harnack::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = EdgeWeights::random(3, &mut rng);
    let (_, _, ovals) = divisor_ovals(&w)?;
    println!("{} compact ovals", ovals.iter().filter(|o| o.compact).count());
    for (k, pts) in all_vertex_divisors(&w)?.iter().enumerate() {
        let (x, y) = (k % 3, k / 3);
        let shown: Vec<String> =
            pts.iter().map(|q| format!("(z {:+.6}, w {:+.6}) on oval {:?}", q.z, q.w, q.oval_id)).collect();
        println!("vertex ({x},{y}): {} standard {}", shown.join(", "), is_standard_divisor(pts, &ovals));
    }
    Ok(())
}
