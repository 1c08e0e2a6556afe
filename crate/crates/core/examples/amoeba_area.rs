//! Rasterizes the amoeba of a random d = 3 spectral curve, writes PGM and
//! SVG images to the temp directory and compares the area with π² Area(Δ).

use std::f64::consts::PI;

use harnack::amoeba::{amoeba_area, rasterize_amoeba, Window};
use harnack::holes::detect_holes;
use harnack::io::{write_pgm, write_svg};
use harnack::kasteleyn::characteristic_polynomial;
use harnack::lattice::EdgeWeights;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> harnack::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = characteristic_polynomial(&EdgeWeights::random(3, &mut rng))?;
    let grid = rasterize_amoeba(&p, Window::auto(&p, 2.0)?, 600, 600)?;
    let area = amoeba_area(&grid);
    let target = PI * PI * 9.0 / 2.0;
    println!(
        "area {:.5} = {:.5} in window + {:.5} in tails, error bar {:.3}",
        area.area, area.in_window, area.tails, area.error
    );
    println!("ratio to π² Area(Δ): {:.5}", area.area / target);

    let dir = std::env::temp_dir();
    write_pgm(dir.join("amoeba.pgm"), &grid)?;
    write_svg(dir.join("amoeba.svg"), &grid, detect_holes(&p, &grid).ok().as_ref())?;
    println!("wrote {} and {}", dir.join("amoeba.pgm").display(), dir.join("amoeba.svg").display());
    Ok(())
}
