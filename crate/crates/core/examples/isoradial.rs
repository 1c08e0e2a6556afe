//! Isoradial weights from circle angles, the check that the sine
//! parametrization lies on their spectral curve, and the shift point of a
//! genus-zero curve with nontrivial prefactors.

use harnack::genus0::Genus0Curve;
use harnack::isoradial::{
    find_isoradial_shift, isoradial_spectral_check, isoradial_weights, IsoradialAngles, ShiftOutcome,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> harnack::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let curve = Genus0Curve::random(2, &mut rng)?;
    let angles = IsoradialAngles::from_curve(&curve);
    let w = isoradial_weights(&angles)?;
    println!("a = {:.6?}\nb = {:.6?}\nc = {:.6?}", w.a_rows(), w.b_rows(), w.c_rows());
    let check = isoradial_spectral_check(&angles)?;
    println!(
        "spectral check: pass {}, max residual {:.1e} over {} samples",
        check.pass, check.max_residual, check.samples
    );

    match find_isoradial_shift(&curve)? {
        ShiftOutcome::Isoradial { zeta, shifted } => {
            println!(
                "shift point ζ = {zeta:.6}, prefactors after shift ({:.3e}, {:.3e})",
                shifted.rho_z(),
                shifted.rho_w()
            )
        }
        ShiftOutcome::NotIsoradial => println!("origin outside the amoeba: not isoradial"),
    }
    Ok(())
}
