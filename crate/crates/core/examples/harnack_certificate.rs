//! Numerical Harnack certificates for a spectral curve and for two
//! perturbations of the uniform d = 3 curve.

use harnack::bivariate::BivariatePolynomial;
use harnack::harnack::verify_harnack;
use harnack::kasteleyn::characteristic_polynomial;
use harnack::lattice::EdgeWeights;

fn report(name: &str, p: &BivariatePolynomial) -> harnack::Result<()> {
    let c = verify_harnack(p)?;
    println!(
        "{name:<22} pass {:<5}  boundary {:<5} area ratio {:.4}  2-to-1 {:<5} ovals {} + nodes {} of {}",
        c.pass,
        c.boundary.pass,
        c.area.ratio,
        c.two_to_one.pass,
        c.ovals.compact_ovals,
        c.ovals.isolated_nodes,
        c.ovals.max_genus
    );
    Ok(())
}

fn main() -> harnack::Result<()> {
    let p0 = characteristic_polynomial(&EdgeWeights::uniform(3))?;
    report("uniform d = 3", &p0)?;
    for f in [1.1, 0.9] {
        let mut p = p0.clone();
        p.set_coeff(1, 1, p0.coeff(1, 1) * f);
        report(&format!("p11 scaled by {f}"), &p)?;
    }
    Ok(())
}
