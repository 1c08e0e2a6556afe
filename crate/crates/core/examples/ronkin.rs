//! Ronkin function of 1 + z + w: values, gradient (the normalized root
//! count) and the Monge-Ampère residual det Hess R - 1/π².

use harnack::bivariate::BivariatePolynomial;
use harnack::ronkin::{monge_ampere_residual, monge_ampere_residual_extrapolated, ronkin, ronkin_gradient};

fn main() -> harnack::Result<()> {
    let p = BivariatePolynomial::from_terms(1, &[(0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0)])?;
    for (x, y) in [(0.0, 0.0), (-0.3, 0.2), (3.0, -1.0), (-4.0, -4.0)] {
        let (gx, gy) = ronkin_gradient(&p, x, y)?;
        println!("R({x:5.2}, {y:5.2}) = {:.10}   grad = ({gx:.6}, {gy:.6})", ronkin(&p, x, y)?);
    }
    for h in [2e-2, 1e-2] {
        println!(
            "h = {h:.0e}: MA residual plain {:.2e}, extrapolated {:.2e}",
            monge_ampere_residual(&p, -0.3, 0.2, h)?,
            monge_ampere_residual_extrapolated(&p, -0.3, 0.2, h)?
        );
    }
    Ok(())
}
