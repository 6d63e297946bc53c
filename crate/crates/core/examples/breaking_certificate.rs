//! Second-variation certificate for the radial minimizer at two couplings.

use ckn_symbreak::minimize::{minimize_radial, MinimizeConfig};
use ckn_symbreak::params::RawParams;
use ckn_symbreak::perturb::certify;
use ckn_symbreak::spherical::eigenpair_degree;

fn main() -> ckn_symbreak::Result<()> {
    let eigen = eigenpair_degree(4, 1)?;
    for lambda in [0.0, 12.0] {
        let p = RawParams::new(4, 0.5, 2.5, lambda).validate()?;
        let u = minimize_radial(&p, &MinimizeConfig::default())?.require_converged()?;
        let c = certify(&u.field, &p, &eigen)?;
        println!(
            "lambda={lambda}: (q-1)Q(u)-Q(F u) = {:.6} +- {:.1e} -> {}",
            c.margin, c.tolerance, c.verdict
        );
    }
    Ok(())
}
