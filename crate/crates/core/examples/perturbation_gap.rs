//! Normal identities and the seminorm gap chain for `ũ = F·u`.

use ckn_symbreak::params::RawParams;
use ckn_symbreak::perturb::{build_perturbed, energy_gap, gap_chain, normal_identities};
use ckn_symbreak::spectral::{Field, RadialGrid, RadialProfile};
use ckn_symbreak::spherical::eigenpair_degree;

fn main() -> ckn_symbreak::Result<()> {
    let grid = RadialGrid::new(1e-10, 1e8, 2048)?;
    let u = Field::Radial(RadialProfile::from_fn(&grid, 4, |r| (1.0 + r * r).powi(-2))?);
    let params = RawParams::new(4, 0.5, 2.5, 0.0).validate()?;
    for ell in [1, 2] {
        let pert = build_perturbed(&u, &eigenpair_degree(4, ell)?, 4, 1)?;
        let id = normal_identities(&pert, &params)?;
        let chain = gap_chain(&pert, &params)?;
        println!(
            "degree {ell}: |tilde^2 - lq|/lq={:.1e} cross/lq={:.1e}",
            id.tilde_sq_rel_error(),
            id.cross_normalized()
        );
        println!("  exact {:.6} <= extension {:.6} <= bound {:.6}", chain.exact, chain.extension, chain.bound);
    }

    // two planes, m = 2: only the extension route is available
    let p22 = RawParams::new(4, 0.5, 2.5, 0.0).with_partition(2, 2).validate()?;
    let gap = energy_gap(&build_perturbed(&u, &eigenpair_degree(2, 1)?, 2, 2)?, &p22)?;
    println!("m=2: gap {:.6} <= {:.6} via {:?} (err {:.1e})", gap.gap, gap.bound, gap.path, gap.error_estimate);
    Ok(())
}
