//! Closed-form constants and the breaking threshold for a few parameter sets.

use ckn_symbreak::params::{CHat, RawParams};
use ckn_symbreak::perturb::{threshold, ThresholdSource};
use ckn_symbreak::spherical::{SymmetryGroup, GroupKind};

fn main() -> ckn_symbreak::Result<()> {
    let p = RawParams::new(4, 0.5, 2.5, 0.0).validate()?;
    let table = p.constants(3.0)?;
    println!("n=4 s=1/2 q=2.5: H_s={:.6} C_s={:.6} gamma={:.6}", table.hardy, table.cs, table.gamma);
    println!("  c_mu(mu=3)={:.6}  lambda_bound={:.6}", table.c_mu, table.threshold);

    // n = 2 has no default for c_hat; pass one explicitly
    let p2 = RawParams::new(2, 0.5, 3.0, 0.0).with_c_hat(CHat::Explicit(1.0)).validate()?;
    for t in [2, 3, 4] {
        let g = SymmetryGroup::new(GroupKind::CyclicSector(t), 2, 1)?;
        let b = threshold(&p2, ThresholdSource::Group(&g))?;
        println!("n=2 Z_{t}: mu={} lambda_bound={:.4} ({})", b.mu, b.lambda_bound, b.regime);
    }
    Ok(())
}
