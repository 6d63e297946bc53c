//! Extend a radial profile to the half-space and compare its weighted
//! Dirichlet energy with the spectral seminorm.

use ckn_symbreak::energy::seminorm;
use ckn_symbreak::extension::{cs_extend, extension_report};
use ckn_symbreak::params::cs_constant;
use ckn_symbreak::spectral::{Field, RadialGrid, RadialProfile};

fn main() -> ckn_symbreak::Result<()> {
    let grid = RadialGrid::new(1e-10, 1e8, 2048)?;
    let u = Field::Radial(RadialProfile::from_fn(&grid, 4, |r| (-4.0 * (r - 1.0) * (r - 1.0)).exp())?);
    for s in [0.25, 0.5, 0.75] {
        let ext = cs_extend(&u, s)?;
        let rep = extension_report(&ext, 1.0, &[0.1, 1.0, 10.0])?;
        let semi = seminorm(&u, s)?;
        println!("s={s}: C_s*D={:.10} seminorm={:.10}", cs_constant(s) * rep.dirichlet, semi);
        for sl in &rep.slice_checks {
            println!("   y={:<4} slice {:.6e} <= {:.6e}", sl.y, sl.lhs, sl.rhs);
        }
        println!("   half-space hardy {:.6e}, W^s constant {:.4}", rep.halfplane_hardy, rep.ws_hardy_constant);
    }
    Ok(())
}
