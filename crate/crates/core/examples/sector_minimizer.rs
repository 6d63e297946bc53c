//! `Z_t`-invariant minimizers in the plane and their angular energy profile.

use ckn_symbreak::energy::polar_energy_by_mode;
use ckn_symbreak::minimize::{minimize_sector, MinimizeConfig};
use ckn_symbreak::params::RawParams;
use ckn_symbreak::spectral::Field;

fn main() -> ckn_symbreak::Result<()> {
    let p = RawParams::new(2, 0.5, 3.0, 1.5).validate()?;
    let cfg = MinimizeConfig { mode_factor: 32, ..Default::default() };
    for t in [1, 2] {
        let r = minimize_sector(&p, t, &cfg)?;
        println!("t={t}: J={:.8} residual={:.1e} converged={}", r.j(), r.residual, r.converged);
        if let Field::Polar(f) = &r.field {
            let e = polar_energy_by_mode(f, p.s);
            let total: f64 = e.iter().map(|(_, v)| v).sum();
            for (l, v) in e.iter().take(4) {
                println!("   mode {l:>2}: {:.3e}", v / total);
            }
        }
    }
    Ok(())
}
