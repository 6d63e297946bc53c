use ckn_symbreak::minimize::{sector_compare, MinimizeConfig};
use ckn_symbreak::params::RawParams;

fn main() -> ckn_symbreak::Result<()> {
    let p = RawParams::new(2, 0.5, 3.0, 1.5).validate()?;
    let cfg = MinimizeConfig { mode_factor: 32, ..Default::default() };
    let c = sector_compare(&p, 1, 2, &cfg)?;
    println!("J(u_1)={:.10}  J(v_1)={:.10}  J(u_2)={:.10}", c.j_t, c.j_vt, c.j_big_t);
    println!(
        "minimality margin {:.2e}, strict margin {:.2e}, error estimate {:.2e}",
        c.minimality_margin(),
        c.strict_margin(),
        c.error_estimate
    );
    println!("minimal={} strict={}", c.minimal, c.strict);
    Ok(())
}
