use ckn_symbreak::minimize::{minimize_radial, MinimizeConfig};
use ckn_symbreak::params::RawParams;

fn main() -> ckn_symbreak::Result<()> {
    for lambda in [0.0, 5.0, 12.0] {
        let p = RawParams::new(4, 0.5, 2.5, lambda).validate()?;
        let runs: Vec<_> = (0..3)
            .map(|seed| minimize_radial(&p, &MinimizeConfig { seed, ..Default::default() }))
            .collect::<Result<_, _>>()?;
        let js: Vec<f64> = runs.iter().map(|r| r.j()).collect();
        let spread = js.iter().cloned().fold(f64::MIN, f64::max) - js.iter().cloned().fold(f64::MAX, f64::min);
        let r = &runs[0];
        println!(
            "lambda={lambda:<4} J={:.10} residual={:.1e} iterations={} spread over seeds={:.1e}",
            r.j(),
            r.residual,
            r.iterations,
            spread
        );
        println!("   Hardy ratio seminorm/hardy = {:.6} (H_s = {:.6})", r.report.seminorm / r.report.hardy, p.hardy());
    }
    Ok(())
}
