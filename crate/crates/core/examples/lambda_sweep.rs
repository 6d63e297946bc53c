use ckn_symbreak::minimize::{lambda_sweep, MinimizeConfig, SweepConfig};
use ckn_symbreak::params::RawParams;
use ckn_symbreak::spherical::eigenpair_degree;

fn main() -> ckn_symbreak::Result<()> {
    let p = RawParams::new(4, 0.5, 2.5, 0.0).validate()?;
    let sweep = SweepConfig { points: 7, ..Default::default() };
    let r = lambda_sweep(&p, &sweep, &eigenpair_degree(4, 1)?, &MinimizeConfig::default())?;
    for row in &r.rows {
        println!("{:>8.4}  {:<12}  lowest unstable degree {:?}", row.lambda, row.verdict().to_string(), row.lowest_unstable_degree());
    }
    println!("bracket {:?}, threshold {:?}, within {:?}", r.bracket, r.threshold, r.within_threshold);
    Ok(())
}
