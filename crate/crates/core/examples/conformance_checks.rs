use ckn_symbreak::checks::{run_suite, Suite, SuiteConfig};

fn main() -> ckn_symbreak::Result<()> {
    let cfg = SuiteConfig::default();
    for suite in [Suite::Constants, Suite::Halfline, Suite::Algebra, Suite::Perturb] {
        let rows = run_suite(suite, &cfg)?;
        let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
        println!("{suite:<10} {} rows, {} failed", rows.len(), failed.len());
        for r in failed {
            println!("   {} lhs={:e} rhs={:e}", r.check, r.lhs, r.rhs);
        }
    }
    Ok(())
}
