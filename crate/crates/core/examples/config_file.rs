//! Drive the command-line layer from a config file held in memory.

use ckn_symbreak::cli::{execute, RunConfig};

fn main() -> ckn_symbreak::Result<()> {
    let text = "subcommand = constants\nn = 3\ns = 0.25\nq = 2.2\nmode = 2\n";
    let cfg = RunConfig::from_kv(text)?;
    print!("{}", cfg.to_kv());
    let report = execute(&cfg)?;
    print!("{}", report.json);
    Ok(())
}
