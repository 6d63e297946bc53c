//! End-to-end acceptance criteria. Runs without the libtest harness so every
//! criterion prints its own pass/fail line; exits non-zero if any fails.

use ckn_symbreak::checks::{
    algebra_suite, all_pass, constants_suite, corpus, extension_hardy_suite, halfline_suite, perturb_suite, quad_d_suite,
    CheckRow,
};
use ckn_symbreak::cli::{execute, RunConfig};
use ckn_symbreak::minimize::{lambda_sweep, minimize_radial, sector_compare, MinimizeConfig, SweepConfig};
use ckn_symbreak::params::RawParams;
use ckn_symbreak::perturb::{certify, Verdict};
use ckn_symbreak::spherical::eigenpair_degree;
use std::time::Instant;

const EL_RESIDUAL_MAX: f64 = 1e-4;
const MULTISTART_REL: f64 = 1e-4;
const HARDY_SLACK: f64 = 1e-6;
const THRESHOLD_4D: f64 = 11.47;
const MULTIPLICITY_LAMBDA: f64 = 1.5;
const MULTIPLICITY_MODE_FACTOR: usize = 32;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rows_outcome(rows: Vec<CheckRow>) -> Outcome {
    let worst = rows
        .iter()
        .map(|r| ((r.margin + r.tolerance) / r.tolerance.max(f64::MIN_POSITIVE), r))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(slack, r)| format!("{} (slack {:.2}x tolerance)", r.check, slack))
        .unwrap_or_default();
    if all_pass(&rows) {
        Ok(format!("{} rows, tightest {worst}", rows.len()))
    } else {
        let failed: Vec<String> = rows.iter().filter(|r| !r.pass).map(|r| r.check.clone()).collect();
        Err(format!("failed: {}", failed.join(" ")))
    }
}

fn err(e: ckn_symbreak::Error) -> String {
    e.to_string()
}

fn constants() -> Outcome {
    rows_outcome(constants_suite().map_err(err)?)
}

fn halfline() -> Outcome {
    rows_outcome(halfline_suite())
}

fn quad_d() -> Outcome {
    let mut rows = Vec::new();
    for n in [2, 3, 4] {
        for s in [0.25, 0.5, 0.75] {
            rows.extend(quad_d_suite(n, s, &corpus()[..3]).map_err(err)?);
        }
    }
    rows_outcome(rows)
}

fn extension_hardy() -> Outcome {
    let mut rows = Vec::new();
    for s in [0.25, 0.5, 0.75] {
        rows.extend(
            extension_hardy_suite(4, s, 1.0)
                .map_err(err)?
                .into_iter()
                .filter(|r| r.check.starts_with("dis(") || r.check.starts_with("uw0(")),
        );
    }
    if rows.len() != 3 * 5 * 4 {
        return Err(format!("expected 60 rows, got {}", rows.len()));
    }
    rows_outcome(rows)
}

fn perturbation() -> Outcome {
    let mut rows = Vec::new();
    for n in [4, 3] {
        let p = RawParams::new(n, 0.5, 2.5, 0.0).validate().map_err(err)?;
        rows.extend(perturb_suite(&p).map_err(err)?);
    }
    rows_outcome(rows)
}

fn algebra() -> Outcome {
    let mut rows = algebra_suite(4, 1, 100, 0).map_err(err)?;
    rows.extend(algebra_suite(2, 2, 100, 0).map_err(err)?);
    rows_outcome(rows)
}

fn radial_quality() -> Outcome {
    let mut notes = Vec::new();
    for lambda in [0.0, 5.0, 12.0] {
        let p = RawParams::new(4, 0.5, 2.5, lambda).validate().map_err(err)?;
        let mut js = Vec::new();
        for seed in 0..3 {
            let r = minimize_radial(&p, &MinimizeConfig { seed, ..Default::default() }).map_err(err)?;
            if r.residual > EL_RESIDUAL_MAX {
                return Err(format!("lambda {lambda} seed {seed}: residual {:.2e}", r.residual));
            }
            if r.report.seminorm < p.hardy() * r.report.hardy * (1.0 - HARDY_SLACK) {
                return Err(format!("lambda {lambda} seed {seed}: fractional Hardy violated"));
            }
            js.push(r.j());
        }
        let hi = js.iter().cloned().fold(f64::MIN, f64::max);
        let lo = js.iter().cloned().fold(f64::MAX, f64::min);
        if hi - lo > MULTISTART_REL * lo {
            return Err(format!("lambda {lambda}: multi-start spread {:.2e}", (hi - lo) / lo));
        }
        notes.push(format!("J({lambda})={lo:.8}"));
    }
    Ok(notes.join(" "))
}

fn symmetry_breaking() -> Outcome {
    let p = RawParams::new(4, 0.5, 2.5, 0.0).validate().map_err(err)?;
    let r = lambda_sweep(&p, &SweepConfig::default(), &eigenpair_degree(4, 1).map_err(err)?, &MinimizeConfig::default())
        .map_err(err)?;
    let first = &r.rows[0];
    if first.lambda != 0.0 || first.verdict() != Verdict::Stable {
        return Err(format!("lambda = 0 is {}", first.verdict()));
    }
    if !r.rows.iter().any(|row| row.verdict() == Verdict::Unstable && row.lambda <= THRESHOLD_4D) {
        return Err("no unstable certificate below the threshold".into());
    }
    match r.bracket {
        Some((lo, hi)) if lo >= 0.0 && hi > 0.0 && hi <= THRESHOLD_4D => Ok(format!("lambda_hat in ({lo:.4}, {hi:.4}]")),
        b => Err(format!("bracket {b:?}")),
    }
}

fn multiplicity() -> Outcome {
    let p = RawParams::new(2, 0.5, 3.0, MULTIPLICITY_LAMBDA).validate().map_err(err)?;
    let u = minimize_radial(&p, &MinimizeConfig::default()).map_err(err)?.require_converged().map_err(err)?;
    let cert = certify(&u.field, &p, &eigenpair_degree(2, 2).map_err(err)?).map_err(err)?;
    if cert.verdict != Verdict::Unstable {
        return Err(format!("mode-2 certificate is {} at lambda {MULTIPLICITY_LAMBDA}", cert.verdict));
    }
    let cfg = MinimizeConfig { mode_factor: MULTIPLICITY_MODE_FACTOR, ..Default::default() };
    let c = sector_compare(&p, 1, 2, &cfg).map_err(err)?;
    let msg = format!(
        "J(u1)={:.8} J(v1)={:.8} J(u2)={:.8} strict margin {:.2e} vs error {:.2e}",
        c.j_t,
        c.j_vt,
        c.j_big_t,
        c.strict_margin(),
        c.error_estimate
    );
    if c.minimal && c.strict && c.strict_margin() > c.error_estimate {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn determinism() -> Outcome {
    let configs = [
        "subcommand = minimize-radial\nn = 4\ns = 0.5\nq = 2.5\nlambda = 5\nseed = 11\n",
        "subcommand = sweep\nlambda-max = 6\npoints = 3\nbisect-tol = 1\nnodes = 1024\n",
        "subcommand = minimize-sector\nn = 2\ns = 0.5\nq = 3\nt = 2\nnodes = 1024\nmode-factor = 4\nseed = 5\n",
        "subcommand = check\nsuite = algebra\nseed = 9\n",
    ];
    for text in configs {
        let cfg = RunConfig::from_kv(text).map_err(err)?;
        let a = execute(&cfg).map_err(err)?.json;
        let b = execute(&cfg).map_err(err)?.json;
        if a.as_bytes() != b.as_bytes() {
            return Err(format!("{} differs between runs", cfg.subcommand.unwrap_or_default()));
        }
    }
    Ok(format!("{} configurations byte-identical", configs.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("constants", constants),
        ("half-line identity", halfline),
        ("quad_D", quad_d),
        ("slice and half-space Hardy", extension_hardy),
        ("normal identities and gap chain", perturbation),
        ("g_j algebra", algebra),
        ("radial minimizer quality", radial_quality),
        ("symmetry breaking sweep", symmetry_breaking),
        ("multiplicity n = 2", multiplicity),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|p| p == &id.to_string() || name.contains(p.as_str())) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = f();
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {id:>2} PASS  {name} ({secs:.1} s): {msg}"),
            Err(msg) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name} ({secs:.1} s): {msg}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
