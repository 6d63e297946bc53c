//! Conformance suites: closed-form constants, quadrature identities and the
//! Hardy-type inequalities, evaluated on a fixed corpus of radial profiles.

use crate::energy::seminorm;
use crate::error::{Error, Result};
use crate::extension::{cs_extend, dirichlet_energy, extension_profile_energy, extension_report};
use crate::params::{c_mu, c_mu_direct, cs_constant, gamma_constant, hardy_constant, CHat, ProblemParams, RawParams};
use crate::perturb::{build_perturbed, gap_chain, normal_identities};
use crate::special::gamma;
use crate::spectral::{halfline_weight_integral, weighted_norm, Field, RadialGrid, RadialProfile};
use crate::spherical::{eigenpair_degree, perturbation_factor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// One comparison. A row passes when `margin + tolerance >= 0`.
///
/// Equalities store `margin = -|lhs - rhs|`; inequalities `lhs <= rhs` store `margin = rhs - lhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn build(check: String, lhs: f64, rhs: f64, margin: f64, tolerance: f64) -> Self {
        let pass = margin.is_finite() && margin + tolerance >= 0.0;
        Self { check, lhs, rhs, margin, tolerance, pass }
    }

    /// `|lhs - rhs| <= rel · |rhs|`
    pub fn relative(check: impl Into<String>, lhs: f64, rhs: f64, rel: f64) -> Self {
        Self::build(check.into(), lhs, rhs, -(lhs - rhs).abs(), rel * rhs.abs())
    }

    /// `|lhs - rhs| <= tol`
    pub fn absolute(check: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::build(check.into(), lhs, rhs, -(lhs - rhs).abs(), tol)
    }

    /// `lhs <= rhs + slack`
    pub fn at_most(check: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self::build(check.into(), lhs, rhs, rhs - lhs, slack)
    }
}

pub fn all_pass(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Constants,
    Halfline,
    Hardy,
    Extension,
    Perturb,
    Algebra,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["constants", "halfline", "hardy", "extension", "perturb", "algebra", "all"];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "constants" => Suite::Constants,
            "halfline" => Suite::Halfline,
            "hardy" => Suite::Hardy,
            "extension" => Suite::Extension,
            "perturb" => Suite::Perturb,
            "algebra" => Suite::Algebra,
            "all" => Suite::All,
            other => return Err(Error::Parse(format!("unknown suite `{other}` (expected one of {:?})", Suite::NAMES))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Suite::NAMES[i])
    }
}

/// The fractional order values used by the scalar suites.
pub const S_VALUES: [f64; 9] = [0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.75, 0.9];

pub type ProfileFn = fn(usize, f64) -> f64;

/// Named radial test functions `u(r)`; the first argument is the dimension.
pub fn corpus() -> Vec<(&'static str, ProfileFn)> {
    vec![
        ("gauss", |_, r| (-r * r / 2.0).exp()),
        ("r2gauss", |_, r| r * r * (-r * r).exp()),
        ("ring", |_, r| (-4.0 * (r - 1.0) * (r - 1.0)).exp()),
        ("algebraic", |n, r| (1.0 + r * r).powf(-(n as f64) / 2.0)),
        ("lognormal", |_, r| {
            let z = (r / 10.0).ln() / 0.5;
            (-z * z / 2.0).exp()
        }),
    ]
}

/// Log grid wide enough for every corpus profile at every `s`.
pub fn corpus_grid() -> RadialGrid {
    RadialGrid::new(1e-10, 1e8, 2048).expect("static grid")
}

pub fn corpus_field(n: usize, f: ProfileFn) -> Result<Field> {
    Ok(Field::Radial(RadialProfile::from_fn(&corpus_grid(), n, |r| f(n, r))?))
}

pub fn constants_suite() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for s in S_VALUES {
        rows.push(CheckRow::relative(
            format!("gamma(s={s},c_hat=1)"),
            gamma_constant(s, 1.0),
            PI / (2.0 * (PI * s).sin()),
            1e-12,
        ));
    }
    rows.push(CheckRow::relative("C_s(s=0.5)", cs_constant(0.5), 1.0, 1e-12));
    let cases = [
        (RawParams::new(4, 0.5, 2.5, 0.0), 3.0),
        (RawParams::new(3, 0.25, 2.2, 0.0), 2.0),
        (RawParams::new(5, 0.75, 2.5, 0.0), 10.0),
        (RawParams::new(4, 0.5, 2.5, 0.0).with_partition(2, 2), 1.0),
        (RawParams::new(2, 0.5, 3.0, 0.0).with_c_hat(CHat::Explicit(1.0)), 4.0),
    ];
    for (raw, mu) in cases {
        let p = raw.validate()?;
        rows.push(CheckRow::relative(
            format!("c_mu(n={},s={},m={},mu={mu})", p.n, p.s, p.m),
            c_mu(&p, mu)?,
            c_mu_direct(&p, mu)?,
            1e-12,
        ));
    }
    Ok(rows)
}

/// `∫₀^∞ y^{1-2s}/(x²+y²) dy = ½Γ(s)Γ(1-s)|x|^{-2s}`.
pub fn halfline_suite() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for s in S_VALUES {
        for x in [0.1f64, 1.0, 10.0] {
            let exact = 0.5 * gamma(s) * gamma(1.0 - s) * x.powf(-2.0 * s);
            rows.push(CheckRow::relative(
                format!("halfline(s={s},x={x})"),
                halfline_weight_integral(s, x).value,
                exact,
                1e-6,
            ));
        }
    }
    rows
}

/// Fractional Hardy inequality `H_s ∫|x|^{-2s}u² <= seminorm` on the corpus.
pub fn hardy_suite(n: usize, s: f64) -> Result<Vec<CheckRow>> {
    let hs = hardy_constant(n, s)?;
    corpus()
        .par_iter()
        .map(|(name, f)| {
            let u = corpus_field(n, *f)?;
            let hardy = weighted_norm(&u, s, 2.0)?.value;
            let lhs = hs * hardy;
            let rhs = seminorm(&u, s)?;
            Ok(CheckRow::at_most(format!("frac_hardy({name},n={n},s={s})"), lhs, rhs, 1e-6 * rhs))
        })
        .collect()
}

/// `I_s = 1/C_s` and, for every corpus profile, `C_s·dirichlet = seminorm` (1e-3).
pub fn quad_d_suite(n: usize, s: f64, profiles: &[(&'static str, ProfileFn)]) -> Result<Vec<CheckRow>> {
    let mut rows = vec![CheckRow::relative(
        format!("I_s(s={s})"),
        extension_profile_energy(s).value,
        1.0 / cs_constant(s),
        1e-6,
    )];
    let per: Vec<CheckRow> = profiles
        .par_iter()
        .map(|(name, f)| {
            let u = corpus_field(n, *f)?;
            let ext = cs_extend(&u, s)?;
            let d = dirichlet_energy(&ext)?;
            Ok(CheckRow::relative(format!("quad_D({name},n={n},s={s})"), cs_constant(s) * d.value, seminorm(&u, s)?, 1e-3))
        })
        .collect::<Result<_>>()?;
    rows.extend(per);
    Ok(rows)
}

/// Heights at which the slice inequality is evaluated.
pub const SLICE_HEIGHTS: [f64; 3] = [0.1, 1.0, 10.0];

/// Slice inequality with `ĉ`, the half-space bound with `γ(s, ĉ)` and the
/// `W^s` Hardy inequality, all on the corpus with relative slack 1e-6.
pub fn extension_hardy_suite(n: usize, s: f64, c_hat: f64) -> Result<Vec<CheckRow>> {
    let gamma_c = gamma_constant(s, c_hat);
    let per: Vec<Vec<CheckRow>> = corpus()
        .par_iter()
        .map(|(name, f)| {
            let u = corpus_field(n, *f)?;
            let ext = cs_extend(&u, s)?;
            let rep = extension_report(&ext, c_hat, &SLICE_HEIGHTS)?;
            let mut rows = Vec::new();
            for sl in &rep.slice_checks {
                rows.push(CheckRow::at_most(format!("dis({name},n={n},s={s},y={})", sl.y), sl.lhs, sl.rhs, 1e-6 * sl.rhs));
            }
            let rhs = gamma_c * weighted_norm(&u, s, 2.0)?.value;
            rows.push(CheckRow::at_most(format!("uw0({name},n={n},s={s})"), rep.halfplane_hardy, rhs, 1e-6 * rhs));
            let lhs = rep.ws_hardy_constant * rep.halfplane_hardy;
            rows.push(CheckRow::at_most(
                format!("ws_hardy({name},n={n},s={s})"),
                lhs,
                rep.dirichlet,
                1e-6 * rep.dirichlet + rep.quadrature_error,
            ));
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Both parts of the extension suite; the Hardy-type rows need `ĉ`.
pub fn extension_suite(n: usize, s: f64, c_hat: Option<f64>) -> Result<Vec<CheckRow>> {
    let mut rows = quad_d_suite(n, s, &corpus())?;
    if let Some(c) = c_hat {
        rows.extend(extension_hardy_suite(n, s, c)?);
    }
    Ok(rows)
}

/// Normal identities and the gap chain for `m = 1` on the corpus, degrees 1 and 2.
pub fn perturb_suite(params: &ProblemParams) -> Result<Vec<CheckRow>> {
    let n = params.n;
    let s = params.s;
    let p = ProblemParams { k: n, m: 1, ..*params };
    let cases: Vec<(&str, ProfileFn, usize)> =
        corpus().into_iter().flat_map(|(name, f)| [(name, f, 1), (name, f, 2)]).collect();
    let per: Vec<Vec<CheckRow>> = cases
        .par_iter()
        .map(|(name, f, ell)| {
            let u = corpus_field(n, *f)?;
            let e = eigenpair_degree(n, *ell)?;
            let pert = build_perturbed(&u, &e, n, 1)?;
            let id = normal_identities(&pert, &p)?;
            let c = gap_chain(&pert, &p)?;
            let tag = format!("{name},n={n},s={s},l={ell}");
            Ok(vec![
                CheckRow::relative(format!("normal_sq({tag})"), id.tilde_sq, id.lq, 1e-8),
                CheckRow::absolute(format!("normal_cross({tag})"), id.cross_normalized(), 0.0, 1e-10),
                CheckRow::at_most(format!("gap_exact_le_ext({tag})"), c.exact, c.extension, c.extension_error),
                CheckRow::at_most(format!("gap_ext_le_bound({tag})"), c.extension, c.bound, c.extension_error),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// Finite-difference `−div(y^{1-2s}∇F)` against the closed form at `points`
/// random points per `s`. The error is taken relative to `Σ_j |y^{1-2s} g_j φ_j|`
/// so that cancellation between blocks does not inflate it.
pub fn algebra_suite(k: usize, m: usize, points: usize, seed: u64) -> Result<Vec<CheckRow>> {
    let e = eigenpair_degree(k, 1)?;
    let factor = perturbation_factor(&e, k, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for s in [0.25, 0.5, 0.75] {
        let mut worst: f64 = 0.0;
        for _ in 0..points {
            let x: Vec<f64> = (0..k * m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y = rng.gen_range(0.2..2.0);
            let terms = factor.divergence_terms(&x, y, s)?;
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            let closed: f64 = terms.iter().sum();
            let fd = factor.weighted_divergence_fd(&x, y, s, 1e-4)?;
            worst = worst.max((fd - closed).abs() / scale);
        }
        rows.push(CheckRow::absolute(format!("g_j(k={k},m={m},s={s},points={points})"), worst, 0.0, 1e-4));
    }
    Ok(rows)
}

/// Inputs of [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub n: usize,
    pub s: f64,
    pub q: f64,
    pub c_hat: CHat,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { n: 4, s: 0.5, q: 2.5, c_hat: CHat::Default, seed: 0 }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<CheckRow>> {
    let params = RawParams::new(cfg.n, cfg.s, cfg.q, 0.0).with_c_hat(cfg.c_hat).validate()?;
    let c_hat = params.c_hat().ok();
    Ok(match suite {
        Suite::Constants => constants_suite()?,
        Suite::Halfline => halfline_suite(),
        Suite::Hardy => hardy_suite(cfg.n, cfg.s)?,
        Suite::Extension => extension_suite(cfg.n, cfg.s, c_hat)?,
        Suite::Perturb => perturb_suite(&params)?,
        Suite::Algebra => {
            let mut rows = algebra_suite(4, 1, 100, cfg.seed)?;
            rows.extend(algebra_suite(2, 2, 100, cfg.seed)?);
            rows
        }
        Suite::All => {
            let mut rows = Vec::new();
            for s in [Suite::Constants, Suite::Halfline, Suite::Hardy, Suite::Extension, Suite::Perturb, Suite::Algebra] {
                rows.extend(run_suite(s, cfg)?);
            }
            rows
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_semantics() {
        assert!(CheckRow::relative("a", 1.0 + 1e-13, 1.0, 1e-12).pass);
        assert!(!CheckRow::relative("a", 1.0 + 1e-11, 1.0, 1e-12).pass);
        assert!(CheckRow::at_most("b", 1.0, 1.0, 0.0).pass);
        assert!(CheckRow::at_most("b", 1.0 + 1e-9, 1.0, 1e-8).pass);
        assert!(!CheckRow::at_most("b", 1.1, 1.0, 1e-8).pass);
        assert!(!CheckRow::absolute("c", f64::NAN, 0.0, 1.0).pass);
    }

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn scalar_suites_pass() {
        let rows = constants_suite().unwrap();
        assert_eq!(rows.len(), 15);
        assert!(all_pass(&rows), "{rows:?}");
        let rows = halfline_suite();
        assert_eq!(rows.len(), 27);
        assert!(all_pass(&rows), "{rows:?}");
    }

    #[test]
    fn algebra_passes() {
        for (k, m) in [(4, 1), (2, 2)] {
            let rows = algebra_suite(k, m, 100, 0).unwrap();
            assert!(all_pass(&rows), "{rows:?}");
        }
    }
}
