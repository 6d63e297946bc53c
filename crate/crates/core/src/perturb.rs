//! The non-radial competitor `ũ = u Σ_j (|x_j|/|x|) φ(x_j/|x_j|)` built from a radial `u`,
//! its orthogonality relations, the energy gap, and second-variation certificates.
//!
//! For `m = 1` the competitor is the single angular mode `u(r) φ(σ)` and every
//! quantity is exact on the spectral side. For `m > 1` only the extension bound
//! is available, which can never certify instability.

use crate::energy::{el_residual, seminorm};
use crate::error::{Error, Result};
use crate::extension::{cs_extend, perturbed_extension_gap};
use crate::params::{breaking_threshold, c_hat_one_justified, c_mu, cs_constant, ProblemParams};
use crate::special::gamma;
use crate::spectral::{weighted_norm, Field, RadialProfile};
use crate::spherical::{invariant_first_eigenvalue, perturbation_factor, sphere_mean_poly, SphericalEigenpair, SymmetryGroup};
use serde::{Deserialize, Serialize};

/// Relative band around zero inside which a certificate margin is inconclusive.
pub const CERTIFICATE_TOL: f64 = 1e-4;

/// `ũ` together with the data it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedFunction {
    pub source: RadialProfile,
    pub eigen: SphericalEigenpair,
    pub k: usize,
    pub m: usize,
    /// `u(r)φ(σ)` when `m = 1`.
    pub field: Option<Field>,
}

pub fn build_perturbed(u: &Field, eigen: &SphericalEigenpair, k: usize, m: usize) -> Result<PerturbedFunction> {
    let Field::Radial(source) = u else {
        return Err(Error::NonRadialSource);
    };
    if k * m != source.n || eigen.k != k {
        return Err(Error::PartitionMismatch { n: source.n, km: eigen.k * m });
    }
    if eigen.mu <= 0.0 {
        return Err(Error::MuNonpositive(eigen.mu));
    }
    let field = if m == 1 {
        Some(Field::zonal(source.clone(), eigen.clone())?)
    } else {
        None
    };
    Ok(PerturbedFunction { source: source.clone(), eigen: eigen.clone(), k, m, field })
}

impl PerturbedFunction {
    pub fn n(&self) -> usize {
        self.k * self.m
    }

    /// `ũ(x)` at a point of `ℝⁿ \ {0}`; `u` is interpolated in `ln r`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let factor = perturbation_factor(&self.eigen, self.k, self.m)?.eval(x, 0.0)?;
        let grid = &self.source.grid;
        let t = (r.ln() - grid.t0()) / grid.dt();
        if !(0.0..=(grid.len() - 1) as f64).contains(&t) {
            return Ok(0.0);
        }
        let i = (t.floor() as usize).min(grid.len() - 2);
        let frac = t - i as f64;
        let v = self.source.values();
        Ok(factor * (v[i] * (1.0 - frac) + v[i + 1] * frac))
    }

    /// `(mean F, mean F²)` over `S^{n-1}` at `y = 0`.
    ///
    /// `(|θ_1|², …, |θ_m|²)` is Dirichlet(k/2, …, k/2) on the sphere and independent
    /// of the block directions, so the averages factor.
    pub fn factor_moments(&self) -> (f64, f64) {
        let (k, m) = (self.k as f64, self.m as f64);
        let n = k * m;
        let deg = 2 * self.eigen.degree + 2;
        let mean = sphere_mean_poly(self.k, deg, |c| self.eigen.eval_cos(c));
        let mean_sq = sphere_mean_poly(self.k, deg, |c| self.eigen.eval_cos(c).powi(2));
        let g = gamma((k + 1.0) / 2.0) / gamma(k / 2.0);
        let abs_one = gamma(n / 2.0) / gamma((n + 1.0) / 2.0) * g;
        let abs_pair = 2.0 / n * g * g;
        let mean_f = m * abs_one * mean;
        let mean_f2 = m * (k / n) * mean_sq + m * (m - 1.0) * abs_pair * mean * mean;
        (mean_f, mean_f2)
    }
}

/// The integrals entering the orthogonality relations for `ũ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalIdentities {
    /// `∫|x|^{-bq}|u|^q`
    pub lq: f64,
    /// `∫|x|^{-bq}|u|^{q-2}|ũ|²`
    pub tilde_sq: f64,
    /// `∫|x|^{-bq}|u|^{q-2}uũ`
    pub cross: f64,
    /// `∫|x|^{-2s}|u|²`
    pub hardy_u: f64,
    /// `∫|x|^{-2s}|ũ|²`
    pub hardy_tilde: f64,
}

impl NormalIdentities {
    pub fn tilde_sq_rel_error(&self) -> f64 {
        (self.tilde_sq - self.lq).abs() / self.lq
    }

    /// `|cross|` relative to the `q`-norm integral.
    pub fn cross_normalized(&self) -> f64 {
        self.cross.abs() / self.lq
    }
}

pub fn normal_identities(pert: &PerturbedFunction, params: &ProblemParams) -> Result<NormalIdentities> {
    if params.n != pert.n() {
        return Err(Error::PartitionMismatch { n: params.n, km: pert.n() });
    }
    let u = Field::Radial(pert.source.clone());
    let lq = weighted_norm(&u, params.b, params.q)?.value;
    let hardy_u = weighted_norm(&u, params.s, 2.0)?.value;
    let (mean_f, mean_f2) = pert.factor_moments();
    // radial u: the x-integrals factor into r-integral times sphere average
    Ok(NormalIdentities { lq, tilde_sq: mean_f2 * lq, cross: mean_f * lq, hardy_u, hardy_tilde: mean_f2 * hardy_u })
}

/// How the seminorm gap was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapPath {
    /// Difference of per-mode spectral seminorms (`m = 1`).
    Exact,
    /// `C_s` times the extension energy gap of `F·w` (an upper bound).
    ExtensionBound,
}

/// `‖D^{s/2}ũ‖² − ‖D^{s/2}u‖²` against `c_μ ∫|x|^{-2s}|u|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyGap {
    pub gap: f64,
    pub bound: f64,
    pub path: GapPath,
    pub hardy_u: f64,
    pub c_mu: f64,
    /// Quadrature plus y-truncation error estimate (zero on the exact path).
    pub error_estimate: f64,
}

impl EnergyGap {
    pub fn margin(&self) -> f64 {
        self.bound - self.gap
    }

    pub fn holds(&self) -> bool {
        self.gap <= self.bound + self.error_estimate
    }
}

fn partition_params(pert: &PerturbedFunction, params: &ProblemParams) -> Result<ProblemParams> {
    if params.n != pert.n() {
        return Err(Error::PartitionMismatch { n: params.n, km: pert.n() });
    }
    Ok(ProblemParams { k: pert.k, m: pert.m, ..*params })
}

/// Exact gap for `m = 1`, extension bound otherwise.
pub fn energy_gap(pert: &PerturbedFunction, params: &ProblemParams) -> Result<EnergyGap> {
    let pp = partition_params(pert, params)?;
    let cm = c_mu(&pp, pert.eigen.mu)?;
    let u = Field::Radial(pert.source.clone());
    let hardy_u = weighted_norm(&u, params.s, 2.0)?.value;
    let (gap, path, error_estimate) = match &pert.field {
        Some(tilde) => (seminorm(tilde, params.s)? - seminorm(&u, params.s)?, GapPath::Exact, 0.0),
        None => {
            let (g, err) = extension_gap(pert, params.s)?;
            (g, GapPath::ExtensionBound, err)
        }
    };
    Ok(EnergyGap { gap, bound: cm * hardy_u, path, hardy_u, c_mu: cm, error_estimate })
}

/// `C_s` times the extension gap, with its error estimate.
pub fn extension_gap(pert: &PerturbedFunction, s: f64) -> Result<(f64, f64)> {
    let ext = cs_extend(&Field::Radial(pert.source.clone()), s)?;
    let g = perturbed_extension_gap(&ext, &pert.eigen, pert.m)?;
    let cs = cs_constant(s);
    Ok((cs * g.gap, cs * (g.quadrature_error + g.y_residual)))
}

/// `exact ≤ extension ≤ bound` for `m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapChain {
    pub exact: f64,
    pub extension: f64,
    pub bound: f64,
    pub extension_error: f64,
}

impl GapChain {
    pub fn holds(&self) -> bool {
        self.exact <= self.extension + self.extension_error && self.extension <= self.bound + self.extension_error
    }
}

pub fn gap_chain(pert: &PerturbedFunction, params: &ProblemParams) -> Result<GapChain> {
    let exact = energy_gap(pert, params)?;
    if exact.path != GapPath::Exact {
        return Err(Error::InvalidParameter("the exact gap needs m = 1".into()));
    }
    let (extension, extension_error) = extension_gap(pert, params.s)?;
    Ok(GapChain { exact: exact.gap, extension, bound: exact.bound, extension_error })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Unstable,
    Stable,
    Inconclusive,
}

impl Verdict {
    pub fn classify(margin: f64, tolerance: f64) -> Self {
        if margin > tolerance {
            Verdict::Unstable
        } else if margin < -tolerance {
            Verdict::Stable
        } else {
            Verdict::Inconclusive
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Unstable => "unstable",
            Verdict::Stable => "stable",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Second-variation test of a radial candidate against `ũ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakingCertificate {
    pub lambda: f64,
    pub degree: usize,
    pub q_u: f64,
    pub q_tilde: f64,
    /// `(q-1) Q_λ(u) − Q_λ(ũ)`
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub el_residual: f64,
}

/// Certificate with the default tolerances.
pub fn certify(u: &Field, params: &ProblemParams, eigen: &SphericalEigenpair) -> Result<BreakingCertificate> {
    certify_with(u, params, eigen, CERTIFICATE_TOL, CERTIFICATE_TOL)
}

/// `el_tol` bounds the Euler–Lagrange residual of `u`; `rel_tol` sets the
/// inconclusive band `rel_tol · (q-1) Q_λ(u)`.
pub fn certify_with(
    u: &Field,
    params: &ProblemParams,
    eigen: &SphericalEigenpair,
    el_tol: f64,
    rel_tol: f64,
) -> Result<BreakingCertificate> {
    let pert = build_perturbed(u, eigen, params.n, 1)?;
    let res = el_residual(u, params, None)?;
    if res.residual > el_tol {
        return Err(Error::UnconvergedInput { residual: res.residual, tolerance: el_tol });
    }
    let tilde = pert.field.as_ref().expect("m = 1 carries its field");
    let hardy = weighted_norm(u, params.s, 2.0)?.value;
    let hardy_tilde = weighted_norm(tilde, params.s, 2.0)?.value;
    let q_u = seminorm(u, params.s)? + params.lambda * hardy;
    let q_tilde = seminorm(tilde, params.s)? + params.lambda * hardy_tilde;
    let lead = (params.q - 1.0) * q_u;
    let margin = lead - q_tilde;
    let tolerance = rel_tol * lead;
    Ok(BreakingCertificate {
        lambda: params.lambda,
        degree: eigen.degree,
        q_u,
        q_tilde,
        margin,
        tolerance,
        verdict: Verdict::classify(margin, tolerance),
        el_residual: res.residual,
    })
}

/// `λ_bound = −H_s + c_μ/(q−2)` with its ingredients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBound {
    pub mu: f64,
    pub m: usize,
    pub hardy: f64,
    pub c_hat: f64,
    pub c_mu: f64,
    pub q: f64,
    pub lambda_bound: f64,
    pub regime: String,
}

impl ThresholdBound {
    /// `−H_s + c_μ/(q−2)` from the stored fields.
    pub fn recompute(&self) -> f64 {
        -self.hardy + self.c_mu / (self.q - 2.0)
    }
}

/// Which eigenvalue the bound is built from.
#[derive(Debug, Clone, Copy)]
pub enum ThresholdSource<'a> {
    Group(&'a SymmetryGroup),
    Eigen(&'a SphericalEigenpair),
}

pub fn threshold(params: &ProblemParams, source: ThresholdSource<'_>) -> Result<ThresholdBound> {
    let (mu, k, m) = match source {
        ThresholdSource::Group(g) => (invariant_first_eigenvalue(g)?.0, g.k, g.m),
        ThresholdSource::Eigen(e) => (e.mu, e.k, params.n / e.k),
    };
    if k * m != params.n {
        return Err(Error::PartitionMismatch { n: params.n, km: k * m });
    }
    let pp = ProblemParams { k, m, ..*params };
    let c_hat = pp.c_hat()?;
    let regime = if c_hat == 1.0 && c_hat_one_justified(pp.n, pp.s) {
        format!("c_hat = 1, valid for n = {}, s = {}", pp.n, pp.s)
    } else {
        format!("c_hat = {c_hat} supplied by the caller, not verified")
    };
    Ok(ThresholdBound {
        mu,
        m,
        hardy: pp.hardy(),
        c_hat,
        c_mu: c_mu(&pp, mu)?,
        q: pp.q,
        lambda_bound: breaking_threshold(&pp, mu)?,
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{CHat, RawParams};
    use crate::spectral::RadialGrid;
    use crate::spherical::{eigenpair_degree, GroupKind};

    fn gaussian(n: usize) -> Field {
        let g = RadialGrid::new(1e-9, 1e9, 4096).unwrap();
        Field::Radial(RadialProfile::from_fn(&g, n, |r| (-r * r / 2.0).exp()).unwrap())
    }

    #[test]
    fn gaussian_degree_one() {
        let e = eigenpair_degree(4, 1).unwrap();
        let p = build_perturbed(&gaussian(4), &e, 4, 1).unwrap();
        let x = [0.3, -0.2, 0.5, 0.1];
        let r = x.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
        let expect = (-r * r / 2.0).exp() * 2.0 * x[0] / r;
        assert!((p.eval(&x).unwrap() - expect).abs() < 1e-6 * expect.abs());
        let params = RawParams::new(4, 0.5, 2.5, 0.0).validate().unwrap();
        let id = normal_identities(&p, &params).unwrap();
        assert!((id.hardy_tilde - id.hardy_u).abs() < 1e-12 * id.hardy_u);
        assert!(id.tilde_sq_rel_error() < 1e-8);
        assert!(id.cross_normalized() < 1e-10);
    }

    #[test]
    fn factor_moments_general_m() {
        let e = eigenpair_degree(2, 1).unwrap();
        let g = RadialGrid::new(1e-6, 1e6, 256).unwrap();
        let u = Field::Radial(RadialProfile::from_fn(&g, 4, |r| (-r * r).exp()).unwrap());
        let p = build_perturbed(&u, &e, 2, 2).unwrap();
        let (f, f2) = p.factor_moments();
        assert!(f.abs() < 1e-14);
        assert!((f2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = eigenpair_degree(3, 1).unwrap();
        assert!(matches!(build_perturbed(&gaussian(4), &e, 3, 1), Err(Error::PartitionMismatch { .. })));
        let e4 = eigenpair_degree(4, 1).unwrap();
        let z = Field::zonal(
            match gaussian(4) {
                Field::Radial(p) => p,
                _ => unreachable!(),
            },
            e4.clone(),
        )
        .unwrap();
        assert_eq!(build_perturbed(&z, &e4, 4, 1), Err(Error::NonRadialSource));
    }

    #[test]
    fn gap_below_bound() {
        let params = RawParams::new(4, 0.5, 2.5, 0.0).validate().unwrap();
        let e = eigenpair_degree(4, 1).unwrap();
        let p = build_perturbed(&gaussian(4), &e, 4, 1).unwrap();
        let g = energy_gap(&p, &params).unwrap();
        assert_eq!(g.path, GapPath::Exact);
        assert!((g.c_mu - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(g.gap > 0.0 && g.margin() > 0.0);
    }

    #[test]
    fn gap_tends_to_mu_hardy_as_s_to_one() {
        let e = eigenpair_degree(4, 1).unwrap();
        let p = build_perturbed(&gaussian(4), &e, 4, 1).unwrap();
        let ratio = |s: f64| {
            let params = RawParams::new(4, s, 2.1, 0.0).validate().unwrap();
            let g = energy_gap(&p, &params).unwrap();
            g.gap / g.hardy_u
        };
        let seq: Vec<f64> = [0.9, 0.95, 0.99].iter().map(|&s| ratio(s)).collect();
        assert!((seq[2] - e.mu).abs() < 0.1 * e.mu);
        assert!((seq[2] - e.mu).abs() < (seq[0] - e.mu).abs());
    }

    #[test]
    fn verdict_band() {
        assert_eq!(Verdict::classify(1.0, 0.1), Verdict::Unstable);
        assert_eq!(Verdict::classify(-1.0, 0.1), Verdict::Stable);
        assert_eq!(Verdict::classify(0.05, 0.1), Verdict::Inconclusive);
        assert_eq!(Verdict::classify(-0.1, 0.1), Verdict::Inconclusive);
    }

    #[test]
    fn gaussian_is_not_converged() {
        let params = RawParams::new(4, 0.5, 2.5, 0.0).validate().unwrap();
        let e = eigenpair_degree(4, 1).unwrap();
        assert!(matches!(certify(&gaussian(4), &params, &e), Err(Error::UnconvergedInput { .. })));
    }

    #[test]
    fn threshold_values() {
        let params = RawParams::new(4, 0.5, 2.5, 0.0).validate().unwrap();
        let b = threshold(&params, ThresholdSource::Group(&SymmetryGroup::trivial(4))).unwrap();
        assert!((b.lambda_bound - (4.0 * std::f64::consts::PI - params.hardy())).abs() < 1e-12);
        assert_eq!(b.lambda_bound, b.recompute());
        let full = SymmetryGroup::new(GroupKind::FullOrthogonal, 4, 1).unwrap();
        assert_eq!(threshold(&params, ThresholdSource::Group(&full)), Err(Error::FullGroupRejected));

        let p2 = RawParams::new(2, 0.5, 3.0, 0.0)
            .with_partition(2, 1)
            .with_c_hat(CHat::Explicit(1.0))
            .validate()
            .unwrap();
        let c = |t: usize| {
            let g = SymmetryGroup::new(GroupKind::CyclicSector(t), 2, 1).unwrap();
            threshold(&p2, ThresholdSource::Group(&g)).unwrap().c_mu
        };
        // c_μ is affine in μ = t²
        assert!(((c(4) - c(3)) / 7.0 - (c(3) - c(2)) / 5.0).abs() < 1e-12);
    }
    #[test]
    fn chain_through_extension() {
        let g = RadialGrid::new(1e-10, 1e8, 2048).unwrap();
        let u = Field::Radial(RadialProfile::from_fn(&g, 4, |r| (-r * r / 2.0).exp()).unwrap());
        let params = RawParams::new(4, 0.5, 2.5, 0.0).validate().unwrap();
        let e = eigenpair_degree(4, 1).unwrap();
        let c = gap_chain(&build_perturbed(&u, &e, 4, 1).unwrap(), &params).unwrap();
        assert!(c.holds(), "{c:?}");
        assert!(c.exact < c.extension && c.extension < c.bound);

        let p22 = RawParams::new(4, 0.5, 2.5, 0.0).with_partition(2, 2).validate().unwrap();
        let e2 = eigenpair_degree(2, 1).unwrap();
        let gap = energy_gap(&build_perturbed(&u, &e2, 2, 2).unwrap(), &p22).unwrap();
        assert_eq!(gap.path, GapPath::ExtensionBound);
        assert!(gap.holds() && gap.margin() > 0.0, "{gap:?}");
    }
}
