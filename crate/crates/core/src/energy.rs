//! Energy functionals `‖D^{s/2}u‖²`, `‖|x|^{-s}u‖²`, `‖|x|^{-b}u‖_q^q`, `Q_λ`, `J_λ`
//! and the Euler–Lagrange residual.
//!
//! Everything is computed in `t = ln r` on the variable `h = r^{n/2-s} u`:
//! the Hardy integral is `|S^{n-1}| ∫ h² dt`, the seminorm of angular mode `ℓ`
//! is `|S^{n-1}| ∫ Φ_ℓ(ω)|ĥ(ω)|² dω/2π`, and the Euler–Lagrange equation
//! becomes `(Φ_ℓ + λ) h = κ |h|^{q-2} h` with no explicit `t`.
//!
//! Near the origin `h ~ r^{n/2-s} u(0)`, so the grid must reach far enough
//! down for that to be negligible; in `n = 2` with `s` close to one this takes
//! many decades.

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::special::sphere_area;
use crate::spectral::mellin::{FftPair, ModeOperator};
use crate::spectral::{weighted_norm, Field, GridSpec, PolarField, RadialGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `‖(−Δ)^{s/2} u‖²` as a sum of per-mode Mellin quadratic forms.
pub fn seminorm(field: &Field, s: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!("s = {s} must lie in [0, 1)")));
    }
    let n = field.n();
    let grid = field.grid();
    let fft = FftPair::new(grid.len());
    let area = sphere_area(n);
    let mut total = 0.0;
    for (ell, values) in field.components() {
        let h = h_of(grid, n, s, values);
        let op = ModeOperator::new(grid.len(), grid.dt(), n, s, ell);
        total += op.quadratic_form_spec(&fft.forward(&h), 0.0);
    }
    Ok(area * total)
}

pub(crate) fn h_of(grid: &RadialGrid, n: usize, s: f64, values: &[f64]) -> Vec<f64> {
    let p = n as f64 / 2.0 - s;
    grid.nodes().iter().zip(values).map(|(r, u)| r.powf(p) * u).collect()
}

/// The five functionals of one function, plus grid context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub seminorm: f64,
    pub hardy: f64,
    pub lq: f64,
    pub q_lambda: f64,
    pub j_lambda: f64,
    pub lambda: f64,
    /// Largest truncation-residual estimate among the integrals, relative.
    pub truncation_residual: f64,
    pub grid: GridSpec,
}

pub fn energy_report(field: &Field, params: &ProblemParams) -> Result<EnergyReport> {
    if field.n() != params.n {
        return Err(Error::Incompatible(format!("field lives in n = {}, parameters have n = {}", field.n(), params.n)));
    }
    if field.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let semi = seminorm(field, params.s)?;
    let hardy = weighted_norm(field, params.s, 2.0)?;
    let lq = weighted_norm(field, params.b, params.q)?;
    let q_lambda = semi + params.lambda * hardy.value;
    Ok(EnergyReport {
        seminorm: semi,
        hardy: hardy.value,
        lq: lq.value,
        q_lambda,
        j_lambda: q_lambda / lq.value.powf(2.0 / params.q),
        lambda: params.lambda,
        truncation_residual: (hardy.residual / hardy.value).max(lq.residual / lq.value),
        grid: field.grid().spec(),
    })
}

/// Dual-norm Euler–Lagrange residual and the multiplier it was measured with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElResidual {
    pub residual: f64,
    pub kappa: f64,
}

/// Per-mode `h_ℓ` and nonlinearity `(|h|^{q-2}h)_ℓ`.
fn modes_and_nonlinearity(field: &Field, s: f64, q: f64) -> Result<Vec<(usize, Vec<f64>, Vec<f64>)>> {
    let n = field.n();
    let grid = field.grid();
    match field {
        Field::Radial(p) => {
            let h = h_of(grid, n, s, p.values());
            let nl = h.iter().map(|v| v.abs().powf(q - 2.0) * v).collect();
            Ok(vec![(0, h, nl)])
        }
        Field::Polar(f) => {
            let samples = f.to_samples();
            let p = n as f64 / 2.0 - s;
            let nl: Vec<Vec<f64>> = samples
                .iter()
                .zip(grid.nodes())
                .map(|(row, r)| {
                    let w = r.powf(p);
                    row.iter().map(|u| (w * u).abs().powf(q - 2.0) * w * u).collect()
                })
                .collect();
            let proj = f.project_samples(&nl);
            Ok(f.modes()
                .iter()
                .enumerate()
                .map(|(idx, &l)| (l, h_of(grid, n, s, f.coeffs(idx)), proj.coeffs(idx).to_vec()))
                .collect())
        }
        Field::Zonal { .. } => Err(Error::Incompatible("the residual is defined for nonnegative fields".into())),
    }
}

/// Smallest and largest `|·|` of `r^{n/2-s} u` over the samples.
///
/// Weighted this way, roundoff in the far tails is not mistaken for a sign change.
fn weighted_range(field: &Field, s: f64) -> (f64, f64) {
    let p = field.n() as f64 / 2.0 - s;
    let nodes = field.grid().nodes();
    let rows: Vec<Vec<f64>> = match field {
        Field::Polar(f) => f.to_samples(),
        _ => field.components()[0].1.iter().map(|v| vec![*v]).collect(),
    };
    rows.iter().zip(nodes).fold((f64::INFINITY, 0.0f64), |(lo, hi), (row, r)| {
        let w = r.powf(p);
        row.iter().fold((lo, hi), |(lo, hi), v| (lo.min(w * v), hi.max((w * v).abs())))
    })
}

/// `‖(D^s + λ|x|^{-2s}) u − κ|x|^{-bq}|u|^{q-2}u‖_* / ‖u‖_*` with the dual norm
/// of the quadratic form. `κ` is fitted in the same norm when not supplied.
pub fn el_residual(field: &Field, params: &ProblemParams, multiplier: Option<f64>) -> Result<ElResidual> {
    if field.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let (lowest, highest) = weighted_range(field, params.s);
    if lowest < -1e-12 * highest {
        return Err(Error::NegativeValues(lowest / highest));
    }
    el_residual_signed(field, params, multiplier)
}

/// [`el_residual`] without the sign check, for iterates in the middle of a descent.
pub(crate) fn el_residual_signed(field: &Field, params: &ProblemParams, multiplier: Option<f64>) -> Result<ElResidual> {
    if field.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let grid = field.grid();
    let len = grid.len();
    let fft = FftPair::new(len);
    let mut parts = Vec::new();
    for (ell, h, nl) in modes_and_nonlinearity(field, params.s, params.q)? {
        let op = ModeOperator::new(len, grid.dt(), params.n, params.s, ell);
        parts.push((op, fft.forward(&h), fft.forward(&nl)));
    }
    let lam = params.lambda;
    // ⟨h, N⟩, ⟨N, L⁻¹N⟩, ⟨h, Lh⟩ in spectral form
    let (mut hn, mut nln, mut hlh) = (0.0, 0.0, 0.0);
    for (op, hs, ns) in &parts {
        for ((a, b), p) in hs.iter().zip(ns).zip(op.symbol()) {
            let l = p + lam;
            hn += (a * b.conj()).re;
            nln += b.norm_sqr() / l;
            hlh += l * a.norm_sqr();
        }
    }
    let kappa = multiplier.unwrap_or(if nln > 0.0 { hn / nln } else { 0.0 });
    let mut res = 0.0;
    for (op, hs, ns) in &parts {
        for ((a, b), p) in hs.iter().zip(ns).zip(op.symbol()) {
            let l = p + lam;
            let r: Complex64 = a * l - b * kappa;
            res += r.norm_sqr() / l;
        }
    }
    Ok(ElResidual { residual: (res / hlh).sqrt(), kappa })
}

/// Both sides of the second-variation inequality at `u` in the direction `ũ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondVariation {
    /// `(q-1) Q_λ(u) ∫|x|^{-bq}|u|^{q-2}|ũ|² / ‖|x|^{-b}u‖_q^q`
    pub lhs: f64,
    /// `Q_λ(ũ) + (q-2) Q_λ(u) (∫|x|^{-bq}|u|^{q-2}uũ)² / ‖|x|^{-b}u‖_q^{2q}`
    pub rhs: f64,
    pub cross: f64,
}

/// Second variation for `u` radial and `ũ` given on the same grid.
pub fn second_variation(u: &Field, tilde: &Field, params: &ProblemParams) -> Result<SecondVariation> {
    let Field::Radial(base) = u else {
        return Err(Error::NonRadialSource);
    };
    if tilde.grid() != u.grid() || tilde.n() != u.n() {
        return Err(Error::Incompatible("u and ũ must share grid and dimension".into()));
    }
    let ru = energy_report(u, params)?;
    let rt = energy_report(tilde, params)?;
    let n = params.n;
    let grid = base.grid.clone();
    let expo = n as f64 - params.b * params.q;
    let weight: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(base.values())
        .map(|(r, v)| r.powf(expo) * v.abs().powf(params.q - 2.0))
        .collect();
    let area = sphere_area(n);
    let tilde_sq = tilde.angular_mean_abs_pow(2.0);
    let quad: f64 = area * grid.dt() * weight.iter().zip(&tilde_sq).map(|(w, t)| w * t).sum::<f64>();
    // only the ℓ = 0 part of ũ meets the radial u
    let zero_mode: Vec<f64> = tilde
        .components()
        .iter()
        .find(|(l, _)| *l == 0)
        .map(|(_, c)| c.to_vec())
        .unwrap_or_else(|| vec![0.0; grid.len()]);
    let cross: f64 = area
        * grid.dt()
        * weight.iter().zip(base.values()).zip(&zero_mode).map(|((w, v), t)| w * v * t).sum::<f64>();
    let lhs = (params.q - 1.0) * ru.q_lambda * quad / ru.lq;
    let rhs = rt.q_lambda + (params.q - 2.0) * ru.q_lambda * cross * cross / (ru.lq * ru.lq);
    Ok(SecondVariation { lhs, rhs, cross })
}

/// Radial field `u` embedded in `PolarField` form (used for mode bookkeeping in `n = 2`).
pub fn polar_energy_by_mode(field: &PolarField, s: f64) -> Vec<(usize, f64)> {
    let grid = &field.grid;
    let fft = FftPair::new(grid.len());
    let area = sphere_area(2);
    field
        .modes()
        .iter()
        .enumerate()
        .map(|(idx, &l)| {
            let h = h_of(grid, 2, s, field.coeffs(idx));
            let op = ModeOperator::new(grid.len(), grid.dt(), 2, s, l);
            (l, area * op.quadratic_form_spec(&fft.forward(&h), 0.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{hardy_constant, sobolev_constant, RawParams};
    use crate::special::gamma;
    use crate::spectral::{hankel_transform, RadialProfile};
    use crate::spherical::eigenpair_degree;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> RadialGrid {
        RadialGrid::new(1e-9, 1e9, 4096).unwrap()
    }

    fn gaussian(g: &RadialGrid, n: usize) -> RadialProfile {
        RadialProfile::from_fn(g, n, |r| (-r * r / 2.0).exp()).unwrap()
    }

    #[test]
    fn gaussian_seminorm_closed_form() {
        // h = r^{n/2-s}u decays slowly towards the origin when n = 2
        let g = RadialGrid::new(1e-40, 1e9, 4096).unwrap();
        for n in 2..6 {
            for &s in &[0.1, 0.25, 0.5, 0.75, 0.9] {
                if n as f64 / 2.0 - s < 0.25 {
                    continue;
                }
                let v = seminorm(&Field::Radial(gaussian(&g, n)), s).unwrap();
                let exact = sphere_area(n) * gamma(s + n as f64 / 2.0) / 2.0;
                assert!(((v - exact) / exact).abs() < 1e-10, "n={n} s={s}");
            }
            // s = 0 is the L² norm
            let l2 = seminorm(&Field::Radial(gaussian(&g, n)), 0.0).unwrap();
            let exact = sphere_area(n) * gamma(n as f64 / 2.0) / 2.0;
            assert!(((l2 - exact) / exact).abs() < 1e-10);
        }
    }

    #[test]
    fn seminorm_matches_hankel_route() {
        let g = grid();
        let n = 3;
        let s = 0.3;
        let e = eigenpair_degree(3, 2).unwrap();
        let p = RadialProfile::from_fn(&g, n, |r| r * r / (1.0 + r.powi(8))).unwrap();
        let spec = hankel_transform(&p, 2).unwrap();
        let dt = spec.grid.dt();
        let hankel: f64 = sphere_area(n)
            * dt
            * spec.nodes().iter().zip(&spec.values).map(|(rho, v)| rho.powf(2.0 * s + n as f64) * v * v).sum::<f64>();
        let mellin = seminorm(&Field::zonal(p, e).unwrap(), s).unwrap();
        assert!(((hankel - mellin) / mellin).abs() < 1e-8, "{hankel} vs {mellin}");
    }

    #[test]
    fn mode_additivity() {
        let g = RadialGrid::new(1e-8, 1e8, 1024).unwrap();
        let mut f = PolarField::zeros(&g, 1, 4).unwrap();
        f.set_mode(0, g.nodes().iter().map(|r| (-r * r).exp()).collect()).unwrap();
        f.set_mode(2, g.nodes().iter().map(|r| r * r * (-r).exp()).collect()).unwrap();
        let whole = seminorm(&Field::Polar(f.clone()), 0.4).unwrap();
        let parts: f64 = polar_energy_by_mode(&f, 0.4).iter().map(|p| p.1).sum();
        assert!(((whole - parts) / whole).abs() < 1e-14);
    }

    #[test]
    fn hardy_inequality_on_random_profiles() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(2..6);
            let s = rng.gen_range(0.05..0.95);
            let a: f64 = rng.gen_range(0.2..3.0);
            let k: i32 = rng.gen_range(0..3);
            let f = Field::Radial(RadialProfile::from_fn(&g, n, |r| r.powi(k) * (-a * r * r).exp()).unwrap());
            let quotient = seminorm(&f, s).unwrap() / weighted_norm(&f, s, 2.0).unwrap().value;
            assert!(quotient >= hardy_constant(n, s).unwrap() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn report_invariants_and_scale_invariance() {
        let g = grid();
        let params = RawParams::new(4, 0.5, 2.5, 1.0).validate().unwrap();
        let u = RadialProfile::from_fn(&g, 4, |r| 1.0 / (1.0 + r * r).powi(3)).unwrap();
        let rep = energy_report(&Field::Radial(u.clone()), &params).unwrap();
        assert_eq!(rep.q_lambda, rep.seminorm + params.lambda * rep.hardy);
        assert_eq!(rep.j_lambda, rep.q_lambda / rep.lq.powf(2.0 / params.q));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let alpha = rng.gen_range(0.1..10.0);
            let beta = rng.gen_range(0.3..3.0);
            let v = u.dilate(beta).unwrap().scaled(alpha);
            let r2 = energy_report(&Field::Radial(v), &params).unwrap();
            assert!(((r2.j_lambda - rep.j_lambda) / rep.j_lambda).abs() < 1e-8);
        }
        let zero = RadialProfile::from_fn(&g, 4, |_| 0.0).unwrap();
        assert_eq!(energy_report(&Field::Radial(zero), &params), Err(Error::ZeroFunction));
    }

    #[test]
    fn near_critical_quotient_approaches_sobolev() {
        let g = grid();
        for (n, s) in [(3usize, 0.5), (4, 0.25), (2, 0.5)] {
            let crit = 2.0 * n as f64 / (n as f64 - 2.0 * s);
            let params = RawParams::new(n, s, crit - 0.01, 0.0).with_c_hat(crate::params::CHat::Explicit(1.0)).validate().unwrap();
            let e = (n as f64 - 2.0 * s) / 2.0;
            let u = RadialProfile::from_fn(&g, n, |r| (1.0 + r * r).powf(-e)).unwrap();
            let j = energy_report(&Field::Radial(u), &params).unwrap().j_lambda;
            let sob = sobolev_constant(n, s).unwrap();
            assert!(((j - sob) / sob).abs() < 0.02, "n={n} s={s} j={j} S={sob}");
        }
    }

    #[test]
    fn residual_of_generic_bump_and_sign_check() {
        let g = grid();
        let params = RawParams::new(4, 0.5, 2.5, 1.0).validate().unwrap();
        let bump = Field::Radial(RadialProfile::from_fn(&g, 4, |r| (-r * r).exp()).unwrap());
        let r = el_residual(&bump, &params, None).unwrap();
        assert!(r.residual > 1e-2 && r.residual < 10.0, "{}", r.residual);
        let neg = Field::Radial(RadialProfile::from_fn(&g, 4, |r| (1.0 - r) * (-r * r).exp()).unwrap());
        assert!(matches!(el_residual(&neg, &params, None), Err(Error::NegativeValues(_))));
    }

    #[test]
    fn residual_scaling_law() {
        let g = grid();
        let params = RawParams::new(4, 0.5, 2.5, 2.0).validate().unwrap();
        let u = RadialProfile::from_fn(&g, 4, |r| 1.0 / (1.0 + r * r).powi(2)).unwrap();
        let base = el_residual(&Field::Radial(u.clone()), &params, None).unwrap();
        let (alpha, beta) = (3.0, 2.0);
        let v = u.dilate(beta).unwrap().scaled(alpha);
        let scaled = el_residual(&Field::Radial(v), &params, None).unwrap();
        // h ↦ αβ^{s-n/2} h(· + ln β), and L h = κ|h|^{q-2}h fixes κ ∝ amplitude^{2-q}
        let amp: f64 = alpha * beta.powf(params.s - 2.0);
        let expected = base.kappa * amp.powf(2.0 - params.q);
        assert!(((scaled.kappa - expected) / expected).abs() < 1e-7);
        assert!(((scaled.residual - base.residual) / base.residual).abs() < 1e-7);
    }
}
