//! Radial grids, Hankel transforms and singular-weight quadrature.

pub mod grid;
pub mod mellin;
pub mod profile;
pub mod quadrature;
pub mod spline;

pub use grid::{default_nodes, GridSpec, RadialGrid};
pub use profile::{trig_basis, Field, PolarField, RadialProfile};
pub use quadrature::{halfline_weight_integral, Truncated};

use crate::error::{Error, Result};
use crate::special::{bessel_j, sphere_area};
use mellin::HankelPlan;
use serde::{Deserialize, Serialize};

/// Largest endpoint value of `r^{n/2} u`, relative to its maximum, accepted
/// before a transform is refused.
pub const TRANSFORM_DECAY_TOL: f64 = 1e-4;
/// Largest fraction of spectral energy (in `ln r`) allowed in the top quarter of frequencies.
pub const RESOLUTION_TOL: f64 = 1e-10;

/// Hankel transform `û(ρ)` of one angular mode, on the reciprocal grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub grid: RadialGrid,
    pub nu: f64,
    pub n: usize,
    pub values: Vec<f64>,
}

impl SpectralProfile {
    /// Momentum nodes `ρᵢ`.
    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    /// Reinterpret the transform as a radial profile in the momentum variable.
    pub fn to_profile(&self) -> Result<RadialProfile> {
        RadialProfile::new(self.grid.clone(), self.n, self.values.clone())
    }
}

/// Bessel order for angular mode `ℓ` in `ℝⁿ`.
pub fn bessel_order(n: usize, ell: usize) -> f64 {
    ell as f64 + (n as f64 - 2.0) / 2.0
}

fn endpoint_ratio(g: &[f64]) -> f64 {
    let max = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    g[0].abs().max(g[g.len() - 1].abs()) / max
}

/// Fourier transform of `u(r) Y_ℓ(σ)` restricted to its radial part:
/// `û(ρ) = ∫ u(r) J_ν(ρr) (ρr)^{1-n/2} r^{n-1} dr` with `ν = ℓ + (n-2)/2`.
///
/// Computed as a convolution in `ln r` (FFTLog). With the Nyquist phase chosen
/// real the discrete transform is orthogonal and its own inverse.
pub fn hankel_transform(profile: &RadialProfile, ell: usize) -> Result<SpectralProfile> {
    let n = profile.n;
    let g = profile.weighted_values(n as f64 / 2.0);
    let tail = endpoint_ratio(&g);
    if tail > TRANSFORM_DECAY_TOL {
        return Err(Error::TruncationError { tail });
    }
    let nu = bessel_order(n, ell);
    let target = (profile.grid.r_min * profile.grid.r_max).ln();
    let plan = HankelPlan::new(profile.len(), profile.grid.dt(), nu, target);
    let spectral_tail = plan.spectral_tail(&g);
    if spectral_tail > RESOLUTION_TOL {
        return Err(Error::ResolutionError { tail: spectral_tail });
    }
    let out = plan.apply(&g);
    let grid = profile.grid.reciprocal(plan.ln_kr);
    let values = grid.nodes().iter().zip(&out).map(|(rho, v)| v * rho.powf(-(n as f64) / 2.0)).collect();
    Ok(SpectralProfile { grid, nu, n, values })
}

/// The same transform at a single `ρ` by direct quadrature against `J_ν`.
pub fn hankel_quadrature(profile: &RadialProfile, ell: usize, rho: f64) -> f64 {
    let n = profile.n as f64;
    let nu = bessel_order(profile.n, ell);
    let dt = profile.grid.dt();
    profile
        .grid
        .nodes()
        .iter()
        .zip(profile.values())
        .map(|(&r, &u)| {
            let x = rho * r;
            u * bessel_j(nu, x) * x.powf(1.0 - n / 2.0) * r.powf(n)
        })
        .sum::<f64>()
        * dt
}

/// `∫ f dt` by the rectangle rule on a uniform grid, with an estimate of the
/// mass beyond both ends from the geometric decay of the last two samples.
pub fn integrate_dt(dt: f64, f: &[f64]) -> Truncated {
    let value = dt * f.iter().sum::<f64>();
    let n = f.len();
    let tail = |a: f64, b: f64| {
        // a = outermost sample, b = its neighbour
        if a == 0.0 {
            0.0
        } else if b.abs() <= a.abs() || b == 0.0 {
            // no decay: assume the plateau continues for another grid length
            dt * n as f64 * a.abs()
        } else {
            let ratio = (a / b).abs();
            dt * a.abs() * ratio / (1.0 - ratio)
        }
    };
    let residual = tail(f[0], f[1]) + tail(f[n - 1], f[n - 2]);
    Truncated { value, residual }
}

/// Largest truncation residual, relative to the value, before an integral is rejected.
pub const TRUNCATION_TOL: f64 = 1e-3;

/// `∫_{ℝⁿ} |x|^{-ap} |u|^p dx`, with the angular factor included.
pub fn weighted_norm(field: &Field, a: f64, p: f64) -> Result<Truncated> {
    let n = field.n();
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("power p = {p} must be at least 1")));
    }
    if a * p >= n as f64 {
        return Err(Error::SingularIntegralError { ap: a * p, n });
    }
    let grid = field.grid();
    let means = field.angular_mean_abs_pow(p);
    let expo = n as f64 - a * p;
    let f: Vec<f64> = grid.nodes().iter().zip(&means).map(|(r, m)| r.powf(expo) * m).collect();
    let area = sphere_area(n);
    let raw = integrate_dt(grid.dt(), &f);
    let out = Truncated { value: area * raw.value, residual: area * raw.residual };
    if out.residual > TRUNCATION_TOL * out.value.abs() {
        return Err(Error::TruncationError { tail: out.residual / out.value.abs() });
    }
    Ok(out)
}
