//! Caffarelli–Silvestre extensions `w(x, y)` of fields on `ℝⁿ` and their
//! weighted Dirichlet energies `∬ y^{1-2s} |∇w|²`.
//!
//! The canonical extension of one angular mode is `ŵ(ρ, y) = û(ρ) ψ_s(ρy)` with
//! `ψ_s(t) = 2^{1-s}/Γ(s) t^s K_s(t)`. Value slices `w(·, y)` are produced by an
//! inverse Hankel transform on a log-spaced `y` grid.

use crate::error::{Error, Result};
use crate::params::cs_constant;
use crate::special::{bessel_k, gamma, sphere_area};
use crate::spectral::mellin::HankelPlan;
use crate::spectral::spline::UniformSpline;
use crate::spectral::{bessel_order, hankel_transform, integrate_dt, Field, SpectralProfile, Truncated};
use crate::spherical::SphericalEigenpair;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, Mutex, OnceLock};

/// `ψ_s(t)` evaluated directly.
pub fn psi_exact(s: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    2f64.powf(1.0 - s) / gamma(s) * t.powf(s) * bessel_k(s, t)
}

/// `ψ_s'(t) = −2^{1-s}/Γ(s) t^s K_{1-s}(t)`.
pub fn dpsi_exact(s: f64, t: f64) -> f64 {
    -(2f64.powf(1.0 - s) / gamma(s)) * t.powf(s) * bessel_k(1.0 - s, t)
}

const PSI_LN_LO: f64 = -40.0;
const PSI_T_HI: f64 = 705.0;
const PSI_STEP: f64 = 0.01;

/// Spline table of `ψ_s` and `t^{1-2s} ψ_s'` in `ln t`, with the small-`t`
/// expansions below the table and zero above it.
#[derive(Debug, Clone)]
pub struct PsiTable {
    pub s: f64,
    psi: UniformSpline,
    dpsi_scaled: UniformSpline,
    small_psi: f64,
    small_dpsi: f64,
}

impl PsiTable {
    pub fn new(s: f64) -> Self {
        assert!(s > 0.0 && s < 1.0);
        let count = ((PSI_T_HI.ln() - PSI_LN_LO) / PSI_STEP).ceil() as usize + 1;
        let (psi, dpsi): (Vec<f64>, Vec<f64>) = (0..count)
            .into_par_iter()
            .map(|i| {
                let t = (PSI_LN_LO + i as f64 * PSI_STEP).exp();
                (psi_exact(s, t), dpsi_exact(s, t) * t.powf(1.0 - 2.0 * s))
            })
            .unzip();
        Self {
            s,
            psi: UniformSpline::new(PSI_LN_LO, PSI_STEP, psi),
            dpsi_scaled: UniformSpline::new(PSI_LN_LO, PSI_STEP, dpsi),
            // ψ ≈ 1 − Γ(1-s)/Γ(1+s) (t/2)^{2s},  ψ' ≈ −2^{1-2s} Γ(1-s)/Γ(s) t^{2s-1}
            small_psi: gamma(1.0 - s) / gamma(1.0 + s) * 2f64.powf(-2.0 * s),
            small_dpsi: 2f64.powf(1.0 - 2.0 * s) * gamma(1.0 - s) / gamma(s),
        }
    }

    /// Process-wide cached table for `s`.
    pub fn shared(s: f64) -> Arc<PsiTable> {
        static CACHE: OnceLock<Mutex<Vec<Arc<PsiTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().unwrap().iter().find(|t| t.s.to_bits() == s.to_bits()) {
            return t.clone();
        }
        let table = Arc::new(PsiTable::new(s));
        let mut guard = cache.lock().unwrap();
        if guard.len() >= 16 {
            guard.remove(0);
        }
        guard.push(table.clone());
        table
    }

    pub fn psi(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 1.0;
        }
        let lt = t.ln();
        if lt < PSI_LN_LO {
            return 1.0 - self.small_psi * t.powf(2.0 * self.s);
        }
        self.psi.eval(lt).unwrap_or(0.0)
    }

    pub fn dpsi(&self, t: f64) -> f64 {
        let lt = t.ln();
        if lt < PSI_LN_LO {
            return -self.small_dpsi * t.powf(2.0 * self.s - 1.0);
        }
        self.dpsi_scaled.eval(lt).map_or(0.0, |v| v * t.powf(2.0 * self.s - 1.0))
    }
}

/// `I_s = ∫₀^∞ t^{1-2s} (ψ_s² + ψ_s'²) dt`, which equals `1/C_s`. Memoized per `s`.
pub fn extension_profile_energy(s: f64) -> Truncated {
    static CACHE: OnceLock<Mutex<Vec<(u64, Truncated)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some((_, v)) = cache.lock().unwrap().iter().find(|(k, _)| *k == s.to_bits()) {
        return *v;
    }
    let v = profile_energy_uncached(s);
    let mut guard = cache.lock().unwrap();
    if guard.len() >= 64 {
        guard.remove(0);
    }
    guard.push((s.to_bits(), v));
    v
}

fn profile_energy_uncached(s: f64) -> Truncated {
    let lo = -(30.0 / s.min(1.0 - s)).min(400.0);
    let hi = 800f64.ln();
    let step = 0.005;
    let count = ((hi - lo) / step).ceil() as usize + 1;
    let f: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            let t = (lo + i as f64 * step).exp();
            let p = psi_exact(s, t);
            let d = dpsi_exact(s, t);
            t.powf(2.0 - 2.0 * s) * (p * p + d * d)
        })
        .collect();
    integrate_dt(step, &f)
}

/// Log-spaced heights used for value-grid integrals.
pub const Y_NODES: usize = 512;
pub const Y_MAX: f64 = 1e3;

/// Smallest height. Near the boundary the `dy/y` densities vanish like
/// `y^{2s}` (the `∂_y` part) and `y^{2-2s}` (the `∂_r` part), so the cut is
/// placed where the slower of the two has dropped to `1e-8`.
pub fn y_min(s: f64) -> f64 {
    1e-4f64.min(1e-8f64.powf(1.0 / (2.0 * s).min(2.0 - 2.0 * s)))
}

#[derive(Debug, Clone)]
struct ModeData {
    ell: usize,
    mu: f64,
    spectral: SpectralProfile,
    plan: HankelPlan,
    /// Order `ν+1` on the same output grid, for `∂_r`.
    plan_up: HankelPlan,
}

/// Canonical extension of a radial or single-mode field.
#[derive(Debug, Clone)]
pub struct ExtensionField {
    pub s: f64,
    pub n: usize,
    pub source: Field,
    pub y_nodes: Vec<f64>,
    modes: Vec<ModeData>,
    psi: Arc<PsiTable>,
}

/// One height slice: `w_ℓ`, `∂_r w_ℓ` and `∂_y w_ℓ` at `(rᵢ, y)` per mode.
#[derive(Debug, Clone)]
pub struct Slice {
    pub y: f64,
    pub modes: Vec<SliceMode>,
}

#[derive(Debug, Clone)]
pub struct SliceMode {
    pub ell: usize,
    pub mu: f64,
    pub w: Vec<f64>,
    pub dw_dr: Vec<f64>,
    pub dw_dy: Vec<f64>,
}

pub fn cs_extend(field: &Field, s: f64) -> Result<ExtensionField> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("s = {s} must lie in (0, 1)")));
    }
    let n = field.n();
    let profiles = match field {
        Field::Radial(p) => vec![(0, p.clone())],
        Field::Zonal { profile, eigen } => vec![(eigen.degree, profile.clone())],
        Field::Polar(f) => f.modes().iter().enumerate().map(|(i, &l)| (l, f.mode_profile(i))).collect(),
    };
    let mut modes = Vec::new();
    for (ell, p) in profiles {
        if p.values().iter().all(|&v| v == 0.0) {
            continue;
        }
        let spectral = hankel_transform(&p, ell)?;
        let g = &spectral.grid;
        let nu = bessel_order(n, ell);
        let plan = HankelPlan::new(g.len(), g.dt(), nu, (g.r_min * g.r_max).ln());
        let plan_up = HankelPlan::with_shift(g.len(), g.dt(), nu + 1.0, plan.ln_kr);
        let mu = (ell * (ell + n - 2)) as f64;
        modes.push(ModeData { ell, mu, spectral, plan, plan_up });
    }
    let lo = y_min(s).ln();
    let hi = Y_MAX.ln();
    let y_nodes = (0..Y_NODES).map(|j| (lo + (hi - lo) * j as f64 / (Y_NODES - 1) as f64).exp()).collect();
    Ok(ExtensionField { s, n, source: field.clone(), y_nodes, modes, psi: PsiTable::shared(s) })
}

impl ExtensionField {
    pub fn psi_table(&self) -> &PsiTable {
        &self.psi
    }

    /// `ŵ(ρᵢ, y)` for each mode.
    pub fn spectral_slice(&self, y: f64) -> Vec<(usize, Vec<f64>)> {
        self.modes
            .iter()
            .map(|m| {
                let v = m.spectral.nodes().iter().zip(&m.spectral.values).map(|(rho, u)| u * self.psi.psi(rho * y)).collect();
                (m.ell, v)
            })
            .collect()
    }

    /// Value slice at height `y`. The radial derivative uses
    /// `∂_r w_ℓ = (ℓ/r) w_ℓ − 𝓗_{ν+1}[ρ ŵ_ℓ]`, so no differencing is involved.
    pub fn slice(&self, y: f64) -> Slice {
        let half = self.n as f64 / 2.0;
        let r = self.source.grid().nodes();
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let rho = m.spectral.nodes();
                let len = rho.len();
                let (mut gw, mut gd, mut gr) = (Vec::with_capacity(len), Vec::with_capacity(len), Vec::with_capacity(len));
                for (&p, &u) in rho.iter().zip(&m.spectral.values) {
                    let base = u * p.powf(half);
                    let psi = self.psi.psi(p * y);
                    gw.push(base * psi);
                    gr.push(base * p * psi);
                    gd.push(base * p * self.psi.dpsi(p * y));
                }
                let back = |plan: &HankelPlan, g: &[f64]| -> Vec<f64> {
                    plan.apply(g).iter().zip(r).map(|(v, ri)| v * ri.powf(-half)).collect()
                };
                let w = back(&m.plan, &gw);
                let up = back(&m.plan_up, &gr);
                let ell = m.ell as f64;
                let dw_dr = w.iter().zip(&up).zip(r).map(|((w, u), ri)| ell * w / ri - u).collect();
                SliceMode { ell: m.ell, mu: m.mu, dw_dy: back(&m.plan, &gd), dw_dr, w }
            })
            .collect();
        Slice { y, modes }
    }

    /// `∫₀^∞ y^{1-2s} D(y) dy` on the log `y` grid, with the difference to the
    /// same rule on every other node as a quadrature-error estimate.
    fn integrate_over_y(&self, density: impl Fn(&Slice) -> f64 + Sync) -> (Truncated, f64) {
        let f: Vec<f64> = self
            .y_nodes
            .par_iter()
            .map(|&y| y.powf(2.0 - 2.0 * self.s) * density(&self.slice(y)))
            .collect();
        let dly = (self.y_nodes[1] / self.y_nodes[0]).ln();
        let full = integrate_dt(dly, &f);
        let half: Vec<f64> = f.iter().step_by(2).copied().collect();
        let coarse = integrate_dt(2.0 * dly, &half).value;
        (full, (full.value - coarse).abs())
    }

    /// `|S^{n-1}| Σ_ℓ ∫ f(mode, r, y, w, w_r, w_y) r^{n-1} dr`.
    fn radial_sum(&self, slice: &Slice, f: impl Fn(&SliceMode, f64, f64, f64, f64, f64) -> f64) -> f64 {
        let grid = self.source.grid();
        let r = grid.nodes();
        let mut total = 0.0;
        for m in &slice.modes {
            for i in 0..r.len() {
                total += r[i].powi(self.n as i32) * f(m, r[i], slice.y, m.w[i], m.dw_dr[i], m.dw_dy[i]);
            }
        }
        sphere_area(self.n) * grid.dt() * total
    }
}

/// Weighted Dirichlet energy, computed on the value grid and from the
/// per-momentum factorisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletEnergy {
    /// `∬ y^{1-2s}|∇w|²` on the value grid.
    pub value: f64,
    /// Estimated discarded mass outside the `y` range.
    pub y_residual: f64,
    /// Difference to the same rule on every other height.
    pub quadrature_error: f64,
    /// `I_s Σ_ℓ ∫|û_ℓ|² ρ^{2s} dξ`.
    pub factorized: f64,
}

/// Largest relative `y`-tail before the energy is rejected.
pub const Y_TRUNCATION_TOL: f64 = 1e-4;

pub fn dirichlet_energy(ext: &ExtensionField) -> Result<DirichletEnergy> {
    let (fine, quad_err) =
        ext.integrate_over_y(|sl| ext.radial_sum(sl, |m, r, _, w, wr, wy| wr * wr + wy * wy + m.mu * w * w / (r * r)));
    let rel = fine.residual / fine.value.abs().max(f64::MIN_POSITIVE);
    if rel > Y_TRUNCATION_TOL {
        return Err(Error::YTruncationError { residual: rel, tolerance: Y_TRUNCATION_TOL });
    }
    let is = extension_profile_energy(ext.s).value;
    let area = sphere_area(ext.n);
    let mut factorized = 0.0;
    for m in &ext.modes {
        let dt = m.spectral.grid.dt();
        factorized += dt
            * m.spectral
                .nodes()
                .iter()
                .zip(&m.spectral.values)
                .map(|(rho, u)| rho.powf(2.0 * ext.s + ext.n as f64) * u * u)
                .sum::<f64>();
    }
    Ok(DirichletEnergy {
        value: fine.value,
        y_residual: fine.residual,
        quadrature_error: quad_err,
        factorized: area * is * factorized,
    })
}

/// Both sides of `∫|w(x,y)|²/(|x|²+y²) dx ≤ ĉ ∫|u|²/(|x|²+y²) dx` at one height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceCheck {
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn slice_hardy_check(ext: &ExtensionField, y: f64, c_hat: f64) -> Result<SliceCheck> {
    if !(y > 0.0) {
        return Err(Error::InvalidParameter(format!("height y = {y} must be positive")));
    }
    let lhs = ext.radial_sum(&ext.slice(y), |_, r, y, w, _, _| w * w / (r * r + y * y));
    let grid = ext.source.grid();
    let mut rhs = 0.0;
    for (_, u) in ext.source.components() {
        rhs += grid
            .nodes()
            .iter()
            .zip(u)
            .map(|(r, u)| r.powi(ext.n as i32) * u * u / (r * r + y * y))
            .sum::<f64>();
    }
    Ok(SliceCheck { y, lhs, rhs: c_hat * sphere_area(ext.n) * grid.dt() * rhs })
}

/// `∬ y^{1-2s} |w|²/(|x|²+y²)`.
pub fn halfplane_hardy(ext: &ExtensionField) -> Truncated {
    ext.integrate_over_y(|sl| ext.radial_sum(sl, |_, r, y, w, _, _| w * w / (r * r + y * y))).0
}

/// Integrals entering the Hardy-type statements for one extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionEnergyReport {
    pub dirichlet: f64,
    pub halfplane_hardy: f64,
    /// `((n-2s)/2)²`
    pub ws_hardy_constant: f64,
    pub slice_checks: Vec<SliceCheck>,
    pub y_residual: f64,
    pub quadrature_error: f64,
}

pub fn extension_report(ext: &ExtensionField, c_hat: f64, heights: &[f64]) -> Result<ExtensionEnergyReport> {
    let d = dirichlet_energy(ext)?;
    let hp = halfplane_hardy(ext);
    let slice_checks = heights.iter().map(|&y| slice_hardy_check(ext, y, c_hat)).collect::<Result<Vec<_>>>()?;
    Ok(ExtensionEnergyReport {
        dirichlet: d.value,
        halfplane_hardy: hp.value,
        ws_hardy_constant: ((ext.n as f64 - 2.0 * ext.s) / 2.0).powi(2),
        slice_checks,
        y_residual: d.y_residual.max(hp.residual),
        quadrature_error: d.quadrature_error,
    })
}

/// `∬ y^{1-2s}(|∇(Fw)|² − |∇w|²)` against `(mμ+m+1-2s) ∬ y^{1-2s}|ζ|^{-2}w²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionGap {
    pub gap: f64,
    pub weighted_mass: f64,
    pub coefficient: f64,
    pub bound: f64,
    pub quadrature_error: f64,
    pub y_residual: f64,
}

impl ExtensionGap {
    pub fn margin(&self) -> f64 {
        self.bound - self.gap
    }
}

/// Gap for `F = Σ_j (|x_j|/|ζ|) φ(x_j/|x_j|)` times the extension of a radial `u` on `ℝ^{km}`.
///
/// Averaged over the sphere at fixed `|x|`, `|∇(Fw)|²` becomes
/// `f²|∇w|² + w ∇f²·∇w + w²(|∇f|² + A/|ζ|²)` with `f = |x|/|ζ|` and
/// `A = mμ + m − 1` the angular energy of `Σ_j |θ_j| φ(θ_j/|θ_j|)` on `S^{n-1}`.
pub fn perturbed_extension_gap(ext: &ExtensionField, eigen: &SphericalEigenpair, m: usize) -> Result<ExtensionGap> {
    if !matches!(ext.source, Field::Radial(_)) {
        return Err(Error::NonRadialSource);
    }
    if eigen.k * m != ext.n {
        return Err(Error::PartitionMismatch { n: ext.n, km: eigen.k * m });
    }
    if eigen.mu <= 0.0 {
        return Err(Error::MuNonpositive(eigen.mu));
    }
    let mf = m as f64;
    let a = mf * eigen.mu + mf - 1.0;
    let coefficient = mf * eigen.mu + mf + 1.0 - 2.0 * ext.s;
    let (fine, quad_err) = ext.integrate_over_y(|sl| {
        ext.radial_sum(sl, |_, r, y, w, wr, wy| {
            let z2 = r * r + y * y;
            let z = z2.sqrt();
            let f = r / z;
            let fr = y * y / (z2 * z);
            let fy = -r * y / (z2 * z);
            (f * f - 1.0) * (wr * wr + wy * wy) + 2.0 * f * w * (fr * wr + fy * wy) + w * w * (y * y / (z2 * z2) + a / z2)
        })
    });
    let (mass, mass_err) = ext.integrate_over_y(|sl| ext.radial_sum(sl, |_, r, y, w, _, _| w * w / (r * r + y * y)));
    if mass.residual > 1e-3 * mass.value {
        return Err(Error::GridResolutionError(format!(
            "|ζ|^-2-weighted mass has relative tail {:.2e}",
            mass.residual / mass.value
        )));
    }
    Ok(ExtensionGap {
        gap: fine.value,
        weighted_mass: mass.value,
        coefficient,
        bound: coefficient * mass.value,
        quadrature_error: quad_err + coefficient * mass_err,
        y_residual: fine.residual.max(mass.residual),
    })
}

/// `(∫ y^{1-2s} F²|∇w|² dx, ∫ y^{1-2s} |∇w|² dx)` at one height, radial `w`.
pub fn f_squared_slice(ext: &ExtensionField, y: f64) -> (f64, f64) {
    let sl = ext.slice(y);
    let wy = y.powf(1.0 - 2.0 * ext.s);
    let with_f = ext.radial_sum(&sl, |_, r, y, _, wr, wyy| r * r / (r * r + y * y) * (wr * wr + wyy * wyy));
    let plain = ext.radial_sum(&sl, |_, _, _, _, wr, wyy| wr * wr + wyy * wyy);
    (wy * with_f, wy * plain)
}

/// `y^{1-2s} |∫ F ∂_y F |w|² dx|` at one height, radial `w`; the sphere average of `F∂_yF` is `−|x|²y/|ζ|⁴`.
pub fn boundary_term(ext: &ExtensionField, y: f64) -> f64 {
    let sl = ext.slice(y);
    let v = ext.radial_sum(&sl, |_, r, y, w, _, _| {
        let z2 = r * r + y * y;
        r * r * y / (z2 * z2) * w * w
    });
    y.powf(1.0 - 2.0 * ext.s) * v.abs()
}

/// `C_s · dirichlet`, the quantity that equals the seminorm.
pub fn scaled_dirichlet(ext: &ExtensionField) -> Result<f64> {
    Ok(cs_constant(ext.s) * dirichlet_energy(ext)?.value)
}
