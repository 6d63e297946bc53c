use super::grid::RadialGrid;
use super::spline::UniformSpline;
use crate::error::{Error, Result};
use crate::spherical::SphericalEigenpair;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Samples `u(rᵢ)` of a radial function on `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub n: usize,
    values: Vec<f64>,
    /// Set when `|u(r_max)| > 1e-10 max|u|`.
    pub truncated: bool,
}

fn decay_flag(values: &[f64]) -> bool {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.last().map_or(false, |v| v.abs() > 1e-10 * max)
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Incompatible(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("profile values"));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!("dimension n = {n} must be at least 2")));
        }
        let truncated = decay_flag(&values);
        Ok(Self { grid, n, values, truncated })
    }

    pub fn from_fn(grid: &RadialGrid, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid.clone(), n, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `r^{p} u(r)` at every node.
    pub fn weighted_values(&self, p: f64) -> Vec<f64> {
        self.grid.nodes().iter().zip(&self.values).map(|(r, u)| r.powf(p) * u).collect()
    }

    /// `h = r^{n/2-s} u`, the variable in which the seminorm is a Fourier multiplier in `ln r`.
    pub fn h_values(&self, s: f64) -> Vec<f64> {
        self.weighted_values(self.n as f64 / 2.0 - s)
    }

    /// Inverse of [`h_values`](Self::h_values).
    pub fn from_h(grid: &RadialGrid, n: usize, s: f64, h: &[f64]) -> Result<Self> {
        let p = n as f64 / 2.0 - s;
        let values = grid.nodes().iter().zip(h).map(|(r, h)| h * r.powf(-p)).collect();
        Self::new(grid.clone(), n, values)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let values: Vec<f64> = self.values.iter().map(|v| alpha * v).collect();
        Self { truncated: decay_flag(&values), values, ..self.clone() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.n, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `r ↦ u(βr)` resampled on the same grid by cubic interpolation in `ln r`.
    /// Values are held constant below `r_min` and set to zero above `r_max`.
    pub fn dilate(&self, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("dilation factor {beta} must be positive")));
        }
        let dt = self.grid.dt();
        let t0 = self.grid.t0();
        let spline = UniformSpline::new(t0, dt, self.values.clone());
        let shift = beta.ln();
        let first = self.values[0];
        let values = (0..self.len())
            .map(|i| {
                let t = t0 + i as f64 * dt + shift;
                match spline.eval(t) {
                    Some(v) => v,
                    None if t < t0 => first,
                    None => 0.0,
                }
            })
            .collect();
        Self::new(self.grid.clone(), self.n, values)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }
}

/// Normalised cosine basis on the circle: `1` for `ℓ = 0`, `√2 cos ℓθ` otherwise.
pub fn trig_basis(ell: usize, theta: f64) -> f64 {
    if ell == 0 {
        1.0
    } else {
        SQRT_2 * (ell as f64 * theta).cos()
    }
}

/// A function on `ℝ²` written as `Σ_ℓ u_ℓ(r) trig_ℓ(θ)` over modes `ℓ ∈ tℤ≥0`.
///
/// Only cosine modes are kept: the fields of interest are even in `θ` after a
/// rotation, and the descent preserves that.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarField {
    pub grid: RadialGrid,
    /// Sector order; modes are multiples of `t`.
    pub t: usize,
    modes: Vec<usize>,
    coeffs: Vec<Vec<f64>>,
}

impl PolarField {
    /// Zero field with modes `0, t, 2t, …, max_mode`.
    pub fn zeros(grid: &RadialGrid, t: usize, max_mode: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidParameter("sector order t must be at least 1".into()));
        }
        let modes: Vec<usize> = (0..=max_mode / t).map(|j| j * t).collect();
        let coeffs = vec![vec![0.0; grid.len()]; modes.len()];
        Ok(Self { grid: grid.clone(), t, modes, coeffs })
    }

    pub fn from_radial(profile: &RadialProfile, t: usize, max_mode: usize) -> Result<Self> {
        if profile.n != 2 {
            return Err(Error::Incompatible(format!("polar fields live in n = 2, profile has n = {}", profile.n)));
        }
        let mut f = Self::zeros(&profile.grid, t, max_mode)?;
        f.coeffs[0] = profile.values().to_vec();
        Ok(f)
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn max_mode(&self) -> usize {
        *self.modes.last().expect("mode set is nonempty")
    }

    pub fn coeffs(&self, idx: usize) -> &[f64] {
        &self.coeffs[idx]
    }

    pub fn coeffs_mut(&mut self, idx: usize) -> &mut Vec<f64> {
        &mut self.coeffs[idx]
    }

    pub fn set_mode(&mut self, ell: usize, values: Vec<f64>) -> Result<()> {
        let idx = self
            .modes
            .iter()
            .position(|&m| m == ell)
            .ok_or_else(|| Error::Incompatible(format!("mode {ell} is not in the mode set")))?;
        if values.len() != self.grid.len() {
            return Err(Error::Incompatible("mode length differs from grid".into()));
        }
        self.coeffs[idx] = values;
        Ok(())
    }

    pub fn mode_profile(&self, idx: usize) -> RadialProfile {
        RadialProfile::new(self.grid.clone(), 2, self.coeffs[idx].clone()).expect("finite coefficients")
    }

    /// Number of collocation angles on `[0, π]`.
    pub fn collocation_points(&self) -> usize {
        (4 * self.max_mode()).max(8)
    }

    pub fn collocation_angles(&self) -> Vec<f64> {
        let m = self.collocation_points();
        (0..m).map(|j| PI * (j as f64 + 0.5) / m as f64).collect()
    }

    /// Point values `u(rᵢ, θⱼ)`, row-major in `i`.
    pub fn to_samples(&self) -> Vec<Vec<f64>> {
        let angles = self.collocation_angles();
        let table: Vec<Vec<f64>> = self.modes.iter().map(|&l| angles.iter().map(|&a| trig_basis(l, a)).collect()).collect();
        (0..self.grid.len())
            .map(|i| {
                let mut row = vec![0.0; angles.len()];
                for (c, basis) in self.coeffs.iter().zip(&table) {
                    let ci = c[i];
                    if ci != 0.0 {
                        for (r, b) in row.iter_mut().zip(basis) {
                            *r += ci * b;
                        }
                    }
                }
                row
            })
            .collect()
    }

    /// Project collocation samples onto the mode set (exact for band-limited data).
    pub fn project_samples(&self, samples: &[Vec<f64>]) -> Self {
        let angles = self.collocation_angles();
        let m = angles.len() as f64;
        let mut out = self.clone();
        for (idx, &l) in self.modes.iter().enumerate() {
            let basis: Vec<f64> = angles.iter().map(|&a| trig_basis(l, a)).collect();
            out.coeffs[idx] = samples.iter().map(|row| row.iter().zip(&basis).map(|(v, b)| v * b).sum::<f64>() / m).collect();
        }
        out
    }

    /// Evaluate at a point given in polar form.
    pub fn eval(&self, i: usize, theta: f64) -> f64 {
        self.modes.iter().zip(&self.coeffs).map(|(&l, c)| c[i] * trig_basis(l, theta)).sum()
    }

    /// `v(r, θ) = u(r, θ/h)`: mode `ℓ` becomes mode `ℓ/h`. Requires `h | t`.
    pub fn angular_dilation(&self, h: usize) -> Result<Self> {
        if h == 0 || self.t % h != 0 {
            return Err(Error::InvalidParameter(format!("dilation factor {h} must divide t = {}", self.t)));
        }
        Ok(Self {
            grid: self.grid.clone(),
            t: self.t / h,
            modes: self.modes.iter().map(|l| l / h).collect(),
            coeffs: self.coeffs.clone(),
        })
    }

    /// Same field with a larger mode set (multiples of `t` up to `max_mode`), new modes zero.
    pub fn with_max_mode(&self, max_mode: usize) -> Result<Self> {
        let mut out = Self::zeros(&self.grid, self.t, max_mode)?;
        for (l, c) in self.modes.iter().zip(&self.coeffs) {
            if let Some(idx) = out.modes.iter().position(|m| m == l) {
                out.coeffs[idx] = c.clone();
            }
        }
        Ok(out)
    }

    /// Same field embedded in the mode set `t'ℤ` with `t' | t`.
    pub fn refine_group(&self, t_new: usize) -> Result<Self> {
        if t_new == 0 || self.t % t_new != 0 {
            return Err(Error::InvalidParameter(format!("t' = {t_new} must divide t = {}", self.t)));
        }
        let mut out = Self::zeros(&self.grid, t_new, self.max_mode())?;
        for (l, c) in self.modes.iter().zip(&self.coeffs) {
            let idx = out.modes.iter().position(|m| m == l).expect("multiples of t are multiples of t'");
            out.coeffs[idx] = c.clone();
        }
        Ok(out)
    }
}

/// Anything the energy functionals can act on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Field {
    Radial(RadialProfile),
    /// `u(r) φ(σ)` with `φ` a zonal eigenfunction on `S^{n-1}`.
    Zonal { profile: RadialProfile, eigen: SphericalEigenpair },
    Polar(PolarField),
}

impl From<RadialProfile> for Field {
    fn from(p: RadialProfile) -> Self {
        Field::Radial(p)
    }
}

impl From<PolarField> for Field {
    fn from(p: PolarField) -> Self {
        Field::Polar(p)
    }
}

impl Field {
    pub fn zonal(profile: RadialProfile, eigen: SphericalEigenpair) -> Result<Self> {
        if eigen.k != profile.n {
            return Err(Error::PartitionMismatch { n: profile.n, km: eigen.k });
        }
        Ok(Field::Zonal { profile, eigen })
    }

    pub fn n(&self) -> usize {
        match self {
            Field::Radial(p) | Field::Zonal { profile: p, .. } => p.n,
            Field::Polar(_) => 2,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        match self {
            Field::Radial(p) | Field::Zonal { profile: p, .. } => &p.grid,
            Field::Polar(f) => &f.grid,
        }
    }

    /// `(ℓ, u_ℓ)` pairs for an expansion in an angular basis with unit mean square.
    pub fn components(&self) -> Vec<(usize, &[f64])> {
        match self {
            Field::Radial(p) => vec![(0, p.values())],
            Field::Zonal { profile, eigen } => vec![(eigen.degree, profile.values())],
            Field::Polar(f) => f.modes.iter().zip(&f.coeffs).map(|(&l, c)| (l, c.as_slice())).collect(),
        }
    }

    /// `mean_σ |u(rᵢ, σ)|^p` at every radius.
    pub fn angular_mean_abs_pow(&self, p: f64) -> Vec<f64> {
        match self {
            Field::Radial(prof) => prof.values().iter().map(|v| v.abs().powf(p)).collect(),
            Field::Zonal { profile, eigen } => {
                let a = eigen.mean_abs_pow(p);
                profile.values().iter().map(|v| a * v.abs().powf(p)).collect()
            }
            Field::Polar(f) => f
                .to_samples()
                .iter()
                .map(|row| row.iter().map(|v| v.abs().powf(p)).sum::<f64>() / row.len() as f64)
                .collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        match self {
            Field::Radial(p) => Field::Radial(p.scaled(alpha)),
            Field::Zonal { profile, eigen } => Field::Zonal { profile: profile.scaled(alpha), eigen: eigen.clone() },
            Field::Polar(f) => {
                let mut g = f.clone();
                for c in &mut g.coeffs {
                    c.iter_mut().for_each(|v| *v *= alpha);
                }
                Field::Polar(g)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|(_, c)| c.iter().all(|&v| v == 0.0))
    }
}
