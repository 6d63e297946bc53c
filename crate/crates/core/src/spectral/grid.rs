use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_R_MIN: f64 = 1e-5;
pub const DEFAULT_R_MAX: f64 = 1e3;
pub const DEFAULT_NODES: usize = 4096;
/// Environment variable overriding [`DEFAULT_NODES`].
pub const GRID_NODES_ENV: &str = "CKN_GRID_NODES";

/// Log-spaced radial grid `rᵢ = r_min e^{iΔ}`.
///
/// All radial integrals are computed in the variable `t = ln r`, where the
/// grid is uniform and the rectangle rule `Δ Σ f(tᵢ)` is spectrally accurate
/// for functions that decay at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    len: usize,
}

impl TryFrom<GridSpec> for RadialGrid {
    type Error = Error;
    fn try_from(spec: GridSpec) -> Result<Self> {
        spec.build()
    }
}

impl From<RadialGrid> for GridSpec {
    fn from(g: RadialGrid) -> Self {
        g.spec()
    }
}

/// Grid description used in configs and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { r_min: DEFAULT_R_MIN, r_max: DEFAULT_R_MAX, nodes: default_nodes() }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.r_min, self.r_max, self.nodes)
    }
}

/// 4096, or the value of `CKN_GRID_NODES` when set to a valid size.
pub fn default_nodes() -> usize {
    std::env::var(GRID_NODES_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n >= 16)
        .unwrap_or(DEFAULT_NODES)
}

impl Default for RadialGrid {
    fn default() -> Self {
        GridSpec::default().build().expect("default grid is valid")
    }
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, len: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_min.is_finite() && r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad grid range [{r_min}, {r_max}]")));
        }
        if len < 16 || len % 2 != 0 {
            return Err(Error::InvalidParameter(format!("grid size {len} must be even and >= 16")));
        }
        let dt = (r_max / r_min).ln() / (len - 1) as f64;
        let t0 = r_min.ln();
        let nodes: Vec<f64> = (0..len).map(|i| (t0 + i as f64 * dt).exp()).collect();
        let quad_weights = nodes.iter().map(|r| r * dt).collect();
        Ok(Self { r_min, r_max, nodes, quad_weights, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Weights for `∫ f(r) dr`.
    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// Spacing in `ln r`.
    pub fn dt(&self) -> f64 {
        (self.r_max / self.r_min).ln() / (self.len - 1) as f64
    }

    pub fn t0(&self) -> f64 {
        self.r_min.ln()
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec { r_min: self.r_min, r_max: self.r_max, nodes: self.len }
    }

    /// Grid whose nodes are `e^{c}/r_{N-1-i}`; this is where Hankel transforms land.
    pub fn reciprocal(&self, ln_kr: f64) -> RadialGrid {
        let kr = ln_kr.exp();
        RadialGrid::new(kr / self.r_max, kr / self.r_min, self.len).expect("reciprocal of a valid grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_log_uniform() {
        let g = RadialGrid::new(1e-3, 1e2, 64).unwrap();
        assert!((g.nodes()[0] - 1e-3).abs() < 1e-15);
        assert!((g.nodes()[63] - 1e2).abs() < 1e-9);
        let dt = g.dt();
        for w in g.nodes().windows(2) {
            assert!(w[1] > w[0]);
            assert!(((w[1] / w[0]).ln() - dt).abs() < 1e-12);
        }
        assert!(g.quad_weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(RadialGrid::new(0.0, 1.0, 64).is_err());
        assert!(RadialGrid::new(2.0, 1.0, 64).is_err());
        assert!(RadialGrid::new(1e-3, 1.0, 63).is_err());
    }
}
