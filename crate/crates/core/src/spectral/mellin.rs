//! Fourier analysis in the logarithmic variable `t = ln r`.
//!
//! Two operators live here, both diagonal in the Mellin frequency `ω`:
//!
//! * the order-`ν` Hankel transform, realised as the log-grid convolution
//!   `ĝ(ρ) = ∫ (ρr) J_ν(ρr) g(r) dr/r` with `g = r^{n/2} u`, whose Mellin
//!   symbol `2^{iω} Γ((ν+1+iω)/2)/Γ((ν+1-iω)/2)` is unimodular;
//! * the fractional Laplacian quadratic form restricted to one angular mode,
//!   which in the variable `h = r^{n/2-s} u` is the multiplier
//!   `Φ_ℓ(ω) = 2^{2s} |Γ((n/2+ℓ+s+iω)/2)|² / |Γ((n/2+ℓ-s+iω)/2)|²`.
//!
//! `Φ_0(0)` is the sharp Hardy constant and `Φ_0 ≥ Φ_0(0)`, so the fractional
//! Hardy inequality is built into the representation.

use crate::special::ln_gamma_complex;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::{LN_2, PI};
use std::sync::Arc;

/// Angular frequency of DFT bin `m` for a grid of `len` points with spacing `dt`.
pub fn omega(m: usize, len: usize, dt: f64) -> f64 {
    let signed = if m <= len / 2 { m as f64 } else { m as f64 - len as f64 };
    2.0 * PI * signed / (len as f64 * dt)
}

/// Forward/inverse FFT pair of a fixed size.
#[derive(Clone)]
pub struct FftPair {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FftPair({})", self.len)
    }
}

impl FftPair {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { len, fwd: planner.plan_fft_forward(len), inv: planner.plan_fft_inverse(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward(&self, x: &[f64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.len);
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    /// Normalised inverse; returns the real part.
    pub fn inverse_real(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.inv.process(&mut spec);
        let scale = 1.0 / self.len as f64;
        spec.iter().map(|c| c.re * scale).collect()
    }
}

/// Phase of the Mellin symbol of the kernel `t J_ν(t)`.
fn hankel_phase(nu: f64, w: f64) -> f64 {
    let z = Complex64::new(0.5 * (nu + 1.0), 0.5 * w);
    w * LN_2 + 2.0 * ln_gamma_complex(z).im
}

/// Log-grid Hankel transform of fixed order and size.
#[derive(Debug, Clone)]
pub struct HankelPlan {
    pub nu: f64,
    /// `ln(ρᵢ r_{N-1-i})`.
    pub ln_kr: f64,
    fft: FftPair,
    multiplier: Vec<Complex64>,
}

impl HankelPlan {
    /// `target` is the desired `ln(ρᵢ r_{N-1-i})`; the plan uses the nearest
    /// value, within `Δ/2`, for which the Nyquist multiplier is real.
    pub fn new(len: usize, dt: f64, nu: f64, target: f64) -> Self {
        let w_nyq = PI / dt;
        let theta_nyq = hankel_phase(nu, w_nyq);
        let k = ((theta_nyq - w_nyq * target) / PI).round();
        Self::with_shift(len, dt, nu, (theta_nyq - k * PI) / w_nyq)
    }

    /// Plan with a prescribed `ln_kr`; the Nyquist multiplier is replaced by its real part.
    pub fn with_shift(len: usize, dt: f64, nu: f64, ln_kr: f64) -> Self {
        assert!(len % 2 == 0 && nu >= 0.0);
        let multiplier = (0..len)
            .map(|m| {
                let w = omega(m, len, dt);
                let phase = hankel_phase(nu, w) - w * ln_kr;
                if m == len / 2 {
                    let c = phase.cos();
                    Complex64::new(if (c.abs() - 1.0).abs() < 1e-9 { c.round() } else { c }, 0.0)
                } else {
                    Complex64::from_polar(1.0, phase)
                }
            })
            .collect();
        Self { nu, ln_kr, fft: FftPair::new(len), multiplier }
    }

    /// Transform samples of `g(r) = r^{n/2} u(r)` on a log grid; the output
    /// samples `ĝ(ρ)` are on the reciprocal grid in increasing `ρ`.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        let mut spec = self.fft.forward(g);
        for (a, d) in spec.iter_mut().zip(&self.multiplier) {
            *a *= d;
        }
        let mut out = self.fft.inverse_real(spec);
        out.reverse();
        out
    }

    /// Fraction of the spectral energy of `g` in the top quarter of frequencies.
    pub fn spectral_tail(&self, g: &[f64]) -> f64 {
        spectral_tail(&self.fft, g)
    }
}

pub(crate) fn spectral_tail(fft: &FftPair, g: &[f64]) -> f64 {
    let spec = fft.forward(g);
    let len = spec.len();
    let total: f64 = spec.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let high: f64 = spec
        .iter()
        .enumerate()
        .filter(|(m, _)| {
            let signed = if *m <= len / 2 { *m } else { len - m };
            signed > 3 * len / 8
        })
        .map(|(_, c)| c.norm_sqr())
        .sum();
    high / total
}

/// `Φ_ℓ(ω)` for `a = n/2 + ℓ`.
pub fn fractional_symbol(a: f64, s: f64, w: f64) -> f64 {
    let top = ln_gamma_complex(Complex64::new(0.5 * (a + s), 0.5 * w)).re;
    let bottom = ln_gamma_complex(Complex64::new(0.5 * (a - s), 0.5 * w)).re;
    (2.0 * s * LN_2 + 2.0 * (top - bottom)).exp()
}

/// The fractional Laplacian on one angular mode, tabulated on the DFT frequencies.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub ell: usize,
    pub dt: f64,
    symbol: Vec<f64>,
}

impl ModeOperator {
    /// Mode `ℓ` of a spherical harmonic expansion in `ℝⁿ`.
    pub fn new(len: usize, dt: f64, n: usize, s: f64, ell: usize) -> Self {
        let a = n as f64 / 2.0 + ell as f64;
        let symbol = (0..len).map(|m| fractional_symbol(a, s, omega(m, len, dt))).collect();
        Self { ell, dt, symbol }
    }

    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// `∫ Φ_ℓ |ĥ|² dω/2π + λ ∫ h² dt`, given the DFT of `h`.
    pub fn quadratic_form_spec(&self, spec: &[Complex64], lambda: f64) -> f64 {
        let len = spec.len() as f64;
        self.dt / len * spec.iter().zip(&self.symbol).map(|(c, p)| (p + lambda) * c.norm_sqr()).sum::<f64>()
    }

    /// Multiply a spectrum by `(Φ_ℓ + λ)^power`.
    pub fn scale_spec(&self, spec: &mut [Complex64], lambda: f64, power: f64) {
        for (c, p) in spec.iter_mut().zip(&self.symbol) {
            *c *= (p + lambda).powf(power);
        }
    }
}
