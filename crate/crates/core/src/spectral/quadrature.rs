//! One-dimensional quadrature rules.

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss rule for the normalised weight `(1-x²)^a` on `[-1, 1]` (Gauss–Gegenbauer,
/// i.e. Jacobi with `α = β = a`), built with Golub–Welsch.
///
/// Weights sum to one, so `Σ wᵢ f(xᵢ)` is the weighted *mean* of `f`. With
/// `a = (k-3)/2` this is the mean over `S^{k-1}` of a zonal function of `cos θ`.
pub fn gauss_gegenbauer(npts: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(npts >= 1 && a > -1.0);
    let mut jac = DMatrix::<f64>::zeros(npts, npts);
    for k in 1..npts {
        let kf = k as f64;
        let beta = if k == 1 {
            1.0 / (3.0 + 2.0 * a)
        } else {
            kf * (kf + 2.0 * a) / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0))
        };
        let off = beta.sqrt();
        jac[(k, k - 1)] = off;
        jac[(k - 1, k)] = off;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..npts)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    (
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1 / total).collect(),
    )
}

/// Result of a truncated improper integral.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Truncated {
    pub value: f64,
    /// Estimate of the discarded tail mass.
    pub residual: f64,
}

/// `∫₀^∞ y^{1-2s} / (|x|² + y²) dy` by quadrature.
///
/// Substituting `y = |x| e^τ` gives `|x|^{-2s} ∫ e^{(2-2s)τ}/(1+e^{2τ}) dτ`,
/// whose integrand decays exponentially at both ends; the trapezoid rule is then
/// geometrically convergent.
pub fn halfline_weight_integral(s: f64, x: f64) -> Truncated {
    assert!(s > 0.0 && s < 1.0 && x != 0.0);
    let ax = x.abs();
    let lo_rate = 2.0 - 2.0 * s;
    let hi_rate = 2.0 * s;
    // stop where the integrand has dropped below e^{-40}
    let lo = -40.0 / lo_rate;
    let hi = 40.0 / hi_rate;
    let h = 0.02;
    let f = |tau: f64| {
        // e^{(2-2s)τ}/(1+e^{2τ}) written to avoid overflow
        if tau > 0.0 {
            (-hi_rate * tau).exp() / (1.0 + (-2.0 * tau).exp())
        } else {
            (lo_rate * tau).exp() / (1.0 + (2.0 * tau).exp())
        }
    };
    let steps = ((hi - lo) / h).ceil() as usize;
    let mut sum = 0.0;
    for i in 0..=steps {
        let tau = lo + i as f64 * h;
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        sum += w * f(tau);
    }
    let scale = ax.powf(-2.0 * s);
    let tail = f(lo) / lo_rate + f(lo + steps as f64 * h) / hi_rate;
    Truncated { value: scale * h * sum, residual: scale * tail }
}
