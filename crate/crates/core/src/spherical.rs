//! Laplace–Beltrami eigenfunctions on `S^{k-1}`, the symmetry groups that
//! select them, and the perturbation factor `Σ_j (|x_j|/|ζ|) φ(x_j/|x_j|)`.
//!
//! Every eigenfunction used here is zonal about the first coordinate axis, so
//! integrals over the sphere reduce to one-dimensional integrals in `cos θ`.

use crate::error::{Error, Result};
use crate::spectral::quadrature::gauss_gegenbauer;
use crate::special::gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Zonal spherical harmonic of degree `ℓ` on `S^{k-1}`, normalised to mean square one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalEigenpair {
    pub k: usize,
    pub degree: usize,
    pub mu: f64,
    scale: f64,
    pub label: String,
}

/// Unnormalised zonal polynomial: Chebyshev `T_ℓ` for `k = 2`, Gegenbauer
/// `C_ℓ^{(k-2)/2}` otherwise.
fn zonal_poly(k: usize, ell: usize, x: f64) -> f64 {
    if ell == 0 {
        return 1.0;
    }
    if k == 2 {
        let (mut p0, mut p1) = (1.0, x);
        for _ in 1..ell {
            let p2 = 2.0 * x * p1 - p0;
            p0 = p1;
            p1 = p2;
        }
        return p1;
    }
    let lam = (k as f64 - 2.0) / 2.0;
    let (mut p0, mut p1) = (1.0, 2.0 * lam * x);
    for j in 2..=ell {
        let jf = j as f64;
        let p2 = (2.0 * x * (jf + lam - 1.0) * p1 - (jf + 2.0 * lam - 2.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Exponent `a` of the density `(1-x²)^a` of `x = σ·e` on `S^{k-1}`.
pub fn sphere_weight_exponent(k: usize) -> f64 {
    (k as f64 - 3.0) / 2.0
}

/// Mean over `S^{k-1}` of a zonal polynomial integrand of degree `< 2·npts`.
pub fn sphere_mean_poly(k: usize, npts: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_gegenbauer(npts, sphere_weight_exponent(k));
    x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum()
}

/// Mean over `S^{k-1}` of `f(cos θ)` for integrands that are smooth in `θ`
/// between the given breakpoints (composite Gauss–Legendre in `θ`).
pub fn sphere_mean_piecewise(k: usize, breaks_theta: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let (gx, gw) = gauss_gegenbauer(48, 0.0);
    let mut cuts = vec![0.0];
    cuts.extend(breaks_theta.iter().copied().filter(|&b| b > 0.0 && b < PI));
    cuts.push(PI);
    cuts.sort_by(f64::total_cmp);
    let p = k as f64 - 2.0;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, wt) in gx.iter().zip(&gw) {
            let th = mid + half * x;
            // gw sums to 1 on [-1,1]; the interval length is 2·half
            total += wt * 2.0 * half * th.sin().powf(p) * f(th.cos());
        }
    }
    // ∫₀^π sin^{k-2}θ dθ = √π Γ((k-1)/2)/Γ(k/2)
    let norm = PI.sqrt() * gamma((k as f64 - 1.0) / 2.0) / gamma(k as f64 / 2.0);
    total / norm
}

impl SphericalEigenpair {
    pub fn mean_square_unscaled(k: usize, ell: usize) -> f64 {
        sphere_mean_poly(k, ell + 2, |x| zonal_poly(k, ell, x).powi(2))
    }

    /// Angles `θ ∈ (0, π)` where the eigenfunction vanishes.
    pub fn nodal_angles(&self) -> Vec<f64> {
        if self.degree == 0 {
            return Vec::new();
        }
        let (x, _) = gauss_gegenbauer(self.degree, sphere_weight_exponent(self.k));
        x.iter().map(|x| x.clamp(-1.0, 1.0).acos()).collect()
    }

    /// Value as a function of `x = σ·e₁`.
    pub fn eval_cos(&self, x: f64) -> f64 {
        self.scale * zonal_poly(self.k, self.degree, x)
    }

    /// Value at a (not necessarily unit) nonzero vector of `ℝᵏ`.
    pub fn eval(&self, sigma: &[f64]) -> Result<f64> {
        assert_eq!(sigma.len(), self.k, "vector dimension must equal k");
        let norm = sigma.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::OriginEvaluation);
        }
        Ok(self.eval_cos((sigma[0] / norm).clamp(-1.0, 1.0)))
    }

    /// `−Δ_σ φ` at polar angle `θ` by central differences of step `h`, using
    /// `Δ_σ f = f'' + (k-2) cot θ f'` for zonal `f`.
    pub fn fd_laplace_beltrami(&self, theta: f64, h: f64) -> f64 {
        let f = |t: f64| self.eval_cos(t.cos());
        let d1 = (f(theta + h) - f(theta - h)) / (2.0 * h);
        let d2 = (f(theta + h) - 2.0 * f(theta) + f(theta - h)) / (h * h);
        -(d2 + (self.k as f64 - 2.0) * theta.cos() / theta.sin() * d1)
    }

    /// Mean over the sphere of `|φ|^p`.
    pub fn mean_abs_pow(&self, p: f64) -> f64 {
        sphere_mean_piecewise(self.k, &self.nodal_angles(), |x| self.eval_cos(x).abs().powf(p))
    }
}

/// Degree-`ℓ` zonal harmonic with `μ = ℓ(ℓ+k-2)`, mean zero and mean square one.
pub fn eigenpair_degree(k: usize, ell: usize) -> Result<SphericalEigenpair> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("sphere parameter k = {k} must be at least 2")));
    }
    if ell == 0 {
        return Err(Error::EllZeroRejected);
    }
    let ms = SphericalEigenpair::mean_square_unscaled(k, ell);
    Ok(SphericalEigenpair {
        k,
        degree: ell,
        mu: (ell * (ell + k - 2)) as f64,
        scale: 1.0 / ms.sqrt(),
        label: format!("degree {ell} on S^{}", k - 1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKind {
    Trivial,
    FullOrthogonal,
    /// Rotations of the plane by multiples of `2π/t`.
    CyclicSector(usize),
}

/// A subgroup `𝒢_k ≺ O(k)`, acting blockwise on `ℝⁿ = (ℝᵏ)^m`; for `m > 1`
/// block permutations are included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    pub kind: GroupKind,
    pub k: usize,
    pub m: usize,
}

impl SymmetryGroup {
    pub fn new(kind: GroupKind, k: usize, m: usize) -> Result<Self> {
        if k < 2 || m < 1 {
            return Err(Error::InvalidParameter(format!("group needs k >= 2, m >= 1 (k = {k}, m = {m})")));
        }
        if let GroupKind::CyclicSector(t) = kind {
            if k != 2 || t < 2 {
                return Err(Error::UnsupportedGroup(format!("cyclic sector Z_{t} needs k = 2 and t >= 2")));
            }
        }
        Ok(Self { kind, k, m })
    }

    pub fn trivial(k: usize) -> Self {
        Self { kind: GroupKind::Trivial, k, m: 1 }
    }

    pub fn n(&self) -> usize {
        self.k * self.m
    }

    /// Apply the `j`-th generator power to a point of `S^{k-1}` (identity for
    /// groups other than cyclic sectors).
    pub fn act(&self, j: usize, sigma: &[f64]) -> Vec<f64> {
        match self.kind {
            GroupKind::CyclicSector(t) => {
                let a = 2.0 * PI * j as f64 / t as f64;
                let (c, s) = (a.cos(), a.sin());
                vec![c * sigma[0] - s * sigma[1], s * sigma[0] + c * sigma[1]]
            }
            _ => sigma.to_vec(),
        }
    }
}

/// Smallest positive eigenvalue among mean-zero `𝒢_k`-invariant eigenfunctions.
pub fn invariant_first_eigenvalue(group: &SymmetryGroup) -> Result<(f64, SphericalEigenpair)> {
    let e = match group.kind {
        GroupKind::FullOrthogonal => return Err(Error::FullGroupRejected),
        GroupKind::Trivial => eigenpair_degree(group.k, 1)?,
        GroupKind::CyclicSector(t) => {
            let mut e = eigenpair_degree(2, t)?;
            e.label = format!("Z_{t}-invariant cos({t}θ)");
            e
        }
    };
    Ok((e.mu, e))
}

/// `F(x, y) = Σ_j (|x_j|/|ζ|) φ(x_j/|x_j|)` with `ζ = (x, y)`, on `ℝⁿ × [0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationFactor {
    pub eigen: SphericalEigenpair,
    pub k: usize,
    pub m: usize,
}

pub fn perturbation_factor(eigen: &SphericalEigenpair, k: usize, m: usize) -> Result<PerturbationFactor> {
    if eigen.k != k {
        return Err(Error::PartitionMismatch { n: eigen.k, km: k });
    }
    if m < 1 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    Ok(PerturbationFactor { eigen: eigen.clone(), k, m })
}

impl PerturbationFactor {
    pub fn n(&self) -> usize {
        self.k * self.m
    }

    /// Value at `(x, y)`; blocks with `x_j = 0` contribute zero.
    pub fn eval(&self, x: &[f64], y: f64) -> Result<f64> {
        assert_eq!(x.len(), self.n());
        let zeta = (x.iter().map(|v| v * v).sum::<f64>() + y * y).sqrt();
        if zeta == 0.0 {
            return Err(Error::OriginEvaluation);
        }
        let mut total = 0.0;
        for block in x.chunks(self.k) {
            let r = block.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r > 0.0 {
                total += r / zeta * self.eigen.eval(block)?;
            }
        }
        Ok(total)
    }

    /// `Σ_j f_j² = |x|²/|ζ|²`.
    pub fn sum_f_squared(&self, x: &[f64], y: f64) -> f64 {
        let x2: f64 = x.iter().map(|v| v * v).sum();
        x2 / (x2 + y * y)
    }

    /// Closed form `g_j = |ζ|^{-3}|x_j|^{-1}((n+1-2s)|x_j|² + (μ-k+1)|ζ|²)`
    /// assembled as `y^{1-2s} Σ_j g_j φ_j = −div(y^{1-2s} ∇F)`.
    pub fn weighted_divergence_closed_form(&self, x: &[f64], y: f64, s: f64) -> Result<f64> {
        Ok(self.divergence_terms(x, y, s)?.iter().sum())
    }

    /// The summands `y^{1-2s} g_j φ_j`, one per block.
    pub fn divergence_terms(&self, x: &[f64], y: f64, s: f64) -> Result<Vec<f64>> {
        let n = self.n() as f64;
        let zeta2 = x.iter().map(|v| v * v).sum::<f64>() + y * y;
        let zeta = zeta2.sqrt();
        let wy = y.powf(1.0 - 2.0 * s);
        x.chunks(self.k)
            .map(|block| {
                let r = block.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r == 0.0 {
                    return Err(Error::OriginEvaluation);
                }
                let g = ((n + 1.0 - 2.0 * s) * r * r + (self.eigen.mu - self.k as f64 + 1.0) * zeta2) / (zeta2 * zeta * r);
                Ok(wy * g * self.eigen.eval(block)?)
            })
            .collect()
    }

    /// `−div(y^{1-2s} ∇F)` by second-order central differences of step `h`.
    pub fn weighted_divergence_fd(&self, x: &[f64], y: f64, s: f64, h: f64) -> Result<f64> {
        let w = |yy: f64| yy.powf(1.0 - 2.0 * s);
        let f0 = self.eval(x, y)?;
        let mut lap = 0.0;
        let mut xp = x.to_vec();
        for i in 0..x.len() {
            xp[i] = x[i] + h;
            let fp = self.eval(&xp, y)?;
            xp[i] = x[i] - h;
            let fm = self.eval(&xp, y)?;
            xp[i] = x[i];
            lap += fp - 2.0 * f0 + fm;
        }
        let fyp = self.eval(x, y + h)?;
        let fym = self.eval(x, y - h)?;
        // ∂_y(w ∂_y F) with fluxes at half steps
        let flux_up = w(y + 0.5 * h) * (fyp - f0) / h;
        let flux_dn = w(y - 0.5 * h) * (f0 - fym) / h;
        Ok(-(w(y) * lap / (h * h) + (flux_up - flux_dn) / h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degree_one_is_scaled_coordinate() {
        for k in 2..7 {
            let e = eigenpair_degree(k, 1).unwrap();
            assert_eq!(e.mu, (k - 1) as f64);
            // φ = √k (σ·e₁)
            assert!((e.eval_cos(0.3) - (k as f64).sqrt() * 0.3).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_modes() {
        for t in 1..6 {
            let e = eigenpair_degree(2, t).unwrap();
            assert_eq!(e.mu, (t * t) as f64);
            for &th in &[0.1, 1.0, 2.5] {
                let expected = 2f64.sqrt() * (t as f64 * th).cos();
                assert!((e.eval(&[th.cos(), th.sin()]).unwrap() - expected).abs() < 1e-12);
            }
        }
        assert_eq!(eigenpair_degree(2, 0), Err(Error::EllZeroRejected));
    }

    #[test]
    fn normalisation_and_zero_mean() {
        for k in 2..7 {
            for ell in 1..5 {
                let e = eigenpair_degree(k, ell).unwrap();
                let breaks = e.nodal_angles();
                let mean = sphere_mean_piecewise(k, &breaks, |x| e.eval_cos(x));
                let msq = sphere_mean_piecewise(k, &breaks, |x| e.eval_cos(x).powi(2));
                assert!(mean.abs() < 1e-12, "k={k} l={ell} mean={mean}");
                assert!((msq - 1.0).abs() < 1e-12, "k={k} l={ell} msq={msq}");
            }
        }
    }

    #[test]
    fn eigen_residual_converges_at_second_order() {
        for k in [2usize, 3, 4, 6] {
            let e = eigenpair_degree(k, 2).unwrap();
            let err = |h: f64| {
                (1..40)
                    .map(|i| {
                        let th = 0.2 + i as f64 * 0.07;
                        (e.fd_laplace_beltrami(th, h) - e.mu * e.eval_cos(th.cos())).abs()
                    })
                    .fold(0.0, f64::max)
            };
            let (e1, e2) = (err(1e-2), err(5e-3));
            let order = (e1 / e2).log2();
            assert!(e2 < 1e-3 && (order - 2.0).abs() < 0.2, "k={k} order={order}");
        }
    }

    #[test]
    fn first_invariant_eigenvalues() {
        let (mu, _) = invariant_first_eigenvalue(&SymmetryGroup::trivial(5)).unwrap();
        assert_eq!(mu, 4.0);
        for t in 2..6 {
            let g = SymmetryGroup::new(GroupKind::CyclicSector(t), 2, 1).unwrap();
            let (mu, e) = invariant_first_eigenvalue(&g).unwrap();
            assert_eq!(mu, (t * t) as f64);
            // minimal over invariant Fourier modes: multiples of t
            let brute = (1..50).filter(|j| j % t == 0).map(|j| (j * j) as f64).fold(f64::INFINITY, f64::min);
            assert_eq!(mu, brute);
            let mut rng = ChaCha8Rng::seed_from_u64(t as u64);
            for _ in 0..100 {
                let th: f64 = rng.gen_range(0.0..2.0 * PI);
                let p = [th.cos(), th.sin()];
                let j = rng.gen_range(0..t);
                let moved = g.act(j, &p);
                assert!((e.eval(&moved).unwrap() - e.eval(&p).unwrap()).abs() < 1e-12);
            }
        }
        let full = SymmetryGroup::new(GroupKind::FullOrthogonal, 3, 1).unwrap();
        assert!(matches!(invariant_first_eigenvalue(&full), Err(Error::FullGroupRejected)));
        assert!(SymmetryGroup::new(GroupKind::CyclicSector(3), 3, 1).is_err());
        assert!(SymmetryGroup::new(GroupKind::CyclicSector(1), 2, 1).is_err());
    }

    #[test]
    fn factor_properties() {
        let e = eigenpair_degree(4, 1).unwrap();
        let f = perturbation_factor(&e, 4, 1).unwrap();
        let x = [0.3, -0.2, 0.5, 0.1];
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        // on y = 0 the factor is the eigenfunction itself
        assert!((f.eval(&x, 0.0).unwrap() - e.eval(&x).unwrap()).abs() < 1e-14);
        assert!(f.eval(&x, 1e8).unwrap().abs() < 1e-7 * r);
        assert_eq!(f.eval(&[0.0; 4], 0.0), Err(Error::OriginEvaluation));

        let e2 = eigenpair_degree(2, 3).unwrap();
        let f2 = perturbation_factor(&e2, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: f64 = rng.gen_range(0.0..3.0);
            assert!(f2.sum_f_squared(&x, y) <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn orthogonality_of_block_factors() {
        // mean over S^1 × S^1 of φ(σ_1)φ(σ_2) vanishes and of φ(σ_j)² is one
        let e = eigenpair_degree(2, 2).unwrap();
        let m = 64;
        let mut cross = 0.0;
        let mut diag = 0.0;
        for i in 0..m {
            for j in 0..m {
                let a = 2.0 * PI * i as f64 / m as f64;
                let b = 2.0 * PI * j as f64 / m as f64;
                let pa = e.eval(&[a.cos(), a.sin()]).unwrap();
                let pb = e.eval(&[b.cos(), b.sin()]).unwrap();
                cross += pa * pb;
                diag += pa * pa;
            }
        }
        let norm = (m * m) as f64;
        assert!((cross / norm).abs() < 1e-12);
        assert!((diag / norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_closed_form_matches_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (k, m, ell) in [(3, 1, 1), (2, 2, 1), (2, 2, 2), (4, 1, 2)] {
            let f = perturbation_factor(&eigenpair_degree(k, ell).unwrap(), k, m).unwrap();
            for _ in 0..20 {
                let x: Vec<f64> = (0..k * m).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let y = rng.gen_range(0.3..2.0);
                let terms = f.divergence_terms(&x, y, 0.4).unwrap();
                let scale: f64 = terms.iter().map(|t| t.abs()).sum();
                let fd = f.weighted_divergence_fd(&x, y, 0.4, 1e-4).unwrap();
                assert!((fd - terms.iter().sum::<f64>()).abs() < 1e-5 * scale, "k={k} m={m} l={ell}");
            }
        }
        let f = perturbation_factor(&eigenpair_degree(2, 1).unwrap(), 2, 2).unwrap();
        assert_eq!(f.weighted_divergence_closed_form(&[0.0, 0.0, 1.0, 0.0], 1.0, 0.5), Err(Error::OriginEvaluation));
    }
}
