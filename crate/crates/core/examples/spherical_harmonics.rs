use ckn_symbreak::spherical::{eigenpair_degree, invariant_first_eigenvalue, perturbation_factor, GroupKind, SymmetryGroup};

fn main() -> ckn_symbreak::Result<()> {
    for k in [2, 3, 4] {
        for ell in 1..=3 {
            let e = eigenpair_degree(k, ell)?;
            println!("S^{}: degree {ell} mu={} mean|phi|^4={:.6}", k - 1, e.mu, e.mean_abs_pow(4.0));
        }
    }
    for t in [2, 3, 5] {
        let g = SymmetryGroup::new(GroupKind::CyclicSector(t), 2, 1)?;
        let (mu, e) = invariant_first_eigenvalue(&g)?;
        println!("Z_{t}-invariant first eigenvalue {mu} (degree {})", e.degree);
    }

    // F on ℝ⁴ = ℝ² × ℝ² built from the degree-one circle harmonic
    let f = perturbation_factor(&eigenpair_degree(2, 1)?, 2, 2)?;
    let x = [0.3, -1.1, 0.7, 0.2];
    let y = 0.5;
    println!(
        "F={:.6}  -div(y^(1-2s) grad F): closed {:.8}  fd {:.8}",
        f.eval(&x, y)?,
        f.weighted_divergence_closed_form(&x, y, 0.5)?,
        f.weighted_divergence_fd(&x, y, 0.5, 1e-4)?
    );
    Ok(())
}
