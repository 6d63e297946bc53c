//! Spectral seminorm, Hardy integral and Hankel transform of a Gaussian,
//! which the transform maps to itself.

use ckn_symbreak::energy::seminorm;
use ckn_symbreak::spectral::{hankel_transform, weighted_norm, Field, RadialGrid, RadialProfile};

fn main() -> ckn_symbreak::Result<()> {
    let grid = RadialGrid::new(1e-8, 1e6, 2048)?;
    for n in [2usize, 3, 4] {
        let p = RadialProfile::from_fn(&grid, n, |r| (-r * r / 2.0).exp())?;
        let spec = hankel_transform(&p, 0)?;
        let mid = spec.nodes().iter().position(|&k| k > 1.0).unwrap();
        let k = spec.nodes()[mid];
        let u = Field::Radial(p);
        println!(
            "n={n}: û({k:.4})={:.10} (exact {:.10})  seminorm(s=1/2)={:.8}  hardy={:.8}",
            spec.values[mid],
            (-k * k / 2.0).exp(),
            seminorm(&u, 0.5)?,
            weighted_norm(&u, 0.5, 2.0)?.value
        );
    }
    Ok(())
}
