//! The iterated-log chain and the sequences built from it.
use treelip::weights::{alpha, ell, gamma, phi, weight, WeightTable};

fn main() -> treelip::Result<()> {
    for n in [2u64, 10, 1000, 1_000_000] {
        let x = n as f64;
        println!(
            "n={n:>7}  l1={:.6} l2={:.6} mu2={:.3e}  alpha1-1={:.3e} phi1={:.3e} gamma1={:.6}",
            ell(1, x)?,
            ell(2, x)?,
            weight(2, x)?,
            alpha(1, n)? - 1.0,
            phi(1, n)?,
            gamma(1, n)?,
        );
    }
    let t = WeightTable::new(3, 100)?;
    println!("table k=3: mu_3(100) = {:.4}, mu_4(100) = {:.4}", t.mu_k(100), t.mu_next(100));
    Ok(())
}
