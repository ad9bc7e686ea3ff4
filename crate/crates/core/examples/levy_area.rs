//! Z_k / k against the Levy area law.
use hmix::sim::{zn_limit_test, LevyDensity};

fn main() -> hmix::Result<()> {
    let levy = LevyDensity::new();
    println!("printed form integrates to {:.6}", levy.printed_mass());
    println!(
        "E[A^2] = {:.6}, E[A^4] = {:.6}",
        levy.moment(2),
        levy.moment(4)
    );
    for x in [0.0, 0.5, 1.0, 2.0] {
        println!("f({x}) = {:.6}", levy.density(x)?);
    }
    let stats = zn_limit_test(10_000, 20_000, 7)?;
    println!(
        "k = {}: KS against A/2 = {:.4}, against A = {:.4}, sample variance {:.4}",
        stats.k, stats.ks_halved, stats.ks_full, stats.variance
    );
    Ok(())
}
