//! Extreme eigenvalues of the Harper matrices M(xi) and their symmetries.
use hmix::harper::{beta_star, build_harper, check_prop41, dft_commutator, spectrum_sweep};

fn main() -> hmix::Result<()> {
    let n = 150;
    let sweep = spectrum_sweep(n, 1..=(n as u64 - 1), 0.0)?;
    for row in sweep.rows.iter().step_by(15) {
        println!(
            "xi = {:3}  top = {:+.6}  bottom = {:+.6}  beta* = {:.6}",
            row.xi, row.beta_top, row.beta_bottom, row.beta_star
        );
    }
    println!("max residual {:.1e}", sweep.max_residual());
    println!("top of M(1): {:.8}", sweep.full.top());
    println!("beta*(n, 1) = {:.8}", beta_star(n, 1)?);

    let m = build_harper(12, 5, 0.25)?;
    println!("M(12, 5, 1/4) eigenvalues: {:.4?}", m.eigenvalues()?);

    for (n, xi, k, alpha) in [(12, 3, 2, 0.0), (15, 4, 3, 0.3)] {
        let r = check_prop41(n, xi, k, alpha)?;
        println!("n = {n} xi = {xi}: all clauses hold = {}", r.all_hold());
    }
    println!("|F M(1) - M(1) F| at n = 64: {:.1e}", dft_commutator(64)?);
    Ok(())
}
