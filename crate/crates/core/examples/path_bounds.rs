//! Certified bounds on the top and bottom eigenvalues of M(xi) from canonical
//! paths in the absorbing chain, compared with the eigensolver.
use hmix::dirichlet::{
    bound_row_general, bound_sweep, lower_bound_betamin, upper_bound_using, upper_bound_with,
    Construction,
};

fn main() -> hmix::Result<()> {
    let n = 301;
    let xis = [1u64, 2, 5, 20, 75, 100];
    for r in bound_sweep(n, &xis)? {
        println!(
            "xi = {:3}  {:.6} >= {:.6}   {:+.6} <= {:+.6}   gap certified {:.1}%",
            r.xi,
            r.bound_upper,
            r.beta1_exact,
            r.bound_lower,
            r.betamin_exact,
            100.0 * r.gap_ratio
        );
    }

    let (report, construction) = upper_bound_with(1001, 250)?;
    println!(
        "n = 1001 xi = 250: {} paths, A = {}",
        construction.name(),
        report.a
    );
    for xi in [1u64, 2, 5] {
        let r = upper_bound_using(1001, xi, Construction::Pp1)?;
        let theta = (1.0 - r.bound_m) * (1001.0 / xi as f64).powf(4.0 / 3.0);
        println!(
            "xi = {xi}: theta = {theta:.4}, witness edge {} -> {}",
            r.witness.0, r.witness.1
        );
    }
    let low = lower_bound_betamin(101, 1)?;
    println!("n = 101 xi = 1: beta_min >= {:.6}", -low.bound_m);

    let row = bound_row_general(&[0.5, -0.2, -0.5, 0.1, 0.3])?;
    println!(
        "arbitrary diagonal: {:.4} >= {:.4}",
        row.bound_upper, row.beta1_exact
    );
    Ok(())
}
