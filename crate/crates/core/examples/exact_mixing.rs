//! Exact total variation with the Fourier upper bound and the projection
//! lower bound, then the distance on the n^2 time scale.
use hmix::mixing::{exact_tv_curve, fitted_decay_rate, theorem1_constants};

fn main() -> hmix::Result<()> {
    let n = 15;
    let curve = exact_tv_curve(n, 1000)?;
    for r in curve.iter().step_by(100) {
        println!(
            "k = {:4}  lb = {:.4}  tv = {:.4}  ub = {:.4}",
            r.k, r.lb_projection, r.tv_exact, r.ub_fourier
        );
    }
    let rate = fitted_decay_rate(&curve[500..]);
    let slowest = -(std::f64::consts::PI / n as f64).cos().ln();
    println!("fitted decay rate {rate:.5}, slowest mode {slowest:.5}");

    let summary = theorem1_constants(&[9, 15, 21], &[0.25, 0.5, 1.0, 2.0])?;
    for row in &summary.rows {
        println!(
            "n = {:2} eta = {:4} k = {:4}  tv = {:.3e}  tv / cos(pi/n)^k = {:.3}",
            row.n, row.eta, row.k, row.tv_exact, row.ratio_slowest
        );
    }
    println!("stable across n: {}", summary.is_stable(2.0));
    Ok(())
}
