//! Monte Carlo estimates of return probabilities on the integer Heisenberg group.
use hmix::sim::{conjectured_constant, return_probability};

fn main() -> hmix::Result<()> {
    for k in [20u64, 50, 100] {
        let s = return_probability(k, 1_000_000, 11)?;
        println!(
            "k = {k:3}: k^2 P(return) = {:.3} +/- {:.3}, pi k P(X = Y = 0) = {:.3}",
            s.k2_scaled(),
            s.k2_stderr(),
            s.xy_scaled()
        );
    }
    println!(
        "conjectured constant 4 Gamma(1/4)^2 / pi^2 = {:.4}",
        conjectured_constant()
    );
    Ok(())
}
