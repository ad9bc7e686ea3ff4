//! Law of the central coordinate mod p from the characters of the
//! p-dimensional representations.
use hmix::mixing::{center_table, CenterFormula};

fn main() -> hmix::Result<()> {
    let p = 11;
    let formula = CenterFormula::new(p)?;
    for k in [10u32, 50, 200] {
        let law = formula.distribution(k)?;
        let spread =
            law.iter().cloned().fold(0.0, f64::max) - law.iter().cloned().fold(1.0, f64::min);
        println!(
            "k = {k:3}: P(Z = 0) = {:.6}, max - min = {spread:.2e}",
            law[0]
        );
    }
    let worst = center_table(p, 200)?
        .iter()
        .map(|r| (r.prob_fourier - r.prob_exact).abs())
        .fold(0.0, f64::max);
    println!("against exact convolution, k <= 200: {worst:.2e}");
    Ok(())
}
