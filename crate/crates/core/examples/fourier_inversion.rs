//! Recover convolution powers from powers of Q-hat, and evaluate the upper
//! bound lemma against the exact distance.
use hmix::group::{canonical_measure, ConvolutionPowers, GroupElement};
use hmix::repr::{fourier_inversion, FourierTable, UpperBoundLemma};

fn main() -> hmix::Result<()> {
    let n = 5;
    let q = canonical_measure(n)?;
    let table = FourierTable::of_measure(&q)?;
    let lemma = UpperBoundLemma::new(n)?;
    println!("    k  max|inverse - exact|        4 tv^2       I + II");
    for (k, exact) in ConvolutionPowers::new(&q)
        .enumerate()
        .skip(1)
        .step_by(10)
        .take(8)
    {
        let powered = table.power(k as u32)?;
        let mut worst = 0.0f64;
        for g in GroupElement::all(n) {
            worst = worst.max((fourier_inversion(&powered, &g)? - exact.get(&g)).abs());
        }
        let tv = exact.tv_distance();
        let (i, ii) = lemma.terms(k as u64);
        println!(
            "{k:5}  {worst:20.2e}  {:12.4e}  {:11.4e}",
            4.0 * tv * tv,
            i + ii
        );
    }
    Ok(())
}
