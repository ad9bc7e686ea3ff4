//! Irreducible representations of H(n): counts, completeness and the
//! orthogonality of characters.
use hmix::group::{canonical_measure, GroupElement};
use hmix::repr::{
    character_gram, dimension_square_sum, enumerate_irreps, fourier_transform, irrep_count,
    qhat_closed_form, DEFAULT_GRAM_CAP,
};

fn main() -> hmix::Result<()> {
    for n in [4u64, 6, 9, 12, 30] {
        println!(
            "n = {n:2}: {:4} irreps, sum of dim^2 = {} (n^3 = {})",
            irrep_count(n),
            dimension_square_sum(n),
            n * n * n
        );
    }

    let n = 9;
    let gram = character_gram(n, DEFAULT_GRAM_CAP)?;
    println!("n = {n}: |Gram - I| = {:.2e}", gram.identity_defect());

    // Q-hat by summing over the support against the closed form (degree >= 3).
    let q = canonical_measure(n)?;
    let mut worst = 0.0f64;
    for label in enumerate_irreps(n).into_iter().filter(|l| l.dim() >= 3) {
        let direct = fourier_transform(&q, &label)?;
        let closed = qhat_closed_form(&label)?;
        for i in 0..label.dim() {
            for j in 0..label.dim() {
                worst = worst.max((direct[(i, j)] - closed[(i, j)]).norm());
            }
        }
    }
    println!("n = {n}: |Q-hat - closed form| = {worst:.2e}");

    let g = GroupElement::new(1, 1, 1, n);
    let label = enumerate_irreps(n)
        .into_iter()
        .find(|l| l.dim() == 9)
        .unwrap();
    println!(
        "character of {label:?} at {g:?}: {}",
        hmix::repr::character(&label, &g)
    );
    Ok(())
}
