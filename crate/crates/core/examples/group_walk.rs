//! The walk on H(n) as a table of probabilities: group law, convolution
//! powers and distance to uniform.
use hmix::group::{canonical_measure, ConvolutionPowers, DistributionTable, GroupElement};

fn main() -> hmix::Result<()> {
    let n = 7;
    let g = GroupElement::new(1, 2, 3, n);
    let h = GroupElement::new(4, 0, 6, n);
    println!("g = {g:?}");
    println!("g h = {:?}", g.mul(&h)?);
    println!("h g = {:?}", h.mul(&g)?);
    println!("g g^-1 = {:?}", g.mul(&g.inv())?);

    let q = canonical_measure(n)?;
    for (k, p) in ConvolutionPowers::new(&q).enumerate().take(200) {
        if k % 25 == 0 {
            println!("k = {k:3}  tv = {:.6}", p.tv_distance());
        }
    }

    // Tables round-trip through the binary format.
    let p = ConvolutionPowers::new(&q).nth(10).unwrap();
    let mut bytes = Vec::new();
    p.write_binary(&mut bytes)?;
    let back = DistributionTable::read_binary(bytes.as_slice())?;
    println!(
        "binary round trip: {} bytes, equal = {}",
        bytes.len(),
        back == p
    );
    Ok(())
}
