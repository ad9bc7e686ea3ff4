//! Irreducible representations of `H(n)` and Fourier analysis of walk measures.
//!
//! For every divisor `m` of `n` there are `(n/m)^2 phi(m)` irreducible
//! representations of degree `m`, labelled `(a, b, c)` with
//! `a, b in 0..n/m` and `c` a unit mod `m`. The representation acts on
//! functions `f: Z/m -> C` by
//!
//! ```text
//! rho(x, y, z) f(j) = q_n^(a x + b y) * q_m^(c (y j + z)) * f(j + x)
//! ```
//!
//! with `q_n = exp(2 pi i / n)`. The twists `a, b` enter unscaled: the
//! characters `q_n^(a x)` for `a in 0..n/m` are representatives of the
//! characters of `Z/n` modulo those of `Z/m`, which are absorbed by
//! conjugating with diagonal and shift matrices. Scaling `a` by `m` would
//! collapse distinct classes whenever `gcd(m, n/m) > 1` (e.g. `n = 4`).
//!
//! Matrices use the basis of delta functions at `j = 0..m-1`; row `j` is the
//! output point, so `rho(g)[j][(j + x) mod m] = phase_j`.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{DistributionTable, GroupElement, WalkMeasure};
use crate::linalg::ComplexMatrix;

/// Default limit on `n` for [`character_gram`].
pub const DEFAULT_GRAM_CAP: u64 = 30;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

pub fn euler_phi(m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    (1..m).filter(|&c| gcd(c, m) == 1).count() as u64
}

/// Units mod `m`; `{0}` for `m = 1` by convention.
fn units(m: u64) -> Vec<u64> {
    if m == 1 {
        vec![0]
    } else {
        (1..m).filter(|&c| gcd(c, m) == 1).collect()
    }
}

/// Number of irreducible representations, `sum_{m|n} (n/m)^2 phi(m)`.
pub fn irrep_count(n: u64) -> u64 {
    divisors(n)
        .into_iter()
        .map(|m| (n / m).pow(2) * euler_phi(m))
        .sum()
}

/// `sum_{m|n} (n/m)^2 phi(m) m^2`, which must equal `n^3`.
pub fn dimension_square_sum(n: u64) -> u64 {
    divisors(n)
        .into_iter()
        .map(|m| (n / m).pow(2) * euler_phi(m) * m * m)
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IrrepLabel {
    pub n: u64,
    /// Degree of the representation; divides `n`.
    pub m: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl IrrepLabel {
    pub fn new(n: u64, m: u64, a: u64, b: u64, c: u64) -> Result<Self> {
        if n == 0 || m == 0 || n % m != 0 {
            return Err(Error::InvalidArgument(format!("{m} does not divide {n}")));
        }
        let k = n / m;
        if a >= k || b >= k {
            return Err(Error::InvalidArgument(format!(
                "twists ({a}, {b}) must lie in 0..{k}"
            )));
        }
        let unit = if m == 1 {
            c == 0
        } else {
            c < m && gcd(c, m) == 1
        };
        if !unit {
            return Err(Error::InvalidArgument(format!("{c} is not a unit mod {m}")));
        }
        Ok(Self { n, m, a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.m as usize
    }

    pub fn is_trivial(&self) -> bool {
        self.m == 1 && self.a == 0 && self.b == 0
    }

    /// Exponent `e` (mod `n`) of the phase `q_n^e` on row `j` of `rho(g)`.
    #[inline]
    fn phase_exponent(&self, g: &GroupElement, j: u64) -> u64 {
        let n = self.n;
        let m = self.m;
        let twist = (self.a * g.x + self.b * g.y) % n;
        let central = (self.c * ((g.y * j + g.z) % m)) % m;
        (twist + (n / m) * central) % n
    }
}

/// All irreducible labels of `H(n)`, ordered by degree then `(a, b, c)`.
pub fn enumerate_irreps(n: u64) -> Vec<IrrepLabel> {
    let mut out = Vec::with_capacity(irrep_count(n) as usize);
    for m in divisors(n) {
        let k = n / m;
        let cs = units(m);
        for a in 0..k {
            for b in 0..k {
                for &c in &cs {
                    out.push(IrrepLabel { n, m, a, b, c });
                }
            }
        }
    }
    out
}

#[inline]
fn root_of_unity(e: u64, n: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * e as f64 / n as f64)
}

fn check_modulus(label: &IrrepLabel, g: &GroupElement) -> Result<()> {
    if label.n != g.n {
        return Err(Error::ModulusMismatch {
            left: label.n,
            right: g.n,
        });
    }
    Ok(())
}

/// The `m x m` matrix of `rho_{a,b,c}(g)`.
pub fn irrep_matrix(label: &IrrepLabel, g: &GroupElement) -> Result<ComplexMatrix> {
    check_modulus(label, g)?;
    let m = label.m;
    let mut out = ComplexMatrix::zeros(m as usize);
    for j in 0..m {
        let col = (j + g.x) % m;
        out[(j as usize, col as usize)] = root_of_unity(label.phase_exponent(g, j), label.n);
    }
    Ok(out)
}

/// `tr(T rho(g)^*)` without forming `rho(g)`.
fn trace_against(label: &IrrepLabel, t: &ComplexMatrix, g: &GroupElement) -> Complex64 {
    let m = label.m;
    (0..m)
        .map(|j| {
            let col = (j + g.x) % m;
            t[(j as usize, col as usize)]
                * root_of_unity(label.phase_exponent(g, j), label.n).conj()
        })
        .sum()
}

/// Closed-form character: zero unless `m | x` and `m | y`, otherwise
/// `m q_n^(a x + b y) q_m^(c z)`.
pub fn character(label: &IrrepLabel, g: &GroupElement) -> Complex64 {
    let m = label.m;
    if g.x % m != 0 || g.y % m != 0 {
        return Complex64::new(0.0, 0.0);
    }
    root_of_unity(label.phase_exponent(g, 0), label.n) * m as f64
}

/// Gram matrix of irreducible characters under
/// `<chi, chi'> = n^-3 sum_g chi(g) conj(chi'(g))`.
#[derive(Clone, Debug)]
pub struct CharacterGram {
    pub labels: Vec<IrrepLabel>,
    entries: Vec<Complex64>,
}

impl CharacterGram {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.labels.len() + j]
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    /// Largest entrywise deviation from the identity matrix.
    pub fn identity_defect(&self) -> f64 {
        let l = self.labels.len();
        let mut worst: f64 = 0.0;
        for i in 0..l {
            for j in 0..l {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.get(i, j) - target).norm());
            }
        }
        worst
    }
}

/// Character inner products over all labels of `H(n)`.
pub fn character_gram(n: u64, cap: u64) -> Result<CharacterGram> {
    if n > cap {
        return Err(Error::BudgetExceeded {
            states: n,
            budget: cap,
        });
    }
    let labels = enumerate_irreps(n);
    // Support of chi is {(x, y, z): m | x, m | y}; store it sparsely.
    let supports: Vec<Vec<(GroupElement, Complex64)>> = labels
        .iter()
        .map(|l| {
            let m = l.m;
            let mut s = Vec::new();
            for z in 0..n {
                for y in (0..n).step_by(m as usize) {
                    for x in (0..n).step_by(m as usize) {
                        let g = GroupElement { x, y, z, n };
                        s.push((g, character(l, &g)));
                    }
                }
            }
            s
        })
        .collect();
    let size = labels.len();
    let norm = 1.0 / (n * n * n) as f64;
    let mut entries = vec![Complex64::new(0.0, 0.0); size * size];
    for i in 0..size {
        for j in i..size {
            let (sparse, other, conj_first) = if supports[i].len() <= supports[j].len() {
                (&supports[i], &labels[j], false)
            } else {
                (&supports[j], &labels[i], true)
            };
            let sum: Complex64 = sparse
                .iter()
                .map(|(g, v)| {
                    let w = character(other, g);
                    if conj_first {
                        w * v.conj()
                    } else {
                        v * w.conj()
                    }
                })
                .sum();
            let ip = sum * norm;
            entries[i * size + j] = ip;
            entries[j * size + i] = ip.conj();
        }
    }
    Ok(CharacterGram { labels, entries })
}

/// `Q^(rho) = sum_g Q(g) rho(g)`.
pub fn fourier_transform(q: &WalkMeasure, label: &IrrepLabel) -> Result<ComplexMatrix> {
    if q.modulus() != label.n {
        return Err(Error::ModulusMismatch {
            left: q.modulus(),
            right: label.n,
        });
    }
    let mut out = ComplexMatrix::zeros(label.dim());
    for (g, w) in q.support() {
        let r = irrep_matrix(label, g)?;
        out = out.add(&r.scale(Complex64::new(*w, 0.0)));
    }
    Ok(out)
}

/// Transform of a dense table, `sum_g P(g) rho(g)`.
pub fn table_transform(p: &DistributionTable, label: &IrrepLabel) -> Result<ComplexMatrix> {
    if p.modulus() != label.n {
        return Err(Error::ModulusMismatch {
            left: p.modulus(),
            right: label.n,
        });
    }
    let m = label.m;
    let mut out = ComplexMatrix::zeros(label.dim());
    for (i, &w) in p.probs().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let g = GroupElement::from_index(i, label.n);
        for j in 0..m {
            let col = (j + g.x) % m;
            out[(j as usize, col as usize)] +=
                root_of_unity(label.phase_exponent(&g, j), label.n) * w;
        }
    }
    Ok(out)
}

/// Closed form of the canonical transform for `m >= 3`: one quarter of a
/// matrix with `q_n^a` on the superdiagonal and lower-left corner, `q_n^-a`
/// on the subdiagonal and upper-right corner, and
/// `q_n^b q_m^(jc) + q_n^-b q_m^-(jc)` on the diagonal.
pub fn qhat_closed_form(label: &IrrepLabel) -> Result<ComplexMatrix> {
    let m = label.m;
    if m < 3 {
        return Err(Error::InvalidArgument(format!(
            "closed form needs degree >= 3, got {m}"
        )));
    }
    let n = label.n;
    let d = m as usize;
    let quarter = Complex64::new(0.25, 0.0);
    let up = root_of_unity(label.a % n, n) * quarter;
    let down = up.conj();
    let mut out = ComplexMatrix::zeros(d);
    for j in 0..d {
        let e = (label.b + (n / m) * ((label.c * j as u64) % m)) % n;
        let z = root_of_unity(e, n);
        out[(j, j)] = (z + z.conj()) * quarter;
        out[(j, (j + 1) % d)] = up;
        out[((j + 1) % d, j)] = down;
    }
    Ok(out)
}

/// Transforms at every irreducible label, in [`enumerate_irreps`] order.
#[derive(Clone, Debug)]
pub struct FourierTable {
    pub n: u64,
    pub entries: Vec<(IrrepLabel, ComplexMatrix)>,
}

impl FourierTable {
    pub fn of_measure(q: &WalkMeasure) -> Result<Self> {
        let n = q.modulus();
        let entries = enumerate_irreps(n)
            .into_iter()
            .map(|l| fourier_transform(q, &l).map(|t| (l, t)))
            .collect::<Result<_>>()?;
        Ok(Self { n, entries })
    }

    pub fn of_table(p: &DistributionTable) -> Result<Self> {
        let n = p.modulus();
        let entries = enumerate_irreps(n)
            .into_iter()
            .map(|l| table_transform(p, &l).map(|t| (l, t)))
            .collect::<Result<_>>()?;
        Ok(Self { n, entries })
    }

    /// Entrywise `Q^(rho)^k`; Hermitian entries go through their
    /// eigendecomposition, others through repeated squaring.
    pub fn power(&self, k: u32) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|(l, t)| {
                let p = if t.hermitian_defect() < 1e-12 {
                    t.hermitian_power(k)?
                } else {
                    matrix_power(t, k)
                };
                Ok((*l, p))
            })
            .collect::<Result<_>>()?;
        Ok(Self { n: self.n, entries })
    }

    /// `sum_rho d_rho ||T(rho)||^2`.
    pub fn plancherel_mass(&self) -> f64 {
        self.entries
            .iter()
            .map(|(l, t)| l.m as f64 * t.norm_sqr())
            .sum()
    }
}

fn matrix_power(t: &ComplexMatrix, mut k: u32) -> ComplexMatrix {
    let mut base = t.clone();
    let mut acc = ComplexMatrix::identity(t.dim());
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.matmul(&base);
        }
        base = base.matmul(&base);
        k >>= 1;
    }
    acc
}

/// `P(g) = n^-3 sum_rho d_rho tr(T(rho) rho(g)^*)`.
pub fn fourier_inversion(table: &FourierTable, g: &GroupElement) -> Result<f64> {
    if table.n != g.n {
        return Err(Error::ModulusMismatch {
            left: table.n,
            right: g.n,
        });
    }
    let expected = irrep_count(table.n) as usize;
    let distinct: BTreeSet<IrrepLabel> = table.entries.iter().map(|(l, _)| *l).collect();
    if distinct.len() != expected || table.entries.len() != expected {
        return Err(Error::IncompleteDual {
            expected,
            got: distinct.len(),
        });
    }
    let n3 = (table.n * table.n * table.n) as f64;
    let total: Complex64 = table
        .entries
        .iter()
        .map(|(l, t)| trace_against(l, t, g) * l.m as f64)
        .sum::<Complex64>()
        / n3;
    if total.im.abs() > 1e-9 {
        return Err(Error::Numerical(format!(
            "inversion at {g:?} has imaginary part {}",
            total.im
        )));
    }
    Ok(total.re)
}

/// Precomputed spectra for the upper bound lemma
/// `4 ||Q^{*k} - U||^2 <= sum_{rho != 1} d_rho ||Q^(rho)^k||^2`,
/// split into one-dimensional terms (I) and the rest (II).
#[derive(Clone, Debug)]
pub struct UpperBoundLemma {
    pub n: u64,
    one_dim: Vec<f64>,
    /// `(degree, eigenvalues)` of each higher-dimensional transform.
    higher: Vec<(u64, Vec<f64>)>,
}

impl UpperBoundLemma {
    pub fn new(n: u64) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "upper bound lemma needs odd n >= 3, got {n}"
            )));
        }
        let mut one_dim = Vec::new();
        let mut higher = Vec::new();
        for l in enumerate_irreps(n) {
            if l.m == 1 {
                if !l.is_trivial() {
                    let v = 0.5 * (TAU * l.a as f64 / n as f64).cos()
                        + 0.5 * (TAU * l.b as f64 / n as f64).cos();
                    one_dim.push(v);
                }
            } else {
                higher.push((l.m, qhat_closed_form(&l)?.hermitian_eigenvalues()?));
            }
        }
        Ok(Self { n, one_dim, higher })
    }

    /// `(term_I, term_II)` at step `k`.
    pub fn terms(&self, k: u64) -> (f64, f64) {
        let e = 2 * k as i32;
        let term_i = self.one_dim.iter().map(|v| v.powi(e)).sum();
        let term_ii = self
            .higher
            .iter()
            .map(|(m, vals)| *m as f64 * vals.iter().map(|v| v.powi(e)).sum::<f64>())
            .sum();
        (term_i, term_ii)
    }

    /// `1/2 sqrt(I + II)`, an upper bound on the total variation distance.
    pub fn tv_bound(&self, k: u64) -> f64 {
        let (a, b) = self.terms(k);
        0.5 * (a + b).sqrt()
    }
}

/// `(term_I, term_II)` of the upper bound lemma for `Q^{*k}` on `H(n)`.
pub fn ub_lemma_bound(n: u64, k: u64) -> Result<(f64, f64)> {
    Ok(UpperBoundLemma::new(n)?.terms(k))
}

pub fn write_irrep_table_csv<W: Write>(n: u64, mut w: W) -> Result<()> {
    writeln!(w, "m,a,b,c,dim")?;
    for l in enumerate_irreps(n) {
        writeln!(w, "{},{},{},{},{}", l.m, l.a, l.b, l.c, l.m)?;
    }
    Ok(())
}

pub fn write_bound_curve_csv<W: Write>(
    lemma: &UpperBoundLemma,
    ks: &[u64],
    mut w: W,
) -> Result<()> {
    writeln!(w, "n,k,term_I,term_II,bound_tv")?;
    for &k in ks {
        let (a, b) = lemma.terms(k);
        writeln!(
            w,
            "{},{},{:e},{:e},{:e}",
            lemma.n,
            k,
            a,
            b,
            0.5 * (a + b).sqrt()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{canonical_measure, convolution_power};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_element(rng: &mut ChaCha8Rng, n: u64) -> GroupElement {
        GroupElement::new(
            rng.gen_range(0..n) as i64,
            rng.gen_range(0..n) as i64,
            rng.gen_range(0..n) as i64,
            n,
        )
    }

    fn random_label(rng: &mut ChaCha8Rng, n: u64) -> IrrepLabel {
        let labels = enumerate_irreps(n);
        labels[rng.gen_range(0..labels.len())]
    }

    #[test]
    fn label_counts() {
        let l5 = enumerate_irreps(5);
        assert_eq!(l5.iter().filter(|l| l.m == 1).count(), 25);
        assert_eq!(l5.iter().filter(|l| l.m == 5).count(), 4);
        let l6 = enumerate_irreps(6);
        let per_m: Vec<usize> = [1, 2, 3, 6]
            .iter()
            .map(|&m| l6.iter().filter(|l| l.m == m).count())
            .collect();
        assert_eq!(per_m, vec![36, 9, 8, 2]);
        let sq: u64 = l6.iter().map(|l| l.m * l.m).sum();
        assert_eq!(sq, 216);
        assert_eq!(
            enumerate_irreps(1),
            vec![IrrepLabel {
                n: 1,
                m: 1,
                a: 0,
                b: 0,
                c: 0
            }]
        );
    }

    #[test]
    fn completeness_up_to_200() {
        for n in 1..=200 {
            assert_eq!(dimension_square_sum(n), n * n * n, "n = {n}");
        }
    }

    #[test]
    fn label_validation() {
        assert!(IrrepLabel::new(6, 4, 0, 0, 1).is_err());
        assert!(IrrepLabel::new(6, 2, 3, 0, 1).is_err());
        assert!(IrrepLabel::new(6, 3, 0, 0, 3).is_err());
        assert!(IrrepLabel::new(6, 1, 0, 0, 1).is_err());
        assert!(IrrepLabel::new(6, 3, 1, 1, 2).is_ok());
    }

    #[test]
    fn one_and_two_dimensional_forms() {
        let n = 8;
        let g = GroupElement::new(3, 5, 2, n);
        let l = IrrepLabel::new(n, 1, 3, 6, 0).unwrap();
        let r = irrep_matrix(&l, &g).unwrap();
        assert!((r[(0, 0)] - root_of_unity((3 * 3 + 6 * 5) % 8, 8)).norm() < 1e-15);

        // Degree two: q_n^(ax+by) q_2^z [[d(x), 1-d(x)], [(1-d(x)) q_2^y, d(x) q_2^y]].
        for (x, y, z) in [(0, 0, 0), (1, 0, 0), (2, 1, 1), (3, 3, 5), (4, 7, 2)] {
            let g = GroupElement::new(x, y, z, n);
            for (a, b) in [(0, 0), (1, 2), (3, 3)] {
                let l = IrrepLabel::new(n, 2, a, b, 1).unwrap();
                let r = irrep_matrix(&l, &g).unwrap();
                let pre = root_of_unity(((a as i64 * x + b as i64 * y) as u64) % n, n)
                    * Complex64::new(-1.0, 0.0).powi(z as i32);
                let qy = Complex64::new(-1.0, 0.0).powi(y as i32);
                let even = if x % 2 == 0 { 1.0 } else { 0.0 };
                let expected = [
                    [pre * even, pre * (1.0 - even)],
                    [pre * (1.0 - even) * qy, pre * even * qy],
                ];
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((r[(i, j)] - expected[i][j]).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn identity_maps_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [6, 12] {
            for _ in 0..20 {
                let l = random_label(&mut rng, n);
                let r = irrep_matrix(&l, &GroupElement::identity(n)).unwrap();
                assert!(r.max_abs_diff(&ComplexMatrix::identity(l.dim())) < 1e-15);
            }
        }
    }

    #[test]
    fn homomorphism_and_unitarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [6, 9, 12, 15] {
            for _ in 0..200 {
                let l = random_label(&mut rng, n);
                let g = random_element(&mut rng, n);
                let h = random_element(&mut rng, n);
                let lhs = irrep_matrix(&l, &g)
                    .unwrap()
                    .matmul(&irrep_matrix(&l, &h).unwrap());
                let rhs = irrep_matrix(&l, &g.mul(&h).unwrap()).unwrap();
                assert!(lhs.max_abs_diff(&rhs) < 1e-10);
                assert!(irrep_matrix(&l, &g).unwrap().unitary_defect() < 1e-10);
            }
        }
    }

    #[test]
    fn character_matches_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let n = [6u64, 8, 9, 12][rng.gen_range(0..4)];
            let l = random_label(&mut rng, n);
            let g = random_element(&mut rng, n);
            let tr = irrep_matrix(&l, &g).unwrap().trace();
            assert!((tr - character(&l, &g)).norm() < 1e-10);
        }
        let l = IrrepLabel::new(6, 2, 0, 0, 1).unwrap();
        assert_eq!(
            character(&l, &GroupElement::new(1, 0, 0, 6)),
            Complex64::new(0.0, 0.0)
        );
        assert!((character(&l, &GroupElement::identity(6)) - 2.0).norm() < 1e-15);
    }

    #[test]
    fn gram_is_identity() {
        for n in [1, 4, 5, 6] {
            let gram = character_gram(n, DEFAULT_GRAM_CAP).unwrap();
            assert_eq!(gram.size() as u64, irrep_count(n));
            assert!(gram.identity_defect() < 1e-9, "n = {n}");
        }
        assert_eq!(character_gram(5, 30).unwrap().size(), 29);
        assert_eq!(character_gram(6, 30).unwrap().size(), 55);
        assert!(matches!(
            character_gram(31, 30),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn canonical_transform_small_degrees() {
        let n = 10;
        let q = canonical_measure(n).unwrap();
        let c = |t: u64| (TAU * t as f64 / n as f64).cos();
        for a in 0..n {
            for b in 0..n {
                let l = IrrepLabel::new(n, 1, a, b, 0).unwrap();
                let t = fourier_transform(&q, &l).unwrap();
                assert!((t[(0, 0)].re - (0.5 * c(a) + 0.5 * c(b))).abs() < 1e-15);
                assert!(t[(0, 0)].im.abs() < 1e-15);
            }
        }
        for a in 0..5 {
            for b in 0..5 {
                let l = IrrepLabel::new(n, 2, a, b, 1).unwrap();
                let t = fourier_transform(&q, &l).unwrap();
                let expected = [[0.5 * c(b), 0.5 * c(a)], [0.5 * c(a), -0.5 * c(b)]];
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((t[(i, j)] - expected[i][j]).norm() < 1e-15);
                    }
                }
            }
        }
        let trivial = IrrepLabel::new(n, 1, 0, 0, 0).unwrap();
        assert!((fourier_transform(&q, &trivial).unwrap()[(0, 0)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn closed_form_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        while checked < 50 {
            let n = [9u64, 12, 15][rng.gen_range(0..3)];
            let l = random_label(&mut rng, n);
            if l.m < 3 {
                assert!(qhat_closed_form(&l).is_err());
                continue;
            }
            let q = canonical_measure(n).unwrap();
            let direct = fourier_transform(&q, &l).unwrap();
            let closed = qhat_closed_form(&l).unwrap();
            assert!(direct.max_abs_diff(&closed) < 1e-12);
            assert!(closed.hermitian_defect() < 1e-12);
            checked += 1;
        }
    }

    #[test]
    fn prime_case_is_harper_matrix() {
        let p = 7;
        for xi in 1..p {
            let l = IrrepLabel::new(p, p, 0, 0, xi).unwrap();
            let t = qhat_closed_form(&l).unwrap();
            for j in 0..p as usize {
                let d = 0.5 * (TAU * (xi as usize * j) as f64 / p as f64).cos();
                assert!((t[(j, j)].re - d).abs() < 1e-14);
                assert!((t[(j, (j + 1) % 7)] - 0.25).norm() < 1e-15);
                assert!((t[((j + 1) % 7, j)] - 0.25).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn inversion_recovers_measures() {
        let n = 5;
        let q = canonical_measure(n).unwrap();
        let table = FourierTable::of_measure(&q).unwrap();
        for (s, _) in q.support() {
            assert!((fourier_inversion(&table, s).unwrap() - 0.25).abs() < 1e-12);
        }
        assert!(
            fourier_inversion(&table, &GroupElement::identity(n))
                .unwrap()
                .abs()
                < 1e-12
        );

        let uniform = FourierTable::of_table(&DistributionTable::uniform(n)).unwrap();
        for g in GroupElement::all(n) {
            assert!((fourier_inversion(&uniform, &g).unwrap() - 1.0 / 125.0).abs() < 1e-12);
        }

        let powered = table.power(10).unwrap();
        let exact = convolution_power(&q, 10);
        for g in GroupElement::all(n) {
            assert!((fourier_inversion(&powered, &g).unwrap() - exact.get(&g)).abs() < 1e-10);
        }

        let mut partial = table.clone();
        partial.entries.pop();
        assert!(matches!(
            fourier_inversion(&partial, &GroupElement::identity(n)),
            Err(Error::IncompleteDual { .. })
        ));
    }

    #[test]
    fn plancherel_consistency() {
        let n = 5;
        let q = canonical_measure(n).unwrap();
        let table = FourierTable::of_measure(&q).unwrap();
        for k in 0..=20u32 {
            let lhs = table.power(k).unwrap().plancherel_mass();
            let rhs = 125.0 * convolution_power(&q, k as usize).collision_probability();
            assert!((lhs - rhs).abs() < 1e-8 * 125.0, "k = {k}");
        }
    }

    #[test]
    fn upper_bound_lemma_terms() {
        let (a, b) = ub_lemma_bound(5, 0).unwrap();
        assert!((a + b - 124.0).abs() < 1e-9);
        assert!(ub_lemma_bound(6, 3).is_err());

        let lemma = UpperBoundLemma::new(5).unwrap();
        let tv = convolution_power(&canonical_measure(5).unwrap(), 50).tv_distance();
        let (a, b) = lemma.terms(50);
        assert!(4.0 * tv * tv <= a + b);

        // The (0, ±1), (±1, 0) family contributes 4 cos(pi/n)^(4k), i.e.
        // (1 - pi^2/n^2 + O(n^-4))^(2k). For odd n it is not the largest part
        // of term I: a, b in {(n-1)/2, (n+1)/2} give -cos(pi/n), whose
        // (2k)-th power decays at half the rate and dominates at large k.
        let nf = 101.0f64;
        let steps = 2 * 101 * 101 / 2;
        let axis = 4.0 * (0.5 + 0.5 * (TAU / nf).cos()).powi(steps);
        let approx = 4.0 * (1.0 - std::f64::consts::PI.powi(2) / (nf * nf)).powi(steps);
        assert!((axis / approx - 1.0).abs() < 0.05);

        let n = 15u64;
        let nf = n as f64;
        let lemma = UpperBoundLemma::new(n).unwrap();
        let k = 20 * n * n;
        let (a, _) = lemma.terms(k);
        let antipodal = 4.0 * (std::f64::consts::PI / nf).cos().powi(2 * k as i32);
        assert!((a / antipodal - 1.0).abs() < 1e-3);
    }

    #[test]
    fn hermitian_transforms_of_symmetric_measure() {
        let n = 12;
        let q = canonical_measure(n).unwrap();
        for l in enumerate_irreps(n) {
            assert!(fourier_transform(&q, &l).unwrap().hermitian_defect() < 1e-12);
        }
    }

    #[test]
    fn csv_exports() {
        let mut buf = Vec::new();
        write_irrep_table_csv(3, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("m,a,b,c,dim"));
        assert_eq!(text.lines().count(), 1 + 11);
        assert!(text.contains("\n3,0,0,2,3\n"));

        let lemma = UpperBoundLemma::new(3).unwrap();
        let mut buf = Vec::new();
        write_bound_curve_csv(&lemma, &[0, 1], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("n,k,term_I,term_II,bound_tv"));
        assert_eq!(text.lines().count(), 3);
    }
}
