//! Harper matrices `M(n, xi, alpha)` and their spectra.
//!
//! `M = diag(d) + A/4` where `A` is the adjacency matrix of the `n`-cycle
//! (neighbours and the two corners). The cosine family has
//! `d_j = cos(2 pi xi (alpha + j) / n) / 2`; `M(n, xi, 0)` is the transform
//! of the walk measure at the degree-`n` representation `(0, 0, xi)` when
//! `n` is prime.

use std::f64::consts::TAU;
use std::io::Write;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SymmetricEigen;

/// Residual budget for reported eigenpairs.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Tolerance for spectral inclusions.
pub const INCLUSION_TOLERANCE: f64 = 1e-8;
/// Tolerance for the negation symmetry of even `n`.
pub const NEGATION_TOLERANCE: f64 = 1e-10;

/// `cos(2 pi xi (alpha + j) / n)`, with `xi j` reduced mod `n` in integers and
/// the phase folded into `[0, n/2]` so that `xi` and `n - xi` give bitwise
/// identical values at `alpha = 0`.
pub fn cosine_profile_value(n: usize, xi: u64, alpha: f64, j: usize) -> f64 {
    let nf = n as f64;
    let base = ((xi as u128 * j as u128) % n as u128) as f64;
    let t = (base + xi as f64 * alpha).rem_euclid(nf);
    let t = t.min(nf - t);
    (TAU * t / nf).cos()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosineParams {
    pub xi: u64,
    pub alpha: f64,
}

/// Symmetric `n x n` matrix with diagonal `d` and `1/4` couplings on the cycle.
#[derive(Clone, Debug, PartialEq)]
pub struct HarperMatrix {
    diagonal: Vec<f64>,
    params: Option<CosineParams>,
}

impl HarperMatrix {
    pub fn n(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn params(&self) -> Option<CosineParams> {
        self.params
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut a = vec![0.0; n * n];
        for j in 0..n {
            a[j * n + j] = self.diagonal[j];
            let next = (j + 1) % n;
            a[j * n + next] = 0.25;
            a[next * n + j] = 0.25;
        }
        a
    }

    /// `M v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|j| self.diagonal[j] * v[j] + 0.25 * (v[(j + 1) % n] + v[(j + n - 1) % n]))
            .collect()
    }

    /// Eigenvalues only, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = SymmetricEigen::new(&self.to_dense(), self.n(), false)?;
        let mut values = eig.values;
        values.reverse();
        Ok(values)
    }

    /// Full spectrum with per-pair residuals.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let n = self.n();
        let eig = SymmetricEigen::new(&self.to_dense(), n, true)?;
        let mut values = Vec::with_capacity(n);
        let mut residuals = Vec::with_capacity(n);
        for j in (0..n).rev() {
            let v = eig.vector(j).expect("vectors were requested");
            let mv = self.apply(&v);
            let beta = eig.values[j];
            let r = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - beta * b).powi(2))
                .sum::<f64>()
                .sqrt();
            values.push(beta);
            residuals.push(r);
        }
        Ok(Spectrum { values, residuals })
    }
}

/// The cosine-family matrix `M(n, xi, alpha) = (D + P) / 2`.
pub fn build_harper(n: usize, xi: u64, alpha: f64) -> Result<HarperMatrix> {
    check_size(n)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument("alpha must be finite".into()));
    }
    let diagonal = (0..n)
        .map(|j| 0.5 * cosine_profile_value(n, xi, alpha, j))
        .collect();
    Ok(HarperMatrix {
        diagonal,
        params: Some(CosineParams { xi, alpha }),
    })
}

/// A Harper-type matrix with an arbitrary diagonal in `[-1/2, 1/2]`.
pub fn build_general(n: usize, diagonal: &[f64]) -> Result<HarperMatrix> {
    check_size(n)?;
    if diagonal.len() != n {
        return Err(Error::InvalidArgument(format!(
            "diagonal has {} entries, expected {n}",
            diagonal.len()
        )));
    }
    if let Some((index, &value)) = diagonal.iter().enumerate().find(|(_, d)| !(d.abs() <= 0.5)) {
        return Err(Error::DiagonalOutOfRange { index, value });
    }
    Ok(HarperMatrix {
        diagonal: diagonal.to_vec(),
        params: None,
    })
}

fn check_size(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "Harper matrices need n >= 3 (neighbour and corner entries collide), got {n}"
        )));
    }
    Ok(())
}

/// Eigenvalues in descending order with residual norms `||M v - beta v||`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl Spectrum {
    pub fn top(&self) -> f64 {
        self.values[0]
    }

    pub fn bottom(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,eigenvalue")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{:.17e}", i, v)?;
        }
        Ok(())
    }
}

/// `max(beta_1, -beta_n)` of `M(xi)`.
pub fn beta_star(n: usize, xi: u64) -> Result<f64> {
    if xi == 0 || xi as usize >= n {
        return Err(Error::InvalidArgument(format!("xi must lie in 1..{n}")));
    }
    let vals = build_harper(n, xi, 0.0)?.eigenvalues()?;
    Ok(vals[0].max(-vals[n - 1]))
}

/// Largest gap between two equally long spectra, both sorted the same way.
pub fn multiset_discrepancy(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Matches every value of `small` to the nearest unmatched value of `large`
/// (processing `small` in ascending order) and returns the worst distance.
pub fn inclusion_discrepancy(small: &[f64], large: &[f64]) -> f64 {
    if small.len() > large.len() {
        return f64::INFINITY;
    }
    let mut small = small.to_vec();
    let mut large = large.to_vec();
    small.sort_by(f64::total_cmp);
    large.sort_by(f64::total_cmp);
    let mut used = vec![false; large.len()];
    let mut worst: f64 = 0.0;
    for s in small {
        let pos = large.partition_point(|&x| x < s);
        let mut best: Option<(usize, f64)> = None;
        let mut consider = |i: usize| {
            if !used[i] {
                let d = (large[i] - s).abs();
                if best.map_or(true, |(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
        };
        // Nearest unmatched on each side of the insertion point.
        if let Some(i) = (pos..large.len()).find(|&i| !used[i]) {
            consider(i);
        }
        if let Some(i) = (0..pos).rev().find(|&i| !used[i]) {
            consider(i);
        }
        match best {
            Some((i, d)) => {
                used[i] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClauseCheck {
    pub holds: bool,
    pub max_discrepancy: f64,
}

impl ClauseCheck {
    fn within(discrepancy: f64, tol: f64) -> Self {
        Self {
            holds: discrepancy <= tol,
            max_discrepancy: discrepancy,
        }
    }
}

/// `M(n, xi, 0)` and `M(n, n - xi, 0)` must be the same matrix entry for
/// entry; the discrepancy reported is the larger of the entrywise and the
/// spectral differences.
pub fn symmetry_clause(n: usize, xi: u64) -> Result<ClauseCheck> {
    if xi as usize >= n {
        return Err(Error::InvalidArgument(format!("xi must be below {n}")));
    }
    let a = build_harper(n, xi, 0.0)?;
    let b = build_harper(n, n as u64 - xi, 0.0)?;
    let entrywise = a
        .diagonal()
        .iter()
        .zip(b.diagonal())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let spectral = multiset_discrepancy(&a.eigenvalues()?, &b.eigenvalues()?);
    Ok(ClauseCheck {
        holds: entrywise == 0.0 && spectral == 0.0,
        max_discrepancy: entrywise.max(spectral),
    })
}

/// `S(n, xi, alpha) ⊆ S(k n, k xi, alpha)`.
pub fn juxtaposition_clause(n: usize, xi: u64, k: usize, alpha: f64) -> Result<ClauseCheck> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let small = build_harper(n, xi, alpha)?.eigenvalues()?;
    let large = build_harper(k * n, k as u64 * xi, alpha)?.eigenvalues()?;
    Ok(ClauseCheck::within(
        inclusion_discrepancy(&small, &large),
        INCLUSION_TOLERANCE,
    ))
}

/// Even `n`: `S(n, xi, alpha) = -S(n, xi, alpha + n / (2 xi))`.
pub fn negation_clause(n: usize, xi: u64, alpha: f64) -> Result<ClauseCheck> {
    if n % 2 != 0 || xi == 0 {
        return Err(Error::InvalidArgument(
            "negation symmetry needs even n and xi >= 1".into(),
        ));
    }
    let shift = n as f64 / (2.0 * xi as f64);
    let s = build_harper(n, xi, alpha)?.eigenvalues()?;
    let t: Vec<f64> = build_harper(n, xi, alpha + shift)?
        .eigenvalues()?
        .into_iter()
        .map(|v| -v)
        .collect();
    Ok(ClauseCheck::within(
        multiset_discrepancy(&s, &t),
        NEGATION_TOLERANCE,
    ))
}

/// The `2n x 2n` matrix `M(2n, 2 xi, alpha + n / (2 xi))` whose negated
/// spectrum contains that of `M(n, xi, alpha)` for odd `n`.
pub fn doubled_shifted_matrix(n: usize, xi: u64, alpha: f64) -> Result<HarperMatrix> {
    if xi == 0 {
        return Err(Error::InvalidArgument("xi must be positive".into()));
    }
    build_harper(2 * n, 2 * xi, alpha + n as f64 / (2.0 * xi as f64))
}

/// Odd `n`: `S(n, xi, alpha) ⊆ -S(2n, 2 xi, alpha + n / (2 xi))`.
pub fn doubling_clause(n: usize, xi: u64, alpha: f64) -> Result<ClauseCheck> {
    if n % 2 == 0 {
        return Err(Error::InvalidArgument(
            "doubled inclusion applies to odd n".into(),
        ));
    }
    let small = build_harper(n, xi, alpha)?.eigenvalues()?;
    let large: Vec<f64> = doubled_shifted_matrix(n, xi, alpha)?
        .eigenvalues()?
        .into_iter()
        .map(|v| -v)
        .collect();
    Ok(ClauseCheck::within(
        inclusion_discrepancy(&small, &large),
        INCLUSION_TOLERANCE,
    ))
}

/// Outcome of the four symmetry/inclusion clauses for one configuration.
/// Clause (a) runs at `alpha = 0`; (c) only for even `n`, (d) only for odd.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryReport {
    pub n: usize,
    pub xi: u64,
    pub k: usize,
    pub alpha: f64,
    pub symmetry: ClauseCheck,
    pub juxtaposition: ClauseCheck,
    pub negation: Option<ClauseCheck>,
    pub doubling: Option<ClauseCheck>,
}

impl SymmetryReport {
    pub fn all_hold(&self) -> bool {
        self.symmetry.holds
            && self.juxtaposition.holds
            && self.negation.map_or(true, |c| c.holds)
            && self.doubling.map_or(true, |c| c.holds)
    }
}

pub fn check_prop41(n: usize, xi: u64, k: usize, alpha: f64) -> Result<SymmetryReport> {
    if xi == 0 || xi as usize >= n {
        return Err(Error::InvalidArgument(format!("xi must lie in 1..{n}")));
    }
    let even = n % 2 == 0;
    Ok(SymmetryReport {
        n,
        xi,
        k,
        alpha,
        symmetry: symmetry_clause(n, xi)?,
        juxtaposition: juxtaposition_clause(n, xi, k, alpha)?,
        negation: if even {
            Some(negation_clause(n, xi, alpha)?)
        } else {
            None
        },
        doubling: if even {
            None
        } else {
            Some(doubling_clause(n, xi, alpha)?)
        },
    })
}

/// `||F_n M(1) - M(1) F_n||_F` with `(F_n)_{jk} = exp(2 pi i j k / n) / sqrt(n)`.
pub fn dft_commutator(n: usize) -> Result<f64> {
    let m = build_harper(n, 1, 0.0)?;
    let d = m.diagonal();
    let scale = 1.0 / (n as f64).sqrt();
    let f =
        |j: usize, k: usize| Complex64::from_polar(scale, TAU * ((j * k) % n) as f64 / n as f64);
    let mut total = 0.0;
    for j in 0..n {
        for k in 0..n {
            // (F M)_{jk}: column k of M has entries at k-1, k, k+1.
            let fm = f(j, (k + n - 1) % n) * 0.25 + f(j, k) * d[k] + f(j, (k + 1) % n) * 0.25;
            let mf = f((j + n - 1) % n, k) * 0.25 + f(j, k) * d[j] + f((j + 1) % n, k) * 0.25;
            total += (fm - mf).norm_sqr();
        }
    }
    Ok(total.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub xi: u64,
    pub beta_top: f64,
    pub beta_bottom: f64,
    pub beta_star: f64,
    pub max_residual: f64,
}

/// Extreme eigenvalues of `M(n, xi, alpha)` over a range of `xi`, plus the
/// full spectrum of `M(n, 1, alpha)`.
#[derive(Clone, Debug)]
pub struct SpectrumSweep {
    pub n: usize,
    pub alpha: f64,
    pub rows: Vec<SweepRow>,
    pub full: Spectrum,
}

impl SpectrumSweep {
    pub fn max_residual(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.max_residual)
            .fold(self.full.max_residual(), f64::max)
    }

    pub fn write_sweep_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "xi,beta_top,beta_bottom,beta_star")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{:.17e},{:.17e},{:.17e}",
                r.xi, r.beta_top, r.beta_bottom, r.beta_star
            )?;
        }
        Ok(())
    }
}

pub fn spectrum_sweep(n: usize, xis: RangeInclusive<u64>, alpha: f64) -> Result<SpectrumSweep> {
    let xis: Vec<u64> = xis.collect();
    let rows = xis
        .par_iter()
        .map(|&xi| {
            let s = build_harper(n, xi, alpha)?.spectrum()?;
            Ok(SweepRow {
                xi,
                beta_top: s.top(),
                beta_bottom: s.bottom(),
                beta_star: s.top().max(-s.bottom()),
                max_residual: s.max_residual(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let full = build_harper(n, 1, alpha)?.spectrum()?;
    Ok(SpectrumSweep {
        n,
        alpha,
        rows,
        full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_period_diagonal() {
        let m = build_harper(4, 1, 0.0).unwrap();
        let expected = [0.5, 0.0, -0.5, 0.0];
        for (d, e) in m.diagonal().iter().zip(expected) {
            assert!((d - e).abs() < 1e-16);
        }
        assert!(build_harper(2, 1, 0.0).is_err());
    }

    #[test]
    fn three_by_three_layout() {
        let m = build_harper(3, 1, 0.0).unwrap();
        let a = m.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(a[i * 3 + j], 0.25);
                }
            }
        }
        assert_eq!(a[0], 0.5);
        assert!((a[4] + 0.25).abs() < 1e-15);
        assert!((a[8] + 0.25).abs() < 1e-15);
    }

    /// Roots of det(M - t I) for the n = 3, xi = 1 matrix
    /// [[1/2, 1/4, 1/4], [1/4, -1/4, 1/4], [1/4, 1/4, -1/4]].
    /// Expanding: the vector (0, 1, -1) gives -1/2 exactly; the remaining
    /// quadratic on span{(1,0,0), (0,1,1)/sqrt 2} is
    /// [[1/2, sqrt(2)/4], [sqrt(2)/4, 0]], with roots (1/2 ± sqrt(1/4 + 1/2)) / 2.
    #[test]
    fn n3_characteristic_roots() {
        let vals = build_harper(3, 1, 0.0).unwrap().eigenvalues().unwrap();
        let disc = (0.25f64 + 0.5).sqrt();
        let expected = [(0.5 + disc) / 2.0, (0.5 - disc) / 2.0, -0.5];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14, "{v} vs {e}");
        }
    }

    #[test]
    fn zero_diagonal_is_circulant() {
        let m = build_general(6, &[0.0; 6]).unwrap();
        let vals = m.eigenvalues().unwrap();
        let expected = [0.5, 0.25, 0.25, -0.25, -0.25, -0.5];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14);
        }
        let n = 11;
        let mut circ: Vec<f64> = (0..n)
            .map(|j| 0.5 * (TAU * j as f64 / n as f64).cos())
            .collect();
        circ.sort_by(|a, b| b.total_cmp(a));
        let vals = build_general(n, &vec![0.0; n])
            .unwrap()
            .eigenvalues()
            .unwrap();
        assert!(multiset_discrepancy(&vals, &circ) < 1e-14);
    }

    #[test]
    fn general_diagonal_validation() {
        let n = 16;
        let cos: Vec<f64> = (0..n)
            .map(|j| 0.5 * cosine_profile_value(n, 3, 0.0, j))
            .collect();
        let general = build_general(n, &cos).unwrap();
        assert_eq!(
            general.diagonal(),
            build_harper(n, 3, 0.0).unwrap().diagonal()
        );
        let two: Vec<f64> = (0..n)
            .map(|j| {
                let t = TAU * j as f64 / n as f64;
                0.25 * t.cos() + 0.25 * (2.0 * t).cos()
            })
            .collect();
        assert!(build_general(n, &two).is_ok());
        let mut bad = two.clone();
        bad[5] = 0.6;
        assert!(matches!(
            build_general(n, &bad),
            Err(Error::DiagonalOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn trace_and_residuals() {
        let n = 150;
        for xi in 1..75 {
            let m = build_harper(n, xi, 0.0).unwrap();
            let s = m.spectrum().unwrap();
            let trace: f64 = m.diagonal().iter().sum();
            let sum: f64 = s.values.iter().sum();
            assert!((trace - sum).abs() < 1e-9);
            assert!(s.max_residual() < RESIDUAL_TOLERANCE);
            assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
            // Gershgorin and the open interval (-1, 1).
            assert!(s.top() < 1.0 && s.bottom() > -1.0);
        }
    }

    #[test]
    fn gershgorin_for_general_profiles() {
        let n = 40;
        let d: Vec<f64> = (0..n)
            .map(|j| 0.5 * ((j * j) as f64 * 0.37).sin())
            .collect();
        let m = build_general(n, &d).unwrap();
        let vals = m.eigenvalues().unwrap();
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min) - 0.5;
        let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 0.5;
        assert!(vals.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
    }

    #[test]
    fn beta_star_is_symmetric() {
        let n = 150;
        for xi in 1..n as u64 {
            assert_eq!(
                beta_star(n, xi).unwrap(),
                beta_star(n, n as u64 - xi).unwrap()
            );
        }
        assert!(beta_star(n, 1).unwrap() < 1.0);
        assert!(beta_star(n, 0).is_err());
    }

    #[test]
    fn row_sums_of_shifted_matrix() {
        let m = build_harper(150, 1, 0.0).unwrap();
        for d in m.diagonal() {
            let row = 0.5 + d + 0.5;
            assert!((0.5..=1.5).contains(&row));
        }
    }

    #[test]
    fn symmetry_examples() {
        let a = symmetry_clause(9, 2).unwrap();
        assert!(a.holds && a.max_discrepancy == 0.0);
        assert_eq!(
            build_harper(9, 2, 0.0).unwrap().eigenvalues().unwrap(),
            build_harper(9, 7, 0.0).unwrap().eigenvalues().unwrap()
        );
        assert!(juxtaposition_clause(5, 1, 3, 0.0).unwrap().holds);
        assert!(doubling_clause(7, 1, 0.0).unwrap().holds);
        assert!(negation_clause(8, 3, 0.3).unwrap().holds);
        assert!(negation_clause(7, 3, 0.0).is_err());
        assert!(doubling_clause(8, 3, 0.0).is_err());
        let r = check_prop41(10, 3, 2, 0.25).unwrap();
        assert!(r.all_hold() && r.negation.is_some() && r.doubling.is_none());
    }

    #[test]
    fn inclusion_matching_is_greedy_nearest() {
        assert_eq!(
            inclusion_discrepancy(&[1.0, 2.0], &[0.0, 1.0, 2.0, 3.0]),
            0.0
        );
        assert_eq!(inclusion_discrepancy(&[1.0, 1.0], &[1.0, 5.0]), 4.0);
        assert!(inclusion_discrepancy(&[1.0, 2.0, 3.0], &[1.0]).is_infinite());
    }

    #[test]
    fn dft_commutes_with_m1() {
        assert!(dft_commutator(3).unwrap() < 1e-13);
        assert!(dft_commutator(8).unwrap() < 1e-12);
        assert!(dft_commutator(150).unwrap() < 1e-10);
    }

    #[test]
    fn sweep_shape() {
        let sweep = spectrum_sweep(30, 1..=29, 0.0).unwrap();
        assert_eq!(sweep.rows.len(), 29);
        assert_eq!(sweep.full.values.len(), 30);
        for r in &sweep.rows {
            let mirror = &sweep.rows[(30 - r.xi - 1) as usize];
            assert_eq!(r.beta_top, mirror.beta_top);
            assert_eq!(r.beta_bottom, mirror.beta_bottom);
        }
        let mut buf = Vec::new();
        sweep.write_sweep_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next(),
            Some("xi,beta_top,beta_bottom,beta_star")
        );
        assert_eq!(text.lines().count(), 30);
    }
}
