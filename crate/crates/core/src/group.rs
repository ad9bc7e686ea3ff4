//! Arithmetic of the Heisenberg group `H(n)` and exact walk distributions.
//!
//! An element `(x, y, z)` stands for the upper unitriangular matrix
//! `[[1, x, z], [0, 1, y], [0, 0, 1]]` with entries mod `n`, so
//! `(x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y')`.
//!
//! Dense tables index elements as `x + n*y + n^2*z`; this layout is what the
//! CSV and binary exports write, so tables are byte-stable across runs.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Magic bytes of the binary table format.
pub const BINARY_MAGIC: &[u8; 4] = b"HSB1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub n: u64,
}

impl GroupElement {
    /// Builds an element, reducing every coordinate mod `n`.
    pub fn new(x: i64, y: i64, z: i64, n: u64) -> Self {
        assert!(n >= 1, "modulus must be positive");
        let m = n as i64;
        Self {
            x: x.rem_euclid(m) as u64,
            y: y.rem_euclid(m) as u64,
            z: z.rem_euclid(m) as u64,
            n,
        }
    }

    pub fn identity(n: u64) -> Self {
        Self::new(0, 0, 0, n)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.y == 0 && self.z == 0
    }

    /// Flat index `x + n*y + n^2*z`.
    pub fn index(&self) -> usize {
        let n = self.n as usize;
        self.x as usize + n * (self.y as usize + n * self.z as usize)
    }

    pub fn from_index(index: usize, n: u64) -> Self {
        let nn = n as usize;
        Self {
            x: (index % nn) as u64,
            y: ((index / nn) % nn) as u64,
            z: (index / (nn * nn)) as u64,
            n,
        }
    }

    /// Group product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::ModulusMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.n;
        Self {
            x: (self.x + other.x) % n,
            y: (self.y + other.y) % n,
            z: (self.z + other.z + (self.x * other.y) % n) % n,
            n,
        }
    }

    /// Inverse `(-x, -y, -z + x y)`.
    pub fn inv(&self) -> Self {
        let n = self.n;
        Self {
            x: (n - self.x) % n,
            y: (n - self.y) % n,
            z: ((n - self.z) % n + (self.x * self.y) % n) % n,
            n,
        }
    }

    /// Iterates over all `n^3` elements in index order.
    pub fn all(n: u64) -> impl Iterator<Item = Self> {
        let size = (n * n * n) as usize;
        (0..size).map(move |i| Self::from_index(i, n))
    }
}

/// A finitely supported probability measure on `H(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkMeasure {
    n: u64,
    support: Vec<(GroupElement, f64)>,
}

impl WalkMeasure {
    pub fn new(n: u64, support: Vec<(GroupElement, f64)>) -> Result<Self> {
        if let Some((g, _)) = support.iter().find(|(g, _)| g.n != n) {
            return Err(Error::ModulusMismatch {
                left: n,
                right: g.n,
            });
        }
        if support.iter().any(|&(_, w)| !(w >= 0.0)) {
            return Err(Error::InvalidArgument("negative or NaN weight".into()));
        }
        let total: f64 = support.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { n, support })
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn support(&self) -> &[(GroupElement, f64)] {
        &self.support
    }

    /// Probability of `g` (zero off the support).
    pub fn weight(&self, g: &GroupElement) -> f64 {
        self.support
            .iter()
            .filter(|(h, _)| h == g)
            .map(|&(_, w)| w)
            .sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.support
            .iter()
            .all(|(g, w)| (self.weight(&g.inv()) - w).abs() < 1e-15)
    }
}

/// The uniform measure on `{(±1, 0, 0), (0, ±1, 0)}`.
pub fn canonical_measure(n: u64) -> Result<WalkMeasure> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "canonical measure needs n >= 3 (four distinct generators), got {n}"
        )));
    }
    let gens = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    let support = gens
        .iter()
        .map(|&(x, y)| (GroupElement::new(x, y, 0, n), 0.25))
        .collect();
    WalkMeasure::new(n, support)
}

/// A dense probability table over all `n^3` elements.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionTable {
    n: u64,
    probs: Vec<f64>,
}

impl DistributionTable {
    pub fn from_vec(n: u64, probs: Vec<f64>) -> Result<Self> {
        let expected = (n * n * n) as usize;
        if probs.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "table length {} does not match n^3 = {expected}",
                probs.len()
            )));
        }
        Ok(Self { n, probs })
    }

    pub fn point_mass(g: GroupElement) -> Self {
        let n = g.n;
        let mut probs = vec![0.0; (n * n * n) as usize];
        probs[g.index()] = 1.0;
        Self { n, probs }
    }

    pub fn uniform(n: u64) -> Self {
        let size = (n * n * n) as usize;
        Self {
            n,
            probs: vec![1.0 / size as f64; size],
        }
    }

    pub fn from_measure(q: &WalkMeasure) -> Self {
        let n = q.modulus();
        let mut probs = vec![0.0; (n * n * n) as usize];
        for (g, w) in q.support() {
            probs[g.index()] += w;
        }
        Self { n, probs }
    }

    pub fn modulus(&self) -> u64 {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, g: &GroupElement) -> f64 {
        self.probs[g.index()]
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `1/2 sum_g |P(g) - 1/n^3|`.
    pub fn tv_distance(&self) -> f64 {
        let u = 1.0 / self.probs.len() as f64;
        0.5 * self.probs.iter().map(|p| (p - u).abs()).sum::<f64>()
    }

    /// Law of the central coordinate `z`.
    pub fn z_marginal(&self) -> Vec<f64> {
        let n = self.n as usize;
        self.probs
            .chunks(n * n)
            .map(|plane| plane.iter().sum())
            .collect()
    }

    /// Law of the `x` coordinate.
    pub fn x_marginal(&self) -> Vec<f64> {
        let n = self.n as usize;
        let mut out = vec![0.0; n];
        for (i, p) in self.probs.iter().enumerate() {
            out[i % n] += p;
        }
        out
    }

    /// `sum_g P(g)^2`.
    pub fn collision_probability(&self) -> f64 {
        self.probs.iter().map(|p| p * p).sum()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y,z,prob")?;
        for (i, p) in self.probs.iter().enumerate() {
            let g = GroupElement::from_index(i, self.n);
            writeln!(w, "{},{},{},{:e}", g.x, g.y, g.z, p)?;
        }
        Ok(())
    }

    /// Little-endian: magic `HSB1`, `u32` modulus, `u64` length, then `f64`s.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let n = u32::try_from(self.n)
            .map_err(|_| Error::InvalidArgument("modulus does not fit in u32".into()))?;
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&n.to_le_bytes())?;
        w.write_all(&(self.probs.len() as u64).to_le_bytes())?;
        for p in &self.probs {
            w.write_all(&p.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..4] != BINARY_MAGIC {
            return Err(Error::Parse("bad magic, expected HSB1".into()));
        }
        let n = u32::from_le_bytes(header[4..8].try_into().unwrap()) as u64;
        let len = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
        let mut probs = Vec::with_capacity(len);
        let mut buf = [0u8; 8];
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            probs.push(f64::from_le_bytes(buf));
        }
        Self::from_vec(n, probs)
    }
}

/// One walk step applied to `p`: the new generator multiplies on the left,
/// `(Q * P)(g) = sum_s Q(s) P(s^{-1} g)`.
///
/// Every output cell sums the support in stored order, so the result does not
/// depend on how rayon splits the work.
pub fn convolve(p: &DistributionTable, q: &WalkMeasure) -> Result<DistributionTable> {
    if p.n != q.modulus() {
        return Err(Error::ModulusMismatch {
            left: p.n,
            right: q.modulus(),
        });
    }
    let n = p.n;
    let inverses: Vec<(GroupElement, f64)> =
        q.support().iter().map(|&(s, w)| (s.inv(), w)).collect();
    let mut out = vec![0.0; p.probs.len()];
    out.par_iter_mut().enumerate().for_each(|(i, cell)| {
        let g = GroupElement::from_index(i, n);
        let mut acc = 0.0;
        for (s_inv, w) in &inverses {
            acc += w * p.probs[s_inv.mul_unchecked(&g).index()];
        }
        *cell = acc;
    });
    Ok(DistributionTable { n, probs: out })
}

/// Successive convolution powers `Q^{*0}, Q^{*1}, ...`.
pub struct ConvolutionPowers<'a> {
    measure: &'a WalkMeasure,
    current: Option<DistributionTable>,
}

impl<'a> ConvolutionPowers<'a> {
    pub fn new(measure: &'a WalkMeasure) -> Self {
        Self {
            measure,
            current: None,
        }
    }
}

impl Iterator for ConvolutionPowers<'_> {
    type Item = DistributionTable;

    fn next(&mut self) -> Option<DistributionTable> {
        let next = match &self.current {
            None => DistributionTable::point_mass(GroupElement::identity(self.measure.modulus())),
            Some(t) => convolve(t, self.measure).expect("moduli agree by construction"),
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

/// Exact `Q^{*k}`, starting from the point mass at the identity.
pub fn convolution_power(q: &WalkMeasure, k: usize) -> DistributionTable {
    ConvolutionPowers::new(q)
        .nth(k)
        .expect("iterator is infinite")
}

/// `1/2 sum_g |P(g) - U(g)|`.
pub fn tv_distance(p: &DistributionTable) -> f64 {
    p.tv_distance()
}
