use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::eigen::SymmetricEigen;
use crate::error::Result;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(dim: usize, real: &[f64]) -> Self {
        assert_eq!(real.len(), dim * dim);
        Self {
            dim,
            data: real.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `tr(self * other^*)`.
    pub fn trace_with_adjoint(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// Squared Frobenius norm `tr(M M^*)`.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitary_defect(&self) -> f64 {
        self.matmul(&self.adjoint())
            .max_abs_diff(&Self::identity(self.dim))
    }

    /// The real symmetric `2d x 2d` matrix `[[Re H, -Im H], [Im H, Re H]]`.
    /// Its spectrum is that of `H` with every eigenvalue doubled.
    fn real_embedding(&self) -> Vec<f64> {
        let n = self.dim;
        let m = 2 * n;
        let mut out = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let z = self.data[i * n + j];
                out[i * m + j] = z.re;
                out[i * m + n + j] = -z.im;
                out[(n + i) * m + j] = z.im;
                out[(n + i) * m + n + j] = z.re;
            }
        }
        out
    }

    /// Ascending eigenvalues of a Hermitian matrix.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = SymmetricEigen::new(&self.real_embedding(), 2 * self.dim, false)?;
        Ok(eig.values.iter().step_by(2).copied().collect())
    }

    /// `f(H)` for Hermitian `H`, through the eigendecomposition of the real
    /// embedding (the embedding commutes with functional calculus).
    pub fn hermitian_function(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = self.dim;
        let m = 2 * n;
        let eig = SymmetricEigen::new(&self.real_embedding(), m, true)?;
        let fr = eig.apply_function(f).expect("vectors were requested");
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = Complex64::new(fr[i * m + j], fr[(n + i) * m + j]);
            }
        }
        Ok(out)
    }

    /// `H^k` for Hermitian `H`.
    pub fn hermitian_power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(Self::identity(self.dim));
        }
        if self.dim == 1 {
            let mut out = self.clone();
            out.data[0] = Complex64::new(self.data[0].re.powi(k as i32), 0.0);
            return Ok(out);
        }
        self.hermitian_function(|x| x.powi(k as i32))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}
