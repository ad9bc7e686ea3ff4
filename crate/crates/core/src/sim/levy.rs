//! Density of `A = ∫_0^1 B_1 dB_2` and of the rescaled `A/2`.
//!
//! `E[e^{itA}] = (cosh t)^{-1/2}`, whose inverse transform is
//! `|Γ(1/4 + ix/2)|^2 / (2^{3/2} π^{3/2})`. The displayed form with prefactor
//! `Γ(1/2) 2^{3/2} / π^{3/2}` has total mass `8√π`; [`LevyDensity`] divides
//! the displayed form by its mass measured by quadrature.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use quadrature::double_exponential;

use super::gamma::gamma;
use crate::error::{Error, Result};

/// `|x|` up to which the gamma evaluator has been validated.
pub const VALIDATED_RANGE: f64 = 50.0;

/// Panel edges for integrals over `[-50, 50]`; the density peaks at 0.
const PANELS: [f64; 9] = [-50.0, -20.0, -8.0, -2.0, 0.0, 2.0, 8.0, 20.0, 50.0];

fn check_range(x: f64) -> Result<()> {
    if !(x.abs() <= VALIDATED_RANGE) {
        return Err(Error::InvalidArgument(format!(
            "|x| = {} is outside the validated range {VALIDATED_RANGE}",
            x.abs()
        )));
    }
    Ok(())
}

fn gamma_modulus_sqr(x: f64) -> f64 {
    gamma(Complex64::new(0.25, 0.5 * x)).norm_sqr()
}

fn printed_unchecked(x: f64) -> f64 {
    PI.sqrt() * 2f64.powf(1.5) / PI.powf(1.5) * gamma_modulus_sqr(x)
}

/// The density formula exactly as displayed, prefactor included.
pub fn printed_density(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(printed_unchecked(x))
}

/// `∫ f` over `[-50, 50]` by double-exponential quadrature on fixed panels.
pub fn integrate_on_range(f: impl Fn(f64) -> f64) -> f64 {
    PANELS
        .windows(2)
        .map(|w| double_exponential::integrate(&f, w[0], w[1], 1e-14).integral)
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevyDensity {
    printed_mass: f64,
}

impl LevyDensity {
    pub fn new() -> Self {
        Self {
            printed_mass: integrate_on_range(printed_unchecked),
        }
    }

    /// Mass of the displayed formula over `[-50, 50]`.
    pub fn printed_mass(&self) -> f64 {
        self.printed_mass
    }

    /// Density of `A`.
    pub fn density(&self, x: f64) -> Result<f64> {
        check_range(x)?;
        Ok(self.density_unchecked(x))
    }

    fn density_unchecked(&self, x: f64) -> f64 {
        printed_unchecked(x) / self.printed_mass
    }

    /// Density of `A/2`: `g(x) = 2 f(2x)`.
    pub fn halved_density(&self, x: f64) -> Result<f64> {
        check_range(2.0 * x)?;
        Ok(2.0 * self.density_unchecked(2.0 * x))
    }

    /// `E[A^k]` by quadrature.
    pub fn moment(&self, k: i32) -> f64 {
        integrate_on_range(|x| x.powi(k) * self.density_unchecked(x))
    }
}

impl Default for LevyDensity {
    fn default() -> Self {
        Self::new()
    }
}

fn shared() -> &'static LevyDensity {
    static CELL: OnceLock<LevyDensity> = OnceLock::new();
    CELL.get_or_init(LevyDensity::new)
}

/// Normalised density of `∫_0^1 B_1 dB_2`.
pub fn levy_density(x: f64) -> Result<f64> {
    shared().density(x)
}

/// Tabulated distribution function on `[-half_width, half_width]`.
#[derive(Clone, Debug)]
pub struct CdfTable {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl CdfTable {
    /// Integrates `density` panel by panel; the table is rescaled so its last
    /// value is exactly 1.
    pub fn build(density: impl Fn(f64) -> f64, half_width: f64, panels: usize) -> Self {
        let lo = -half_width;
        let step = 2.0 * half_width / panels as f64;
        let mut values = Vec::with_capacity(panels + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for i in 0..panels {
            let a = lo + i as f64 * step;
            acc += double_exponential::integrate(&density, a, a + step, 1e-15).integral;
            values.push(acc);
        }
        let total = acc;
        for v in &mut values {
            *v /= total;
        }
        Self { lo, step, values }
    }

    /// Distribution function of `A/2`.
    pub fn halved_levy() -> Self {
        let f = shared();
        Self::build(|x| 2.0 * f.density_unchecked(2.0 * x), 25.0, 10_000)
    }

    /// Distribution function of `A`.
    pub fn levy() -> Self {
        let f = shared();
        Self::build(|x| f.density_unchecked(x), 50.0, 10_000)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let t = (x - self.lo) / self.step;
        if t <= 0.0 {
            return 0.0;
        }
        let i = t.floor() as usize;
        if i + 1 >= self.values.len() {
            return 1.0;
        }
        let frac = t - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}
