//! Mixing of the simple random walk on `H(n)`: exact total variation,
//! the Fourier upper bound, the lower bound from the `x` coordinate, and the
//! Fourier formula for the law of the central coordinate.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{canonical_measure, ConvolutionPowers};
use crate::linalg::ComplexMatrix;
use crate::repr::{fourier_transform, IrrepLabel, UpperBoundLemma};

/// Default cap on `n^3` for exact total variation (`n = 21`).
pub const DEFAULT_STATE_BUDGET: u64 = 21 * 21 * 21;
/// Environment variable overriding [`DEFAULT_STATE_BUDGET`].
pub const BUDGET_ENV: &str = "HMIX_BUDGET";

/// The state budget, from `HMIX_BUDGET` when set and parseable.
pub fn state_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_STATE_BUDGET)
}

pub fn check_budget(n: u64, budget: u64) -> Result<()> {
    let states = n.saturating_mul(n).saturating_mul(n);
    if states > budget {
        return Err(Error::BudgetExceeded { states, budget });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TVReport {
    pub n: u64,
    pub k: u64,
    pub eta: f64,
    pub tv_exact: f64,
    /// `sqrt(I + II) / 2`.
    pub ub_fourier: f64,
    pub lb_projection: f64,
}

impl TVReport {
    /// `lb <= tv <= ub` up to `slack`.
    pub fn is_sandwiched(&self, slack: f64) -> bool {
        self.lb_projection <= self.tv_exact + slack && self.tv_exact <= self.ub_fourier + slack
    }
}

/// Law of the lazy walk on `Z/n` with steps `±1` (probability 1/4 each)
/// and `0` (probability 1/2): the `x` coordinate of the walk on `H(n)`.
#[derive(Clone, Debug)]
pub struct ProjectionWalk {
    probs: Vec<f64>,
}

impl ProjectionWalk {
    pub fn new(n: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[0] = 1.0;
        Self { probs }
    }

    pub fn step(&mut self) {
        let n = self.probs.len();
        let prev = self.probs.clone();
        for x in 0..n {
            self.probs[x] = 0.5 * prev[x] + 0.25 * (prev[(x + 1) % n] + prev[(x + n - 1) % n]);
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tv_distance(&self) -> f64 {
        let u = 1.0 / self.probs.len() as f64;
        0.5 * self.probs.iter().map(|p| (p - u).abs()).sum::<f64>()
    }
}

/// Total variation distance to uniform of the projected walk after `k` steps.
pub fn projection_lower_bound(n: u64, k: u64) -> f64 {
    let mut walk = ProjectionWalk::new(n as usize);
    for _ in 0..k {
        walk.step();
    }
    walk.tv_distance()
}

/// Exact total variation with both bounds for `k = 0..=k_max`.
pub fn exact_tv_curve(n: u64, k_max: u64) -> Result<Vec<TVReport>> {
    exact_tv_curve_with_budget(n, k_max, state_budget())
}

pub fn exact_tv_curve_with_budget(n: u64, k_max: u64, budget: u64) -> Result<Vec<TVReport>> {
    let ks: Vec<u64> = (0..=k_max).collect();
    exact_tv_at(n, &ks, budget)
}

/// Reports at the given step counts (any order, duplicates allowed), from
/// one pass of iterated convolution.
pub fn exact_tv_at(n: u64, ks: &[u64], budget: u64) -> Result<Vec<TVReport>> {
    check_budget(n, budget)?;
    let lemma = UpperBoundLemma::new(n)?;
    let q = canonical_measure(n)?;
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let mut tv = Vec::with_capacity(k_max as usize + 1);
    let mut lb = Vec::with_capacity(k_max as usize + 1);
    let mut projection = ProjectionWalk::new(n as usize);
    for (k, table) in ConvolutionPowers::new(&q)
        .take(k_max as usize + 1)
        .enumerate()
    {
        if k > 0 {
            projection.step();
        }
        tv.push(table.tv_distance());
        lb.push(projection.tv_distance());
    }
    Ok(ks
        .iter()
        .map(|&k| TVReport {
            n,
            k,
            eta: k as f64 / (n * n) as f64,
            tv_exact: tv[k as usize],
            ub_fourier: lemma.tv_bound(k),
            lb_projection: lb[k as usize],
        })
        .collect())
}

pub fn write_tv_csv<W: Write>(reports: &[TVReport], mut w: W) -> Result<()> {
    writeln!(w, "n,k,eta,tv_exact,ub_fourier,lb_projection")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{:.17e},{:.17e},{:.17e},{:.17e}",
            r.n, r.k, r.eta, r.tv_exact, r.ub_fourier, r.lb_projection
        )?;
    }
    Ok(())
}

pub fn is_odd_prime(p: u64) -> bool {
    p >= 3
        && p % 2 == 1
        && (3..)
            .step_by(2)
            .take_while(|d| d * d <= p)
            .all(|d| p % d != 0)
}

/// Fourier formula for the law of `Z_k` on `H(p)`:
///
/// ```text
/// P{Z_k = z} = 1/p + 1/p sum_{xi=1}^{p-1} e^{-2 pi i xi z / p} sum_j (Q^(rho_xi)^k)_{0, j}
/// ```
///
/// with `rho_xi` the degree-`p` representation `(0, 0, xi)`. Row 0 of
/// `rho(g)` sums to `e^{2 pi i xi z(g) / p}`, which is what makes the inner
/// sum the characteristic function of `Z_k`.
#[derive(Clone, Debug)]
pub struct CenterFormula {
    p: u64,
    transforms: Vec<ComplexMatrix>,
}

impl CenterFormula {
    pub fn new(p: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        let q = canonical_measure(p)?;
        let transforms = (1..p)
            .map(|xi| fourier_transform(&q, &IrrepLabel::new(p, p, 0, 0, xi)?))
            .collect::<Result<_>>()?;
        Ok(Self { p, transforms })
    }

    /// `E[e^{2 pi i xi Z_k / p}]` for `xi = 1..p-1`.
    pub fn characteristic_values(&self, k: u32) -> Result<Vec<Complex64>> {
        let p = self.p as usize;
        self.transforms
            .iter()
            .map(|t| {
                let power = t.hermitian_power(k)?;
                Ok((0..p).map(|j| power[(0, j)]).sum())
            })
            .collect()
    }

    /// `P{Z_k = z}` for every `z` in `0..p`.
    pub fn distribution(&self, k: u32) -> Result<Vec<f64>> {
        let p = self.p;
        let chars = self.characteristic_values(k)?;
        (0..p)
            .map(|z| {
                let mut total = Complex64::new(1.0, 0.0);
                for (i, s) in chars.iter().enumerate() {
                    let xi = i as u64 + 1;
                    let angle = -TAU * ((xi * z) % p) as f64 / p as f64;
                    total += Complex64::from_polar(1.0, angle) * s;
                }
                let total = total / p as f64;
                if total.im.abs() > 1e-10 {
                    return Err(Error::Numerical(format!(
                        "P(Z = {z}) has imaginary part {}",
                        total.im
                    )));
                }
                Ok(total.re)
            })
            .collect()
    }
}

/// `P{Z_k = z}` on `H(p)` from the Fourier formula.
pub fn center_distribution_fourier(p: u64, k: u32, z: u64) -> Result<f64> {
    let dist = CenterFormula::new(p)?.distribution(k)?;
    Ok(dist[(z % p) as usize])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CenterRow {
    pub p: u64,
    pub k: u64,
    pub z: u64,
    pub prob_fourier: f64,
    pub prob_exact: f64,
}

/// Fourier and exact laws of `Z_k` for `k = 1..=k_max`.
pub fn center_table(p: u64, k_max: u64) -> Result<Vec<CenterRow>> {
    let formula = CenterFormula::new(p)?;
    let q = canonical_measure(p)?;
    let exact: Vec<Vec<f64>> = ConvolutionPowers::new(&q)
        .take(k_max as usize + 1)
        .map(|t| t.z_marginal())
        .collect();
    let per_k = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let fourier = formula.distribution(k as u32)?;
            Ok((0..p)
                .map(|z| CenterRow {
                    p,
                    k,
                    z,
                    prob_fourier: fourier[z as usize],
                    prob_exact: exact[k as usize][z as usize],
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per_k.into_iter().flatten().collect())
}

pub fn write_center_csv<W: Write>(rows: &[CenterRow], mut w: W) -> Result<()> {
    writeln!(w, "p,k,z,prob_fourier,prob_exact")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{:.17e},{:.17e}",
            r.p, r.k, r.z, r.prob_fourier, r.prob_exact
        )?;
    }
    Ok(())
}

/// `tv_exact` at `k = ceil(eta n^2)` against two reference curves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingRateRow {
    pub n: u64,
    pub eta: f64,
    pub k: u64,
    pub tv_exact: f64,
    /// `tv / e^{-2 pi^2 eta}`.
    pub ratio: f64,
    /// `tv / cos(pi/n)^k`: the slowest non-trivial mode, at `a = b = (n ± 1)/2`.
    pub ratio_slowest: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaSpread {
    pub eta: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl EtaSpread {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

#[derive(Clone, Debug)]
pub struct MixingRateSummary {
    pub rows: Vec<MixingRateRow>,
    pub per_eta: Vec<EtaSpread>,
}

impl MixingRateSummary {
    /// Smallest ratio over the grid (an estimate of the lower constant).
    pub fn a_estimate(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.ratio)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest ratio over the grid (an estimate of the upper constant).
    pub fn c_estimate(&self) -> f64 {
        self.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
    }

    /// Every ratio finite and positive, and for each `eta` the ratios over
    /// `n` within `factor` of each other.
    pub fn is_stable(&self, factor: f64) -> bool {
        self.rows
            .iter()
            .all(|r| r.ratio.is_finite() && r.ratio > 0.0)
            && self.per_eta.iter().all(|e| e.spread() <= factor)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n,eta,k,tv_exact,ratio,ratio_slowest")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{:.17e},{},{:.17e},{:.17e},{:.17e}",
                r.n, r.eta, r.k, r.tv_exact, r.ratio, r.ratio_slowest
            )?;
        }
        Ok(())
    }
}

pub fn theorem1_constants(ns: &[u64], eta_grid: &[f64]) -> Result<MixingRateSummary> {
    theorem1_constants_with_budget(ns, eta_grid, state_budget())
}

pub fn theorem1_constants_with_budget(
    ns: &[u64],
    eta_grid: &[f64],
    budget: u64,
) -> Result<MixingRateSummary> {
    if let Some(&eta) = eta_grid.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::InvalidArgument(format!("bad eta {eta}")));
    }
    for &n in ns {
        check_budget(n, budget)?;
    }
    let per_n = ns
        .par_iter()
        .map(|&n| {
            let ks: Vec<u64> = eta_grid
                .iter()
                .map(|eta| (eta * (n * n) as f64).ceil() as u64)
                .collect();
            let reports = exact_tv_at(n, &ks, budget)?;
            Ok(eta_grid
                .iter()
                .zip(reports)
                .map(|(&eta, r)| MixingRateRow {
                    n,
                    eta,
                    k: r.k,
                    tv_exact: r.tv_exact,
                    ratio: r.tv_exact / (-2.0 * PI * PI * eta).exp(),
                    ratio_slowest: r.tv_exact / (PI / n as f64).cos().powi(r.k as i32),
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<MixingRateRow> = per_n.into_iter().flatten().collect();
    let per_eta = eta_grid
        .iter()
        .map(|&eta| {
            let ratios = rows.iter().filter(|r| r.eta == eta).map(|r| r.ratio);
            EtaSpread {
                eta,
                min_ratio: ratios.clone().fold(f64::INFINITY, f64::min),
                max_ratio: ratios.fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(MixingRateSummary { rows, per_eta })
}

/// Least-squares slope of `-ln tv` against `k` over `ks`, using only
/// even `k` (odd and even steps sit on different branches).
pub fn fitted_decay_rate(reports: &[TVReport]) -> f64 {
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.k % 2 == 0 && r.tv_exact > 0.0)
        .map(|r| (r.k as f64, -r.tv_exact.ln()))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    num / den
}
