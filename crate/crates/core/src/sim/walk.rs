//! Monte Carlo for the walk on `H(Z)`.
//!
//! Trials are split into fixed blocks of [`BLOCK_TRIALS`]; block `b` draws
//! from ChaCha8 seeded with `seed` on stream `b`. Results therefore depend on
//! `(seed, trials)` only, not on the number of worker threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::gamma::gamma_real;
use super::levy::CdfTable;
use crate::error::{Error, Result};
use crate::group::GroupElement;

pub const BLOCK_TRIALS: u64 = 1 << 14;

/// Step codes: 0 = (1,0), 1 = (-1,0), 2 = (0,1), 3 = (0,-1).
pub fn step_vector(code: u8) -> (i64, i64) {
    match code & 3 {
        0 => (1, 0),
        1 => (-1, 0),
        2 => (0, 1),
        _ => (0, -1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkSample {
    pub k: u64,
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl WalkSample {
    pub fn origin() -> Self {
        Self {
            k: 0,
            x: 0,
            y: 0,
            z: 0,
        }
    }

    /// Left-multiplies by the step: `(e, d, 0)(X, Y, Z) = (X + e, Y + d, Z + e Y)`.
    #[inline]
    pub fn push(&mut self, code: u8) {
        let (e, d) = step_vector(code);
        self.z += e * self.y;
        self.x += e;
        self.y += d;
        self.k += 1;
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.y == 0 && self.z == 0
    }

    pub fn reduce(&self, n: u64) -> GroupElement {
        GroupElement::new(self.x, self.y, self.z, n)
    }
}

/// `X = sum e_i`, `Y = sum d_i`, `Z = sum_i e_i (d_1 + ... + d_{i-1})`.
pub fn endpoint_from_steps(steps: &[u8]) -> WalkSample {
    let mut s = WalkSample::origin();
    for &c in steps {
        s.push(c);
    }
    s
}

/// The same endpoint as the product `g_k ... g_1` in `H(n)`.
pub fn endpoint_by_multiplication(steps: &[u8], n: u64) -> GroupElement {
    steps.iter().fold(GroupElement::identity(n), |acc, &c| {
        let (e, d) = step_vector(c);
        GroupElement::new(e, d, 0, n)
            .mul(&acc)
            .expect("same modulus")
    })
}

pub fn draw_steps<R: RngCore>(k: u64, rng: &mut R) -> Vec<u8> {
    (0..k).map(|_| (rng.gen::<u32>() & 3) as u8).collect()
}

/// One walk of `k` steps, using all 64 bits of each draw.
pub fn sample_walk<R: RngCore>(k: u64, rng: &mut R) -> WalkSample {
    let mut s = WalkSample::origin();
    let mut left = k;
    while left > 0 {
        let mut bits = rng.next_u64();
        for _ in 0..left.min(32) {
            s.push((bits & 3) as u8);
            bits >>= 2;
        }
        left -= left.min(32);
    }
    s
}

/// A seeded walk; with a modulus the coordinates are reduced to residues.
pub fn sample_walk_seeded(k: u64, modulus: Option<u64>, seed: u64) -> WalkSample {
    let mut rng = block_rng(seed, 0);
    let s = sample_walk(k, &mut rng);
    match modulus {
        Some(n) => {
            let g = s.reduce(n);
            WalkSample {
                k,
                x: g.x as i64,
                y: g.y as i64,
                z: g.z as i64,
            }
        }
        None => s,
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `f(rng, trials_in_block)` on every block, returning results in block order.
fn run_blocks<T: Send>(
    trials: u64,
    seed: u64,
    f: impl Fn(&mut ChaCha8Rng, u64) -> T + Sync,
) -> Vec<T> {
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
            f(&mut block_rng(seed, b), count)
        })
        .collect()
}

/// `4 Γ(1/4)^2 / π^2`, the conjectured constant in `P(return at k) ~ c / k^2`.
pub fn conjectured_constant() -> f64 {
    let g = gamma_real(0.25);
    4.0 * g * g / (std::f64::consts::PI * std::f64::consts::PI)
}

/// Hit counts for returns to the identity and to `(X, Y) = (0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReturnStats {
    pub k: u64,
    pub trials: u64,
    pub seed: u64,
    pub hits: u64,
    pub xy_hits: u64,
}

fn binomial(hits: u64, trials: u64) -> (f64, f64) {
    let p = hits as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

impl ReturnStats {
    pub fn estimate(&self) -> f64 {
        binomial(self.hits, self.trials).0
    }

    pub fn stderr(&self) -> f64 {
        binomial(self.hits, self.trials).1
    }

    pub fn k2_scaled(&self) -> f64 {
        (self.k * self.k) as f64 * self.estimate()
    }

    pub fn k2_stderr(&self) -> f64 {
        (self.k * self.k) as f64 * self.stderr()
    }

    pub fn xy_estimate(&self) -> f64 {
        binomial(self.xy_hits, self.trials).0
    }

    pub fn xy_stderr(&self) -> f64 {
        binomial(self.xy_hits, self.trials).1
    }

    /// `π k P{(X_k, Y_k) = (0, 0)}`.
    pub fn xy_scaled(&self) -> f64 {
        std::f64::consts::PI * self.k as f64 * self.xy_estimate()
    }
}

/// Monte Carlo estimate of `P{(X_k, Y_k, Z_k) = (0, 0, 0)}` on `H(Z)`.
pub fn return_probability(k: u64, trials: u64, seed: u64) -> Result<ReturnStats> {
    if k % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "odd k = {k} never returns; use an even k"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let counts = run_blocks(trials, seed, |rng, count| {
        let (mut hits, mut xy) = (0u64, 0u64);
        for _ in 0..count {
            let s = sample_walk(k, rng);
            if s.x == 0 && s.y == 0 {
                xy += 1;
                if s.z == 0 {
                    hits += 1;
                }
            }
        }
        (hits, xy)
    });
    let (hits, xy_hits) = counts
        .into_iter()
        .fold((0, 0), |(a, b), (c, d)| (a + c, b + d));
    Ok(ReturnStats {
        k,
        trials,
        seed,
        hits,
        xy_hits,
    })
}

/// `Z_k / k` for `trials` walks, in block order.
pub fn sample_scaled_center(k: u64, trials: u64, seed: u64) -> Vec<f64> {
    run_blocks(trials, seed, |rng, count| {
        (0..count)
            .map(|_| sample_walk(k, rng).z as f64 / k as f64)
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Kolmogorov-Smirnov distance between a sample and a distribution
/// function, handling tied sample values.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = sample.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        let f = cdf(v[i]);
        d = d
            .max((f - i as f64 / n).abs())
            .max((f - j as f64 / n).abs());
        i = j;
    }
    d
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevyStats {
    pub k: u64,
    pub trials: u64,
    pub seed: u64,
    /// KS distance of `Z_k/k` to the law of `A/2`.
    pub ks_halved: f64,
    /// KS distance of `Z_k/k` to the law of `A`.
    pub ks_full: f64,
    pub median: f64,
    pub variance: f64,
}

/// Compares `Z_k / k` with `A/2` (density `2 f(2x)`) and with `A`.
pub fn zn_limit_test(k: u64, trials: u64, seed: u64) -> Result<LevyStats> {
    if k < 1000 {
        return Err(Error::InvalidArgument(format!("need k >= 1000, got {k}")));
    }
    if trials < 2 {
        return Err(Error::InvalidArgument("need at least two trials".into()));
    }
    let mut sample = sample_scaled_center(k, trials, seed);
    let halved = CdfTable::halved_levy();
    let full = CdfTable::levy();
    let ks_halved = ks_statistic(&sample, |x| halved.cdf(x));
    let ks_full = ks_statistic(&sample, |x| full.cdf(x));
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let variance = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    sample.sort_by(f64::total_cmp);
    let median = sample[sample.len() / 2];
    Ok(LevyStats {
        k,
        trials,
        seed,
        ks_halved,
        ks_full,
        median,
        variance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps() {
        assert_eq!(sample_walk_seeded(0, None, 1), WalkSample::origin());
    }

    #[test]
    fn formulas_match_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_003;
        for _ in 0..1000 {
            let k = rng.gen_range(0..300);
            let steps = draw_steps(k, &mut rng);
            let s = endpoint_from_steps(&steps);
            assert_eq!(s.reduce(n), endpoint_by_multiplication(&steps, n));
            assert!(s.x.abs() + s.y.abs() <= k as i64);
            assert_eq!((s.x + s.y).rem_euclid(2), (k % 2) as i64);
        }
    }

    #[test]
    fn two_step_law() {
        // Of the 16 two-step words, 2 end with Z = 1.
        let trials = 1_000_000u64;
        let ones: u64 = run_blocks(trials, 9, |rng, count| {
            (0..count).filter(|_| sample_walk(2, rng).z == 1).count() as u64
        })
        .into_iter()
        .sum();
        let p = ones as f64 / trials as f64;
        let sigma = (0.125 * 0.875 / trials as f64).sqrt();
        assert!((p - 0.125).abs() < 3.0 * sigma + 1e-12);
        let r = return_probability(2, trials, 9).unwrap();
        assert!((r.estimate() - 0.25).abs() < 3.0 * r.stderr());
    }

    #[test]
    fn seeded_determinism_across_pools() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| return_probability(20, 100_000, 42).unwrap())
        };
        assert_eq!(run(1), run(4));
        assert_ne!(run(1), return_probability(20, 100_000, 43).unwrap());
        assert!(return_probability(3, 10, 1).is_err());
    }

    /// Var(Z_k) = sum_i E[e_i^2] E[Y_{i-1}^2] = k (k - 1) / 8.
    #[test]
    fn center_variance() {
        let k = 200;
        let sample = sample_scaled_center(k, 200_000, 5);
        let n = sample.len() as f64;
        let mean = sample.iter().sum::<f64>() / n;
        let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let exact = (k - 1) as f64 / (8.0 * k as f64);
        // Fourth moment of the limit is 7/64, so Var(sample var) ~ (7/64 - 1/64) / n.
        assert!(
            (var - exact).abs() < 4.0 * (6.0 / 64.0 / n).sqrt(),
            "{var} vs {exact}"
        );
        assert!(mean.abs() < 4.0 * (exact / n).sqrt());
    }

    #[test]
    fn ks_against_uniform() {
        let sample: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_statistic(&sample, |x| x.clamp(0.0, 1.0)) - 0.005).abs() < 1e-12);
        assert!((ks_statistic(&[0.5, 0.5], |x| x) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn levy_limit_small() {
        let s = zn_limit_test(1000, 20_000, 11).unwrap();
        assert!(s.ks_halved < 0.02, "{s:?}");
        assert!(s.ks_full > s.ks_halved);
        assert!(s.median.abs() < 0.02);
        assert!((s.variance - 0.125).abs() < 0.01);
        assert!(zn_limit_test(999, 10, 1).is_err());
    }

    #[test]
    fn constant_from_two_routes() {
        let c = conjectured_constant();
        let agm = 4.0 * super::super::gamma::gamma_quarter_squared_agm()
            / (std::f64::consts::PI * std::f64::consts::PI);
        assert!(c > 0.0);
        assert!((c - agm).abs() < 1e-10);
    }
}
