//! Path bounds for the extreme eigenvalues of Harper-type matrices.
//!
//! `L = I/3 + 2M/3` is substochastic; adding an absorbing state `∞` that
//! takes the missing row mass gives a stochastic kernel `K`. A path from
//! every site to `∞` yields the constant
//!
//! ```text
//! A = max_{(x, y)} 2 / K(x, y) * sum_{z : (x, y) in path(z)} |path(z)|
//! ```
//!
//! and then `beta_1(L) <= 1 - 1/A`, i.e. `beta_1(M) <= 1 - 3/(2A)`.
//!
//! Lower bounds on `beta_n(M)` reuse the same engine: for even `n` the
//! spectrum of `M(d)` is minus that of `M(-d)`, and for odd `n` it sits
//! inside minus the spectrum of the doubled profile `M(-(d || d))`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harper::{build_general, build_harper, HarperMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum State {
    Site(usize),
    Absorbing,
}

impl State {
    pub fn site(self) -> Option<usize> {
        match self {
            State::Site(j) => Some(j),
            State::Absorbing => None,
        }
    }
}

impl std::fmt::Display for State {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            State::Site(j) => write!(f, "{j}"),
            State::Absorbing => write!(f, "inf"),
        }
    }
}

/// The kernel `K` on `{0, ..., n-1, ∞}` built from a Harper diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct AbsorbingChain {
    diagonal: Vec<f64>,
}

impl AbsorbingChain {
    pub fn new(m: &HarperMatrix) -> Self {
        Self {
            diagonal: m.diagonal().to_vec(),
        }
    }

    pub fn from_diagonal(diagonal: &[f64]) -> Result<Self> {
        Ok(Self::new(&build_general(diagonal.len(), diagonal)?))
    }

    pub fn n(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// `K(j, ∞) = (1 - 2 d_j) / 3`.
    pub fn absorption(&self, j: usize) -> f64 {
        (1.0 - 2.0 * self.diagonal[j]) / 3.0
    }

    pub fn kernel(&self, from: State, to: State) -> f64 {
        let n = self.n();
        match (from, to) {
            (State::Absorbing, State::Absorbing) => 1.0,
            (State::Absorbing, State::Site(_)) => 0.0,
            (State::Site(j), State::Absorbing) => self.absorption(j),
            (State::Site(i), State::Site(j)) => {
                if i == j {
                    (1.0 + 2.0 * self.diagonal[i]) / 3.0
                } else if (i + 1) % n == j || (j + 1) % n == i {
                    1.0 / 6.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn states(&self) -> impl Iterator<Item = State> {
        (0..self.n())
            .map(State::Site)
            .chain(std::iter::once(State::Absorbing))
    }

    /// Largest `|row sum - 1|` over all `n + 1` rows.
    pub fn stochasticity_defect(&self) -> f64 {
        self.states()
            .map(|x| (self.states().map(|y| self.kernel(x, y)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|K(x, y) - K(y, x)|` on the sites (uniform `U`).
    pub fn reversibility_defect(&self) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = self.kernel(State::Site(i), State::Site(j))
                    - self.kernel(State::Site(j), State::Site(i));
                worst = worst.max(d.abs());
            }
        }
        worst
    }
}

/// One path per site, each ending at `∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSystem {
    paths: Vec<Vec<State>>,
}

impl PathSystem {
    pub fn new(paths: Vec<Vec<State>>) -> Self {
        Self { paths }
    }

    pub fn paths(&self) -> &[Vec<State>] {
        &self.paths
    }

    /// Number of steps of the path from `z`.
    pub fn length(&self, z: usize) -> usize {
        self.paths[z].len() - 1
    }

    pub fn validate(&self, chain: &AbsorbingChain) -> Result<()> {
        let n = chain.n();
        if self.paths.len() != n {
            return Err(Error::InvalidArgument(format!(
                "{} paths for {n} sites",
                self.paths.len()
            )));
        }
        for (z, path) in self.paths.iter().enumerate() {
            let bad = |reason: String| Error::InvalidPath { start: z, reason };
            if path.first() != Some(&State::Site(z)) {
                return Err(bad("does not start at its own site".into()));
            }
            if path.last() != Some(&State::Absorbing) {
                return Err(bad("does not end at the absorbing state".into()));
            }
            if path[..path.len() - 1].contains(&State::Absorbing) {
                return Err(bad("passes through the absorbing state early".into()));
            }
            for w in path.windows(2) {
                if let State::Site(j) = w[1] {
                    if j >= n {
                        return Err(bad(format!("site {j} out of range")));
                    }
                }
                if !(chain.kernel(w[0], w[1]) > 0.0) {
                    return Err(bad(format!("step {} -> {} has K = 0", w[0], w[1])));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub a: f64,
    /// `1 - 1/A`, bounding the top eigenvalue of `L`.
    pub bound_l: f64,
    /// `1 - 3/(2A)`, bounding the top eigenvalue of `M`.
    pub bound_m: f64,
    pub witness: (State, State),
    /// Paths through the witness edge.
    pub witness_paths: usize,
}

impl BoundReport {
    fn from_constant(a: f64, witness: (State, State), witness_paths: usize) -> Self {
        Self {
            a,
            bound_l: 1.0 - 1.0 / a,
            bound_m: 1.0 - 1.5 / a,
            witness,
            witness_paths,
        }
    }
}

/// Evaluates `A` by accumulating per-edge statistics path by path.
pub fn path_constant(chain: &AbsorbingChain, paths: &PathSystem) -> Result<BoundReport> {
    paths.validate(chain)?;
    let mut edges: BTreeMap<(State, State), (usize, u64)> = BTreeMap::new();
    for (z, path) in paths.paths().iter().enumerate() {
        let len = paths.length(z) as u64;
        let distinct: BTreeSet<(State, State)> = path.windows(2).map(|w| (w[0], w[1])).collect();
        for e in distinct {
            let entry = edges.entry(e).or_insert((0, 0));
            entry.0 += 1;
            entry.1 += len;
        }
    }
    let mut best: Option<(f64, (State, State), usize)> = None;
    for (&e, &(count, total)) in &edges {
        let value = 2.0 / chain.kernel(e.0, e.1) * total as f64;
        if best.map_or(true, |(b, _, _)| value > b) {
            best = Some((value, e, count));
        }
    }
    let (a, witness, count) =
        best.ok_or_else(|| Error::InvalidArgument("empty path system".into()))?;
    Ok(BoundReport::from_constant(a, witness, count))
}

/// `A` by scanning every possible edge against every path. Slow; used to
/// cross-check [`path_constant`].
pub fn path_constant_brute_force(chain: &AbsorbingChain, paths: &PathSystem) -> Result<f64> {
    paths.validate(chain)?;
    let states: Vec<State> = chain.states().collect();
    let mut a: f64 = 0.0;
    for &x in &states {
        for &y in &states {
            let mut total = 0u64;
            for (z, path) in paths.paths().iter().enumerate() {
                if path.windows(2).any(|w| w[0] == x && w[1] == y) {
                    total += paths.length(z) as u64;
                }
            }
            if total > 0 {
                a = a.max(2.0 / chain.kernel(x, y) * total as f64);
            }
        }
    }
    Ok(a)
}

/// The diagonal `cos(2 pi xi (alpha + j) / n) / 2`, described by its
/// parameters so the builders can locate the peaks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosineProfile {
    pub n: usize,
    pub xi: u64,
    pub alpha: f64,
}

impl CosineProfile {
    /// First site at or right of each peak `k n / xi - alpha`, mod `n`,
    /// sorted. Peaks within `1e-9` of a site count as on it.
    pub fn group_starts(&self) -> Vec<usize> {
        let n = self.n as f64;
        let mut starts: Vec<usize> = (0..self.xi)
            .map(|k| {
                let p = (k as f64 * n) / self.xi as f64 - self.alpha;
                let site = if (p - p.round()).abs() < 1e-9 {
                    p.round()
                } else {
                    p.ceil()
                };
                site.rem_euclid(n) as usize % self.n
            })
            .collect();
        starts.sort_unstable();
        starts.dedup();
        starts
    }

    /// `(start, length)` of every group.
    pub fn groups(&self) -> Vec<(usize, usize)> {
        let starts = self.group_starts();
        let g = starts.len();
        (0..g)
            .map(|i| {
                let s = starts[i];
                let next = if i + 1 < g {
                    starts[i + 1]
                } else {
                    starts[0] + self.n
                };
                (s, next - s)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Runs of length `floor((n/xi)^(2/3))` (small `xi`).
    Pp1,
    /// Runs of length `floor(floor(n/xi) / 4)` (large `xi`).
    Pp2,
    /// Nearest strongly absorbing site, for arbitrary diagonals.
    Generic,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::Pp1 => "pp1",
            Construction::Pp2 => "pp2",
            Construction::Generic => "generic",
        }
    }
}

/// `floor((n/xi)^(2/3))`, computed exactly as the largest `x` with
/// `x^3 xi^2 <= n^2`.
pub fn pp1_run_length(n: usize, xi: u64) -> usize {
    let (n, xi) = (n as u128, xi as u128);
    let mut x = ((n as f64 / xi as f64).powf(2.0 / 3.0)) as u128;
    while x * x * x * xi * xi > n * n {
        x -= 1;
    }
    while (x + 1) * (x + 1) * (x + 1) * xi * xi <= n * n {
        x += 1;
    }
    x as usize
}

/// `floor(floor(n/xi) / 4)`.
pub fn pp2_run_length(n: usize, xi: u64) -> usize {
    (n / xi as usize) / 4
}

/// Routes each group of a cosine profile: the first `x_l` sites run right
/// `x_l` steps and jump, the last `x_r` sites mirror this leftwards, the
/// rest jump directly. `x_l = clamp(run, 1, L/2)` so the group's first
/// site, the only one that can sit on a peak, never jumps itself.
pub fn group_paths(profile: &CosineProfile, run: usize) -> PathSystem {
    let n = profile.n;
    let mut paths = vec![Vec::new(); n];
    for (start, len) in profile.groups() {
        let x_l = run.clamp(1, (len / 2).max(1));
        let x_r = run.min(len.saturating_sub(1) / 2);
        let site = |i: usize| State::Site((start + i) % n);
        for i in 0..len {
            let path = &mut paths[(start + i) % n];
            if i < x_l && i + x_l < len {
                path.extend((i..=i + x_l).map(site));
            } else if i + x_r >= len && i >= x_r {
                path.extend((i - x_r..=i).rev().map(site));
            } else {
                path.push(site(i));
            }
            path.push(State::Absorbing);
        }
    }
    PathSystem::new(paths)
}

/// Sites whose absorption is at least `min(1/3, max_j K(j, ∞))` jump
/// directly; every other site walks to the nearest such site (ties go
/// right) and jumps from there.
pub fn generic_paths(chain: &AbsorbingChain) -> Result<PathSystem> {
    let n = chain.n();
    let best = (0..n).map(|j| chain.absorption(j)).fold(0.0, f64::max);
    if !(best > 0.0) {
        return Err(Error::InvalidPath {
            start: 0,
            reason: "no site can reach the absorbing state".into(),
        });
    }
    let threshold = best.min(1.0 / 3.0);
    let strong: Vec<bool> = (0..n).map(|j| chain.absorption(j) >= threshold).collect();
    let paths = (0..n)
        .map(|z| {
            let right = (0..n)
                .find(|&s| strong[(z + s) % n])
                .expect("a strong site exists");
            let left = (0..n)
                .find(|&s| strong[(z + n - s) % n])
                .expect("a strong site exists");
            let mut path: Vec<State> = if right <= left {
                (0..=right).map(|s| State::Site((z + s) % n)).collect()
            } else {
                (0..=left).map(|s| State::Site((z + n - s) % n)).collect()
            };
            path.push(State::Absorbing);
            path
        })
        .collect();
    Ok(PathSystem::new(paths))
}

fn profile_paths(profile: &CosineProfile, construction: Construction) -> PathSystem {
    let run = match construction {
        Construction::Pp1 => pp1_run_length(profile.n, profile.xi),
        Construction::Pp2 => pp2_run_length(profile.n, profile.xi),
        Construction::Generic => unreachable!("generic paths ignore the profile"),
    };
    group_paths(profile, run)
}

fn check_xi(n: usize, xi: u64) -> Result<()> {
    if xi == 0 || 2 * xi as usize >= n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= xi < n/2, got n = {n}, xi = {xi}"
        )));
    }
    Ok(())
}

/// PP1 paths for `M(n, xi, 0)`.
pub fn build_paths_small_xi(n: usize, xi: u64) -> Result<PathSystem> {
    check_xi(n, xi)?;
    Ok(profile_paths(
        &CosineProfile { n, xi, alpha: 0.0 },
        Construction::Pp1,
    ))
}

/// PP2 paths for `M(n, xi, 0)`.
pub fn build_paths_large_xi(n: usize, xi: u64) -> Result<PathSystem> {
    check_xi(n, xi)?;
    Ok(profile_paths(
        &CosineProfile { n, xi, alpha: 0.0 },
        Construction::Pp2,
    ))
}

/// Which constructions to try for `(n, xi)`: PP1 below `n / ln n`, PP2
/// above, both inside `[n / (2 ln n), 2n / ln n]`.
pub fn constructions_for(n: usize, xi: u64) -> Vec<Construction> {
    let t = n as f64 / (n as f64).ln();
    let x = xi as f64;
    if x >= 0.5 * t && x <= 2.0 * t {
        vec![Construction::Pp1, Construction::Pp2]
    } else if x <= t {
        vec![Construction::Pp1]
    } else {
        vec![Construction::Pp2]
    }
}

/// Bound from the best of the given constructions on a cosine profile whose
/// diagonal is `diagonal` (passed separately so callers control rounding).
fn best_on_profile(
    diagonal: &[f64],
    profile: &CosineProfile,
    constructions: &[Construction],
) -> Result<(BoundReport, Construction)> {
    let chain = AbsorbingChain::from_diagonal(diagonal)?;
    let mut best: Option<(BoundReport, Construction)> = None;
    for &c in constructions {
        let report = path_constant(&chain, &profile_paths(profile, c))?;
        if best.map_or(true, |(b, _)| report.a < b.a) {
            best = Some((report, c));
        }
    }
    best.ok_or_else(|| Error::InvalidArgument("no construction selected".into()))
}

/// `beta_1(M(n, xi, 0)) <= bound_m`.
pub fn upper_bound_beta1(n: usize, xi: u64) -> Result<BoundReport> {
    upper_bound_with(n, xi).map(|(r, _)| r)
}

/// As [`upper_bound_beta1`], also naming the construction used.
pub fn upper_bound_with(n: usize, xi: u64) -> Result<(BoundReport, Construction)> {
    check_xi(n, xi)?;
    let m = build_harper(n, xi, 0.0)?;
    let profile = CosineProfile { n, xi, alpha: 0.0 };
    best_on_profile(m.diagonal(), &profile, &constructions_for(n, xi))
}

/// The bound for a fixed construction, ignoring the dispatch rule.
pub fn upper_bound_using(n: usize, xi: u64, construction: Construction) -> Result<BoundReport> {
    check_xi(n, xi)?;
    let m = build_harper(n, xi, 0.0)?;
    if construction == Construction::Generic {
        let chain = AbsorbingChain::new(&m);
        return path_constant(&chain, &generic_paths(&chain)?);
    }
    let profile = CosineProfile { n, xi, alpha: 0.0 };
    best_on_profile(m.diagonal(), &profile, &[construction]).map(|(r, _)| r)
}

/// `-(d || d)`: the diagonal of `M(2n, 2 xi, n / (2 xi))`.
pub fn doubled_negated(diagonal: &[f64]) -> Vec<f64> {
    diagonal.iter().chain(diagonal).map(|d| -d).collect()
}

/// Odd `n`: `beta_n(M(n, xi, 0)) >= -bound_m` with the bound computed on the
/// doubled, shifted `2n x 2n` matrix. The returned report is for that
/// matrix; the lower bound itself is `-report.bound_m`.
pub fn lower_bound_betamin(n: usize, xi: u64) -> Result<BoundReport> {
    if n % 2 == 0 {
        return Err(Error::InvalidArgument(
            "the doubled route needs odd n; use lower_bound_betamin_even".into(),
        ));
    }
    check_xi(n, xi)?;
    let m = build_harper(n, xi, 0.0)?;
    let profile = CosineProfile {
        n: 2 * n,
        xi: 2 * xi,
        alpha: n as f64 / (2.0 * xi as f64),
    };
    best_on_profile(
        &doubled_negated(m.diagonal()),
        &profile,
        &constructions_for(n, xi),
    )
    .map(|(r, _)| r)
}

/// Even `n`: `beta_n(M(n, xi, 0)) = -beta_1(M(n, xi, n / (2 xi)))`, whose
/// diagonal is `-d`.
pub fn lower_bound_betamin_even(n: usize, xi: u64) -> Result<BoundReport> {
    if n % 2 != 0 {
        return Err(Error::InvalidArgument("expected even n".into()));
    }
    check_xi(n, xi)?;
    let m = build_harper(n, xi, 0.0)?;
    let negated: Vec<f64> = m.diagonal().iter().map(|d| -d).collect();
    let profile = CosineProfile {
        n,
        xi,
        alpha: n as f64 / (2.0 * xi as f64),
    };
    best_on_profile(&negated, &profile, &constructions_for(n, xi)).map(|(r, _)| r)
}

/// Upper bound on `beta_1` for an arbitrary diagonal via [`generic_paths`].
pub fn upper_bound_general(diagonal: &[f64]) -> Result<BoundReport> {
    let chain = AbsorbingChain::from_diagonal(diagonal)?;
    path_constant(&chain, &generic_paths(&chain)?)
}

/// Lower bound on `beta_n` for an arbitrary diagonal: `-bound_m` of `-d`
/// (even length) or of `-(d || d)` (odd length).
pub fn lower_bound_general(diagonal: &[f64]) -> Result<f64> {
    let flipped: Vec<f64> = if diagonal.len() % 2 == 0 {
        diagonal.iter().map(|d| -d).collect()
    } else {
        doubled_negated(diagonal)
    };
    Ok(-upper_bound_general(&flipped)?.bound_m)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundRow {
    pub n: usize,
    pub xi: u64,
    pub bound_upper: f64,
    pub beta1_exact: f64,
    /// `(1 - bound_upper) / (1 - beta1_exact)`: share of the true gap certified.
    pub gap_ratio: f64,
    pub bound_lower: f64,
    pub betamin_exact: f64,
}

impl BoundRow {
    pub fn is_valid(&self) -> bool {
        self.bound_upper >= self.beta1_exact && self.bound_lower <= self.betamin_exact
    }
}

fn bound_row(n: usize, xi: u64) -> Result<BoundRow> {
    let upper = upper_bound_beta1(n, xi)?;
    let lower = if n % 2 == 1 {
        lower_bound_betamin(n, xi)?
    } else {
        lower_bound_betamin_even(n, xi)?
    };
    let vals = build_harper(n, xi, 0.0)?.eigenvalues()?;
    let beta1 = vals[0];
    Ok(BoundRow {
        n,
        xi,
        bound_upper: upper.bound_m,
        beta1_exact: beta1,
        gap_ratio: (1.0 - upper.bound_m) / (1.0 - beta1),
        bound_lower: -lower.bound_m,
        betamin_exact: vals[n - 1],
    })
}

/// Bounds against exact extremes for every `xi` given, in order.
pub fn bound_sweep(n: usize, xis: &[u64]) -> Result<Vec<BoundRow>> {
    xis.par_iter().map(|&xi| bound_row(n, xi)).collect()
}

/// The same row for an arbitrary diagonal (`xi` reported as 0).
/// Bound row for an arbitrary diagonal. When no site on one side has positive
/// absorption (every entry `+1/2`, or `-1/2` for the lower bound) no path
/// system exists and the row falls back to the trivial `|beta| <= 1`.
pub fn bound_row_general(diagonal: &[f64]) -> Result<BoundRow> {
    let n = diagonal.len();
    let upper = match upper_bound_general(diagonal) {
        Ok(r) => r.bound_m,
        Err(Error::InvalidPath { .. }) => 1.0,
        Err(e) => return Err(e),
    };
    let lower = match lower_bound_general(diagonal) {
        Ok(b) => b,
        Err(Error::InvalidPath { .. }) => -1.0,
        Err(e) => return Err(e),
    };
    let vals = build_general(n, diagonal)?.eigenvalues()?;
    Ok(BoundRow {
        n,
        xi: 0,
        bound_upper: upper,
        beta1_exact: vals[0],
        gap_ratio: (1.0 - upper) / (1.0 - vals[0]),
        bound_lower: lower,
        betamin_exact: vals[n - 1],
    })
}

pub fn write_bound_csv<W: Write>(rows: &[BoundRow], mut w: W) -> Result<()> {
    writeln!(
        w,
        "n,xi,bound_upper,beta1_exact,gap_ratio,bound_lower,betamin_exact"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            r.n, r.xi, r.bound_upper, r.beta1_exact, r.gap_ratio, r.bound_lower, r.betamin_exact
        )?;
    }
    Ok(())
}
