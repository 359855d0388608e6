// SPDX-License-Identifier: MIT OR Apache-2.0

//! Simulation of the limiting Gaussian objects behind the scan statistics:
//! stochastic integrals of monic Legendre polynomials against one Brownian
//! motion, the normalized process whose squared norm drives the
//! extreme-value asymptotics, and the trimmed-scan limit whose quantiles
//! have no closed form and are tabulated here by Monte Carlo.
//!
//! Stochastic integrals are left-endpoint Riemann-Stieltjes sums over
//! Brownian increments on a uniform grid, the exact Ito discretization for
//! deterministic integrands.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;

use crate::asymptotics::{correction_g, LimitLaw};
use crate::error::{Error, Result};
use crate::stream::{derive_seed, rng_from_seed};
use rand::Rng;
use rand_distr::StandardNormal;

/// Largest supported polynomial order for the limit basis.
pub const MAX_ORDER: usize = 6;

/// Monic orthogonal polynomial coefficients on [0, 1], ascending by power.
/// Generated once by exact rational Gram-Schmidt on the monomials (the
/// module tests regenerate them with rational arithmetic and compare).
const MONIC_COEFFS: [&[f64]; 7] = [
    &[1.0],
    &[-1.0 / 2.0, 1.0],
    &[1.0 / 6.0, -1.0, 1.0],
    &[-1.0 / 20.0, 3.0 / 5.0, -3.0 / 2.0, 1.0],
    &[1.0 / 70.0, -2.0 / 7.0, 9.0 / 7.0, -2.0, 1.0],
    &[-1.0 / 252.0, 5.0 / 42.0, -5.0 / 6.0, 20.0 / 9.0, -5.0 / 2.0, 1.0],
    &[
        1.0 / 924.0,
        -1.0 / 22.0,
        5.0 / 11.0,
        -20.0 / 11.0,
        75.0 / 22.0,
        -3.0,
        1.0,
    ],
];

/// Squared L2 norms of the monic polynomials on [0, 1]; the norm on [0, t]
/// scales as `t^{2i+1}` times these.
const MONIC_NORM2: [f64; 7] = [
    1.0,
    1.0 / 12.0,
    1.0 / 180.0,
    1.0 / 2_800.0,
    1.0 / 44_100.0,
    1.0 / 698_544.0,
    1.0 / 11_099_088.0,
];

/// Monic coefficient vector (ascending powers) of the degree-`i` orthogonal
/// polynomial on [0, 1].
pub fn legendre_monic(i: usize) -> Result<Vec<f64>> {
    if i > MAX_ORDER {
        return Err(Error::invalid(format!(
            "basis order {i} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    Ok(MONIC_COEFFS[i].to_vec())
}

/// The scale family `g_{i,t}(x) = t^i g_{i,1}(x/t)` of monic orthogonal
/// polynomials on [0, t], with its norms.
#[derive(Debug, Clone)]
pub struct LimitBasis {
    p: usize,
}

impl LimitBasis {
    pub fn new(p: usize) -> Result<Self> {
        if p > MAX_ORDER {
            return Err(Error::invalid(format!(
                "order {p} exceeds the supported maximum {MAX_ORDER}"
            )));
        }
        Ok(LimitBasis { p })
    }

    pub fn order(&self) -> usize {
        self.p
    }

    /// Coefficients of `g_{i,1}`, ascending; the leading entry is 1.
    pub fn coeffs(&self, i: usize) -> &'static [f64] {
        MONIC_COEFFS[i]
    }

    /// `int_0^t g_{i,t}^2 dx = t^{2i+1} int_0^1 g_{i,1}^2 dx`.
    pub fn norm2(&self, i: usize, t: f64) -> f64 {
        t.powi(2 * i as i32 + 1) * MONIC_NORM2[i]
    }

    /// Evaluates `g_{i,t}` at `x` through the scale law.
    pub fn eval(&self, i: usize, t: f64, x: f64) -> f64 {
        let u = x / t;
        let mut acc = 0.0;
        let mut pow = 1.0;
        for c in MONIC_COEFFS[i] {
            acc += c * pow;
            pow *= u;
        }
        acc * t.powi(i as i32)
    }
}

/// `C(t)`: moment matrix with entries `int_0^t x^{i+j} dx`.
pub fn c_matrix(p: usize, t: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p + 1, p + 1, |i, j| {
        let e = (i + j + 1) as i32;
        t.powi(e) / e as f64
    })
}

/// `C~(t)`: tail moment matrix with entries `int_t^1 x^{i+j} dx`.
pub fn c_tilde_matrix(p: usize, t: f64) -> DMatrix<f64> {
    DMatrix::from_fn(p + 1, p + 1, |i, j| {
        let e = (i + j + 1) as i32;
        (1.0 - t.powi(e)) / e as f64
    })
}

/// Brownian path discretization: `steps_per_unit` uniform increments per
/// unit of time up to `horizon`, and a master seed for the path streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub steps_per_unit: usize,
    pub horizon: f64,
    pub seed: u64,
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_unit == 0 {
            return Err(Error::invalid("steps_per_unit must be at least 1"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid(format!(
                "horizon must be positive and finite, got {}",
                self.horizon
            )));
        }
        Ok(())
    }
}

/// One march along a Brownian path: cumulative `Gamma_j(t) = int_0^t x^j dW`
/// for `j <= degree`, delivered at every grid point through a callback.
///
/// The callback receives `(grid_index, gamma)` after the increment ending at
/// `grid_index / steps_per_unit` has been absorbed.
fn march_path(
    degree: usize,
    last_index: usize,
    steps_per_unit: usize,
    rng: &mut impl Rng,
    mut visit: impl FnMut(usize, &[f64]),
) {
    let m = steps_per_unit as f64;
    let sqrt_dt = (1.0 / m).sqrt();
    let mut gamma = vec![0.0; degree + 1];
    for l in 0..last_index {
        let x = l as f64 / m;
        let z: f64 = rng.sample(StandardNormal);
        let dw = sqrt_dt * z;
        let mut pow = 1.0;
        for g in gamma.iter_mut() {
            *g += pow * dw;
            pow *= x;
        }
        visit(l + 1, &gamma);
    }
}

fn qhat_sup_path(
    basis: &LimitBasis,
    t_lo: f64,
    t_hi: f64,
    steps_per_unit: usize,
    rng: &mut impl Rng,
) -> f64 {
    let p = basis.order();
    let m = steps_per_unit as f64;
    let first_eval = (t_lo * m).ceil().max(1.0) as usize;
    let last_eval = (t_hi * m).floor() as usize;
    let inv_norm: Vec<f64> = (0..=p).map(|i| 1.0 / MONIC_NORM2[i].sqrt()).collect();

    let mut sup = f64::NEG_INFINITY;
    march_path(p, last_eval, steps_per_unit, rng, |idx, gamma| {
        if idx < first_eval {
            return;
        }
        let t = idx as f64 / m;
        // gamma_j / t^{j+1/2}, then combine with the monic coefficients
        let inv_t = 1.0 / t;
        let mut weight = inv_t.sqrt();
        let mut scaled = vec![0.0; p + 1];
        for (j, s) in scaled.iter_mut().enumerate() {
            *s = gamma[j] * weight;
            weight *= inv_t;
        }
        let mut value = 0.0;
        for i in 0..=p {
            let mut q = 0.0;
            for (j, c) in MONIC_COEFFS[i].iter().enumerate() {
                q += c * scaled[j];
            }
            q *= inv_norm[i];
            value += q * q;
        }
        sup = sup.max(value);
    });
    sup
}

/// One realization of the supremum over `[t_lo, t_hi]` of the squared norm
/// of the normalized limit process
/// `q_i(t) = int_0^t g_{i,t} dW / norm(i, t)`.
///
/// Requires at least 100 grid points inside the window.
pub fn simulate_qhat_sup(p: usize, t_lo: f64, t_hi: f64, path: &PathConfig) -> Result<f64> {
    let basis = LimitBasis::new(p)?;
    path.validate()?;
    if !(t_lo > 0.0 && t_lo < t_hi) {
        return Err(Error::invalid(format!(
            "need 0 < t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    if t_hi > path.horizon {
        return Err(Error::invalid(format!(
            "t_hi = {t_hi} beyond the configured horizon {}",
            path.horizon
        )));
    }
    let m = path.steps_per_unit as f64;
    let first = (t_lo * m).ceil().max(1.0) as usize;
    let last = (t_hi * m).floor() as usize;
    if last < first || last - first + 1 < 100 {
        return Err(Error::invalid(format!(
            "grid too coarse: {} points in [{t_lo}, {t_hi}] at {} steps per unit; need 100",
            if last >= first { last - first + 1 } else { 0 },
            path.steps_per_unit
        )));
    }
    let mut rng = rng_from_seed(path.seed);
    Ok(qhat_sup_path(&basis, t_lo, t_hi, path.steps_per_unit, &mut rng))
}

/// The scan window `[log^alpha n, n / log^beta n]` used for the
/// extreme-value checks; `alpha = beta = 1` is the default everywhere.
pub fn scan_window(n_effective: usize, alpha_exp: f64, beta_exp: f64) -> (f64, f64) {
    let ln_n = (n_effective as f64).ln();
    (ln_n.powf(alpha_exp), n_effective as f64 / ln_n.powf(beta_exp))
}

/// One empirical comparison of `P(max <= c)` against `P(xi <= c)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependencePoint {
    pub threshold: f64,
    /// Empirical cdf of the recentred max at the threshold.
    pub max_cdf: f64,
    /// Squared empirical cdf of the pooled half-sample suprema.
    pub squared_half_cdf: f64,
    /// Monte Carlo band: three combined binomial standard errors.
    pub tolerance: f64,
}

/// Goodness record of the two-independent-halves construction against the
/// double-exponential limit.
#[derive(Debug, Clone)]
pub struct GumbelCheck {
    pub p: usize,
    pub n_effective: usize,
    pub reps: usize,
    pub window: (f64, f64),
    /// Centering subtracted from the simulated maxima.
    pub location: f64,
    /// Kolmogorov-Smirnov distance of the recentred sample to
    /// `exp(-2 e^{-x/2})`.
    pub ks_distance: f64,
    pub empirical_median: f64,
    pub analytic_median: f64,
    pub independence: Vec<IndependencePoint>,
}

/// One-sample Kolmogorov-Smirnov distance against a cdf.
fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0_f64;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

fn ecdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|v| *v <= x) as f64 / sorted.len() as f64
}

/// Simulates the two independent half-sample suprema over the window
/// `[log n, n / log n]`, recentres their maximum by `g(n, p, 0)` and
/// reports distributional diagnostics against the double-exponential law.
///
/// Requires `reps >= 1000` and a path horizon covering the window.
pub fn gumbel_check(
    p: usize,
    n_effective: usize,
    reps: usize,
    path: &PathConfig,
) -> Result<GumbelCheck> {
    if reps < 1000 {
        return Err(Error::invalid(format!(
            "gumbel check needs at least 1000 replications, got {reps}"
        )));
    }
    let (a, b) = scan_window(n_effective, 1.0, 1.0);
    if path.horizon < b {
        return Err(Error::invalid(format!(
            "horizon {} below the scan window end {b:.3}; set horizon >= n/log n",
            path.horizon
        )));
    }
    let location = correction_g(n_effective, p, 0.0)?;

    let halves: Vec<(f64, f64)> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let xi = |half: u64| {
                let cfg = PathConfig {
                    seed: derive_seed(path.seed, &[rep as u64, half]),
                    ..*path
                };
                simulate_qhat_sup(p, a, b, &cfg)
            };
            Ok((xi(1)?, xi(2)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut maxes: Vec<f64> = halves
        .iter()
        .map(|(x1, x2)| x1.max(*x2) - location)
        .collect();
    maxes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut pooled: Vec<f64> = halves
        .iter()
        .flat_map(|(x1, x2)| [x1 - location, x2 - location])
        .collect();
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let law = LimitLaw { location: 0.0 };
    let independence = [0.5, 0.8]
        .iter()
        .map(|&q| {
            let threshold = empirical_quantile(&maxes, q);
            let max_cdf = ecdf(&maxes, threshold);
            let half_cdf = ecdf(&pooled, threshold);
            let se_max = (max_cdf * (1.0 - max_cdf) / reps as f64).sqrt();
            let se_sq = 2.0 * half_cdf * (half_cdf * (1.0 - half_cdf) / (2.0 * reps as f64)).sqrt();
            IndependencePoint {
                threshold,
                max_cdf,
                squared_half_cdf: half_cdf * half_cdf,
                tolerance: 3.0 * (se_max + se_sq),
            }
        })
        .collect();

    Ok(GumbelCheck {
        p,
        n_effective,
        reps,
        window: (a, b),
        location,
        ks_distance: ks_distance(&maxes, |x| law.cdf(x)),
        empirical_median: empirical_quantile(&maxes, 0.5),
        analytic_median: law.median(),
        independence,
    })
}

/// One row of a quantile table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileRow {
    pub level: f64,
    pub value: f64,
    /// Standard error from the binomial fluctuation of the quantile rank.
    pub mc_se: f64,
}

/// Monte Carlo quantiles of the trimmed-scan limit for one (p, delta).
#[derive(Debug, Clone)]
pub struct QuantileTable {
    pub p: usize,
    pub delta: f64,
    pub reps: usize,
    pub steps_per_unit: usize,
    pub seed: u64,
    pub rows: Vec<QuantileRow>,
}

pub const TABLE_LEVELS: [f64; 3] = [0.90, 0.95, 0.99];

/// Per-eval-point precomputation for the trimmed-limit quadratic form.
struct TrimmedGrid {
    dim: usize,
    eval: Vec<TrimmedPoint>,
    chol_h: Cholesky<f64, nalgebra::Dyn>,
}

struct TrimmedPoint {
    /// Grid index l, so t = l / m.
    index: usize,
    t: f64,
    /// C(t) entries, for the projection term C(t) C(1)^{-1} Gamma(1).
    c_t: DMatrix<f64>,
    /// Lower-triangular basis change: row i holds binom(i,a) t^{i-a} (1-t)^a.
    a_t: DMatrix<f64>,
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

impl TrimmedGrid {
    fn new(p: usize, delta: f64, steps_per_unit: usize) -> Result<Self> {
        let m = steps_per_unit as f64;
        let first = (delta * m).ceil() as usize;
        let last = ((1.0 - delta) * m).floor() as usize;
        if first < 1 || last >= steps_per_unit || first > last {
            return Err(Error::invalid(format!(
                "trimming delta = {delta} leaves no interior grid points at {steps_per_unit} steps"
            )));
        }
        let dim = p + 1;
        let hilbert = DMatrix::from_fn(dim, dim, |i, j| 1.0 / (i + j + 1) as f64);
        let chol_h = Cholesky::new(hilbert)
            .ok_or_else(|| Error::RankDeficient("moment matrix lost definiteness".into()))?;
        let eval = (first..=last)
            .map(|index| {
                let t = index as f64 / m;
                let a_t = DMatrix::from_fn(dim, dim, |i, a| {
                    if a > i {
                        0.0
                    } else {
                        binomial(i, a) * t.powi((i - a) as i32) * (1.0 - t).powi(a as i32)
                    }
                });
                TrimmedPoint {
                    index,
                    t,
                    c_t: c_matrix(p, t),
                    a_t,
                }
            })
            .collect();
        Ok(TrimmedGrid { dim, eval, chol_h })
    }

    /// Supremum over the trimmed window of
    /// `Delta^T (C(t)^{-1} + C~(t)^{-1}) Delta` for one path.
    fn sup_one_path(&self, p: usize, steps_per_unit: usize, seed: u64) -> f64 {
        let mut rng = rng_from_seed(seed);
        let mut snapshots: Vec<DVector<f64>> = Vec::with_capacity(self.eval.len());
        let mut gamma_one = DVector::zeros(self.dim);
        let mut next = 0usize;
        march_path(p, steps_per_unit, steps_per_unit, &mut rng, |idx, gamma| {
            if next < self.eval.len() && self.eval[next].index == idx {
                snapshots.push(DVector::from_row_slice(gamma));
                next += 1;
            }
            if idx == steps_per_unit {
                gamma_one = DVector::from_row_slice(gamma);
            }
        });

        let w = self.chol_h.solve(&gamma_one);
        let mut sup = f64::NEG_INFINITY;
        for (point, gamma_t) in self.eval.iter().zip(&snapshots) {
            let delta_t = gamma_t - &point.c_t * &w;
            // head factor: C(t) = t D_t H D_t with D_t = diag(t^i)
            let mut v1 = DVector::zeros(self.dim);
            let mut tpow = 1.0;
            for i in 0..self.dim {
                v1[i] = delta_t[i] / tpow;
                tpow *= point.t;
            }
            let term1 = v1.dot(&self.chol_h.solve(&v1)) / point.t;
            // tail factor: C~(t) = (1-t) A(t) H A(t)^T
            let v2 = point
                .a_t
                .solve_lower_triangular(&delta_t)
                .expect("A(t) has positive diagonal for t < 1");
            let term2 = v2.dot(&self.chol_h.solve(&v2)) / (1.0 - point.t);
            sup = sup.max(term1 + term2);
        }
        sup
    }
}

/// Simulates the trimmed-scan limit
/// `sup_{delta <= t <= 1-delta} Delta^T(t) C^{-1}(t) C(1) C~^{-1}(t) Delta(t)`
/// with `Delta(t) = Gamma(t) - C(t) C^{-1}(1) Gamma(1)`, and returns its
/// empirical 90/95/99% quantiles with Monte Carlo standard errors.
///
/// The quadratic form is evaluated as
/// `Delta^T C^{-1}(t) Delta + Delta^T C~^{-1}(t) Delta`, the expansion of
/// the displayed kernel under `C(1) = C(t) + C~(t)`.
pub fn simulate_trimmed_limit(
    p: usize,
    delta: f64,
    reps: usize,
    path: &PathConfig,
) -> Result<QuantileTable> {
    LimitBasis::new(p)?;
    path.validate()?;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::invalid(format!(
            "trimming fraction {delta} outside (0, 0.5)"
        )));
    }
    if reps < 100 {
        return Err(Error::invalid(format!(
            "need at least 100 replications for a quantile table, got {reps}"
        )));
    }
    if path.steps_per_unit < 1000 {
        return Err(Error::invalid(format!(
            "reported tables need at least 1000 grid steps per unit, got {}",
            path.steps_per_unit
        )));
    }
    if path.horizon < 1.0 {
        return Err(Error::invalid("horizon must cover [0, 1]"));
    }

    let grid = TrimmedGrid::new(p, delta, path.steps_per_unit)?;
    let mut draws: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| grid.sup_one_path(p, path.steps_per_unit, derive_seed(path.seed, &[rep as u64])))
        .collect();
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let rows = TABLE_LEVELS
        .iter()
        .map(|&level| {
            let value = empirical_quantile(&draws, level);
            let spread = (reps as f64 * level * (1.0 - level)).sqrt();
            let lo = ((level * reps as f64 - spread).round() as usize).clamp(1, reps);
            let hi = ((level * reps as f64 + spread).round() as usize).clamp(1, reps);
            QuantileRow {
                level,
                value,
                mc_se: (draws[hi - 1] - draws[lo - 1]) / 2.0,
            }
        })
        .collect();

    Ok(QuantileTable {
        p,
        delta,
        reps,
        steps_per_unit: path.steps_per_unit,
        seed: path.seed,
        rows,
    })
}

/// Discrete analogue of [`simulate_qhat_sup`]: with iid standard normal
/// weights, the maximum over integer `k` in the window of
/// `s_k^T D_k^{-1} s_k`, where `s_{k,i} = sum_{j<=k} j^i eps_j` and `D_k`
/// is the raw-power Gram matrix. Serves as an independent cross-check of
/// the continuous simulation.
pub fn discrete_sup_oracle(p: usize, n: usize, range: (f64, f64), seed: u64) -> Result<f64> {
    LimitBasis::new(p)?;
    if n < 100 {
        return Err(Error::invalid(format!("need n >= 100, got {n}")));
    }
    let (a, b) = range;
    if !(a > 0.0 && a < b && b <= n as f64) {
        return Err(Error::invalid(format!(
            "window [{a}, {b}] invalid for n = {n}"
        )));
    }
    let k_lo = (a.ceil() as usize).max(p + 1);
    let k_hi = b.floor() as usize;
    if k_lo > k_hi {
        return Err(Error::invalid(format!(
            "window [{a:.2}, {b:.2}] contains no usable k"
        )));
    }

    let dim = p + 1;
    let mut rng = rng_from_seed(seed);
    let mut s = vec![0.0; dim];
    let mut power_sums = vec![0.0; 2 * p + 1];
    let mut sup = f64::NEG_INFINITY;
    for k in 1..=k_hi {
        let j = k as f64;
        let z: f64 = rng.sample(StandardNormal);
        let mut pow = 1.0;
        for (i, si) in s.iter_mut().enumerate() {
            *si += pow * z;
            if i < power_sums.len() {
                power_sums[i] += pow;
            }
            pow *= j;
        }
        for (e, ps) in power_sums.iter_mut().enumerate().skip(dim) {
            *ps += j.powi(e as i32);
        }

        if k < k_lo {
            continue;
        }
        // rescale by k^{-(i+1/2)} so the Gram matrix is Hilbert-like
        let mut m = DMatrix::zeros(dim, dim);
        let mut u = DVector::zeros(dim);
        let sqrt_k = j.sqrt();
        let mut kpow = vec![1.0; 2 * p + 2];
        for e in 1..kpow.len() {
            kpow[e] = kpow[e - 1] * j;
        }
        for i in 0..dim {
            u[i] = s[i] / (kpow[i] * sqrt_k);
            for l in 0..dim {
                m[(i, l)] = power_sums[i + l] / kpow[i + l + 1];
            }
        }
        if let Some(chol) = Cholesky::new(m) {
            sup = sup.max(u.dot(&chol.solve(&u)));
        }
    }
    Ok(sup)
}
