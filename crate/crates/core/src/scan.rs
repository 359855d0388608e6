// SPDX-License-Identifier: MIT OR Apache-2.0

//! Split-point scans producing the break-test statistics.
//!
//! For every admissible split `k` the series is divided into `1..=k` and
//! `k+1..=n`. Two computation routes exist and are kept strictly separate
//! so they can cross-validate each other:
//!
//! * the *residual route* refits both segments per `k` and compares exact
//!   residual sums of squares against the full-sample fit (the
//!   log-likelihood-ratio statistic [`t_hat`]);
//! * the *score route* evaluates the quadratic form
//!   `S_k^T C_k^{-1} S_k + S_k^T C_tilde_k^{-1} S_k` from the full-sample
//!   score vector and the split Gram matrices ([`t_known_sigma`], the
//!   numerators of the variance-studentized variants, and the trimmed
//!   statistic).
//!
//! The two agree through the identity
//! `rss_full - (rss1(k) + rss2(k)) = quadratic form at k`, which the test
//! suite asserts on random instances.
//!
//! Conventions: natural logarithms throughout; minima/maxima take the
//! smallest attaining `k` on ties; a numerically zero residual sum is a
//! hard [`Error::DegenerateFit`], never an infinite statistic.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::regression::{fill_row, fit_segment, FitResult, Sample, Scaling};

/// Relative thresholds below which a residual sum of squares is treated as
/// numerically zero (data in the polynomial span). The first is relative to
/// the centered total sum of squares, the second catches numerically
/// constant series where the centered sum itself underflows.
const DEGENERATE_REL: f64 = 1e-20;
const DEGENERATE_ABS_REL: f64 = 1e-26;

/// How the admissible split range is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeMode {
    /// `p+2 ..= n-p-2`: one point trimmed from each end of the bare range,
    /// so every segment fit keeps at least one residual degree of freedom.
    /// The recommended default.
    PaperDefault,
    /// `p+1 ..= n-p-1`: every split with positive-definite Gram matrices.
    /// Valid only for score-route statistics; segment fits at the ends
    /// would interpolate.
    Bare,
    /// `floor(n*delta) ..= n - floor(n*delta)` for `delta` in (0, 1/2).
    Trimmed(f64),
}

/// Resolved inclusive split range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanRange {
    pub lo: usize,
    pub hi: usize,
}

impl ScanRange {
    pub fn resolve(mode: RangeMode, n: usize, p: usize) -> Result<ScanRange> {
        let range = match mode {
            RangeMode::PaperDefault => ScanRange {
                lo: p + 2,
                hi: n.saturating_sub(p + 2),
            },
            RangeMode::Bare => ScanRange {
                lo: p + 1,
                hi: n.saturating_sub(p + 1),
            },
            RangeMode::Trimmed(delta) => {
                if !(delta > 0.0 && delta < 0.5) {
                    return Err(Error::invalid(format!(
                        "trimming fraction {delta} outside (0, 0.5)"
                    )));
                }
                let cut = (n as f64 * delta).floor() as usize;
                if cut < p + 2 {
                    return Err(Error::invalid(format!(
                        "trimming cut floor(n*delta) = {cut} below {} needed for order {p}",
                        p + 2
                    )));
                }
                ScanRange {
                    lo: cut,
                    hi: n - cut,
                }
            }
        };
        if range.lo > range.hi {
            return Err(Error::invalid(format!(
                "empty split range {}..={} for n = {n}, p = {p}",
                range.lo, range.hi
            )));
        }
        Ok(range)
    }

    pub fn ks(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when every split leaves at least one residual degree of
    /// freedom on both sides, i.e. segment refits are admissible.
    fn fit_valid(&self, n: usize, p: usize) -> bool {
        self.lo >= p + 2 && self.hi + p + 2 <= n
    }
}

/// Which statistic a [`ScanResult`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Log-ratio of split to full residual sums, maximized over k.
    THat,
    /// Quadratic form divided by a known error variance.
    TKnownSigma,
    /// Quadratic form divided by the full-sample variance (divisor n).
    T1,
    /// Quadratic form studentized per split by the split variance sum.
    T2,
    /// Quadratic form divided by the smallest split variance sum.
    T3,
    /// Trimmed-range variant of [`Variant::T1`].
    TDelta,
}

impl Variant {
    pub fn label(self) -> &'static str {
        match self {
            Variant::THat => "t_hat",
            Variant::TKnownSigma => "t_known_sigma",
            Variant::T1 => "t1",
            Variant::T2 => "t2",
            Variant::T3 => "t3",
            Variant::TDelta => "t_delta",
        }
    }

    /// Whether `k_hat` minimizes the per-split criterion (only the
    /// log-ratio scan minimizes; all score-route criteria are maximized).
    pub fn minimizes_criterion(self) -> bool {
        matches!(self, Variant::THat)
    }
}

/// Per-split record. `rss1`/`rss2` are present only for variants whose
/// criterion involves segment refits; score-route variants leave them
/// unset rather than spending O(n) fits on diagnostics.
#[derive(Debug, Clone)]
pub struct SplitRecord {
    pub k: usize,
    pub rss1: Option<f64>,
    pub rss2: Option<f64>,
    pub criterion: f64,
}

/// Outcome of one scan.
#[derive(Debug, Clone)]
pub struct ScanResult {
    pub variant: Variant,
    pub per_k: Vec<SplitRecord>,
    /// Split attaining the extremal criterion; smallest such on ties.
    pub k_hat: usize,
    pub statistic: f64,
}

/// The three variance-studentized scan statistics, computed in one pass.
#[derive(Debug, Clone)]
pub struct TVariants {
    pub t1: ScanResult,
    pub t2: ScanResult,
    pub t3: ScanResult,
}

/// Marker for how the trimmed statistic studentizes; only estimation from
/// the full-sample residuals is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    Estimated,
}

fn degenerate_floor(sample: &Sample) -> f64 {
    let n = sample.n() as f64;
    let mean = sample.y().iter().sum::<f64>() / n;
    let tss: f64 = sample.y().iter().map(|v| (v - mean) * (v - mean)).sum();
    let sum_sq: f64 = sample.y().iter().map(|v| v * v).sum();
    DEGENERATE_REL * tss + DEGENERATE_ABS_REL * sum_sq
}

fn full_fit(sample: &Sample) -> Result<FitResult> {
    fit_segment(sample, 1, sample.n(), Scaling::Scaled)
}

fn require_fit_valid(range: &ScanRange, n: usize, p: usize) -> Result<()> {
    if !range.fit_valid(n, p) {
        return Err(Error::invalid(format!(
            "range {}..={} admits zero-degree-of-freedom segment fits for n = {n}, p = {p}; \
             use the default range or trim further",
            range.lo, range.hi
        )));
    }
    Ok(())
}

/// Residual route: exact split residual sums for every `k` in the range.
fn split_rss_profile(sample: &Sample, range: &ScanRange) -> Result<Vec<(f64, f64)>> {
    let n = sample.n();
    range
        .ks()
        .map(|k| {
            let left = fit_segment(sample, 1, k, Scaling::Scaled)?;
            let right = fit_segment(sample, k + 1, n, Scaling::Scaled)?;
            Ok((left.rss, right.rss))
        })
        .collect()
}

/// Score route: the quadratic form at every `k` in the range.
///
/// Both terms are evaluated in locally rescaled bases (powers of `i/k` for
/// the left factor, powers of `(n+1-i)/(n-k)` for the right factor) so the
/// Cholesky factorizations stay conditioned like small Hilbert matrices for
/// every admissible split; the quadratic form itself is invariant to any
/// invertible recombination of the regressor basis.
pub fn quad_form_profile(sample: &Sample, range: &ScanRange, scaling: Scaling) -> Result<Vec<f64>> {
    let n = sample.n();
    let p = sample.p();
    if range.lo < p + 1 || range.hi + p + 1 > n {
        return Err(Error::invalid(format!(
            "range {}..={} outside the positive-definite band {}..={}",
            range.lo,
            range.hi,
            p + 1,
            n - p - 1
        )));
    }

    let fit = fit_segment(sample, 1, n, scaling)?;
    let mut resid = vec![0.0; n];
    let mut row = vec![0.0; p + 1];
    for i in 1..=n {
        fill_row(&mut row, i, n, scaling);
        let fitted: f64 = (0..=p).map(|j| row[j] * fit.beta_hat[j]).sum();
        resid[i - 1] = sample.y()[i - 1] - fitted;
    }

    // Forward pass: cumulative score and Gram in the forward basis.
    let dim = p + 1;
    let mut scores_fwd = Vec::with_capacity(range.len());
    let mut grams_fwd = Vec::with_capacity(range.len());
    {
        let mut s = vec![0.0; dim];
        let mut c = vec![0.0; dim * dim];
        for i in 1..=range.hi {
            fill_row(&mut row, i, n, scaling);
            for a in 0..dim {
                s[a] += row[a] * resid[i - 1];
                for b in a..dim {
                    c[a * dim + b] += row[a] * row[b];
                }
            }
            if i >= range.lo {
                scores_fwd.push(s.clone());
                grams_fwd.push(c.clone());
            }
        }
    }

    // Backward pass: the same accumulations over i > k in the reversed
    // basis, powers of (n+1-i)/n (or n+1-i raw). The reversed basis spans
    // the same polynomials row-wise, so the quadratic form is unchanged.
    let mut scores_rev = vec![vec![]; range.len()];
    let mut grams_rev = vec![vec![]; range.len()];
    {
        let mut s = vec![0.0; dim];
        let mut c = vec![0.0; dim * dim];
        for i in (range.lo + 1..=n).rev() {
            fill_row(&mut row, n + 1 - i, n, scaling);
            for a in 0..dim {
                s[a] += row[a] * resid[i - 1];
                for b in a..dim {
                    c[a * dim + b] += row[a] * row[b];
                }
            }
            if i - 1 <= range.hi && i - 1 >= range.lo {
                let idx = i - 1 - range.lo;
                scores_rev[idx] = s.clone();
                grams_rev[idx] = c.clone();
            }
        }
    }

    // Per split: rescale each factor to unit index range and solve.
    let unit = |len: usize| -> f64 {
        match scaling {
            Scaling::Scaled => n as f64 / len as f64,
            Scaling::Raw => 1.0 / len as f64,
        }
    };
    let term = |s: &[f64], c: &[f64], scale: f64, side: &str, k: usize| -> Result<f64> {
        let mut powers = vec![1.0; dim];
        for j in 1..dim {
            powers[j] = powers[j - 1] * scale;
        }
        let mut m = DMatrix::zeros(dim, dim);
        let mut u = DVector::zeros(dim);
        for a in 0..dim {
            u[a] = s[a] * powers[a];
            for b in a..dim {
                let v = c[a * dim + b] * powers[a] * powers[b];
                m[(a, b)] = v;
                m[(b, a)] = v;
            }
        }
        let chol = Cholesky::new(m).ok_or_else(|| {
            Error::RankDeficient(format!(
                "split Gram matrix not positive definite on the {side} of k = {k}"
            ))
        })?;
        Ok(u.dot(&chol.solve(&u)))
    };

    range
        .ks()
        .enumerate()
        .map(|(idx, k)| {
            let left = term(&scores_fwd[idx], &grams_fwd[idx], unit(k), "left", k)?;
            let right = term(&scores_rev[idx], &grams_rev[idx], unit(n - k), "right", k)?;
            Ok(left + right)
        })
        .collect()
}

fn extremum(records: &[SplitRecord], minimize: bool) -> (usize, f64) {
    let mut best_k = records[0].k;
    let mut best = records[0].criterion;
    for r in &records[1..] {
        let better = if minimize {
            r.criterion < best
        } else {
            r.criterion > best
        };
        if better {
            best = r.criterion;
            best_k = r.k;
        }
    }
    (best_k, best)
}

/// The likelihood-ratio scan with estimated error variance:
/// `-n * [ min_k log(rss1(k) + rss2(k)) - log(rss_full) ]`.
///
/// Residual sums enter exactly as computed by the segment fits; nothing is
/// reconstructed from degrees-of-freedom-divided standard errors.
pub fn t_hat(sample: &Sample, mode: RangeMode) -> Result<ScanResult> {
    let n = sample.n();
    let p = sample.p();
    let range = ScanRange::resolve(mode, n, p)?;
    require_fit_valid(&range, n, p)?;

    let floor = degenerate_floor(sample);
    let full = full_fit(sample)?;
    if full.rss <= floor {
        return Err(Error::degenerate(
            "full-sample residual sum is numerically zero; the series lies in the polynomial span",
        ));
    }

    let profile = split_rss_profile(sample, &range)?;
    let mut per_k = Vec::with_capacity(profile.len());
    for (k, (rss1, rss2)) in range.ks().zip(&profile) {
        let v = rss1 + rss2;
        if v <= floor {
            return Err(Error::degenerate(format!(
                "split residual sum at k = {k} is numerically zero; both segments lie in the polynomial span"
            )));
        }
        per_k.push(SplitRecord {
            k,
            rss1: Some(*rss1),
            rss2: Some(*rss2),
            criterion: v.ln(),
        });
    }

    let (k_hat, min_log) = extremum(&per_k, true);
    Ok(ScanResult {
        variant: Variant::THat,
        per_k,
        k_hat,
        statistic: -(n as f64) * (min_log - full.rss.ln()),
    })
}

/// The scan statistic with known error variance: the maximal quadratic
/// form divided by `sigma2`.
pub fn t_known_sigma(sample: &Sample, sigma2: f64, mode: RangeMode) -> Result<ScanResult> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::invalid(format!(
            "error variance must be a positive finite number, got {sigma2}"
        )));
    }
    let range = ScanRange::resolve(mode, sample.n(), sample.p())?;
    let quad = quad_form_profile(sample, &range, Scaling::Scaled)?;
    let per_k: Vec<SplitRecord> = range
        .ks()
        .zip(&quad)
        .map(|(k, q)| SplitRecord {
            k,
            rss1: None,
            rss2: None,
            criterion: *q,
        })
        .collect();
    let (k_hat, max_q) = extremum(&per_k, false);
    Ok(ScanResult {
        variant: Variant::TKnownSigma,
        per_k,
        k_hat,
        statistic: max_q / sigma2,
    })
}

/// The three studentized scans, sharing one residual and one score pass.
///
/// All variances use the divisor-n convention: `sigma2_div_n = rss / n`
/// with `n` the full series length, for the full sample and for each split
/// sum alike.
pub fn t_variants(sample: &Sample, mode: RangeMode) -> Result<TVariants> {
    let n = sample.n();
    let p = sample.p();
    let range = ScanRange::resolve(mode, n, p)?;
    require_fit_valid(&range, n, p)?;

    let floor = degenerate_floor(sample);
    let full = full_fit(sample)?;
    if full.rss <= floor {
        return Err(Error::degenerate(
            "full-sample residual sum is numerically zero; variance estimate undefined",
        ));
    }
    let sigma2_div_n = full.rss / n as f64;

    let rss = split_rss_profile(sample, &range)?;
    let quad = quad_form_profile(sample, &range, Scaling::Scaled)?;

    let mut per_k_quad = Vec::with_capacity(rss.len());
    let mut per_k_ratio = Vec::with_capacity(rss.len());
    let mut min_split_var = f64::INFINITY;
    for ((k, (rss1, rss2)), q) in range.ks().zip(&rss).zip(&quad) {
        let split_sum = rss1 + rss2;
        if split_sum <= floor {
            return Err(Error::degenerate(format!(
                "split residual sum at k = {k} is numerically zero; studentization undefined"
            )));
        }
        let split_var_div_n = split_sum / n as f64;
        min_split_var = min_split_var.min(split_var_div_n);
        per_k_quad.push(SplitRecord {
            k,
            rss1: Some(*rss1),
            rss2: Some(*rss2),
            criterion: *q,
        });
        per_k_ratio.push(SplitRecord {
            k,
            rss1: Some(*rss1),
            rss2: Some(*rss2),
            criterion: q / split_var_div_n,
        });
    }

    let (k_quad, max_quad) = extremum(&per_k_quad, false);
    let (k_ratio, max_ratio) = extremum(&per_k_ratio, false);

    let t1 = ScanResult {
        variant: Variant::T1,
        per_k: per_k_quad.clone(),
        k_hat: k_quad,
        statistic: max_quad / sigma2_div_n,
    };
    let t2 = ScanResult {
        variant: Variant::T2,
        per_k: per_k_ratio,
        k_hat: k_ratio,
        statistic: max_ratio,
    };
    let t3 = ScanResult {
        variant: Variant::T3,
        per_k: per_k_quad,
        k_hat: k_quad,
        statistic: max_quad / min_split_var,
    };
    Ok(TVariants { t1, t2, t3 })
}

/// The trimmed scan: the maximal quadratic form over
/// `floor(n*delta) ..= n - floor(n*delta)`, divided by the full-sample
/// divisor-n variance.
pub fn t_trimmed(sample: &Sample, delta: f64, _sigma: SigmaMode) -> Result<ScanResult> {
    let n = sample.n();
    let range = ScanRange::resolve(RangeMode::Trimmed(delta), n, sample.p())?;

    let floor = degenerate_floor(sample);
    let full = full_fit(sample)?;
    if full.rss <= floor {
        return Err(Error::degenerate(
            "full-sample residual sum is numerically zero; variance estimate undefined",
        ));
    }
    let sigma2_div_n = full.rss / n as f64;

    let quad = quad_form_profile(sample, &range, Scaling::Scaled)?;
    let per_k: Vec<SplitRecord> = range
        .ks()
        .zip(&quad)
        .map(|(k, q)| SplitRecord {
            k,
            rss1: None,
            rss2: None,
            criterion: *q,
        })
        .collect();
    let (k_hat, max_q) = extremum(&per_k, false);
    Ok(ScanResult {
        variant: Variant::TDelta,
        per_k,
        k_hat,
        statistic: max_q / sigma2_div_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn noise_sample(seed: u64, n: usize, p: usize) -> Sample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        Sample::new(y, p).unwrap()
    }

    #[test]
    fn range_resolution() {
        let r = ScanRange::resolve(RangeMode::PaperDefault, 20, 1).unwrap();
        assert_eq!((r.lo, r.hi), (3, 17));
        let r = ScanRange::resolve(RangeMode::Bare, 20, 1).unwrap();
        assert_eq!((r.lo, r.hi), (2, 18));
        let r = ScanRange::resolve(RangeMode::Trimmed(0.2), 20, 1).unwrap();
        assert_eq!((r.lo, r.hi), (4, 16));
        assert!(ScanRange::resolve(RangeMode::Trimmed(0.05), 20, 1).is_err());
        assert!(ScanRange::resolve(RangeMode::Trimmed(0.6), 20, 1).is_err());
    }

    #[test]
    fn t_hat_rejects_polynomial_data() {
        let n = 20;
        let y: Vec<f64> = (1..=n).map(|i| 1.0 + 3.0 * i as f64 / n as f64).collect();
        let sample = Sample::new(y, 1).unwrap();
        assert!(matches!(
            t_hat(&sample, RangeMode::PaperDefault),
            Err(Error::DegenerateFit(_))
        ));
    }

    #[test]
    fn t_hat_rejects_bare_range() {
        let sample = noise_sample(3, 20, 1);
        assert!(matches!(
            t_hat(&sample, RangeMode::Bare),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn t_hat_shift_and_scale_invariance() {
        let n = 40;
        let p = 1;
        let sample = noise_sample(5, n, p);
        let base = t_hat(&sample, RangeMode::PaperDefault).unwrap();

        let shifted: Vec<f64> = sample
            .y()
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let t = (idx + 1) as f64 / n as f64;
                v + 4.0 - 2.5 * t
            })
            .collect();
        let shifted = t_hat(&Sample::new(shifted, p).unwrap(), RangeMode::PaperDefault).unwrap();
        assert!((base.statistic - shifted.statistic).abs() <= 1e-8);
        assert_eq!(base.k_hat, shifted.k_hat);

        let scaled: Vec<f64> = sample.y().iter().map(|v| 7.25 * v).collect();
        let scaled = t_hat(&Sample::new(scaled, p).unwrap(), RangeMode::PaperDefault).unwrap();
        assert!((base.statistic - scaled.statistic).abs() <= 1e-8);
        assert_eq!(base.k_hat, scaled.k_hat);
    }

    #[test]
    fn k_hat_reverses_with_the_series() {
        for seed in [2u64, 9, 31] {
            let n = 36;
            let p = 1;
            let sample = noise_sample(seed, n, p);
            let forward = t_hat(&sample, RangeMode::PaperDefault).unwrap();
            let reversed: Vec<f64> = sample.y().iter().rev().copied().collect();
            let reversed = t_hat(&Sample::new(reversed, p).unwrap(), RangeMode::PaperDefault).unwrap();

            // Compare near-minimizer sets to stay robust to rounding ties.
            let near_set = |r: &ScanResult| -> Vec<usize> {
                let best = r
                    .per_k
                    .iter()
                    .map(|rec| rec.criterion)
                    .fold(f64::INFINITY, f64::min);
                r.per_k
                    .iter()
                    .filter(|rec| rec.criterion <= best + 1e-10 * best.abs().max(1.0))
                    .map(|rec| rec.k)
                    .collect()
            };
            let fwd: Vec<usize> = near_set(&forward);
            let mut rev_mapped: Vec<usize> = near_set(&reversed).iter().map(|k| n - k).collect();
            rev_mapped.sort_unstable();
            assert_eq!(fwd, rev_mapped, "seed {seed}");
            assert!((forward.statistic - reversed.statistic).abs() <= 1e-6);
        }
    }

    #[test]
    fn known_sigma_scales_inversely() {
        let sample = noise_sample(17, 30, 1);
        let one = t_known_sigma(&sample, 1.0, RangeMode::PaperDefault).unwrap();
        let two = t_known_sigma(&sample, 2.0, RangeMode::PaperDefault).unwrap();
        assert!((one.statistic / two.statistic - 2.0).abs() < 1e-12);
        assert_eq!(one.k_hat, two.k_hat);
    }

    #[test]
    fn known_sigma_matches_raw_scaling() {
        let sample = noise_sample(21, 24, 2);
        let range = ScanRange::resolve(RangeMode::Bare, 24, 2).unwrap();
        let scaled = quad_form_profile(&sample, &range, Scaling::Scaled).unwrap();
        let raw = quad_form_profile(&sample, &range, Scaling::Raw).unwrap();
        for (a, b) in scaled.iter().zip(&raw) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-12));
        }
    }

    #[test]
    fn variants_are_scale_invariant() {
        let sample = noise_sample(29, 30, 1);
        let base = t_variants(&sample, RangeMode::PaperDefault).unwrap();
        let scaled: Vec<f64> = sample.y().iter().map(|v| 0.125 * v).collect();
        let scaled = t_variants(&Sample::new(scaled, 1).unwrap(), RangeMode::PaperDefault).unwrap();
        for (a, b) in [
            (&base.t1, &scaled.t1),
            (&base.t2, &scaled.t2),
            (&base.t3, &scaled.t3),
        ] {
            assert!((a.statistic - b.statistic).abs() <= 1e-8 * a.statistic.max(1.0));
            assert_eq!(a.k_hat, b.k_hat);
        }
    }

    #[test]
    fn trimmed_is_bounded_by_t1() {
        let sample = noise_sample(41, 60, 1);
        let trimmed = t_trimmed(&sample, 0.15, SigmaMode::Estimated).unwrap();
        let variants = t_variants(&sample, RangeMode::PaperDefault).unwrap();
        assert!(trimmed.statistic <= variants.t1.statistic + 1e-12);
    }

    #[test]
    fn trimmed_range_can_shrink_to_the_central_splits() {
        // floor(n*delta) < n/2 forces hi - lo >= 1, so the tightest trim
        // leaves the two central splits; the statistic is their larger
        // normalized form.
        let n = 17;
        let sample = noise_sample(43, n, 1);
        let trimmed = t_trimmed(&sample, 0.49, SigmaMode::Estimated).unwrap();
        assert_eq!(trimmed.per_k.len(), 2);
        assert_eq!(
            trimmed.per_k.iter().map(|r| r.k).collect::<Vec<_>>(),
            vec![8, 9]
        );
        let best = trimmed
            .per_k
            .iter()
            .map(|r| r.criterion)
            .fold(f64::NEG_INFINITY, f64::max);
        let full = full_fit(&sample).unwrap();
        assert!((trimmed.statistic - best / (full.rss / n as f64)).abs() <= 1e-12);
    }

    #[test]
    fn monotone_in_range() {
        let sample = noise_sample(47, 40, 1);
        let t_paper = t_hat(&sample, RangeMode::PaperDefault).unwrap();
        let t_trim = t_hat(&sample, RangeMode::Trimmed(0.2)).unwrap();
        assert!(t_trim.statistic <= t_paper.statistic + 1e-12);
    }
}
