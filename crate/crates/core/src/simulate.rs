// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded data generation and the Monte Carlo engine for empirical size
//! and power studies.
//!
//! Series follow `y_i = x_i^T beta(i) + eps_i` where `beta(i)` either stays
//! at `beta0` (the stable regime) or switches to an alternative vector
//! after an unknown break position. Error generators beyond iid normal
//! (scaled Student t, AR(1), GARCH(1,1)) are diagnostics: the studied
//! statistics assume uncorrelated constant-variance errors, and deviations
//! under correlated noise are something the reports record rather than
//! hide.
//!
//! Replication `r` of run `n` draws from the stream
//! `derive_seed(master, [n, r])`, so reports are bit-reproducible for a
//! fixed seed regardless of thread count.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use rayon::prelude::*;

use crate::asymptotics::{critical_value, default_gamma, CriticalValueSpec};
use crate::error::{Error, Result};
use crate::regression::Sample;
use crate::scan::{t_hat, RangeMode};
use crate::stream::{derive_seed, rng_from_seed};

/// Break position, either absolute or as a fraction of the series length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KStar {
    Index(usize),
    /// `floor(n * fraction)`; lets one configuration cover a whole list of
    /// series lengths (the usual n/2 and n/5 placements).
    Fraction(f64),
}

impl KStar {
    pub fn resolve(&self, n: usize) -> Result<usize> {
        let k = match *self {
            KStar::Index(k) => k,
            KStar::Fraction(f) => {
                if !(f > 0.0 && f < 1.0) {
                    return Err(Error::invalid(format!(
                        "break fraction {f} outside (0, 1)"
                    )));
                }
                (n as f64 * f).floor() as usize
            }
        };
        if k < 1 || k >= n {
            return Err(Error::invalid(format!(
                "break position {k} outside 1..{n}"
            )));
        }
        Ok(k)
    }
}

/// Coefficient regime switch at an unknown position.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakSpec {
    pub beta_a: Vec<f64>,
    pub k_star: KStar,
}

/// Stable coefficients plus an optional break.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeModel {
    pub beta0: Vec<f64>,
    pub break_spec: Option<BreakSpec>,
}

impl ChangeModel {
    pub fn stable(beta0: Vec<f64>) -> Result<Self> {
        let model = ChangeModel {
            beta0,
            break_spec: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn with_break(beta0: Vec<f64>, beta_a: Vec<f64>, k_star: KStar) -> Result<Self> {
        let model = ChangeModel {
            beta0,
            break_spec: Some(BreakSpec { beta_a, k_star }),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta0.is_empty() || self.beta0.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("beta0 must be non-empty and finite"));
        }
        if let Some(spec) = &self.break_spec {
            if spec.beta_a.len() != self.beta0.len() {
                return Err(Error::invalid(format!(
                    "betaA has {} coefficients, beta0 has {}",
                    spec.beta_a.len(),
                    self.beta0.len()
                )));
            }
            if spec.beta_a.iter().any(|b| !b.is_finite()) {
                return Err(Error::invalid("betaA must be finite"));
            }
            if spec.beta_a == self.beta0 {
                return Err(Error::invalid("betaA equals beta0: no break to detect"));
            }
        }
        Ok(())
    }

    /// Polynomial order implied by the coefficient vectors.
    pub fn order(&self) -> usize {
        self.beta0.len() - 1
    }
}

/// Error generators. All parameters are validated before use; each kind has
/// a closed-form marginal variance so unit-variance versions are available.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorModel {
    IidNormal {
        sigma: f64,
    },
    /// Student t rescaled to variance `sigma^2` (requires `nu > 2`).
    IidStudentT {
        nu: f64,
        sigma: f64,
    },
    /// `eps_i = phi eps_{i-1} + sigma z_i`, started from the stationary law.
    Ar1 {
        phi: f64,
        sigma: f64,
    },
    /// `eps_i = sqrt(h_i) z_i`, `h_i = omega + alpha eps_{i-1}^2 + beta h_{i-1}`,
    /// started from the stationary variance.
    Garch11 {
        omega: f64,
        alpha: f64,
        beta: f64,
    },
}

impl ErrorModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ErrorModel::IidNormal { sigma } => sigma > 0.0 && sigma.is_finite(),
            ErrorModel::IidStudentT { nu, sigma } => {
                nu > 2.0 && nu.is_finite() && sigma > 0.0 && sigma.is_finite()
            }
            ErrorModel::Ar1 { phi, sigma } => {
                phi.abs() < 1.0 && sigma > 0.0 && sigma.is_finite()
            }
            ErrorModel::Garch11 { omega, alpha, beta } => {
                omega > 0.0 && omega.is_finite() && alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("error model parameters invalid: {self:?}")))
        }
    }

    /// Marginal (stationary) variance of the generated errors.
    pub fn marginal_variance(&self) -> f64 {
        match *self {
            ErrorModel::IidNormal { sigma } => sigma * sigma,
            ErrorModel::IidStudentT { sigma, .. } => sigma * sigma,
            ErrorModel::Ar1 { phi, sigma } => sigma * sigma / (1.0 - phi * phi),
            ErrorModel::Garch11 { omega, alpha, beta } => omega / (1.0 - alpha - beta),
        }
    }

    /// The same generator rescaled to unit marginal variance.
    pub fn normalized_to_unit_variance(&self) -> ErrorModel {
        match *self {
            ErrorModel::IidNormal { .. } => ErrorModel::IidNormal { sigma: 1.0 },
            ErrorModel::IidStudentT { nu, .. } => ErrorModel::IidStudentT { nu, sigma: 1.0 },
            ErrorModel::Ar1 { phi, .. } => ErrorModel::Ar1 {
                phi,
                sigma: (1.0 - phi * phi).sqrt(),
            },
            ErrorModel::Garch11 { alpha, beta, .. } => ErrorModel::Garch11 {
                omega: 1.0 - alpha - beta,
                alpha,
                beta,
            },
        }
    }

    fn draw(&self, n: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
        self.validate()?;
        let mut eps = Vec::with_capacity(n);
        match *self {
            ErrorModel::IidNormal { sigma } => {
                for _ in 0..n {
                    let z: f64 = rng.sample(StandardNormal);
                    eps.push(sigma * z);
                }
            }
            ErrorModel::IidStudentT { nu, sigma } => {
                let t = StudentT::new(nu)
                    .map_err(|e| Error::invalid(format!("student t: {e}")))?;
                let scale = sigma * ((nu - 2.0) / nu).sqrt();
                for _ in 0..n {
                    eps.push(scale * t.sample(rng));
                }
            }
            ErrorModel::Ar1 { phi, sigma } => {
                let z0: f64 = rng.sample(StandardNormal);
                let mut prev = sigma / (1.0 - phi * phi).sqrt() * z0;
                eps.push(prev);
                for _ in 1..n {
                    let z: f64 = rng.sample(StandardNormal);
                    prev = phi * prev + sigma * z;
                    eps.push(prev);
                }
            }
            ErrorModel::Garch11 { omega, alpha, beta } => {
                let mut h = omega / (1.0 - alpha - beta);
                let mut prev_sq = h;
                for i in 0..n {
                    if i > 0 {
                        h = omega + alpha * prev_sq + beta * h;
                    }
                    let z: f64 = rng.sample(StandardNormal);
                    let e = h.sqrt() * z;
                    prev_sq = e * e;
                    eps.push(e);
                }
            }
        }
        Ok(eps)
    }
}

/// Generates one series of length `n` under the model. Identical seeds give
/// bit-identical series.
pub fn generate(n: usize, model: &ChangeModel, errors: &ErrorModel, seed: u64) -> Result<Sample> {
    model.validate()?;
    errors.validate()?;
    let p = model.order();
    let k_star = model
        .break_spec
        .as_ref()
        .map(|b| b.k_star.resolve(n))
        .transpose()?;

    let mut rng = rng_from_seed(seed);
    let eps = errors.draw(n, &mut rng)?;

    let mut y = Vec::with_capacity(n);
    for i in 1..=n {
        let beta = match (&model.break_spec, k_star) {
            (Some(spec), Some(ks)) if i > ks => &spec.beta_a,
            _ => &model.beta0,
        };
        let t = i as f64 / n as f64;
        let mut mean = 0.0;
        let mut pow = 1.0;
        for b in beta {
            mean += b * pow;
            pow *= t;
        }
        y.push(mean + eps[i - 1]);
    }
    Sample::new(y, p)
}

/// Gamma handling for the Monte Carlo runs: resolved per order or pinned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaChoice {
    Auto,
    Fixed(f64),
}

/// Full description of a size/power experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub reps: usize,
    pub n_list: Vec<usize>,
    pub p: usize,
    pub gamma: GammaChoice,
    pub change: ChangeModel,
    pub errors: ErrorModel,
    pub alphas: Vec<f64>,
    pub range: RangeMode,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps < 100 {
            return Err(Error::invalid(format!(
                "reps = {} too small for a reported table; need at least 100",
                self.reps
            )));
        }
        if self.n_list.is_empty() {
            return Err(Error::invalid("n_list must not be empty"));
        }
        self.change.validate()?;
        self.errors.validate()?;
        if self.change.order() != self.p {
            return Err(Error::invalid(format!(
                "p = {} does not match beta0 of order {}",
                self.p,
                self.change.order()
            )));
        }
        for &n in &self.n_list {
            if n < 2 * self.p + 6 {
                return Err(Error::invalid(format!(
                    "n = {n} below minimum {} for p = {}",
                    2 * self.p + 6,
                    self.p
                )));
            }
            if let Some(spec) = &self.change.break_spec {
                spec.k_star.resolve(n)?;
            }
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
            return Err(Error::invalid("alphas must be a non-empty list inside (0, 1)"));
        }
        Ok(())
    }

    fn resolved_gamma(&self) -> (f64, bool) {
        match self.gamma {
            GammaChoice::Fixed(g) => (g, false),
            GammaChoice::Auto => {
                let policy = default_gamma(self.p);
                (policy.value, policy.calibrated)
            }
        }
    }
}

/// One (n, alpha) cell of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub alpha: f64,
    pub critical_value: f64,
    pub rejections: usize,
    /// Rejection percentage over all replications.
    pub rate_pct: f64,
    /// Binomial Monte Carlo standard error of the rate, in percentage points.
    pub mc_se_pct: f64,
}

/// Per-series-length block of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub n: usize,
    /// Resolved break position (power studies only).
    pub k_star: Option<usize>,
    pub reps: usize,
    /// Replications aborted by a numerically zero residual sum. Counted
    /// and excluded from the statistic pool, never silently dropped.
    pub degenerate: usize,
    pub k_hat_mean: Option<f64>,
    pub k_hat_median: Option<f64>,
    pub cells: Vec<CellReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    Size,
    Power,
}

/// Outcome of a full experiment; a pure function of its config.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub mode: SimMode,
    pub config: SimConfig,
    pub gamma_used: f64,
    pub gamma_calibrated: bool,
    pub runs: Vec<RunReport>,
}

enum RepOutcome {
    Stat { statistic: f64, k_hat: usize },
    Degenerate,
}

fn run_one_n(config: &SimConfig, n: usize, gamma: f64) -> Result<RunReport> {
    let k_star = config
        .change
        .break_spec
        .as_ref()
        .map(|b| b.k_star.resolve(n))
        .transpose()?;

    let outcomes: Vec<Result<RepOutcome>> = (0..config.reps)
        .into_par_iter()
        .map(|rep| {
            let seed = derive_seed(config.seed, &[n as u64, rep as u64]);
            let sample = generate(n, &config.change, &config.errors, seed)?;
            match t_hat(&sample, config.range) {
                Ok(result) => Ok(RepOutcome::Stat {
                    statistic: result.statistic,
                    k_hat: result.k_hat,
                }),
                Err(Error::DegenerateFit(_)) => Ok(RepOutcome::Degenerate),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut statistics = Vec::with_capacity(config.reps);
    let mut k_hats = Vec::new();
    let mut degenerate = 0usize;
    for outcome in outcomes {
        match outcome? {
            RepOutcome::Stat { statistic, k_hat } => {
                statistics.push(statistic);
                k_hats.push(k_hat);
            }
            RepOutcome::Degenerate => degenerate += 1,
        }
    }

    let cells = config
        .alphas
        .iter()
        .map(|&alpha| {
            let c = critical_value(&CriticalValueSpec {
                n,
                p: config.p,
                gamma,
                alpha,
            })?;
            let rejections = statistics.iter().filter(|t| **t > c).count();
            let rate = rejections as f64 / config.reps as f64;
            Ok(CellReport {
                alpha,
                critical_value: c,
                rejections,
                rate_pct: 100.0 * rate,
                mc_se_pct: 100.0 * (rate * (1.0 - rate) / config.reps as f64).sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (k_hat_mean, k_hat_median) = if k_star.is_some() && !k_hats.is_empty() {
        let mut sorted = k_hats.clone();
        sorted.sort_unstable();
        let mean = sorted.iter().sum::<usize>() as f64 / sorted.len() as f64;
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid] as f64
        } else {
            (sorted[mid - 1] + sorted[mid]) as f64 / 2.0
        };
        (Some(mean), Some(median))
    } else {
        (None, None)
    };

    Ok(RunReport {
        n,
        k_star,
        reps: config.reps,
        degenerate,
        k_hat_mean,
        k_hat_median,
        cells,
    })
}

fn run(config: &SimConfig, mode: SimMode) -> Result<SimReport> {
    config.validate()?;
    let (gamma, gamma_calibrated) = config.resolved_gamma();
    let runs = config
        .n_list
        .iter()
        .map(|&n| run_one_n(config, n, gamma))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimReport {
        mode,
        config: config.clone(),
        gamma_used: gamma,
        gamma_calibrated,
        runs,
    })
}

/// Empirical size study: rejection rates under the stable model.
pub fn run_size(config: &SimConfig) -> Result<SimReport> {
    if config.change.break_spec.is_some() {
        return Err(Error::invalid(
            "size study requires a stable change model (no betaA)",
        ));
    }
    run(config, SimMode::Size)
}

/// Empirical power study: rejection rates plus break-estimate summaries
/// under a coefficient switch.
pub fn run_power(config: &SimConfig) -> Result<SimReport> {
    if config.change.break_spec.is_none() {
        return Err(Error::invalid("power study requires betaA and a break position"));
    }
    run(config, SimMode::Power)
}

/// One row of plot data: abscissa i/n, response, regime id (1 before the
/// break, 2 after).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub regime: u8,
}

/// Emits the (i/n, y_i, regime) triples of a series for external plotting.
pub fn scatter_dump(sample: &Sample, model: &ChangeModel) -> Result<Vec<ScatterPoint>> {
    let n = sample.n();
    let k_star = model
        .break_spec
        .as_ref()
        .map(|b| b.k_star.resolve(n))
        .transpose()?;
    Ok(sample
        .y()
        .iter()
        .enumerate()
        .map(|(idx, &y)| {
            let i = idx + 1;
            ScatterPoint {
                x: i as f64 / n as f64,
                y,
                regime: match k_star {
                    Some(ks) if i > ks => 2,
                    _ => 1,
                },
            }
        })
        .collect())
}
