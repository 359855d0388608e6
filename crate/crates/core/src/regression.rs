// SPDX-License-Identifier: MIT OR Apache-2.0

//! Polynomial design construction and least-squares fitting on index
//! segments, plus the split Gram matrices and score vectors that feed the
//! scan statistics.
//!
//! All indices are 1-based: observation `i` of a series of length `n`
//! carries the regressor row `(1, i/n, …, (i/n)^p)` (scaled) or
//! `(1, i, …, i^p)` (raw). Fits go through a Householder QR of the segment
//! design, never through normal equations; a collapsing factor diagonal is
//! reported as [`Error::RankDeficient`] instead of being regularized away.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ratio of smallest to largest |R diagonal| below which the factorization
/// is treated as rank deficient.
const RANK_TOL: f64 = 1e-12;

/// Regressor parameterization. The test statistics are invariant to the
/// choice; `Scaled` keeps entries in [0, 1] and is the default everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// Powers of i/n.
    Scaled,
    /// Powers of i.
    Raw,
}

/// An observed series together with the polynomial order to fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    y: Vec<f64>,
    p: usize,
}

impl Sample {
    /// Requires `n >= 2p + 6` so the recommended scan range is non-empty
    /// and every admissible segment fit keeps at least one residual degree
    /// of freedom, and all responses finite.
    pub fn new(y: Vec<f64>, p: usize) -> Result<Self> {
        let n = y.len();
        if n < 2 * p + 6 {
            return Err(Error::invalid(format!(
                "series length {n} below minimum {} for polynomial order {p}",
                2 * p + 6
            )));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite response at position {} (1-based)",
                i + 1
            )));
        }
        Ok(Sample { y, p })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// One regressor row of the polynomial design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignRow {
    pub entries: Vec<f64>,
    pub scaling: Scaling,
}

/// Regressor row for observation `i` of `n` at order `p`.
pub fn design_row(i: usize, n: usize, p: usize, scaling: Scaling) -> Result<DesignRow> {
    if i < 1 || i > n {
        return Err(Error::invalid(format!("index {i} outside 1..={n}")));
    }
    let mut entries = vec![0.0; p + 1];
    fill_row(&mut entries, i, n, scaling);
    Ok(DesignRow { entries, scaling })
}

/// Writes `(1, t, t^2, …)` into `row` where `t` is `i/n` or `i`.
pub(crate) fn fill_row(row: &mut [f64], i: usize, n: usize, scaling: Scaling) {
    let t = match scaling {
        Scaling::Scaled => i as f64 / n as f64,
        Scaling::Raw => i as f64,
    };
    let mut pow = 1.0;
    for entry in row.iter_mut() {
        *entry = pow;
        pow *= t;
    }
}

/// Least-squares fit of one index segment.
#[derive(Debug, Clone)]
pub struct FitResult {
    /// Minimizer of the segment sum of squared residuals.
    pub beta_hat: DVector<f64>,
    /// The minimum itself (residual sum of squares).
    pub rss: f64,
    /// Residual degrees of freedom: segment length − (p+1).
    pub df: usize,
    /// Residual variance with the degrees-of-freedom divisor, `rss / df`.
    /// Variances with divisor n are formed at the scan level and named
    /// `sigma2_div_n` there; the two conventions are never mixed.
    pub s2: f64,
}

/// Fits the order-`p` polynomial to observations `lo..=hi` (1-based,
/// inclusive) by Householder QR of the segment design.
///
/// Requires `hi - lo + 1 >= p + 2` so the fit has at least one residual
/// degree of freedom.
pub fn fit_segment(sample: &Sample, lo: usize, hi: usize, scaling: Scaling) -> Result<FitResult> {
    let n = sample.n();
    let p = sample.p();
    if lo < 1 || hi > n || lo > hi {
        return Err(Error::invalid(format!(
            "segment {lo}..={hi} outside 1..={n}"
        )));
    }
    let m = hi - lo + 1;
    if m < p + 2 {
        return Err(Error::invalid(format!(
            "segment of length {m} too short for order {p}: need at least {}",
            p + 2
        )));
    }

    let mut x = DMatrix::zeros(m, p + 1);
    for (r, i) in (lo..=hi).enumerate() {
        let mut row = vec![0.0; p + 1];
        fill_row(&mut row, i, n, scaling);
        for (c, v) in row.iter().enumerate() {
            x[(r, c)] = *v;
        }
    }
    let mut qty = DVector::from_row_slice(&sample.y()[lo - 1..hi]);

    let qr = nalgebra::linalg::QR::new(x);
    qr.q_tr_mul(&mut qty);
    let r = qr.r();

    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0_f64;
    for j in 0..=p {
        let d = r[(j, j)].abs();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    if dmin <= RANK_TOL * dmax {
        return Err(Error::RankDeficient(format!(
            "factor diagonal ratio {:.3e} below {RANK_TOL:.0e} on segment {lo}..={hi} (p = {p})",
            if dmax > 0.0 { dmin / dmax } else { 0.0 }
        )));
    }

    let beta_hat = r
        .view((0, 0), (p + 1, p + 1))
        .solve_upper_triangular(&qty.rows(0, p + 1).into_owned())
        .ok_or_else(|| {
            Error::RankDeficient(format!("triangular solve failed on segment {lo}..={hi}"))
        })?;
    let rss: f64 = qty.rows(p + 1, m - p - 1).norm_squared();
    let df = m - p - 1;

    Ok(FitResult {
        beta_hat,
        rss,
        df,
        s2: rss / df as f64,
    })
}

/// The split Gram matrices of a scan position: sums of regressor outer
/// products over `i <= k`, over `i > k`, and over the whole sample. Each is
/// accumulated independently, so additivity holds only up to rounding.
#[derive(Debug, Clone)]
pub struct GramTriple {
    pub c_k: DMatrix<f64>,
    pub c_tilde_k: DMatrix<f64>,
    pub c_n: DMatrix<f64>,
}

/// Requires `p + 1 <= k <= n - p - 1` so both split matrices are positive
/// definite.
pub fn gram_triple(n: usize, p: usize, k: usize, scaling: Scaling) -> Result<GramTriple> {
    if k < p + 1 || k + p + 1 > n {
        return Err(Error::invalid(format!(
            "split {k} outside positive-definite range {}..={} for n = {n}, p = {p}",
            p + 1,
            n - p - 1
        )));
    }
    let sum_outer = |range: std::ops::RangeInclusive<usize>| -> DMatrix<f64> {
        let mut acc = DMatrix::zeros(p + 1, p + 1);
        let mut row = vec![0.0; p + 1];
        for i in range {
            fill_row(&mut row, i, n, scaling);
            for a in 0..=p {
                for b in 0..=p {
                    acc[(a, b)] += row[a] * row[b];
                }
            }
        }
        acc
    };
    Ok(GramTriple {
        c_k: sum_outer(1..=k),
        c_tilde_k: sum_outer(k + 1..=n),
        c_n: sum_outer(1..=n),
    })
}

/// Score vector at split `k`: the regressor-weighted partial sum of
/// full-sample residuals, `sum_{i<=k} x_i (y_i - x_i^T beta_hat_n)`.
pub fn score_vector(
    sample: &Sample,
    k: usize,
    beta_hat_n: &DVector<f64>,
    scaling: Scaling,
) -> Result<DVector<f64>> {
    let n = sample.n();
    let p = sample.p();
    if beta_hat_n.len() != p + 1 {
        return Err(Error::invalid(format!(
            "coefficient vector has {} entries, expected {}",
            beta_hat_n.len(),
            p + 1
        )));
    }
    if k < 1 || k > n {
        return Err(Error::invalid(format!("split {k} outside 1..={n}")));
    }
    let mut s = DVector::zeros(p + 1);
    let mut row = vec![0.0; p + 1];
    for i in 1..=k {
        fill_row(&mut row, i, n, scaling);
        let mut fitted = 0.0;
        for j in 0..=p {
            fitted += row[j] * beta_hat_n[j];
        }
        let resid = sample.y()[i - 1] - fitted;
        for j in 0..=p {
            s[j] += row[j] * resid;
        }
    }
    Ok(s)
}
