// SPDX-License-Identifier: MIT OR Apache-2.0

//! Shared oracles for the integration suites. Everything here is an
//! independent computation path: explicit normal equations instead of QR,
//! exact rational arithmetic instead of f64, Markov-bridge sampling instead
//! of path transforms.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Standard normal draws from a fixed seed, independent of the crate's
/// stream derivation.
pub fn gaussian_series(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Residual sum of squares of the order-`p` fit over `lo..=hi` (1-based),
/// by explicit normal-equations inversion in f64 on the scaled design.
pub fn rss_normal_equations(y: &[f64], lo: usize, hi: usize, p: usize) -> f64 {
    let n = y.len();
    let dim = p + 1;
    let mut xtx = vec![vec![0.0; dim]; dim];
    let mut xty = vec![0.0; dim];
    for i in lo..=hi {
        let t = i as f64 / n as f64;
        let mut pows = vec![1.0; dim];
        for j in 1..dim {
            pows[j] = pows[j - 1] * t;
        }
        for a in 0..dim {
            xty[a] += pows[a] * y[i - 1];
            for b in 0..dim {
                xtx[a][b] += pows[a] * pows[b];
            }
        }
    }
    let beta = solve_dense(&mut xtx, &mut xty);
    let mut rss = 0.0;
    for i in lo..=hi {
        let t = i as f64 / n as f64;
        let mut fitted = 0.0;
        let mut pow = 1.0;
        for b in &beta {
            fitted += b * pow;
            pow *= t;
        }
        rss += (y[i - 1] - fitted) * (y[i - 1] - fitted);
    }
    rss
}

/// Gaussian elimination with partial pivoting; consumes its inputs.
fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let dim = b.len();
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..dim {
            let factor = a[row][col] / a[col][col];
            for k in col..dim {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; dim];
    for row in (0..dim).rev() {
        let mut acc = b[row];
        for k in row + 1..dim {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Exact residual sum of squares over `lo..=hi` via normal equations in
/// rational arithmetic on the raw integer design. The result is exact up to
/// the final conversion to f64; responses are taken as the exact rationals
/// the f64 inputs represent.
pub fn rss_exact_rational(y: &[f64], lo: usize, hi: usize, p: usize) -> f64 {
    let dim = p + 1;
    // power sums S_e = sum i^e and moments m_a = sum i^a y_i
    let mut power_sums = vec![BigInt::zero(); 2 * p + 1];
    let mut moments = vec![BigRational::zero(); dim];
    let mut ys = Vec::with_capacity(hi - lo + 1);
    for i in lo..=hi {
        let yi = BigRational::from_float(y[i - 1]).expect("finite response");
        let ib = BigInt::from(i);
        let mut pow = BigInt::one();
        for e in 0..=2 * p {
            power_sums[e] += &pow;
            if e < dim {
                moments[e] += BigRational::from_integer(pow.clone()) * &yi;
            }
            pow *= &ib;
        }
        ys.push(yi);
    }
    let mut a: Vec<Vec<BigRational>> = (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| BigRational::from_integer(power_sums[r + c].clone()))
                .collect()
        })
        .collect();
    let mut b = moments;
    let beta = solve_rational(&mut a, &mut b);

    let mut rss = BigRational::zero();
    for (offset, yi) in ys.iter().enumerate() {
        let i = BigInt::from(lo + offset);
        let mut fitted = BigRational::zero();
        let mut pow = BigInt::one();
        for coef in &beta {
            fitted += coef * BigRational::from_integer(pow.clone());
            pow *= &i;
        }
        let resid = yi - fitted;
        rss += &resid * &resid;
    }
    rss.to_f64().expect("rss fits in f64")
}

/// Exact evaluation of the split quadratic form at `k` on the raw integer
/// design: the full-sample coefficients, the score vector, and the kernel
/// `S^T C_k^{-1} C_n C_tilde_k^{-1} S` are all computed in rational
/// arithmetic. Also asserts, exactly, that the kernel equals
/// `S^T C_k^{-1} S + S^T C_tilde_k^{-1} S`.
pub fn exact_quad_form(y: &[f64], p: usize, k: usize) -> f64 {
    let n = y.len();
    let dim = p + 1;
    let ys: Vec<BigRational> = y
        .iter()
        .map(|v| BigRational::from_float(*v).expect("finite response"))
        .collect();

    let raw_gram = |lo: usize, hi: usize| -> Vec<Vec<BigRational>> {
        let mut m = vec![vec![BigRational::zero(); dim]; dim];
        for i in lo..=hi {
            let ib = BigInt::from(i);
            let mut pows = vec![BigInt::one(); 2 * p + 1];
            for e in 1..pows.len() {
                pows[e] = &pows[e - 1] * &ib;
            }
            for a in 0..dim {
                for b in 0..dim {
                    m[a][b] += BigRational::from_integer(pows[a + b].clone());
                }
            }
        }
        m
    };

    // full-sample fit in rationals
    let mut a_full = raw_gram(1, n);
    let mut b_full = vec![BigRational::zero(); dim];
    for i in 1..=n {
        let ib = BigInt::from(i);
        let mut pow = BigInt::one();
        for slot in b_full.iter_mut() {
            *slot += BigRational::from_integer(pow.clone()) * &ys[i - 1];
            pow *= &ib;
        }
    }
    let beta = solve_rational(&mut a_full, &mut b_full);

    // score vector S_k on the raw design
    let mut s = vec![BigRational::zero(); dim];
    for i in 1..=k {
        let ib = BigInt::from(i);
        let mut pow = BigInt::one();
        let mut fitted = BigRational::zero();
        for coef in &beta {
            fitted += coef * BigRational::from_integer(pow.clone());
            pow *= &ib;
        }
        let resid = &ys[i - 1] - fitted;
        let mut pow = BigInt::one();
        for slot in s.iter_mut() {
            *slot += BigRational::from_integer(pow.clone()) * &resid;
            pow *= &ib;
        }
    }

    let mut c_k = raw_gram(1, k);
    let mut c_tilde = raw_gram(k + 1, n);
    let c_n = raw_gram(1, n);
    let mut s1 = s.clone();
    let mut s2 = s.clone();
    let x = solve_rational(&mut c_k, &mut s1);
    let z = solve_rational(&mut c_tilde, &mut s2);

    // kernel S^T C_k^{-1} C_n C~_k^{-1} S
    let mut kernel = BigRational::zero();
    for a in 0..dim {
        for b in 0..dim {
            kernel += &x[a] * &c_n[a][b] * &z[b];
        }
    }
    // exact decomposition identity
    let mut split = BigRational::zero();
    for a in 0..dim {
        split += &s[a] * &x[a];
        split += &s[a] * &z[a];
    }
    assert_eq!(kernel, split, "exact decomposition identity violated");
    kernel.to_f64().expect("kernel fits in f64")
}

fn solve_rational(a: &mut [Vec<BigRational>], b: &mut [BigRational]) -> Vec<BigRational> {
    let dim = b.len();
    for col in 0..dim {
        let pivot = (col..dim)
            .find(|&r| !a[r][col].is_zero())
            .expect("positive definite system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..dim {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = &a[row][col] / &a[col][col];
            for k in col..dim {
                let sub = &factor * &a[col][k];
                a[row][k] -= sub;
            }
            let sub = &factor * &b[col];
            b[row] -= sub;
        }
    }
    let mut x = vec![BigRational::zero(); dim];
    for row in (0..dim).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..dim {
            acc -= &a[row][k] * &x[k];
        }
        x[row] = acc / &a[row][row];
    }
    x
}

/// The likelihood-ratio scan assembled entirely from oracle refits:
/// statistic, argmin split, and the per-k residual sums.
pub struct OracleScan {
    pub statistic: f64,
    pub k_hat: usize,
    pub rss_full: f64,
    pub split: Vec<(usize, f64, f64)>,
}

pub fn oracle_t_hat<F: Fn(&[f64], usize, usize, usize) -> f64>(
    y: &[f64],
    p: usize,
    rss: F,
) -> OracleScan {
    let n = y.len();
    let rss_full = rss(y, 1, n, p);
    let mut best_k = 0;
    let mut best = f64::INFINITY;
    let mut split = Vec::new();
    for k in p + 2..=n - p - 2 {
        let r1 = rss(y, 1, k, p);
        let r2 = rss(y, k + 1, n, p);
        split.push((k, r1, r2));
        let v = (r1 + r2).ln();
        if v < best {
            best = v;
            best_k = k;
        }
    }
    OracleScan {
        statistic: -(n as f64) * (best - rss_full.ln()),
        k_hat: best_k,
        rss_full,
        split,
    }
}

/// Two-sample Kolmogorov-Smirnov distance and asymptotic p-value.
pub fn two_sample_ks(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(|u, v| u.partial_cmp(v).unwrap());
    b.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let (n1, n2) = (a.len(), b.len());
    let mut i = 0;
    let mut j = 0;
    let mut d = 0.0_f64;
    while i < n1 && j < n2 {
        let x = a[i].min(b[j]);
        while i < n1 && a[i] <= x {
            i += 1;
        }
        while j < n2 && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let ne = ((n1 * n2) as f64 / (n1 + n2) as f64).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1.0f64).powi(k - 1) * (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += term;
    }
    (d, p.clamp(0.0, 1.0))
}

/// Empirical quantile (smallest order statistic with at least `q` mass).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Order-statistic standard error of an empirical quantile.
pub fn quantile_se(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let spread = (n as f64 * q * (1.0 - q)).sqrt();
    let lo = ((q * n as f64 - spread).round() as usize).clamp(1, n);
    let hi = ((q * n as f64 + spread).round() as usize).clamp(1, n);
    (sorted[hi - 1] - sorted[lo - 1]) / 2.0
}

/// Independent oracle for the trimmed limit at order zero: a Brownian
/// bridge sampled through its Markov conditional transitions, evaluated as
/// `sup B(t)^2 / (t (1 - t))` over the trimmed window.
pub fn bridge_sup_draws(delta: f64, steps: usize, reps: usize, seed: u64) -> Vec<f64> {
    let m = steps as f64;
    let dt = 1.0 / m;
    let mut draws: Vec<f64> = (0..reps)
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9E37_79B9 + rep as u64));
            let mut b = 0.0_f64;
            let mut sup = f64::NEG_INFINITY;
            for l in 0..steps - 1 {
                let t_cur = l as f64 / m;
                let t_next = (l + 1) as f64 / m;
                let shrink = (1.0 - t_next) / (1.0 - t_cur);
                let z: f64 = rng.sample(StandardNormal);
                b = b * shrink + (dt * shrink).sqrt() * z;
                if t_next >= delta && t_next <= 1.0 - delta {
                    sup = sup.max(b * b / (t_next * (1.0 - t_next)));
                }
            }
            sup
        })
        .collect();
    draws.sort_by(|u, v| u.partial_cmp(v).unwrap());
    draws
}
