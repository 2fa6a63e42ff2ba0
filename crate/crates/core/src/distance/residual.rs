//! Residual of the Möbius-weighted combination
//! `sum_{k <= K, m | k} (m/k) mu(k/m) F_k + z^m`, where `F_k` has
//! coefficients `1/n - [k | n] k/n` (`n >= 1`).
//!
//! Writing `k = m k'` and `R = sum_{k' <= K/m} mu(k')/k'`, the coefficient of
//! `z^n` is `(R - m S_n)/n + [n = m]` with `S_n = sum_{k' <= K/m, mk' | n} mu(k')`.
//! For `n <= K` this collapses to `R/n`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::{divisor_bound_constant, FactorTable};
use crate::error::{Error, Result};
use crate::scalar::{neumaier_sum, rat, rat_to_f64, QRat};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub m: u64,
    pub k_max: u64,
    pub trunc: u64,
    /// `sum_{k' <= K/m} mu(k')/k'`
    pub mertens: f64,
    /// `H^2` norm of the residual over `n < trunc`.
    pub residual_h2: f64,
    /// `A^2_1` norm of the derivative of the residual over `n < trunc`.
    pub residual_a21: f64,
    /// Bound on the `H^2` norm of the coefficients at `n >= trunc`.
    pub tail_h2: f64,
    /// `sqrt(residual_h2^2 + tail_h2^2)`, an upper bound on the full residual.
    pub residual_h2_upper: f64,
    /// `|R|^2 + m^2 K^{-1/2}`
    pub bound: f64,
}

fn validate(m: u64, k_max: u64, trunc: u64) -> Result<()> {
    if m == 0 || k_max < m || trunc <= k_max {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= m <= K < trunc, got m={m}, K={k_max}, trunc={trunc}"
        )));
    }
    Ok(())
}

/// `S_n` for `n < trunc`, by sieving multiples of `m k'`.
fn divisor_sums(table: &FactorTable, m: u64, k_max: u64, trunc: u64) -> Result<Vec<i64>> {
    let mut s = vec![0i64; trunc as usize];
    for kp in 1..=k_max / m {
        let mu = table.moebius(kp)? as i64;
        if mu == 0 {
            continue;
        }
        let step = (m * kp) as usize;
        for n in (step..trunc as usize).step_by(step) {
            s[n] += mu;
        }
    }
    Ok(s)
}

/// Exact coefficients `c_0, ..., c_{trunc-1}` of the combination.
pub fn theorem11_coefficients_exact(m: u64, k_max: u64, trunc: u64) -> Result<Vec<QRat>> {
    validate(m, k_max, trunc)?;
    let table = FactorTable::new(k_max.max(1));
    let r = table.mertens_ratio_exact(k_max / m)?;
    let s = divisor_sums(&table, m, k_max, trunc)?;
    Ok((0..trunc)
        .map(|n| {
            if n == 0 {
                return rat(0, 1);
            }
            let mut c = (&r - rat((m as i64) * s[n as usize], 1)) / rat(n as i64, 1);
            if n == m {
                c += rat(1, 1);
            }
            c
        })
        .collect())
}

/// `sum_{n >= t} n^{-s}` bounded by `t^{-s} + t^{1-s}/(s-1)`.
fn power_tail(t: f64, s: f64) -> f64 {
    t.powf(-s) + t.powf(1.0 - s) / (s - 1.0)
}

pub fn theorem11_residual(m: u64, k_max: u64, trunc: u64) -> Result<ApproxReport> {
    validate(m, k_max, trunc)?;
    let table = FactorTable::new(k_max);
    let r = table.mertens_ratio_exact(k_max / m)?;
    let s = divisor_sums(&table, m, k_max, trunc)?;

    // R - m S rounded once per distinct S
    let mut numer: HashMap<i64, f64> = HashMap::new();
    let coeff = |n: u64, numer: &mut HashMap<i64, f64>| -> f64 {
        if n == m {
            return rat_to_f64(&(&r / rat(m as i64, 1)));
        }
        let sn = s[n as usize];
        let v = *numer.entry(sn).or_insert_with(|| rat_to_f64(&(&r - rat(m as i64 * sn, 1))));
        v / n as f64
    };
    let coeffs: Vec<f64> = (1..trunc).map(|n| coeff(n, &mut numer)).collect();

    let h2_sq = neumaier_sum(coeffs.iter().map(|c| c * c));
    // derivative: coefficient n c_n at z^{n-1}, weight 2/(n(n+1))
    let a21_sq = neumaier_sum(coeffs.iter().enumerate().map(|(i, c)| {
        let n = (i + 1) as f64;
        2.0 * n * c * c / (n + 1.0)
    }));

    // |c_n| <= (|R| + m tau(n/m)) / n <= (|R| + m C n^{1/4}) / n past K
    let rf = rat_to_f64(&r);
    let cdiv = divisor_bound_constant(0.25);
    let t = trunc as f64;
    let mf = m as f64;
    let tail_sq = rf * rf * power_tail(t, 2.0)
        + 2.0 * rf.abs() * mf * cdiv * power_tail(t, 1.75)
        + mf * mf * cdiv * cdiv * power_tail(t, 1.5);

    Ok(ApproxReport {
        m,
        k_max,
        trunc,
        mertens: rf,
        residual_h2: h2_sq.sqrt(),
        residual_a21: a21_sq.sqrt(),
        tail_h2: tail_sq.sqrt(),
        residual_h2_upper: (h2_sq + tail_sq).sqrt(),
        bound: rf * rf + mf * mf / (k_max as f64).sqrt(),
    })
}
