//! Multiplicative number theory backed by a smallest-prime-factor sieve.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{neumaier_sum, pairwise_sum, rat, QRat};

/// Smallest-prime-factor table for `0..=limit`, with Möbius and divisor-count
/// tables derived from it.
#[derive(Clone, Debug)]
pub struct FactorTable {
    limit: u64,
    spf: Vec<u32>,
    mu: Vec<i8>,
    tau: Vec<u32>,
}

impl FactorTable {
    pub fn new(limit: u64) -> Self {
        assert!(limit < u32::MAX as u64, "factor table limit too large");
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si || (p as usize) * i > n {
                    break;
                }
                spf[p as usize * i] = p;
            }
        }

        let mut mu = vec![0i8; n + 1];
        let mut tau = vec![0u32; n + 1];
        if n >= 1 {
            mu[1] = 1;
            tau[1] = 1;
        }
        // exponent of spf in i, for the multiplicative recurrences
        let mut exp = vec![0u32; n + 1];
        for i in 2..=n {
            let p = spf[i] as usize;
            let q = i / p;
            if q % p == 0 {
                exp[i] = exp[q] + 1;
                mu[i] = 0;
                // tau(i) = tau(q) * (e + 1) / e where e = exponent in q
                tau[i] = tau[q] / exp[i] * (exp[i] + 1);
            } else {
                exp[i] = 1;
                mu[i] = -mu[q];
                tau[i] = tau[q] * 2;
            }
        }

        FactorTable { limit, spf, mu, tau }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 {
            return Err(Error::InvalidArgument("argument must be positive".into()));
        }
        if n > self.limit {
            return Err(Error::BeyondTable(n, self.limit));
        }
        Ok(n as usize)
    }

    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        let i = self.check(n)?;
        Ok(self.spf[i] as u64)
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// Prime factorization as `(p, e)` pairs in increasing `p`.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        let mut rest = self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        while rest > 1 {
            let p = self.spf[rest] as u64;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
            rest /= p as usize;
        }
        Ok(out)
    }

    pub fn moebius(&self, n: u64) -> Result<i8> {
        Ok(self.mu[self.check(n)?])
    }

    pub fn tau(&self, n: u64) -> Result<u64> {
        Ok(self.tau[self.check(n)?] as u64)
    }

    /// `sum_{k <= K} mu(k/m) [m | k | n]`, which is `[m = n]` once `K >= n`.
    pub fn mobius_delta_sum(&self, m: u64, n: u64, k_max: u64) -> Result<i64> {
        if m == 0 || n == 0 || k_max == 0 {
            return Err(Error::InvalidArgument("m, n, K must be positive".into()));
        }
        if n % m != 0 {
            return Ok(0);
        }
        let q = n / m;
        let mut total = 0i64;
        // k = m * d with d | q and m * d <= K
        let mut d = 1u64;
        while d * d <= q {
            if q % d == 0 {
                for e in [d, q / d] {
                    if m * e <= k_max {
                        total += self.moebius(e)? as i64;
                    }
                    if d * d == q {
                        break;
                    }
                }
            }
            d += 1;
        }
        Ok(total)
    }

    /// `sum_{k <= x} mu(k) / k` in floating point.
    pub fn mertens_ratio(&self, x: u64) -> Result<f64> {
        let x = self.check(x)?;
        Ok(neumaier_sum((1..=x).filter(|&k| self.mu[k] != 0).map(|k| self.mu[k] as f64 / k as f64)))
    }

    /// `sum_{k <= x} mu(k) / k` exactly.
    pub fn mertens_ratio_exact(&self, x: u64) -> Result<QRat> {
        let x = self.check(x)?;
        let terms: Vec<QRat> =
            (1..=x).filter(|&k| self.mu[k] != 0).map(|k| rat(self.mu[k] as i64, k as i64)).collect();
        if terms.is_empty() {
            return Ok(QRat::zero());
        }
        Ok(pairwise_sum(terms))
    }
}

/// `floor((m + 1) / k) - 1`; negative exactly when `m <= k - 2`.
pub fn kappa(k: u64, m: u64) -> i64 {
    assert!(k >= 1, "kappa requires k >= 1");
    ((m + 1) / k) as i64 - 1
}

/// Constant `C` with `tau(n) <= C * n^eps` for every `n >= 1`: the product
/// over primes `p < 2^(1/eps)` of `max_a (a + 1) / p^(a eps)`. Primes at or
/// above `2^(1/eps)` contribute factors `<= 1`.
pub fn divisor_bound_constant(eps: f64) -> f64 {
    assert!(eps > 0.0 && eps <= 1.0);
    let cutoff = 2f64.powf(1.0 / eps).ceil() as u64;
    let mut c = 1.0;
    for p in 2..cutoff.max(3) {
        if (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            continue;
        }
        let pe = (p as f64).powf(eps);
        let mut best = 1.0f64;
        let mut a = 1u32;
        loop {
            let v = (a as f64 + 1.0) / pe.powi(a as i32);
            if v > best {
                best = v;
            } else if a > 4 && v < best * 0.5 {
                break;
            }
            a += 1;
            if a > 200 {
                break;
            }
        }
        c *= best;
    }
    c
}
