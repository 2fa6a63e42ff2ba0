//! Least-squares distance in `A^2_1` from `beta = 1/(1-z)` to
//! `span{s_2, ..., s_N}`, where `s_k` has coefficients `{(n+1)/k}`.

mod cache;
mod residual;

pub use cache::{Cache, EntryKind, CACHE_ENV};
pub use residual::{theorem11_coefficients_exact, theorem11_residual, ApproxReport};

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{neumaier_sum, pairwise_sum, rat, QRat};
use crate::series::{tail_bound_a21, TailCertificate};
use crate::special::digamma_difference;

pub const DEFAULT_TRUNCATION: u64 = 1_000_000;

/// Relative accuracy assumed for a single computed entry.
const ENTRY_EPS: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Precision {
    /// Truncated sum over `n < truncation`.
    Direct { truncation: u64 },
    /// Residue classes modulo `lcm(j, k)` summed through the digamma function.
    Digamma,
}

impl Precision {
    pub fn mode_name(self) -> &'static str {
        match self {
            Precision::Direct { .. } => "direct",
            Precision::Digamma => "digamma",
        }
    }

    /// Truncation order, `0` for the digamma method.
    pub fn truncation(self) -> u64 {
        match self {
            Precision::Direct { truncation } => truncation,
            Precision::Digamma => 0,
        }
    }

    /// Bound on each entry's dropped tail.
    pub fn tail(self) -> Option<TailCertificate> {
        match self {
            Precision::Direct { truncation } => Some(tail_bound_a21(truncation, 1.0)),
            Precision::Digamma => None,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Direct { truncation } => write!(f, "direct:{truncation}"),
            Precision::Digamma => f.write_str("digamma"),
        }
    }
}

impl FromStr for Precision {
    type Err = String;

    /// `digamma`, `direct` or `direct:<truncation>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "digamma" => Ok(Precision::Digamma),
            None if s == "direct" => Ok(Precision::Direct { truncation: DEFAULT_TRUNCATION }),
            Some(("direct", t)) => match t.replace('_', "").parse::<f64>() {
                Ok(v) if v >= 1.0 && v.fract() == 0.0 && v < 1e15 => Ok(Precision::Direct { truncation: v as u64 }),
                _ => Err(format!("invalid truncation '{t}'")),
            },
            _ => Err(format!("unknown precision '{s}' (expected digamma, direct or direct:<M>)")),
        }
    }
}

/// `sum_{n < m} 2 w_n / ((n+1)(n+2))`, accumulated from the small end.
/// `weight` yields `w_{m-1}, w_{m-2}, ..., w_0` on successive calls.
fn direct_sum(m: u64, mut weight: impl FnMut() -> f64) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in (0..m).rev() {
        let w = weight();
        if w == 0.0 {
            continue;
        }
        let x = w / ((n + 1) as f64 * (n + 2) as f64);
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    2.0 * (sum + comp)
}

/// Residue of `m` modulo `p` counted downward.
struct DownResidue {
    r: u64,
    p: u64,
}

impl DownResidue {
    fn starting_at(m: u64, p: u64) -> Self {
        DownResidue { r: m % p, p }
    }

    fn next(&mut self) -> u64 {
        let out = self.r;
        self.r = if self.r == 0 { self.p - 1 } else { self.r - 1 };
        out
    }
}

/// `(2/L) sum_{r < L} p_r (psi((r+2)/L) - psi((r+1)/L))`: the sum of
/// `2 p_n / ((n+1)(n+2))` over all `n >= 0` when `p` has period `L`.
fn digamma_sum(l: u64, p: impl Fn(u64) -> f64) -> f64 {
    let lf = l as f64;
    let terms = (0..l).filter_map(|r| {
        let w = p(r);
        (w != 0.0).then(|| w * digamma_difference((r + 1) as f64 / lf, (r + 2) as f64 / lf))
    });
    2.0 / lf * neumaier_sum(terms)
}

fn check_index(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("family index must be >= 2, got {k}")));
    }
    Ok(())
}

/// `<s_j, s_k>` in `A^2_1`.
pub fn gram_entry(j: u64, k: u64, precision: Precision) -> Result<f64> {
    check_index(j)?;
    check_index(k)?;
    let scale = (j * k) as f64;
    Ok(match precision {
        Precision::Direct { truncation } => {
            let mut a = DownResidue::starting_at(truncation, j);
            let mut b = DownResidue::starting_at(truncation, k);
            direct_sum(truncation, || (a.next() * b.next()) as f64 / scale)
        }
        Precision::Digamma => {
            digamma_sum(j.lcm(&k), |r| (((r + 1) % j) * ((r + 1) % k)) as f64 / scale)
        }
    })
}

/// `<s_k, beta>` in `A^2_1`.
pub fn rhs_entry(k: u64, precision: Precision) -> Result<f64> {
    check_index(k)?;
    let kf = k as f64;
    Ok(match precision {
        Precision::Direct { truncation } => {
            let mut b = DownResidue::starting_at(truncation, k);
            direct_sum(truncation, || b.next() as f64 / kf)
        }
        Precision::Digamma => digamma_sum(k, |r| ((r + 1) % k) as f64 / kf),
    })
}

/// `||beta||^2`, truncated consistently with the entries in direct mode.
pub fn beta_norm_sq(precision: Precision) -> f64 {
    match precision {
        Precision::Direct { truncation } => 2.0 * truncation as f64 / (truncation as f64 + 1.0),
        Precision::Digamma => 2.0,
    }
}

/// Normal equations for the best approximation of `beta` by `s_2, ..., s_N`;
/// row and column `i` belong to `s_{i+2}`.
#[derive(Clone, Debug)]
pub struct GramSystem {
    pub n_max: u64,
    pub gram: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub precision: Precision,
    pub tail: Option<TailCertificate>,
}

fn cached(cache: Option<&Cache>, kind: EntryKind, j: u64, k: u64, precision: Precision, compute: impl FnOnce() -> Result<f64>) -> Result<f64> {
    if let Some(c) = cache {
        if let Some(v) = c.get(kind, j, k, precision) {
            return Ok(v);
        }
    }
    let v = compute()?;
    if let Some(c) = cache {
        c.put(kind, j, k, precision, v)?;
    }
    Ok(v)
}

/// Assembles the system for `N = n_max`, in parallel over entries, reading and
/// filling `cache` when given.
pub fn build_gram(n_max: u64, precision: Precision, cache: Option<&Cache>) -> Result<GramSystem> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be >= 2, got {n_max}")));
    }
    if let Precision::Direct { truncation: 0 } = precision {
        return Err(Error::InvalidArgument("direct truncation must be positive".into()));
    }
    let size = (n_max - 1) as usize;
    let pairs: Vec<(u64, u64)> = (2..=n_max).flat_map(|j| (j..=n_max).map(move |k| (j, k))).collect();
    let entries: Vec<f64> = pairs
        .par_iter()
        .map(|&(j, k)| cached(cache, EntryKind::Gram, j, k, precision, || gram_entry(j, k, precision)))
        .collect::<Result<_>>()?;
    let rhs: Vec<f64> = (2..=n_max)
        .into_par_iter()
        .map(|k| cached(cache, EntryKind::Rhs, 0, k, precision, || rhs_entry(k, precision)))
        .collect::<Result<_>>()?;

    let mut gram = DMatrix::zeros(size, size);
    for (&(j, k), &v) in pairs.iter().zip(&entries) {
        let (a, b) = ((j - 2) as usize, (k - 2) as usize);
        gram[(a, b)] = v;
        gram[(b, a)] = v;
    }
    Ok(GramSystem { n_max, gram, rhs: DVector::from_vec(rhs), precision, tail: precision.tail() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Solver {
    Cholesky,
    Ridge { lambda: f64 },
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Solver::Cholesky => f.write_str("cholesky"),
            Solver::Ridge { lambda } => write!(f, "ridge({lambda:e})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub n_max: u64,
    pub distance_sq: f64,
    /// `c_k` for `k = 2..=n_max`.
    pub coefficients: Vec<f64>,
    pub solver: Solver,
    /// `|| G c - rhs ||_2` against the unregularized matrix.
    pub residual_norm: f64,
    pub error_budget: f64,
    pub precision: Precision,
}

struct Factored {
    l: DMatrix<f64>,
    solver: Solver,
}

fn factor(gram: &DMatrix<f64>) -> Result<Factored> {
    if let Some(c) = gram.clone().cholesky() {
        return Ok(Factored { l: c.l(), solver: Solver::Cholesky });
    }
    let n = gram.nrows();
    let lambda = 1e-12 * gram.trace() / n as f64;
    log::warn!("Gram matrix not numerically positive definite at N = {}; using ridge lambda = {lambda:e}", n + 1);
    let shifted = gram + DMatrix::<f64>::identity(n, n) * lambda;
    match shifted.cholesky() {
        Some(c) => Ok(Factored { l: c.l(), solver: Solver::Ridge { lambda } }),
        None => Err(Error::InvalidArgument(format!("Gram matrix of size {n} is not positive definite even after ridge"))),
    }
}

fn check_finite(sys: &GramSystem) -> Result<()> {
    for j in 0..sys.gram.ncols() {
        for i in 0..sys.gram.nrows() {
            if !sys.gram[(i, j)].is_finite() {
                return Err(Error::NonFiniteGram(i + 2, j + 2));
            }
        }
        if !sys.rhs[j].is_finite() {
            return Err(Error::NonFiniteGram(0, j + 2));
        }
    }
    Ok(())
}

/// Reports for the leading blocks of sizes `sizes[i] - 1`, all from one
/// factorization: the leading block of a Cholesky factor is the factor of the
/// leading block, and `d_N^2 = ||beta||^2 - sum_{i < N-1} y_i^2` with
/// `y = L^{-1} rhs`.
fn prefix_reports(sys: &GramSystem, sizes: &[u64]) -> Result<Vec<DistanceReport>> {
    check_finite(sys)?;
    let f = factor(&sys.gram)?;
    let y = f.l.solve_lower_triangular(&sys.rhs).expect("nonsingular factor");
    let beta = beta_norm_sq(sys.precision);
    let tail = sys.tail.as_ref().map_or(0.0, |t| t.tail_bound);

    sizes
        .iter()
        .map(|&n| {
            let p = (n - 1) as usize;
            let yp = y.rows(0, p).into_owned();
            let lp = f.l.view((0, 0), (p, p)).into_owned();
            let c = lp.transpose().solve_upper_triangular(&yp).expect("nonsingular factor");
            let gp = sys.gram.view((0, 0), (p, p));
            let r = gp * &c - sys.rhs.rows(0, p);
            let mut d2 = beta - yp.norm_squared();
            let c1 = c.iter().map(|x| x.abs()).sum::<f64>();
            let scale = (1.0 + c1).powi(2);
            let error_budget = c.dot(&r).abs() + scale * (tail + ENTRY_EPS * beta) + f64::EPSILON * p as f64 * beta;
            if d2 < 0.0 {
                log::warn!("d_{n}^2 = {d2:e} < 0 clamped to 0 (error budget {error_budget:e})");
                d2 = 0.0;
            }
            Ok(DistanceReport {
                n_max: n,
                distance_sq: d2,
                coefficients: c.iter().copied().collect(),
                solver: f.solver,
                residual_norm: r.norm(),
                error_budget,
                precision: sys.precision,
            })
        })
        .collect()
}

/// `d_N^2 = ||beta||^2 - rhs^T G^{-1} rhs` for `N = sys.n_max`.
pub fn solve_distance(sys: &GramSystem) -> Result<DistanceReport> {
    Ok(prefix_reports(sys, &[sys.n_max])?.remove(0))
}

/// `d_N^2` for every `N` in the strictly increasing list `n_list`, sharing one
/// system build and one factorization. The values are nonincreasing.
pub fn distance_curve(n_list: &[u64], precision: Precision, cache: Option<&Cache>) -> Result<Vec<DistanceReport>> {
    if n_list.is_empty() {
        return Ok(Vec::new());
    }
    if n_list[0] < 2 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("n_list must be strictly increasing and start at >= 2".into()));
    }
    let sys = build_gram(*n_list.last().expect("nonempty"), precision, cache)?;
    prefix_reports(&sys, n_list)
}

/// Exact direct-mode entries `sum_{n < truncation} ...` in rationals.
pub fn gram_entry_exact(j: u64, k: u64, truncation: u64) -> QRat {
    let terms: Vec<QRat> = (0..truncation)
        .filter_map(|n| {
            let w = ((n + 1) % j) * ((n + 1) % k);
            (w != 0).then(|| rat(2 * w as i64, (j * k * (n + 1) * (n + 2)) as i64))
        })
        .collect();
    if terms.is_empty() {
        QRat::zero()
    } else {
        pairwise_sum(terms)
    }
}

pub fn rhs_entry_exact(k: u64, truncation: u64) -> QRat {
    let terms: Vec<QRat> = (0..truncation)
        .filter_map(|n| {
            let w = (n + 1) % k;
            (w != 0).then(|| rat(2 * w as i64, (k * (n + 1) * (n + 2)) as i64))
        })
        .collect();
    if terms.is_empty() {
        QRat::zero()
    } else {
        pairwise_sum(terms)
    }
}

/// Truncated-problem `d_N^2` solved in exact rational arithmetic.
pub fn exact_distance_sq(n_max: u64, truncation: u64) -> Result<QRat> {
    if n_max < 2 || truncation == 0 {
        return Err(Error::InvalidArgument("need n_max >= 2 and truncation >= 1".into()));
    }
    let size = (n_max - 1) as usize;
    let mut a: Vec<Vec<QRat>> = (0..size)
        .map(|i| (0..size).map(|j| gram_entry_exact(i as u64 + 2, j as u64 + 2, truncation)).collect())
        .collect();
    let rhs: Vec<QRat> = (0..size).map(|i| rhs_entry_exact(i as u64 + 2, truncation)).collect();
    let mut b = rhs.clone();
    // Gaussian elimination; the matrix is positive definite so pivots are nonzero.
    for col in 0..size {
        let piv = a[col][col].clone();
        if piv.is_zero() {
            return Err(Error::InvalidArgument(format!("singular truncated Gram matrix at column {col}")));
        }
        for row in col + 1..size {
            let factor = &a[row][col] / &piv;
            if factor.is_zero() {
                continue;
            }
            for j in col..size {
                let v = &factor * &a[col][j];
                a[row][j] -= v;
            }
            let v = &factor * &b[col];
            b[row] -= v;
        }
    }
    let mut c = vec![QRat::zero(); size];
    for i in (0..size).rev() {
        let mut acc = b[i].clone();
        for j in i + 1..size {
            acc -= &a[i][j] * &c[j];
        }
        c[i] = acc / &a[i][i];
    }
    let beta = rat(2 * truncation as i64, truncation as i64 + 1);
    let proj = rhs.iter().zip(&c).fold(QRat::zero(), |s, (r, x)| s + r * x);
    Ok(beta - proj)
}
