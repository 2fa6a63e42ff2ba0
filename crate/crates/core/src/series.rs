//! Truncated Taylor-coefficient series and the two inner-product structures
//! on them: the weighted Bergman space `A^2_1` and the Hardy space `H^2`.
//!
//! A [`CoeffSeries`] of order `N` stores `a_0, ..., a_{N-1}` and represents
//! `sqrt(radicand) * sum a_n z^n`. The radicand is always 1 in float mode,
//! where square-root factors are folded into the coefficients.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::{
    exact_gap_complex, neumaier_sum, radical_product, rat, squarefree_split, Coeff, Mode, QComplex,
    QRat, Real, Surd, Value,
};

/// Coefficient storage, one variant per numeric mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeffs {
    Float(Vec<Complex64>),
    Exact(Vec<QComplex>),
}

impl Coeffs {
    pub fn len(&self) -> usize {
        match self {
            Coeffs::Float(v) => v.len(),
            Coeffs::Exact(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self) -> Mode {
        match self {
            Coeffs::Float(_) => Mode::Float,
            Coeffs::Exact(_) => Mode::Exact,
        }
    }

    pub fn get_c64(&self, n: usize) -> Complex64 {
        match self {
            Coeffs::Float(v) => v[n],
            Coeffs::Exact(v) => v[n].to_c64(),
        }
    }
}

fn scale_kernel<T: Coeff>(v: &[T], num: i64, den: i64) -> Vec<T> {
    let f = T::from_ratio(num, den);
    v.iter().map(|c| c.clone() * f.clone()).collect()
}

/// Applies a generic kernel to whichever coefficient vector is stored.
macro_rules! map_coeffs {
    ($coeffs:expr, $v:ident => $body:expr) => {
        match $coeffs {
            $crate::series::Coeffs::Float($v) => $crate::series::Coeffs::Float($body),
            $crate::series::Coeffs::Exact($v) => $crate::series::Coeffs::Exact($body),
        }
    };
}
pub(crate) use map_coeffs;

/// Truncated power series `sqrt(radicand) * sum_{n < order} a_n z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffSeries {
    coeffs: Coeffs,
    radicand: u64,
}

/// Rigorous bound on what truncation dropped.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TailCertificate {
    pub truncation_order: u64,
    pub sup_coeff_bound: f64,
    pub tail_bound: f64,
}

impl CoeffSeries {
    pub fn from_complex(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(CoeffSeries { coeffs: Coeffs::Float(coeffs), radicand: 1 })
    }

    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        Self::from_complex(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_exact(coeffs: Vec<QComplex>) -> Self {
        CoeffSeries { coeffs: Coeffs::Exact(coeffs), radicand: 1 }
    }

    pub fn from_rationals(coeffs: Vec<QRat>) -> Self {
        Self::from_exact(coeffs.into_iter().map(|q| QComplex::new(q, QRat::zero())).collect())
    }

    /// Exact series from `(numerator, denominator)` pairs.
    pub fn from_ratios(pairs: &[(i64, i64)]) -> Result<Self> {
        if let Some(i) = pairs.iter().position(|&(_, d)| d == 0) {
            return Err(Error::ZeroDenominator(i));
        }
        Ok(Self::from_rationals(pairs.iter().map(|&(n, d)| rat(n, d)).collect()))
    }

    pub fn from_coeffs(coeffs: Coeffs) -> Result<Self> {
        match coeffs {
            Coeffs::Float(v) => Self::from_complex(v),
            Coeffs::Exact(v) => Ok(Self::from_exact(v)),
        }
    }

    /// Exact series with an explicit radicand; the radicand is reduced to
    /// its squarefree part and the square part moved into the coefficients.
    pub fn with_radicand(coeffs: Vec<QComplex>, radicand: u64) -> Result<Self> {
        if radicand == 0 {
            return Err(Error::InvalidArgument("radicand must be positive".into()));
        }
        let s = Self::from_exact(coeffs);
        Ok(s.scale_sqrt(radicand))
    }

    pub fn zero(order: usize, mode: Mode) -> Self {
        let coeffs = match mode {
            Mode::Float => Coeffs::Float(vec![Complex64::zero(); order]),
            Mode::Exact => Coeffs::Exact(vec![QComplex::zero(); order]),
        };
        CoeffSeries { coeffs, radicand: 1 }
    }

    /// `z^n` stored at order `n + 1`.
    pub fn monomial(n: usize, mode: Mode) -> Self {
        Self::monomial_padded(n, n + 1, mode)
    }

    pub fn monomial_padded(n: usize, order: usize, mode: Mode) -> Self {
        assert!(n < order, "monomial z^{n} does not fit in order {order}");
        let coeffs = match mode {
            Mode::Float => {
                let mut v = vec![Complex64::zero(); order];
                v[n] = Complex64::one();
                Coeffs::Float(v)
            }
            Mode::Exact => {
                let mut v = vec![QComplex::zero(); order];
                v[n] = QComplex::one();
                Coeffs::Exact(v)
            }
        };
        CoeffSeries { coeffs, radicand: 1 }
    }

    /// Random exact series with small Gaussian-rational coefficients.
    pub fn random_exact(order: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..order)
            .map(|_| {
                let re = rat(rng.random_range(-9..=9), rng.random_range(1..=9));
                let im = if rng.random_bool(0.3) {
                    rat(rng.random_range(-9..=9), rng.random_range(1..=9))
                } else {
                    QRat::zero()
                };
                QComplex::new(re, im)
            })
            .collect();
        Self::from_exact(coeffs)
    }

    pub fn random_float(order: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..order)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        CoeffSeries { coeffs: Coeffs::Float(coeffs), radicand: 1 }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn mode(&self) -> Mode {
        self.coeffs.mode()
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn coeffs(&self) -> &Coeffs {
        &self.coeffs
    }

    pub fn exact_coeffs(&self) -> Option<&[QComplex]> {
        match &self.coeffs {
            Coeffs::Exact(v) => Some(v),
            Coeffs::Float(_) => None,
        }
    }

    /// Value of coefficient `n` with the radicand applied.
    pub fn coeff_c64(&self, n: usize) -> Complex64 {
        self.coeffs.get_c64(n) * (self.radicand as f64).sqrt()
    }

    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        (0..self.order()).map(|n| self.coeff_c64(n)).collect()
    }

    /// Float copy; exact coefficients are rounded and the radicand applied.
    pub fn to_float(&self) -> CoeffSeries {
        CoeffSeries { coeffs: Coeffs::Float(self.to_complex_vec()), radicand: 1 }
    }

    pub fn is_zero(&self) -> bool {
        match &self.coeffs {
            Coeffs::Float(v) => v.iter().all(|c| c.is_zero()),
            Coeffs::Exact(v) => v.iter().all(|c| c.is_zero()),
        }
    }

    /// Lowest index with a nonzero coefficient.
    pub fn lowest_nonzero(&self) -> Option<usize> {
        match &self.coeffs {
            Coeffs::Float(v) => v.iter().position(|c| !c.is_zero()),
            Coeffs::Exact(v) => v.iter().position(|c| !c.is_zero()),
        }
    }

    pub(crate) fn from_parts(coeffs: Coeffs, radicand: u64) -> Self {
        CoeffSeries { coeffs, radicand }
    }

    pub fn truncate(&self, order: usize) -> CoeffSeries {
        let order = order.min(self.order());
        let coeffs = map_coeffs!(&self.coeffs, v => v[..order].to_vec());
        CoeffSeries { coeffs, radicand: self.radicand }
    }

    /// Appends zero coefficients. Only meaningful for polynomials, whose
    /// higher coefficients really are zero.
    pub fn pad(&self, order: usize) -> CoeffSeries {
        let order = order.max(self.order());
        let coeffs = map_coeffs!(&self.coeffs, v => {
            let mut w = v.clone();
            w.resize(order, Coeff::from_int(0));
            w
        });
        CoeffSeries { coeffs, radicand: self.radicand }
    }

    /// Multiplies by the rational `num / den`.
    pub fn scale_ratio(&self, num: i64, den: i64) -> CoeffSeries {
        let coeffs = map_coeffs!(&self.coeffs, v => scale_kernel(v, num, den));
        CoeffSeries { coeffs, radicand: self.radicand }
    }

    /// Multiplies by `sqrt(k)`.
    pub fn scale_sqrt(&self, k: u64) -> CoeffSeries {
        match &self.coeffs {
            Coeffs::Float(v) => {
                let f = (k as f64).sqrt();
                CoeffSeries { coeffs: Coeffs::Float(v.iter().map(|c| c * f).collect()), radicand: 1 }
            }
            Coeffs::Exact(v) => {
                let (t0, free) = squarefree_split(k);
                let (g, radicand) = radical_product(self.radicand, free);
                let f = QComplex::from_ratio((t0 * g) as i64, 1);
                let out = CoeffSeries { coeffs: Coeffs::Exact(v.iter().map(|c| c * &f).collect()), radicand };
                if out.is_zero() {
                    CoeffSeries { radicand: 1, ..out }
                } else {
                    out
                }
            }
        }
    }

    /// Multiplies by `1 / sqrt(k)`, i.e. by `sqrt(k) / k`.
    pub fn scale_inv_sqrt(&self, k: u64) -> CoeffSeries {
        assert!(k > 0);
        self.scale_sqrt(k).scale_ratio(1, k as i64)
    }

    fn check_compatible(&self, other: &CoeffSeries) -> Result<()> {
        if self.mode() != other.mode() {
            return Err(Error::ModeMismatch(self.mode().name(), other.mode().name()));
        }
        Ok(())
    }

    fn check_same_radicand(&self, other: &CoeffSeries) -> Result<()> {
        self.check_compatible(other)?;
        if self.radicand != other.radicand && !self.is_zero() && !other.is_zero() {
            return Err(Error::RadicandMismatch(self.radicand, other.radicand));
        }
        Ok(())
    }

    fn combine(&self, other: &CoeffSeries, sign: i64) -> Result<CoeffSeries> {
        self.check_same_radicand(other)?;
        let radicand = if self.is_zero() { other.radicand } else { self.radicand };
        let order = self.order().min(other.order());
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Float(a), Coeffs::Float(b)) => Coeffs::Float(
                (0..order).map(|n| a[n] + b[n] * sign as f64).collect(),
            ),
            (Coeffs::Exact(a), Coeffs::Exact(b)) => Coeffs::Exact(
                (0..order)
                    .map(|n| if sign > 0 { &a[n] + &b[n] } else { &a[n] - &b[n] })
                    .collect(),
            ),
            _ => unreachable!(),
        };
        Ok(CoeffSeries { coeffs, radicand })
    }

    /// Coefficientwise sum, truncated to the shorter order.
    pub fn add(&self, other: &CoeffSeries) -> Result<CoeffSeries> {
        self.combine(other, 1)
    }

    /// Coefficientwise difference, truncated to the shorter order.
    pub fn sub(&self, other: &CoeffSeries) -> Result<CoeffSeries> {
        self.combine(other, -1)
    }
}

fn a21_weight<T: Coeff>(n: usize) -> T {
    T::from_ratio(2, ((n + 1) * (n + 2)) as i64)
}

fn inner_kernel<T: Coeff>(a: &[T], b: &[T]) -> T {
    let terms = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(n, (x, y))| x.clone() * y.conj() * a21_weight::<T>(n))
        .collect();
    T::sum_all(terms)
}

/// Truncated `A^2_1` inner product `sum 2 a_n conj(b_n) / ((n+1)(n+2))` over
/// `n < min(order_f, order_g)`.
pub fn inner_a21(f: &CoeffSeries, g: &CoeffSeries) -> Result<Value> {
    f.check_compatible(g)?;
    Ok(match (&f.coeffs, &g.coeffs) {
        (Coeffs::Float(a), Coeffs::Float(b)) => Value::Float(inner_kernel(a, b)),
        (Coeffs::Exact(a), Coeffs::Exact(b)) => {
            let (g_out, radicand) = radical_product(f.radicand, g.radicand);
            let sum = inner_kernel(a, b) * QComplex::from_int(g_out as i64);
            Value::Exact(Surd { coeff: sum, radicand })
        }
        _ => unreachable!(),
    })
}

/// Squared `A^2_1` norm; exact in exact mode whatever the radicand.
pub fn norm_sq_a21(f: &CoeffSeries) -> Real {
    match &f.coeffs {
        Coeffs::Float(v) => Real::Float(neumaier_sum(
            v.iter().enumerate().map(|(n, c)| 2.0 * c.norm_sqr() / ((n + 1) as f64 * (n + 2) as f64)),
        )),
        Coeffs::Exact(v) => {
            let terms = v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(n, c)| {
                    (&c.re * &c.re + &c.im * &c.im) * rat(2 * f.radicand as i64, ((n + 1) * (n + 2)) as i64)
                })
                .collect();
            Real::Exact(crate::scalar::pairwise_sum(terms))
        }
    }
}

pub fn norm_a21(f: &CoeffSeries) -> f64 {
    norm_sq_a21(f).to_f64().max(0.0).sqrt()
}

/// Squared `H^2` norm `sum |a_n|^2`.
pub fn norm_sq_h2(f: &CoeffSeries) -> Real {
    match &f.coeffs {
        Coeffs::Float(v) => Real::Float(neumaier_sum(v.iter().map(|c| c.norm_sqr()))),
        Coeffs::Exact(v) => {
            let terms = v
                .iter()
                .filter(|c| !c.is_zero())
                .map(|c| (&c.re * &c.re + &c.im * &c.im) * rat(f.radicand as i64, 1))
                .collect();
            Real::Exact(crate::scalar::pairwise_sum(terms))
        }
    }
}

pub fn norm_h2(f: &CoeffSeries) -> f64 {
    norm_sq_h2(f).to_f64().max(0.0).sqrt()
}

fn mul_one_minus_z_kernel<T: Coeff>(a: &[T]) -> Vec<T> {
    if a.is_empty() {
        return vec![T::from_int(0)];
    }
    let mut out = Vec::with_capacity(a.len() + 1);
    out.push(a[0].clone());
    for n in 1..a.len() {
        out.push(a[n].clone() - a[n - 1].clone());
    }
    out.push(-a[a.len() - 1].clone());
    out
}

/// Multiplies by `(1 - z)`; the output has order `order + 1` and its last
/// coefficient is `-a_{order-1}`.
pub fn mul_one_minus_z(f: &CoeffSeries) -> CoeffSeries {
    let coeffs = map_coeffs!(&f.coeffs, v => mul_one_minus_z_kernel(v));
    CoeffSeries { coeffs, radicand: f.radicand }
}

fn prefix_sum_kernel<T: Coeff>(a: &[T]) -> Vec<T> {
    let mut acc = T::from_int(0);
    a.iter()
        .map(|c| {
            acc = acc.clone() + c.clone();
            acc.clone()
        })
        .collect()
}

/// Divides by `(1 - z)`: prefix sums, same order.
pub fn div_one_minus_z(f: &CoeffSeries) -> CoeffSeries {
    let coeffs = map_coeffs!(&f.coeffs, v => prefix_sum_kernel(v));
    CoeffSeries { coeffs, radicand: f.radicand }
}

fn derivative_kernel<T: Coeff>(a: &[T]) -> Vec<T> {
    a.iter().enumerate().skip(1).map(|(n, c)| c.clone() * T::from_int(n as i64)).collect()
}

/// Termwise derivative, `b_{n-1} = n a_n`; the output has order `order - 1`.
pub fn derivative(f: &CoeffSeries) -> Result<CoeffSeries> {
    if f.order() == 0 {
        return Err(Error::OrderTooSmall { op: "derivative", min: 1, got: 0 });
    }
    let coeffs = map_coeffs!(&f.coeffs, v => derivative_kernel(v));
    Ok(CoeffSeries { coeffs, radicand: f.radicand })
}

/// Horner evaluation of the truncated polynomial at `|z| < 1`.
pub fn evaluate(f: &CoeffSeries, z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::OutsideDisk(r));
    }
    let mut acc = Complex64::zero();
    for n in (0..f.order()).rev() {
        acc = acc * z + f.coeffs.get_c64(n);
    }
    Ok(acc * (f.radicand as f64).sqrt())
}

/// The pairing `<z^v, |z|^{2 n2} z^v>` in `L^2(D, dA_1)`, equal to
/// `2 / ((v+n2+1)(v+n2+2))`. At `n2 = 0` this is `||z^v||^2` in `A^2_1`.
pub fn monomial_moment(v: u64, n2: u64) -> f64 {
    2.0 * radial_moment(v, n2)
}

pub fn monomial_moment_exact(v: u64, n2: u64) -> QRat {
    radial_moment_exact(v, n2) * rat(2, 1)
}

/// The radial integral `2 int_0^1 r^{2v+2n2+1} (1 - r^2) dr`, equal to
/// `1 / ((v+n2+1)(v+n2+2))`. This is half of [`monomial_moment`]: the
/// angular integral of `dA_1` contributes a further factor of 2.
pub fn radial_moment(v: u64, n2: u64) -> f64 {
    let s = (v + n2) as f64;
    1.0 / ((s + 1.0) * (s + 2.0))
}

pub fn radial_moment_exact(v: u64, n2: u64) -> QRat {
    let s = (v + n2) as i64;
    rat(1, (s + 1) * (s + 2))
}

/// Bound on the squared `A^2_1` norm of every coefficient with index
/// `>= dropped_from`, given `|a_n| <= sup_coeff` there. Uses
/// `sum_{n >= N} 2 / ((n+1)(n+2)) = 2 / (N+1)`.
pub fn tail_bound_a21(dropped_from: u64, sup_coeff: f64) -> TailCertificate {
    let sup = sup_coeff.abs();
    TailCertificate {
        truncation_order: dropped_from,
        sup_coeff_bound: sup,
        tail_bound: sup * sup * 2.0 / (dropped_from as f64 + 1.0),
    }
}

/// Largest coefficient deviation between two series of the same mode, over
/// the longer order with missing coefficients read as zero. In exact mode
/// the result is `0.0` iff the series are identical.
pub fn max_deviation(a: &CoeffSeries, b: &CoeffSeries) -> Result<f64> {
    a.check_compatible(b)?;
    let order = a.order().max(b.order());
    let get = |s: &CoeffSeries, n: usize| if n < s.order() { s.coeff_c64(n) } else { Complex64::zero() };
    match (&a.coeffs, &b.coeffs) {
        (Coeffs::Exact(x), Coeffs::Exact(y)) if a.radicand == b.radicand => {
            let zero = QComplex::zero();
            Ok((0..order)
                .map(|n| {
                    let p = x.get(n).unwrap_or(&zero);
                    let q = y.get(n).unwrap_or(&zero);
                    exact_gap_complex(p, q) * (a.radicand as f64).sqrt()
                })
                .fold(0.0, f64::max))
        }
        (Coeffs::Exact(_), Coeffs::Exact(_)) => {
            if a.is_zero() && b.is_zero() {
                return Ok(0.0);
            }
            // Different squarefree radicands never agree unless both vanish.
            let d = (0..order).map(|n| (get(a, n) - get(b, n)).norm()).fold(0.0, f64::max);
            Ok(d.max(f64::MIN_POSITIVE))
        }
        _ => Ok((0..order).map(|n| (get(a, n) - get(b, n)).norm()).fold(0.0, f64::max)),
    }
}
