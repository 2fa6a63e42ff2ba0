//! Scalar types shared by the float and exact-rational numeric modes.
//!
//! Exact mode works over the Gaussian rationals `Q(i)`. Square roots of
//! integers (the `sqrt(k)` of the composition operators and the `1/sqrt(2)`
//! of the Psi map) are carried symbolically as a squarefree *radicand*
//! alongside the rational coefficients, see [`Surd`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type QRat = BigRational;
pub type QComplex = num_complex::Complex<BigRational>;

/// Numeric mode tag of a series or scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Float,
    Exact,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Float => "float",
            Mode::Exact => "exact",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "float" | "float64" => Ok(Mode::Float),
            "exact" | "rational" | "exact-rational" => Ok(Mode::Exact),
            other => Err(format!("unknown mode '{other}' (expected float or rational)")),
        }
    }
}

/// Coefficient field used by the generic series kernels.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rat(q: &QRat) -> Self;
    fn conj(&self) -> Self;
    fn to_c64(&self) -> Complex64;
    /// Sum of a list of terms. Exact mode reduces pairwise, which keeps the
    /// intermediate denominators small; float mode uses compensated summation.
    fn sum_all(terms: Vec<Self>) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Coeff for Complex64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn from_rat(q: &QRat) -> Self {
        Complex64::new(rat_to_f64(q), 0.0)
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn sum_all(terms: Vec<Self>) -> Self {
        let re = neumaier_sum(terms.iter().map(|c| c.re));
        let im = neumaier_sum(terms.iter().map(|c| c.im));
        Complex64::new(re, im)
    }
}

impl Coeff for QComplex {
    fn from_ratio(num: i64, den: i64) -> Self {
        QComplex::new(BigRational::new(num.into(), den.into()), QRat::zero())
    }

    fn from_rat(q: &QRat) -> Self {
        QComplex::new(q.clone(), QRat::zero())
    }

    fn conj(&self) -> Self {
        QComplex::new(self.re.clone(), -self.im.clone())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    fn sum_all(terms: Vec<Self>) -> Self {
        let mut re = Vec::with_capacity(terms.len());
        let mut im = Vec::new();
        for t in terms {
            if !t.re.is_zero() {
                re.push(t.re);
            }
            if !t.im.is_zero() {
                im.push(t.im);
            }
        }
        QComplex::new(pairwise_sum(re), pairwise_sum(im))
    }
}

/// Exact sum by pairwise reduction.
pub fn pairwise_sum(mut terms: Vec<QRat>) -> QRat {
    if terms.is_empty() {
        return QRat::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().unwrap()
}

/// Neumaier-compensated sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Correctly scaled conversion; `BigRational::to_f64` handles huge parts.
pub fn rat_to_f64(q: &QRat) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fallback for magnitudes outside f64: divide after shifting.
        let n = q.numer().bits() as i64;
        let d = q.denom().bits() as i64;
        let shift = (n - d).clamp(-1100, 1100);
        let scaled = if shift >= 0 {
            q / QRat::from_integer(BigInt::one() << shift as usize)
        } else {
            q * QRat::from_integer(BigInt::one() << (-shift) as usize)
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

pub fn rat(num: i64, den: i64) -> QRat {
    QRat::new(num.into(), den.into())
}

/// Splits `n = t^2 * s` with `s` squarefree. `n = 0` maps to `(0, 1)`.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 1);
    }
    let mut rest = n;
    let mut square = 1u64;
    let mut free = 1u64;
    let mut p = 2u64;
    while p * p <= rest {
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        square *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    free *= rest;
    (square, free)
}

/// Product `sqrt(a) * sqrt(b)` for squarefree `a`, `b`, as `g * sqrt(c)`.
pub fn radical_product(a: u64, b: u64) -> (u64, u64) {
    let g = a.gcd(&b);
    (g, (a / g) * (b / g))
}

/// An exact number `coeff * sqrt(radicand)` with `radicand` squarefree.
#[derive(Clone, Debug, PartialEq)]
pub struct Surd {
    pub coeff: QComplex,
    pub radicand: u64,
}

impl Surd {
    pub fn rational(coeff: QComplex) -> Self {
        Surd { coeff, radicand: 1 }
    }

    pub fn conj(&self) -> Self {
        Surd { coeff: Coeff::conj(&self.coeff), radicand: self.radicand }
    }

    pub fn to_c64(&self) -> Complex64 {
        self.coeff.to_c64() * (self.radicand as f64).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }
}

/// A complex scalar in either mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Float(Complex64),
    Exact(Surd),
}

impl Value {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Value::Float(c) => *c,
            Value::Exact(s) => s.to_c64(),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Value::Float(c) => Value::Float(c.conj()),
            Value::Exact(s) => Value::Exact(s.conj()),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Value::Float(_) => Mode::Float,
            Value::Exact(_) => Mode::Exact,
        }
    }
}

/// A real scalar in either mode (squared norms are always rational in
/// exact mode, whatever the radicand).
#[derive(Clone, Debug, PartialEq)]
pub enum Real {
    Float(f64),
    Exact(QRat),
}

impl Real {
    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Float(x) => *x,
            Real::Exact(q) => rat_to_f64(q),
        }
    }

    /// Absolute difference. Exactly zero iff both are exact and equal.
    pub fn deviation(&self, other: &Real) -> f64 {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => exact_gap(&(a - b)),
            _ => (self.to_f64() - other.to_f64()).abs(),
        }
    }
}

/// `|q|` as a float, but never rounded to zero unless `q` is zero.
pub fn exact_gap(q: &QRat) -> f64 {
    if q.is_zero() {
        0.0
    } else {
        rat_to_f64(&q.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Deviation between two exact complex numbers, zero iff equal.
pub fn exact_gap_complex(a: &QComplex, b: &QComplex) -> f64 {
    if a == b {
        0.0
    } else {
        (a.clone() - b.clone()).to_c64().norm().max(f64::MIN_POSITIVE)
    }
}
