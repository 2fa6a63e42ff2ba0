//! The function families `s_k`, `f_k`, `F_k`, `beta` and the Psi isometry
//! from `l^2(N, nu)`, `nu({n}) = 1 / (n(n+1))`, onto `A^2_1`.
//!
//! Normalization: `s_k` has coefficients `{(n+1)/k}` (fractional part) and
//! `f_k` is the logarithmic derivative of `1 + z + ... + z^{k-1}`, so
//! `f_k = k (1 - z) s_k`. All constructors are exact.

use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{neumaier_sum, pairwise_sum, rat, Mode, QComplex, QRat, Real};
use crate::series::{map_coeffs, CoeffSeries, Coeffs};

/// Member of one of the families, by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    /// `s_k`
    S(u64),
    /// `F_k = log((1 - z^k) / (1 - z))`
    FUpper(u64),
    /// `f_k = F_k'`
    FLower(u64),
    Beta,
}

impl FamilyTag {
    pub fn new_indexed(kind: &str, k: u64) -> Result<Self> {
        let tag = match kind {
            "s" => FamilyTag::S(k),
            "F" => FamilyTag::FUpper(k),
            "f" => FamilyTag::FLower(k),
            "beta" => return Ok(FamilyTag::Beta),
            other => return Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
        };
        check_index(k)?;
        Ok(tag)
    }

    pub fn build(self, order: usize) -> Result<CoeffSeries> {
        match self {
            FamilyTag::S(k) => make_s(k, order),
            FamilyTag::FUpper(k) => make_big_f(k, order),
            FamilyTag::FLower(k) => make_f(k, order),
            FamilyTag::Beta => make_beta(order),
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTag::S(k) => write!(f, "s_{k}"),
            FamilyTag::FUpper(k) => write!(f, "F_{k}"),
            FamilyTag::FLower(k) => write!(f, "f_{k}"),
            FamilyTag::Beta => f.write_str("beta"),
        }
    }
}

fn check_index(k: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("family index must be >= 2, got {k}")));
    }
    Ok(())
}

fn exact_from_rats(v: Vec<QRat>) -> CoeffSeries {
    CoeffSeries::from_rationals(v)
}

/// `beta(z) = 1 / (1 - z)`: all coefficients 1.
pub fn make_beta(order: usize) -> Result<CoeffSeries> {
    if order < 1 {
        return Err(Error::OrderTooSmall { op: "make_beta", min: 1, got: order });
    }
    Ok(exact_from_rats(vec![rat(1, 1); order]))
}

/// `s_k`: coefficient `a_n = ((n + 1) mod k) / k`.
pub fn make_s(k: u64, order: usize) -> Result<CoeffSeries> {
    check_index(k)?;
    let period: Vec<QRat> = (0..k).map(|r| rat(((r + 1) % k) as i64, k as i64)).collect();
    Ok(exact_from_rats((0..order).map(|n| period[n % k as usize].clone()).collect()))
}

/// `f_k`: coefficient `a_n = 1 - k [k | n + 1]`.
pub fn make_f(k: u64, order: usize) -> Result<CoeffSeries> {
    check_index(k)?;
    Ok(exact_from_rats(
        (0..order as u64)
            .map(|n| if (n + 1) % k == 0 { rat(1 - k as i64, 1) } else { rat(1, 1) })
            .collect(),
    ))
}

/// `F_k`: `a_0 = 0`, `a_n = 1/n - [k | n] k/n`.
pub fn make_big_f(k: u64, order: usize) -> Result<CoeffSeries> {
    check_index(k)?;
    Ok(exact_from_rats(
        (0..order as u64)
            .map(|n| match n {
                0 => QRat::zero(),
                n if n % k == 0 => rat(1 - k as i64, n as i64),
                n => rat(1, n as i64),
            })
            .collect(),
    ))
}

/// Element of `l^2(N, nu)` truncated to `{1, ..., length}`; `values[i]`
/// holds `f(i + 1)`. Like [`CoeffSeries`], an exact sequence may carry a
/// squarefree radicand `r`, meaning the stored values are scaled by `sqrt(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSeq {
    values: Coeffs,
    radicand: u64,
}

impl WeightedSeq {
    pub fn from_exact(values: Vec<QComplex>) -> Self {
        WeightedSeq { values: Coeffs::Exact(values), radicand: 1 }
    }

    pub fn from_rationals(values: Vec<QRat>) -> Self {
        Self::from_exact(values.into_iter().map(|q| QComplex::new(q, QRat::zero())).collect())
    }

    pub fn from_complex(values: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(WeightedSeq { values: Coeffs::Float(values), radicand: 1 })
    }

    /// `r_k(n) = {n / k}`, the step-function family whose image is `s_k / sqrt(2)`.
    pub fn r_k(k: u64, length: usize) -> Result<Self> {
        check_index(k)?;
        Ok(Self::from_rationals((1..=length as u64).map(|n| rat((n % k) as i64, k as i64)).collect()))
    }

    pub fn ones(length: usize) -> Self {
        Self::from_rationals(vec![rat(1, 1); length])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mode(&self) -> Mode {
        self.values.mode()
    }

    pub fn radicand(&self) -> u64 {
        self.radicand
    }

    pub fn values(&self) -> &Coeffs {
        &self.values
    }

    /// `sum |f(n)|^2 / (n (n + 1))`.
    pub fn weighted_norm_sq(&self) -> Real {
        match &self.values {
            Coeffs::Float(v) => Real::Float(neumaier_sum(
                v.iter().enumerate().map(|(i, c)| c.norm_sqr() / ((i + 1) as f64 * (i + 2) as f64)),
            )),
            Coeffs::Exact(v) => Real::Exact(pairwise_sum(
                v.iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| {
                        (&c.re * &c.re + &c.im * &c.im) * rat(self.radicand as i64, ((i + 1) * (i + 2)) as i64)
                    })
                    .collect(),
            )),
        }
    }
}

/// `(Psi f)(z) = (1/sqrt 2) sum_n f(n + 1) z^n`.
pub fn psi_map(f: &WeightedSeq) -> CoeffSeries {
    let series = CoeffSeries::from_parts(f.values.clone(), f.radicand);
    series.scale_inv_sqrt(2)
}

/// Inverse of [`psi_map`]: `f(n + 1) = sqrt(2) a_n`.
pub fn psi_inverse(g: &CoeffSeries) -> WeightedSeq {
    let scaled = g.scale_sqrt(2);
    let values = map_coeffs!(scaled.coeffs(), v => v.clone());
    WeightedSeq { values, radicand: scaled.radicand() }
}

/// Exact random sequence with small rational values.
pub fn random_weighted(length: usize, seed: u64) -> WeightedSeq {
    let s = CoeffSeries::random_exact(length, seed);
    WeightedSeq { values: s.coeffs().clone(), radicand: 1 }
}

/// Closed form `(1/k) * (d/dz log((1 - z^k)/(1 - z))) / (1 - z)` for `s_k`.
pub fn s_closed_form(k: u64, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let kf = k as f64;
    let zk1 = z.powu(k as u32 - 1);
    let zk = zk1 * z;
    // d/dz log((1 - z^k)/(1 - z)) = -k z^{k-1}/(1 - z^k) + 1/(1 - z)
    let dlog = -kf * zk1 / (one - zk) + one / (one - z);
    dlog / (one - z) / kf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Coeff;
    use crate::series::{derivative, div_one_minus_z, evaluate, mul_one_minus_z, norm_sq_a21};

    fn ratios(v: &[(i64, i64)]) -> CoeffSeries {
        CoeffSeries::from_ratios(v).unwrap()
    }

    #[test]
    fn beta_examples() {
        assert_eq!(make_beta(3).unwrap(), ratios(&[(1, 1), (1, 1), (1, 1)]));
        assert_eq!(evaluate(&make_beta(5).unwrap(), Complex64::zero()).unwrap(), Complex64::new(1.0, 0.0));
        assert!(make_beta(0).is_err());
        let m = 1_000_000;
        let b = make_beta(m).unwrap().to_float();
        let got = norm_sq_a21(&b).to_f64();
        assert!((got - (2.0 - 2.0 / (m as f64 + 1.0))).abs() < 1e-12);
    }

    #[test]
    fn s_examples() {
        assert_eq!(make_s(2, 6).unwrap(), ratios(&[(1, 2), (0, 1), (1, 2), (0, 1), (1, 2), (0, 1)]));
        assert_eq!(make_s(3, 6).unwrap(), ratios(&[(1, 3), (2, 3), (0, 1), (1, 3), (2, 3), (0, 1)]));
        assert!(make_s(1, 4).is_err());
        // tail of s_2 at z = 1/2 is below 2^-59
        let v = evaluate(&make_s(2, 60).unwrap(), Complex64::new(0.5, 0.0)).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn s_periodicity() {
        for k in 2..=12u64 {
            let s = make_s(k, 10 * k as usize).unwrap();
            let c = s.exact_coeffs().unwrap();
            for n in 0..c.len() - k as usize {
                assert_eq!(c[n], c[n + k as usize]);
            }
            for j in 1..=10usize {
                assert!(c[j * k as usize - 1].is_zero());
            }
        }
    }

    #[test]
    fn f_examples() {
        assert_eq!(make_f(2, 5).unwrap(), ratios(&[(1, 1), (-1, 1), (1, 1), (-1, 1), (1, 1)]));
        assert_eq!(make_f(3, 6).unwrap(), ratios(&[(1, 1), (1, 1), (-2, 1), (1, 1), (1, 1), (-2, 1)]));
        for k in 2..=20u64 {
            let m = 200;
            assert_eq!(derivative(&make_big_f(k, m + 1).unwrap()).unwrap(), make_f(k, m).unwrap());
        }
    }

    #[test]
    fn big_f_examples() {
        let f2 = make_big_f(2, 5).unwrap();
        // log(1 + z) = z - z^2/2 + z^3/3 - z^4/4
        assert_eq!(f2, ratios(&[(0, 1), (1, 1), (-1, 2), (1, 3), (-1, 4)]));
        let f3 = make_big_f(3, 4).unwrap();
        assert_eq!(f3.exact_coeffs().unwrap()[3], QComplex::from_ratio(-2, 3));
        assert!(f3.exact_coeffs().unwrap()[0].is_zero());
    }

    #[test]
    fn scaling_bridge() {
        for k in 2..=20u64 {
            let m = 200;
            let lhs = mul_one_minus_z(&make_s(k, m).unwrap()).truncate(m).scale_ratio(k as i64, 1);
            assert_eq!(lhs, make_f(k, m).unwrap(), "k = {k}");
        }
        // s_3 times (1 - z), before scaling
        let b = mul_one_minus_z(&make_s(3, 9).unwrap());
        let expect = [(1, 3), (1, 3), (-2, 3), (1, 3), (1, 3), (-2, 3), (1, 3), (1, 3), (-2, 3), (0, 1)];
        assert_eq!(b, ratios(&expect));
        // f_2 / (1 - z) = 2 s_2
        let p = div_one_minus_z(&make_f(2, 8).unwrap());
        assert_eq!(p, make_s(2, 8).unwrap().scale_ratio(2, 1));
    }

    #[test]
    fn s_closed_form_matches() {
        let points = [Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.3), Complex64::new(-0.25, 0.0)];
        for k in 2..=10u64 {
            let m = 200;
            let s = make_s(k, m).unwrap();
            for &z in &points {
                let got = evaluate(&s, z).unwrap();
                let want = s_closed_form(k, z);
                // |a_n| < 1, so the dropped tail is at most |z|^m / (1 - |z|)
                let tail = z.norm().powi(m as i32) / (1.0 - z.norm());
                assert!((got - want).norm() <= tail + 1e-14, "k={k}, z={z}");
            }
        }
    }

    #[test]
    fn psi_examples() {
        let m = 40;
        let image = psi_map(&WeightedSeq::ones(m));
        assert_eq!(image, make_beta(m).unwrap().scale_inv_sqrt(2));
        for k in 2..=6 {
            let image = psi_map(&WeightedSeq::r_k(k, m).unwrap());
            assert_eq!(image, make_s(k, m).unwrap().scale_inv_sqrt(2));
        }
        let zero = WeightedSeq::from_rationals(vec![QRat::zero(); 7]);
        assert!(psi_map(&zero).is_zero());
        assert_eq!(psi_inverse(&make_beta(m).unwrap().scale_inv_sqrt(2)), WeightedSeq::ones(m));
        assert_eq!(psi_inverse(&CoeffSeries::zero(7, Mode::Exact)), zero);
    }

    #[test]
    fn psi_round_trip_and_isometry() {
        for seed in 0..100u64 {
            let f = random_weighted(1 + (seed as usize * 37) % 500, seed);
            let g = psi_map(&f);
            assert_eq!(psi_inverse(&g), f);
            assert_eq!(f.weighted_norm_sq(), norm_sq_a21(&g));
        }
    }
}
