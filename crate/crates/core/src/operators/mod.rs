//! The composition operators `(T_k f)(z) = sqrt(k) z^{k-1} f(z^k) (1 - z^k)/(1 - z)`,
//! their adjoints, and identity checks on coefficient sequences.
//!
//! On coefficients, `T_k` copies `a_n` into the window
//! `kn + k - 1 ..= kn + 2k - 2` and scales by `sqrt(k)`; `T_k^*` averages each
//! window back with the `A^2_1` weights. In exact mode the `sqrt(k)` factor is
//! carried in the series radicand.

mod commutant;
mod section;

pub use commutant::{commutant_experiment, CommutantReport};
pub use section::{
    finite_section, finite_section_rect, projection_deviation, section_oracle_deviation, Section,
    SectionMatrix, SparseQ,
};

use crate::arith::kappa;
use crate::error::{Error, Result};
use crate::family::{make_beta, make_s};
use crate::scalar::{rat, Coeff, Mode, QRat, Real};
use crate::series::{map_coeffs, max_deviation, norm_sq_a21, CoeffSeries};

fn spread_kernel<T: Coeff>(a: &[T], k: usize) -> Vec<T> {
    let mut out = vec![T::from_int(0); k * a.len() + k - 1];
    for (n, c) in a.iter().enumerate() {
        for slot in &mut out[k * n + k - 1..k * n + 2 * k - 1] {
            *slot = c.clone();
        }
    }
    out
}

fn window_kernel<T: Coeff>(a: &[T], k: usize) -> Vec<T> {
    let emitted = ((a.len() + 1) / k).saturating_sub(1);
    (0..emitted)
        .map(|m| {
            let lo = k * m + k - 1;
            let terms = (lo..lo + k)
                .map(|n| a[n].clone() * T::from_ratio(1, ((n + 1) * (n + 2)) as i64))
                .collect();
            T::sum_all(terms) * T::from_int(((m + 1) * (m + 2)) as i64)
        })
        .collect()
}

/// `T_k f`. The output order is `k * order + k - 1`, so every input
/// coefficient is spread over its full window.
pub fn apply_t(k: u64, f: &CoeffSeries) -> CoeffSeries {
    assert!(k >= 1, "T_k requires k >= 1");
    let coeffs = map_coeffs!(f.coeffs(), v => spread_kernel(v, k as usize));
    CoeffSeries::from_parts(coeffs, f.radicand()).scale_sqrt(k)
}

/// `T_k^* f`. Only coefficients whose whole window `km + k - 1 ..= km + 2k - 2`
/// lies inside the input are emitted: the output order is
/// `floor((order + 1) / k) - 1` (clamped at 0).
pub fn apply_t_star(k: u64, f: &CoeffSeries) -> CoeffSeries {
    assert!(k >= 1, "T_k^* requires k >= 1");
    let coeffs = map_coeffs!(f.coeffs(), v => window_kernel(v, k as usize));
    CoeffSeries::from_parts(coeffs, f.radicand()).scale_sqrt(k)
}

/// Deviation between `T_j T_k f` and `T_{jk} f`.
pub fn semigroup_deviation(j: u64, k: u64, f: &CoeffSeries) -> f64 {
    let lhs = apply_t(j, &apply_t(k, f));
    let rhs = apply_t(j * k, f);
    debug_assert_eq!(lhs.order(), rhs.order());
    max_deviation(&lhs, &rhs).expect("same mode")
}

/// `T_j T_k = T_{jk}` on `trials` random exact series; true only on an exact match.
pub fn verify_semigroup(j: u64, k: u64, trials: usize) -> bool {
    (0..trials as u64).all(|t| {
        let f = CoeffSeries::random_exact(1 + (t as usize * 7) % 40, 1000 * j + 31 * k + t);
        semigroup_deviation(j, k, &f) == 0.0
    })
}

/// Squared `A^2_1` norms of `f` and `T_k f`.
pub fn verify_isometry(k: u64, f: &CoeffSeries) -> (Real, Real) {
    (norm_sq_a21(f), norm_sq_a21(&apply_t(k, f)))
}

/// Deviation of `T_k^* T_k f` from `f`.
pub fn left_inverse_deviation(k: u64, f: &CoeffSeries) -> f64 {
    let back = apply_t_star(k, &apply_t(k, f));
    debug_assert_eq!(back.order(), f.order());
    max_deviation(&back, f).expect("same mode")
}

/// `<T_k f, g> - <f, T_k^* g>` in absolute value. `g` should have order at
/// least `k * order(f) + k - 1` so that both sides see every term.
pub fn adjoint_deviation(k: u64, f: &CoeffSeries, g: &CoeffSeries) -> Result<f64> {
    let lhs = crate::series::inner_a21(&apply_t(k, f), g)?;
    let rhs = crate::series::inner_a21(f, &apply_t_star(k, g))?;
    Ok(match (&lhs, &rhs) {
        (crate::scalar::Value::Exact(a), crate::scalar::Value::Exact(b)) if a == b => 0.0,
        (crate::scalar::Value::Exact(a), crate::scalar::Value::Exact(b)) if a.is_zero() && b.is_zero() => 0.0,
        (crate::scalar::Value::Exact(_), _) => (lhs.to_c64() - rhs.to_c64()).norm().max(f64::MIN_POSITIVE),
        _ => (lhs.to_c64() - rhs.to_c64()).norm(),
    })
}

/// Deviation of `T_k^* beta` from `k^{-1/2} beta` on the emitted coefficients.
pub fn eigenfunction_deviation(k: u64, order: usize, mode: Mode) -> f64 {
    let beta = make_beta(order).expect("order >= 1");
    let beta = if mode == Mode::Float { beta.to_float() } else { beta };
    let image = apply_t_star(k, &beta);
    let expect = if image.order() == 0 {
        CoeffSeries::zero(0, mode)
    } else {
        let b = make_beta(image.order()).expect("order >= 1").scale_inv_sqrt(k);
        if mode == Mode::Float {
            b.to_float()
        } else {
            b
        }
    };
    max_deviation(&image, &expect).expect("same mode")
}

/// `s_k` with the convention `s_1 = 0` (all fractional parts `{n + 1}` vanish).
fn s_any(k: u64, order: usize) -> CoeffSeries {
    if k == 1 {
        CoeffSeries::zero(order, Mode::Exact)
    } else {
        make_s(k, order).expect("k >= 2")
    }
}

/// Deviation between `T_k s_m` and `sqrt(k) (s_{km} - s_k / m)` over the full
/// output range of `T_k` applied to `s_m` truncated at `order`.
pub fn lemma13_deviation(k: u64, m: u64, order: usize) -> Result<f64> {
    if k < 1 || m < 2 {
        return Err(Error::InvalidArgument(format!("need k >= 1 and m >= 2, got k={k}, m={m}")));
    }
    let lhs = apply_t(k, &make_s(m, order)?);
    let len = lhs.order();
    let rhs = s_any(k * m, len).sub(&s_any(k, len).scale_ratio(1, m as i64))?.scale_sqrt(k);
    max_deviation(&lhs, &rhs)
}

pub fn verify_lemma13(k: u64, m: u64, order: usize) -> Result<bool> {
    Ok(lemma13_deviation(k, m, order)? == 0.0)
}

/// `max(|S^* S - I|, |P^2 - P|)` entrywise for the section `S` of `T_k`
/// with `dim` columns and `k * dim + k - 1` rows, `P = S S^*`.
pub fn verify_projection(k: u64, dim: usize, mode: Mode) -> f64 {
    projection_deviation(k, dim, mode)
}

/// `(l, p)` where `l` is the lowest nonzero index of `f` and `p` that of
/// `T_k f` (which the operator structure forces to be `kl + k - 1`).
pub fn leading_index(k: u64, f: &CoeffSeries) -> Result<(usize, usize)> {
    let l = f.lowest_nonzero().ok_or(Error::ZeroSeries)?;
    let p = apply_t(k, f).lowest_nonzero().ok_or(Error::ZeroSeries)?;
    Ok((l, p))
}

/// Largest coefficient of `T_k^* z^j`, `j <= n`, at an index above `n`:
/// zero when `span{1, ..., z^n}` is `T_k^*`-invariant.
pub fn invariance_deviation(k: u64, n: usize, mode: Mode) -> f64 {
    // pad so that the windows of every m <= n + 1 are covered
    let order = k as usize * (n + 3);
    (0..=n)
        .map(|j| {
            let image = apply_t_star(k, &CoeffSeries::monomial_padded(j, order, mode));
            (n + 1..image.order()).map(|i| image.coeff_c64(i).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Exact value of the window sum behind `T_k^* T_k = I`:
/// `k (m+1)(m+2) sum_l 1 / ((km+k+l)(km+k+l+1))`, which must be 1.
pub fn window_identity(k: u64, m: u64) -> QRat {
    let terms: Vec<QRat> =
        (0..k).map(|l| rat(1, ((k * m + k + l) * (k * m + k + l + 1)) as i64)).collect();
    crate::scalar::pairwise_sum(terms) * rat((k * (m + 1) * (m + 2)) as i64, 1)
}

/// `kappa(k; m)` for the section builders, `None` on the zero branch.
pub(crate) fn window_of(k: u64, m: u64) -> Option<u64> {
    let c = kappa(k, m);
    (c >= 0).then_some(c as u64)
}
