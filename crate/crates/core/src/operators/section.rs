//! Finite sections of `T_k` and `T_k^*` in the orthonormal basis
//! `e_n = c_n z^n`, `c_n = sqrt((n+1)(n+2)/2)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::window_of;
use crate::scalar::{exact_gap, rat, rat_to_f64, Mode, QRat};
use crate::series::{inner_a21, CoeffSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Section {
    #[serde(rename = "T")]
    T,
    #[serde(rename = "T_star")]
    TStar,
}

/// Dense compression of `T_k` or `T_k^*`: entry `(m, n) = <op e_n, e_m>`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionMatrix {
    pub k: u64,
    pub which: Section,
    pub entries: DMatrix<f64>,
}

impl SectionMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn nonzeros(&self) -> usize {
        self.entries.iter().filter(|x| **x != 0.0).count()
    }

    /// Nonzero count per column.
    pub fn column_counts(&self) -> Vec<usize> {
        (0..self.cols()).map(|n| self.entries.column(n).iter().filter(|x| **x != 0.0).count()).collect()
    }
}

/// `c_n^2 = (n+1)(n+2)/2`
fn basis_scale_sq(n: u64) -> f64 {
    (n + 1) as f64 * (n + 2) as f64 / 2.0
}

/// Square section on `span{e_0, ..., e_{dim-1}}`.
pub fn finite_section(k: u64, dim: usize, which: Section) -> SectionMatrix {
    finite_section_rect(k, dim, dim, which)
}

/// Rectangular section: `rows` output basis vectors, `cols` input ones.
pub fn finite_section_rect(k: u64, rows: usize, cols: usize, which: Section) -> SectionMatrix {
    assert!(k >= 1);
    let sk = (k as f64).sqrt();
    let mut entries = DMatrix::zeros(rows, cols);
    match which {
        Section::T => {
            // T e_n = sqrt(k) c_n sum_{m in window(n)} z^m = sum sqrt(k) c_n / c_m e_m
            for m in 0..rows {
                if let Some(n) = window_of(k, m as u64) {
                    if (n as usize) < cols {
                        entries[(m, n as usize)] =
                            sk * (basis_scale_sq(n) / basis_scale_sq(m as u64)).sqrt();
                    }
                }
            }
        }
        Section::TStar => {
            // T^* z^n = sqrt(k) (kappa+1)(kappa+2) / ((n+1)(n+2)) z^kappa, n >= k - 1
            for n in 0..cols {
                if let Some(kap) = window_of(k, n as u64) {
                    if (kap as usize) < rows {
                        let coeff = sk * ((kap + 1) * (kap + 2)) as f64 / ((n + 1) * (n + 2)) as f64;
                        let scale = (basis_scale_sq(n as u64) / basis_scale_sq(kap)).sqrt();
                        entries[(kap as usize, n)] = coeff * scale;
                    }
                }
            }
        }
    }
    SectionMatrix { k, which, entries }
}

/// Largest entrywise gap between the section and `c_m c_n <op z^n, z^m>`
/// computed from the coefficient operators and the inner product.
pub fn section_oracle_deviation(k: u64, dim: usize, which: Section) -> f64 {
    let sec = finite_section(k, dim, which);
    let pad = k as usize * dim + 2 * k as usize;
    let mut worst = 0.0f64;
    for n in 0..dim {
        let image = match which {
            Section::T => super::apply_t(k, &CoeffSeries::monomial(n, Mode::Float)),
            Section::TStar => super::apply_t_star(k, &CoeffSeries::monomial_padded(n, pad, Mode::Float)),
        };
        for m in 0..dim {
            let ip = inner_a21(&image, &CoeffSeries::monomial(m, Mode::Float)).expect("float").to_c64();
            let oracle = ip * (basis_scale_sq(n as u64) * basis_scale_sq(m as u64)).sqrt();
            worst = worst.max((oracle - sec.entries[(m, n)]).norm());
        }
    }
    worst
}

/// Sparse exact rational matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseQ {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BTreeMap<usize, QRat>>,
}

impl SparseQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseQ { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn diagonal(values: Vec<QRat>) -> Self {
        let n = values.len();
        let mut out = Self::zeros(n, n);
        for (i, v) in values.into_iter().enumerate() {
            out.set(i, i, v);
        }
        out
    }

    pub fn get(&self, i: usize, j: usize) -> QRat {
        self.data[i].get(&j).cloned().unwrap_or_else(QRat::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: QRat) {
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn transpose(&self) -> SparseQ {
        let mut out = Self::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for (&j, v) in row {
                out.data[j].insert(i, v.clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &SparseQ) -> SparseQ {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, QRat> = BTreeMap::new();
            for (&l, a) in row {
                for (&j, b) in &other.data[l] {
                    let e = acc.entry(j).or_insert_with(QRat::zero);
                    *e += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[i] = acc;
        }
        out
    }

    pub fn sub(&self, other: &SparseQ) -> SparseQ {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (i, row) in other.data.iter().enumerate() {
            for (&j, v) in row {
                let cur = out.get(i, j);
                out.set(i, j, cur - v);
            }
        }
        out
    }

    pub fn scale(&self, q: &QRat) -> SparseQ {
        let mut out = self.clone();
        for row in &mut out.data {
            for v in row.values_mut() {
                *v = &*v * q;
            }
            row.retain(|_, v| !v.is_zero());
        }
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &QRat)> {
        self.data.iter().enumerate().flat_map(|(i, row)| row.iter().map(move |(&j, v)| (i, j, v)))
    }
}

/// `max(|S^T S - I|, |S S^T S S^T - S S^T|)` entrywise for the section `S`
/// of `T_k` with `dim` columns and `k * dim + k - 1` rows.
///
/// Exact mode factors `S = sqrt(k) C_out^{-1} M C_in` with `M` the 0/1
/// window pattern and `C = diag(c_n)`, so both residuals reduce to rational
/// matrices conjugated by the diagonal scalings: with `W = C_out^{-2}` and
/// `Q = k M C_in^2 M^T`,
/// `S^T S - I = C_in (k M^T W M - C_in^{-2}) C_in` and
/// `P^2 - P = C_out^{-1} (Q W Q - Q) C_out^{-1}`.
/// The deviation is zero iff the rational residuals vanish.
pub fn projection_deviation(k: u64, dim: usize, mode: Mode) -> f64 {
    let rows = k as usize * dim + k as usize - 1;
    match mode {
        Mode::Float => {
            let s = finite_section_rect(k, rows, dim, Section::T).entries;
            let sts = s.transpose() * &s;
            let gram_dev = (sts - DMatrix::<f64>::identity(dim, dim)).abs().max();
            let p = &s * s.transpose();
            let proj_dev = (&p * &p - &p).abs().max();
            gram_dev.max(proj_dev)
        }
        Mode::Exact => {
            let c_sq = |n: usize| rat(((n + 1) * (n + 2)) as i64, 2);
            let mut pattern = SparseQ::zeros(rows, dim);
            for m in 0..rows {
                if let Some(n) = window_of(k, m as u64) {
                    if (n as usize) < dim {
                        pattern.set(m, n as usize, rat(1, 1));
                    }
                }
            }
            let kq = rat(k as i64, 1);
            let w = SparseQ::diagonal((0..rows).map(|m| c_sq(m).recip()).collect());
            let c_in_sq = SparseQ::diagonal((0..dim).map(c_sq).collect());
            let c_in_inv_sq = SparseQ::diagonal((0..dim).map(|n| c_sq(n).recip()).collect());

            let mtw = pattern.transpose().mul(&w);
            let gram_res = mtw.mul(&pattern).scale(&kq).sub(&c_in_inv_sq);
            let gram_dev = gram_res
                .entries()
                .map(|(i, j, r)| exact_gap(r) * (rat_to_f64(&(c_sq(i) * c_sq(j)))).sqrt())
                .fold(0.0, f64::max);

            let q = pattern.mul(&c_in_sq).mul(&pattern.transpose()).scale(&kq);
            let proj_res = q.mul(&w).mul(&q).sub(&q);
            let proj_dev = proj_res
                .entries()
                .map(|(i, j, r)| exact_gap(r) / (rat_to_f64(&(c_sq(i) * c_sq(j)).abs())).sqrt())
                .fold(0.0, f64::max);
            gram_dev.max(proj_dev)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_section() {
        for dim in 1..10 {
            let s = finite_section(1, dim, Section::T);
            assert_eq!(s.entries, DMatrix::identity(dim, dim));
            let s = finite_section(1, dim, Section::TStar);
            assert_eq!(s.entries, DMatrix::identity(dim, dim));
        }
    }

    #[test]
    fn matches_inner_product_oracle() {
        for k in [1, 2, 3, 7] {
            for which in [Section::T, Section::TStar] {
                let d = section_oracle_deviation(k, 40, which);
                assert!(d < 1e-12, "k={k} {which:?}: {d}");
            }
        }
    }

    #[test]
    fn t2_dim3() {
        let s = finite_section(2, 3, Section::T);
        let c = |n: f64| ((n + 1.0) * (n + 2.0) / 2.0).sqrt();
        let nz: Vec<_> = s.entries.iter().filter(|x| **x != 0.0).collect();
        assert_eq!(nz.len(), 2);
        assert!((s.entries[(1, 0)] - 2f64.sqrt() * c(0.0) / c(1.0)).abs() < 1e-15);
        assert!((s.entries[(2, 0)] - 2f64.sqrt() * c(0.0) / c(2.0)).abs() < 1e-15);
    }

    #[test]
    fn adjoint_is_transpose() {
        for k in 1..=10 {
            for dim in [1, 2, 7, 30, 100] {
                let t = finite_section(k, dim, Section::T).entries;
                let ts = finite_section(k, dim, Section::TStar).entries;
                assert!((t.transpose() - ts).abs().max() < 1e-14, "k={k}, dim={dim}");
            }
        }
    }

    #[test]
    fn section_structure() {
        for k in 1..=6u64 {
            let s = finite_section(k, 40, Section::T);
            for n in 0..40 {
                let col = s.entries.column(n);
                for (m, &x) in col.iter().enumerate() {
                    assert!(x >= 0.0);
                    if x != 0.0 {
                        assert!(m as u64 >= k - 1);
                        assert_eq!(crate::arith::kappa(k, m as u64), n as i64);
                    }
                }
            }
            // T^* sections are upper triangular: span{e_0..e_n} is invariant
            let ts = finite_section(k, 40, Section::TStar);
            for n in 0..40 {
                for m in n + 1..40 {
                    assert_eq!(ts.entries[(m, n)], 0.0);
                }
            }
        }
    }

    #[test]
    fn projection_exact_and_float() {
        assert_eq!(projection_deviation(1, 10, Mode::Exact), 0.0);
        assert_eq!(projection_deviation(2, 50, Mode::Exact), 0.0);
        assert_eq!(projection_deviation(7, 30, Mode::Exact), 0.0);
        assert!(projection_deviation(2, 50, Mode::Float) < 1e-12);
        assert!(projection_deviation(7, 30, Mode::Float) < 1e-12);
    }

    #[test]
    fn projection_detects_missing_rows() {
        // dropping the last row breaks S^T S = I in the last column
        let k = 3;
        let dim = 5;
        let rows = k * dim + k - 2;
        let s = finite_section_rect(k as u64, rows, dim, Section::T).entries;
        let dev = (s.transpose() * &s - DMatrix::<f64>::identity(dim, dim)).abs().max();
        assert!(dev > 1e-3);
    }

    #[test]
    fn sparse_algebra() {
        let mut a = SparseQ::zeros(2, 3);
        a.set(0, 0, rat(1, 2));
        a.set(1, 2, rat(3, 1));
        let b = a.transpose();
        let p = a.mul(&b);
        assert_eq!(p.get(0, 0), rat(1, 4));
        assert_eq!(p.get(1, 1), rat(9, 1));
        assert_eq!(p.get(0, 1), QRat::zero());
        assert_eq!(p.sub(&p).entries().count(), 0);
    }
}
