//! Identity-check suites shared by the `verify` command and the tests.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::family::{make_f, make_s, psi_inverse, psi_map, random_weighted, s_closed_form};
use crate::operators::{
    adjoint_deviation, eigenfunction_deviation, invariance_deviation, leading_index, left_inverse_deviation,
    lemma13_deviation, semigroup_deviation, verify_isometry, verify_projection,
};
use crate::quadrature::{moment_by_quadrature, radial_moment_by_quadrature};
use crate::scalar::{rat_to_f64, Mode};
use crate::series::{
    evaluate, max_deviation, monomial_moment, monomial_moment_exact, mul_one_minus_z, norm_sq_a21, radial_moment,
    CoeffSeries,
};

/// Tolerance for identities checked in floating point.
pub const FLOAT_IDENTITY_TOL: f64 = 1e-10;
/// Tolerance for closed-form moments against quadrature.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Operators,
    Lemma13,
    Moments,
    Family,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "operators" => Ok(Suite::Operators),
            "lemma13" => Ok(Suite::Lemma13),
            "moments" => Ok(Suite::Moments),
            "family" => Ok(Suite::Family),
            other => Err(format!("unknown suite '{other}' (expected all, operators, lemma13, moments or family)")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::All => "all",
            Suite::Operators => "operators",
            Suite::Lemma13 => "lemma13",
            Suite::Moments => "moments",
            Suite::Family => "family",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub k_max: u64,
    pub order: usize,
    pub mode: Mode,
    pub max_index: u64,
    pub m_max: u64,
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { k_max: 8, order: 400, mode: Mode::Exact, max_index: 8, m_max: 10, trials: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub k: Option<u64>,
    pub m: Option<u64>,
    pub mode: Mode,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    fn new(check: &str, k: Option<u64>, m: Option<u64>, mode: Mode, deviation: f64, tolerance: f64) -> Self {
        let pass = match mode {
            Mode::Exact if tolerance == 0.0 => deviation == 0.0,
            _ => deviation <= tolerance,
        };
        CheckRow { check: check.to_string(), k, m, mode, deviation, tolerance, pass }
    }

    fn identity(check: &str, k: Option<u64>, m: Option<u64>, mode: Mode, deviation: f64) -> Self {
        let tol = if mode == Mode::Exact { 0.0 } else { FLOAT_IDENTITY_TOL };
        Self::new(check, k, m, mode, deviation, tol)
    }
}

fn random(order: usize, seed: u64, mode: Mode) -> CoeffSeries {
    match mode {
        Mode::Exact => CoeffSeries::random_exact(order, seed),
        Mode::Float => CoeffSeries::random_float(order, seed),
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    Ok(match suite {
        Suite::All => {
            let mut rows = operators_suite(cfg)?;
            rows.extend(lemma13_suite(cfg)?);
            rows.extend(moments_suite(cfg));
            rows.extend(family_suite(cfg)?);
            rows
        }
        Suite::Operators => operators_suite(cfg)?,
        Suite::Lemma13 => lemma13_suite(cfg)?,
        Suite::Moments => moments_suite(cfg),
        Suite::Family => family_suite(cfg)?,
    })
}

pub fn operators_suite(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mode = cfg.mode;
    let order = cfg.order.max(1);
    let trials = cfg.trials.max(1) as u64;
    let mut rows = Vec::new();
    for k in 1..=cfg.k_max {
        for j in 1..=cfg.k_max {
            let o = order.min(60);
            let dev = (0..trials)
                .map(|t| semigroup_deviation(j, k, &random(o, 7919 * j + 104_729 * k + t, mode)))
                .fold(0.0, f64::max);
            rows.push(CheckRow::identity("semigroup", Some(k), Some(j), mode, dev));
        }

        let mut iso = 0.0f64;
        let mut left = 0.0f64;
        let mut adj = 0.0f64;
        let mut lead = 0.0f64;
        for t in 0..trials {
            let seed = 1_000_003 * k + t;
            let f = random(order, seed, mode);
            let (a, b) = verify_isometry(k, &f);
            iso = iso.max(a.deviation(&b));
            left = left.max(left_inverse_deviation(k, &f));

            let small = order.min(120);
            let f = random(small, seed + 17, mode);
            let g = random(k as usize * small + k as usize - 1, seed + 31, mode);
            adj = adj.max(adjoint_deviation(k, &f, &g)?);

            if let Ok((l, p)) = leading_index(k, &f) {
                lead = lead.max((p as f64 - (k as usize * l + k as usize - 1) as f64).abs());
            }
        }
        rows.push(CheckRow::identity("isometry", Some(k), None, mode, iso));
        rows.push(CheckRow::identity("left_inverse", Some(k), None, mode, left));
        rows.push(CheckRow::identity("adjoint", Some(k), None, mode, adj));
        rows.push(CheckRow::new("leading_index", Some(k), None, mode, lead, 0.0));
        rows.push(CheckRow::identity("eigenfunction", Some(k), None, mode, eigenfunction_deviation(k, order, mode)));
        let inv = (0..=30).map(|n| invariance_deviation(k, n, mode)).fold(0.0, f64::max);
        rows.push(CheckRow::identity("invariance", Some(k), None, mode, inv));
        rows.push(CheckRow::identity("projection", Some(k), None, mode, verify_projection(k, order.min(50), mode)));
    }
    Ok(rows)
}

/// `T_k s_m = sqrt(k) (s_{km} - s_k / m)`, always in exact arithmetic.
pub fn lemma13_suite(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for k in 1..=cfg.k_max {
        for m in 2..=cfg.m_max.max(2) {
            let dev = lemma13_deviation(k, m, cfg.order.max(1))?;
            rows.push(CheckRow::identity("lemma13", Some(k), Some(m), Mode::Exact, dev));
        }
    }
    Ok(rows)
}

/// Closed-form moments against disk and radial quadrature.
pub fn moments_suite(cfg: &VerifyConfig) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for v in 0..=cfg.max_index {
        for n2 in 0..=cfg.max_index {
            let q = moment_by_quadrature(v, n2);
            let dev = (Complex64::new(monomial_moment(v, n2), 0.0) - q).norm();
            rows.push(CheckRow::new("moment", Some(v), Some(n2), Mode::Float, dev, QUADRATURE_TOL));
            let dev = (rat_to_f64(&monomial_moment_exact(v, n2)) - monomial_moment(v, n2)).abs();
            rows.push(CheckRow::new("moment_exact", Some(v), Some(n2), Mode::Float, dev, 1e-15));
            let dev = (radial_moment(v, n2) - radial_moment_by_quadrature(v, n2)).abs();
            rows.push(CheckRow::new("radial_moment", Some(v), Some(n2), Mode::Float, dev, QUADRATURE_TOL));
        }
    }
    rows
}

pub fn family_suite(cfg: &VerifyConfig) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let trials = cfg.trials.max(1) as u64;
    let len = cfg.order.clamp(1, 200);
    let mut iso = 0.0f64;
    let mut round = 0.0f64;
    for t in 0..trials {
        let f = random_weighted(len, 424_242 + t);
        let image = psi_map(&f);
        iso = iso.max(f.weighted_norm_sq().deviation(&norm_sq_a21(&image)));
        let back = psi_map(&psi_inverse(&image));
        round = round.max(max_deviation(&back, &image)?);
    }
    rows.push(CheckRow::identity("psi_isometry", None, None, Mode::Exact, iso));
    rows.push(CheckRow::identity("psi_round_trip", None, None, Mode::Exact, round));

    let order = cfg.order.max(2);
    let points = [Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.3), Complex64::new(-0.25, 0.0), Complex64::new(0.2, 0.2)];
    for k in 2..=cfg.k_max.max(2) {
        let s = make_s(k, order)?;
        let bridge = mul_one_minus_z(&s).scale_ratio(k as i64, 1).truncate(order);
        rows.push(CheckRow::identity("scaling_bridge", Some(k), None, Mode::Exact, max_deviation(&make_f(k, order)?, &bridge)?));

        let sf = s.to_float();
        let mut dev = 0.0f64;
        for z in points {
            dev = dev.max((evaluate(&sf, z)? - s_closed_form(k, z)).norm());
        }
        rows.push(CheckRow::new("s_closed_form", Some(k), None, Mode::Float, dev, 1e-12));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        let cfg = VerifyConfig { k_max: 3, order: 60, trials: 2, max_index: 3, m_max: 4, ..Default::default() };
        for mode in [Mode::Exact, Mode::Float] {
            let cfg = VerifyConfig { mode, ..cfg.clone() };
            let rows = run_suite(Suite::All, &cfg).unwrap();
            for r in &rows {
                assert!(r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn lemma13_k1_is_trivial() {
        let cfg = VerifyConfig { k_max: 1, order: 100, ..Default::default() };
        let rows = lemma13_suite(&cfg).unwrap();
        assert_eq!(rows.len(), 9);
        assert!(rows.iter().all(|r| r.pass && r.deviation == 0.0));
    }

    #[test]
    fn suite_names() {
        assert_eq!("lemma13".parse::<Suite>().unwrap(), Suite::Lemma13);
        assert!("everything".parse::<Suite>().is_err());
    }
}
