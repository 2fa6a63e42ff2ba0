//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::LN_2;
use std::time::{Duration, Instant};

use bergman_lab::arith::FactorTable;
use bergman_lab::distance::{build_gram, distance_curve, gram_entry, rhs_entry, solve_distance, theorem11_residual, Precision};
use bergman_lab::family::{psi_map, random_weighted};
use bergman_lab::operators::{
    commutant_experiment, eigenfunction_deviation, finite_section, invariance_deviation, left_inverse_deviation,
    lemma13_deviation, section_oracle_deviation, semigroup_deviation, verify_isometry, verify_projection, Section,
};
use bergman_lab::quadrature::moment_by_quadrature;
use bergman_lab::scalar::Mode;
use bergman_lab::series::{monomial_moment, norm_sq_a21, CoeffSeries};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Exact operator identities, k <= 10, orders up to 600, under 60 s.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failed: Vec<String> = Vec::new();
    let mut record = |name: &str, k: u64, dev: f64| {
        if dev != 0.0 {
            failed.push(format!("{name}(k={k})={dev:e}"));
        }
        worst = worst.max(dev);
    };
    for k in 1..=10u64 {
        for j in 1..=10u64 {
            for t in 0..3 {
                let f = CoeffSeries::random_exact(12 + t as usize, 100 * j + k + 7 * t);
                record("semigroup", k, semigroup_deviation(j, k, &f));
            }
            for m in [0usize, 3, 11] {
                record("semigroup_monomial", k, semigroup_deviation(j, k, &CoeffSeries::monomial(m, Mode::Exact)));
            }
        }
        for t in 0..2 {
            let f = CoeffSeries::random_exact(600, 9000 + 13 * k + t);
            let (a, b) = verify_isometry(k, &f);
            record("isometry", k, a.deviation(&b));
            record("left_inverse", k, left_inverse_deviation(k, &f));
        }
        for m in 2..=10 {
            record("lemma13", k, lemma13_deviation(k, m, 600).expect("valid arguments"));
        }
        record("eigenfunction", k, eigenfunction_deviation(k, 600, Mode::Exact));
        let inv = (0..=30).map(|n| invariance_deviation(k, n, Mode::Exact)).fold(0.0, f64::max);
        record("invariance", k, inv);
        record("projection", k, verify_projection(k, 50, Mode::Exact));
    }
    let elapsed = start.elapsed();
    let pass = failed.is_empty() && elapsed < Duration::from_secs(60);
    outcome(pass, format!("max deviation {worst:e}, {:.1} s, failures {failed:?}", elapsed.as_secs_f64()))
}

/// Closed-form moments against 2-D quadrature, v, n2 <= 8, to 1e-6.
fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for v in 0..=8 {
        for n2 in 0..=8 {
            let q = moment_by_quadrature(v, n2);
            worst = worst.max((q.re - monomial_moment(v, n2)).abs().max(q.im.abs()));
        }
    }
    outcome(worst < 1e-6, format!("max |closed form - quadrature| = {worst:e}"))
}

/// Psi is an isometry, exactly, on 100 random rational sequences.
fn criterion_3() -> Outcome {
    let mut mismatches = 0;
    for t in 0..100 {
        let f = random_weighted(1 + (t as usize * 37) % 120, 55_000 + t);
        if f.weighted_norm_sq() != norm_sq_a21(&psi_map(&f)) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} of 100 sequences differ"))
}

/// d_2^2 = 2 - 2 ln 2: 1e-9 (digamma), 1e-3 (direct, 10^6 terms).
fn criterion_4() -> Outcome {
    let anchor = 2.0 - 2.0 * LN_2;
    // telescoping oracles for the entries
    let g_oracle = LN_2 / 2.0;
    let r_oracle = LN_2;
    let g = gram_entry(2, 2, Precision::Digamma).unwrap();
    let r = rhs_entry(2, Precision::Digamma).unwrap();
    let dig = solve_distance(&build_gram(2, Precision::Digamma, None).unwrap()).unwrap().distance_sq;
    let direct = Precision::Direct { truncation: 1_000_000 };
    let dir = solve_distance(&build_gram(2, direct, None).unwrap()).unwrap().distance_sq;
    let pass = (g - g_oracle).abs() < 1e-12
        && (r - r_oracle).abs() < 1e-12
        && (dig - anchor).abs() < 1e-9
        && (dir - anchor).abs() < 1e-3;
    outcome(pass, format!("digamma {dig:.12} (err {:e}), direct {dir:.9} (err {:e})", (dig - anchor).abs(), (dir - anchor).abs()))
}

/// Regression values for d_N^2, digamma mode.
const FROZEN_D2: [(u64, f64); 5] = [
    (2, 0.6137056388801099),
    (10, 0.04770510663776628),
    (20, 0.03307650421878505),
    (50, 0.02377394083706541),
    (100, 0.020403838568939348),
];

/// d_N^2 positive and nonincreasing for N = 2..100, under 10 minutes, matching
/// the frozen values.
fn criterion_5() -> Outcome {
    let start = Instant::now();
    let ns: Vec<u64> = (2..=100).collect();
    let curve = distance_curve(&ns, Precision::Digamma, None).unwrap();
    let elapsed = start.elapsed();
    let positive = curve.iter().all(|r| r.distance_sq > 0.0);
    let monotone = curve.windows(2).all(|w| w[1].distance_sq <= w[0].distance_sq);
    let mut drift = 0.0f64;
    for (n, v) in FROZEN_D2 {
        drift = drift.max((curve[(n - 2) as usize].distance_sq - v).abs());
    }
    let pass = positive && monotone && drift < 1e-10 && elapsed < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "positive {positive}, nonincreasing {monotone}, d_100^2 = {:.12}, regression drift {drift:e}, {:.1} s",
            curve[98].distance_sq,
            elapsed.as_secs_f64()
        ),
    )
}

/// residual_h2 decreases over K = 10, 100, 1000 for m = 1, 2, 3, and
/// residual_a21 <= sqrt(2) residual_h2.
fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for m in 1..=3 {
        let reps: Vec<_> = [10, 100, 1000].iter().map(|&k| theorem11_residual(m, k, 100_000).unwrap()).collect();
        let decreasing = reps.windows(2).all(|w| w[1].residual_h2 < w[0].residual_h2);
        let lemma = reps.iter().all(|r| r.residual_a21 <= 2f64.sqrt() * r.residual_h2);
        pass &= decreasing && lemma;
        let h2: Vec<String> = reps.iter().map(|r| format!("{:.4e}", r.residual_h2)).collect();
        detail.push(format!("m={m}: [{}]{}", h2.join(", "), if lemma { "" } else { " lemma violated" }));
    }
    outcome(pass, detail.join("; "))
}

/// Direct (10^7 terms) and digamma Gram entries agree to 1e-6, 2 <= j, k <= 20.
fn criterion_7() -> Outcome {
    let direct = Precision::Direct { truncation: 10_000_000 };
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut symmetric = true;
    for j in 2..=20u64 {
        for k in j..=20u64 {
            let d = gram_entry(j, k, direct).unwrap();
            let g = gram_entry(j, k, Precision::Digamma).unwrap();
            symmetric &= g == gram_entry(k, j, Precision::Digamma).unwrap();
            worst = worst.max((d - g).abs());
        }
        worst = worst.max((rhs_entry(j, direct).unwrap() - rhs_entry(j, Precision::Digamma).unwrap()).abs());
    }
    outcome(
        worst < 1e-6 && symmetric,
        format!("max |direct - digamma| = {worst:e}, symmetric {symmetric}, {:.1} s", start.elapsed().as_secs_f64()),
    )
}

/// sum_{k <= K} mu(k/m) [m | k | n] = [m = n] for m, n <= 200 and K >= n.
fn criterion_8() -> Outcome {
    let table = FactorTable::new(1000);
    let mut bad = 0;
    for m in 1..=200u64 {
        for n in 1..=200u64 {
            for k in [n, 200, 1000] {
                if table.mobius_delta_sum(m, n, k).unwrap() != (m == n) as i64 {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{bad} mismatches over 120000 cases"))
}

/// Section entries match the inner-product oracle to 1e-12 (k <= 10,
/// dim <= 200) and the adjoint section is the transpose.
fn criterion_9() -> Outcome {
    let mut oracle = 0.0f64;
    let mut transpose = 0.0f64;
    for k in 1..=10u64 {
        for which in [Section::T, Section::TStar] {
            oracle = oracle.max(section_oracle_deviation(k, 200, which));
        }
        for dim in [1, 2, 17, 100, 200] {
            let t = finite_section(k, dim, Section::T).entries;
            let ts = finite_section(k, dim, Section::TStar).entries;
            transpose = transpose.max((t.transpose() - ts).abs().max());
        }
    }
    outcome(oracle < 1e-12 && transpose < 1e-12, format!("oracle gap {oracle:e}, transpose gap {transpose:e}"))
}

/// Regression value of the commutant dimension at dim = 8, k_max = 4.
const FROZEN_COMMUTANT_8_4: usize = 2;

/// Identity always commutes; dimension nonincreasing in k_max for dim <= 12.
fn criterion_10() -> Outcome {
    let mut identity_ok = true;
    let mut monotone = true;
    let mut frozen = None;
    let mut summary = Vec::new();
    for dim in 2..=12usize {
        let dims: Vec<usize> = (1..=6)
            .map(|k_max| {
                let r = commutant_experiment(dim, k_max).unwrap();
                identity_ok &= r.identity_residual == 0.0 && r.solution_dimension >= 1;
                if (dim, k_max) == (8, 4) {
                    frozen = Some(r.solution_dimension);
                }
                r.solution_dimension
            })
            .collect();
        monotone &= dims.windows(2).all(|w| w[1] <= w[0]);
        summary.push(format!("{dim}:{}", dims.last().unwrap()));
    }
    let regression = frozen == Some(FROZEN_COMMUTANT_8_4);
    outcome(
        identity_ok && monotone && regression,
        format!("identity {identity_ok}, nonincreasing {monotone}, dim(8,4) = {frozen:?}, dim at k_max 6 [{}]", summary.join(" ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("operator identities (exact)", criterion_1),
        ("moment identity vs quadrature", criterion_2),
        ("Psi isometry (exact)", criterion_3),
        ("distance anchor d_2", criterion_4),
        ("distance monotonicity N = 2..100", criterion_5),
        ("Moebius combination decay", criterion_6),
        ("two-method Gram agreement", criterion_7),
        ("Moebius delta sum", criterion_8),
        ("finite-section consistency", criterion_9),
        ("commutant sanity", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!("criterion {:>2} {}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
