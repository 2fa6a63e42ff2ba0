//! Dimension of the space of `dim x dim` matrices commuting with the finite
//! sections of `T_k` and `T_k^*`, `k <= k_max`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::section::{finite_section, Section};
use crate::error::{Error, Result};

/// Relative singular-value threshold for the rank decision.
pub const RANK_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutantReport {
    pub dim: usize,
    pub k_max: u64,
    pub solution_dimension: usize,
    pub rank: usize,
    /// Absolute threshold `1e-8 * sigma_max`.
    pub tolerance: f64,
    pub sigma_max: f64,
    /// Largest singular value counted as zero.
    pub residual: f64,
    /// Smallest singular value counted as nonzero, if any.
    pub smallest_retained: Option<f64>,
    /// `|| X A - A X ||` for `X = I`, maximized over the stored sections.
    pub identity_residual: f64,
}

/// Rows of `vec(X A - A X) = (A^T (x) I - I (x) A) vec(X)` (column-major vec).
fn commutator_block(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    a.transpose().kronecker(&id) - id.kronecker(a)
}

pub fn commutant_experiment(dim: usize, k_max: u64) -> Result<CommutantReport> {
    if dim < 2 || k_max < 1 {
        return Err(Error::InvalidArgument(format!("need dim >= 2 and k_max >= 1, got dim={dim}, k_max={k_max}")));
    }
    let sections: Vec<DMatrix<f64>> = (1..=k_max)
        .flat_map(|k| [finite_section(k, dim, Section::T).entries, finite_section(k, dim, Section::TStar).entries])
        .collect();
    let n2 = dim * dim;
    let mut system = DMatrix::<f64>::zeros(sections.len() * n2, n2);
    for (i, a) in sections.iter().enumerate() {
        system.view_mut((i * n2, 0), (n2, n2)).copy_from(&commutator_block(a));
    }

    let id = DMatrix::<f64>::identity(dim, dim);
    let identity_residual =
        sections.iter().map(|a| (&id * a - a * &id).abs().max()).fold(0.0, f64::max);

    let sigma = system.singular_values();
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let tolerance = RANK_TOLERANCE * sigma_max;
    let rank = sigma.iter().filter(|&&s| s > tolerance).count();
    let residual = sigma.iter().cloned().filter(|&s| s <= tolerance).fold(0.0, f64::max);
    let smallest_retained = sigma.iter().cloned().filter(|&s| s > tolerance).reduce(f64::min);

    Ok(CommutantReport {
        dim,
        k_max,
        solution_dimension: n2 - rank,
        rank,
        tolerance,
        sigma_max,
        residual,
        smallest_retained,
        identity_residual,
    })
}
