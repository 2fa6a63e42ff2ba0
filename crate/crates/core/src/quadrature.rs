//! Numerical quadrature on the unit disk against `dA_1 = 2 (1 - |z|^2) dA`.
//!
//! Independent of the closed-form moments in [`crate::series`]; used as their
//! oracle by the `moments` verification suite.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Tensor-product rule on the disk: Gauss-Legendre in `r`, trapezoid in `theta`.
pub struct DiskRule {
    radial: Vec<(f64, f64)>,
    angular: usize,
}

impl DiskRule {
    pub fn new(radial_nodes: usize, angular_nodes: usize) -> Self {
        let (x, w) = gauss_legendre(radial_nodes);
        let radial = x.iter().zip(&w).map(|(&x, &w)| ((x + 1.0) / 2.0, w / 2.0)).collect();
        DiskRule { radial, angular: angular_nodes }
    }

    /// `int_D h(z) dA_1(z)`, with `dA_1 = (2/pi) r (1 - r^2) dr dtheta`.
    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, h: F) -> Complex64 {
        let dtheta = 2.0 * PI / self.angular as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for &(r, wr) in &self.radial {
            let mut ring = Complex64::new(0.0, 0.0);
            for j in 0..self.angular {
                let z = Complex64::from_polar(r, j as f64 * dtheta);
                ring += h(z);
            }
            total += ring * dtheta * wr * (2.0 / PI) * r * (1.0 - r * r);
        }
        total
    }
}

/// Quadrature value of `<z^v, |z|^{2 n2} z^v>` in `L^2(dA_1)`, integrated
/// over the disk at the points themselves.
pub fn moment_by_quadrature(v: u64, n2: u64) -> Complex64 {
    let degree = 2 * (v + n2) as usize + 3;
    let rule = DiskRule::new(degree / 2 + 4, 2 * v as usize + 8);
    rule.integrate(|z| {
        let zv = z.powu(v as u32);
        let weight = z.norm_sqr().powi(n2 as i32);
        zv * (weight * zv).conj()
    })
}

/// Gauss-Legendre value of `2 int_0^1 r^{2v+2n2+1} (1 - r^2) dr`.
pub fn radial_moment_by_quadrature(v: u64, n2: u64) -> f64 {
    let (x, w) = gauss_legendre((v + n2) as usize + 4);
    let p = 2 * (v + n2) as i32 + 1;
    x.iter()
        .zip(&w)
        .map(|(&x, &w)| {
            let r = (x + 1.0) / 2.0;
            2.0 * (w / 2.0) * r.powi(p) * (1.0 - r * r)
        })
        .sum()
}
