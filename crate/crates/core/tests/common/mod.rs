#![allow(dead_code)]

use nalgebra::DMatrix;
use polyfw::harness::{generate_instance, ExperimentSpec};
use polyfw::LassoProblem;

pub fn to_nalgebra(p: &LassoProblem) -> DMatrix<f64> {
    let a = p.matrix();
    DMatrix::from_column_slice(a.rows(), a.cols(), a.as_column_major())
}

/// Largest singular value squared, from a dense SVD.
pub fn svd_norm_sq(m: &DMatrix<f64>) -> f64 {
    let s = m.singular_values();
    let top = s.iter().cloned().fold(0.0, f64::max);
    top * top
}

/// Plain ISTA on the full problem with step `1/σ_max²` (SVD), written without the
/// library kernels. Returns the final point and its objective.
pub fn ista_oracle(p: &LassoProblem, iterations: usize) -> (Vec<f64>, f64) {
    let a = to_nalgebra(p);
    let y = nalgebra::DVector::from_column_slice(p.y());
    let tau = 1.0 / svd_norm_sq(&a);
    let lambda = p.lambda();
    let at = a.transpose();
    let mut x = nalgebra::DVector::<f64>::zeros(p.cols());
    let mut r = nalgebra::DVector::<f64>::zeros(p.rows());
    let mut g = nalgebra::DVector::<f64>::zeros(p.cols());
    for _ in 0..iterations {
        a.mul_to(&x, &mut r);
        r -= &y;
        at.mul_to(&r, &mut g);
        for i in 0..x.len() {
            let v = x[i] - tau * g[i];
            x[i] = v.signum() * (v.abs() - tau * lambda).max(0.0);
        }
    }
    let res = &y - &a * &x;
    let obj = 0.5 * res.norm_squared() + lambda * x.iter().map(|v| v.abs()).sum::<f64>();
    (x.iter().cloned().collect(), obj)
}

pub const ORACLE_ITERATIONS: usize = 1_000_000;

/// Random instance with L = 8, N = 16, K = 3 and λ = 0.1·λ_max.
pub fn small_instance(seed: u64) -> LassoProblem {
    let spec = ExperimentSpec::new(16, 3, 8.0 / 3.0);
    assert_eq!(spec.measurements(), 8);
    generate_instance(&spec, seed).unwrap().problem
}

/// Random instance with L = 64, N = 256.
pub fn medium_instance(seed: u64) -> LassoProblem {
    let spec = ExperimentSpec::new(256, 8, 8.0);
    assert_eq!(spec.measurements(), 64);
    generate_instance(&spec, seed).unwrap().problem
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
