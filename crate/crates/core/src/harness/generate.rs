//! Compressed-sensing instances `y = A x₀ + w`.
//!
//! Randomness comes from one ChaCha8 generator seeded with the trial seed; each
//! ingredient draws from its own stream so that, for instance, changing the noise
//! level leaves the matrix untouched.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::spec::ExperimentSpec;
use crate::error::Result;
use crate::model::linalg::norm_inf;
use crate::model::{DesignMatrix, LassoProblem, SparseIterate};

pub const RNG_NAME: &str = "ChaCha8 (rand_chacha), seed_from_u64(seed), streams: 0 = matrix, 1 = support, 2 = amplitudes, 3 = noise";
pub const PSNR_DEFINITION: &str = "psnr_db = 20 log10(max|A x0| / sigma)";

const STREAM_MATRIX: u64 = 0;
const STREAM_SUPPORT: u64 = 1;
const STREAM_VALUES: u64 = 2;
const STREAM_NOISE: u64 = 3;

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub problem: LassoProblem,
    pub ground_truth: SparseIterate,
    pub noise_sigma: f64,
    /// The realized noise vector `w`.
    pub noise: Vec<f64>,
    pub seed: u64,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Gaussian sensing matrix with i.i.d. `N(0, 1/L)` entries, drawn column by column.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Result<DesignMatrix> {
    let mut rng = stream(seed, STREAM_MATRIX);
    let scale = 1.0 / (rows as f64).sqrt();
    let data = (0..rows * cols)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        })
        .collect();
    DesignMatrix::from_column_major(rows, cols, data)
}

pub fn generate_instance(spec: &ExperimentSpec, seed: u64) -> Result<GeneratedInstance> {
    spec.validate()?;
    let n = spec.n_features;
    let l = spec.measurements();
    let matrix = gaussian_matrix(l, n, seed)?;

    let mut support: Vec<usize> = sample(&mut stream(seed, STREAM_SUPPORT), n, spec.sparsity).into_vec();
    support.sort_unstable();
    let mut values_rng = stream(seed, STREAM_VALUES);
    let mut values: Vec<f64> = Vec::with_capacity(support.len());
    while values.len() < support.len() {
        let v: f64 = StandardNormal.sample(&mut values_rng);
        // Exactly-representable zero has probability 0 but would break K-sparsity.
        if v != 0.0 {
            values.push(v);
        }
    }
    let ground_truth = SparseIterate::new(n, support, values)?;

    let mut y = vec![0.0; l];
    matrix.apply_columns_into(ground_truth.support(), ground_truth.weights(), &mut y);
    let noise_sigma = norm_inf(&y) * 10f64.powf(-spec.psnr_db / 20.0);
    let mut noise_rng = stream(seed, STREAM_NOISE);
    let noise: Vec<f64> = (0..l)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut noise_rng);
            noise_sigma * z
        })
        .collect();
    for (yi, wi) in y.iter_mut().zip(&noise) {
        *yi += wi;
    }
    let problem = LassoProblem::with_lambda_factor(matrix, y, spec.lambda_factor)?;
    Ok(GeneratedInstance {
        problem,
        ground_truth,
        noise_sigma,
        noise,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        ExperimentSpec::new(64, 4, 4.0)
    }

    #[test]
    fn instances_are_reproducible_from_seed() {
        let a = generate_instance(&small_spec(), 7).unwrap();
        let b = generate_instance(&small_spec(), 7).unwrap();
        assert_eq!(a.problem.matrix(), b.problem.matrix());
        assert_eq!(a.problem.y(), b.problem.y());
        assert_eq!(a.ground_truth, b.ground_truth);
        let c = generate_instance(&small_spec(), 8).unwrap();
        assert_ne!(a.problem.y(), c.problem.y());
    }

    #[test]
    fn ground_truth_is_exactly_k_sparse() {
        let inst = generate_instance(&small_spec(), 3).unwrap();
        assert_eq!(inst.ground_truth.nnz(), 4);
        assert_eq!(inst.problem.rows(), 16);
        assert_eq!(inst.problem.cols(), 64);
    }

    #[test]
    fn lambda_follows_factor_rule() {
        let inst = generate_instance(&small_spec(), 5).unwrap();
        let p = &inst.problem;
        assert!((p.lambda() - 0.1 * p.lambda_max()).abs() <= 1e-15 * p.lambda_max());
    }

    #[test]
    fn invalid_spec_is_rejected() {
        assert!(generate_instance(&ExperimentSpec::new(64, 65, 2.0), 0).is_err());
        assert!(generate_instance(&ExperimentSpec::new(64, 16, 4.0), 0).is_err());
    }

    #[test]
    fn matrix_columns_have_near_unit_norm() {
        let a = gaussian_matrix(2048, 8, 1).unwrap();
        for j in 0..8 {
            let n2: f64 = a.column(j).iter().map(|v| v * v).sum();
            assert!((n2 - 1.0).abs() < 0.15, "column {j}: {n2}");
        }
    }
}
