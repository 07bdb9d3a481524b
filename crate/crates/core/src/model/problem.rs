use std::sync::OnceLock;

use super::iterate::{Certificate, SparseIterate};
use super::linalg::{self, norm2_sq, norm_inf, LinearOperator, SPECTRAL_TOL};
use super::matrix::{check_len, DesignMatrix};
use crate::error::{Error, Result};

/// The triple `(A, y, λ)` of a penalized LASSO problem
///
/// ```text
/// L(x) = ½‖y − Ax‖²₂ + λ‖x‖₁
/// ```
///
/// together with the constants every solver derives from it.
#[derive(Debug)]
pub struct LassoProblem {
    matrix: DesignMatrix,
    y: Vec<f64>,
    lambda: f64,
    spectral_norm_sq: OnceLock<f64>,
}

impl Clone for LassoProblem {
    fn clone(&self) -> Self {
        let spectral_norm_sq = OnceLock::new();
        if let Some(v) = self.spectral_norm_sq.get() {
            let _ = spectral_norm_sq.set(*v);
        }
        Self {
            matrix: self.matrix.clone(),
            y: self.y.clone(),
            lambda: self.lambda,
            spectral_norm_sq,
        }
    }
}

impl LassoProblem {
    pub fn new(matrix: DesignMatrix, y: Vec<f64>, lambda: f64) -> Result<Self> {
        check_len("observations", matrix.rows(), y.len())?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observations"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(Self {
            matrix,
            y,
            lambda,
            spectral_norm_sq: OnceLock::new(),
        })
    }

    /// Same data with the penalty set to `factor · λ_max`.
    pub fn with_lambda_factor(matrix: DesignMatrix, y: Vec<f64>, factor: f64) -> Result<Self> {
        check_len("observations", matrix.rows(), y.len())?;
        let lambda_max = norm_inf(&matrix.adjoint(&y)?);
        if lambda_max == 0.0 {
            return Err(Error::InvalidParameter(
                "lambda factor is undefined when Aᵀy = 0".into(),
            ));
        }
        Self::new(matrix, y, factor * lambda_max)
    }

    pub fn matrix(&self) -> &DesignMatrix {
        &self.matrix
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Radius `M = ‖y‖²₂/(2λ)` of the lifted cone; equals `L(0)/λ`.
    pub fn lift_bound(&self) -> f64 {
        norm2_sq(&self.y) / (2.0 * self.lambda)
    }

    /// `‖Aᵀy‖_∞`: every `λ ≥ λ_max` makes 0 a minimizer.
    pub fn lambda_max(&self) -> f64 {
        norm_inf(&self.matrix.adjoint(&self.y).expect("y matches rows"))
    }

    /// `σ_max(A)²`, estimated once and cached.
    pub fn spectral_norm_sq(&self) -> f64 {
        *self
            .spectral_norm_sq
            .get_or_init(|| linalg::spectral_norm_sq(&self.matrix, SPECTRAL_TOL))
    }

    fn check_iterate(&self, x: &SparseIterate) -> Result<()> {
        check_len("iterate dimension", self.cols(), x.dimension())
    }

    /// `Ax` accumulated over the support of `x` only.
    pub fn forward(&self, x: &SparseIterate) -> Result<Vec<f64>> {
        self.check_iterate(x)?;
        let mut out = vec![0.0; self.rows()];
        self.matrix
            .apply_columns_into(x.support(), x.weights(), &mut out);
        Ok(out)
    }

    /// `y − Ax`.
    pub fn residual(&self, x: &SparseIterate) -> Result<Vec<f64>> {
        let mut r = self.forward(x)?;
        for (ri, yi) in r.iter_mut().zip(&self.y) {
            *ri = yi - *ri;
        }
        Ok(r)
    }

    pub fn objective(&self, x: &SparseIterate) -> Result<f64> {
        let r = self.residual(x)?;
        Ok(self.objective_from_residual(&r, x.l1_norm()))
    }

    /// Objective of a dense vector of length N.
    pub fn objective_dense(&self, x: &[f64]) -> Result<f64> {
        let r = self.matrix.apply(x)?;
        let sq: f64 = r
            .iter()
            .zip(&self.y)
            .map(|(a, b)| (b - a) * (b - a))
            .sum();
        Ok(0.5 * sq + self.lambda * linalg::norm1(x))
    }

    pub(crate) fn objective_from_residual(&self, residual: &[f64], l1: f64) -> f64 {
        0.5 * norm2_sq(residual) + self.lambda * l1
    }

    pub fn dual_certificate(&self, x: &SparseIterate) -> Result<Certificate> {
        let r = self.residual(x)?;
        Ok(self.certificate_from_residual(&r))
    }

    pub(crate) fn certificate_from_residual(&self, residual: &[f64]) -> Certificate {
        let mut eta = vec![0.0; self.cols()];
        self.matrix.adjoint_into(residual, &mut eta);
        let lambda = self.lambda;
        eta.iter_mut().for_each(|v| *v /= lambda);
        Certificate::from_values(eta)
    }

    /// `C̄ = 4M²σ_max(A)²`, an upper bound on the curvature constant of the lifted problem.
    pub fn curvature_upper_bound(&self) -> f64 {
        let m = self.lift_bound();
        4.0 * m * m * self.spectral_norm_sq()
    }
}
