//! Restricted re-optimization: warm-started ISTA on the columns of an active set.

use super::clock::WorkClock;
use crate::error::{Error, Result};
use crate::model::linalg::{
    distance, norm2, soft_threshold_scalar, spectral_norm_sq_from, LinearOperator,
    SPECTRAL_MAX_ITER, SPECTRAL_TOL, STEP_INFLATION,
};
use crate::model::{LassoProblem, SparseIterate};

#[derive(Debug, Clone)]
pub struct CorrectionOutcome {
    /// Weights aligned with the active set (zeros kept).
    pub weights: Vec<f64>,
    /// `A_S u` for the returned weights.
    pub forward: Vec<f64>,
    pub iterations: usize,
    /// Leading right singular vector of `A_S`, reusable as a warm start.
    pub spectral_vector: Vec<f64>,
}

#[derive(Debug, Default)]
pub(crate) struct CorrectionLimits<'a> {
    pub max_iter: Option<usize>,
    pub spectral_init: Option<&'a [f64]>,
    /// Abort once the clock passes this many seconds.
    pub deadline: Option<(&'a WorkClock, f64)>,
}

/// Runs ISTA on `min ½‖y − A_S u‖² + λ‖u‖₁` from `init` (aligned with `active`).
///
/// The loop takes at least one step and continues while
/// `‖u_k − u_{k−1}‖ > ε‖u_{k−1}‖` (or `> ε` when `u_{k−1} = 0`). The step is
/// `1/(1.01·σ_max(A_S)²)`, which makes every iteration monotone in the objective.
pub(crate) fn correct(
    problem: &LassoProblem,
    active: &[usize],
    init: Vec<f64>,
    eps: f64,
    limits: CorrectionLimits<'_>,
) -> CorrectionOutcome {
    let rows = problem.rows();
    if active.is_empty() {
        return CorrectionOutcome {
            weights: Vec::new(),
            forward: vec![0.0; rows],
            iterations: 0,
            spectral_vector: Vec::new(),
        };
    }
    let sub = problem.matrix().restrict(active);
    let spectral = spectral_norm_sq_from(&sub, SPECTRAL_TOL, SPECTRAL_MAX_ITER, limits.spectral_init);
    if spectral.value == 0.0 {
        // A_S = 0: the penalty alone decides and the minimizer is 0.
        return CorrectionOutcome {
            weights: vec![0.0; active.len()],
            forward: vec![0.0; rows],
            iterations: 0,
            spectral_vector: spectral.vector,
        };
    }
    let tau = 1.0 / (STEP_INFLATION * spectral.value);
    let threshold = tau * problem.lambda();
    let y = problem.y();

    let mut u = init;
    let mut next = vec![0.0; u.len()];
    let mut grad = vec![0.0; u.len()];
    let mut forward = vec![0.0; rows];
    let mut residual = vec![0.0; rows];
    sub.apply_into(&u, &mut forward);

    let max_iter = limits.max_iter.unwrap_or(usize::MAX);
    let mut iterations = 0;
    loop {
        iterations += 1;
        for ((r, f), yi) in residual.iter_mut().zip(&forward).zip(y) {
            *r = f - yi;
        }
        sub.adjoint_into(&residual, &mut grad);
        for ((n, ui), gi) in next.iter_mut().zip(&u).zip(&grad) {
            *n = soft_threshold_scalar(ui - tau * gi, threshold);
        }
        let change = distance(&next, &u);
        let base = norm2(&u);
        std::mem::swap(&mut u, &mut next);
        sub.apply_into(&u, &mut forward);

        let settled = if base > 0.0 {
            change <= eps * base
        } else {
            change <= eps
        };
        let out_of_time = limits
            .deadline
            .is_some_and(|(clock, limit)| clock.elapsed_s() >= limit);
        if settled || iterations >= max_iter || out_of_time {
            break;
        }
    }
    CorrectionOutcome {
        weights: u,
        forward,
        iterations,
        spectral_vector: spectral.vector,
    }
}

/// Partial correction of `x_init` over `active` at relative accuracy `eps`.
///
/// `active` must be strictly increasing and contain the support of `x_init`. The
/// result is embedded back in dimension N with zeros off the active set, and its
/// objective never exceeds that of `x_init`.
pub fn partial_correction(
    problem: &LassoProblem,
    x_init: &SparseIterate,
    active: &[usize],
    eps: f64,
) -> Result<SparseIterate> {
    partial_correction_with(problem, x_init, active, eps, None).map(|(x, _)| x)
}

/// [`partial_correction`] with an optional cap on ISTA iterations; also returns
/// the raw outcome.
pub fn partial_correction_with(
    problem: &LassoProblem,
    x_init: &SparseIterate,
    active: &[usize],
    eps: f64,
    max_iter: Option<usize>,
) -> Result<(SparseIterate, CorrectionOutcome)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "correction accuracy must be positive, got {eps}"
        )));
    }
    if x_init.dimension() != problem.cols() {
        return Err(Error::DimensionMismatch {
            what: "iterate dimension",
            expected: problem.cols(),
            found: x_init.dimension(),
        });
    }
    if active.windows(2).any(|w| w[0] >= w[1]) || active.last().is_some_and(|&j| j >= problem.cols()) {
        return Err(Error::InvalidParameter(
            "active set must be strictly increasing and in bounds".into(),
        ));
    }
    let init = gather(x_init, active)?;
    let outcome = correct(
        problem,
        active,
        init,
        eps,
        CorrectionLimits {
            max_iter,
            ..Default::default()
        },
    );
    let x = SparseIterate::from_parts_dropping_zeros(problem.cols(), active, &outcome.weights);
    Ok((x, outcome))
}

/// Values of `x` at the positions of `active`; fails if `x` has mass outside it.
fn gather(x: &SparseIterate, active: &[usize]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; active.len()];
    for (i, w) in x.iter() {
        match active.binary_search(&i) {
            Ok(pos) => out[pos] = w,
            Err(_) => {
                return Err(Error::InvalidParameter(format!(
                    "iterate support index {i} is not in the active set"
                )))
            }
        }
    }
    Ok(out)
}
