//! Small dense kernels shared by every solver.
//!
//! Reductions use a fixed four-way accumulation order so results are bit-identical
//! across runs on the same build.

/// Safety factor applied to spectral-norm estimates before they become step sizes.
pub const STEP_INFLATION: f64 = 1.01;

/// Default relative tolerance of [`spectral_norm_sq`].
pub const SPECTRAL_TOL: f64 = 1e-4;

/// Default iteration cap of [`spectral_norm_sq`].
pub const SPECTRAL_MAX_ITER: usize = 1000;

/// A real linear map `ℝᶜᵒˡˢ → ℝʳᵒʷˢ` with its transpose.
pub trait LinearOperator {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// `out ← A x`
    fn apply_into(&self, x: &[f64], out: &mut [f64]);
    /// `out ← Aᵀ r`
    fn adjoint_into(&self, r: &[f64], out: &mut [f64]);
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub fn norm2_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    norm2_sq(a).sqrt()
}

#[inline]
pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

#[inline]
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `y ← y + alpha x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean distance between two vectors.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[inline]
pub fn soft_threshold_scalar(v: f64, threshold: f64) -> f64 {
    let m = v.abs() - threshold;
    if m > 0.0 {
        m.copysign(v)
    } else {
        0.0
    }
}

/// Componentwise `sgn(vᵢ)·max(0, |vᵢ| − threshold)`.
pub fn soft_threshold(v: &[f64], threshold: f64) -> Vec<f64> {
    assert!(threshold >= 0.0, "soft_threshold: negative threshold");
    v.iter().map(|&x| soft_threshold_scalar(x, threshold)).collect()
}

pub fn soft_threshold_in_place(v: &mut [f64], threshold: f64) {
    for x in v.iter_mut() {
        *x = soft_threshold_scalar(*x, threshold);
    }
}

/// Outcome of a spectral-norm estimate of `A`.
#[derive(Debug, Clone)]
pub struct SpectralEstimate {
    /// Estimate of `σ_max(A)²`.
    pub value: f64,
    /// Unit-norm approximation of the leading right singular vector.
    pub vector: Vec<f64>,
    /// Products with `AᵀA`.
    pub iterations: usize,
}

// Krylov basis size before an explicit restart from the current Ritz vector.
const LANCZOS_RESTART: usize = 64;

/// Estimates `σ_max(A)²` by Lanczos iteration on `AᵀA`.
///
/// Returns 0 for the zero operator. The estimate is the top Ritz value, which never
/// exceeds the true value, and the loop stops once the Ritz residual is at most
/// `tol` relative. Callers that need a valid step size
/// multiply by [`STEP_INFLATION`].
pub fn spectral_norm_sq<Op: LinearOperator + ?Sized>(op: &Op, tol: f64) -> f64 {
    spectral_norm_sq_from(op, tol, SPECTRAL_MAX_ITER, None).value
}

/// [`spectral_norm_sq`] with an iteration cap and an optional warm start.
pub fn spectral_norm_sq_from<Op: LinearOperator + ?Sized>(
    op: &Op,
    tol: f64,
    max_iter: usize,
    init: Option<&[f64]>,
) -> SpectralEstimate {
    let n = op.cols();
    let warm = init.filter(|v0| v0.len() == n && norm2(v0) > 0.0);
    let mut v: Vec<f64> = match warm {
        Some(v0) => v0.to_vec(),
        // Deterministic, non-symmetric start so that no singular direction is
        // systematically orthogonal to it.
        None => (0..n).map(|j| 1.0 + (j % 7) as f64 / 7.0).collect(),
    };
    if n == 0 || op.rows() == 0 {
        return SpectralEstimate {
            value: 0.0,
            vector: v,
            iterations: 0,
        };
    }
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let max_iter = max_iter.max(1);
    let mut av = vec![0.0; op.rows()];
    let mut iterations = 0;
    let mut value = 0.0;
    loop {
        let cycle = lanczos_cycle(op, &v, tol, LANCZOS_RESTART.min(n).min(max_iter - iterations), &mut av);
        iterations += cycle.steps;
        if cycle.value == 0.0 && iterations == cycle.steps && warm.is_some() {
            // The warm start lies in the null space of a possibly nonzero operator.
            return spectral_norm_sq_from(op, tol, max_iter, None);
        }
        value = f64::max(value, cycle.value);
        v = cycle.vector;
        if cycle.converged || iterations >= max_iter {
            break;
        }
    }
    SpectralEstimate {
        value,
        vector: v,
        iterations,
    }
}

struct LanczosCycle {
    value: f64,
    vector: Vec<f64>,
    steps: usize,
    converged: bool,
}

/// One Lanczos run of at most `max_steps` products, started from unit `start`,
/// with full reorthogonalization.
fn lanczos_cycle<Op: LinearOperator + ?Sized>(
    op: &Op,
    start: &[f64],
    tol: f64,
    max_steps: usize,
    av: &mut [f64],
) -> LanczosCycle {
    let n = start.len();
    let mut basis: Vec<Vec<f64>> = vec![start.to_vec()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut result = LanczosCycle {
        value: 0.0,
        vector: start.to_vec(),
        steps: 0,
        converged: false,
    };
    for j in 0..max_steps {
        op.apply_into(&basis[j], av);
        op.adjoint_into(av, &mut w);
        result.steps = j + 1;
        alpha.push(dot(&w, &basis[j]));
        // Two Gram-Schmidt passes against the whole basis.
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let b = norm2(&w);

        let k = alpha.len();
        let t = nalgebra::DMatrix::from_fn(k, k, |r, c| {
            if r == c {
                alpha[r]
            } else if r + 1 == c {
                beta[r]
            } else if c + 1 == r {
                beta[c]
            } else {
                0.0
            }
        });
        let eig = nalgebra::SymmetricEigen::new(t);
        let top = eig.eigenvalues.imax();
        let theta = eig.eigenvalues[top].max(0.0);
        let residual = (b * eig.eigenvectors[(k - 1, top)]).abs();
        // Some eigenvalue of AᵀA lies within `residual` of theta.
        let bound = residual;
        let invariant = b <= f64::EPSILON * theta.max(alpha[j].abs()) || b == 0.0;
        let done = invariant || bound <= tol * theta || j + 1 == max_steps;

        if done {
            let mut u = vec![0.0; n];
            for (i, q) in basis.iter().enumerate() {
                axpy(eig.eigenvectors[(i, top)], q, &mut u);
            }
            let nu = norm2(&u);
            if nu > 0.0 {
                u.iter_mut().for_each(|x| *x /= nu);
                result.vector = u;
            }
            result.value = theta;
            result.converged = invariant || bound <= tol * theta;
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    result
}
