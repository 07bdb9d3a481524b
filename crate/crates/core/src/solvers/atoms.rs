//! Linear-subproblem and step-size primitives of the Frank-Wolfe family on the
//! lifted cone `C = {(t, x) : ‖x‖₁ ≤ t ≤ M}`.

use crate::error::Result;
use crate::model::linalg::{dot, norm2_sq};
use crate::model::{Certificate, LassoProblem, SparseIterate};

/// `γ_k = 2/(k+2)` for `k ≥ 1`.
pub fn step_size_schedule(k: usize) -> f64 {
    assert!(k >= 1, "step sizes are defined for k >= 1");
    2.0 / (k as f64 + 2.0)
}

/// Extreme point of the lifted cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Atom {
    /// The apex `(0, 0)`.
    Apex,
    /// `(M, sign·M·e_index)`.
    Vertex { index: usize, sign: f64 },
}

impl Atom {
    /// Lift coordinate `t_s` of the atom for cone radius `m`.
    pub fn lift(&self, m: f64) -> f64 {
        match self {
            Atom::Apex => 0.0,
            Atom::Vertex { .. } => m,
        }
    }

    pub fn to_iterate(&self, dimension: usize, m: f64) -> SparseIterate {
        match *self {
            Atom::Apex => SparseIterate::zeros(dimension),
            Atom::Vertex { index, sign } => {
                SparseIterate::from_parts_dropping_zeros(dimension, &[index], &[sign * m])
            }
        }
    }
}

/// A point `(t, x)` of the lifted cone.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedIterate {
    pub x: SparseIterate,
    pub t: f64,
}

impl LiftedIterate {
    pub fn origin(dimension: usize) -> Self {
        Self {
            x: SparseIterate::zeros(dimension),
            t: 0.0,
        }
    }

    /// `‖x‖₁ ≤ t ≤ M` up to `slack`.
    pub fn in_cone(&self, m: f64, slack: f64) -> bool {
        self.x.l1_norm() <= self.t + slack && self.t <= m + slack && self.t >= -slack
    }
}

/// Minimizer of the linearized lifted objective over the extreme points of `C`.
///
/// Against an atom `(M, ±M eᵢ)` the linearization is `λM(1 ∓ ηᵢ)`; against the apex
/// it is 0. The best vertex is the largest `|ηᵢ|` (smallest index on ties), and the
/// apex wins whenever `‖η‖_∞ ≤ 1`.
pub fn select_atom(certificate: &Certificate) -> Atom {
    let values = certificate.values();
    if values.is_empty() || certificate.linf() <= 1.0 {
        return Atom::Apex;
    }
    let mut best = 0;
    let mut best_abs = values[0].abs();
    for (i, v) in values.iter().enumerate().skip(1) {
        if v.abs() > best_abs {
            best = i;
            best_abs = v.abs();
        }
    }
    Atom::Vertex {
        index: best,
        sign: if values[best] >= 0.0 { 1.0 } else { -1.0 },
    }
}

/// `{ j : |η_j| ≥ ‖η‖_∞ − δγ }`, ascending. Always contains the maximizers.
pub fn polyatomic_indices(certificate: &Certificate, delta: f64, gamma: f64) -> Vec<usize> {
    let threshold = certificate.linf() - delta * gamma;
    certificate
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() >= threshold)
        .map(|(i, _)| i)
        .collect()
}

/// Closed-form `argmin_{γ∈[0,1]} g(γ)` for
/// `g(γ) = ½‖r − γAd‖² + λ(t + γ(t_s − t))` with `r = y − Ax` and `d = s − x`.
pub(crate) fn line_search_step(a_d: &[f64], residual: &[f64], lambda: f64, lift_delta: f64) -> f64 {
    let curvature = norm2_sq(a_d);
    if curvature == 0.0 {
        return 0.0;
    }
    ((dot(a_d, residual) - lambda * lift_delta) / curvature).clamp(0.0, 1.0)
}

/// Exact line search between `current` and the lifted `atom`.
pub fn exact_line_search(
    problem: &LassoProblem,
    current: &LiftedIterate,
    atom: &Atom,
) -> Result<f64> {
    let m = problem.lift_bound();
    let ax = problem.forward(&current.x)?;
    let residual: Vec<f64> = problem.y().iter().zip(&ax).map(|(y, a)| y - a).collect();
    let s = atom.to_iterate(problem.cols(), m);
    let a_s = problem.forward(&s)?;
    let a_d: Vec<f64> = a_s.iter().zip(&ax).map(|(s, x)| s - x).collect();
    Ok(line_search_step(
        &a_d,
        &residual,
        problem.lambda(),
        atom.lift(m) - current.t,
    ))
}
