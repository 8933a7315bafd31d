//! Approximating `wⁿ` by combinations of resolvents `(I − λw)⁻¹`.
//!
//! With `λ_i = ε ωⁱ` over the `(n+1)`-th roots of unity and `Σ_i μ_i λ_iʲ = δ_jn` for
//! `j ≤ n`, the combination `Σ_i μ_i (I − λ_i w)⁻¹` reproduces `wⁿ` up to the tail
//! `Σ_{k≥1} ε^{k(n+1)} w^{n+k(n+1)}`.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numsub::{
    hs_norm, identity, matrix_pow, op_norm, orthonormal_columns, unit, CMatrix, Tolerances, C64,
    ONE, ZERO,
};

fn require_unitary(w: &CMatrix, tol: &Tolerances) -> Result<()> {
    let n = crate::numsub::require_square(w, "unitary")?;
    let r = hs_norm(&(w.adjoint() * w - identity(n)));
    if r >= tol.residual_tol * (n as f64).sqrt().max(1.0) {
        return Err(Error::input(format!(
            "operator is not unitary (‖w*w − I‖ = {r:.3e})"
        )));
    }
    Ok(())
}

fn require_disc(lambda: C64) -> Result<()> {
    if lambda.norm().is_nan() || lambda.norm() >= 1.0 {
        return Err(Error::input(format!(
            "|λ| = {} must be below 1",
            lambda.norm()
        )));
    }
    Ok(())
}

/// `(I − λw)⁻¹ b = Σ λᵏ wᵏ b`, evaluated in closed form.
pub fn resolvent_series(
    w: &CMatrix,
    lambda: C64,
    b: &CMatrix,
    tol: &Tolerances,
) -> Result<CMatrix> {
    require_unitary(w, tol)?;
    require_disc(lambda)?;
    if b.nrows() != w.nrows() {
        return Err(Error::shape(format!(
            "b has {} rows for w of size {}",
            b.nrows(),
            w.nrows()
        )));
    }
    let n = w.nrows();
    let a = identity(n) - w * lambda;
    a.lu()
        .solve(b)
        .ok_or_else(|| Error::Internal("resolvent is singular".into()))
}

/// `Σ_{k≤terms} λᵏ wᵏ b`, the truncated series.
pub fn resolvent_partial_sum(w: &CMatrix, lambda: C64, b: &CMatrix, terms: usize) -> CMatrix {
    let mut acc = b.clone();
    let mut term = b.clone();
    for _ in 0..terms {
        term = w * &term * lambda;
        acc += &term;
    }
    acc
}

/// `(λ_i, μ_i)` with `λ_i = ε ωⁱ` and `Σ_i μ_i λ_iʲ = δ_jn` for `j = 0..n`.
pub fn vandermonde_coefficients(n: usize, eps: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    if n == 0 {
        return Err(Error::input("target power must be at least 1"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::input(format!("eps = {eps} must lie in (0, 1)")));
    }
    let m = n + 1;
    let lambdas: Vec<C64> = (0..m)
        .map(|i| unit(TAU * i as f64 / m as f64) * eps)
        .collect();
    let v = CMatrix::from_fn(m, m, |j, i| lambdas[i].powu(j as u32));
    let mut rhs = DVector::from_element(m, ZERO);
    rhs[n] = ONE;
    let mus = v
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("Vandermonde system is singular".into()))?;
    Ok((lambdas, mus.iter().copied().collect()))
}

/// `max_j |Σ_i μ_i λ_iʲ − δ_jn|`.
pub fn vandermonde_residual(lambdas: &[C64], mus: &[C64], n: usize) -> f64 {
    (0..=n)
        .map(|j| {
            let s: C64 = lambdas
                .iter()
                .zip(mus)
                .map(|(l, m)| m * l.powu(j as u32))
                .sum();
            let target = if j == n { ONE } else { ZERO };
            (s - target).norm()
        })
        .fold(0.0, f64::max)
}

/// `1 / (2ⁿ εⁿ sinⁿ(π/(n+1)))`, the Cramer-rule bound on every `|μ_i|`.
pub fn coefficient_bound(n: usize, eps: f64) -> f64 {
    let s = (PI / (n + 1) as f64).sin();
    1.0 / (2.0 * eps * s).powi(n as i32)
}

/// `ε / (2ⁿ sinⁿ(π/(n+1)) (1 − ε))`.
pub fn approximation_bound(n: usize, eps: f64) -> f64 {
    let s = (PI / (n + 1) as f64).sin();
    eps / ((2.0 * s).powi(n as i32) * (1.0 - eps))
}

#[derive(Debug, Clone, Serialize)]
pub struct ApproxCertificate {
    pub n: usize,
    pub eps: f64,
    #[serde(skip)]
    pub lambdas: Vec<C64>,
    #[serde(skip)]
    pub mus: Vec<C64>,
    pub vandermonde_residual: f64,
    pub max_abs_mu: f64,
    pub mu_bound: f64,
    /// `‖Σ μ_i (I − λ_i w)⁻¹ − wⁿ‖` in operator norm.
    pub achieved_error: f64,
    pub bound: f64,
}

impl ApproxCertificate {
    pub fn valid(&self) -> bool {
        self.vandermonde_residual < 1e-9
            && self.max_abs_mu <= self.mu_bound + 1e-9
            && self.achieved_error <= self.bound + 1e-10
    }
}

/// Certificate that `wⁿ` lies within `approximation_bound(n, ε)` of the resolvent span.
pub fn power_approximation(
    w: &CMatrix,
    n: usize,
    eps: f64,
    tol: &Tolerances,
) -> Result<ApproxCertificate> {
    require_unitary(w, tol)?;
    let (lambdas, mus) = vandermonde_coefficients(n, eps)?;
    let size = w.nrows();
    let id = identity(size);
    let mut approx = CMatrix::zeros(size, size);
    for (l, m) in lambdas.iter().zip(&mus) {
        approx += resolvent_series(w, *l, &id, tol)? * *m;
    }
    let achieved_error = op_norm(&(approx - matrix_pow(w, n)));
    Ok(ApproxCertificate {
        n,
        eps,
        vandermonde_residual: vandermonde_residual(&lambdas, &mus, n),
        max_abs_mu: mus.iter().map(|m| m.norm()).fold(0.0, f64::max),
        mu_bound: coefficient_bound(n, eps),
        achieved_error,
        bound: approximation_bound(n, eps),
        lambdas,
        mus,
    })
}

/// Rank of the profiles `(1, λ, …, λᴺ)`: eigenvectors of the backward shift on `C^{N+1}`.
pub fn eigenvector_span_rank(lambdas: &[C64], n: usize, tol: &Tolerances) -> Result<usize> {
    for &l in lambdas {
        require_disc(l)?;
    }
    let profiles = CMatrix::from_fn(n + 1, lambdas.len(), |j, i| lambdas[i].powu(j as u32));
    Ok(orthonormal_columns(&profiles, tol.rank_tol, 0.0).ncols())
}
