//! Bregman proximal alternating minimization on
//! `F_λ(u, x) = f(x) + (1/λ) D_φ(x, ∇φ*(A u)) + g(u)`, its PALM-style
//! variant and the local equivalence with Bregman proximal gradient.

mod bpam;
mod bpg;
mod toys;

pub use bpam::{
    bpam_palm_u_update, bpam_run, stationarity_residuals, translated_stationarity_check,
    IterRecord, IterateTrace, StopConfig, StopReason, TranslatedStationarity,
};
pub use bpg::{bpg_equivalence_demo, BpgEquivalence};
pub use toys::{power_toy_1d, sparse_recovery_toy, SparseToy};

use nalgebra::{DMatrix, DVector};

use crate::analytic::{PowerProxEvaluator, PowerProxSpec};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numeric::compensated_sum;
use crate::prox::{objective, LeftProx, ObjectiveFn, OracleProx, SearchConfig, Subdifferential};

/// The `x`-block function together with a way to evaluate its left prox.
#[derive(Clone, Debug)]
pub enum XTerm {
    /// `(1/p) sum |x_i|^p` with the closed-form prox; `φ` must be `power(q)`, `q = α + (1-α)p`.
    Power { p: f64, alpha: u32 },
    /// Any catalog function, proxed by the grid oracle (dimension at most 2).
    Oracle { f: ObjectiveFn, search: SearchConfig },
}

impl XTerm {
    pub fn objective(&self, dim: usize) -> ObjectiveFn {
        match self {
            XTerm::Power { p, .. } => objective::power(*p, dim),
            XTerm::Oracle { f, .. } => f.clone(),
        }
    }

    /// Left prox evaluator for `f` under `φ` at parameter `lambda`.
    pub fn prox(&self, phi: &Kernel, lambda: f64) -> Result<Box<dyn LeftProx>> {
        match self {
            XTerm::Power { p, alpha } => {
                let spec = PowerProxSpec::new(*p, *alpha, lambda)?;
                let expect = spec.kernel(phi.dim());
                if expect.components() != phi.components() {
                    return Err(Error::Unsupported(format!(
                        "closed-form power prox needs kernel {}, got {}",
                        expect.name(),
                        phi.name()
                    )));
                }
                Ok(Box::new(PowerProxEvaluator::new(spec, phi.dim())))
            }
            XTerm::Oracle { f, search } => {
                if let Some(th) = f.prox_threshold {
                    if lambda >= th {
                        return Err(Error::AboveThreshold { lambda, threshold: th });
                    }
                }
                Ok(Box::new(OracleProx {
                    f: f.clone(),
                    k: phi.clone(),
                    lambda,
                    search: search.clone(),
                }))
            }
        }
    }
}

/// The `u`-block function.
#[derive(Clone, Debug, PartialEq)]
pub enum GTerm {
    Zero,
    /// `(μ/2) |B u - b|^2`.
    LeastSquares { mu: f64, b_mat: DMatrix<f64>, b: DVector<f64> },
    /// Indicator of `prod [lo_i, hi_i]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl GTerm {
    pub fn value(&self, u: &[f64]) -> f64 {
        match self {
            GTerm::Zero => 0.0,
            GTerm::LeastSquares { mu, b_mat, b } => {
                let r = b_mat * DVector::from_column_slice(u) - b;
                0.5 * mu * compensated_sum(r.iter().map(|v| v * v))
            }
            GTerm::Box { lo, hi } => {
                if u.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a <= v && v <= b) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn smooth(&self) -> bool {
        !matches!(self, GTerm::Box { .. })
    }

    fn grad(&self, u: &[f64]) -> Vec<f64> {
        match self {
            GTerm::LeastSquares { mu, b_mat, b } => {
                let r = b_mat * DVector::from_column_slice(u) - b;
                (b_mat.transpose() * r * *mu).as_slice().to_vec()
            }
            _ => vec![0.0; u.len()],
        }
    }

    fn hessian(&self, n: usize) -> DMatrix<f64> {
        match self {
            GTerm::LeastSquares { mu, b_mat, .. } => b_mat.transpose() * b_mat * *mu,
            _ => DMatrix::zeros(n, n),
        }
    }

    pub fn subdifferential(&self, u: &[f64]) -> Subdifferential {
        match self {
            GTerm::Box { lo, hi } => {
                if self.value(u).is_infinite() {
                    return Subdifferential::Empty;
                }
                Subdifferential::Box(
                    u.iter()
                        .zip(lo.iter().zip(hi))
                        .map(|(&v, (&a, &b))| match (v == a, v == b) {
                            (true, true) => (f64::NEG_INFINITY, f64::INFINITY),
                            (true, false) => (f64::NEG_INFINITY, 0.0),
                            (false, true) => (0.0, f64::INFINITY),
                            _ => (0.0, 0.0),
                        })
                        .collect(),
                )
            }
            _ => Subdifferential::singleton(self.grad(u)),
        }
    }

    /// Classical prox `argmin g(u) + (1/(2t)) |u - w|^2`.
    pub fn prox(&self, w: &[f64], t: f64) -> Result<Vec<f64>> {
        match self {
            GTerm::Zero => Ok(w.to_vec()),
            GTerm::Box { lo, hi } => Ok(w
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (a, b))| v.clamp(*a, *b))
                .collect()),
            GTerm::LeastSquares { mu, b_mat, b } => {
                let n = w.len();
                let h = b_mat.transpose() * b_mat * *mu + DMatrix::identity(n, n) / t;
                let rhs = b_mat.transpose() * b * *mu + DVector::from_column_slice(w) / t;
                let sol = h
                    .cholesky()
                    .ok_or_else(|| Error::Solver("least-squares prox system not positive definite".into()))?
                    .solve(&rhs);
                Ok(sol.as_slice().to_vec())
            }
        }
    }
}

/// `σ = η φ`; `η = 0` is the partial (unregularized `x`) variant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XRegularizer {
    pub eta: f64,
}

#[derive(Clone, Debug)]
pub enum UUpdate {
    /// Exact minimization with `D_ω(u, u^t)`; `ω` must have full domain.
    Exact { omega: Kernel },
    /// `ω(u) = (M/2λ)|u|^2 - (1/λ) φ*(A u)`: one proximal gradient step.
    Palm { m: f64 },
}

#[derive(Clone, Debug)]
pub struct BpamProblem {
    pub f: XTerm,
    pub g: GTerm,
    pub a: DMatrix<f64>,
    pub phi: Kernel,
    pub sigma: XRegularizer,
    pub u_update: UUpdate,
    pub lambda: f64,
}

impl BpamProblem {
    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.sigma.eta < 0.0 || !self.sigma.eta.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma scale must be >= 0, got {}", self.sigma.eta)));
        }
        if self.phi.dim() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                got: self.phi.dim(),
            });
        }
        if !self.phi.supercoercive() {
            return Err(Error::Unsupported(format!("kernel {} is not supercoercive", self.phi.name())));
        }
        match &self.u_update {
            UUpdate::Exact { omega } => {
                if omega.dim() != self.n() {
                    return Err(Error::DimensionMismatch {
                        expected: self.n(),
                        got: omega.dim(),
                    });
                }
                if !omega.full_domain() {
                    return Err(Error::Unsupported(format!("omega kernel {} must have full domain", omega.name())));
                }
                if !self.g.smooth() {
                    return Err(Error::Unsupported("exact u-update needs a smooth g; use the PALM step".into()));
                }
            }
            UUpdate::Palm { m } => {
                if !(*m > 0.0) {
                    return Err(Error::InvalidParameter(format!("M must be positive, got {m}")));
                }
            }
        }
        if let GTerm::LeastSquares { b_mat, b, .. } = &self.g {
            if b_mat.ncols() != self.n() || b_mat.nrows() != b.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.n(),
                    got: b_mat.ncols(),
                });
            }
        }
        Ok(())
    }

    pub fn apply_a(&self, u: &[f64]) -> Vec<f64> {
        (&self.a * DVector::from_column_slice(u)).as_slice().to_vec()
    }

    pub fn apply_at(&self, w: &[f64]) -> Vec<f64> {
        (self.a.transpose() * DVector::from_column_slice(w)).as_slice().to_vec()
    }

    /// `F_λ(u, x) = f(x) + (1/λ)(φ(x) + φ*(Au) - <x, Au>) + g(u)`.
    pub fn objective(&self, u: &[f64], x: &[f64]) -> f64 {
        let au = self.apply_a(u);
        let f = self.f.objective(self.m()).value(x);
        let c = coupling_value(&self.phi, x, &au);
        f + c / self.lambda + self.g.value(u)
    }
}

/// Minimizes `g(u) + (1/λ) φ*(A u) + ω(u) - <c, u>` by damped Newton; returns the iterate count.
fn solve_smooth_u(
    p: &BpamProblem,
    omega: &Kernel,
    c: &[f64],
    start: &[f64],
) -> Result<(Vec<f64>, usize)> {
    let n = p.n();
    let lam = p.lambda;
    let value = |u: &[f64]| -> f64 {
        let au = p.apply_a(u);
        if !p.phi.conj_dom_interior(&au) {
            return f64::INFINITY;
        }
        compensated_sum([
            p.g.value(u),
            p.phi.conj_value(&au) / lam,
            omega.value(u),
            -crate::numeric::dot(c, u),
        ])
    };
    let grad = |u: &[f64]| -> Vec<f64> {
        let au = p.apply_a(u);
        let t = p.apply_at(&p.phi.conj_grad(&au));
        let gg = p.g.grad(u);
        let wg = omega.grad(u);
        (0..n).map(|i| gg[i] + t[i] / lam + wg[i] - c[i]).collect()
    };
    let mut u = start.to_vec();
    let mut val = value(&u);
    if !val.is_finite() {
        return Err(Error::InfeasibleInit("u-subproblem start outside the conjugate domain".into()));
    }
    for it in 0..100 {
        let gr = grad(&u);
        let gnorm = crate::numeric::norm(&gr);
        if gnorm == 0.0 {
            return Ok((u, it));
        }
        let au = p.apply_a(&u);
        let cd = p
            .phi
            .conj_hessian_diag(&au)
            .ok_or_else(|| Error::HessianUnavailable { point: au.clone() })?;
        let od = omega
            .hessian_diag(&u)
            .ok_or_else(|| Error::HessianUnavailable { point: u.clone() })?;
        let mut h = p.g.hessian(n) + p.a.transpose() * DMatrix::from_diagonal(&DVector::from_vec(cd)) * &p.a / lam;
        for i in 0..n {
            h[(i, i)] += od[i];
        }
        let dir = match h.clone().cholesky() {
            Some(ch) => ch.solve(&DVector::from_vec(gr.clone())),
            None => DVector::from_vec(gr.clone()),
        };
        let slope = -dir.dot(&DVector::from_vec(gr.clone()));
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = u.iter().zip(dir.iter()).map(|(a, d)| a - t * d).collect();
            let cv = value(&cand);
            if cv <= val + 1e-4 * t * slope || (cv <= val + 1e-15 * val.abs().max(1.0) && crate::numeric::norm(&grad(&cand)) < gnorm) {
                accepted = Some((cand, cv));
                break;
            }
            t *= 0.5;
        }
        let Some((next, nv)) = accepted else {
            return Ok((u, it));
        };
        let step = crate::numeric::dist(&next, &u);
        u = next;
        val = nv;
        if step <= 1e-15 * (1.0 + crate::numeric::norm(&u)) {
            return Ok((u, it + 1));
        }
    }
    Ok((u, 100))
}

/// `φ(x) + φ*(w) - <x, w>`, i.e. `D_φ(x, ∇φ*(w))` in Fenchel–Young form.
pub fn coupling_value(phi: &Kernel, x: &[f64], w: &[f64]) -> f64 {
    if !phi.conj_dom_interior(w) {
        return f64::INFINITY;
    }
    let fx = phi.value(x);
    if !fx.is_finite() {
        return f64::INFINITY;
    }
    let terms = x
        .iter()
        .zip(w)
        .map(|(a, b)| -a * b)
        .chain([fx, phi.conj_value(w)]);
    compensated_sum(terms).max(0.0)
}

#[cfg(test)]
mod tests;
