use super::{solve_smooth_u, BpamProblem, UUpdate};
use crate::divergence::bregman;
use crate::envelope::left_env_grad_composed;
use crate::error::{Error, Result};
use crate::numeric::dist;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StopConfig {
    /// Residual tolerance on `max(ρ_x, ρ_u)`.
    pub tol: f64,
    /// Tolerance on `|x^{t+1} - x^t| + |u^{t+1} - u^t|`.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Relative slack allowed in the sufficient-decrease check.
    pub solver_tol: f64,
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig {
            tol: 1e-6,
            step_tol: 1e-9,
            max_iter: 10_000,
            solver_tol: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterRecord {
    pub t: usize,
    pub u: Vec<f64>,
    pub x: Vec<f64>,
    pub f_value: f64,
    /// `F(u^t, x^t) - F(u^{t+1}, x^{t+1}) - D_σ(x^{t+1}, x^t) - D_ω(u^{t+1}, u^t)`; zero at `t = 0`.
    pub decrease_slack: f64,
    /// `D_σ(x^{t+1}, x^t) + D_ω(u^{t+1}, u^t)`.
    pub regularizer_decrease: f64,
    pub rho_x: f64,
    pub rho_u: f64,
    pub step_norm: f64,
    pub x_multivalued: bool,
    pub u_solver_iters: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterateTrace {
    pub records: Vec<IterRecord>,
    pub stop: StopReason,
}

impl IterateTrace {
    pub fn last(&self) -> &IterRecord {
        self.records.last().expect("trace holds the initial state")
    }

    /// First iteration whose slack falls below `-solver_tol (1 + |F|)`.
    pub fn first_decrease_violation(&self, solver_tol: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.decrease_slack < -solver_tol * (1.0 + r.f_value.abs()))
            .map(|r| r.t)
    }

    /// Worst `slack / (1 + |F|)` over the run.
    pub fn min_relative_slack(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.decrease_slack / (1.0 + r.f_value.abs()))
            .fold(f64::INFINITY, f64::min)
    }

    /// `sum_t [D_σ + D_ω] <= F_0 - min_t F_t`, up to `tol`.
    pub fn summability_holds(&self, tol: f64) -> bool {
        let total: f64 = self.records.iter().map(|r| r.regularizer_decrease).sum();
        let f0 = self.records[0].f_value;
        let fmin = self.records.iter().map(|r| r.f_value).fold(f64::INFINITY, f64::min);
        total <= f0 - fmin + tol * (1.0 + f0.abs())
    }

    pub fn all_interior(&self, p: &BpamProblem) -> bool {
        self.records.iter().all(|r| p.phi.dom_interior(&r.x))
    }
}

/// `ρ_x = dist(-(1/λ)(∇φ(x) - A u), ∂f(x))`, `ρ_u = dist(-(1/λ) Aᵀ(∇φ*(A u) - x), ∂g(u))`.
pub fn stationarity_residuals(p: &BpamProblem, u: &[f64], x: &[f64]) -> Result<(f64, f64)> {
    if !p.phi.dom_interior(x) {
        return Err(Error::OutsideInterior { point: x.to_vec() });
    }
    let au = p.apply_a(u);
    if !p.phi.conj_dom_interior(&au) {
        return Err(Error::OutsideConjugateInterior { point: au });
    }
    let lam = p.lambda;
    let f = p.f.objective(p.m());
    let sub_f = f.subgrad(x).ok_or_else(|| Error::MissingSubgradient(f.name.clone()))?;
    let vx: Vec<f64> = p.phi.grad(x).iter().zip(&au).map(|(g, a)| -(g - a) / lam).collect();
    let r: Vec<f64> = p.phi.conj_grad(&au).iter().zip(x).map(|(g, xi)| g - xi).collect();
    let vu: Vec<f64> = p.apply_at(&r).iter().map(|v| -v / lam).collect();
    Ok((sub_f.dist(&vx), p.g.subdifferential(u).dist(&vu)))
}

/// `argmin g(u) + (1/λ)<u, Aᵀ(∇φ*(A u^t) - x)> + (M/2λ)|u - u^t|^2`.
pub fn bpam_palm_u_update(p: &BpamProblem, m: f64, u: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if !(m > 0.0) {
        return Err(Error::InvalidParameter(format!("M must be positive, got {m}")));
    }
    let au = p.apply_a(u);
    if !p.phi.conj_dom_interior(&au) {
        return Err(Error::OutsideConjugateInterior { point: au });
    }
    let r: Vec<f64> = p.phi.conj_grad(&au).iter().zip(x).map(|(g, xi)| g - xi).collect();
    let d = p.apply_at(&r);
    let w: Vec<f64> = u.iter().zip(&d).map(|(ui, di)| ui - di / m).collect();
    p.g.prox(&w, p.lambda / m)
}

fn omega_distance(p: &BpamProblem, un: &[f64], u: &[f64]) -> f64 {
    match &p.u_update {
        UUpdate::Exact { omega } => bregman(omega, un, u),
        UUpdate::Palm { m } => {
            let d2: f64 = un.iter().zip(u).map(|(a, b)| (a - b) * (a - b)).sum();
            let dual = bregman(&p.phi.conjugate(), &p.apply_a(un), &p.apply_a(u));
            0.5 * m / p.lambda * d2 - dual / p.lambda
        }
    }
}

fn unbounded(e: Error, iteration: usize) -> Error {
    match e {
        Error::NotProxBounded { lambda, value } => Error::SubproblemUnbounded {
            iteration,
            reason: format!("x-subproblem reached {value:e} at lambda {lambda}"),
        },
        Error::AboveThreshold { lambda, threshold } => Error::SubproblemUnbounded {
            iteration,
            reason: format!("lambda {lambda} is not below the prox-boundedness threshold {threshold}"),
        },
        other => other,
    }
}

pub(super) fn x_update_point(p: &BpamProblem, u: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let au = p.apply_a(u);
    let eta = p.sigma.eta;
    let lam = p.lambda;
    let merged = lam / (1.0 + lam * eta);
    let w: Vec<f64> = if eta == 0.0 {
        au
    } else {
        au.iter()
            .zip(p.phi.grad(x))
            .map(|(a, g)| merged * (a / lam + eta * g))
            .collect()
    };
    if !p.phi.conj_dom_interior(&w) {
        return Err(Error::OutsideConjugateInterior { point: w });
    }
    Ok(p.phi.conj_grad(&w))
}

/// Runs BPAM from `(u0, x0)`.
///
/// With `σ = ηφ` the `x`-step merges into one left prox at `λ / (1 + λη)`.
pub fn bpam_run(p: &BpamProblem, u0: &[f64], x0: &[f64], stop: &StopConfig) -> Result<IterateTrace> {
    p.validate()?;
    if u0.len() != p.n() || x0.len() != p.m() {
        return Err(Error::InfeasibleInit(format!(
            "expected u in R^{} and x in R^{}",
            p.n(),
            p.m()
        )));
    }
    if !p.phi.dom_interior(x0) {
        return Err(Error::InfeasibleInit(format!("x0 = {x0:?} is not in int(dom phi)")));
    }
    if !p.phi.conj_dom_interior(&p.apply_a(u0)) {
        return Err(Error::InfeasibleInit(format!("A u0 is not in int(dom phi*) for u0 = {u0:?}")));
    }
    let merged = p.lambda / (1.0 + p.lambda * p.sigma.eta);
    let prox = p.f.prox(&p.phi, merged).map_err(|e| unbounded(e, 0))?;

    let (r0x, r0u) = stationarity_residuals(p, u0, x0)?;
    let mut u = u0.to_vec();
    let mut x = x0.to_vec();
    let mut fval = p.objective(&u, &x);
    let mut records = vec![IterRecord {
        t: 0,
        u: u.clone(),
        x: x.clone(),
        f_value: fval,
        decrease_slack: 0.0,
        regularizer_decrease: 0.0,
        rho_x: r0x,
        rho_u: r0u,
        step_norm: 0.0,
        x_multivalued: false,
        u_solver_iters: 0,
    }];
    let mut reason = StopReason::MaxIterations;
    for t in 1..=stop.max_iter {
        let y = x_update_point(p, &u, &x)?;
        let res = prox.left_prox(&y).map_err(|e| unbounded(e, t))?;
        let xn = res.minimizers[0].clone();
        if !p.phi.dom_interior(&xn) {
            return Err(Error::OutsideInterior { point: xn });
        }
        let (un, iters) = match &p.u_update {
            UUpdate::Exact { omega } => {
                let tx = p.apply_at(&xn);
                let c: Vec<f64> = tx
                    .iter()
                    .zip(omega.grad(&u))
                    .map(|(a, g)| a / p.lambda + g)
                    .collect();
                solve_smooth_u(p, omega, &c, &u)?
            }
            UUpdate::Palm { m } => (bpam_palm_u_update(p, *m, &u, &xn)?, 1),
        };
        let fn_val = p.objective(&un, &xn);
        let reg = p.sigma.eta * bregman(&p.phi, &xn, &x) + omega_distance(p, &un, &u);
        let (rho_x, rho_u) = stationarity_residuals(p, &un, &xn)?;
        let step = dist(&xn, &x) + dist(&un, &u);
        records.push(IterRecord {
            t,
            u: un.clone(),
            x: xn.clone(),
            f_value: fn_val,
            decrease_slack: fval - fn_val - reg,
            regularizer_decrease: reg,
            rho_x,
            rho_u,
            step_norm: step,
            x_multivalued: res.multivalued,
            u_solver_iters: iters,
        });
        u = un;
        x = xn;
        fval = fn_val;
        if rho_x.max(rho_u) <= stop.tol && step <= stop.step_tol {
            reason = StopReason::Converged;
            break;
        }
    }
    Ok(IterateTrace { records, stop: reason })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranslatedStationarity {
    /// `v* = (1/λ)(A u* - ∇φ(x*))`.
    pub v_star: Vec<f64>,
    pub v_star_dist: f64,
    /// `|x* - lprox(∇φ*(A u*))|`.
    pub prox_gap: f64,
    pub env_grad: Vec<f64>,
    /// `dist(-Aᵀ ∇(lenv∘∇φ*)(A u*), ∂g(u*))`.
    pub residual: f64,
    pub passed: bool,
}

/// Checks `0 ∈ ∂(lenv∘∇φ*∘A + g)(u*)` through the composed left gradient formula.
pub fn translated_stationarity_check(
    p: &BpamProblem,
    u_star: &[f64],
    x_star: &[f64],
    tol: f64,
) -> Result<TranslatedStationarity> {
    if !p.phi.dom_interior(x_star) {
        return Err(Error::OutsideInterior {
            point: x_star.to_vec(),
        });
    }
    let prox = p.f.prox(&p.phi, p.lambda)?;
    let au = p.apply_a(u_star);
    let grad = left_env_grad_composed(prox.as_ref(), &au)?;
    let base = p.phi.conj_grad(&au);
    let lp: Vec<f64> = base.iter().zip(&grad).map(|(b, g)| b - p.lambda * g).collect();
    let v_star: Vec<f64> = au
        .iter()
        .zip(p.phi.grad(x_star))
        .map(|(a, g)| (a - g) / p.lambda)
        .collect();
    let f = p.f.objective(p.m());
    let v_star_dist = f.subgrad(x_star).map_or(f64::INFINITY, |s| s.dist(&v_star));
    let target: Vec<f64> = p.apply_at(&grad).iter().map(|v| -v).collect();
    let residual = p.g.subdifferential(u_star).dist(&target);
    Ok(TranslatedStationarity {
        v_star,
        v_star_dist,
        prox_gap: dist(x_star, &lp),
        env_grad: grad,
        residual,
        passed: residual <= tol,
    })
}
