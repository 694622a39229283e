use super::bpam::x_update_point;
use super::{solve_smooth_u, BpamProblem, UUpdate};
use crate::envelope::left_env_grad_composed;
use crate::error::{Error, Result};
use crate::numeric::dist;

#[derive(Clone, Debug, PartialEq)]
pub struct BpgEquivalence {
    /// `u^0, ..., u^steps` from partial BPAM.
    pub bpam: Vec<Vec<f64>>,
    /// The same from the explicit Bregman proximal gradient update.
    pub bpg: Vec<Vec<f64>>,
    pub gaps: Vec<f64>,
    pub max_gap: f64,
}

fn at_step(e: Error, iteration: usize) -> Error {
    match e {
        Error::MultivaluedProx { point, .. } => Error::MultivaluedAtIteration { iteration, point },
        other => other,
    }
}

/// Runs partial BPAM (`σ = 0`, `A = I`) and
/// `u^{t+1} = argmin g(u) + <∇(lenv∘∇φ*)(u^t), u - u^t> + D_{φ*/λ + ω}(u, u^t)`
/// side by side for `steps` iterations.
pub fn bpg_equivalence_demo(p: &BpamProblem, u0: &[f64], steps: usize) -> Result<BpgEquivalence> {
    p.validate()?;
    if p.sigma.eta != 0.0 {
        return Err(Error::Unsupported("the equivalence needs sigma = 0".into()));
    }
    let n = p.n();
    if p.m() != n || p.a != nalgebra::DMatrix::<f64>::identity(n, n) {
        return Err(Error::Unsupported("the equivalence needs A = I".into()));
    }
    let UUpdate::Exact { omega } = &p.u_update else {
        return Err(Error::Unsupported("the equivalence needs an exact u-update".into()));
    };
    if u0.len() != n || !p.phi.conj_dom_interior(u0) {
        return Err(Error::InfeasibleInit(format!("u0 = {u0:?} is not in int(dom phi*)")));
    }
    let prox = p.f.prox(&p.phi, p.lambda)?;
    let lam = p.lambda;

    let mut a = vec![u0.to_vec()];
    let mut b = vec![u0.to_vec()];
    for t in 0..steps {
        // partial BPAM: exact x-step, then the u-step with D_ω
        let u = &a[t];
        let y = x_update_point(p, u, u)?;
        let res = prox.left_prox(&y)?;
        let x = res.unique(&y).map_err(|e| at_step(e, t))?.to_vec();
        let c: Vec<f64> = x.iter().zip(omega.grad(u)).map(|(xi, g)| xi / lam + g).collect();
        let (un, _) = solve_smooth_u(p, omega, &c, u)?;
        a.push(un);

        // Bregman proximal gradient with the composed envelope gradient
        let v = &b[t];
        let grad = left_env_grad_composed(prox.as_ref(), v).map_err(|e| at_step(e, t))?;
        let cg = p.phi.conj_grad(v);
        let c: Vec<f64> = (0..n).map(|i| -grad[i] + cg[i] / lam + omega.grad(v)[i]).collect();
        let (vn, _) = solve_smooth_u(p, omega, &c, v)?;
        b.push(vn);
    }
    let gaps: Vec<f64> = a.iter().zip(&b).map(|(x, y)| dist(x, y)).collect();
    let max_gap = gaps.iter().cloned().fold(0.0, f64::max);
    Ok(BpgEquivalence {
        bpam: a,
        bpg: b,
        gaps,
        max_gap,
    })
}
