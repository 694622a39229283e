//! Gradients of left and right Bregman–Moreau envelopes and their
//! finite-difference validation.

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numeric::{norm, sub};
use crate::prox::{
    right_direct, right_translated, LeftProx, ObjectiveFn, ProxQuery, ProxResult, SearchConfig,
};

/// `∇(lenv∘∇φ*)(w) = (1/λ)(∇φ*(w) - lprox(∇φ*(w)))`.
pub fn left_env_grad_composed(prox: &dyn LeftProx, ydual: &[f64]) -> Result<Vec<f64>> {
    let k = prox.kernel();
    if !k.conj_dom_interior(ydual) {
        return Err(Error::OutsideConjugateInterior {
            point: ydual.to_vec(),
        });
    }
    let x = k.conj_grad(ydual);
    let r = prox.left_prox(&x)?;
    let m = r.unique(&x)?;
    let l = prox.lambda();
    Ok(x.iter().zip(m).map(|(a, b)| (a - b) / l).collect())
}

/// `∇lenv(y) = (1/λ) ∇²φ(y) (y - lprox(y))`.
pub fn left_env_grad(prox: &dyn LeftProx, y: &[f64]) -> Result<Vec<f64>> {
    let k = prox.kernel();
    if !k.dom_interior(y) {
        return Err(Error::OutsideInterior { point: y.to_vec() });
    }
    let h = k
        .hessian_diag(y)
        .ok_or_else(|| Error::HessianUnavailable { point: y.to_vec() })?;
    let r = prox.left_prox(y)?;
    let m = r.unique(y)?;
    let l = prox.lambda();
    Ok(y.iter()
        .zip(m)
        .zip(&h)
        .map(|((a, b), hi)| hi * (a - b) / l)
        .collect())
}

/// Right-envelope context: `f`, a kernel with `dom φ = R^m`, `λ` and the oracle settings.
#[derive(Clone, Debug)]
pub struct RightEnv {
    pub f: ObjectiveFn,
    pub k: Kernel,
    pub lambda: f64,
    pub search: SearchConfig,
}

impl RightEnv {
    fn query(&self, y: &[f64]) -> ProxQuery {
        ProxQuery::right(self.f.clone(), self.k.clone(), self.lambda, y.to_vec())
    }

    pub fn right_prox(&self, y: &[f64]) -> Result<ProxResult> {
        crate::prox::right_envelope(&self.query(y), &self.search)
    }
}

/// Both expressions of `∇renv(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RightGrad {
    /// `(1/λ)(∇φ(y) - ∇φ(rprox(y)))`
    pub grad: Vec<f64>,
    /// `(1/λ)(∇φ(y) - lprox_{φ*}(f∘∇φ*)(∇φ(y)))`
    pub via_translation: Vec<f64>,
    pub gap: f64,
}

pub fn right_env_grad(env: &RightEnv, y: &[f64]) -> Result<RightGrad> {
    if !env.k.full_domain() {
        return Err(Error::RightProxRequiresFullDomain(env.k.name().to_string()));
    }
    let q = env.query(y);
    let direct = right_direct(&q, &env.search)?;
    let x = direct.unique(y)?.to_vec();
    let translated = right_translated(&q, &env.search)?;
    let xt = translated.unique(y)?;
    let w = env.k.grad(xt);
    let gy = env.k.grad(y);
    let l = env.lambda;
    let grad: Vec<f64> = gy.iter().zip(env.k.grad(&x)).map(|(a, b)| (a - b) / l).collect();
    let via_translation: Vec<f64> = gy.iter().zip(&w).map(|(a, b)| (a - b) / l).collect();
    let gap = norm(&sub(&grad, &via_translation));
    Ok(RightGrad {
        grad,
        via_translation,
        gap,
    })
}

/// Which envelope a check runs on.
#[derive(Clone, Copy)]
pub enum EnvSide<'a> {
    /// `(1/λ)φ* - lenv∘∇φ*`
    Left(&'a dyn LeftProx),
    /// `(1/λ)φ - renv`
    Right(&'a RightEnv),
}

/// Midpoint convexity of the envelope complement at the sampled pairs.
/// Errors when `λ` is not below `threshold` (an estimate of `λ_f`).
pub fn envelope_complement_convexity_check(
    side: EnvSide<'_>,
    pairs: &[(Vec<f64>, Vec<f64>)],
    tol: f64,
    threshold: f64,
) -> Result<bool> {
    let lambda = match side {
        EnvSide::Left(p) => p.lambda(),
        EnvSide::Right(e) => e.lambda,
    };
    if !(lambda < threshold) {
        return Err(Error::AboveThreshold { lambda, threshold });
    }
    let g = |w: &[f64]| -> Result<f64> {
        match side {
            EnvSide::Left(p) => {
                let k = p.kernel();
                if !k.conj_dom_interior(w) {
                    return Err(Error::OutsideConjugateInterior { point: w.to_vec() });
                }
                let env = p.left_prox(&k.conj_grad(w))?.env_value;
                Ok(k.conj_value(w) / lambda - env)
            }
            EnvSide::Right(e) => {
                let env = e.right_prox(w)?.env_value;
                Ok(e.k.value(w) / lambda - env)
            }
        }
    };
    for (a, b) in pairs {
        let m: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let (ga, gb, gm) = (g(a)?, g(b)?, g(&m)?);
        if gm > 0.5 * (ga + gb) + tol * (1.0 + ga.abs().max(gb.abs())) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which gradient formula a finite-difference row checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradFormula {
    ComposedLeft,
    Left,
    Right,
}

impl GradFormula {
    pub fn as_str(&self) -> &'static str {
        match self {
            GradFormula::ComposedLeft => "composed_left",
            GradFormula::Left => "left",
            GradFormula::Right => "right",
        }
    }
}

/// One finite-difference comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckRow {
    pub y: Vec<f64>,
    pub formula: Option<Vec<f64>>,
    pub fd: Vec<f64>,
    pub abs_err: f64,
    /// `abs_err / (1 + |formula|)`.
    pub rel_err: f64,
    pub single_valued: bool,
    /// `|FD(h) - FD(h/2)|`; large values flag a step straddling a kink.
    pub richardson_gap: f64,
}

impl GradCheckRow {
    pub fn passes(&self, tol: f64) -> bool {
        self.single_valued && self.rel_err <= tol
    }
}

fn fd_with_richardson(
    env: &dyn Fn(&[f64]) -> Result<f64>,
    y: &[f64],
    h: f64,
) -> Result<(Vec<f64>, f64)> {
    let grad_at = |step: f64| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(y.len());
        let mut p = y.to_vec();
        for i in 0..y.len() {
            let hi = step * y[i].abs().max(1.0);
            p[i] = y[i] + hi;
            let fp = env(&p)?;
            p[i] = y[i] - hi;
            let fm = env(&p)?;
            p[i] = y[i];
            out.push((fp - fm) / (2.0 * hi));
        }
        Ok(out)
    };
    let g1 = grad_at(h)?;
    let g2 = grad_at(0.5 * h)?;
    Ok((g1.clone(), norm(&sub(&g1, &g2))))
}

fn row(y: &[f64], formula: Result<Vec<f64>>, fd: Vec<f64>, rich: f64) -> Result<GradCheckRow> {
    match formula {
        Ok(g) => {
            let abs_err = norm(&sub(&g, &fd));
            let rel_err = abs_err / (1.0 + norm(&g));
            Ok(GradCheckRow {
                y: y.to_vec(),
                formula: Some(g),
                fd,
                abs_err,
                rel_err,
                single_valued: true,
                richardson_gap: rich,
            })
        }
        Err(Error::MultivaluedProx { .. }) => Ok(GradCheckRow {
            y: y.to_vec(),
            formula: None,
            fd,
            abs_err: f64::INFINITY,
            rel_err: f64::INFINITY,
            single_valued: false,
            richardson_gap: rich,
        }),
        Err(e) => Err(e),
    }
}

/// Compares a left gradient formula with central differences of the envelope.
pub fn grad_check_left(
    prox: &dyn LeftProx,
    formula: GradFormula,
    y: &[f64],
    h: f64,
) -> Result<GradCheckRow> {
    match formula {
        GradFormula::ComposedLeft => {
            let k = prox.kernel();
            let env = |w: &[f64]| -> Result<f64> { Ok(prox.left_prox(&k.conj_grad(w))?.env_value) };
            let (fd, rich) = fd_with_richardson(&env, y, h)?;
            row(y, left_env_grad_composed(prox, y), fd, rich)
        }
        GradFormula::Left => {
            let env = |x: &[f64]| -> Result<f64> { Ok(prox.left_prox(x)?.env_value) };
            let (fd, rich) = fd_with_richardson(&env, y, h)?;
            row(y, left_env_grad(prox, y), fd, rich)
        }
        GradFormula::Right => Err(Error::InvalidParameter(
            "use grad_check_right for the right envelope".into(),
        )),
    }
}

/// Compares the right gradient formula with central differences of `renv`.
pub fn grad_check_right(env: &RightEnv, y: &[f64], h: f64) -> Result<GradCheckRow> {
    let value = |x: &[f64]| -> Result<f64> {
        Ok(right_direct(&env.query(x), &env.search)?.env_value)
    };
    let (fd, rich) = fd_with_richardson(&value, y, h)?;
    row(y, right_env_grad(env, y).map(|g| g.grad), fd, rich)
}
