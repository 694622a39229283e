//! Closed-form left prox of `f(x) = (1/p)|x|^p` under `phi(x) = (1/q)|x|^q`.
//!
//! With `q = alpha + (1 - alpha) p` the stationarity condition
//! `x^(p-1) + (1/lambda) x^(q-1) = c`, after substituting `u = x^(1-p)`,
//! becomes the polynomial `1 + (1/lambda) u^alpha - c u = 0`.

use crate::divergence::bregman;
use crate::error::{Error, Result};
use crate::kernels::{make_kernel, Kernel, KernelKind};
use crate::poly::poly_real_roots;
use crate::prox::{LeftProx, ProxResult, SearchDiagnostics};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerProxSpec {
    pub p: f64,
    pub alpha: u32,
    pub lambda: f64,
    pub value_tol: f64,
    pub point_tol: f64,
}

impl PowerProxSpec {
    pub fn new(p: f64, alpha: u32, lambda: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
        }
        if !(2..=4).contains(&alpha) {
            return Err(Error::UnsupportedDegree(alpha as usize));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        Ok(PowerProxSpec {
            p,
            alpha,
            lambda,
            value_tol: 1e-9,
            point_tol: 1e-6,
        })
    }

    /// Kernel exponent `q = alpha + (1 - alpha) p`.
    pub fn q(&self) -> f64 {
        let a = self.alpha as f64;
        a + (1.0 - a) * self.p
    }

    pub fn kernel(&self, dim: usize) -> Kernel {
        make_kernel(KernelKind::Power, &[self.q()], dim).expect("q > 1 by construction")
    }

    pub fn f(&self, x: f64) -> f64 {
        x.abs().powf(self.p) / self.p
    }

    /// `f(x) + D(x, y) / lambda` in one dimension.
    pub fn objective(&self, x: f64, y: f64) -> f64 {
        let k = self.kernel(1);
        self.f(x) + bregman(&k, &[x], &[y]) / self.lambda
    }

    /// `c = (1/lambda) sign(y) |y|^(q-1)`.
    pub fn c(&self, y: f64) -> f64 {
        y.signum() * y.abs().powf(self.q() - 1.0) / self.lambda
    }

    /// Residual of the stationarity equation at `|x| > 0`.
    pub fn stationarity_residual(&self, x: f64, y: f64) -> f64 {
        let ax = x.abs();
        ax.powf(self.p - 1.0) + ax.powf(self.q() - 1.0) / self.lambda - self.c(y).abs()
    }
}

/// Candidate points `(x, objective, reported point)`: `0`, every positive
/// root mapped back to `x`, and `x +- point_tol` at double roots.
fn candidates(spec: &PowerProxSpec, y: f64) -> Result<Vec<(f64, f64, f64)>> {
    let c = spec.c(y).abs();
    let sign = if y < 0.0 { -1.0 } else { 1.0 };
    let deg = spec.alpha as usize;
    let mut coeffs = vec![0.0; deg + 1];
    coeffs[0] = 1.0 / spec.lambda;
    coeffs[deg - 1] = -c;
    coeffs[deg] = 1.0;
    let roots: Vec<f64> = if c > 0.0 {
        poly_real_roots(&coeffs, deg)?
            .into_iter()
            .filter(|u| *u > 0.0)
            .collect()
    } else {
        vec![]
    };
    let expo = 1.0 / (1.0 - spec.p);
    // (x, multiplicity)
    let mut xs: Vec<(f64, usize)> = Vec::new();
    for u in roots {
        let x = polish_stationary(spec, sign * u.powf(expo), y);
        match xs.iter_mut().find(|e| (e.0 - x).abs() <= spec.point_tol) {
            Some(e) => e.1 += 1,
            None => xs.push((x, 1)),
        }
    }
    let mut cands = vec![(0.0, spec.objective(0.0, y), 0.0)];
    for (x, mult) in xs {
        cands.push((x, spec.objective(x, y), x));
        if mult > 1 {
            for s in [-1.0, 1.0] {
                let z = x + s * spec.point_tol;
                cands.push((z, spec.objective(z, y), x));
            }
        }
    }
    Ok(cands)
}

/// Prox of `(1/p)|x|^p` at `y`: all objective-minimal points among `0` and the root candidates.
///
/// Candidates within `value_tol` of the best are all reported, so a tie
/// between `0` and a nonzero root comes back multivalued.
pub fn power_prox(spec: &PowerProxSpec, y: f64) -> Result<ProxResult> {
    let mut cands = candidates(spec, y)?;
    let env = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let cut = env + spec.value_tol * (1.0 + env.abs());
    let n = cands.len();
    cands.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut minimizers: Vec<f64> = Vec::new();
    for (_, _, rep) in cands.into_iter().filter(|c| c.1 <= cut) {
        if minimizers.iter().all(|m| (m - rep).abs() > spec.point_tol) {
            minimizers.push(rep);
        }
    }
    Ok(ProxResult {
        multivalued: minimizers.len() > 1,
        minimizers: minimizers.into_iter().map(|m| vec![m]).collect(),
        env_value: env,
        diagnostics: SearchDiagnostics {
            grid_points: 0,
            candidates: n,
            grid_min: env,
            far_field_min: f64::INFINITY,
            used_chart: false,
        },
    })
}

/// A few Newton steps on the stationarity equation in `x`, kept only if they reduce the residual.
fn polish_stationary(spec: &PowerProxSpec, x: f64, y: f64) -> f64 {
    let (p, q, l) = (spec.p, spec.q(), spec.lambda);
    let sign = x.signum();
    let mut a = x.abs();
    for _ in 0..5 {
        let r = spec.stationarity_residual(a, y);
        let dr = (p - 1.0) * a.powf(p - 2.0) + (q - 1.0) * a.powf(q - 2.0) / l;
        if r == 0.0 || dr == 0.0 || !dr.is_finite() {
            break;
        }
        let na = a - r / dr;
        if !(na > 0.0) || spec.stationarity_residual(na, y).abs() >= r.abs() {
            break;
        }
        a = na;
    }
    sign * a
}

/// Coordinate-wise [`power_prox`].
pub fn power_prox_vector(spec: &PowerProxSpec, y: &[f64]) -> Result<Vec<ProxResult>> {
    y.iter().map(|&yi| power_prox(spec, yi)).collect()
}

/// Modulus `r` such that `f + r phi` is convex on the ball `|x - xbar| < eps`.
///
/// On the ball `(f + r phi)'' = (p - 1)|x|^(p-2) + r (q - 1)|x|^(q-2)`, so
/// `r = (1-p)/(q-1) * sup |x|^(p-q) = (1-p)/(q-1) * (|xbar| - eps)^(p-q)`.
pub fn power_proxreg_modulus(spec: &PowerProxSpec, xbar: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if xbar.abs() <= eps {
        return Err(Error::BallOutsideRegion {
            center: vec![xbar],
            eps,
        });
    }
    let (p, q) = (spec.p, spec.q());
    Ok((1.0 - p) / (q - 1.0) * (xbar.abs() - eps).powf(p - q))
}

/// The `y > 0` at which the objective at `0` and at the best nonzero
/// candidate coincide, by bisection. Below it the prox is `{0}`.
pub fn power_prox_threshold(spec: &PowerProxSpec) -> Result<f64> {
    let zero_wins = |y: f64| -> Result<bool> {
        let cands = candidates(spec, y)?;
        let best_nonzero = cands[1..]
            .iter()
            .map(|c| c.1)
            .fold(f64::INFINITY, f64::min);
        Ok(cands[0].1 <= best_nonzero)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while zero_wins(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Solver("no threshold below 1e12".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if zero_wins(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`LeftProx`] for the separable power problem, any dimension.
#[derive(Clone, Debug)]
pub struct PowerProxEvaluator {
    pub spec: PowerProxSpec,
    kernel: Kernel,
}

impl PowerProxEvaluator {
    pub fn new(spec: PowerProxSpec, dim: usize) -> Self {
        PowerProxEvaluator {
            kernel: spec.kernel(dim),
            spec,
        }
    }
}

const MAX_COMBINATIONS: usize = 64;

impl LeftProx for PowerProxEvaluator {
    fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    fn lambda(&self) -> f64 {
        self.spec.lambda
    }

    fn objective(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.spec.f(v)).sum()
    }

    fn left_prox(&self, y: &[f64]) -> Result<ProxResult> {
        if y.len() != self.kernel.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.kernel.dim(),
                got: y.len(),
            });
        }
        let parts = power_prox_vector(&self.spec, y)?;
        let mut combos: Vec<Vec<f64>> = vec![vec![]];
        for part in &parts {
            let mut next = Vec::new();
            for c in &combos {
                for m in &part.minimizers {
                    if next.len() < MAX_COMBINATIONS {
                        let mut c2 = c.clone();
                        c2.push(m[0]);
                        next.push(c2);
                    }
                }
            }
            combos = next;
        }
        Ok(ProxResult {
            multivalued: parts.iter().any(|p| p.multivalued),
            minimizers: combos,
            env_value: crate::numeric::compensated_sum(parts.iter().map(|p| p.env_value)),
            diagnostics: SearchDiagnostics {
                candidates: parts.iter().map(|p| p.diagnostics.candidates).sum(),
                far_field_min: f64::INFINITY,
                ..Default::default()
            },
        })
    }
}
