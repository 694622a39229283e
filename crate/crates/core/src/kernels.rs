//! Legendre kernels.
//!
//! Every kernel in this crate is separable: `phi(x) = sum_i phi_i(x_i)` where
//! each `phi_i` is a [`ScalarKernel`]. That covers the whole catalog (the
//! entropies, powers, exponential) as well as mixed kernels such as
//! `x1^2 + |x1|^1.1 + x2^2`.
//!
//! Values are extended reals: `+inf` outside the domain, never NaN.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, invert_increasing};

/// Strict margin used by the interior predicates.
pub const DOMAIN_MARGIN: f64 = 1e-12;

/// A one-dimensional Legendre function together with its conjugate.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarKernel {
    /// `x^2 / 2`
    HalfSquare,
    /// `|x|^q / q`, `q > 1`
    Power { q: f64 },
    /// `x log x - x` on `[0, inf)`
    BoltzmannShannon,
    /// `-log x` on `(0, inf)`
    Burg,
    /// `x log x + (1 - x) log(1 - x)` on `[0, 1]`
    FermiDirac,
    /// `-sqrt(1 - x^2)` on `[-1, 1]`
    Hellinger,
    /// `exp(x)`
    Exponential,
    /// Positive combination `sum_j w_j k_j(x)` of kernels sharing one interior.
    Sum(Vec<(f64, ScalarKernel)>),
    /// The convex conjugate of the wrapped kernel.
    Conjugate(Box<ScalarKernel>),
}

fn conj_exponent(q: f64) -> f64 {
    q / (q - 1.0)
}

fn is_two(q: f64) -> bool {
    (q - 2.0).abs() < 1e-15
}

fn power_hess(q: f64, x: f64) -> Option<f64> {
    if is_two(q) {
        Some(1.0)
    } else if x == 0.0 {
        if q < 2.0 {
            None
        } else {
            Some(0.0)
        }
    } else {
        Some((q - 1.0) * x.abs().powf(q - 2.0))
    }
}

fn signed_pow(x: f64, e: f64) -> f64 {
    x.signum() * x.abs().powf(e)
}

fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

fn logistic(y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let e = y.exp();
        e / (1.0 + e)
    }
}

impl ScalarKernel {
    pub fn power(q: f64) -> Result<Self> {
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "power kernel needs q > 1, got {q}"
            )));
        }
        Ok(ScalarKernel::Power { q })
    }

    /// Positive combination of kernels; all terms must share the same interior.
    pub fn sum(terms: Vec<(f64, ScalarKernel)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("empty kernel sum".into()));
        }
        let first = terms[0].1.interior();
        for (w, k) in &terms {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "kernel sum weights must be positive, got {w}"
                )));
            }
            if k.interior() != first {
                return Err(Error::InvalidParameter(
                    "kernel sum terms must share the same domain".into(),
                ));
            }
        }
        Ok(ScalarKernel::Sum(terms))
    }

    pub fn conjugate(&self) -> ScalarKernel {
        match self {
            ScalarKernel::Conjugate(inner) => (**inner).clone(),
            ScalarKernel::HalfSquare => ScalarKernel::HalfSquare,
            ScalarKernel::Power { q } => ScalarKernel::Power {
                q: conj_exponent(*q),
            },
            other => ScalarKernel::Conjugate(Box::new(other.clone())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ScalarKernel::HalfSquare => "half_squared_norm".into(),
            ScalarKernel::Power { q } => format!("power({q})"),
            ScalarKernel::BoltzmannShannon => "boltzmann_shannon".into(),
            ScalarKernel::Burg => "burg".into(),
            ScalarKernel::FermiDirac => "fermi_dirac".into(),
            ScalarKernel::Hellinger => "hellinger".into(),
            ScalarKernel::Exponential => "exponential".into(),
            ScalarKernel::Sum(terms) => terms
                .iter()
                .map(|(w, k)| format!("{w}*{}", k.name()))
                .collect::<Vec<_>>()
                .join("+"),
            ScalarKernel::Conjugate(k) => format!("conj({})", k.name()),
        }
    }

    /// Open interval `int(dom phi)`.
    pub fn interior(&self) -> (f64, f64) {
        use ScalarKernel::*;
        match self {
            HalfSquare | Power { .. } | Exponential => (f64::NEG_INFINITY, f64::INFINITY),
            BoltzmannShannon | Burg => (0.0, f64::INFINITY),
            FermiDirac => (0.0, 1.0),
            Hellinger => (-1.0, 1.0),
            Sum(terms) => terms[0].1.interior(),
            Conjugate(k) => k.conj_interior(),
        }
    }

    /// Open interval `int(dom phi*)`, i.e. the range of the gradient.
    pub fn conj_interior(&self) -> (f64, f64) {
        use ScalarKernel::*;
        match self {
            HalfSquare | Power { .. } | BoltzmannShannon | FermiDirac | Hellinger => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Burg => (f64::NEG_INFINITY, 0.0),
            Exponential => (0.0, f64::INFINITY),
            Sum(terms) => {
                let lo = terms.iter().map(|(w, k)| w * k.conj_interior().0).sum();
                let hi = terms.iter().map(|(w, k)| w * k.conj_interior().1).sum();
                (lo, hi)
            }
            Conjugate(k) => k.interior(),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        use ScalarKernel::*;
        if x.is_nan() {
            return f64::INFINITY;
        }
        match self {
            HalfSquare => 0.5 * x * x,
            Power { q } => x.abs().powf(*q) / q,
            BoltzmannShannon => {
                if x < 0.0 {
                    f64::INFINITY
                } else if x == 0.0 {
                    0.0
                } else {
                    x * x.ln() - x
                }
            }
            Burg => {
                if x <= 0.0 {
                    f64::INFINITY
                } else {
                    -x.ln()
                }
            }
            FermiDirac => {
                if !(0.0..=1.0).contains(&x) {
                    f64::INFINITY
                } else {
                    let a = if x == 0.0 { 0.0 } else { x * x.ln() };
                    let b = if x == 1.0 { 0.0 } else { (1.0 - x) * (-x).ln_1p() };
                    a + b
                }
            }
            Hellinger => {
                if x.abs() > 1.0 {
                    f64::INFINITY
                } else {
                    -((1.0 - x) * (1.0 + x)).sqrt()
                }
            }
            Exponential => x.exp(),
            Sum(terms) => compensated_sum(terms.iter().map(|(w, k)| w * k.value(x))),
            Conjugate(k) => k.conj_value(x),
        }
    }

    /// Derivative on the interior.
    pub fn grad(&self, x: f64) -> f64 {
        use ScalarKernel::*;
        match self {
            HalfSquare => x,
            Power { q } => signed_pow(x, q - 1.0),
            BoltzmannShannon => x.ln(),
            Burg => -1.0 / x,
            FermiDirac => x.ln() - (-x).ln_1p(),
            Hellinger => x / ((1.0 - x) * (1.0 + x)).sqrt(),
            Exponential => x.exp(),
            Sum(terms) => compensated_sum(terms.iter().map(|(w, k)| w * k.grad(x))),
            Conjugate(k) => k.conj_grad(x),
        }
    }

    /// Second derivative, `None` where the kernel is not twice differentiable.
    pub fn hess(&self, x: f64) -> Option<f64> {
        use ScalarKernel::*;
        match self {
            HalfSquare => Some(1.0),
            Power { q } => power_hess(*q, x),
            BoltzmannShannon => Some(1.0 / x),
            Burg => Some(1.0 / (x * x)),
            FermiDirac => Some(1.0 / (x * (1.0 - x))),
            Hellinger => Some(((1.0 - x) * (1.0 + x)).powf(-1.5)),
            Exponential => Some(x.exp()),
            Sum(terms) => {
                let mut acc = 0.0;
                for (w, k) in terms {
                    acc += w * k.hess(x)?;
                }
                Some(acc)
            }
            Conjugate(k) => k.conj_hess(x),
        }
    }

    pub fn conj_value(&self, y: f64) -> f64 {
        use ScalarKernel::*;
        if y.is_nan() {
            return f64::INFINITY;
        }
        match self {
            HalfSquare => 0.5 * y * y,
            Power { q } => {
                let qs = conj_exponent(*q);
                y.abs().powf(qs) / qs
            }
            BoltzmannShannon => y.exp(),
            Burg => {
                if y < 0.0 {
                    -1.0 - (-y).ln()
                } else {
                    f64::INFINITY
                }
            }
            FermiDirac => softplus(y),
            Hellinger => (1.0 + y * y).sqrt(),
            Exponential => {
                if y < 0.0 {
                    f64::INFINITY
                } else if y == 0.0 {
                    0.0
                } else {
                    y * y.ln() - y
                }
            }
            Sum(terms) if terms.len() == 1 => {
                let (w, k) = &terms[0];
                w * k.conj_value(y / w)
            }
            Sum(_) => {
                let (lo, hi) = self.conj_interior();
                if !(y > lo && y < hi) {
                    return f64::INFINITY;
                }
                let x = self.conj_grad(y);
                x * y - self.value(x)
            }
            Conjugate(k) => k.value(y),
        }
    }

    /// `grad phi*`, the inverse of [`ScalarKernel::grad`].
    pub fn conj_grad(&self, y: f64) -> f64 {
        use ScalarKernel::*;
        match self {
            HalfSquare => y,
            Power { q } => signed_pow(y, conj_exponent(*q) - 1.0),
            BoltzmannShannon => y.exp(),
            Burg => -1.0 / y,
            FermiDirac => logistic(y),
            Hellinger => y / (1.0 + y * y).sqrt(),
            Exponential => y.ln(),
            Sum(terms) if terms.len() == 1 => {
                let (w, k) = &terms[0];
                k.conj_grad(y / w)
            }
            Sum(_) => {
                let (lo, hi) = self.interior();
                let x = invert_increasing(|x| self.grad(x), y, lo, hi);
                // Newton polish where the second derivative exists.
                let mut x = x;
                for _ in 0..3 {
                    match self.hess(x) {
                        Some(h) if h > 0.0 && h.is_finite() => {
                            let nx = x - (self.grad(x) - y) / h;
                            if nx > lo && nx < hi && (self.grad(nx) - y).abs() <= (self.grad(x) - y).abs() {
                                x = nx;
                            } else {
                                break;
                            }
                        }
                        _ => break,
                    }
                }
                x
            }
            Conjugate(k) => k.grad(y),
        }
    }

    pub fn conj_hess(&self, y: f64) -> Option<f64> {
        use ScalarKernel::*;
        match self {
            HalfSquare => Some(1.0),
            Power { q } => power_hess(conj_exponent(*q), y),
            BoltzmannShannon => Some(y.exp()),
            Burg => Some(1.0 / (y * y)),
            FermiDirac => {
                let s = logistic(y);
                Some(s * (1.0 - s))
            }
            Hellinger => Some((1.0 + y * y).powf(-1.5)),
            Exponential => Some(1.0 / y),
            Sum(terms) if terms.len() == 1 => {
                let (w, k) = &terms[0];
                k.conj_hess(y / w).map(|h| h / w)
            }
            Sum(_) => {
                let h = self.hess(self.conj_grad(y))?;
                if h > 0.0 {
                    Some(1.0 / h)
                } else {
                    None
                }
            }
            Conjugate(k) => k.hess(y),
        }
    }

    /// Twice continuously differentiable on the interior.
    fn is_c2(&self) -> bool {
        use ScalarKernel::*;
        match self {
            Power { q } => *q >= 2.0 || is_two(*q),
            Sum(terms) => terms.iter().all(|(_, k)| k.is_c2()),
            Conjugate(k) => match k.as_ref() {
                Power { q } => *q <= 2.0,
                other => other.very_strictly_convex(),
            },
            _ => true,
        }
    }

    /// C^2 with a positive second derivative on the whole interior.
    pub fn very_strictly_convex(&self) -> bool {
        use ScalarKernel::*;
        match self {
            Power { q } => is_two(*q),
            Sum(terms) => {
                terms.iter().all(|(_, k)| k.is_c2())
                    && terms.iter().any(|(_, k)| k.very_strictly_convex())
            }
            Conjugate(k) => k.very_strictly_convex(),
            _ => true,
        }
    }

    /// `dom phi* = R`.
    pub fn supercoercive(&self) -> bool {
        let (lo, hi) = self.conj_interior();
        lo == f64::NEG_INFINITY && hi == f64::INFINITY
    }

    pub fn full_domain(&self) -> bool {
        let (lo, hi) = self.interior();
        lo == f64::NEG_INFINITY && hi == f64::INFINITY
    }
}

fn strictly_inside(x: f64, (lo, hi): (f64, f64)) -> bool {
    if !x.is_finite() {
        return false;
    }
    let lo_ok = !lo.is_finite() || x > lo + DOMAIN_MARGIN * lo.abs().max(1.0);
    let hi_ok = !hi.is_finite() || x < hi - DOMAIN_MARGIN * hi.abs().max(1.0);
    lo_ok && hi_ok
}

/// Catalog kernel kinds, addressable by their string names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    HalfSquaredNorm,
    Power,
    BoltzmannShannon,
    Burg,
    FermiDirac,
    Hellinger,
    Exponential,
}

impl KernelKind {
    pub const ALL: [KernelKind; 7] = [
        KernelKind::HalfSquaredNorm,
        KernelKind::Power,
        KernelKind::BoltzmannShannon,
        KernelKind::Burg,
        KernelKind::FermiDirac,
        KernelKind::Hellinger,
        KernelKind::Exponential,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            KernelKind::HalfSquaredNorm => "half_squared_norm",
            KernelKind::Power => "power",
            KernelKind::BoltzmannShannon => "boltzmann_shannon",
            KernelKind::Burg => "burg",
            KernelKind::FermiDirac => "fermi_dirac",
            KernelKind::Hellinger => "hellinger",
            KernelKind::Exponential => "exponential",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownKernel(s.to_string()))
    }
}

/// A separable Legendre kernel on `R^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    name: String,
    components: Vec<ScalarKernel>,
}

/// Builds a catalog kernel replicated over `dim` coordinates.
pub fn make_kernel(kind: KernelKind, params: &[f64], dim: usize) -> Result<Kernel> {
    if dim == 0 {
        return Err(Error::InvalidParameter("kernel dimension must be positive".into()));
    }
    let expect_params = |n: usize| -> Result<()> {
        if params.len() != n {
            Err(Error::InvalidParameter(format!(
                "{kind} expects {n} parameter(s), got {}",
                params.len()
            )))
        } else {
            Ok(())
        }
    };
    let scalar = match kind {
        KernelKind::HalfSquaredNorm => {
            expect_params(0)?;
            ScalarKernel::HalfSquare
        }
        KernelKind::Power => {
            expect_params(1)?;
            ScalarKernel::power(params[0])?
        }
        KernelKind::BoltzmannShannon => {
            expect_params(0)?;
            ScalarKernel::BoltzmannShannon
        }
        KernelKind::Burg => {
            expect_params(0)?;
            ScalarKernel::Burg
        }
        KernelKind::FermiDirac => {
            expect_params(0)?;
            ScalarKernel::FermiDirac
        }
        KernelKind::Hellinger => {
            expect_params(0)?;
            ScalarKernel::Hellinger
        }
        KernelKind::Exponential => {
            expect_params(0)?;
            ScalarKernel::Exponential
        }
    };
    let name = if kind == KernelKind::Power {
        format!("power({})", params[0])
    } else {
        kind.as_str().to_string()
    };
    Ok(Kernel {
        name,
        components: vec![scalar; dim],
    })
}

impl Kernel {
    /// Kernel built from one scalar kernel per coordinate.
    pub fn separable(name: impl Into<String>, components: Vec<ScalarKernel>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("kernel needs at least one coordinate".into()));
        }
        Ok(Kernel {
            name: name.into(),
            components,
        })
    }

    /// `phi(x1, x2) = x1^2 + |x1|^1.1 + x2^2`, the kernel of the amenable epigraph example.
    pub fn amenable_example() -> Self {
        let first = ScalarKernel::Sum(vec![
            (2.0, ScalarKernel::HalfSquare),
            (1.1, ScalarKernel::Power { q: 1.1 }),
        ]);
        let second = ScalarKernel::Sum(vec![(2.0, ScalarKernel::HalfSquare)]);
        Kernel {
            name: "amenable".into(),
            components: vec![first, second],
        }
    }

    /// `sum_j w_j k_j`, coordinate-wise. All kernels must have equal dimension.
    pub fn weighted_sum(terms: &[(f64, &Kernel)]) -> Result<Self> {
        let dim = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty kernel sum".into()))?
            .1
            .dim();
        let mut components = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut parts = Vec::new();
            for (w, k) in terms {
                if k.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: k.dim(),
                    });
                }
                match &k.components[i] {
                    ScalarKernel::Sum(inner) => {
                        parts.extend(inner.iter().map(|(v, s)| (w * v, s.clone())))
                    }
                    s => parts.push((*w, s.clone())),
                }
            }
            components.push(ScalarKernel::sum(parts)?);
        }
        let name = terms
            .iter()
            .map(|(w, k)| format!("{w}*{}", k.name))
            .collect::<Vec<_>>()
            .join("+");
        Ok(Kernel { name, components })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[ScalarKernel] {
        &self.components
    }

    pub fn conjugate(&self) -> Kernel {
        Kernel {
            name: format!("conj({})", self.name),
            components: self.components.iter().map(ScalarKernel::conjugate).collect(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        compensated_sum(self.components.iter().zip(x).map(|(k, &xi)| k.value(xi)))
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().zip(x).map(|(k, &xi)| k.grad(xi)).collect()
    }

    pub fn conj_value(&self, y: &[f64]) -> f64 {
        compensated_sum(self.components.iter().zip(y).map(|(k, &yi)| k.conj_value(yi)))
    }

    pub fn conj_grad(&self, y: &[f64]) -> Vec<f64> {
        self.components.iter().zip(y).map(|(k, &yi)| k.conj_grad(yi)).collect()
    }

    /// Diagonal of the Hessian, `None` where the kernel is not C^2.
    pub fn hessian_diag(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.components.iter().zip(x).map(|(k, &xi)| k.hess(xi)).collect()
    }

    pub fn conj_hessian_diag(&self, y: &[f64]) -> Option<Vec<f64>> {
        self.components.iter().zip(y).map(|(k, &yi)| k.conj_hess(yi)).collect()
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let d = self
            .hessian_diag(x)
            .ok_or_else(|| Error::HessianUnavailable { point: x.to_vec() })?;
        Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
    }

    pub fn conj_hessian(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        let d = self
            .conj_hessian_diag(y)
            .ok_or_else(|| Error::HessianUnavailable { point: y.to_vec() })?;
        Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
    }

    /// `x in int(dom phi)`, with the [`DOMAIN_MARGIN`] kept from the boundary.
    pub fn dom_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self
                .components
                .iter()
                .zip(x)
                .all(|(k, &xi)| strictly_inside(xi, k.interior()))
    }

    pub fn conj_dom_interior(&self, y: &[f64]) -> bool {
        y.len() == self.dim()
            && self
                .components
                .iter()
                .zip(y)
                .all(|(k, &yi)| strictly_inside(yi, k.conj_interior()))
    }

    /// Per-coordinate open interior bounds.
    pub fn interior_bounds(&self) -> Vec<(f64, f64)> {
        self.components.iter().map(ScalarKernel::interior).collect()
    }

    pub fn conj_interior_bounds(&self) -> Vec<(f64, f64)> {
        self.components.iter().map(ScalarKernel::conj_interior).collect()
    }

    /// Projects `x` onto the margin-shrunk interior box.
    pub fn clamp_to_interior(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .zip(x)
            .map(|(k, &xi)| {
                let (lo, hi) = k.interior();
                let mut v = xi;
                if lo.is_finite() {
                    v = v.max(lo + 2.0 * DOMAIN_MARGIN * lo.abs().max(1.0));
                }
                if hi.is_finite() {
                    v = v.min(hi - 2.0 * DOMAIN_MARGIN * hi.abs().max(1.0));
                }
                v
            })
            .collect()
    }

    pub fn supercoercive(&self) -> bool {
        self.components.iter().all(ScalarKernel::supercoercive)
    }

    /// `dom phi = R^m`.
    pub fn full_domain(&self) -> bool {
        self.components.iter().all(ScalarKernel::full_domain)
    }

    pub fn very_strictly_convex(&self) -> bool {
        self.components.iter().all(ScalarKernel::very_strictly_convex)
    }
}

/// Outcome of [`kernel_roundtrip_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct RoundtripReport {
    pub max_error: f64,
    pub worst_sample: Option<Vec<f64>>,
    pub passed: bool,
}

/// Max of `|grad phi*(grad phi(x)) - x|` over interior samples.
pub fn kernel_roundtrip_check(k: &Kernel, samples: &[Vec<f64>], tol: f64) -> Result<RoundtripReport> {
    let mut max_error = 0.0_f64;
    let mut worst = None;
    for x in samples {
        if x.len() != k.dim() {
            return Err(Error::DimensionMismatch {
                expected: k.dim(),
                got: x.len(),
            });
        }
        if !k.dom_interior(x) {
            return Err(Error::OutsideInterior { point: x.clone() });
        }
        let back = k.conj_grad(&k.grad(x));
        let err = crate::numeric::dist(&back, x);
        if err > max_error || worst.is_none() {
            max_error = max_error.max(err);
            worst = Some(x.clone());
        }
    }
    Ok(RoundtripReport {
        max_error,
        worst_sample: worst,
        passed: max_error <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k1(kind: KernelKind) -> Kernel {
        let params: &[f64] = if kind == KernelKind::Power { &[1.5] } else { &[] };
        make_kernel(kind, params, 1).unwrap()
    }

    #[test]
    fn half_square_is_self_conjugate() {
        let k = k1(KernelKind::HalfSquaredNorm);
        assert_eq!(k.value(&[3.0]), 4.5);
        assert_eq!(k.grad(&[1.0]), vec![1.0]);
        assert_eq!(k.conj_value(&[2.0]), 2.0);
    }

    #[test]
    fn exponential_conjugate_matches_entropy() {
        let k = make_kernel(KernelKind::Exponential, &[], 2).unwrap();
        let y = [0.7, 2.5];
        let expected = y.iter().map(|v: &f64| v * v.ln() - v).sum::<f64>();
        assert_relative_eq!(k.conj_value(&y), expected, epsilon = 1e-14);
        assert_eq!(k.conj_value(&[-0.1, 1.0]), f64::INFINITY);
    }

    #[test]
    fn burg_gradients_invert() {
        let k = k1(KernelKind::Burg);
        assert_eq!(k.grad(&[2.0]), vec![-0.5]);
        assert_eq!(k.conj_grad(&[-0.5]), vec![2.0]);
        assert_eq!(k.conj_grad(&k.grad(&[2.0])), vec![2.0]);
    }

    #[test]
    fn power_kernel_rejects_bad_exponent() {
        assert!(matches!(
            make_kernel(KernelKind::Power, &[1.0], 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_kernel(KernelKind::Power, &[0.5], 1),
            Err(Error::InvalidParameter(_))
        ));
        assert!(make_kernel(KernelKind::Power, &[], 1).is_err());
        assert!("nope".parse::<KernelKind>().is_err());
    }

    #[test]
    fn power_flags() {
        let k = make_kernel(KernelKind::Power, &[1.5], 1).unwrap();
        assert!(!k.very_strictly_convex());
        assert!(k.supercoercive());
        assert!(k.hessian(&[0.0]).is_err());
        assert!(k.hessian(&[1.0]).is_ok());
        let k2 = make_kernel(KernelKind::Power, &[2.0], 1).unwrap();
        assert!(k2.very_strictly_convex());
    }

    #[test]
    fn supercoercive_iff_conjugate_domain_full() {
        for kind in KernelKind::ALL {
            let k = k1(kind);
            let full = k.conj_interior_bounds()[0] == (f64::NEG_INFINITY, f64::INFINITY);
            assert_eq!(k.supercoercive(), full, "{kind}");
        }
        assert!(!k1(KernelKind::Burg).supercoercive());
        assert!(!k1(KernelKind::Exponential).supercoercive());
        assert!(k1(KernelKind::FermiDirac).supercoercive());
    }

    #[test]
    fn roundtrip_reports() {
        let k = k1(KernelKind::HalfSquaredNorm);
        let r = kernel_roundtrip_check(&k, &[vec![-1.0], vec![0.0], vec![7.0]], 0.0).unwrap();
        assert_eq!(r.max_error, 0.0);
        assert!(r.passed);

        let k = k1(KernelKind::Burg);
        let r = kernel_roundtrip_check(&k, &[vec![0.1], vec![1.0], vec![10.0]], 1e-10).unwrap();
        assert!(r.passed, "{r:?}");

        let k = k1(KernelKind::BoltzmannShannon);
        assert!(matches!(
            kernel_roundtrip_check(&k, &[vec![-1.0]], 1e-10),
            Err(Error::OutsideInterior { .. })
        ));
    }

    #[test]
    fn hessians_invert_at_conjugate_pairs() {
        for kind in KernelKind::ALL {
            let k = k1(kind);
            if !k.very_strictly_convex() {
                continue;
            }
            for &x in &[0.2, 0.5, 0.8] {
                let h = k.hessian_diag(&[x]).unwrap()[0];
                let hs = k.conj_hessian_diag(&k.grad(&[x])).unwrap()[0];
                assert_relative_eq!(h * hs, 1.0, epsilon = 1e-12);
                assert!(h > 0.0);
            }
        }
    }

    #[test]
    fn values_are_infinite_outside_domain() {
        for kind in [
            KernelKind::BoltzmannShannon,
            KernelKind::Burg,
            KernelKind::FermiDirac,
            KernelKind::Hellinger,
        ] {
            let v = k1(kind).value(&[-1.5]);
            assert_eq!(v, f64::INFINITY, "{kind}");
        }
        assert_eq!(k1(KernelKind::FermiDirac).value(&[0.0]), 0.0);
        assert_eq!(k1(KernelKind::Hellinger).value(&[1.0]), 0.0);
        assert!(!k1(KernelKind::Burg).value(&[f64::NAN]).is_nan());
    }

    #[test]
    fn essential_smoothness_near_boundary() {
        for kind in [
            KernelKind::BoltzmannShannon,
            KernelKind::Burg,
            KernelKind::FermiDirac,
            KernelKind::Hellinger,
        ] {
            let k = k1(kind);
            let (lo, _) = k.interior_bounds()[0];
            let mut prev = 0.0;
            for j in 1..12 {
                let x = lo + 10f64.powi(-j);
                let g = k.grad(&[x])[0].abs();
                if j > 3 {
                    assert!(g > prev, "{kind}: |grad| not growing at {x}");
                }
                prev = g;
            }
            assert!(prev > 10.0, "{kind}");
        }
    }

    #[test]
    fn amenable_kernel_conjugate_is_numeric_inverse() {
        let k = Kernel::amenable_example();
        assert!(k.supercoercive());
        assert!(!k.very_strictly_convex());
        for x in [[-0.7, 0.3], [0.0, 0.0], [1e-6, -2.0], [2.0, 5.0]] {
            let back = k.conj_grad(&k.grad(&x));
            assert!(crate::numeric::dist(&back, &x) < 1e-12, "{x:?} -> {back:?}");
            let fy = k.value(&x) + k.conj_value(&k.grad(&x)) - crate::numeric::dot(&x, &k.grad(&x));
            assert!(fy.abs() < 1e-12);
        }
        // tilt point of the epigraph example: grad phi*(0, -lambda) = (0, -lambda/2)
        let c = k.conj_grad(&[0.0, -0.2]);
        assert!(c[0].abs() < 1e-14);
        assert_relative_eq!(c[1], -0.1, epsilon = 1e-15);
    }

    #[test]
    fn conjugate_of_conjugate_is_identity() {
        for kind in KernelKind::ALL {
            let k = k1(kind);
            assert_eq!(k.conjugate().conjugate().components(), k.components());
        }
    }

    #[test]
    fn weighted_sum_combines_terms() {
        let a = make_kernel(KernelKind::HalfSquaredNorm, &[], 2).unwrap();
        let b = make_kernel(KernelKind::Power, &[3.0], 2).unwrap();
        let s = Kernel::weighted_sum(&[(2.0, &a), (0.5, &b)]).unwrap();
        let x = [1.5, -0.5];
        assert_relative_eq!(s.value(&x), 2.0 * a.value(&x) + 0.5 * b.value(&x), epsilon = 1e-14);
        let g = s.grad(&x);
        let back = s.conj_grad(&g);
        assert!(crate::numeric::dist(&back, &x) < 1e-12);
        assert!(Kernel::weighted_sum(&[(1.0, &a), (1.0, &make_kernel(KernelKind::Burg, &[], 2).unwrap())]).is_err());
    }
}
