use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{BpamProblem, GTerm, UUpdate, XRegularizer, XTerm};
use crate::kernels::{make_kernel, KernelKind};
use crate::numeric::rng;

#[derive(Clone, Debug)]
pub struct SparseToy {
    pub problem: BpamProblem,
    pub u0: Vec<f64>,
    pub x0: Vec<f64>,
    pub u_true: Vec<f64>,
}

/// `n = m = 20`, `A = I`, `f = 2 sum |x_i|^(1/2)`, `φ = power(3/2)`, `σ = φ / 10`,
/// `ω = |u|^2 / 2`, `λ = 1/10`, `g = (μ/2)|B u - b|^2`, `μ = 10`, with a seeded Gaussian
/// `B ∈ R^{40×20}` and `b = B u_true` for a 4-sparse `u_true`; `u0 = x0 = 0`.
pub fn sparse_recovery_toy(seed: u64) -> SparseToy {
    let n = 20;
    let rows = 40;
    let mut r = rng(seed);
    let b_mat = DMatrix::from_fn(rows, n, |_, _| {
        let z: f64 = r.sample(StandardNormal);
        z / (rows as f64).sqrt()
    });
    let mut u_true = vec![0.0; n];
    for i in sample(&mut r, n, 4) {
        let mag: f64 = r.random_range(3.0..5.0);
        u_true[i] = if r.random_bool(0.5) { mag } else { -mag };
    }
    let b = &b_mat * DVector::from_column_slice(&u_true);
    let problem = BpamProblem {
        f: XTerm::Power { p: 0.5, alpha: 2 },
        g: GTerm::LeastSquares { mu: 10.0, b_mat, b },
        a: DMatrix::identity(n, n),
        phi: make_kernel(KernelKind::Power, &[1.5], n).expect("valid exponent"),
        sigma: XRegularizer { eta: 0.1 },
        u_update: UUpdate::Exact {
            omega: make_kernel(KernelKind::HalfSquaredNorm, &[], n).expect("valid kernel"),
        },
        lambda: 0.1,
    };
    SparseToy {
        problem,
        u0: vec![0.0; n],
        x0: vec![0.0; n],
        u_true,
    }
}

/// One-dimensional power problem with `σ = 0`: `f = 2|x|^(1/2)`, `φ = power(3/2)`,
/// `g(u) = (u - 3)^2 / 2`, `ω = u^2 / 2`, `λ = 1/2`.
pub fn power_toy_1d() -> BpamProblem {
    BpamProblem {
        f: XTerm::Power { p: 0.5, alpha: 2 },
        g: GTerm::LeastSquares {
            mu: 1.0,
            b_mat: DMatrix::identity(1, 1),
            b: DVector::from_element(1, 3.0),
        },
        a: DMatrix::identity(1, 1),
        phi: make_kernel(KernelKind::Power, &[1.5], 1).expect("valid exponent"),
        sigma: XRegularizer { eta: 0.0 },
        u_update: UUpdate::Exact {
            omega: make_kernel(KernelKind::HalfSquaredNorm, &[], 1).expect("valid kernel"),
        },
        lambda: 0.5,
    }
}
