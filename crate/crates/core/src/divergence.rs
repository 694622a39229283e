//! Bregman distance `D(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels::{Kernel, ScalarKernel};
use crate::numeric::{compensated_sum, rng};

fn scalar_bregman(k: &ScalarKernel, x: f64, y: f64) -> f64 {
    let fx = k.value(x);
    if fx == f64::INFINITY {
        return f64::INFINITY;
    }
    let d = compensated_sum([fx, -k.value(y), -k.grad(y) * (x - y)]);
    d.max(0.0)
}

/// Extended-real Bregman distance; `+inf` when `y` is not interior or `x` is outside `dom phi`.
pub fn bregman(k: &Kernel, x: &[f64], y: &[f64]) -> f64 {
    if x.len() != k.dim() || !k.dom_interior(y) {
        return f64::INFINITY;
    }
    if x == y {
        return 0.0;
    }
    compensated_sum(
        k.components()
            .iter()
            .zip(x.iter().zip(y))
            .map(|(c, (&xi, &yi))| scalar_bregman(c, xi, yi)),
    )
}

/// Compares `D_phi(x, y)` with `D_phi*(grad phi(y), grad phi(x))`.
pub fn bregman_dual_identity_check(k: &Kernel, x: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    for p in [x, y] {
        if !k.dom_interior(p) {
            return Err(Error::OutsideInterior { point: p.to_vec() });
        }
    }
    let primal = bregman(k, x, y);
    let dual = bregman(&k.conjugate(), &k.grad(y), &k.grad(x));
    Ok((primal - dual).abs() <= tol)
}

/// Sampled extremes `(theta, Theta)` of `2 D(x, y) / |x - y|^2` over pairs in `bx`.
///
/// Only requires the Hessian to be positive definite on the box, so
/// `power(q)` with the box away from 0 is accepted.
pub fn quadratic_bounds_estimate(
    k: &Kernel,
    bx: &[(f64, f64)],
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if bx.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: bx.len(),
        });
    }
    let lo: Vec<f64> = bx.iter().map(|b| b.0).collect();
    let hi: Vec<f64> = bx.iter().map(|b| b.1).collect();
    if bx.iter().any(|(a, b)| !(a <= b)) {
        return Err(Error::InvalidParameter("box bounds are reversed".into()));
    }
    for corner in [&lo, &hi] {
        if !k.dom_interior(corner) {
            return Err(Error::OutsideInterior {
                point: corner.clone(),
            });
        }
    }
    // Hessian must exist and be positive at a sweep of points along every coordinate.
    for (c, (a, b)) in k.components().iter().zip(bx) {
        for j in 0..=64 {
            let t = a + (b - a) * j as f64 / 64.0;
            match c.hess(t) {
                Some(h) if h > 0.0 => {}
                _ => return Err(Error::NotVeryStrictlyConvex),
            }
        }
    }
    let mut r = rng(seed);
    let mut theta = f64::INFINITY;
    let mut big_theta = 0.0_f64;
    let draw = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        bx.iter()
            .map(|&(a, b)| if a == b { a } else { r.random_range(a..=b) })
            .collect()
    };
    let mut used = 0;
    while used < samples.max(1) {
        let x = draw(&mut r);
        let y = draw(&mut r);
        let d2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        if d2 < 1e-12 {
            if bx.iter().all(|(a, b)| a == b) {
                break;
            }
            continue;
        }
        let ratio = 2.0 * bregman(k, &x, &y) / d2;
        theta = theta.min(ratio);
        big_theta = big_theta.max(ratio);
        used += 1;
    }
    if !theta.is_finite() {
        return Err(Error::InvalidParameter("box is degenerate".into()));
    }
    Ok((theta, big_theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{make_kernel, KernelKind};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn half_square_distance() {
        let k = make_kernel(KernelKind::HalfSquaredNorm, &[], 1).unwrap();
        assert_eq!(bregman(&k, &[3.0], &[1.0]), 2.0);
    }

    #[test]
    fn burg_distance() {
        let k = make_kernel(KernelKind::Burg, &[], 1).unwrap();
        assert_relative_eq!(bregman(&k, &[2.0], &[1.0]), 1.0 - 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(bregman(&k, &[2.0], &[1.0]), 0.306_852_819_440_054_7, epsilon = 1e-14);
        assert_eq!(bregman(&k, &[2.0], &[-1.0]), f64::INFINITY);
        assert_eq!(bregman(&k, &[-2.0], &[1.0]), f64::INFINITY);
    }

    #[test]
    fn dual_identity_examples() {
        let k = make_kernel(KernelKind::Exponential, &[], 2).unwrap();
        assert!(bregman_dual_identity_check(&k, &[0.0, 1.0], &[1.0, 0.0], 1e-9).unwrap());
        let k = make_kernel(KernelKind::Burg, &[], 1).unwrap();
        assert!(bregman_dual_identity_check(&k, &[0.5], &[2.0], 1e-9).unwrap());
        assert!(bregman_dual_identity_check(&k, &[-0.5], &[2.0], 1e-9).is_err());
    }

    #[test]
    fn quadratic_bounds() {
        let k = make_kernel(KernelKind::HalfSquaredNorm, &[], 2).unwrap();
        let (a, b) = quadratic_bounds_estimate(&k, &[(-1.0, 1.0), (0.0, 3.0)], 100, 1).unwrap();
        assert_relative_eq!(a, 1.0, epsilon = 1e-9);
        assert_relative_eq!(b, 1.0, epsilon = 1e-9);

        let k = make_kernel(KernelKind::Exponential, &[], 1).unwrap();
        let (a, b) = quadratic_bounds_estimate(&k, &[(0.0, 1.0)], 1000, 2).unwrap();
        assert!(a >= 0.9 && b <= 3.0 && a <= b, "{a} {b}");

        let k = make_kernel(KernelKind::Power, &[1.5], 1).unwrap();
        let (a, b) = quadratic_bounds_estimate(&k, &[(1.0, 2.0)], 1000, 3).unwrap();
        assert!(a > 0.0 && b.is_finite() && a <= b);
        assert_eq!(
            quadratic_bounds_estimate(&k, &[(-1.0, 1.0)], 10, 3),
            Err(Error::NotVeryStrictlyConvex)
        );

        let k = make_kernel(KernelKind::Burg, &[], 1).unwrap();
        assert!(matches!(
            quadratic_bounds_estimate(&k, &[(0.0, 1.0)], 10, 3),
            Err(Error::OutsideInterior { .. })
        ));
    }

    fn kernels() -> Vec<Kernel> {
        let mut v: Vec<Kernel> = KernelKind::ALL
            .iter()
            .map(|&kind| {
                let p: &[f64] = if kind == KernelKind::Power { &[1.5] } else { &[] };
                make_kernel(kind, p, 1).unwrap()
            })
            .collect();
        v.push(make_kernel(KernelKind::Power, &[3.0], 1).unwrap());
        v
    }

    fn interior_point(k: &Kernel, t: f64) -> f64 {
        let (lo, hi) = k.interior_bounds()[0];
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => lo + (hi - lo) * (0.02 + 0.96 * t),
            (true, false) => lo + 0.05 + 5.0 * t,
            _ => -3.0 + 6.0 * t,
        }
    }

    proptest! {
        #[test]
        fn distance_is_nonnegative_and_separating(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            for k in kernels() {
                let x = interior_point(&k, a);
                let y = interior_point(&k, b);
                let d = bregman(&k, &[x], &[y]);
                prop_assert!(d >= 0.0);
                prop_assert_eq!(bregman(&k, &[y], &[y]), 0.0);
                if (x - y).abs() > 1e-3 {
                    prop_assert!(d > 0.0);
                }
            }
        }

        #[test]
        fn dual_identity_on_interior_pairs(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            for k in kernels() {
                let x = interior_point(&k, a);
                let y = interior_point(&k, b);
                prop_assert!(bregman_dual_identity_check(&k, &[x], &[y], 1e-8).unwrap(), "{}", k.name());
            }
        }

        #[test]
        fn convex_in_first_argument(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
            for k in kernels() {
                let x1 = interior_point(&k, a);
                let x2 = interior_point(&k, b);
                let y = [interior_point(&k, c)];
                let mid = bregman(&k, &[0.5 * (x1 + x2)], &y);
                let avg = 0.5 * (bregman(&k, &[x1], &y) + bregman(&k, &[x2], &y));
                prop_assert!(mid <= avg + 1e-10 * (1.0 + avg.abs()));
            }
        }

        #[test]
        fn kernel_convex_along_segments(a in 0.0f64..1.0, b in 0.0f64..1.0, t in 0.0f64..1.0) {
            for k in kernels() {
                let x = interior_point(&k, a);
                let y = interior_point(&k, b);
                let lhs = k.value(&[t * x + (1.0 - t) * y]);
                let rhs = t * k.value(&[x]) + (1.0 - t) * k.value(&[y]);
                prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs.abs()));
            }
        }

        #[test]
        fn fenchel_young_equality(a in 0.0f64..1.0) {
            for k in kernels() {
                let x = [interior_point(&k, a)];
                let g = k.grad(&x);
                let gap = k.value(&x) + k.conj_value(&g) - x[0] * g[0];
                prop_assert!(gap.abs() <= 1e-9 * (1.0 + (x[0] * g[0]).abs()), "{} {gap}", k.name());
            }
        }
    }
}
