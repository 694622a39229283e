//! Bregman-ball tangency against an epigraph in the plane.
//!
//! The ball is the sublevel set `{z : D(z, c) <= D(xbar, c)}` around the
//! tilted center `c = ∇φ*(∇φ(xbar) + λ v)`. It touches `epi h` only at
//! `xbar` exactly when `v` is a relatively proximal normal there.

use std::sync::Arc;

use crate::divergence::bregman;
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numeric::linspace;
use crate::prox::tilt_transform_point;

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct TangencySetup {
    pub kernel: Kernel,
    pub h: Profile,
    pub xbar: [f64; 2],
    pub v: [f64; 2],
    pub lambda: f64,
    pub s_range: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangencyScan {
    pub center: Vec<f64>,
    pub level: f64,
    /// `min D(z, c) - level` over scanned `z ∈ epi h`.
    pub min_gap: f64,
    pub argmin: Vec<f64>,
    /// Largest `|s - xbar_1|` among scanned points within `tol` of the level.
    pub touch_radius: f64,
    pub scanned: usize,
    pub passed: bool,
}

impl TangencySetup {
    pub fn center(&self) -> Result<Vec<f64>> {
        if self.kernel.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.kernel.dim(),
            });
        }
        tilt_transform_point(&self.kernel, &self.xbar, &self.v, self.lambda)
    }

    /// Closest point to `c` on the vertical ray `{(s, t) : t >= h(s)}`.
    fn ray_min(&self, s: f64, c: &[f64]) -> Vec<f64> {
        vec![s, (self.h)(s).max(c[1])]
    }

    fn s_samples(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.s_range;
        let mut s = linspace(a, b, n.max(2));
        let x0 = self.xbar[0];
        for j in 0..=24 {
            let off = 10f64.powf(-(j as f64) / 2.0) * (b - a).abs();
            for sign in [-1.0, 1.0] {
                let p = x0 + sign * off;
                if p >= a && p <= b {
                    s.push(p);
                }
            }
        }
        s.sort_by(f64::total_cmp);
        s
    }

    /// Min-gap scan. Passes iff no scanned epigraph point lies strictly
    /// inside the ball (beyond `tol`) and every touching point is within
    /// `touch_eps` of `xbar`.
    pub fn tangency_scan(&self, n: usize, tol: f64, touch_eps: f64) -> Result<TangencyScan> {
        if self.kernel.components().len() != 2 {
            return Err(Error::Unsupported("tangency scan needs a separable planar kernel".into()));
        }
        let c = self.center()?;
        let level = bregman(&self.kernel, &self.xbar, &c);
        let mut min_gap = f64::INFINITY;
        let mut argmin = self.xbar.to_vec();
        let mut touch = 0.0_f64;
        let samples = self.s_samples(n);
        for &s in &samples {
            let z = self.ray_min(s, &c);
            let gap = bregman(&self.kernel, &z, &c) - level;
            if gap < min_gap {
                min_gap = gap;
                argmin = z.clone();
            }
            if gap <= tol {
                touch = touch.max((s - self.xbar[0]).abs());
            }
        }
        Ok(TangencyScan {
            center: c,
            level,
            min_gap,
            argmin,
            touch_radius: touch,
            scanned: samples.len(),
            passed: min_gap >= -tol && touch <= touch_eps,
        })
    }

    /// `n` points of the level set `D(z, c) = level`, one per ray from `c`.
    pub fn level_set(&self, n: usize) -> Result<Vec<[f64; 2]>> {
        let c = self.center()?;
        let level = bregman(&self.kernel, &self.xbar, &c);
        let k = &self.kernel;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let u = [th.cos(), th.sin()];
            let at = |r: f64| vec![c[0] + r * u[0], c[1] + r * u[1]];
            let excess = |r: f64| {
                let z = at(r);
                if k.dom_interior(&z) {
                    bregman(k, &z, &c) - level
                } else {
                    f64::INFINITY
                }
            };
            let mut hi = 1e-3;
            while excess(hi) < 0.0 && hi < 1e6 {
                hi *= 2.0;
            }
            let mut lo = 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if excess(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let z = at(0.5 * (lo + hi));
            out.push([z[0], z[1]]);
        }
        Ok(out)
    }

    pub fn graph(&self, n: usize) -> Vec<[f64; 2]> {
        linspace(self.s_range.0, self.s_range.1, n.max(2))
            .into_iter()
            .map(|s| [s, (self.h)(s)])
            .collect()
    }
}

/// The amenable example: `h(s) = 2 s^2 - 3 |s|^1.1`, `xbar = 0`, `v = (0, -1)`.
pub fn amenable_setup(kernel: Kernel, lambda: f64) -> TangencySetup {
    TangencySetup {
        kernel,
        h: Arc::new(|s: f64| 2.0 * s * s - 3.0 * s.abs().powf(1.1)),
        xbar: [0.0, 0.0],
        v: [0.0, -1.0],
        lambda,
        s_range: (-1.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{make_kernel, KernelKind};

    fn euclid() -> Kernel {
        make_kernel(KernelKind::HalfSquaredNorm, &[], 2).unwrap()
    }

    #[test]
    fn bregman_ball_is_tangent() {
        let s = amenable_setup(Kernel::amenable_example(), 0.2);
        let c = s.center().unwrap();
        assert!((c[0]).abs() < 1e-15 && (c[1] + 0.1).abs() < 1e-12);
        let r = s.tangency_scan(4001, 1e-14, 1e-6).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.level - 0.01).abs() < 1e-12);
    }

    #[test]
    fn euclidean_ball_penetrates() {
        let s = amenable_setup(euclid(), 0.2);
        let r = s.tangency_scan(4001, 1e-14, 1e-6).unwrap();
        assert!(!r.passed);
        assert!(r.min_gap < 0.0);
        // gap = (s^2 + h^2 + 2 λ h) / 2 at the returned point
        let (z0, z1) = (r.argmin[0], r.argmin[1]);
        let expect = 0.5 * (z0 * z0 + z1 * z1 + 0.4 * z1);
        assert!((r.min_gap - expect).abs() < 1e-12);
    }

    #[test]
    fn large_lambda_breaks_bregman_tangency() {
        let s = amenable_setup(Kernel::amenable_example(), 1.0);
        assert!(!s.tangency_scan(4001, 1e-14, 1e-6).unwrap().passed);
    }

    #[test]
    fn level_set_lies_on_level() {
        let s = amenable_setup(Kernel::amenable_example(), 0.2);
        let c = s.center().unwrap();
        for z in s.level_set(64).unwrap() {
            let d = bregman(&s.kernel, &z, &c);
            assert!((d - 0.01).abs() < 1e-12, "{z:?} {d}");
        }
        assert_eq!(s.graph(11).len(), 11);
    }

    #[test]
    fn center_outside_conjugate_domain() {
        let k = make_kernel(KernelKind::Exponential, &[], 2).unwrap();
        let mut s = amenable_setup(k, 5.0);
        s.xbar = [0.0, 0.0];
        assert!(matches!(s.center(), Err(Error::OutsideConjugateInterior { .. })));
    }
}
