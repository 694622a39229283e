//! Grid certification of relatively proximal subgradients, relative
//! prox-regularity, the prox characterization of subgradients and L-smad.
//!
//! Certificates are sampled evidence at a recorded resolution, not proofs.

use std::sync::Arc;

use rand::Rng;

use crate::divergence::bregman;
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::numeric::{dist, dot, golden_section, linspace, rng};
use crate::prox::{left_envelope, tilt_transform_point, LeftProx, ObjectiveFn, ProxQuery, SearchConfig};

/// Doubling schedule `1, 2, 4, ..., 2^20` for the modulus search.
pub const MODULUS_SCHEDULE_MAX_EXP: i32 = 20;

/// Offending data for a failed inequality
/// `f(x') >= f(x) + <v, x' - x> - r D(x', x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub base: Vec<f64>,
    pub point: Vec<f64>,
    pub subgradient: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProximalSubgradientWitness {
    pub xbar: Vec<f64>,
    pub vbar: Vec<f64>,
    pub r: f64,
    pub eps: f64,
    pub kernel: String,
    pub grid_resolution: usize,
    pub checked_points: usize,
    pub verified: bool,
    pub violation: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityCertificate {
    pub xbar: Vec<f64>,
    pub vbar: Vec<f64>,
    /// Smallest passing modulus on the schedule; the largest one tried when not verified.
    pub r: f64,
    pub eps: f64,
    pub kernel: String,
    pub attentive_band: f64,
    pub base_pairs: usize,
    pub checked_pairs: usize,
    pub grid_resolution: usize,
    /// Smallest modulus the sampled pairs require.
    pub required_r: f64,
    pub verified: bool,
    pub violation: Option<Violation>,
}

fn check_ball(k: &Kernel, xbar: &[f64], eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if xbar.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: xbar.len(),
        });
    }
    if !k.dom_interior(xbar) {
        return Err(Error::OutsideInterior {
            point: xbar.to_vec(),
        });
    }
    let lo: Vec<f64> = xbar.iter().map(|x| x - eps).collect();
    let hi: Vec<f64> = xbar.iter().map(|x| x + eps).collect();
    if !k.dom_interior(&lo) || !k.dom_interior(&hi) {
        return Err(Error::BallOutsideRegion {
            center: xbar.to_vec(),
            eps,
        });
    }
    Ok(())
}

fn directions(d: usize) -> Vec<Vec<f64>> {
    if d == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    (0..16)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / 8.0;
            let mut v = vec![0.0; d];
            v[0] = t.cos();
            v[1] = t.sin();
            v
        })
        .collect()
}

/// Sample points in the closed `eps`-ball around `xbar`: a uniform grid,
/// shells at radii `eps * 10^(-j/2)` down to about `1e-14`, and, when `f`
/// has a chart, a parameter grid plus multiscale parameters toward `xbar`.
fn ball_samples(f: &ObjectiveFn, xbar: &[f64], eps: f64, resolution: usize) -> Vec<Vec<f64>> {
    let d = xbar.len();
    let mut out = vec![xbar.to_vec()];
    let axes: Vec<Vec<f64>> = xbar
        .iter()
        .map(|c| linspace(c - eps, c + eps, resolution.max(2)))
        .collect();
    if d == 1 {
        out.extend(axes[0].iter().map(|&x| vec![x]));
    } else if d == 2 {
        for &a in &axes[0] {
            for &b in &axes[1] {
                out.push(vec![a, b]);
            }
        }
    } else {
        let mut r = rng(0x5eed);
        for _ in 0..resolution * resolution {
            out.push(xbar.iter().map(|c| c + eps * r.random_range(-1.0..=1.0)).collect());
        }
    }
    let radii: Vec<f64> = (0..=28).map(|j| eps * 10f64.powf(-(j as f64) / 2.0)).collect();
    for dir in directions(d) {
        for &rad in &radii {
            out.push(xbar.iter().zip(&dir).map(|(c, u)| c + rad * u).collect());
        }
    }
    if let Some(chart) = f.chart() {
        let cd = chart.dim();
        let caxes: Vec<Vec<f64>> = (0..cd)
            .map(|i| linspace(chart.lo[i], chart.hi[i], resolution.max(2)))
            .collect();
        if cd == 1 {
            out.extend(caxes[0].iter().map(|&t| chart.eval(&[t])));
        } else if cd == 2 {
            for &a in &caxes[0] {
                for &b in &caxes[1] {
                    out.push(chart.eval(&[a, b]));
                }
            }
        }
        // parameter nearest to xbar, then multiscale offsets along each axis
        let mut theta: Vec<f64> = chart.lo.clone();
        let mut best = f64::INFINITY;
        if cd <= 2 {
            let n0 = caxes[0].len();
            let n1 = if cd == 2 { caxes[1].len() } else { 1 };
            for i in 0..n0 {
                for j in 0..n1 {
                    let t: Vec<f64> = if cd == 2 {
                        vec![caxes[0][i], caxes[1][j]]
                    } else {
                        vec![caxes[0][i]]
                    };
                    let dd = dist(&chart.eval(&t), xbar);
                    if dd < best {
                        best = dd;
                        theta = t;
                    }
                }
            }
            for i in 0..cd {
                let h = (chart.hi[i] - chart.lo[i]) / (resolution.max(2) - 1) as f64;
                let (a, b) = ((theta[i] - h).max(chart.lo[i]), (theta[i] + h).min(chart.hi[i]));
                let mut t = theta.clone();
                let (ti, _) = golden_section(
                    |s| {
                        t[i] = s;
                        dist(&chart.eval(&t), xbar)
                    },
                    a,
                    b,
                    80,
                );
                theta[i] = ti;
            }
            for i in 0..cd {
                let span = chart.hi[i] - chart.lo[i];
                for j in 0..=28 {
                    let off = span * 10f64.powf(-(j as f64) / 2.0);
                    for s in [-1.0, 1.0] {
                        let mut t = theta.clone();
                        t[i] = (theta[i] + s * off).clamp(chart.lo[i], chart.hi[i]);
                        out.push(chart.eval(&t));
                    }
                }
            }
        }
    }
    out.retain(|x| dist(x, xbar) <= eps);
    out
}

/// Grid check of `f(x) >= f(xbar) + <vbar, x - xbar> - r D(x, xbar)` on the `eps`-ball.
#[allow(clippy::too_many_arguments)]
pub fn certify_prox_subgradient(
    f: &ObjectiveFn,
    k: &Kernel,
    xbar: &[f64],
    vbar: &[f64],
    r: f64,
    eps: f64,
    resolution: usize,
    tol: f64,
) -> Result<ProximalSubgradientWitness> {
    check_ball(k, xbar, eps)?;
    let fbar = f.value(xbar);
    if !fbar.is_finite() {
        return Err(Error::InvalidParameter("f(xbar) must be finite".into()));
    }
    let samples = ball_samples(f, xbar, eps, resolution);
    let mut worst: Option<(f64, Violation)> = None;
    let mut checked = 0;
    for x in &samples {
        let fx = f.value(x);
        if fx == f64::INFINITY {
            continue;
        }
        checked += 1;
        let rhs = fbar + dot(vbar, &crate::numeric::sub(x, xbar)) - r * bregman(k, x, xbar);
        let excess = rhs - fx;
        if excess > tol * (1.0 + fx.abs()) && worst.as_ref().is_none_or(|w| excess > w.0) {
            worst = Some((
                excess,
                Violation {
                    base: xbar.to_vec(),
                    point: x.clone(),
                    subgradient: vbar.to_vec(),
                    lhs: fx,
                    rhs,
                },
            ));
        }
    }
    Ok(ProximalSubgradientWitness {
        xbar: xbar.to_vec(),
        vbar: vbar.to_vec(),
        r,
        eps,
        kernel: k.name().to_string(),
        grid_resolution: resolution,
        checked_points: checked,
        verified: worst.is_none(),
        violation: worst.map(|w| w.1),
    })
}

const MAX_BASE_POINTS: usize = 400;

/// Searches `r` over `1, 2, ..., 2^20` for the two-point inequality on the
/// f-attentive `eps`-localization around `(xbar, vbar)`.
pub fn certify_prox_regularity(
    f: &ObjectiveFn,
    k: &Kernel,
    xbar: &[f64],
    vbar: &[f64],
    eps: f64,
    resolution: usize,
    tol: f64,
) -> Result<RegularityCertificate> {
    if !f.has_subgrad() {
        return Err(Error::MissingSubgradient(f.name.clone()));
    }
    check_ball(k, xbar, eps)?;
    let fbar = f.value(xbar);
    if !fbar.is_finite() {
        return Err(Error::InvalidParameter("f(xbar) must be finite".into()));
    }
    let sub_bar = f.subgrad(xbar).expect("oracle present");
    if !sub_bar.contains(vbar, 1e-9 * (1.0 + crate::numeric::norm(vbar))) {
        return Err(Error::NotASubgradient(format!("{vbar:?}")));
    }
    let samples = ball_samples(f, xbar, eps, resolution);
    let finite: Vec<(&Vec<f64>, f64)> = samples
        .iter()
        .map(|x| (x, f.value(x)))
        .filter(|(_, v)| v.is_finite())
        .collect();

    let mut bases: Vec<(Vec<f64>, f64, Vec<f64>)> = vec![(xbar.to_vec(), fbar, vbar.to_vec())];
    for (x, fx) in &finite {
        if fx - fbar >= eps {
            continue;
        }
        if let Some(s) = f.subgrad(x) {
            for v in s.elements_near(vbar, eps) {
                bases.push(((*x).clone(), *fx, v));
            }
        }
    }
    if bases.is_empty() {
        return Err(Error::DegenerateAttentiveBand);
    }
    if bases.len() > MAX_BASE_POINTS {
        // keep xbar, the points closest to it, and an even stride of the rest
        let head: Vec<_> = bases.drain(..1).collect();
        bases.sort_by(|a, b| dist(&a.0, xbar).total_cmp(&dist(&b.0, xbar)));
        let near: Vec<_> = bases.drain(..MAX_BASE_POINTS / 2).collect();
        let stride = bases.len().div_ceil(MAX_BASE_POINTS / 2 - 1).max(1);
        let spread: Vec<_> = bases.into_iter().step_by(stride).collect();
        bases = head.into_iter().chain(near).chain(spread).collect();
    }

    let mut required = 0.0_f64;
    let mut worst: Option<(Vec<f64>, Vec<f64>, Vec<f64>, f64, f64)> = None;
    let mut checked = 0;
    for (x, fx, v) in &bases {
        for (xp, fxp) in &finite {
            checked += 1;
            let lin = fx + dot(v, &crate::numeric::sub(xp, x));
            let gap = lin - fxp - tol * (1.0 + fxp.abs());
            if gap <= 0.0 {
                continue;
            }
            let d = bregman(k, xp, x);
            let need = if d > 0.0 { gap / d } else { f64::INFINITY };
            if need > required {
                required = need;
                worst = Some((x.clone(), (*xp).clone(), v.clone(), *fxp, d));
            }
        }
    }
    let schedule = (0..=MODULUS_SCHEDULE_MAX_EXP).map(|e| 2f64.powi(e));
    let passing = schedule.clone().find(|r| *r >= required);
    let (r, verified) = match passing {
        Some(r) => (r, true),
        None => (2f64.powi(MODULUS_SCHEDULE_MAX_EXP), false),
    };
    let violation = if verified {
        None
    } else {
        worst.map(|(base, point, v, fxp, d)| {
            let fx = f.value(&base);
            Violation {
                rhs: fx + dot(&v, &crate::numeric::sub(&point, &base)) - r * d,
                base,
                point,
                subgradient: v,
                lhs: fxp,
            }
        })
    };
    Ok(RegularityCertificate {
        xbar: xbar.to_vec(),
        vbar: vbar.to_vec(),
        r,
        eps,
        kernel: k.name().to_string(),
        attentive_band: eps,
        base_pairs: bases.len(),
        checked_pairs: checked,
        grid_resolution: resolution,
        required_r: required,
        verified,
        violation,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterizationReport {
    pub tilted_point: Vec<f64>,
    /// `xbar` is among the oracle minimizers at the tilted point.
    pub in_prox: bool,
    /// The inequality with `r = 1/λ` holds on the whole search grid.
    pub inequality_holds: bool,
}

impl CharacterizationReport {
    pub fn consistent(&self) -> bool {
        self.in_prox == self.inequality_holds
    }
}

/// Tests `xbar ∈ lprox(∇φ*(∇φ(xbar) + λ v))` with the oracle, alongside the
/// box-wide inequality `f(x) >= f(xbar) + <v, x - xbar> - D(x, xbar)/λ`.
pub fn subgradient_prox_characterization_check(
    f: &ObjectiveFn,
    k: &Kernel,
    xbar: &[f64],
    v: &[f64],
    lambda: f64,
    search: &SearchConfig,
    tol: f64,
) -> Result<CharacterizationReport> {
    let z = tilt_transform_point(k, xbar, v, lambda)?;
    let r = left_envelope(&ProxQuery::left(f.clone(), k.clone(), lambda, z.clone()), search)?;
    let in_prox = r
        .minimizers
        .iter()
        .any(|m| dist(m, xbar) <= search.point_tol.max(tol));
    let fbar = f.value(xbar);
    let g = |x: &[f64]| -> bool {
        let fx = f.value(x);
        fx == f64::INFINITY
            || fx >= fbar + dot(v, &crate::numeric::sub(x, xbar)) - bregman(k, x, xbar) / lambda - tol * (1.0 + fx.abs())
    };
    let mut inequality_holds = true;
    let pts: Vec<Vec<f64>> = match f.chart() {
        Some(c) if c.dim() == 1 => linspace(c.lo[0], c.hi[0], 4001).into_iter().map(|t| c.eval(&[t])).collect(),
        _ => {
            let axes: Vec<Vec<f64>> = search
                .lo
                .iter()
                .zip(&search.hi)
                .map(|(a, b)| linspace(*a, *b, if search.lo.len() == 1 { 20001 } else { 401 }))
                .collect();
            if axes.len() == 1 {
                axes[0].iter().map(|&x| vec![x]).collect()
            } else {
                let mut v = Vec::new();
                for &a in &axes[0] {
                    for &b in &axes[1] {
                        v.push(vec![a, b]);
                    }
                }
                v
            }
        }
    };
    for x in pts {
        if !g(&x) {
            inequality_holds = false;
            break;
        }
    }
    Ok(CharacterizationReport {
        tilted_point: z,
        in_prox,
        inequality_holds,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleValuednessReport {
    pub samples: usize,
    pub single_valued_fraction: f64,
    pub multivalued_points: Vec<Vec<f64>>,
    /// Largest `|x - x'| / |y - y'|` over single-valued sample pairs.
    pub max_lipschitz_ratio: f64,
    pub lipschitz_bound: Option<f64>,
}

/// `Θ / (θ (1 - λ r))`, when `λ r < 1`.
pub fn lipschitz_bound(theta: f64, big_theta: f64, lambda: f64, r: f64) -> Option<f64> {
    if lambda * r < 1.0 && theta > 0.0 {
        Some(big_theta / (theta * (1.0 - lambda * r)))
    } else {
        None
    }
}

/// Evaluates the prox at `samples` points within `radius` of `ybar`.
pub fn single_valuedness_scan(
    prox: &dyn LeftProx,
    ybar: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
    bound: Option<f64>,
) -> Result<SingleValuednessReport> {
    let d = ybar.len();
    let ys: Vec<Vec<f64>> = if d == 1 {
        linspace(ybar[0] - radius, ybar[0] + radius, samples)
            .into_iter()
            .map(|y| vec![y])
            .collect()
    } else {
        let mut r = rng(seed);
        (0..samples)
            .map(|_| loop {
                let p: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..=1.0)).collect();
                if crate::numeric::norm(&p) <= 1.0 {
                    break ybar.iter().zip(&p).map(|(c, u)| c + radius * u).collect();
                }
            })
            .collect()
    };
    let mut singles: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let mut multi = Vec::new();
    for y in &ys {
        let res = prox.left_prox(y)?;
        if res.multivalued {
            multi.push(y.clone());
        } else {
            singles.push((y.clone(), res.minimizers[0].clone()));
        }
    }
    let mut ratio = 0.0_f64;
    for i in 0..singles.len() {
        for j in i + 1..singles.len() {
            let dy = dist(&singles[i].0, &singles[j].0);
            if dy > 0.0 {
                ratio = ratio.max(dist(&singles[i].1, &singles[j].1) / dy);
            }
        }
    }
    Ok(SingleValuednessReport {
        samples: ys.len(),
        single_valued_fraction: singles.len() as f64 / ys.len().max(1) as f64,
        multivalued_points: multi,
        max_lipschitz_ratio: ratio,
        lipschitz_bound: bound,
    })
}

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A C^1 component function with an optional gradient oracle.
#[derive(Clone)]
pub struct SmoothFn {
    pub value: ScalarFn,
    pub grad: Option<VectorFn>,
}

impl SmoothFn {
    pub fn new(value: ScalarFn, grad: VectorFn) -> Self {
        SmoothFn {
            value,
            grad: Some(grad),
        }
    }
}

/// `F(x1, x2) = 2 x1^2 - 3 |x1|^1.1 - x2`.
pub fn amenable_map() -> SmoothFn {
    SmoothFn::new(
        Arc::new(|x: &[f64]| 2.0 * x[0] * x[0] - 3.0 * x[0].abs().powf(1.1) - x[1]),
        Arc::new(|x: &[f64]| vec![4.0 * x[0] - 3.3 * x[0].signum() * x[0].abs().powf(0.1), -1.0]),
    )
}

/// Two-sided check `|F(x) - F(y) - <∇F(y), x - y>| <= L D(x, y)` on sampled pairs of `region`.
pub fn lsmad_check(
    components: &[SmoothFn],
    k: &Kernel,
    l: f64,
    region: &[(f64, f64)],
    samples: usize,
    seed: u64,
) -> Result<bool> {
    for (i, c) in components.iter().enumerate() {
        if c.grad.is_none() {
            return Err(Error::MissingGradient(i));
        }
    }
    let lo: Vec<f64> = region.iter().map(|b| b.0).collect();
    let hi: Vec<f64> = region.iter().map(|b| b.1).collect();
    for corner in [&lo, &hi] {
        if !k.dom_interior(corner) {
            return Err(Error::OutsideInterior {
                point: corner.clone(),
            });
        }
    }
    let mut r = rng(seed);
    let draw = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        region
            .iter()
            .map(|&(a, b)| {
                // half the draws concentrate near the centre at multiple scales
                if r.random_bool(0.5) {
                    r.random_range(a..=b)
                } else {
                    let m = 0.5 * (a + b);
                    let s = 10f64.powf(-r.random_range(0.0..8.0));
                    (m + 0.5 * (b - a) * s * r.random_range(-1.0..=1.0)).clamp(a, b)
                }
            })
            .collect()
    };
    for _ in 0..samples {
        let x = draw(&mut r);
        let y = draw(&mut r);
        let d = bregman(k, &x, &y);
        for c in components {
            let g = (c.grad.as_ref().unwrap())(&y);
            let lhs = ((c.value)(&x) - (c.value)(&y) - dot(&g, &crate::numeric::sub(&x, &y))).abs();
            let scale = (c.value)(&x).abs() + (c.value)(&y).abs();
            if lhs > l * d + 1e-12 * (1.0 + scale) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{power_prox_threshold, PowerProxEvaluator, PowerProxSpec};
    use crate::kernels::{make_kernel, KernelKind};
    use crate::prox::objective as obj;
    use crate::prox::OracleProx;

    fn half(d: usize) -> Kernel {
        make_kernel(KernelKind::HalfSquaredNorm, &[], d).unwrap()
    }

    #[test]
    fn convex_subgradient_inequality() {
        let f = obj::abs(1.0, 1);
        let w = certify_prox_subgradient(&f, &half(1), &[0.0], &[0.4], 0.0, 0.5, 201, 1e-12).unwrap();
        assert!(w.verified);
        let w = certify_prox_subgradient(&f, &half(1), &[0.0], &[1.4], 0.0, 0.5, 201, 1e-12).unwrap();
        assert!(!w.verified);
        assert!(w.violation.is_some());
    }

    #[test]
    fn ball_must_stay_interior() {
        let k = make_kernel(KernelKind::Burg, &[], 1).unwrap();
        assert!(matches!(
            certify_prox_subgradient(&obj::zero(1), &k, &[0.3], &[0.0], 0.0, 0.5, 11, 1e-12),
            Err(Error::BallOutsideRegion { .. })
        ));
    }

    #[test]
    fn convex_function_is_regular_with_r_one() {
        let f = obj::abs(1.0, 1);
        let c = certify_prox_regularity(&f, &half(1), &[0.0], &[0.3], 0.5, 201, 1e-12).unwrap();
        assert!(c.verified);
        assert_eq!(c.r, 1.0);
        let f = obj::quadratic(1.0, 2);
        let c = certify_prox_regularity(&f, &half(2), &[0.2, -0.1], &[0.2, -0.1], 0.3, 41, 1e-12).unwrap();
        assert!(c.verified && c.r == 1.0);
    }

    #[test]
    fn power_function_regular_at_zero() {
        let spec = PowerProxSpec::new(0.5, 2, 1.0).unwrap();
        let f = obj::power(0.5, 1);
        let c = certify_prox_regularity(&f, &spec.kernel(1), &[0.0], &[0.0], 0.3, 401, 1e-12).unwrap();
        assert!(c.verified, "{c:?}");
    }

    #[test]
    fn rejects_non_subgradient() {
        let f = obj::neg_abs(1);
        assert!(matches!(
            certify_prox_regularity(&f, &half(1), &[0.0], &[0.0], 0.3, 101, 1e-12),
            Err(Error::NotASubgradient(_))
        ));
        let no_oracle = ObjectiveFn::new("bare", 1, Arc::new(|x: &[f64]| x[0]));
        assert!(matches!(
            certify_prox_regularity(&no_oracle, &half(1), &[0.0], &[1.0], 0.3, 11, 1e-12),
            Err(Error::MissingSubgradient(_))
        ));
    }

    #[test]
    fn tilt_invariance() {
        let f = obj::power(0.5, 1);
        let k = make_kernel(KernelKind::Power, &[1.5], 1).unwrap();
        let xbar = [1.0];
        let vbar = [1.0];
        let a = certify_prox_regularity(&f, &k, &xbar, &vbar, 0.4, 201, 1e-12).unwrap();
        let b = certify_prox_regularity(&f.tilt(&vbar), &k, &xbar, &[0.0], 0.4, 201, 1e-12).unwrap();
        assert_eq!(a.verified, b.verified);
        assert_eq!(a.r, b.r);
    }

    #[test]
    fn epigraph_regularity_depends_on_kernel() {
        let (h, dh) = obj::amenable_profile();
        let f = obj::epigraph(h, dh, (-0.3, 0.3), 0.6);
        let k = Kernel::amenable_example();
        let c = certify_prox_regularity(&f, &k, &[0.0, 0.0], &[0.0, -1.0], 0.3, 60, 1e-12).unwrap();
        assert!(c.verified, "{c:?}");
        let e = certify_prox_regularity(&f, &half(2), &[0.0, 0.0], &[0.0, -1.0], 0.3, 60, 1e-12).unwrap();
        assert!(!e.verified);
        let v = e.violation.unwrap();
        assert!(v.rhs > v.lhs);
        let w = certify_prox_subgradient(&f, &half(2), &[0.0, 0.0], &[0.0, -1.0], 1e6, 0.3, 60, 1e-12).unwrap();
        assert!(!w.verified);
    }

    #[test]
    fn characterization() {
        let f = obj::indicator_box(vec![0.0], vec![1.0]);
        let cfg = SearchConfig::interval(-1.0, 3.0, 1e-3);
        let r = subgradient_prox_characterization_check(&f, &half(1), &[1.0], &[1.0], 0.5, &cfg, 1e-9).unwrap();
        assert!(r.in_prox && r.consistent(), "{r:?}");

        let f = obj::neg_abs(1);
        let cfg = SearchConfig::interval(-3.0, 3.0, 1e-3);
        let r = subgradient_prox_characterization_check(&f, &half(1), &[0.0], &[0.0], 1.0, &cfg, 1e-9).unwrap();
        assert!(!r.in_prox && r.consistent(), "{r:?}");

        let spec = PowerProxSpec::new(0.5, 2, 1.0).unwrap();
        let f = obj::power(0.5, 1);
        let cfg = SearchConfig::interval(-4.0, 4.0, 1e-3);
        let r = subgradient_prox_characterization_check(&f, &spec.kernel(1), &[1.0], &[1.0], 0.2, &cfg, 1e-9).unwrap();
        assert!(r.in_prox && r.consistent(), "{r:?}");
    }

    #[test]
    fn single_valuedness() {
        let convex = OracleProx {
            f: obj::abs(1.0, 1),
            k: half(1),
            lambda: 1.0,
            search: SearchConfig::interval(-4.0, 4.0, 1e-3),
        };
        let r = single_valuedness_scan(&convex, &[0.5], 1.0, 41, 1, None).unwrap();
        assert_eq!(r.single_valued_fraction, 1.0);
        assert!(r.max_lipschitz_ratio <= 1.0 + 1e-6);

        let spec = PowerProxSpec::new(0.5, 2, 1.0).unwrap();
        let yth = power_prox_threshold(&spec).unwrap();
        let p = PowerProxEvaluator::new(spec, 1);
        let r = single_valuedness_scan(&p, &[yth], 0.5, 101, 1, None).unwrap();
        assert!(r.single_valued_fraction < 1.0);
        assert!(r.multivalued_points.iter().all(|y| (y[0] - yth).abs() < 1e-6));
    }

    #[test]
    fn lipschitz_ratio_within_bound_for_strictly_convex_kernel() {
        let k = Kernel::weighted_sum(&[(1.0, &half(1)), (1.0, &make_kernel(KernelKind::Exponential, &[], 1).unwrap())]).unwrap();
        let f = obj::quadratic(-0.5, 1);
        let lambda = 0.2;
        let p = OracleProx {
            f,
            k: k.clone(),
            lambda,
            search: SearchConfig::interval(-2.0, 3.0, 1e-3),
        };
        let (theta, big) = crate::divergence::quadratic_bounds_estimate(&k, &[(-1.5, 2.5)], 2000, 4).unwrap();
        let r = 0.5 / (1.0 + (-1.5f64).exp());
        let bound = lipschitz_bound(theta, big, lambda, r);
        let rep = single_valuedness_scan(&p, &[0.5], 0.5, 21, 1, bound).unwrap();
        assert_eq!(rep.single_valued_fraction, 1.0);
        assert!(rep.max_lipschitz_ratio <= bound.unwrap(), "{rep:?}");
    }

    #[test]
    fn lsmad_examples() {
        let k = Kernel::amenable_example();
        let region = [(-1.0, 1.0), (-1.0, 1.0)];
        assert!(lsmad_check(&[amenable_map()], &k, 3.0, &region, 20000, 7).unwrap());
        assert!(!lsmad_check(&[amenable_map()], &k, 1.0, &region, 20000, 7).unwrap());

        let lin = SmoothFn::new(Arc::new(|x: &[f64]| 2.0 * x[0] - x[1]), Arc::new(|_: &[f64]| vec![2.0, -1.0]));
        assert!(lsmad_check(&[lin], &make_kernel(KernelKind::Exponential, &[], 2).unwrap(), 0.0, &region, 1000, 1).unwrap());

        let sq = SmoothFn::new(Arc::new(|x: &[f64]| x[0] * x[0]), Arc::new(|x: &[f64]| vec![2.0 * x[0]]));
        let r1 = [(-2.0, 2.0)];
        assert!(!lsmad_check(&[sq.clone()], &half(1), 1.0, &r1, 1000, 1).unwrap());
        assert!(lsmad_check(&[sq], &half(1), 2.0, &r1, 1000, 1).unwrap());

        let missing = SmoothFn {
            value: Arc::new(|_: &[f64]| 0.0),
            grad: None,
        };
        assert_eq!(lsmad_check(&[missing], &half(1), 1.0, &r1, 1, 1), Err(Error::MissingGradient(0)));
    }
}
