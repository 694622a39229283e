//! Grid-search oracles for left and right Bregman proximal mappings.

use crate::divergence::bregman;
use crate::error::{Error, Result};
use crate::kernels::{Kernel, DOMAIN_MARGIN};
use crate::numeric::{dist, golden_section, linspace};
use crate::prox::objective::{MapFn, ObjectiveFn};

/// Grid-search settings. `resolution` is the grid spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: f64,
    pub value_tol: f64,
    pub point_tol: f64,
    pub floor: f64,
    pub polish_iters: usize,
    pub translation_tol: f64,
}

impl SearchConfig {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, resolution: f64) -> Self {
        SearchConfig {
            lo,
            hi,
            resolution,
            value_tol: 1e-9,
            point_tol: 1e-6,
            floor: -1e12,
            polish_iters: 60,
            translation_tol: 1e-6,
        }
    }

    pub fn interval(lo: f64, hi: f64, resolution: f64) -> Self {
        Self::new(vec![lo], vec![hi], resolution)
    }

    fn validate(&self) -> Result<()> {
        if self.lo.len() != self.hi.len() {
            return Err(Error::DimensionMismatch {
                expected: self.lo.len(),
                got: self.hi.len(),
            });
        }
        if !(self.resolution > 0.0) {
            return Err(Error::InvalidParameter("resolution must be positive".into()));
        }
        if self.lo.iter().zip(&self.hi).any(|(a, b)| !(a <= b)) {
            return Err(Error::EmptySearchRegion);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A prox evaluation request.
#[derive(Clone, Debug)]
pub struct ProxQuery {
    pub f: ObjectiveFn,
    pub k: Kernel,
    pub lambda: f64,
    pub base: Vec<f64>,
    pub side: Side,
}

impl ProxQuery {
    pub fn left(f: ObjectiveFn, k: Kernel, lambda: f64, base: Vec<f64>) -> Self {
        ProxQuery {
            f,
            k,
            lambda,
            base,
            side: Side::Left,
        }
    }

    pub fn right(f: ObjectiveFn, k: Kernel, lambda: f64, base: Vec<f64>) -> Self {
        ProxQuery {
            f,
            k,
            lambda,
            base,
            side: Side::Right,
        }
    }

    fn validate(&self, side: Side) -> Result<()> {
        if self.side != side {
            return Err(Error::InvalidParameter(format!(
                "query is for the {:?} side",
                self.side
            )));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        for got in [self.f.dim(), self.base.len()] {
            if got != self.k.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.k.dim(),
                    got,
                });
            }
        }
        match side {
            Side::Left => {
                if !self.k.dom_interior(&self.base) {
                    return Err(Error::OutsideInterior {
                        point: self.base.clone(),
                    });
                }
            }
            Side::Right => {
                if !self.k.full_domain() {
                    return Err(Error::RightProxRequiresFullDomain(self.k.name().to_string()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SearchDiagnostics {
    pub grid_points: usize,
    pub candidates: usize,
    pub grid_min: f64,
    pub far_field_min: f64,
    pub used_chart: bool,
}

/// A (possibly multivalued) prox answer.
#[derive(Clone, Debug, PartialEq)]
pub struct ProxResult {
    /// Sorted by objective value, best first.
    pub minimizers: Vec<Vec<f64>>,
    pub env_value: f64,
    pub multivalued: bool,
    pub diagnostics: SearchDiagnostics,
}

impl ProxResult {
    /// The minimizer when the prox is single-valued.
    pub fn unique(&self, at: &[f64]) -> Result<&[f64]> {
        if self.multivalued || self.minimizers.len() != 1 {
            return Err(Error::MultivaluedProx {
                point: at.to_vec(),
                minimizers: self.minimizers.clone(),
            });
        }
        Ok(&self.minimizers[0])
    }

    /// Whether every point of `self` is within `tol` of a point of `other` and vice versa.
    pub fn same_minimizers(&self, other: &ProxResult, tol: f64) -> bool {
        covers(&self.minimizers, &other.minimizers, tol) && covers(&other.minimizers, &self.minimizers, tol)
    }
}

fn covers(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.iter().all(|x| b.iter().any(|y| dist(x, y) <= tol))
}

/// Anything that can evaluate a left prox for a fixed `(f, phi, lambda)`.
pub trait LeftProx {
    fn kernel(&self) -> &Kernel;
    fn lambda(&self) -> f64;
    /// `f(x)` for the function being proxed.
    fn objective(&self, x: &[f64]) -> f64;
    fn left_prox(&self, y: &[f64]) -> Result<ProxResult>;
}

/// [`LeftProx`] backed by [`left_envelope`].
#[derive(Clone, Debug)]
pub struct OracleProx {
    pub f: ObjectiveFn,
    pub k: Kernel,
    pub lambda: f64,
    pub search: SearchConfig,
}

impl LeftProx for OracleProx {
    fn kernel(&self) -> &Kernel {
        &self.k
    }

    fn lambda(&self) -> f64 {
        self.lambda
    }

    fn objective(&self, x: &[f64]) -> f64 {
        self.f.value(x)
    }

    fn left_prox(&self, y: &[f64]) -> Result<ProxResult> {
        let q = ProxQuery::left(self.f.clone(), self.k.clone(), self.lambda, y.to_vec());
        left_envelope(&q, &self.search)
    }
}

struct Space<'a> {
    lo: Vec<f64>,
    hi: Vec<f64>,
    counts: Vec<usize>,
    map: Option<&'a MapFn>,
}

impl Space<'_> {
    fn to_ambient(&self, theta: &[f64]) -> Vec<f64> {
        match self.map {
            Some(m) => m(theta),
            None => theta.to_vec(),
        }
    }
}

const MAX_GRID_POINTS: usize = 50_000_000;
const EXTRA_CANDIDATES: usize = 12;

fn axis_count(lo: f64, hi: f64, res: f64) -> usize {
    if hi == lo {
        1
    } else {
        ((hi - lo) / res).ceil() as usize + 1
    }
}

struct Found {
    points: Vec<(Vec<f64>, f64)>,
    env: f64,
    diag: SearchDiagnostics,
}

fn floor_check(v: f64, cfg: &SearchConfig, lambda: f64) -> Result<()> {
    if v < cfg.floor {
        Err(Error::NotProxBounded { lambda, value: v })
    } else {
        Ok(())
    }
}

/// Grid search plus local polish over `space`; `obj` takes ambient points.
fn minimize(
    obj: &dyn Fn(&[f64]) -> f64,
    space: &Space<'_>,
    cfg: &SearchConfig,
    lambda: f64,
) -> Result<Found> {
    let d = space.lo.len();
    if d == 0 || d > 2 {
        return Err(Error::UnsupportedDimension(d));
    }
    let total: usize = space.counts.iter().product();
    if total > MAX_GRID_POINTS {
        return Err(Error::InvalidParameter(format!(
            "search grid has {total} points; coarsen the resolution"
        )));
    }
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|i| linspace(space.lo[i], space.hi[i], space.counts[i]))
        .collect();
    let g = |theta: &[f64]| -> f64 { obj(&space.to_ambient(theta)) };

    let n0 = axes[0].len();
    let n1 = if d == 2 { axes[1].len() } else { 1 };
    let mut values = vec![f64::INFINITY; n0 * n1];
    let mut theta = vec![0.0; d];
    for i in 0..n0 {
        theta[0] = axes[0][i];
        for j in 0..n1 {
            if d == 2 {
                theta[1] = axes[1][j];
            }
            let v = g(&theta);
            floor_check(v, cfg, lambda)?;
            values[i * n1 + j] = v;
        }
    }
    let grid_min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if grid_min == f64::INFINITY {
        return Err(Error::EmptySearchRegion);
    }

    // Discrete local minima.
    let mut locals: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..n0 {
        for j in 0..n1 {
            let v = values[i * n1 + j];
            if !v.is_finite() {
                continue;
            }
            let mut is_min = true;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if (di == 0 && dj == 0) || (d == 1 && dj != 0) {
                        continue;
                    }
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if a < 0 || b < 0 || a >= n0 as i64 || b >= n1 as i64 {
                        continue;
                    }
                    if values[a as usize * n1 + b as usize] < v {
                        is_min = false;
                        break 'nb;
                    }
                }
            }
            if is_min {
                locals.push((i, j, v));
            }
        }
    }
    locals.sort_by(|a, b| a.2.total_cmp(&b.2));
    let near = grid_min + 10.0 * cfg.value_tol * (1.0 + grid_min.abs());
    let chosen: Vec<(usize, usize, f64)> = locals
        .iter()
        .enumerate()
        .filter(|(rank, c)| *rank < EXTRA_CANDIDATES || c.2 <= near)
        .map(|(_, c)| *c)
        .collect();

    let steps: Vec<f64> = (0..d)
        .map(|i| {
            if axes[i].len() > 1 {
                axes[i][1] - axes[i][0]
            } else {
                0.0
            }
        })
        .collect();
    let mut polished: Vec<(Vec<f64>, f64)> = Vec::with_capacity(chosen.len());
    for &(i, j, v) in &chosen {
        let start: Vec<f64> = if d == 2 {
            vec![axes[0][i], axes[1][j]]
        } else {
            vec![axes[0][i]]
        };
        let (t, pv) = polish(&g, start, v, &steps, space, cfg);
        floor_check(pv, cfg, lambda)?;
        polished.push((t, pv));
    }
    let env = polished.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    polished.sort_by(|a, b| a.1.total_cmp(&b.1));
    let cut = env + cfg.value_tol * (1.0 + env.abs());
    let mut points: Vec<(Vec<f64>, f64)> = Vec::new();
    for (t, v) in polished.into_iter().filter(|p| p.1 <= cut) {
        let x = space.to_ambient(&t);
        if points.iter().all(|(p, _)| dist(p, &x) > cfg.point_tol) {
            points.push((x, v));
        }
    }
    Ok(Found {
        points,
        env,
        diag: SearchDiagnostics {
            grid_points: n0 * n1,
            candidates: chosen.len(),
            grid_min,
            far_field_min: f64::INFINITY,
            used_chart: space.map.is_some(),
        },
    })
}

fn polish(
    g: &dyn Fn(&[f64]) -> f64,
    start: Vec<f64>,
    start_value: f64,
    steps: &[f64],
    space: &Space<'_>,
    cfg: &SearchConfig,
) -> (Vec<f64>, f64) {
    let d = start.len();
    let mut c = start;
    let mut val = start_value;
    if d == 1 {
        if steps[0] == 0.0 {
            return (c, val);
        }
        let a = (c[0] - steps[0]).max(space.lo[0]);
        let b = (c[0] + steps[0]).min(space.hi[0]);
        let (t, v) = golden_section(|s| g(&[s]), a, b, cfg.polish_iters);
        if v < val {
            c[0] = t;
            val = v;
        }
        return newton_refine(g, c, val, steps, space);
    }
    let mut w = steps.to_vec();
    let line_iters = cfg.polish_iters.min(40).max(10);
    for _ in 0..80 {
        for j in 0..d {
            if w[j] <= 0.0 {
                continue;
            }
            let a = (c[j] - w[j]).max(space.lo[j]);
            let b = (c[j] + w[j]).min(space.hi[j]);
            let mut p = c.clone();
            let (t, v) = golden_section(
                |s| {
                    p[j] = s;
                    g(&p)
                },
                a,
                b,
                line_iters,
            );
            let moved = (t - c[j]).abs();
            if v < val {
                c[j] = t;
                val = v;
            }
            if moved < 0.9 * w[j] {
                w[j] *= 0.7;
            }
        }
        if w.iter().zip(steps).all(|(wi, si)| *wi <= 1e-13 * si.max(1e-300)) {
            break;
        }
    }
    newton_refine(g, c, val, steps, space)
}

/// Newton steps with finite-difference derivatives. Golden section pins a
/// smooth minimizer only to about `sqrt(eps)`; this recovers several more
/// digits where the objective is smooth and strictly convex locally.
fn newton_refine(
    g: &dyn Fn(&[f64]) -> f64,
    mut c: Vec<f64>,
    mut val: f64,
    steps: &[f64],
    space: &Space<'_>,
) -> (Vec<f64>, f64) {
    let d = c.len();
    for _ in 0..3 {
        let hs: Vec<f64> = c.iter().map(|x| 1e-5 * x.abs().max(1.0)).collect();
        let shifted = |di: &[f64]| -> f64 {
            let p: Vec<f64> = c.iter().zip(di).map(|(a, b)| a + b).collect();
            g(&p)
        };
        let mut grad = vec![0.0; d];
        let mut hess = vec![vec![0.0; d]; d];
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = hs[i];
            let fp = shifted(&e);
            e[i] = -hs[i];
            let fm = shifted(&e);
            if !fp.is_finite() || !fm.is_finite() {
                return (c, val);
            }
            grad[i] = (fp - fm) / (2.0 * hs[i]);
            hess[i][i] = (fp - 2.0 * val + fm) / (hs[i] * hs[i]);
        }
        if d == 2 {
            let mut e = [0.0; 2];
            let mut acc = 0.0;
            for (si, sj, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                e[0] = si * hs[0];
                e[1] = sj * hs[1];
                let v = shifted(&e);
                if !v.is_finite() {
                    return (c, val);
                }
                acc += w * v;
            }
            hess[0][1] = acc / (4.0 * hs[0] * hs[1]);
            hess[1][0] = hess[0][1];
        }
        let step = if d == 1 {
            if !(hess[0][0] > 0.0) {
                return (c, val);
            }
            vec![grad[0] / hess[0][0]]
        } else {
            let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
            if !(hess[0][0] > 0.0 && det > 0.0) {
                return (c, val);
            }
            vec![
                (hess[1][1] * grad[0] - hess[0][1] * grad[1]) / det,
                (hess[0][0] * grad[1] - hess[1][0] * grad[0]) / det,
            ]
        };
        if step.iter().zip(steps).any(|(s, h)| !s.is_finite() || s.abs() > h.max(0.0)) {
            return (c, val);
        }
        let next: Vec<f64> = c.iter().zip(&step).map(|(a, b)| a - b).collect();
        if next
            .iter()
            .enumerate()
            .any(|(i, x)| *x < space.lo[i] || *x > space.hi[i])
        {
            return (c, val);
        }
        let nv = g(&next);
        if !(nv <= val + 4.0 * f64::EPSILON * val.abs()) {
            return (c, val);
        }
        let moved = step.iter().map(|s| s.abs()).fold(0.0, f64::max);
        c = next;
        val = nv;
        if moved < 1e-15 {
            break;
        }
    }
    (c, val)
}

fn probe_directions(d: usize) -> Vec<Vec<f64>> {
    if d == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    let mut out = Vec::new();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            out.push(e);
        }
    }
    if d == 2 {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for (a, b) in [(r, r), (r, -r), (-r, r), (-r, -r)] {
            out.push(vec![a, b]);
        }
    }
    out
}

/// Evaluates `obj` far from `center` to catch envelopes that are `-inf`.
fn far_field(obj: &dyn Fn(&[f64]) -> f64, center: &[f64], cfg: &SearchConfig, lambda: f64) -> Result<f64> {
    let mut best = f64::INFINITY;
    for dir in probe_directions(center.len()) {
        for k in 1..=12 {
            let r = 10f64.powi(k);
            let x: Vec<f64> = center.iter().zip(&dir).map(|(c, u)| c + r * u).collect();
            let v = obj(&x);
            floor_check(v, cfg, lambda)?;
            best = best.min(v);
        }
    }
    Ok(best)
}

fn clamped_box(k: &Kernel, cfg: &SearchConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lo = cfg.lo.clone();
    let mut hi = cfg.hi.clone();
    for (i, (a, b)) in k.interior_bounds().into_iter().enumerate() {
        if a.is_finite() {
            lo[i] = lo[i].max(a + 2.0 * DOMAIN_MARGIN * a.abs().max(1.0));
        }
        if b.is_finite() {
            hi[i] = hi[i].min(b - 2.0 * DOMAIN_MARGIN * b.abs().max(1.0));
        }
        if lo[i] > hi[i] {
            return Err(Error::EmptySearchRegion);
        }
    }
    Ok((lo, hi))
}

fn into_result(found: Found) -> ProxResult {
    let minimizers: Vec<Vec<f64>> = found.points.into_iter().map(|p| p.0).collect();
    ProxResult {
        multivalued: minimizers.len() > 1,
        minimizers,
        env_value: found.env,
        diagnostics: found.diag,
    }
}

fn search_space<'a>(f: &'a ObjectiveFn, lo: Vec<f64>, hi: Vec<f64>, cfg: &SearchConfig) -> Space<'a> {
    match f.chart() {
        Some(c) => Space {
            counts: c
                .lo
                .iter()
                .zip(&c.hi)
                .map(|(a, b)| axis_count(*a, *b, cfg.resolution))
                .collect(),
            lo: c.lo.clone(),
            hi: c.hi.clone(),
            map: Some(&c.map),
        },
        None => Space {
            counts: lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| axis_count(*a, *b, cfg.resolution))
                .collect(),
            lo,
            hi,
            map: None,
        },
    }
}

/// Objective of the left prox subproblem, `f(x) + D(x, y) / lambda`.
pub fn left_objective(f: &ObjectiveFn, k: &Kernel, lambda: f64, y: &[f64], x: &[f64]) -> f64 {
    let fx = f.value(x);
    if fx == f64::INFINITY {
        return fx;
    }
    fx + bregman(k, x, y) / lambda
}

/// Objective of the right prox subproblem, `f(x) + D(y, x) / lambda`.
pub fn right_objective(f: &ObjectiveFn, k: &Kernel, lambda: f64, y: &[f64], x: &[f64]) -> f64 {
    let fx = f.value(x);
    if fx == f64::INFINITY {
        return fx;
    }
    fx + bregman(k, y, x) / lambda
}

/// Left envelope and left prox of `q.f` at `q.base`, by global grid search.
pub fn left_envelope(q: &ProxQuery, search: &SearchConfig) -> Result<ProxResult> {
    q.validate(Side::Left)?;
    search.validate()?;
    let obj = |x: &[f64]| left_objective(&q.f, &q.k, q.lambda, &q.base, x);
    let (lo, hi) = if q.f.chart().is_some() {
        (search.lo.clone(), search.hi.clone())
    } else {
        check_box_dim(search, q.k.dim())?;
        clamped_box(&q.k, search)?
    };
    let space = search_space(&q.f, lo, hi, search);
    let mut found = minimize(&obj, &space, search, q.lambda)?;
    found.diag.far_field_min = far_field(&obj, &q.base, search, q.lambda)?;
    Ok(into_result(found))
}

fn check_box_dim(search: &SearchConfig, dim: usize) -> Result<()> {
    if search.lo.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: search.lo.len(),
        });
    }
    Ok(())
}

/// Right envelope and right prox, computed directly and through the
/// translation to a left prox of `f∘∇φ*` under `φ*`; the two must agree.
pub fn right_envelope(q: &ProxQuery, search: &SearchConfig) -> Result<ProxResult> {
    q.validate(Side::Right)?;
    search.validate()?;
    let direct = right_direct(q, search)?;
    let translated = right_translated(q, search)?;
    let (a, b) = (direct.env_value, translated.env_value);
    if (a - b).abs() > search.translation_tol * (1.0 + a.abs()) {
        return Err(Error::TranslationMismatch {
            direct: a,
            translated: b,
        });
    }
    let xtol = 1e3 * search.point_tol;
    let best_a = &direct.minimizers[0];
    let best_b = &translated.minimizers[0];
    if !covers(std::slice::from_ref(best_a), &translated.minimizers, xtol)
        || !covers(std::slice::from_ref(best_b), &direct.minimizers, xtol)
    {
        return Err(Error::TranslationMismatch {
            direct: a,
            translated: b,
        });
    }
    Ok(direct)
}

/// Right prox by direct minimization of `f(x) + D(y, x) / lambda` only.
pub fn right_direct(q: &ProxQuery, search: &SearchConfig) -> Result<ProxResult> {
    q.validate(Side::Right)?;
    let obj = |x: &[f64]| right_objective(&q.f, &q.k, q.lambda, &q.base, x);
    let (lo, hi) = if q.f.chart().is_some() {
        (search.lo.clone(), search.hi.clone())
    } else {
        check_box_dim(search, q.k.dim())?;
        clamped_box(&q.k, search)?
    };
    let space = search_space(&q.f, lo, hi, search);
    let mut found = minimize(&obj, &space, search, q.lambda)?;
    found.diag.far_field_min = far_field(&obj, &q.base, search, q.lambda)?;
    Ok(into_result(found))
}

/// Right prox as `∇φ*(lprox_{φ*}(f∘∇φ*)(∇φ(y)))`, searched in dual coordinates.
pub fn right_translated(q: &ProxQuery, search: &SearchConfig) -> Result<ProxResult> {
    q.validate(Side::Right)?;
    let ks = q.k.conjugate();
    let fw = q.f.compose_conj_grad(&q.k);
    let yw = q.k.grad(&q.base);
    if !ks.dom_interior(&yw) {
        return Err(Error::OutsideConjugateInterior { point: yw });
    }
    let obj = |w: &[f64]| left_objective(&fw, &ks, q.lambda, &yw, w);
    let space = match fw.chart() {
        Some(_) => search_space(&fw, search.lo.clone(), search.hi.clone(), search),
        None => {
            check_box_dim(search, q.k.dim())?;
            let (lo, hi) = clamped_box(&q.k, search)?;
            let counts = lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| axis_count(*a, *b, search.resolution))
                .collect();
            Space {
                lo: q.k.grad(&lo),
                hi: q.k.grad(&hi),
                counts,
                map: None,
            }
        }
    };
    let mut found = minimize(&obj, &space, search, q.lambda)?;
    found.diag.far_field_min = far_field(&obj, &yw, search, q.lambda)?;
    for p in found.points.iter_mut() {
        p.0 = q.k.conj_grad(&p.0);
    }
    Ok(into_result(found))
}

/// `z = ∇φ*(∇φ(y) + λ v)`.
pub fn tilt_transform_point(k: &Kernel, y: &[f64], v: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !k.dom_interior(y) {
        return Err(Error::OutsideInterior { point: y.to_vec() });
    }
    if v.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            got: v.len(),
        });
    }
    let w: Vec<f64> = k
        .grad(y)
        .iter()
        .zip(v)
        .map(|(g, vi)| g + lambda * vi)
        .collect();
    if !k.conj_dom_interior(&w) {
        return Err(Error::OutsideConjugateInterior { point: w });
    }
    Ok(k.conj_grad(&w))
}

/// Checks `lprox_{f - <., v>}(y) = lprox_f(z)` and the matching envelope identity.
#[allow(clippy::too_many_arguments)]
pub fn tilt_identity_check(
    f: &ObjectiveFn,
    k: &Kernel,
    y: &[f64],
    v: &[f64],
    lambda: f64,
    search: &SearchConfig,
    tol: f64,
) -> Result<bool> {
    let z = tilt_transform_point(k, y, v, lambda)?;
    let tilted = f.tilt(v);
    let lhs = left_envelope(&ProxQuery::left(tilted, k.clone(), lambda, y.to_vec()), search)?;
    let rhs = left_envelope(&ProxQuery::left(f.clone(), k.clone(), lambda, z.clone()), search)?;
    let env_rhs = rhs.env_value + bregman(k, &z, y) / lambda - crate::numeric::dot(v, &z);
    let env_ok = (lhs.env_value - env_rhs).abs() <= tol * (1.0 + env_rhs.abs());
    Ok(env_ok && lhs.same_minimizers(&rhs, search.point_tol.max(tol)))
}

/// Estimated prox-boundedness threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold {
    /// Every grid value passed.
    Unbounded,
    /// Largest grid value below which every grid value passed.
    AtLeast(f64),
    /// The smallest grid value already failed.
    BelowGrid,
}

impl Threshold {
    /// Numeric estimate: `+inf`, the passing value, or `0`.
    pub fn value(&self) -> f64 {
        match self {
            Threshold::Unbounded => f64::INFINITY,
            Threshold::AtLeast(l) => *l,
            Threshold::BelowGrid => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProxBoundEstimate {
    pub threshold: Threshold,
    /// Grid values with their pass flags, ascending.
    pub lambdas: Vec<(f64, bool)>,
    /// Sampled `liminf f/phi` at large `|x|`, when `dom phi = R^m`.
    pub liminf_ratio: Option<f64>,
}

/// Samples `inf f + phi/lambda` over boxes of radius `10^k` around `probe`.
pub fn prox_bounded_estimate(
    f: &ObjectiveFn,
    k: &Kernel,
    lambdas: &[f64],
    probe: &[f64],
    floor: f64,
) -> Result<ProxBoundEstimate> {
    if !k.dom_interior(probe) {
        return Err(Error::OutsideInterior {
            point: probe.to_vec(),
        });
    }
    let dirs = probe_directions(probe.len());
    let fractions = linspace(0.0, 1.0, 41);
    let mut grid: Vec<f64> = lambdas.iter().copied().filter(|l| *l > 0.0).collect();
    grid.sort_by(f64::total_cmp);
    let mut flags = Vec::with_capacity(grid.len());
    for &lambda in &grid {
        let mut mins = Vec::new();
        for e in 0..=12 {
            let r = 10f64.powi(e);
            let mut m = f64::INFINITY;
            for dir in &dirs {
                for &s in &fractions {
                    let x: Vec<f64> = probe.iter().zip(dir).map(|(p, u)| p + r * s * u).collect();
                    let fx = f.value(&x);
                    if fx == f64::INFINITY {
                        continue;
                    }
                    let v = fx + k.value(&x) / lambda;
                    if v.is_finite() || v == f64::NEG_INFINITY {
                        m = m.min(v);
                    }
                }
            }
            mins.push(m);
        }
        let n = mins.len();
        let above = mins.iter().all(|m| *m >= floor);
        let (prev, last) = (mins[n - 2], mins[n - 1]);
        let stable = !prev.is_finite() || (last - prev).abs() <= 1e-6 * (1.0 + prev.abs());
        flags.push((lambda, above && stable));
    }
    let passing = flags.iter().take_while(|(_, ok)| *ok).count();
    let threshold = if passing == flags.len() && !flags.is_empty() {
        Threshold::Unbounded
    } else if passing == 0 {
        Threshold::BelowGrid
    } else {
        Threshold::AtLeast(flags[passing - 1].0)
    };
    let liminf_ratio = if k.full_domain() {
        let mut m = f64::INFINITY;
        for e in 6..=8 {
            let r = 10f64.powi(e);
            for dir in &dirs {
                let x: Vec<f64> = probe.iter().zip(dir).map(|(p, u)| p + r * u).collect();
                let phi = k.value(&x);
                if phi > 0.0 && phi.is_finite() {
                    m = m.min(f.value(&x) / phi);
                }
            }
        }
        Some(m)
    } else {
        None
    };
    Ok(ProxBoundEstimate {
        threshold,
        lambdas: flags,
        liminf_ratio,
    })
}
