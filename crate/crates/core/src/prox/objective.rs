//! Extended-real objectives `f` with subdifferential oracles.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::kernels::Kernel;
use crate::numeric::{dist, dot, norm};

pub type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type SubgradFn = Arc<dyn Fn(&[f64]) -> Subdifferential + Send + Sync>;
pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A (regular) subdifferential, stored in one of a few closed forms.
#[derive(Clone, Debug, PartialEq)]
pub enum Subdifferential {
    Empty,
    /// A finite set of vectors.
    Points(Vec<Vec<f64>>),
    /// Product of closed intervals; bounds may be infinite.
    Box(Vec<(f64, f64)>),
    /// `base + cone(generators)`.
    Cone {
        base: Vec<f64>,
        generators: Vec<Vec<f64>>,
    },
}

impl Subdifferential {
    pub fn singleton(v: Vec<f64>) -> Self {
        Subdifferential::Points(vec![v])
    }

    pub fn whole_space(dim: usize) -> Self {
        Subdifferential::Box(vec![(f64::NEG_INFINITY, f64::INFINITY); dim])
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Subdifferential::Empty => true,
            Subdifferential::Points(p) => p.is_empty(),
            Subdifferential::Box(b) => b.iter().any(|(lo, hi)| lo > hi),
            Subdifferential::Cone { .. } => false,
        }
    }

    /// Nearest element to `v`, `None` for the empty set.
    pub fn project(&self, v: &[f64]) -> Option<Vec<f64>> {
        match self {
            Subdifferential::Empty => None,
            Subdifferential::Points(pts) => pts
                .iter()
                .min_by(|a, b| dist(a, v).total_cmp(&dist(b, v)))
                .cloned(),
            Subdifferential::Box(b) => {
                if self.is_empty() {
                    return None;
                }
                Some(v.iter().zip(b).map(|(&x, &(lo, hi))| x.clamp(lo, hi)).collect())
            }
            Subdifferential::Cone { base, generators } => {
                let r: Vec<f64> = v.iter().zip(base).map(|(a, b)| a - b).collect();
                let c = project_onto_cone(&r, generators);
                Some(c.iter().zip(base).map(|(a, b)| a + b).collect())
            }
        }
    }

    /// `dist(v, S)`, `+inf` for the empty set.
    pub fn dist(&self, v: &[f64]) -> f64 {
        match self.project(v) {
            Some(p) => dist(&p, v),
            None => f64::INFINITY,
        }
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        self.dist(v) <= tol
    }

    /// `S + w`.
    pub fn shift(&self, w: &[f64]) -> Subdifferential {
        let add = |p: &Vec<f64>| -> Vec<f64> { p.iter().zip(w).map(|(a, b)| a + b).collect() };
        match self {
            Subdifferential::Empty => Subdifferential::Empty,
            Subdifferential::Points(pts) => Subdifferential::Points(pts.iter().map(add).collect()),
            Subdifferential::Box(b) => Subdifferential::Box(
                b.iter()
                    .zip(w)
                    .map(|(&(lo, hi), &s)| (lo + s, hi + s))
                    .collect(),
            ),
            Subdifferential::Cone { base, generators } => Subdifferential::Cone {
                base: add(base),
                generators: generators.clone(),
            },
        }
    }

    /// `diag(d) S` for a positive diagonal `d`.
    pub fn scale_diag(&self, d: &[f64]) -> Subdifferential {
        let mul = |p: &Vec<f64>| -> Vec<f64> { p.iter().zip(d).map(|(a, b)| a * b).collect() };
        match self {
            Subdifferential::Empty => Subdifferential::Empty,
            Subdifferential::Points(pts) => Subdifferential::Points(pts.iter().map(mul).collect()),
            Subdifferential::Box(b) => Subdifferential::Box(
                b.iter()
                    .zip(d)
                    .map(|(&(lo, hi), &s)| (scale_bound(lo, s), scale_bound(hi, s)))
                    .collect(),
            ),
            Subdifferential::Cone { base, generators } => Subdifferential::Cone {
                base: mul(base),
                generators: generators.iter().map(mul).collect(),
            },
        }
    }

    /// Elements within `eps` of `target`: the projection and a few perturbations of it.
    pub fn elements_near(&self, target: &[f64], eps: f64) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        match self {
            Subdifferential::Empty => {}
            Subdifferential::Points(pts) => out.extend(pts.iter().cloned()),
            Subdifferential::Box(b) => {
                if let Some(p) = self.project(target) {
                    for i in 0..p.len() {
                        for s in [-0.5, 0.5] {
                            let mut q = p.clone();
                            q[i] = (q[i] + s * eps).clamp(b[i].0, b[i].1);
                            out.push(q);
                        }
                    }
                    out.push(p);
                }
            }
            Subdifferential::Cone { base, generators } => {
                if let Some(p) = self.project(target) {
                    let rel: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
                    for s in [1.0 - 0.5 * eps, 1.0 + 0.5 * eps] {
                        out.push(base.iter().zip(&rel).map(|(b, r)| b + s * r).collect());
                    }
                    for g in generators {
                        let gn = norm(g);
                        if gn > 0.0 {
                            out.push(p.iter().zip(g).map(|(a, b)| a + 0.5 * eps * b / gn).collect());
                        }
                    }
                    out.push(p);
                }
            }
        }
        out.retain(|e| dist(e, target) < eps && self.contains(e, 1e-12 * (1.0 + norm(e))));
        out
    }
}

fn scale_bound(b: f64, s: f64) -> f64 {
    if b.is_infinite() {
        b
    } else {
        b * s
    }
}

/// Euclidean projection of `r` onto `cone(generators)`, by enumerating active sets.
fn project_onto_cone(r: &[f64], generators: &[Vec<f64>]) -> Vec<f64> {
    let m = r.len();
    let k = generators.len();
    let mut best = vec![0.0; m];
    let mut best_d = norm(r);
    if k == 0 {
        return best;
    }
    assert!(k <= 16, "cone with too many generators");
    for mask in 1u32..(1u32 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        if idx.len() > m {
            continue;
        }
        let g = DMatrix::from_fn(m, idx.len(), |i, j| generators[idx[j]][i]);
        let gram = g.transpose() * &g;
        let rhs = g.transpose() * DVector::from_column_slice(r);
        let Some(c) = gram.lu().solve(&rhs) else {
            continue;
        };
        if c.iter().any(|&ci| !(ci >= 0.0)) {
            continue;
        }
        let p = &g * c;
        let d = dist(p.as_slice(), r);
        if d < best_d {
            best_d = d;
            best = p.as_slice().to_vec();
        }
    }
    best
}

/// A parameterization of a set that a plain ambient grid would miss,
/// e.g. a segment or the graph part of an epigraph.
#[derive(Clone)]
pub struct Chart {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub map: MapFn,
}

impl Chart {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, map: MapFn) -> Self {
        Chart { lo, hi, map }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn eval(&self, theta: &[f64]) -> Vec<f64> {
        (self.map)(theta)
    }

    /// Same parameter box, composed with `post`.
    pub fn compose(&self, post: MapFn) -> Chart {
        let inner = self.map.clone();
        Chart {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            map: Arc::new(move |t| post(&inner(t))),
        }
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish_non_exhaustive()
    }
}

/// An extended-real target `f: R^m -> (-inf, +inf]`.
#[derive(Clone)]
pub struct ObjectiveFn {
    pub name: String,
    dim: usize,
    value: ValueFn,
    subgrad: Option<SubgradFn>,
    chart: Option<Chart>,
    /// Known threshold of relative prox-boundedness, when available.
    pub prox_threshold: Option<f64>,
}

impl fmt::Debug for ObjectiveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveFn")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("has_subgrad", &self.subgrad.is_some())
            .field("chart", &self.chart)
            .field("prox_threshold", &self.prox_threshold)
            .finish()
    }
}

impl ObjectiveFn {
    pub fn new(name: impl Into<String>, dim: usize, value: ValueFn) -> Self {
        ObjectiveFn {
            name: name.into(),
            dim,
            value,
            subgrad: None,
            chart: None,
            prox_threshold: None,
        }
    }

    pub fn with_subgrad(mut self, subgrad: SubgradFn) -> Self {
        self.subgrad = Some(subgrad);
        self
    }

    pub fn with_chart(mut self, chart: Chart) -> Self {
        self.chart = Some(chart);
        self
    }

    pub fn with_threshold(mut self, lambda_f: f64) -> Self {
        self.prox_threshold = Some(lambda_f);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let v = (self.value)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        self.value(x) < f64::INFINITY
    }

    pub fn has_subgrad(&self) -> bool {
        self.subgrad.is_some()
    }

    /// `None` when no oracle was supplied.
    pub fn subgrad(&self, x: &[f64]) -> Option<Subdifferential> {
        if !self.in_domain(x) {
            return self.subgrad.as_ref().map(|_| Subdifferential::Empty);
        }
        self.subgrad.as_ref().map(|s| s(x))
    }

    pub fn chart(&self) -> Option<&Chart> {
        self.chart.as_ref()
    }

    /// `x -> f(x) - <v, x>`.
    pub fn tilt(&self, v: &[f64]) -> ObjectiveFn {
        let f = self.clone();
        let v1 = v.to_vec();
        let v2 = v.to_vec();
        let g = self.clone();
        let mut out = ObjectiveFn::new(
            format!("tilt({})", self.name),
            self.dim,
            Arc::new(move |x| {
                let fx = f.value(x);
                if fx == f64::INFINITY {
                    fx
                } else {
                    fx - dot(&v1, x)
                }
            }),
        );
        if self.subgrad.is_some() {
            let neg: Vec<f64> = v2.iter().map(|a| -a).collect();
            out = out.with_subgrad(Arc::new(move |x| {
                g.subgrad(x).map_or(Subdifferential::Empty, |s| s.shift(&neg))
            }));
        }
        out.chart = self.chart.clone();
        out.prox_threshold = self.prox_threshold;
        out
    }

    /// `w -> f(grad phi*(w))`, `+inf` off `int(dom phi*)`.
    pub fn compose_conj_grad(&self, k: &Kernel) -> ObjectiveFn {
        let f = self.clone();
        let kk = k.clone();
        let mut out = ObjectiveFn::new(
            format!("{}∘∇φ*", self.name),
            self.dim,
            Arc::new(move |w| {
                if !kk.conj_dom_interior(w) {
                    return f64::INFINITY;
                }
                f.value(&kk.conj_grad(w))
            }),
        );
        if self.subgrad.is_some() {
            let f = self.clone();
            let kk = k.clone();
            out = out.with_subgrad(Arc::new(move |w| {
                let x = kk.conj_grad(w);
                match (f.subgrad(&x), kk.conj_hessian_diag(w)) {
                    (Some(s), Some(d)) => s.scale_diag(&d),
                    _ => Subdifferential::Empty,
                }
            }));
        }
        if let Some(c) = &self.chart {
            let kk = k.clone();
            out.chart = Some(c.compose(Arc::new(move |x| kk.grad(x))));
        }
        out
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// `(1/p) sum |x_i|^p`, `0 < p`.
pub fn power(p: f64, dim: usize) -> ObjectiveFn {
    ObjectiveFn::new(
        format!("power({p})"),
        dim,
        Arc::new(move |x| x.iter().map(|v| v.abs().powf(p)).sum::<f64>() / p),
    )
    .with_subgrad(Arc::new(move |x| {
        Subdifferential::Box(
            x.iter()
                .map(|&v| {
                    if v == 0.0 {
                        if p < 1.0 {
                            (f64::NEG_INFINITY, f64::INFINITY)
                        } else if p == 1.0 {
                            (-1.0, 1.0)
                        } else {
                            (0.0, 0.0)
                        }
                    } else {
                        let g = v.signum() * v.abs().powf(p - 1.0);
                        (g, g)
                    }
                })
                .collect(),
        )
    }))
    .with_threshold(f64::INFINITY)
}

/// `c * |x|_1`.
pub fn abs(c: f64, dim: usize) -> ObjectiveFn {
    ObjectiveFn::new(
        format!("{c}*abs"),
        dim,
        Arc::new(move |x| c * x.iter().map(|v| v.abs()).sum::<f64>()),
    )
    .with_subgrad(Arc::new(move |x| {
        Subdifferential::Box(
            x.iter()
                .map(|&v| {
                    if v == 0.0 {
                        (-c.abs(), c.abs())
                    } else {
                        (c * v.signum(), c * v.signum())
                    }
                })
                .collect(),
        )
    }))
}

/// `(a/2)|x|^2`; for `a < 0` the Euclidean prox-threshold is `1/|a|`.
pub fn quadratic(a: f64, dim: usize) -> ObjectiveFn {
    let f = ObjectiveFn::new(
        format!("{a}/2*sq"),
        dim,
        Arc::new(move |x| 0.5 * a * x.iter().map(|v| v * v).sum::<f64>()),
    )
    .with_subgrad(Arc::new(move |x| {
        Subdifferential::singleton(x.iter().map(|v| a * v).collect())
    }));
    if a < 0.0 {
        f.with_threshold(1.0 / -a)
    } else {
        f.with_threshold(f64::INFINITY)
    }
}

/// `-|x|_1`. Its regular subdifferential at a zero coordinate is empty.
pub fn neg_abs(dim: usize) -> ObjectiveFn {
    ObjectiveFn::new(
        "neg_abs",
        dim,
        Arc::new(|x| -x.iter().map(|v| v.abs()).sum::<f64>()),
    )
    .with_subgrad(Arc::new(|x| {
        if x.iter().any(|&v| v == 0.0) {
            Subdifferential::Empty
        } else {
            Subdifferential::singleton(x.iter().map(|v| -v.signum()).collect())
        }
    }))
}

pub fn zero(dim: usize) -> ObjectiveFn {
    ObjectiveFn::new("zero", dim, Arc::new(|_| 0.0))
        .with_subgrad(Arc::new(move |x| Subdifferential::singleton(vec![0.0; x.len()])))
        .with_threshold(f64::INFINITY)
}

/// Indicator of the box `prod [lo_i, hi_i]`.
pub fn indicator_box(lo: Vec<f64>, hi: Vec<f64>) -> ObjectiveFn {
    let dim = lo.len();
    let (l1, h1) = (lo.clone(), hi.clone());
    ObjectiveFn::new(
        "indicator_box",
        dim,
        Arc::new(move |x| {
            if x.iter().zip(l1.iter().zip(&h1)).all(|(v, (a, b))| a <= v && v <= b) {
                0.0
            } else {
                f64::INFINITY
            }
        }),
    )
    .with_subgrad(Arc::new(move |x| {
        Subdifferential::Box(
            x.iter()
                .zip(lo.iter().zip(&hi))
                .map(|(&v, (&a, &b))| {
                    let at_lo = close(v, a);
                    let at_hi = close(v, b);
                    match (at_lo, at_hi) {
                        (true, true) => (f64::NEG_INFINITY, f64::INFINITY),
                        (true, false) => (f64::NEG_INFINITY, 0.0),
                        (false, true) => (0.0, f64::INFINITY),
                        _ => (0.0, 0.0),
                    }
                })
                .collect(),
        )
    }))
    .with_threshold(f64::INFINITY)
}

/// Indicator of a single point.
pub fn indicator_point(p: Vec<f64>) -> ObjectiveFn {
    let dim = p.len();
    let p2 = p.clone();
    let p3 = p.clone();
    ObjectiveFn::new(
        "indicator_point",
        dim,
        Arc::new(move |x| if x == p2.as_slice() { 0.0 } else { f64::INFINITY }),
    )
    .with_subgrad(Arc::new(move |x| Subdifferential::whole_space(x.len())))
    .with_chart(Chart::new(vec![0.0], vec![0.0], Arc::new(move |_| p3.clone())))
    .with_threshold(f64::INFINITY)
}

/// Indicator of the planar segment `[a, b]`.
pub fn indicator_segment(a: [f64; 2], b: [f64; 2]) -> ObjectiveFn {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let locate = move |x: &[f64]| -> Option<f64> {
        let t = ((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / len2;
        let tc = t.clamp(0.0, 1.0);
        let px = [a[0] + tc * d[0], a[1] + tc * d[1]];
        let scale = 1.0 + x[0].abs().max(x[1].abs());
        if dist(&px, x) <= 1e-12 * scale {
            Some(tc)
        } else {
            None
        }
    };
    let n = vec![-d[1], d[0]];
    ObjectiveFn::new(
        "indicator_segment",
        2,
        Arc::new(move |x| if locate(x).is_some() { 0.0 } else { f64::INFINITY }),
    )
    .with_subgrad(Arc::new(move |x| match locate(x) {
        None => Subdifferential::Empty,
        Some(t) => {
            let mut generators = vec![n.clone(), vec![-n[0], -n[1]]];
            if t <= 1e-12 {
                generators.push(vec![-d[0], -d[1]]);
            }
            if t >= 1.0 - 1e-12 {
                generators.push(vec![d[0], d[1]]);
            }
            Subdifferential::Cone {
                base: vec![0.0, 0.0],
                generators,
            }
        }
    }))
    .with_chart(Chart::new(
        vec![0.0],
        vec![1.0],
        Arc::new(move |t| vec![a[0] + t[0] * d[0], a[1] + t[0] * d[1]]),
    ))
    .with_threshold(f64::INFINITY)
}

/// Indicator of `epi h = {(s, t) : t >= h(s)}` for a C^1 function `h` with derivative `dh`.
///
/// The chart covers `s in [s_lo, s_hi]` and heights `h(s) .. h(s) + t_max`.
pub fn epigraph(
    h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    dh: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    s_range: (f64, f64),
    t_max: f64,
) -> ObjectiveFn {
    let h1 = h.clone();
    let h2 = h.clone();
    ObjectiveFn::new(
        "indicator_epigraph",
        2,
        Arc::new(move |x| if x[1] >= h1(x[0]) { 0.0 } else { f64::INFINITY }),
    )
    .with_subgrad(Arc::new(move |x| {
        let hs = h(x[0]);
        if x[1] < hs {
            Subdifferential::Empty
        } else if x[1] > hs {
            Subdifferential::singleton(vec![0.0, 0.0])
        } else {
            Subdifferential::Cone {
                base: vec![0.0, 0.0],
                generators: vec![vec![dh(x[0]), -1.0]],
            }
        }
    }))
    .with_chart(Chart::new(
        vec![s_range.0, 0.0],
        vec![s_range.1, t_max],
        Arc::new(move |p| vec![p[0], h2(p[0]) + p[1]]),
    ))
    .with_threshold(f64::INFINITY)
}

/// `h(s) = 2 s^2 - 3 |s|^1.1`, the profile of the amenable epigraph example.
pub fn amenable_profile() -> (
    Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    Arc<dyn Fn(f64) -> f64 + Send + Sync>,
) {
    (
        Arc::new(|s: f64| 2.0 * s * s - 3.0 * s.abs().powf(1.1)),
        Arc::new(|s: f64| 4.0 * s - 3.3 * s.signum() * s.abs().powf(0.1)),
    )
}
