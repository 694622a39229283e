//! Small numerical helpers shared by the other modules.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Neumaier-compensated summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for t in terms {
        if !t.is_finite() {
            // +inf dominates; NaN must never leak out of extended-real sums.
            return if t == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

pub fn scale(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|a| alpha * a).collect()
}

/// SplitMix64 step, used to derive independent seeds from one master seed.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a label (e.g. an experiment name).
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = splitmix64(master);
    for b in label.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    h
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Golden-section search for a minimizer of `f` on `[a, b]`.
///
/// Handles `+inf` plateaus by shrinking toward the midpoint when both probes
/// are infinite. Returns the best point seen (endpoints included) and its value.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut best = (lo, f(lo));
    let fh = f(hi);
    if fh < best.1 {
        best = (hi, fh);
    }
    if hi - lo <= 0.0 {
        return best;
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < best.1 {
            best = (x1, f1);
        }
        if f2 < best.1 {
            best = (x2, f2);
        }
        if f1.is_infinite() && f2.is_infinite() {
            let mid = 0.5 * (lo + hi);
            let half = 0.25 * (hi - lo);
            lo = mid - half;
            hi = mid + half;
            x1 = hi - INV_PHI * (hi - lo);
            x2 = lo + INV_PHI * (hi - lo);
            f1 = f(x1);
            f2 = f(x2);
            continue;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 < best.1 {
        best = (x1, f1);
    }
    if f2 < best.1 {
        best = (x2, f2);
    }
    best
}

/// Solves `g(x) = target` for a strictly increasing continuous `g` on the open
/// interval `(lo, hi)` (bounds may be infinite). Bracket expansion then bisection.
pub fn invert_increasing<F: Fn(f64) -> f64>(g: F, target: f64, lo: f64, hi: f64) -> f64 {
    let inside = |x: f64| x > lo && x < hi;
    let mut a;
    let mut b;
    // Initial bracket around a finite interior point.
    let start = if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if lo.is_finite() {
        lo + 1.0
    } else if hi.is_finite() {
        hi - 1.0
    } else {
        0.0
    };
    if g(start) >= target {
        b = start;
        a = start;
        let mut step = 1.0;
        loop {
            let cand = if lo.is_finite() {
                // approach lo geometrically
                lo + 0.5 * (a - lo)
            } else {
                a - step
            };
            a = cand;
            step *= 2.0;
            if g(a) <= target || !inside(a) || step > 1e300 {
                break;
            }
            if lo.is_finite() && a - lo < 1e-300 {
                break;
            }
        }
    } else {
        a = start;
        b = start;
        let mut step = 1.0;
        loop {
            let cand = if hi.is_finite() {
                hi - 0.5 * (hi - b)
            } else {
                b + step
            };
            b = cand;
            step *= 2.0;
            if g(b) >= target || !inside(b) || step > 1e300 {
                break;
            }
            if hi.is_finite() && hi - b < 1e-300 {
                break;
            }
        }
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g(m) < target {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Uniformly spaced points `lo..=hi` (a single point when `n <= 1` or `lo == hi`).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || lo == hi {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
            }
        })
        .collect()
}

/// Central finite-difference gradient with per-coordinate step `h * max(1, |y_i|)`.
pub fn central_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, y: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut p = y.to_vec();
    for i in 0..y.len() {
        let hi = h * y[i].abs().max(1.0);
        p[i] = y[i] + hi;
        let fp = f(&p);
        p[i] = y[i] - hi;
        let fm = f(&p);
        p[i] = y[i];
        out.push((fp - fm) / (2.0 * hi));
    }
    out
}
