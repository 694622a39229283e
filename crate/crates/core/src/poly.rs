//! Real roots of quadratics, cubics and quartics in closed form.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const DISC_TOL: f64 = 1e-12;

fn horner(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn newton_polish(coeffs: &[f64], mut x: f64) -> f64 {
    for _ in 0..5 {
        let (p, dp) = horner(coeffs, x);
        if p == 0.0 || dp == 0.0 || !dp.is_finite() {
            break;
        }
        let nx = x - p / dp;
        if !nx.is_finite() || horner(coeffs, nx).0.abs() >= p.abs() {
            break;
        }
        x = nx;
    }
    x
}

/// Real roots of `a u^2 + b u + c`, with multiplicity.
fn quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    let scale = b * b + (4.0 * a * c).abs();
    let disc = if disc < 0.0 && disc >= -DISC_TOL * scale {
        0.0
    } else {
        disc
    };
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0, 0.0];
    }
    vec![q / a, c / q]
}

/// Real roots of the monic cubic `u^3 + a u^2 + b u + c`.
fn cubic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let h = q / 2.0;
    let t = p / 3.0;
    let disc = h * h + t * t * t;
    let scale = h * h + (t * t * t).abs();
    let roots: Vec<f64> = if disc.abs() <= DISC_TOL * scale || scale == 0.0 {
        if p.abs() <= DISC_TOL * (1.0 + a.abs()) && q.abs() <= DISC_TOL * (1.0 + a.abs()) {
            vec![0.0, 0.0, 0.0]
        } else {
            let simple = 3.0 * q / p;
            let double = -1.5 * q / p;
            vec![simple, double, double]
        }
    } else if disc < 0.0 {
        let r = 2.0 * (-t).sqrt();
        let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| r * (theta - 2.0 * PI * k as f64 / 3.0).cos())
            .collect()
    } else {
        let s = disc.sqrt();
        let big = (-h - h.signum() * s).cbrt();
        let big = if h == 0.0 { s.cbrt() } else { big };
        if big == 0.0 {
            vec![0.0]
        } else {
            vec![big - t / big]
        }
    };
    roots.into_iter().map(|r| r - shift).collect()
}

/// Real roots of the monic quartic `u^4 + a u^3 + b u^2 + c u + d` (Ferrari).
fn quartic(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = a2 * a / 8.0 - a * b / 2.0 + c;
    let r = -3.0 * a2 * a2 / 256.0 + a2 * b / 16.0 - a * c / 4.0 + d;
    let scale = 1.0 + p.abs() + r.abs().sqrt();
    let mut roots = Vec::new();
    if q.abs() <= DISC_TOL * scale * scale.sqrt() {
        for z in quadratic(1.0, p, r) {
            let z = if z < 0.0 && z > -DISC_TOL * scale { 0.0 } else { z };
            if z >= 0.0 {
                let s = z.sqrt();
                roots.push(s);
                roots.push(-s);
            }
        }
    } else {
        // Resolvent 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0 has a positive root.
        let res = cubic(p, (p * p) / 4.0 - r, -(q * q) / 8.0);
        let res_coeffs = [8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q];
        let m = res
            .into_iter()
            .map(|m| newton_polish(&res_coeffs, m))
            .fold(f64::NEG_INFINITY, f64::max);
        if m > 0.0 {
            let s = (2.0 * m).sqrt();
            let base = p / 2.0 + m;
            let off = q / (2.0 * s);
            roots.extend(quadratic(1.0, s, base - off));
            roots.extend(quadratic(1.0, -s, base + off));
        }
    }
    roots.into_iter().map(|t| t - shift).collect()
}

/// All real roots (with multiplicity) of the polynomial with `coeffs`,
/// highest degree first, each polished by at most 5 Newton steps; ascending.
pub fn poly_real_roots(coeffs: &[f64], degree: usize) -> Result<Vec<f64>> {
    if !(2..=4).contains(&degree) {
        return Err(Error::UnsupportedDegree(degree));
    }
    if coeffs.len() != degree + 1 {
        return Err(Error::InvalidParameter(format!(
            "degree {degree} needs {} coefficients, got {}",
            degree + 1,
            coeffs.len()
        )));
    }
    let lead = coeffs[0];
    if lead == 0.0 || !lead.is_finite() {
        return Err(Error::InvalidParameter("leading coefficient must be nonzero".into()));
    }
    let n: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let raw = match degree {
        2 => quadratic(1.0, n[1], n[2]),
        3 => cubic(n[1], n[2], n[3]),
        _ => quartic(n[1], n[2], n[3], n[4]),
    };
    let mut roots: Vec<f64> = raw
        .into_iter()
        .filter(|r| r.is_finite())
        .map(|r| newton_polish(coeffs, r))
        .collect();
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn perfect_square() {
        assert_eq!(poly_real_roots(&[1.0, -2.0, 1.0], 2).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn cube_root_of_unity() {
        assert_eq!(poly_real_roots(&[1.0, 0.0, 0.0, -1.0], 3).unwrap(), vec![1.0]);
    }

    #[test]
    fn biquadratic() {
        let r = poly_real_roots(&[1.0, 0.0, -5.0, 0.0, 4.0], 4).unwrap();
        assert!(close(&r, &[-2.0, -1.0, 1.0, 2.0], 1e-14), "{r:?}");
    }

    #[test]
    fn unsupported_degree_and_zero_lead() {
        assert_eq!(poly_real_roots(&[1.0, 0.0], 1), Err(Error::UnsupportedDegree(1)));
        assert_eq!(poly_real_roots(&[1.0; 6], 5), Err(Error::UnsupportedDegree(5)));
        assert!(poly_real_roots(&[0.0, 1.0, 1.0], 2).is_err());
    }

    #[test]
    fn cubic_cases() {
        // three distinct
        let r = poly_real_roots(&[1.0, -6.0, 11.0, -6.0], 3).unwrap();
        assert!(close(&r, &[1.0, 2.0, 3.0], 1e-12), "{r:?}");
        // double root
        let r = poly_real_roots(&[1.0, -4.0, 5.0, -2.0], 3).unwrap();
        assert!(close(&r, &[1.0, 1.0, 2.0], 1e-7), "{r:?}");
        // triple root
        let r = poly_real_roots(&[1.0, -3.0, 3.0, -1.0], 3).unwrap();
        assert!(close(&r, &[1.0, 1.0, 1.0], 1e-5), "{r:?}");
        // power-prox shape 1 + u^3 - c u
        let r = poly_real_roots(&[1.0, 0.0, -3.0, 1.0], 3).unwrap();
        assert_eq!(r.len(), 3);
        for u in r {
            assert!((u * u * u - 3.0 * u + 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn quartic_general() {
        let r = poly_real_roots(&[2.0, -2.0 * 10.0, 2.0 * 35.0, -2.0 * 50.0, 2.0 * 24.0], 4).unwrap();
        assert!(close(&r, &[1.0, 2.0, 3.0, 4.0], 1e-10), "{r:?}");
        // u^4 - 3u + 1 has two positive roots
        let r = poly_real_roots(&[1.0, 0.0, 0.0, -3.0, 1.0], 4).unwrap();
        assert_eq!(r.len(), 2);
        for u in &r {
            assert!((u.powi(4) - 3.0 * u + 1.0).abs() < 1e-13);
        }
        // no real roots
        assert!(poly_real_roots(&[1.0, 0.0, 0.0, 0.0, 1.0], 4).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn recovers_planted_roots(
            roots in prop::collection::vec(-5.0f64..5.0, 2..=4),
            lead in prop_oneof![0.5f64..3.0, -3.0f64..-0.5],
        ) {
            let mut sorted = roots.clone();
            sorted.sort_by(f64::total_cmp);
            prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 1e-2));
            let mut coeffs = vec![lead];
            for r in &roots {
                let mut next = vec![0.0; coeffs.len() + 1];
                for (i, c) in coeffs.iter().enumerate() {
                    next[i] += c;
                    next[i + 1] -= c * r;
                }
                coeffs = next;
            }
            let found = poly_real_roots(&coeffs, roots.len()).unwrap();
            prop_assert!(close(&found, &sorted, 1e-6), "{found:?} vs {sorted:?}");
        }

        #[test]
        fn every_root_is_a_root(c in prop::collection::vec(-10.0f64..10.0, 5)) {
            prop_assume!(c[0].abs() > 0.1);
            for deg in 2..=4 {
                let coeffs = &c[..=deg];
                let scale: f64 = coeffs.iter().map(|v| v.abs()).sum();
                for u in poly_real_roots(coeffs, deg).unwrap() {
                    let (p, _) = horner(coeffs, u);
                    prop_assert!(p.abs() <= 1e-6 * scale * (1.0 + u.abs()).powi(deg as i32));
                }
            }
        }
    }
}
