use bregprox::prox::objective as obj;
use bregprox::prox::{tilt_identity_check, tilt_transform_point};
use bregprox::{
    bregman, bregman_dual_identity_check, kernel_roundtrip_check, left_envelope, make_kernel,
    power_prox, power_prox_threshold, right_envelope, Kernel, KernelKind, PowerProxSpec, ProxQuery,
    SearchConfig,
};
use proptest::prelude::*;

fn kernel(i: usize, dim: usize) -> Kernel {
    match KernelKind::ALL[i % KernelKind::ALL.len()] {
        KernelKind::Power => make_kernel(KernelKind::Power, &[1.5], dim).unwrap(),
        kind => make_kernel(kind, &[], dim).unwrap(),
    }
}

/// Maps `t ∈ (0, 1)` into the interior of the kernel's scalar domain.
fn interior(k: &Kernel, t: f64) -> f64 {
    let (lo, hi) = k.interior_bounds()[0];
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => lo + (hi - lo) * (0.02 + 0.96 * t),
        (true, false) => lo + 0.05 + 5.0 * t,
        (false, true) => hi - 0.05 - 5.0 * t,
        (false, false) => -4.0 + 8.0 * t,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bregman_is_nonnegative_and_dual(i in 0usize..7, a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64, d in 0.0..1.0f64) {
        let k = kernel(i, 2);
        let x = vec![interior(&k, a), interior(&k, b)];
        let y = vec![interior(&k, c), interior(&k, d)];
        prop_assert!(bregman(&k, &x, &y) >= 0.0);
        prop_assert_eq!(bregman(&k, &x, &x), 0.0);
        prop_assert!(bregman_dual_identity_check(&k, &x, &y, 1e-8).unwrap());
        prop_assert!(kernel_roundtrip_check(&k, &[x], 1e-9).unwrap().passed);
    }

    #[test]
    fn power_prox_is_zero_below_threshold(p in 0.2..0.9f64, alpha in 2u32..=4, lambda in 0.1..2.0f64, s in 0.0..0.98f64) {
        let spec = PowerProxSpec::new(p, alpha, lambda).unwrap();
        let th = power_prox_threshold(&spec).unwrap();
        let r = power_prox(&spec, s * th).unwrap();
        prop_assert_eq!(r.minimizers.clone(), vec![vec![0.0]]);
        prop_assert!(!r.multivalued);
        let r = power_prox(&spec, -th * (1.02 + s)).unwrap();
        prop_assert!(r.minimizers.iter().all(|m| m[0] < 0.0));
    }

    #[test]
    fn envelope_lies_below_f(y in -3.0..3.0f64, lambda in 0.2..2.0f64) {
        let f = obj::abs(1.0, 1);
        let k = make_kernel(KernelKind::HalfSquaredNorm, &[], 1).unwrap();
        let r = left_envelope(&ProxQuery::left(f.clone(), k, lambda, vec![y]), &SearchConfig::interval(-5.0, 5.0, 1e-3)).unwrap();
        prop_assert!(r.env_value <= f.value(&[y]) + 1e-12);
        // soft thresholding
        let expect = y.signum() * (y.abs() - lambda).max(0.0);
        prop_assert!((r.minimizers[0][0] - expect).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tilt_identity_holds(y in 0.3..2.5f64, v in -0.5..0.5f64) {
        let k = make_kernel(KernelKind::BoltzmannShannon, &[], 1).unwrap();
        let f = obj::indicator_box(vec![0.5], vec![1.5]);
        let search = SearchConfig::interval(0.4, 1.6, 1e-3);
        prop_assert!(tilt_identity_check(&f, &k, &[y], &[v], 0.7, &search, 1e-6).unwrap());
        let z = tilt_transform_point(&k, &[y], &[v], 0.7).unwrap();
        prop_assert!((z[0] - y * (0.7 * v).exp()).abs() < 1e-12);
    }

    #[test]
    fn right_prox_of_convex_term_matches_translation(y in -2.0..2.0f64) {
        let k = make_kernel(KernelKind::Exponential, &[], 1).unwrap();
        let q = ProxQuery::right(obj::quadratic(1.0, 1), k, 0.5, vec![y]);
        let r = right_envelope(&q, &SearchConfig::interval(-4.0, 4.0, 1e-3)).unwrap();
        prop_assert!(!r.multivalued);
    }
}

#[test]
fn right_prox_rejects_restricted_domain() {
    let k = make_kernel(KernelKind::Burg, &[], 1).unwrap();
    let q = ProxQuery::right(obj::abs(1.0, 1), k, 1.0, vec![1.0]);
    assert!(matches!(
        right_envelope(&q, &SearchConfig::interval(0.1, 3.0, 1e-3)),
        Err(bregprox::Error::RightProxRequiresFullDomain(_))
    ));
}
