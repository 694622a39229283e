use super::*;
use crate::analytic::power_prox_threshold;
use crate::kernels::{make_kernel, KernelKind};
use crate::prox::objective as obj;

fn half(d: usize) -> Kernel {
    make_kernel(KernelKind::HalfSquaredNorm, &[], d).unwrap()
}

fn quadratic_coupling(f: ObjectiveFn, lambda: f64) -> BpamProblem {
    BpamProblem {
        f: XTerm::Oracle {
            f,
            search: SearchConfig::interval(-6.0, 6.0, 1e-3),
        },
        g: GTerm::Zero,
        a: DMatrix::identity(1, 1),
        phi: half(1),
        sigma: XRegularizer { eta: 1.0 },
        u_update: UUpdate::Exact { omega: half(1) },
        lambda,
    }
}

#[test]
fn quadratic_coupling_contracts() {
    let p = quadratic_coupling(obj::zero(1), 1.0);
    let stop = StopConfig {
        max_iter: 40,
        ..StopConfig::default()
    };
    let tr = bpam_run(&p, &[2.0], &[-1.0], &stop).unwrap();
    let first = &tr.records[0];
    let last = tr.last();
    assert!((first.f_value - 4.5).abs() < 1e-12);
    assert!(last.f_value < 1e-8);
    assert!((last.u[0] - last.x[0]).abs() < 1e-4);
    assert_eq!(tr.first_decrease_violation(1e-9), None);
    assert!(tr.summability_holds(1e-9));
}

#[test]
fn sparse_toy_decreases_and_converges() {
    let toy = sparse_recovery_toy(7);
    let stop = StopConfig::default();
    let tr = bpam_run(&toy.problem, &toy.u0, &toy.x0, &stop).unwrap();
    assert_eq!(tr.stop, StopReason::Converged, "{:?}", tr.last());
    assert_eq!(tr.first_decrease_violation(1e-9), None, "{}", tr.min_relative_slack());
    let last = tr.last();
    assert!(last.rho_x <= 1e-6 && last.rho_u <= 1e-6);
    assert!(tr.summability_holds(1e-9));
    assert!(tr.all_interior(&toy.problem));
    let support: Vec<usize> = (0..20).filter(|&i| last.x[i] != 0.0).collect();
    let truth: Vec<usize> = (0..20).filter(|&i| toy.u_true[i] != 0.0).collect();
    assert_eq!(support, truth);

    let ts = translated_stationarity_check(&toy.problem, &last.u, &last.x, 1e-5).unwrap();
    assert!(ts.passed, "{ts:?}");
    assert!(ts.prox_gap < 1e-5 && ts.v_star_dist < 1e-5);

    let mut off = last.u.clone();
    off[0] += 0.3;
    let ts = translated_stationarity_check(&toy.problem, &off, &last.x, 1e-5).unwrap();
    assert!(!ts.passed);
}

#[test]
fn lambda_above_threshold_is_unbounded() {
    let p = quadratic_coupling(obj::quadratic(-1.0, 1), 3.0);
    let mut p = p;
    p.sigma.eta = 0.0;
    let err = bpam_run(&p, &[0.5], &[0.5], &StopConfig::default()).unwrap_err();
    assert!(matches!(err, Error::SubproblemUnbounded { iteration: 0, .. }), "{err:?}");
}

#[test]
fn residuals() {
    let p = quadratic_coupling(obj::zero(1), 1.0);
    assert_eq!(stationarity_residuals(&p, &[0.7], &[0.7]).unwrap(), (0.0, 0.0));
    let (a, b) = stationarity_residuals(&p, &[0.7], &[-0.2]).unwrap();
    assert!(a > 0.0 && b > 0.0);
    let burg = make_kernel(KernelKind::Burg, &[], 1).unwrap();
    let mut q = p.clone();
    q.phi = burg;
    assert!(matches!(
        stationarity_residuals(&q, &[-2.0], &[-1.0]),
        Err(Error::OutsideInterior { .. })
    ));
}

#[test]
fn palm_steps() {
    let mut p = quadratic_coupling(obj::zero(2), 0.5);
    p.a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    p.phi = half(2);
    p.u_update = UUpdate::Palm { m: 4.0 };
    let u = [1.0, -1.0];
    let x = [0.3, 0.2];
    let au = p.apply_a(&u);
    let r: Vec<f64> = au.iter().zip(&x).map(|(a, b)| a - b).collect();
    let d = p.apply_at(&r);
    let expect: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a - b / 4.0).collect();
    assert_eq!(bpam_palm_u_update(&p, 4.0, &u, &x).unwrap(), expect);

    p.g = GTerm::Box {
        lo: vec![0.0, 0.0],
        hi: vec![0.5, 0.5],
    };
    let got = bpam_palm_u_update(&p, 4.0, &u, &x).unwrap();
    let clamped: Vec<f64> = expect.iter().map(|v| v.clamp(0.0, 0.5)).collect();
    assert_eq!(got, clamped);

    let bm = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, -1.0, 0.5, 0.3, 0.3]);
    p.g = GTerm::LeastSquares {
        mu: 2.0,
        b_mat: bm,
        b: DVector::from_vec(vec![1.0, 0.0, -1.0]),
    };
    let un = bpam_palm_u_update(&p, 4.0, &u, &x).unwrap();
    // first-order condition of the linearized subproblem
    let gg = p.g.grad(&un);
    for i in 0..2 {
        let res = gg[i] + d[i] / p.lambda + 4.0 / p.lambda * (un[i] - u[i]);
        assert!(res.abs() < 1e-12, "{res}");
    }
}

#[test]
fn palm_run_decreases_with_large_m() {
    let mut p = quadratic_coupling(obj::abs(0.2, 2), 0.5);
    p.phi = half(2);
    p.a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
    p.g = GTerm::Box {
        lo: vec![-1.0, -1.0],
        hi: vec![1.0, 1.0],
    };
    p.f = XTerm::Oracle {
        f: obj::abs(0.2, 2),
        search: SearchConfig::new(vec![-3.0, -3.0], vec![3.0, 3.0], 0.05),
    };
    p.u_update = UUpdate::Palm { m: 2.0 };
    let stop = StopConfig {
        max_iter: 15,
        ..StopConfig::default()
    };
    let tr = bpam_run(&p, &[0.9, -0.8], &[0.0, 0.0], &stop).unwrap();
    assert_eq!(tr.first_decrease_violation(1e-9), None, "{}", tr.min_relative_slack());
}

#[test]
fn bpg_matches_partial_bpam() {
    let p = power_toy_1d();
    let eq = bpg_equivalence_demo(&p, &[0.5], 50).unwrap();
    assert_eq!(eq.bpam.len(), 51);
    assert!(eq.max_gap < 1e-8, "{}", eq.max_gap);
    let moved = (eq.bpam[50][0] - 0.5).abs();
    assert!(moved > 0.1);
}

#[test]
fn bpg_reports_multivalued_step() {
    let p = power_toy_1d();
    let spec = crate::analytic::PowerProxSpec::new(0.5, 2, p.lambda).unwrap();
    let yth = power_prox_threshold(&spec).unwrap();
    let u0 = p.phi.grad(&[yth]);
    let err = bpg_equivalence_demo(&p, &u0, 5).unwrap_err();
    assert!(matches!(err, Error::MultivaluedAtIteration { iteration: 0, .. }), "{err:?}");
}

#[test]
fn bpg_needs_partial_identity_problem() {
    let toy = sparse_recovery_toy(1);
    assert!(matches!(
        bpg_equivalence_demo(&toy.problem, &toy.u0, 3),
        Err(Error::Unsupported(_))
    ));
}
