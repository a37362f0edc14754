use proptest::prelude::*;

use trapdyn::calib::{j22_from_anchors, j22_local, CalibrationPreset};
use trapdyn::localdyn::{
    comparative_statics, eigen2, jacobian, long_run_by_resolve, saddle_arm_slope, Classification, Eigenvalues,
    Jacobian2,
};
use trapdyn::prefs::{calibrate_delta, lambda_big, lambda_prime, omega};
use trapdyn::presets::{figure1, figure2, figure3, ActivistBase};
use trapdyn::steady::{fisher_residual, solve, trap_and_target, ScanOptions};
use trapdyn::{DebtTargeting, Error, FiscalRegime, Model, ModelParams, StateVector, TaylorRule};

fn baseline() -> ModelParams {
    let delta = calibrate_delta(1.0, 0.06, 0.6).unwrap();
    ModelParams::new(0.04, 0.012366, 0.0047, 0.6, delta).unwrap()
}

#[test]
fn ces_primitives_match_closed_forms() {
    let p = baseline();
    let k: f64 = p.delta / (1.0 - p.delta);
    for r in [0.001f64, 0.01, 0.06, 0.2] {
        let om = k.powf(p.eps) * r.powf(p.eps);
        let lam = 1.0 + k.powf(-p.eps) * r.powf(1.0 - p.eps);
        assert!((omega(r, &p).unwrap() - om).abs() <= 1e-14 * om);
        assert!((lambda_big(r, &p).unwrap() - lam).abs() <= 1e-14 * lam);
        let h = 1e-6 * r;
        let fd = (lambda_big(r + h, &p).unwrap() - lambda_big(r - h, &p).unwrap()) / (2.0 * h);
        let lp = lambda_prime(r, &p).unwrap();
        assert!((lp - fd).abs() <= 1e-7 * lp, "r = {r}: {lp} vs {fd}");
    }
    // Velocity target reproduced at R*.
    assert!((omega(0.06, &p).unwrap() - 1.0).abs() < 1e-14);
    assert!(matches!(omega(0.0, &p), Err(Error::Domain(_))));
}

#[test]
fn lambda_prime_at_calibration_point() {
    // Own evaluation: k = R*^ε / velocity.
    let p = baseline();
    let k = 0.06f64.powf(0.6);
    let expected = 0.4 * k * 0.001f64.powf(-0.6);
    let got = lambda_prime(0.001, &p).unwrap();
    assert!((got - expected).abs() < 1e-12 * expected);
    assert!((got - 4.6660645).abs() < 1e-6, "{got}");
}

#[test]
fn exponential_rule() {
    let rule = TaylorRule::new(0.02, 0.06, 1.5).unwrap();
    assert!((rule.psi(0.02) - 0.06).abs() < 1e-16);
    assert!((rule.psi_prime(0.02) - 1.5).abs() < 1e-15);
    for pi in [-0.05, 0.0, 0.03] {
        let h = 1e-7;
        let fd = (rule.psi(pi + h) - rule.psi(pi - h)) / (2.0 * h);
        assert!((rule.psi_prime(pi) - fd).abs() < 1e-7 * fd);
        assert!(rule.psi(pi) > 0.0);
    }
}

#[test]
fn anchored_rule_places_target_on_fisher_locus() {
    let p = baseline();
    for a in [0.3, 0.6, 1.5] {
        let rule = TaylorRule::anchored(&p, 0.06, 1.5, a).unwrap();
        let r = fisher_residual(rule.pi_star, a, &p, &rule).unwrap();
        assert!(r.abs() < 1e-14, "a = {a}: {r}");
    }
}

#[test]
fn debt_targeting_has_trap_and_target() {
    let m = figure1().unwrap();
    let states = solve(&m, &ScanOptions::default()).unwrap();
    assert_eq!(states.len(), 2);
    assert!(m.rule.psi_prime(states[0].pi) < 1.0);
    assert!(m.rule.psi_prime(states[1].pi) > 1.0);
    for s in &states {
        assert!(s.residual < 1e-12, "{s:?}");
    }
}

#[test]
fn activist_steady_states_are_fixed_points() {
    for m in [figure2().unwrap(), figure3().unwrap()] {
        let (trap, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
        assert!(trap.pi < target.pi);
        assert!((target.a - 0.6).abs() < 1e-9);
        for s in [&trap, &target] {
            let (da, dp) = m.vector_field(s.state());
            assert!(da.abs() < 1e-12 && dp.abs() < 1e-12, "({da}, {dp}) at {s:?}");
        }
    }
}

#[test]
fn locus_branch_jump_is_not_a_steady_state() {
    // The affine surplus branch crosses the threshold inside the scan; the
    // Fisher residual flips sign there without a root.
    let base = ActivistBase {
        mu: 0.13722588107735342,
        eps: 0.3415020819333446,
        slope_at_target: 1.386389242796871,
        theta0: -1.8296580516659526,
        ..ActivistBase::default()
    };
    let m = base.model(0.5023455614192504, 79.99453918969733).unwrap();
    match solve(&m, &ScanOptions::default()) {
        Ok(states) => {
            for s in states {
                assert!(s.residual < 1e-9, "spurious root {s:?}");
            }
        }
        Err(e) => assert!(matches!(e, Error::NoLowSteadyState { .. }), "{e}"),
    }
}

fn fd_jacobian(m: &Model, x: StateVector) -> [[f64; 2]; 2] {
    let mut j = [[0.0; 2]; 2];
    let steps = [1e-6 * x.a.abs().max(1.0), 1e-7];
    for (col, h) in steps.into_iter().enumerate() {
        let shift = |s: f64| {
            if col == 0 {
                StateVector::new(x.a + s, x.pi)
            } else {
                StateVector::new(x.a, x.pi + s)
            }
        };
        let (fa_p, fp_p) = m.vector_field(shift(h));
        let (fa_m, fp_m) = m.vector_field(shift(-h));
        j[0][col] = (fa_p - fa_m) / (2.0 * h);
        j[1][col] = (fp_p - fp_m) / (2.0 * h);
    }
    j
}

#[test]
fn analytic_jacobians_match_finite_differences() {
    for m in [figure1().unwrap(), figure2().unwrap(), figure3().unwrap()] {
        let (trap, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
        for ss in [&trap, &target] {
            let j = jacobian(&m, ss).unwrap();
            let fd = fd_jacobian(&m, ss.state());
            let scale = [j.j11, j.j12, j.j21, j.j22].iter().fold(0.0f64, |s, x| s.max(x.abs()));
            for (got, want) in [(j.j11, fd[0][0]), (j.j12, fd[0][1]), (j.j21, fd[1][0]), (j.j22, fd[1][1])] {
                assert!(
                    (got - want).abs() <= 1e-5 * want.abs().max(1e-3 * scale),
                    "{got} vs {want} at {ss:?}"
                );
            }
        }
    }
}

#[test]
fn eigen_recovers_constructed_spectrum() {
    // J = P diag(l1, l2) P^-1 with known P.
    let cases = [(-2.0, 0.3), (0.1, 0.7), (-1.5, -0.2), (-0.4, 0.4)];
    let p = [[1.0, 0.3], [0.2, -1.1]];
    let det_p = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    let inv = [[p[1][1] / det_p, -p[0][1] / det_p], [-p[1][0] / det_p, p[0][0] / det_p]];
    for (l1, l2) in cases {
        let d = [[l1, 0.0], [0.0, l2]];
        let mut pd = [[0.0; 2]; 2];
        let mut j = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                pd[r][c] = (0..2).map(|k| p[r][k] * d[k][c]).sum();
            }
        }
        for r in 0..2 {
            for c in 0..2 {
                j[r][c] = (0..2).map(|k| pd[r][k] * inv[k][c]).sum();
            }
        }
        let e = eigen2(&Jacobian2::new(j[0][0], j[0][1], j[1][0], j[1][1]));
        let (lo, hi) = e.real_pair().unwrap();
        assert!((lo - l1.min(l2)).abs() < 1e-13 && (hi - l1.max(l2)).abs() < 1e-13);
        let expected = if l1 * l2 < 0.0 {
            Classification::Saddle
        } else if l1 < 0.0 {
            Classification::StableNode
        } else {
            Classification::UnstableNode
        };
        assert_eq!(e.classification, expected);
        let vecs = e.eigenvectors.unwrap();
        for (lam, v) in [(lo, vecs[0]), (hi, vecs[1])] {
            let jv = Jacobian2::new(j[0][0], j[0][1], j[1][0], j[1][1]).apply(v);
            assert!((jv[0] - lam * v[0]).abs() < 1e-12 && (jv[1] - lam * v[1]).abs() < 1e-12);
        }
    }
}

#[test]
fn regime_one_arm_is_the_phi_eigendirection() {
    let m = figure1().unwrap();
    let (_, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let e = eigen2(&jacobian(&m, &target).unwrap());
    let (lo, _) = e.real_pair().unwrap();
    assert_eq!(lo, -2.0);
    let v = e.eigenvectors.unwrap()[0];
    let slope = saddle_arm_slope(&m, &target).unwrap();
    assert!((slope - v[1] / v[0]).abs() < 1e-12 * slope.abs());
}

#[test]
fn comparative_statics_against_resolve() {
    let m = figure1().unwrap();
    let (_, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let ratio = 0.6 * omega(target.nominal_rate, &m.params).unwrap();
    let cs = comparative_statics(&m, &target, ratio).unwrap();
    let fd = long_run_by_resolve(&m, 1e-4, &ScanOptions::default()).unwrap();
    assert!((cs.long_run - fd).abs() < 1e-4 * fd);
    assert!(0.0 < cs.impact && cs.impact < cs.long_run);
    assert!(cs.implicit_residual.abs() < 1e-15);
}

#[test]
fn comparative_statics_vanish_without_births() {
    let p = ModelParams::new(0.04, 0.02, -0.02, 0.6, calibrate_delta(1.0, 0.06, 0.6).unwrap()).unwrap();
    assert_eq!(p.beta, 0.0);
    let rule = TaylorRule::anchored(&p, 0.06, 1.5, 0.6).unwrap();
    let m = Model::new(p, rule, FiscalRegime::DebtTargeting(DebtTargeting { a_star: 0.6, phi: 2.0 })).unwrap();
    let (_, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let cs = comparative_statics(&m, &target, 0.6).unwrap();
    assert_eq!(cs.long_run, 0.0);
    assert_eq!(cs.impact, 0.0);
}

#[test]
fn global_and_local_trap_coefficient_agree() {
    let m = figure1().unwrap();
    let (trap, _) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let global = jacobian(&m, &trap).unwrap().j22;
    let psi = m.rule.psi(trap.pi);
    let slope = m.rule.psi_prime(trap.pi);
    let local = j22_from_anchors(&m.params, psi, slope, trap.a).unwrap();
    assert!((global - local).abs() < 1e-10 * global.abs(), "{global} vs {local}");

    let preset = CalibrationPreset {
        psi_trap: psi,
        psi_prime_trap: slope,
        ..CalibrationPreset::default()
    };
    let via_k = j22_local(&preset, 0.6).unwrap();
    assert!((global - via_k).abs() < 1e-10 * global.abs(), "{global} vs {via_k}");
}

#[test]
fn zero_birth_rate_leaves_first_term() {
    let preset = CalibrationPreset {
        mu: 0.01,
        n: -0.01,
        ..CalibrationPreset::default()
    };
    let p = preset.params(0.6).unwrap();
    let first = (0.1 - 1.0) * lambda_big(0.001, &p).unwrap() / (0.1 * lambda_prime(0.001, &p).unwrap());
    let got = j22_local(&preset, 0.6).unwrap();
    assert!((got - first).abs() < 1e-12 * first.abs());
}

proptest! {
    #[test]
    fn eigen_invariants(j11 in -5.0f64..5.0, j12 in -5.0f64..5.0, j21 in -5.0f64..5.0, j22 in -5.0f64..5.0) {
        let j = Jacobian2::new(j11, j12, j21, j22);
        let e = eigen2(&j);
        let (tr, det) = (j.trace(), j.det());
        match e.eigenvalues {
            Eigenvalues::Real { low, high } => {
                prop_assert!(low <= high);
                prop_assert!((low + high - tr).abs() <= 1e-10 * (1.0 + tr.abs()));
                prop_assert!((low * high - det).abs() <= 1e-9 * (1.0 + det.abs() + tr * tr));
            }
            Eigenvalues::Complex { re, im } => {
                prop_assert!((2.0 * re - tr).abs() <= 1e-12 * (1.0 + tr.abs()));
                prop_assert!((re * re + im * im - det).abs() <= 1e-9 * (1.0 + det.abs()));
            }
        }
        if det < 0.0 {
            prop_assert_eq!(e.classification, Classification::Saddle);
        }
        if det > 0.0 && e.discriminant.abs() > 1e-12 {
            let stable = tr < 0.0;
            let expected = match (e.discriminant > 0.0, stable) {
                (true, true) => Classification::StableNode,
                (true, false) => Classification::UnstableNode,
                (false, true) => Classification::StableSpiral,
                (false, false) => Classification::UnstableSpiral,
            };
            prop_assert_eq!(e.classification, expected);
        }
    }

    #[test]
    fn anchored_rule_is_fisher_root(a in 0.2f64..3.0, slope in 1.05f64..3.0, eps in 0.2f64..0.9) {
        let delta = calibrate_delta(1.0, 0.06, eps).unwrap();
        let p = ModelParams::new(0.04, 0.012366, 0.0047, eps, delta).unwrap();
        let rule = TaylorRule::anchored(&p, 0.06, slope, a).unwrap();
        prop_assert!(fisher_residual(rule.pi_star, a, &p, &rule).unwrap().abs() < 1e-13);
        prop_assert!((rule.psi(rule.pi_star) - 0.06).abs() < 1e-15);
    }
}
