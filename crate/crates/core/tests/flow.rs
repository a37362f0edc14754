use trapdyn::flow::{
    basin_grid, heteroclinic, integrate, isoclines, manifold, phase_portrait, shoot_heteroclinic, solvency_report,
    BasinLabel, BasinOptions, Branch, ConnectionMethod, Direction, HeteroclinicOptions, IntegrateOptions,
    IsoclineOptions, ManifoldOptions, PhaseBox, PhasePortrait, PiDotLocus, PortraitOptions, StableArm, StopRule,
    TerminalStatus, Which,
};
use trapdyn::localdyn::{eigen2, jacobian, saddle_arm_slope, unstable_branch_slope};
use trapdyn::presets::{figure1, figure2, figure3};
use trapdyn::steady::{trap_and_target, ScanOptions};
use trapdyn::StateVector;

fn sampled(dt: f64) -> IntegrateOptions {
    IntegrateOptions {
        sample_interval: Some(dt),
        ..IntegrateOptions::default()
    }
}

#[test]
fn stable_steady_state_persists() {
    let m = figure1().unwrap();
    let (trap, _) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let tr = integrate(&m, trap.state(), 500.0, Direction::Forward, &sampled(10.0)).unwrap();
    for i in 0..tr.len() {
        assert!(tr.state(i).dist(&trap.state()) < 1e-12);
    }
}

#[test]
fn debt_path_is_exponential() {
    let m = figure1().unwrap();
    let x0 = StateVector::new(1.1, -0.01);
    let tr = integrate(&m, x0, 8.0, Direction::Forward, &sampled(0.25)).unwrap();
    assert_eq!(tr.len(), 33);
    for i in 0..tr.len() {
        let exact = 0.6 + 0.5 * (-2.0 * tr.t[i]).exp();
        assert!((tr.a[i] - exact).abs() < 1e-9, "t = {}: {} vs {exact}", tr.t[i], tr.a[i]);
    }
}

#[test]
fn portfolio_identity_holds_along_paths() {
    for (m, x0) in [(figure1().unwrap(), StateVector::new(0.7, 0.0)), (figure2().unwrap(), StateVector::new(0.59, 0.01))] {
        let tr = integrate(&m, x0, 30.0, Direction::Forward, &sampled(0.5)).unwrap();
        for i in 0..tr.len() {
            assert!((tr.m[i] + tr.b[i] - tr.a[i]).abs() <= 1e-12 * tr.a[i].abs().max(1.0));
            assert!(tr.m[i] > 0.0);
            assert!((tr.nominal_rate[i] - m.rule.psi(tr.pi[i])).abs() < 1e-15);
            assert!((tr.s[i] - m.surplus(tr.state(i))).abs() < 1e-12);
        }
    }
}

#[test]
fn isoclines_are_zero_sets() {
    for m in [figure1().unwrap(), figure2().unwrap()] {
        let iso = isoclines(&m, (-0.02, 0.03), &IsoclineOptions::default()).unwrap();
        let PiDotLocus::Curve { line } = &iso.pi_dot_zero else {
            panic!("degenerate locus with positive birth rate");
        };
        assert!(line.len() > 100);
        for i in 0..line.len() {
            let (_, pd) = m.vector_field(StateVector::new(line.a[i], line.pi[i]));
            assert!(pd.abs() < 1e-10, "pi-dot {pd} at ({}, {})", line.a[i], line.pi[i]);
        }
        for piece in &iso.a_dot_zero {
            for i in 0..piece.len() {
                let (ad, _) = m.vector_field(StateVector::new(piece.a[i], piece.pi[i]));
                assert!(ad.abs() < 1e-10 * piece.a[i].abs().max(1.0), "a-dot {ad}");
            }
        }
    }
}

#[test]
fn arm_leaves_along_the_closed_form_slope() {
    let m = figure1().unwrap();
    let (_, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let arm = StableArm::compute(&m, &target, &ManifoldOptions::default()).unwrap();
    let slope = saddle_arm_slope(&m, &target).unwrap();
    for da in [1e-3, -1e-3] {
        let pi = arm.pi_at(target.a + da).unwrap();
        let chord = (pi - target.pi) / da;
        assert!((chord - slope).abs() < 1e-3 * slope.abs(), "{chord} vs {slope}");
    }
}

#[test]
fn saddle_path_converges_to_target() {
    let m = figure1().unwrap();
    let (_, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let arm = StableArm::compute(&m, &target, &ManifoldOptions::default()).unwrap();
    let path = arm.saddle_path(&m, 0.9, 400.0, 0.1).unwrap();
    assert!((path.a[0] - 0.9).abs() < 1e-9);
    assert!(path.last().unwrap().dist(&target.state()) < 1e-12);
    let report = solvency_report(&path, &m);
    assert!(report.discounted_terminal.abs() < 1e-3);
    assert!(report.ibc_residual.abs() < 1e-2 * 0.9);
}

#[test]
fn node_manifolds_and_spiral_refusal() {
    let m2 = figure2().unwrap();
    let (trap, _) = trap_and_target(&m2, &ScanOptions::default()).unwrap();
    let eig = eigen2(&jacobian(&m2, &trap).unwrap());
    let slope = unstable_branch_slope(&m2, &trap, &eig).unwrap();
    let un = manifold(&m2, &trap, Which::Unstable, Branch::Plus, &ManifoldOptions::default()).unwrap();
    assert!((un.eigenvector[1] / un.eigenvector[0] - slope).abs() < 1e-9 * slope.abs());
    assert!(un.polyline.len() > 2);
    assert_eq!((un.polyline.a[0], un.polyline.pi[0]), (trap.a, trap.pi));

    let m3 = figure3().unwrap();
    let (trap3, _) = trap_and_target(&m3, &ScanOptions::default()).unwrap();
    assert!(manifold(&m3, &trap3, Which::Unstable, Branch::Plus, &ManifoldOptions::default()).is_err());
}

#[test]
fn backward_connection_and_shooting_refusal() {
    let m = figure2().unwrap();
    let (trap, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let opts = HeteroclinicOptions::default();
    let back = heteroclinic(&m, &trap, &target, &opts).unwrap();
    assert_eq!(back.method, ConnectionMethod::BackwardStableArm);
    assert!(back.trap_residual < 1e-4);
    let tr = &back.trajectory;
    assert!(tr.t.windows(2).all(|w| w[1] > w[0]));
    assert!(tr.last().unwrap().dist(&target.state()) < 1e-9);
    // The target repels at 1.26 while its arm attracts at 0.076; a forward
    // shot cannot hold the arm, and must say so rather than return a miss.
    match shoot_heteroclinic(&m, &trap, &target, &opts) {
        Err(trapdyn::Error::NoConnection(_)) => {}
        other => panic!("{:?}", other.map(|h| h.target_residual)),
    }
}

#[test]
fn spiral_trap_winds() {
    let m = figure3().unwrap();
    let (trap, _) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let opts = IntegrateOptions {
        sample_interval: Some(0.01),
        bounds: Some(PhaseBox {
            a_min: trap.a - 0.01,
            a_max: trap.a + 0.01,
            pi_min: trap.pi - 0.01,
            pi_max: trap.pi + 0.01,
        }),
        ..IntegrateOptions::default()
    };
    let tr = integrate(&m, StateVector::new(trap.a + 1e-4, trap.pi), 100.0, Direction::Forward, &opts).unwrap();
    assert_eq!(tr.status, TerminalStatus::Escaped);
    assert!(tr.winding_angle(trap.state()).abs() > 2.0 * std::f64::consts::PI);
}

#[test]
fn backward_run_is_stored_in_increasing_time() {
    let m = figure1().unwrap();
    let tr = integrate(&m, StateVector::new(0.7, 0.0), 5.0, Direction::Backward, &sampled(1.0)).unwrap();
    assert!(tr.t.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(*tr.t.last().unwrap(), 0.0);
    assert!((tr.t[0] + 5.0).abs() < 1e-12);
    let exact = 0.6 + 0.1 * (10.0f64).exp();
    assert!((tr.a[0] - exact).abs() < 1e-8 * exact);
}

#[test]
fn strict_stop_rule_converges() {
    let m = figure1().unwrap();
    let (trap, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let opts = IntegrateOptions {
        stop: StopRule::strict(vec![trap.state(), target.state()]),
        ..IntegrateOptions::default()
    };
    let tr = integrate(&m, StateVector::new(0.8, trap.pi), 2000.0, Direction::Forward, &opts).unwrap();
    match tr.status {
        TerminalStatus::Converged { to } => assert_eq!(to, trap.state()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn basin_splits_at_the_arm() {
    let m = figure1().unwrap();
    let (trap, target) = trap_and_target(&m, &ScanOptions::default()).unwrap();
    let bx = PhaseBox {
        a_min: 0.4,
        a_max: 0.8,
        pi_min: -0.03,
        pi_max: 0.03,
    };
    let grid = basin_grid(&m, target.state(), trap.state(), &bx, (9, 13), &BasinOptions::default()).unwrap();
    // Rows run over pi, columns over a.
    assert_eq!(grid.labels.len(), 13);
    assert!(grid.labels.iter().all(|row| row.len() == 9));
    assert!(grid.count(BasinLabel::TrapConverging) > 0);
    assert!(grid.count(BasinLabel::Escaped) > 0);
    assert_eq!(grid.count(BasinLabel::Undecided), 0);
    // Points strictly below the arm never escape.
    let arm = StableArm::compute(&m, &target, &ManifoldOptions::default()).unwrap();
    for (i, &a) in grid.a.iter().enumerate() {
        let pi_arm = arm.pi_at(a).unwrap_or(target.pi);
        for (j, &pi) in grid.pi.iter().enumerate() {
            if pi < pi_arm - 1e-6 {
                assert_eq!(grid.labels[j][i], BasinLabel::TrapConverging, "({a}, {pi})");
            }
        }
    }
}

#[test]
fn portrait_serializes_and_round_trips() {
    let m = figure2().unwrap();
    let opts = PortraitOptions {
        resolution: Some((5, 5)),
        ..PortraitOptions::default()
    };
    let p = phase_portrait(&m, &opts).unwrap();
    assert_eq!(p.regime, "activist");
    assert_eq!(p.steady_states.len(), 2);
    assert!(p.heteroclinic.as_ref().is_some_and(|h| h.len() > 10));
    assert!(p.manifolds.contains_key("stable_arm_target"));
    assert!(p.manifolds.contains_key("unstable_trap_plus"));
    let json = serde_json::to_string(&p).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    for key in ["regime", "steady_states", "isoclines", "manifolds", "heteroclinic", "basin"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let back: PhasePortrait = serde_json::from_str(&json).unwrap();
    assert_eq!(back, p);
}
