//! Integration tests of the gate-family physics: slope laws, first-order
//! functionals against finite differences, composite equivalences and the
//! benchmarking harness wiring.

use std::f64::consts::PI;

use zapkit::noise::{
    calibrate, hahn_echo_decay_time, one_over_f_trajectory, ramsey_decay_time, NoiseModel,
};
use zapkit::pulse::{conditional_gate, evaluate_conditional, pzap, u5a_pi, GateKind};
use zapkit::rb::{clifford_group, two_qubit_repeat_run, TwoQubitGate};
use zapkit::solver::{first_order_response_fd, magnus_check, AugmentingBranch};
use zapkit::unitary::{frobenius_epg, Unitary2};
use zapkit::Metric;

fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn eta_grid() -> Vec<f64> {
    (0..9).map(|k| 1e-4 * 10f64.powf(k as f64 / 4.0)).collect()
}

#[test]
fn resonant_detuning_slopes_by_family() {
    let (w1, w1s) = conditional_gate(GateKind::Walsh1, 1.0, 0.0, 0.0).unwrap();
    let pts: Vec<(f64, f64)> = eta_grid()
        .iter()
        .map(|&h| (h, evaluate_conditional(&w1, &w1s, 0.0, h, Metric::Raw).0))
        .collect();
    let s = loglog_slope(&pts);
    assert!((s - 1.0).abs() < 0.1, "walsh1 slope {s}");

    // Condition-2 augmentation leaves a second-order residual; the
    // condition-1 branch cancels the second order too (slope 3).
    let pz2 = pzap(1.0, AugmentingBranch::Condition2 { p: 1 }).unwrap();
    let pts: Vec<(f64, f64)> = eta_grid()
        .iter()
        .map(|&h| (h, frobenius_epg(&pz2.propagate(0.0, 0.0, h), &Unitary2::identity())))
        .collect();
    let s = loglog_slope(&pts);
    assert!((s - 2.0).abs() < 0.1, "pzap cond2 slope {s}");

    let pz1 = pzap(1.0, AugmentingBranch::Condition1).unwrap();
    let pts: Vec<(f64, f64)> = eta_grid()
        .iter()
        .map(|&h| (h, frobenius_epg(&pz1.propagate(0.0, 0.0, h), &Unitary2::identity())))
        .collect();
    let s = loglog_slope(&pts);
    assert!((s - 3.0).abs() < 0.1, "pzap cond1 slope {s}");
}

#[test]
fn walsh3_error_components_split_by_order() {
    let (w3, _) = conditional_gate(GateKind::Walsh3, 1.0, 0.0, PI).unwrap();
    let comp = |h: f64| -> [f64; 3] {
        w3.propagate(0.0, 0.0, h).error_components(&Unitary2::identity())
    };
    let grid = eta_grid();
    let sx = loglog_slope(&grid.iter().map(|&h| (h, comp(h)[0].abs())).collect::<Vec<_>>());
    let sz = loglog_slope(&grid.iter().map(|&h| (h, comp(h)[2].abs())).collect::<Vec<_>>());
    assert!((sx - 2.0).abs() < 0.1, "sigma_x slope {sx}");
    assert!((sz - 1.0).abs() < 0.1, "sigma_z slope {sz}");
    // The σy channel is nulled outright by time symmetry.
    assert!(comp(1e-2)[1].abs() < 1e-10);
}

#[test]
fn pudding_detuned_subspace_is_second_order_in_both_errors() {
    let (pu, pus) = conditional_gate(GateKind::Pudding, 1.0, 0.0, 0.0).unwrap();
    let grid = eta_grid();
    let se = loglog_slope(
        &grid
            .iter()
            .map(|&h| (h, evaluate_conditional(&pu, &pus, h, 0.0, Metric::Raw).1))
            .collect::<Vec<_>>(),
    );
    let sn = loglog_slope(
        &grid
            .iter()
            .map(|&h| (h, evaluate_conditional(&pu, &pus, 0.0, h, Metric::Raw).1))
            .collect::<Vec<_>>(),
    );
    assert!((se - 2.0).abs() < 0.1, "eps slope {se}");
    assert!((sn - 2.0).abs() < 0.1, "eta slope {sn}");
}

#[test]
fn magnus_functionals_agree_with_finite_differences() {
    for (label, seq) in [
        ("walsh1", zapkit::pulse::walsh1_zap(1.0)),
        ("walsh3", zapkit::pulse::walsh3_zap(1.0, PI).unwrap()),
        ("pzap", pzap(1.0, AugmentingBranch::Condition1).unwrap()),
        ("pzap2", pzap(1.0, AugmentingBranch::Condition2 { p: -1 }).unwrap()),
    ] {
        let m = magnus_check(&seq).unwrap();
        let fd = first_order_response_fd(&seq, 1e-7);
        let scale = seq.total_duration();
        assert!(
            (fd[1].abs() - m.sigma_y.abs()).abs() <= 0.01 * scale,
            "{label}: sigma_y {} vs fd {}",
            m.sigma_y,
            fd[1]
        );
        assert!(
            (fd[2].abs() - m.sigma_z.abs()).abs() <= 0.01 * scale,
            "{label}: sigma_z {} vs fd {}",
            m.sigma_z,
            fd[2]
        );
    }
}

#[test]
fn seven_pi_equals_u5a_in_a_rotated_mirrored_frame() {
    let seven = zapkit::pulse::seven_pulse(PI, 1.0).unwrap();
    let u5a = u5a_pi(1.0);
    // Same |trace| (same rotation angle), axes differ by a frame rotation.
    let u7 = seven.propagate(0.0, 0.0, 0.0);
    let u5 = u5a.propagate(0.0, 0.0, 0.0);
    assert!((u7.trace().norm() - u5.trace().norm()).abs() < 1e-12);
    // Identical error-derivative structure: both null first order with
    // matching second-order coefficients.
    let t7 = u7;
    let t5 = u5;
    let r7 = zapkit::solver::derivative_null_report_single(&seven, &t7, 1.0, 1e-4);
    let r5 = zapkit::solver::derivative_null_report_single(&u5a, &t5, 1.0, 1e-4);
    assert!(r7.deriv_eps < 1e-6 && r5.deriv_eps < 1e-6);
    assert!((r7.curvature_eps - r5.curvature_eps).abs() < 0.01 * r5.curvature_eps);
    assert!((r7.curvature_eta - r5.curvature_eta).abs() < 0.01 * r5.curvature_eta);
}

#[test]
fn calibration_round_trip_at_the_sample_presets() {
    // Re-measuring with the calibration ensemble reproduces the targets
    // within the stated tolerances (2% Ramsey, 5% echo).
    for (ts, t2) in [(3.0e-4, 1.8e-3), (2.99e-6, 4.0e-5)] {
        let cal = calibrate(ts, t2).unwrap();
        let mut model = NoiseModel::dynamical(ts, t2);
        zapkit::noise::apply_calibration(&mut model, cal);
        let ram = ramsey_decay_time(&model, 256, 0x5eed).unwrap();
        let echo = hahn_echo_decay_time(&model, 256, 0x5eed).unwrap();
        assert!((ram - ts).abs() <= 0.02 * ts, "ramsey {ram} vs {ts}");
        assert!((echo - t2).abs() <= 0.05 * t2, "echo {echo} vs {t2}");
    }
}

#[test]
fn quasistatic_limit_of_the_comb_preserves_the_ramsey_time() {
    // T2 → very large: the echo constraint pushes the cutoff toward zero
    // and the Ramsey time stays pinned by the amplitude calibration.
    let ts = 1.0e-4;
    let cal = calibrate(ts, 50.0 * ts).unwrap();
    let slow = calibrate(ts, 5.0 * ts).unwrap();
    assert!(cal.cutoff_hz < slow.cutoff_hz, "{} vs {}", cal.cutoff_hz, slow.cutoff_hz);
    let mut model = NoiseModel::dynamical(ts, 50.0 * ts);
    zapkit::noise::apply_calibration(&mut model, cal);
    let ram = ramsey_decay_time(&model, 256, 0x5eed).unwrap();
    assert!((ram - ts).abs() <= 0.02 * ts);
}

#[test]
fn trajectory_respects_requested_duration_and_budget_refinement() {
    let model = NoiseModel::Dynamical1F {
        t2_star: 1e-5,
        t2: 1e-4,
        harmonics: 100,
        amplitude: Some(1.5),
        cutoff_hz: Some(2.0e4),
    };
    let seq = zapkit::pulse::walsh1_zap(1.0e7);
    let traj = one_over_f_trajectory(&model, seq.total_duration(), 3, 1).unwrap();
    let a = zapkit::noise::propagate_sampled(&seq, &traj, 0.0, 0.01, 1.0e7).unwrap();
    let b = zapkit::noise::propagate_sampled(&seq, &traj, 0.0, 0.005, 1.0e7).unwrap();
    assert!(a.max_entry_distance(&b) < 1e-8);
}

#[test]
fn repeat_protocol_echoes_protected_gate_errors() {
    // Under frozen detuning noise the repeated PUDDING train stays near
    // survival 1 (its quadratic per-gate errors are echoed pair-wise),
    // while the unprotected gate decays visibly at the same noise level.
    let delta = zapkit::angular_from_hz(3.032e6);
    let model = NoiseModel::quasi_static(3.0e-6);
    let (w, ws) = conditional_gate(GateKind::Walsh1, delta, 0.0, 0.0).unwrap();
    let walsh = TwoQubitGate { sequence: w, spec: ws };
    let lengths = [1, 2, 4, 8, 16];
    let cw = two_qubit_repeat_run(&walsh, &lengths, 64, Some(&model), 5).unwrap();
    assert!(*cw.mean_survival.last().unwrap() < 0.8, "{:?}", cw.mean_survival);

    let (p, ps) = conditional_gate(GateKind::Pudding, delta, 0.0, 0.0).unwrap();
    let pudding = TwoQubitGate { sequence: p, spec: ps };
    let cp = two_qubit_repeat_run(&pudding, &lengths, 64, Some(&model), 5).unwrap();
    assert!(*cp.mean_survival.last().unwrap() > 0.99, "{:?}", cp.mean_survival);
}

#[test]
fn group_closure_under_random_products() {
    let g = clifford_group();
    // The product of any noiseless compiled sequence and its inverse is the
    // identity up to a global phase (spot-checked through rb_run in unit
    // tests; here check the group tables directly on random words).
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let word: Vec<usize> = (0..rng.gen_range(1..12)).map(|_| rng.gen_range(0..24)).collect();
        let p = g.product_index(&word);
        let inv = g.inverse_index(p);
        let u = g.elements[p].unitary * g.elements[inv].unitary;
        assert!(((u.dagger() * u).trace().norm() - 2.0).abs() < 1e-12);
        let tr = (g.elements[inv].unitary * g.elements[p].unitary).trace().norm();
        assert!((tr - 2.0).abs() < 1e-9);
    }
}
