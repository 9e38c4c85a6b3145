use std::f64::consts::{FRAC_PI_2, PI};

use nhqfi::linalg::{ComplexMatrix, C64};
use nhqfi::measurement::{check_condition, deviation_vectors, error_propagation};
use nhqfi::pt::{self, InitialStateSpec, PtParams, RegimeTag, DEFAULT_EP_TOL};
use nhqfi::qfi::qfi_expectation;
use nhqfi::search::{grid_then_golden, linspace};
use nhqfi::sweep::{preset, run_sweep};
use nhqfi::{ComplexVector, Error};

fn pt(r: f64, s: f64) -> PtParams {
    PtParams::new(r, s, FRAC_PI_2).unwrap()
}

fn engine_qfi(p: &PtParams, m: f64, phi: f64, theta: f64) -> f64 {
    let psi0 = pt::initial_state(p, &InitialStateSpec::eigen(m, phi)).unwrap();
    qfi_expectation(&pt::build(p).unwrap(), &psi0, theta)
        .unwrap()
        .qfi
}

#[test]
fn unbroken_peak_reaches_channel_bound() {
    let p = pt(0.25, 1.0);
    let period = PI / p.discriminant().sqrt();
    let (_, peak) = grid_then_golden(|t| engine_qfi(&p, 1.0, 0.0, t), 0.0, period, 400, 1e-12);
    assert!((peak - 6.25).abs() < 1e-6, "peak {peak}");
}

#[test]
fn broken_peak_location() {
    let p = pt(1.0, 0.25);
    for (m, phi) in [(-1.0, 0.0), (2.0, PI), (-3.0, 0.0)] {
        let (theta, value) = pt::peak_broken(&p, m, phi).unwrap();
        let (_, found) = grid_then_golden(|t| engine_qfi(&p, m, phi, t), 0.0, 6.0, 600, 1e-12);
        assert!(
            (found - value).abs() < 1e-6 * value,
            "m {m}: {found} vs {value}"
        );
        assert!((engine_qfi(&p, m, phi, theta) - value).abs() < 1e-8 * value);
    }
    let (_, best) = pt::peak_broken(&p, -1.0, 0.0).unwrap();
    assert!((best - 6.25).abs() < 1e-10);
}

#[test]
fn phase_pi_shifts_unbroken_curve() {
    // phi enters as 2 sqrt(nu0) theta + phi, so phi = pi is a time translation.
    let p = pt(0.4, 1.0);
    let shift = PI / (2.0 * p.discriminant().sqrt());
    for theta in linspace(0.0, 4.0, 9) {
        let a = engine_qfi(&p, 1.0, PI, theta);
        let b = engine_qfi(&p, 1.0, 0.0, theta + shift);
        assert!((a - b).abs() < 1e-9 * a.max(1.0));
    }
}

#[test]
fn qfi_vanishes_approaching_ep() {
    let mut previous = f64::INFINITY;
    for delta in [0.3, 0.1, 0.03, 0.01, 0.003, 0.001] {
        let f = engine_qfi(&pt(2.0, 2.0 + delta), 1.0, 0.0, 0.5);
        assert!(f < previous);
        previous = f;
    }
    assert!(previous < 1e-5);
    let at = pt(2.0, 2.0);
    assert_eq!(
        pt::classify(&at, DEFAULT_EP_TOL).tag,
        RegimeTag::ExceptionalPoint
    );
    assert_eq!(
        pt::initial_state(&at, &InitialStateSpec::eigen(1.0, 0.0)),
        Err(Error::EpCoalescence)
    );
    let v = pt::coalesced_eigenvector(&at).unwrap();
    assert!(pt::qfi_at_ep(&at, &v, 1.3).unwrap() < 1e-12);
}

#[test]
fn ep_probe_from_ket0_matches_closed_value() {
    let f = pt::qfi_at_ep(&pt(2.0, 2.0), &ComplexVector::basis(2, 0), 0.0).unwrap();
    assert!((f - 16.0).abs() < 1e-9);
}

#[test]
fn ket0_measurement_optimal_only_for_balanced_state() {
    let p = pt(0.25, 0.5);
    let h = pt::build(&p).unwrap();
    let a = ComplexMatrix::projector(&ComplexVector::basis(2, 0));
    for phi in [0.0, 0.7, 2.0] {
        let psi0 = pt::initial_state(&p, &InitialStateSpec::eigen(1.0, phi)).unwrap();
        for theta in [0.2, 1.1, 3.3] {
            let (f, g) = deviation_vectors(&h, &a, &psi0, theta).unwrap();
            let report = check_condition(&f, &g, 1e-8).unwrap();
            let expected = pt::optimal_condition_constant(&p, phi, theta).unwrap();
            assert!(report.satisfied);
            assert!(
                (report.c_estimate - C64::new(expected, 0.0)).norm()
                    < 1e-8 * expected.abs().max(1.0)
            );
        }
    }
    for m in [1.1, 1.3] {
        for theta in [0.2, 1.1, 3.3] {
            let psi0 = pt::initial_state(&p, &InitialStateSpec::eigen(m, 0.0)).unwrap();
            let variance = error_propagation(&h, &a, &psi0, theta, 1).unwrap();
            let closed = pt::variance_pq(&p, m, 0.0, theta).unwrap();
            assert!((variance - closed).abs() < 1e-8 * closed.max(1.0));
        }
    }
}

#[test]
fn fig2_sweep_jumps_at_ep() {
    let result = run_sweep(&preset("fig2a").unwrap().resolve().unwrap());
    let s = result.values("s");
    let f = result.values("qfi");
    let ep = s.iter().position(|x| (x - 2.0).abs() < 1e-12).unwrap();
    assert!((f[ep] - 16.0).abs() < 1e-9);
    assert!(f[ep - 1] < 1e-2 && f[ep + 1] < 1e-2);
}
