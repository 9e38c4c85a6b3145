//! Cross-oracle validation battery.
//!
//! Every check compares two independent evaluations of the same quantity and
//! records the worst residual seen. The closed forms under test are injected
//! through [`Oracles`] so that a deliberately corrupted formula can be shown to
//! make the report fail.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bosonic::{self, BosonicParams};
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::linalg::{ComplexMatrix, ComplexVector, C64};
use crate::measurement::{check_condition, deviation_vectors, error_propagation};
use crate::pt::{self, ChannelQfi, InitialStateSpec, PtParams};
use crate::qfi::{
    classical_fisher, qfi_derivative, qfi_expectation, sld, sld_qfi, sld_residual, Povm,
};
use crate::search::{grid_then_golden, linspace};

/// Seed of every random instance drawn by the suite.
pub const SEED: u64 = 0x5eed_0ff1_5eed;

/// Closed forms checked by the suite.
#[derive(Clone, Copy)]
pub struct Oracles {
    pub qfi_unbroken: fn(&PtParams, f64, f64, f64) -> Result<f64>,
    pub qfi_broken: fn(&PtParams, f64, f64, f64) -> Result<f64>,
    pub qfi_bosonic: fn(&BosonicParams, f64) -> Result<f64>,
    pub channel_qfi: fn(&PtParams) -> Result<ChannelQfi>,
    pub variance_pq: fn(&PtParams, f64, f64, f64) -> Result<f64>,
}

impl Default for Oracles {
    fn default() -> Self {
        Self {
            qfi_unbroken: pt::qfi_closed_unbroken,
            qfi_broken: pt::qfi_closed_broken,
            qfi_bosonic: bosonic::qfi_bosonic_closed,
            channel_qfi: pt::channel_qfi,
            variance_pq: pt::variance_pq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Worst residual over the instances of this check.
    pub residual: f64,
    pub tolerance: f64,
    pub instances: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Golden {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub golden: Vec<Golden>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.golden.iter().all(|g| g.passed)
    }

    pub fn render(&self) -> String {
        let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{}  {:<48} max residual {:.3e} (tol {:.0e}, {} instances)",
                mark(c.passed),
                c.name,
                c.residual,
                c.tolerance,
                c.instances
            );
        }
        for g in &self.golden {
            let _ = writeln!(
                out,
                "{}  {:<48} expected {} observed {:.12} (tol {:.0e})",
                mark(g.passed),
                g.name,
                g.expected,
                g.observed,
                g.tolerance
            );
        }
        let _ = writeln!(
            out,
            "{}",
            if self.passed() {
                "all checks passed"
            } else {
                "validation FAILED"
            }
        );
        out
    }
}

/// Accumulates the worst residual of one check.
struct Tally {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    instances: usize,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            worst: 0.0,
            instances: 0,
        }
    }

    fn record(&mut self, residual: f64) {
        self.instances += 1;
        // NaN counts as an infinite residual.
        self.worst = if residual.is_nan() {
            f64::INFINITY
        } else {
            self.worst.max(residual)
        };
    }

    fn record_result(&mut self, residual: Result<f64>) {
        self.record(residual.unwrap_or(f64::INFINITY));
    }

    fn finish(self) -> Check {
        Check {
            name: self.name.to_string(),
            residual: self.worst,
            tolerance: self.tolerance,
            instances: self.instances,
            passed: self.instances > 0 && self.worst <= self.tolerance,
        }
    }
}

fn golden(name: &str, expected: f64, observed: Result<f64>, tolerance: f64) -> Golden {
    let observed = observed.unwrap_or(f64::NAN);
    Golden {
        name: name.to_string(),
        expected,
        observed,
        tolerance,
        passed: (observed - expected).abs() <= tolerance,
    }
}

/// Random non-Hermitian matrix with entries in the square `|re|, |im| <= bound / sqrt2`,
/// so that `|H_ij| <= bound`.
pub fn random_matrix<R: Rng>(rng: &mut R, dim: usize, bound: f64) -> ComplexMatrix {
    let half = bound * std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(dim, |_, _| {
        C64::new(rng.random_range(-half..half), rng.random_range(-half..half))
    })
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize, bound: f64) -> ComplexMatrix {
    let m = random_matrix(rng, dim, bound);
    (&m + &m.adjoint()).scale(C64::new(0.5, 0.0))
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> ComplexVector {
    loop {
        let v = ComplexVector::new(
            (0..dim)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .expect("dimension in range");
        if let Some(u) = v.normalized().filter(|_| v.norm() > 1e-3) {
            return u;
        }
    }
}

/// Random PT parameters in the unbroken regime, away from the EP.
pub fn random_unbroken<R: Rng>(rng: &mut R) -> PtParams {
    let s = rng.random_range(0.5..2.0);
    let omega = rng.random_range(0.0..2.0 * PI);
    let ratio: f64 = rng.random_range(-0.9..0.9);
    let r = (ratio * s / omega.sin().abs().max(0.2)).clamp(-5.0, 5.0);
    PtParams { r, s, omega }
}

/// Random PT parameters in the broken regime, away from the EP.
pub fn random_broken<R: Rng>(rng: &mut R) -> PtParams {
    let s = rng.random_range(0.2..1.0);
    let omega = rng.random_range(0.3..PI - 0.3) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let r = sign * rng.random_range(1.1..3.0) * s / omega.sin().abs();
    PtParams { r, s, omega }
}

fn route_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut derivative = Tally::new("QFI: expectation vs derivative route", 1e-5);
    let mut trace = Tally::new("QFI: expectation vs SLD trace", 1e-8);
    let mut residual = Tally::new("SLD defining-equation residual", 1e-6);
    let mut fisher = Tally::new("classical Fisher of SLD eigenbasis vs QFI", 1e-5);
    let mut drawn = 0;
    while drawn < 100 {
        let h = random_matrix(rng, 2, 3.0);
        let psi = random_state(rng, 2);
        let theta = rng.random_range(0.0..3.0);
        let Ok(f) = qfi_expectation(&h, &psi, theta).map(|r| r.qfi) else {
            continue;
        };
        drawn += 1;
        derivative.record_result(qfi_derivative(&h, &psi, theta).map(|d| (d - f).abs()));
        match sld(&h, &psi, theta) {
            Ok(l) => {
                trace.record_result(sld_qfi(&h, &psi, theta, &l).map(|t| (t - f).abs()));
                residual.record_result(sld_residual(&h, &psi, theta, &l));
                fisher.record_result(
                    Povm::eigenbasis_2x2(&l)
                        .and_then(|povm| classical_fisher(&h, &psi, theta, &povm))
                        .map(|c| (c - f).abs()),
                );
            }
            Err(_) => {
                trace.record(f64::INFINITY);
                residual.record(f64::INFINITY);
                fisher.record(f64::INFINITY);
            }
        }
    }
    vec![
        derivative.finish(),
        trace.finish(),
        residual.finish(),
        fisher.finish(),
    ]
}

fn closed_form_checks(rng: &mut ChaCha8Rng, oracles: &Oracles) -> Vec<Check> {
    let mut unbroken = Tally::new("closed-form QFI, unbroken regime", 1e-8);
    for _ in 0..50 {
        let p = random_unbroken(rng);
        let (m, phi, theta) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..5.0),
        );
        unbroken.record_result(engine_vs(&p, m, phi, theta, oracles.qfi_unbroken));
    }
    let mut broken = Tally::new("closed-form QFI, broken regime", 1e-8);
    for _ in 0..50 {
        let p = random_broken(rng);
        let (m, phi, theta) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..2.0),
        );
        broken.record_result(engine_vs(&p, m, phi, theta, oracles.qfi_broken));
    }
    let mut bosonic_tally = Tally::new("closed-form QFI, coupled bosonic modes", 1e-8);
    for _ in 0..50 {
        let params = BosonicParams {
            omega0: rng.random_range(-2.0..2.0),
            g: rng.random_range(0.5..2.0),
            gamma_a: rng.random_range(0.0..1.0),
            gamma_b: rng.random_range(0.0..1.0),
        };
        let theta = rng.random_range(0.0..3.0);
        bosonic_tally.record_result(bosonic::effective_hamiltonian(&params).and_then(|h| {
            let engine = qfi_expectation(&h, &bosonic::initial_state(), theta)?.qfi;
            Ok(((oracles.qfi_bosonic)(&params, theta)? - engine).abs())
        }));
    }
    vec![unbroken.finish(), broken.finish(), bosonic_tally.finish()]
}

fn engine_vs(
    p: &PtParams,
    m: f64,
    phi: f64,
    theta: f64,
    oracle: fn(&PtParams, f64, f64, f64) -> Result<f64>,
) -> Result<f64> {
    let psi = pt::initial_state(p, &InitialStateSpec::eigen(m, phi))?;
    let engine = qfi_expectation(&pt::build(p)?, &psi, theta)?.qfi;
    Ok((oracle(p, m, phi, theta)? - engine).abs())
}

fn measurement_checks(rng: &mut ChaCha8Rng, oracles: &Oracles) -> Vec<Check> {
    let p = PtParams {
        r: 0.25,
        s: 0.5,
        omega: FRAC_PI_2,
    };
    let h = pt::build(&p).expect("valid parameters");
    let x = ComplexMatrix::projector(&ComplexVector::basis(2, 0));
    let psi = pt::initial_state(&p, &InitialStateSpec::eigen(1.0, 0.0)).expect("unbroken");

    let mut crb = Tally::new("CRB saturation, optimal PT setup", 1e-6);
    let mut condition = Tally::new("optimality condition, optimal PT setup", 1e-8);
    let mut pq = Tally::new("variance p/q vs error propagation", 1e-6);
    for theta in linspace(0.0, 12.0, 100) {
        let Ok(variance) = error_propagation(&h, &x, &psi, theta, 1) else {
            continue;
        };
        let f = qfi_expectation(&h, &psi, theta).map(|r| r.qfi);
        crb.record_result(f.map(|f| (variance * f - 1.0).abs()));
        condition.record_result(
            deviation_vectors(&h, &x, &psi, theta)
                .and_then(|(f, g)| check_condition(&f, &g, 1e-8))
                .map(|r| r.residual.max(r.c_estimate.im.abs() / r.c_estimate.norm())),
        );
        for m in [1.0, 1.2] {
            let state = pt::initial_state(&p, &InitialStateSpec::eigen(m, 0.0)).expect("unbroken");
            if let (Ok(a), Ok(b)) = (
                (oracles.variance_pq)(&p, m, 0.0, theta),
                error_propagation(&h, &x, &state, theta, 1),
            ) {
                pq.record((a / b - 1.0).abs());
            }
        }
    }

    let mut sld_c = Tally::new("SLD as measurement: C = 1/2", 1e-8);
    for _ in 0..50 {
        let h = random_matrix(rng, 2, 3.0);
        let psi = random_state(rng, 2);
        let theta = rng.random_range(0.0..3.0);
        let outcome = sld(&h, &psi, theta).and_then(|l| {
            let (f, g) = deviation_vectors(&h, &l, &psi, theta)?;
            let report = check_condition(&f, &g, 1e-8)?;
            Ok((report.c_estimate - C64::new(0.5, 0.0))
                .norm()
                .max(report.residual))
        });
        match outcome {
            Err(Error::KCollapse { .. }) | Err(Error::Degenerate) => {}
            other => sld_c.record_result(other),
        }
    }
    vec![
        crb.finish(),
        condition.finish(),
        pq.finish(),
        sld_c.finish(),
    ]
}

fn hermitian_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut norm = Tally::new("Hermitian reduction: K = 1", 1e-10);
    let mut qfi = Tally::new("Hermitian reduction: QFI = 4 Var, constant", 1e-8);
    for _ in 0..50 {
        let h = random_hermitian(rng, 2, 3.0);
        let psi = random_state(rng, 2);
        let mean = h.expectation(&psi);
        let variance = ((&h * &h).expectation(&psi) - mean * mean).re;
        for theta in linspace(0.0, 3.0, 7) {
            norm.record_result(evolve(&h, &psi, theta).map(|st| (st.k_theta - 1.0).abs()));
            qfi.record_result(
                qfi_expectation(&h, &psi, theta).map(|q| (q.qfi - 4.0 * variance).abs()),
            );
        }
    }
    vec![norm.finish(), qfi.finish()]
}

fn golden_values(oracles: &Oracles) -> Vec<Golden> {
    let fig1 = PtParams {
        r: 0.25,
        s: 1.0,
        omega: FRAC_PI_2,
    };
    let fig1_broken = PtParams {
        r: 1.0,
        s: 0.25,
        omega: FRAC_PI_2,
    };
    let ep = PtParams {
        r: 2.0,
        s: 2.0,
        omega: FRAC_PI_2,
    };
    let ratio_max = |kappa: f64, which: usize| -> Result<f64> {
        let p = PtParams {
            r: kappa,
            s: 1.0,
            omega: FRAC_PI_2,
        };
        let scale = if which == 0 {
            4.0 * p.discriminant()
        } else {
            4.0 * kappa * kappa
        };
        let (_, v) = grid_then_golden(
            |t| (oracles.qfi_unbroken)(&p, 1.0, 0.0, t).map_or(f64::NAN, |f| f / scale),
            0.0,
            10.0,
            2001,
            1e-12,
        );
        Ok(v)
    };
    let fig1_peak = grid_then_golden(
        |t| (oracles.qfi_unbroken)(&fig1, 1.0, 0.0, t).unwrap_or(f64::NAN),
        0.0,
        14.0,
        1401,
        1e-12,
    )
    .1;
    vec![
        golden(
            "channel QFI, unbroken (s=1, r=0.25)",
            6.25,
            (oracles.channel_qfi)(&fig1).map(|c| c.value),
            1e-12,
        ),
        golden(
            "channel QFI, broken (s=0.25, r=1)",
            6.25,
            (oracles.channel_qfi)(&fig1_broken).map(|c| c.value),
            1e-12,
        ),
        golden(
            "numeric channel QFI, unbroken",
            6.25,
            pt::channel_qfi_numeric(&fig1).map(|o| o.value),
            1e-4,
        ),
        golden(
            "numeric channel QFI, broken",
            6.25,
            pt::channel_qfi_numeric(&fig1_broken).map(|o| o.value),
            1e-4,
        ),
        golden("peak QFI, unbroken m=1 phi=0", 6.25, Ok(fig1_peak), 1e-6),
        golden(
            "QFI at the EP from |0>",
            16.0,
            pt::qfi_at_ep(&ep, &ComplexVector::basis(2, 0), 0.0),
            1e-9,
        ),
        golden("max S0 at kappa = 0.6", 4.0, ratio_max(0.6, 0), 1e-6),
        golden("max S1 at kappa = 0.2", 36.0, ratio_max(0.2, 1), 1e-4),
        golden(
            "bosonic QFI at theta = 0 (4 g^2, g = 1)",
            4.0,
            (oracles.qfi_bosonic)(
                &BosonicParams {
                    omega0: 1.0,
                    g: 1.0,
                    gamma_a: 0.8,
                    gamma_b: 0.2,
                },
                0.0,
            ),
            1e-12,
        ),
    ]
}

pub fn validate_suite() -> ValidationReport {
    validate_suite_with(&Oracles::default())
}

pub fn validate_suite_with(oracles: &Oracles) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checks = route_checks(&mut rng);
    checks.extend(closed_form_checks(&mut rng, oracles));
    checks.extend(measurement_checks(&mut rng, oracles));
    checks.extend(hermitian_checks(&mut rng));
    ValidationReport {
        checks,
        golden: golden_values(oracles),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        let report = validate_suite();
        assert!(report.passed(), "{}", report.render());
        let rendered = report.render();
        for value in ["6.25", "16", "expected 4 ", "36"] {
            assert!(rendered.contains(value), "missing {value}");
        }
    }

    fn corrupted(p: &PtParams, m: f64, phi: f64, theta: f64) -> Result<f64> {
        Ok(pt::qfi_closed_unbroken(p, m, phi, theta)? * 1.001)
    }

    #[test]
    fn corrupted_closed_form_fails() {
        let report = validate_suite_with(&Oracles {
            qfi_unbroken: corrupted,
            ..Oracles::default()
        });
        assert!(!report.passed());
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        assert_eq!(failed, vec!["closed-form QFI, unbroken regime"]);
    }
}
