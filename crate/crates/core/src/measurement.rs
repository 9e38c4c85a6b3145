//! Optimal-measurement condition and error propagation.
//!
//! A Hermitian observable `A` saturates the quantum Cramér-Rao bound on the
//! final state exactly when the deviation vectors
//! `|f> = (H - <H>)|phi>` and `|g> = (A - <A>)|phi>` satisfy `|f> = i C |g>`
//! with real `C`.

use crate::error::{Error, Result};
use crate::evolution::{check_inputs, evolve, EvolvedState};
use crate::linalg::{dot, ComplexMatrix, ComplexVector, C64, I};
use crate::qfi::{deviation, qfi_of_state, signal_derivative};

/// Hermiticity tolerance for measurement operators.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default relative tolerance for [`check_condition`].
pub const DEFAULT_CONDITION_TOL: f64 = 1e-8;

/// Norm below which a deviation vector counts as zero.
pub const DEVIATION_EPS: f64 = 1e-14;

/// `|dQ|` below this makes the error-propagation variance diverge.
pub const ZERO_SIGNAL_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub f: ComplexVector,
    pub g: ComplexVector,
    /// Least-squares `C` in `f = i C g`.
    pub c_estimate: C64,
    /// `||f - i C g|| / max(||f||, eps)`.
    pub residual: f64,
    pub satisfied: bool,
}

fn check_hermitian(a: &ComplexMatrix) -> Result<()> {
    let deviation = a.hermiticity_deviation();
    if deviation > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::NonHermitianMeasurement { deviation });
    }
    Ok(())
}

fn prepare(
    h: &ComplexMatrix,
    a: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
) -> Result<EvolvedState> {
    check_hermitian(a)?;
    check_inputs(h, psi0)?;
    if a.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: a.dim(),
        });
    }
    evolve(h, psi0, theta)
}

/// `(|f>, |g>)` for generator `h` and observable `a` on the final state.
pub fn deviation_vectors(
    h: &ComplexMatrix,
    a: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
) -> Result<(ComplexVector, ComplexVector)> {
    let state = prepare(h, a, psi0, theta)?;
    Ok(deviations_of_state(h, a, &state))
}

fn deviations_of_state(
    h: &ComplexMatrix,
    a: &ComplexMatrix,
    state: &EvolvedState,
) -> (ComplexVector, ComplexVector) {
    let f = deviation(h, state).apply(&state.normalized);
    let g = deviation(a, state).apply(&state.normalized);
    (f, g)
}

/// Tests `|f> = i C |g>` with real `C`.
///
/// `C` is the least-squares ratio `<g|f> / (i <g|g>)`; collinearity is judged
/// by the relative residual rather than componentwise division.
pub fn check_condition(f: &ComplexVector, g: &ComplexVector, tol: f64) -> Result<ConditionReport> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (f_norm, g_norm) = (f.norm(), g.norm());
    if f_norm < DEVIATION_EPS && g_norm < DEVIATION_EPS {
        return Err(Error::Degenerate);
    }
    let c_estimate = if g_norm > DEVIATION_EPS {
        dot(g, f) / (I * g.norm_sqr())
    } else {
        C64::new(0.0, 0.0)
    };
    let residual = (f - &g.scale(I * c_estimate)).norm() / f_norm.max(DEVIATION_EPS);
    let satisfied = residual <= tol && c_estimate.im.abs() <= tol * c_estimate.norm();
    Ok(ConditionReport {
        f: f.clone(),
        g: g.clone(),
        c_estimate,
        residual,
        satisfied,
    })
}

/// `<A>_theta` on the normalized final state.
pub fn observable_mean(
    h: &ComplexMatrix,
    a: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
) -> Result<f64> {
    Ok(prepare(h, a, psi0, theta)?.expect(a).re)
}

/// Derivative of `<A>_theta` in closed form.
pub fn signal_slope(
    h: &ComplexMatrix,
    a: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
) -> Result<f64> {
    let state = prepare(h, a, psi0, theta)?;
    Ok(signal_derivative(h, a, &state).re)
}

fn variance_of_state(
    h: &ComplexMatrix,
    a: &ComplexMatrix,
    state: &EvolvedState,
    n: u32,
) -> Result<f64> {
    let q = signal_derivative(h, a, state);
    // Q is real for Hermitian A; its modulus is what enters the formula.
    let slope = q.norm();
    if slope < ZERO_SIGNAL_THRESHOLD {
        return Err(Error::ZeroSignal { derivative: slope });
    }
    let spread = deviation(a, state).apply(&state.normalized).norm_sqr();
    Ok(spread / (f64::from(n) * slope * slope))
}

/// Error-propagation variance `(dA)^2 / (n |d<A>/dtheta|^2)`.
pub fn error_propagation(
    h: &ComplexMatrix,
    a: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
    n: u32,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParams(
            "number of repetitions must be positive".into(),
        ));
    }
    let state = prepare(h, a, psi0, theta)?;
    variance_of_state(h, a, &state, n)
}

/// Normalized Cramér-Rao slack `(dtheta)^2 F - 1` for a single repetition.
/// Zero means the measurement saturates the bound.
pub fn crb_gap(
    h: &ComplexMatrix,
    a: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
) -> Result<f64> {
    let state = prepare(h, a, psi0, theta)?;
    let variance = variance_of_state(h, a, &state, 1)?;
    Ok(variance * qfi_of_state(h, &state)? - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::FD_STEP;
    use crate::linalg::ONE;
    use std::f64::consts::FRAC_PI_2;

    fn pt(r: f64, s: f64, omega: f64) -> ComplexMatrix {
        ComplexMatrix::from_rows(vec![
            vec![C64::from_polar(r, omega), C64::new(s, 0.0)],
            vec![C64::new(s, 0.0), C64::from_polar(r, -omega)],
        ])
        .unwrap()
    }

    fn ket0_projector() -> ComplexMatrix {
        ComplexMatrix::projector(&ComplexVector::basis(2, 0))
    }

    fn psi() -> ComplexVector {
        ComplexVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap()
    }

    #[test]
    fn identity_has_no_deviation_or_signal() {
        let h = pt(0.25, 1.0, FRAC_PI_2);
        let (_, g) = deviation_vectors(&h, &ComplexMatrix::identity(2), &psi(), 0.7).unwrap();
        assert!(g.norm() < 1e-15);
        assert!(matches!(
            crb_gap(&h, &ComplexMatrix::identity(2), &psi(), 0.7),
            Err(Error::ZeroSignal { .. })
        ));
    }

    #[test]
    fn eigenstate_has_no_deviation() {
        let h = pt(0.0, 1.0, 0.0);
        let plus = ComplexVector::from_real(&[1.0, 1.0])
            .unwrap()
            .normalized()
            .unwrap();
        let (f, _) = deviation_vectors(&h, &ket0_projector(), &plus, 2.0).unwrap();
        assert!(f.norm() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian_observable() {
        let h = pt(0.25, 1.0, FRAC_PI_2);
        let a =
            ComplexMatrix::from_rows(vec![vec![ONE, ONE], vec![C64::new(0.0, 0.0), ONE]]).unwrap();
        assert!(matches!(
            deviation_vectors(&h, &a, &psi(), 0.1),
            Err(Error::NonHermitianMeasurement { .. })
        ));
    }

    #[test]
    fn collinear_pair() {
        let g = ComplexVector::new(vec![C64::new(0.3, -1.2), C64::new(0.8, 0.4)]).unwrap();
        let f = g.scale(I * 2.5);
        let report = check_condition(&f, &g, DEFAULT_CONDITION_TOL).unwrap();
        assert!(report.satisfied);
        assert!((report.c_estimate - C64::new(2.5, 0.0)).norm() < 1e-14);

        // Same direction but C complex: collinear, not optimal.
        let f = g.scale(C64::new(1.0, 1.0));
        let report = check_condition(&f, &g, DEFAULT_CONDITION_TOL).unwrap();
        assert!(report.residual < 1e-14);
        assert!(!report.satisfied);

        let zero = ComplexVector::zeros(2);
        assert_eq!(check_condition(&zero, &zero, 1e-8), Err(Error::Degenerate));
        assert!(check_condition(&g, &g, 0.0).is_err());
    }

    #[test]
    fn slope_matches_finite_difference() {
        let h = ComplexMatrix::from_rows(vec![
            vec![C64::new(0.3, -0.7), C64::new(1.1, 0.4)],
            vec![C64::new(-0.5, 0.2), C64::new(0.9, 0.6)],
        ])
        .unwrap();
        let a = ket0_projector();
        let mean = |t: f64| evolve(&h, &psi(), t).unwrap().expect(&a).re;
        for theta in [0.0, 0.6, 2.2] {
            let fd = (mean(theta + FD_STEP) - mean(theta - FD_STEP)) / (2.0 * FD_STEP);
            assert!((signal_slope(&h, &a, &psi(), theta).unwrap() - fd).abs() < 1e-5);
        }
    }

    #[test]
    fn repetitions_scale_variance() {
        let h = pt(0.25, 0.5, FRAC_PI_2);
        let one = error_propagation(&h, &ket0_projector(), &psi(), 0.9, 1).unwrap();
        let ten = error_propagation(&h, &ket0_projector(), &psi(), 0.9, 10).unwrap();
        assert!((one / ten - 10.0).abs() < 1e-12);
        assert!(error_propagation(&h, &ket0_projector(), &psi(), 0.9, 0).is_err());
    }
}
