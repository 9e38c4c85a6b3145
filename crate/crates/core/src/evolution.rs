//! Non-unitary evolution `|psi_theta> = exp(-i H theta) |psi_0>` and the
//! bookkeeping of the normalization coefficient `K_theta = <psi_theta|psi_theta>`.
//!
//! The parameter `theta` doubles as the evolution time; the generator does not
//! depend on it.

use crate::error::{Error, Result};
use crate::linalg::{mat_exp, ComplexMatrix, ComplexVector, C64, I};

/// Tolerance on `||psi0||^2 - 1` accepted for initial states.
pub const INPUT_NORM_TOL: f64 = 1e-10;

/// Below this `K_theta` the state is considered annihilated.
pub const K_COLLAPSE_THRESHOLD: f64 = 1e-300;

/// Step used by every finite-difference oracle in the crate.
pub const FD_STEP: f64 = 1e-6;

/// Raw and normalized final state at a given `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedState {
    pub theta: f64,
    /// `|psi_theta>`, not normalized.
    pub raw: ComplexVector,
    /// `K_theta = <psi_theta|psi_theta>`.
    pub k_theta: f64,
    /// `|phi_theta> = |psi_theta> / sqrt(K_theta)`.
    pub normalized: ComplexVector,
}

impl EvolvedState {
    /// `<phi_theta| M |phi_theta>`.
    pub fn expect(&self, m: &ComplexMatrix) -> C64 {
        m.expectation(&self.normalized)
    }
}

pub(crate) fn check_inputs(h: &ComplexMatrix, psi0: &ComplexVector) -> Result<()> {
    if h.dim() != psi0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi0.dim(),
        });
    }
    let norm_sqr = psi0.norm_sqr();
    if (norm_sqr - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(())
}

pub fn evolve(h: &ComplexMatrix, psi0: &ComplexVector, theta: f64) -> Result<EvolvedState> {
    check_inputs(h, psi0)?;
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let raw = mat_exp(h, theta).apply(psi0);
    let k_theta = raw.norm_sqr();
    if !k_theta.is_finite() {
        return Err(Error::NonFinite("K_theta"));
    }
    if k_theta < K_COLLAPSE_THRESHOLD {
        return Err(Error::KCollapse { k: k_theta });
    }
    let normalized = raw.scale(C64::new(1.0 / k_theta.sqrt(), 0.0));
    Ok(EvolvedState {
        theta,
        raw,
        k_theta,
        normalized,
    })
}

/// Logarithmic derivative `(dK/dtheta) / K = i (<H^dagger> - <H>)` on the normalized state.
pub fn dk_dtheta(h: &ComplexMatrix, state: &EvolvedState) -> Result<f64> {
    let h_mean = state.expect(h);
    let hd_mean = state.expect(&h.adjoint());
    let value = I * (hd_mean - h_mean);
    if value.im.abs() > 1e-8 * h_mean.norm().max(1.0) {
        return Err(Error::NonReal { residue: value.im });
    }
    Ok(value.re)
}

/// Normalization coefficient `|f(theta)|^2 K_theta` of an implementation whose
/// evolution operator carries an extra scalar factor `f(theta)`.
pub fn effective_k<F>(f: F, h: &ComplexMatrix, psi0: &ComplexVector, theta: f64) -> Result<f64>
where
    F: Fn(f64) -> C64,
{
    let factor = f(theta);
    if !(factor.re.is_finite() && factor.im.is_finite()) {
        return Err(Error::NonFinite("effective evolution factor"));
    }
    Ok(factor.norm_sqr() * evolve(h, psi0, theta)?.k_theta)
}
