//! Two lossy coupled bosonic modes restricted to one excitation.
//!
//! In the ordered basis `(|0,1>, |1,0>)` the effective generator is
//! `[[omega0 - i gamma_a/2, g], [g, omega0 - i gamma_b/2]]`. Its eigenvalues are
//! `omega0 - i gamma_bar/2 ± xi` with `gamma_bar = (gamma_a + gamma_b)/2`,
//! `gamma = (gamma_a - gamma_b)/2` and `xi^2 = g^2 - gamma^2/4`.
//! Only `xi^2 >= 0` is supported.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BosonicParams {
    pub omega0: f64,
    pub g: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
}

impl BosonicParams {
    pub fn new(omega0: f64, g: f64, gamma_a: f64, gamma_b: f64) -> Result<Self> {
        let p = Self {
            omega0,
            g,
            gamma_a,
            gamma_b,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.omega0, self.g, self.gamma_a, self.gamma_b]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::NonFinite("bosonic parameters"));
        }
        if self.gamma_a < 0.0 || self.gamma_b < 0.0 {
            return Err(Error::InvalidParams(
                "dissipation rates must be nonnegative".into(),
            ));
        }
        Ok(())
    }

    /// `gamma = (gamma_a - gamma_b)/2`.
    pub fn gamma(&self) -> f64 {
        0.5 * (self.gamma_a - self.gamma_b)
    }

    /// `gamma_bar = (gamma_a + gamma_b)/2`.
    pub fn gamma_bar(&self) -> f64 {
        0.5 * (self.gamma_a + self.gamma_b)
    }

    pub fn xi_sq(&self) -> f64 {
        let gamma = self.gamma();
        self.g * self.g - 0.25 * gamma * gamma
    }

    fn xi(&self) -> Result<f64> {
        self.validate()?;
        let xi_sq = self.xi_sq();
        if xi_sq < 0.0 {
            return Err(Error::BrokenRegime { xi_sq });
        }
        Ok(xi_sq.sqrt())
    }
}

pub fn effective_hamiltonian(params: &BosonicParams) -> Result<ComplexMatrix> {
    params.xi()?;
    let g = C64::new(params.g, 0.0);
    ComplexMatrix::from_rows(vec![
        vec![C64::new(params.omega0, -0.5 * params.gamma_a), g],
        vec![g, C64::new(params.omega0, -0.5 * params.gamma_b)],
    ])
}

/// `(lambda+, lambda-)` with `lambda± = omega0 - i gamma_bar/2 ± xi`.
pub fn eigenvalues(params: &BosonicParams) -> Result<[C64; 2]> {
    let xi = params.xi()?;
    let centre = C64::new(params.omega0, -0.5 * params.gamma_bar());
    Ok([centre + xi, centre - xi])
}

/// Unnormalized eigenvectors `(-i gamma/2 ± xi) |0,1> + g |1,0>`.
pub fn eigenvectors(params: &BosonicParams) -> Result<[ComplexVector; 2]> {
    let xi = params.xi()?;
    let half = C64::new(0.0, -0.5 * params.gamma());
    let g = C64::new(params.g, 0.0);
    Ok([
        ComplexVector::new(vec![half + xi, g])?,
        ComplexVector::new(vec![half - xi, g])?,
    ])
}

/// The input state `|0,1>`.
pub fn initial_state() -> ComplexVector {
    ComplexVector::basis(2, 0)
}

/// Closed-form QFI for `|psi0> = |0,1>`:
/// `64 g^2 xi^4 / [-4 g^2 + gamma^2 cos(2 xi theta) + 2 gamma xi sin(2 xi theta)]^2`.
pub fn qfi_bosonic_closed(params: &BosonicParams, theta: f64) -> Result<f64> {
    let xi = params.xi()?;
    let gamma = params.gamma();
    let g2 = params.g * params.g;
    let x = 2.0 * xi * theta;
    let bracket = -4.0 * g2 + gamma * gamma * x.cos() + 2.0 * gamma * xi * x.sin();
    if bracket.abs() < 1e-14 {
        return Err(Error::ZeroDenominator { value: bracket });
    }
    Ok(64.0 * g2 * xi.powi(4) / (bracket * bracket))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfi::qfi_expectation;
    use crate::search::linspace;

    #[test]
    fn lossless_is_beam_splitter() {
        let p = BosonicParams::new(1.3, 0.7, 0.0, 0.0).unwrap();
        let h = effective_hamiltonian(&p).unwrap();
        assert!(h.is_hermitian(0.0));
        let [a, b] = eigenvalues(&p).unwrap();
        assert!((a - C64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((b - C64::new(0.6, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn spectrum_and_trace() {
        let p = BosonicParams::new(1.3, 1.0, 0.8, 0.2).unwrap();
        let h = effective_hamiltonian(&p).unwrap();
        assert!((h.trace() - C64::new(2.6, -0.5)).norm() < 1e-15);
        let vals = eigenvalues(&p).unwrap();
        let vecs = eigenvectors(&p).unwrap();
        for k in 0..2 {
            let residual = (&h.apply(&vecs[k]) - &vecs[k].scale(vals[k])).norm();
            assert!(residual < 1e-12, "residual {residual}");
        }
    }

    #[test]
    fn closed_form_matches_engine() {
        let p = BosonicParams::new(1.3, 1.0, 0.8, 0.2).unwrap();
        let h = effective_hamiltonian(&p).unwrap();
        for t in linspace(0.0, 3.0, 31) {
            let engine = qfi_expectation(&h, &initial_state(), t).unwrap().qfi;
            assert!((qfi_bosonic_closed(&p, t).unwrap() - engine).abs() < 1e-8);
        }
        assert!((qfi_bosonic_closed(&p, 0.0).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn balanced_loss_is_flat() {
        let p = BosonicParams::new(0.0, 0.5, 0.3, 0.3).unwrap();
        for t in [0.0, 1.0, 7.0] {
            assert!((qfi_bosonic_closed(&p, t).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_invalid() {
        let strong = BosonicParams::new(0.0, 0.1, 2.0, 0.0).unwrap();
        assert!(matches!(
            effective_hamiltonian(&strong),
            Err(Error::BrokenRegime { .. })
        ));
        assert!(BosonicParams::new(0.0, 1.0, -0.1, 0.0).is_err());
        // xi = 0: the bracket reduces to -4 xi^2 = 0 at theta = 0.
        let edge = BosonicParams::new(0.0, 0.5, 2.0, 0.0).unwrap();
        assert!(matches!(
            qfi_bosonic_closed(&edge, 0.0),
            Err(Error::ZeroDenominator { .. })
        ));
    }
}
