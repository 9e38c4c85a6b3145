//! Quantum Fisher information of the normalized final state.
//!
//! The production route is the expectation form
//! `F = 4 (<H^dagger H> - <H^dagger><H>)` evaluated on `|phi_theta>`. Two
//! independent routes exist for cross-checking: the state-derivative form
//! [`qfi_derivative`] (finite differences of `|phi_theta>`) and the SLD trace
//! `Tr[rho L^2]` via [`sld`] and [`sld_qfi`]. [`classical_fisher`] gives the
//! Fisher information of a concrete POVM, which is bounded above by the QFI.

use crate::error::{Error, Result};
use crate::evolution::{check_inputs, evolve, EvolvedState, FD_STEP};
use crate::linalg::{dot, hermitian_eigh_2x2, ComplexMatrix, ComplexVector, C64, I};

/// QFI values in `[-QFI_CLAMP, 0)` are roundoff and clamp to zero.
pub const QFI_CLAMP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiResult {
    pub theta: f64,
    /// `F_theta`.
    pub qfi: f64,
    /// `I_theta = K_theta * F_theta`, the information per input probe.
    pub i_theta: f64,
    pub k_theta: f64,
}

fn clamp_qfi(value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -QFI_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::NegativeQfi { value })
    }
}

/// `4 (<H^dagger H> - <H^dagger><H>)` on an already evolved state.
pub fn qfi_of_state(h: &ComplexMatrix, state: &EvolvedState) -> Result<f64> {
    let hd = h.adjoint();
    let hdh = state.expect(&(&hd * h));
    let variance = hdh - state.expect(&hd) * state.expect(h);
    clamp_qfi(4.0 * variance.re)
}

pub fn qfi_expectation(h: &ComplexMatrix, psi0: &ComplexVector, theta: f64) -> Result<QfiResult> {
    let state = evolve(h, psi0, theta)?;
    let qfi = qfi_of_state(h, &state)?;
    Ok(QfiResult {
        theta,
        qfi,
        i_theta: state.k_theta * qfi,
        k_theta: state.k_theta,
    })
}

/// QFI from `4 (<d phi|d phi> - |<d phi|phi>|^2)` with `|d phi>` taken by
/// central differences of the normalized state. Oracle route only.
pub fn qfi_derivative(h: &ComplexMatrix, psi0: &ComplexVector, theta: f64) -> Result<f64> {
    let here = evolve(h, psi0, theta)?.normalized;
    let d_phi = state_derivative(h, psi0, theta)?;
    let overlap = dot(&d_phi, &here);
    clamp_qfi(4.0 * (d_phi.norm_sqr() - overlap.norm_sqr()))
}

/// `d|phi_theta>/d theta` by central differences.
pub fn state_derivative(
    h: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
) -> Result<ComplexVector> {
    let plus = evolve(h, psi0, theta + FD_STEP)?.normalized;
    let minus = evolve(h, psi0, theta - FD_STEP)?.normalized;
    Ok((&plus - &minus).scale(C64::new(0.5 / FD_STEP, 0.0)))
}

/// `rho_theta = |phi_theta><phi_theta|`.
pub fn density(h: &ComplexMatrix, psi0: &ComplexVector, theta: f64) -> Result<ComplexMatrix> {
    Ok(ComplexMatrix::projector(
        &evolve(h, psi0, theta)?.normalized,
    ))
}

/// `d rho_theta / d theta` by central differences.
pub fn density_derivative(
    h: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
) -> Result<ComplexMatrix> {
    let plus = density(h, psi0, theta + FD_STEP)?;
    let minus = density(h, psi0, theta - FD_STEP)?;
    Ok((&plus - &minus).scale(C64::new(0.5 / FD_STEP, 0.0)))
}

/// `M - <M> I` on the given state.
pub(crate) fn deviation(m: &ComplexMatrix, state: &EvolvedState) -> ComplexMatrix {
    m.shift(-state.expect(m))
}

/// Symmetric logarithmic derivative of the pure final state,
/// `L = -2i [dH |phi><phi| - |phi><phi| dH^dagger]` with `dH = H - <H>`.
pub fn sld(h: &ComplexMatrix, psi0: &ComplexVector, theta: f64) -> Result<ComplexMatrix> {
    let state = evolve(h, psi0, theta)?;
    Ok(sld_of_state(h, &state))
}

pub fn sld_of_state(h: &ComplexMatrix, state: &EvolvedState) -> ComplexMatrix {
    let rho = ComplexMatrix::projector(&state.normalized);
    let dh = deviation(h, state);
    let commutator_like = &(&dh * &rho) - &(&rho * &dh.adjoint());
    commutator_like.scale(C64::new(0.0, -2.0))
}

/// Member `L + c dM |phi><phi| dM^dagger` of the non-unique SLD family.
/// The added term annihilates `|phi>`, so the defining equation still holds.
pub fn sld_alternative(
    h: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
    m: &ComplexMatrix,
    c: f64,
) -> Result<ComplexMatrix> {
    if m.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: m.dim(),
        });
    }
    let state = evolve(h, psi0, theta)?;
    let base = sld_of_state(h, &state);
    let dm = deviation(m, &state);
    let rho = ComplexMatrix::projector(&state.normalized);
    let extra = &(&dm * &rho) * &dm.adjoint();
    Ok(&base + &extra.scale(C64::new(c, 0.0)))
}

/// `Tr[rho L^2]` for the final state and a candidate SLD.
pub fn sld_qfi(
    h: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
    l: &ComplexMatrix,
) -> Result<f64> {
    let rho = density(h, psi0, theta)?;
    Ok((&rho * &(l * l)).trace().re)
}

/// `max |(L rho + rho L)/2 - d rho|` with `d rho` from central differences.
pub fn sld_residual(
    h: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
    l: &ComplexMatrix,
) -> Result<f64> {
    let rho = density(h, psi0, theta)?;
    let d_rho = density_derivative(h, psi0, theta)?;
    let sym = (&(l * &rho) + &(&rho * l)).scale(C64::new(0.5, 0.0));
    Ok(sym.max_abs_diff(&d_rho))
}

/// A positive operator-valued measure, validated once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let dim = first.dim();
        let mut total = ComplexMatrix::zeros(dim);
        for (k, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has dimension {}",
                    e.dim()
                )));
            }
            let dev = e.hermiticity_deviation();
            if dev > 1e-12 {
                return Err(Error::InvalidPovm(format!(
                    "element {k} not Hermitian ({dev:e})"
                )));
            }
            if !e.is_positive_semidefinite(1e-10) {
                return Err(Error::InvalidPovm(format!(
                    "element {k} not positive semidefinite"
                )));
            }
            total = &total + e;
        }
        let dev = total.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > 1e-10 {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {dev:e}"
            )));
        }
        Ok(Self { elements })
    }

    /// Rank-one projectors onto the given (orthonormal) vectors.
    pub fn projective(basis: &[ComplexVector]) -> Result<Self> {
        Self::new(basis.iter().map(ComplexMatrix::projector).collect())
    }

    pub fn computational(dim: usize) -> Self {
        let basis: Vec<_> = (0..dim).map(|k| ComplexVector::basis(dim, k)).collect();
        Self::projective(&basis).expect("computational basis is a valid POVM")
    }

    /// Projective measurement in the eigenbasis of a Hermitian `2x2` observable.
    pub fn eigenbasis_2x2(observable: &ComplexMatrix) -> Result<Self> {
        if observable.dim() != 2 {
            return Err(Error::InvalidPovm(
                "eigenbasis construction is limited to 2x2".into(),
            ));
        }
        let (_, vectors) = hermitian_eigh_2x2(observable);
        Self::projective(&vectors)
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    /// Outcome probabilities `<phi|Pi_x|phi>` on a normalized state.
    pub fn probabilities(&self, phi: &ComplexVector) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| e.expectation(phi).re)
            .collect()
    }
}

/// Classical Fisher information `sum_x (dp_x)^2 / p_x` of `povm` on the final
/// state, with `dp_x` from central differences.
pub fn classical_fisher(
    h: &ComplexMatrix,
    psi0: &ComplexVector,
    theta: f64,
    povm: &Povm,
) -> Result<f64> {
    check_inputs(h, psi0)?;
    if povm.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: povm.dim(),
        });
    }
    let p = povm.probabilities(&evolve(h, psi0, theta)?.normalized);
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidPovm(format!("probabilities sum to {total}")));
    }
    let plus = povm.probabilities(&evolve(h, psi0, theta + FD_STEP)?.normalized);
    let minus = povm.probabilities(&evolve(h, psi0, theta - FD_STEP)?.normalized);

    let mut fisher = 0.0;
    for (index, ((px, pp), pm)) in p.iter().zip(&plus).zip(&minus).enumerate() {
        let derivative = (pp - pm) / (2.0 * FD_STEP);
        if *px < 1e-12 {
            if derivative.abs() < 1e-9 {
                continue;
            }
            return Err(Error::SingularOutcome { index, derivative });
        }
        fisher += derivative * derivative / px;
    }
    Ok(fisher)
}

/// `<phi|A|phi>` derivative in closed form,
/// `Q = i [(<H^dagger A> - <A H>) - (<H^dagger> - <H>) <A>]`.
pub(crate) fn signal_derivative(h: &ComplexMatrix, a: &ComplexMatrix, state: &EvolvedState) -> C64 {
    let hd = h.adjoint();
    let a_mean = state.expect(a);
    I * ((state.expect(&(&hd * a)) - state.expect(&(a * h)))
        - (state.expect(&hd) - state.expect(h)) * a_mean)
}
