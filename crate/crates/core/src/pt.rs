//! Two-level PT-symmetric model
//! `H_s = [[r e^{i omega}, s], [s, r e^{-i omega}]]`.
//!
//! With `mu = r cos(omega)` the eigenvalues are `mu ± sqrt(nu)` where
//! `nu = s^2 - r^2 sin^2(omega)`. Positive `nu` (written `nu0`) is the
//! unbroken phase with real spectrum, negative `nu` (written `-nu1`) the
//! broken phase with a complex-conjugate pair, and `nu = 0` the exceptional
//! point (EP), where the matrix is defective.
//!
//! Derived quantities used throughout:
//! `kappa = (r/s) sin(omega)`, `sin(alpha) = kappa` (unbroken only) and
//! `A = |r sin(omega)|`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::linalg::{ComplexMatrix, ComplexVector, C64};
use crate::qfi::{qfi_expectation, qfi_of_state};
use crate::search::{golden_max, linspace};

/// Default EP tolerance, relative to `s^2`.
pub const DEFAULT_EP_TOL: f64 = 1e-10;

/// Nodes per axis of the channel-QFI search grid.
pub const CHANNEL_GRID: usize = 64;

/// Bound on `|m|` in the channel-QFI search.
pub const CHANNEL_M_MAX: f64 = 3.0;

/// Values of `|m|` below this are excluded from the channel-QFI search.
pub const CHANNEL_M_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtParams {
    pub r: f64,
    pub s: f64,
    pub omega: f64,
}

impl PtParams {
    pub fn new(r: f64, s: f64, omega: f64) -> Result<Self> {
        let params = Self { r, s, omega };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.s.is_finite() && self.omega.is_finite()) {
            return Err(Error::NonFinite("PT parameters"));
        }
        if self.s <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "s must be positive, got {}",
                self.s
            )));
        }
        Ok(())
    }

    /// `r sin(omega)`, the signed gain/loss amplitude.
    pub fn gain(&self) -> f64 {
        self.r * self.omega.sin()
    }

    /// `kappa = (r/s) sin(omega)`.
    pub fn kappa(&self) -> f64 {
        self.gain() / self.s
    }

    /// `A = |r sin(omega)|`.
    pub fn a(&self) -> f64 {
        self.gain().abs()
    }

    /// `s^2 - r^2 sin^2(omega)`.
    pub fn discriminant(&self) -> f64 {
        let g = self.gain();
        self.s * self.s - g * g
    }

    fn is_quarter_turn(&self) -> bool {
        (self.omega - FRAC_PI_2).abs() < 1e-12
    }
}

pub fn build(params: &PtParams) -> Result<ComplexMatrix> {
    params.validate()?;
    let s = C64::new(params.s, 0.0);
    ComplexMatrix::from_rows(vec![
        vec![C64::from_polar(params.r, params.omega), s],
        vec![s, C64::from_polar(params.r, -params.omega)],
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTag {
    Unbroken,
    ExceptionalPoint,
    Broken,
}

impl RegimeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RegimeTag::Unbroken => "unbroken",
            RegimeTag::ExceptionalPoint => "exceptional-point",
            RegimeTag::Broken => "broken",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtRegime {
    pub tag: RegimeTag,
    /// `mu = r cos(omega)`.
    pub mu: f64,
    /// `nu0` when unbroken, `nu1` when broken, 0 at the EP.
    pub nu: f64,
}

impl PtRegime {
    pub fn sqrt_nu(&self) -> f64 {
        self.nu.sqrt()
    }
}

/// Regime classification with tolerance `ep_tol` relative to `s^2`.
pub fn classify(params: &PtParams, ep_tol: f64) -> PtRegime {
    let d = params.discriminant();
    let band = ep_tol * params.s * params.s;
    let mu = params.r * params.omega.cos();
    if d > band {
        PtRegime {
            tag: RegimeTag::Unbroken,
            mu,
            nu: d,
        }
    } else if d < -band {
        PtRegime {
            tag: RegimeTag::Broken,
            mu,
            nu: -d,
        }
    } else {
        PtRegime {
            tag: RegimeTag::ExceptionalPoint,
            mu,
            nu: 0.0,
        }
    }
}

fn require(params: &PtParams, expected: RegimeTag) -> Result<PtRegime> {
    params.validate()?;
    let regime = classify(params, DEFAULT_EP_TOL);
    if regime.tag != expected {
        return Err(Error::RegimeMismatch {
            expected: expected.as_str(),
            found: regime.tag.as_str(),
        });
    }
    Ok(regime)
}

fn require_quarter_turn(params: &PtParams) -> Result<()> {
    if params.is_quarter_turn() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "this closed form assumes omega = pi/2, got {}",
            params.omega
        )))
    }
}

/// Eigenvalues and normalized eigenvectors, ordered `(+, -)`.
///
/// Unbroken: `lambda± = mu ± sqrt(nu0)` with
/// `|lambda+> = (e^{i alpha/2}, e^{-i alpha/2})/sqrt2` and
/// `|lambda-> = i (e^{-i alpha/2}, -e^{i alpha/2})/sqrt2`.
/// Broken: `eps± = mu ± i sqrt(nu1)` with `|eps±> ∝ (i (r sin(omega) ± sqrt(nu1)), s)`.
pub fn eigensystem(params: &PtParams) -> Result<([C64; 2], [ComplexVector; 2])> {
    params.validate()?;
    let regime = classify(params, DEFAULT_EP_TOL);
    let root = regime.sqrt_nu();
    match regime.tag {
        RegimeTag::ExceptionalPoint => Err(Error::EpCoalescence),
        RegimeTag::Unbroken => {
            let half = 0.5 * params.kappa().asin();
            let norm = std::f64::consts::FRAC_1_SQRT_2;
            let plus = ComplexVector::new(vec![
                C64::from_polar(norm, half),
                C64::from_polar(norm, -half),
            ])?;
            let i = C64::new(0.0, 1.0);
            let minus = ComplexVector::new(vec![
                i * C64::from_polar(norm, -half),
                -i * C64::from_polar(norm, half),
            ])?;
            Ok((
                [
                    C64::new(regime.mu + root, 0.0),
                    C64::new(regime.mu - root, 0.0),
                ],
                [plus, minus],
            ))
        }
        RegimeTag::Broken => {
            let vector = |sign: f64| {
                let a = params.gain() + sign * root;
                ComplexVector::new(vec![C64::new(0.0, a), C64::new(params.s, 0.0)])?
                    .normalized()
                    .ok_or(Error::EpCoalescence)
            };
            Ok((
                [C64::new(regime.mu, root), C64::new(regime.mu, -root)],
                [vector(1.0)?, vector(-1.0)?],
            ))
        }
    }
}

/// The single eigenvector left at the EP, `(s, -i r sin(omega)) / (sqrt2 s)`.
pub fn coalesced_eigenvector(params: &PtParams) -> Result<ComplexVector> {
    require(params, RegimeTag::ExceptionalPoint)?;
    ComplexVector::new(vec![C64::new(params.s, 0.0), C64::new(0.0, -params.gain())])?
        .normalized()
        .ok_or(Error::EpCoalescence)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateBasis {
    /// Eigenbasis of whichever regime the parameters are in.
    Eigen,
    EigenUnbroken,
    EigenBroken,
    Explicit(ComplexVector),
}

/// `|psi0> = N (|+> + m e^{i phi} |->)` over an eigenbasis, or an explicit state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialStateSpec {
    pub m: f64,
    pub phi: f64,
    pub basis: StateBasis,
    /// State used by [`StateBasis::Eigen`] when the parameters sit on the EP.
    #[serde(default)]
    pub ep_fallback: Option<ComplexVector>,
}

impl InitialStateSpec {
    pub fn eigen(m: f64, phi: f64) -> Self {
        Self {
            m,
            phi,
            basis: StateBasis::Eigen,
            ep_fallback: None,
        }
    }

    pub fn explicit(state: ComplexVector) -> Self {
        Self {
            m: 0.0,
            phi: 0.0,
            basis: StateBasis::Explicit(state),
            ep_fallback: None,
        }
    }
}

fn superpose(pair: &[ComplexVector; 2], m: f64, phi: f64) -> Result<ComplexVector> {
    if !(m.is_finite() && phi.is_finite()) {
        return Err(Error::NonFinite("initial-state coefficients"));
    }
    let v = &pair[0] + &(&pair[1] * C64::from_polar(m, phi));
    v.normalized()
        .ok_or_else(|| Error::InvalidParams("eigen-superposition vanishes".into()))
}

pub fn initial_state(params: &PtParams, spec: &InitialStateSpec) -> Result<ComplexVector> {
    let regime = || classify(params, DEFAULT_EP_TOL).tag;
    match &spec.basis {
        StateBasis::Explicit(v) => v.normalized().ok_or(Error::NotNormalized { norm_sqr: 0.0 }),
        StateBasis::EigenUnbroken => {
            require(params, RegimeTag::Unbroken)?;
            superpose(&eigensystem(params)?.1, spec.m, spec.phi)
        }
        StateBasis::EigenBroken => {
            require(params, RegimeTag::Broken)?;
            superpose(&eigensystem(params)?.1, spec.m, spec.phi)
        }
        StateBasis::Eigen => {
            params.validate()?;
            if regime() == RegimeTag::ExceptionalPoint {
                return match &spec.ep_fallback {
                    Some(v) => v.normalized().ok_or(Error::EpCoalescence),
                    None => Err(Error::EpCoalescence),
                };
            }
            superpose(&eigensystem(params)?.1, spec.m, spec.phi)
        }
    }
}

/// `16 m^2 nu0^2 / [(1+m^2) s + 2 m r sin(omega) cos(2 sqrt(nu0) theta + phi)]^2`.
pub fn qfi_closed_unbroken(params: &PtParams, m: f64, phi: f64, theta: f64) -> Result<f64> {
    let regime = require(params, RegimeTag::Unbroken)?;
    let nu0 = regime.nu;
    let phase = 2.0 * nu0.sqrt() * theta + phi;
    let den = (1.0 + m * m) * params.s + 2.0 * m * params.gain() * phase.cos();
    Ok(16.0 * m * m * nu0 * nu0 / (den * den))
}

/// `16 m^2 nu1^2 e^{4x} / [A (e^{4x} + m^2) + 2 m s e^{2x} cos(phi)]^2`, `x = sqrt(nu1) theta`.
///
/// Evaluated after dividing through by `e^{4x}`, which keeps large `theta` finite.
pub fn qfi_closed_broken(params: &PtParams, m: f64, phi: f64, theta: f64) -> Result<f64> {
    let regime = require(params, RegimeTag::Broken)?;
    let nu1 = regime.nu;
    let x = nu1.sqrt() * theta;
    let den =
        params.a() * ((2.0 * x).exp() + m * m * (-2.0 * x).exp()) + 2.0 * m * params.s * phi.cos();
    Ok(16.0 * m * m * nu1 * nu1 / (den * den))
}

/// Largest QFI over θ for the eigen-superposition `(m, phi)` in the broken
/// regime, and where it occurs: `theta* = ln|m| / (2 sqrt(nu1))`, which equals
/// `ln(m^2) / (4 sqrt(nu1))`. A negative `theta*` means the curve only decays
/// on `theta >= 0`.
pub fn peak_broken(params: &PtParams, m: f64, phi: f64) -> Result<(f64, f64)> {
    let regime = require(params, RegimeTag::Broken)?;
    if m == 0.0 {
        return Err(Error::InvalidParams(
            "m = 0 is an eigenstate with no peak".into(),
        ));
    }
    let theta = m.abs().ln() / (2.0 * regime.sqrt_nu());
    let value = qfi_closed_broken(params, m, phi, theta)?;
    Ok((theta, value))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelQfi {
    pub value: f64,
    pub at_ep: bool,
}

/// Channel QFI `4 (s + |r sin(omega)|)^2`; zero, flagged, at the EP.
pub fn channel_qfi(params: &PtParams) -> Result<ChannelQfi> {
    params.validate()?;
    if classify(params, DEFAULT_EP_TOL).tag == RegimeTag::ExceptionalPoint {
        return Ok(ChannelQfi {
            value: 0.0,
            at_ep: true,
        });
    }
    let sum = params.s + params.a();
    Ok(ChannelQfi {
        value: 4.0 * sum * sum,
        at_ep: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelOptimum {
    pub value: f64,
    pub m: f64,
    pub phi: f64,
    pub theta: f64,
}

/// Numeric channel QFI: the generic engine maximized over eigen-superpositions.
///
/// Searches `m` in `[-3, 3]` with `|m| >= 1e-3`, `phi` in `[0, 2 pi)` and
/// `theta` in `[0, 4 pi / sqrt(nu)]` on a 64-node grid per axis, then refines
/// each coordinate once by golden section within one grid step.
pub fn channel_qfi_numeric(params: &PtParams) -> Result<ChannelOptimum> {
    params.validate()?;
    let regime = classify(params, DEFAULT_EP_TOL);
    if regime.tag == RegimeTag::ExceptionalPoint {
        return Err(Error::EpCoalescence);
    }
    let h = build(params)?;
    let pair = eigensystem(params)?.1;
    let theta_max = 4.0 * PI / regime.sqrt_nu();

    let eval = |m: f64, phi: f64, theta: f64| -> f64 {
        superpose(&pair, m, phi)
            .and_then(|psi| qfi_expectation(&h, &psi, theta))
            .map_or(f64::NAN, |r| r.qfi)
    };

    let ms: Vec<f64> = linspace(-CHANNEL_M_MAX, CHANNEL_M_MAX, CHANNEL_GRID)
        .into_iter()
        .filter(|m| m.abs() >= CHANNEL_M_MIN)
        .collect();
    let phis: Vec<f64> = (0..CHANNEL_GRID)
        .map(|j| TAU * j as f64 / CHANNEL_GRID as f64)
        .collect();
    let thetas = linspace(0.0, theta_max, CHANNEL_GRID);
    let us: Vec<ComplexMatrix> = thetas
        .iter()
        .map(|&t| crate::linalg::mat_exp(&h, t))
        .collect();

    let best = ms
        .par_iter()
        .map(|&m| {
            let mut best = (f64::NEG_INFINITY, m, 0.0, 0.0);
            for &phi in &phis {
                let Ok(psi) = superpose(&pair, m, phi) else {
                    continue;
                };
                for (&theta, u) in thetas.iter().zip(&us) {
                    let value = state_qfi(&h, u, &psi, theta);
                    if value > best.0 {
                        best = (value, m, phi, theta);
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, 0.0, 0.0, 0.0),
            |a, b| if b.0 > a.0 { b } else { a },
        );
    if !best.0.is_finite() {
        return Err(Error::NonFinite("channel QFI search"));
    }

    let (mut value, mut m, mut phi, mut theta) = best;
    let dm = 2.0 * CHANNEL_M_MAX / (CHANNEL_GRID - 1) as f64;
    let dphi = TAU / CHANNEL_GRID as f64;
    let dtheta = theta_max / (CHANNEL_GRID - 1) as f64;
    let tol = 1e-10;

    let (lo, hi) = if m > 0.0 {
        ((m - dm).max(CHANNEL_M_MIN), (m + dm).min(CHANNEL_M_MAX))
    } else {
        ((m - dm).max(-CHANNEL_M_MAX), (m + dm).min(-CHANNEL_M_MIN))
    };
    let (x, v) = golden_max(|x| eval(x, phi, theta), lo, hi, tol);
    if v > value {
        (m, value) = (x, v);
    }
    let (x, v) = golden_max(|x| eval(m, x, theta), phi - dphi, phi + dphi, tol);
    if v > value {
        (phi, value) = (x.rem_euclid(TAU), v);
    }
    let (x, v) = golden_max(
        |x| eval(m, phi, x),
        (theta - dtheta).max(0.0),
        (theta + dtheta).min(theta_max),
        tol,
    );
    if v > value {
        (theta, value) = (x, v);
    }
    Ok(ChannelOptimum {
        value,
        m,
        phi,
        theta,
    })
}

fn state_qfi(h: &ComplexMatrix, u: &ComplexMatrix, psi: &ComplexVector, theta: f64) -> f64 {
    let raw = u.apply(psi);
    let k_theta = raw.norm_sqr();
    if !(k_theta.is_finite() && k_theta > crate::evolution::K_COLLAPSE_THRESHOLD) {
        return f64::NAN;
    }
    let normalized = raw.scale(C64::new(1.0 / k_theta.sqrt(), 0.0));
    let state = crate::evolution::EvolvedState {
        theta,
        raw,
        k_theta,
        normalized,
    };
    qfi_of_state(h, &state).unwrap_or(f64::NAN)
}

/// QFI at the EP for an arbitrary initial state, through the defective-limit
/// exponential. Zero for the coalesced eigenvector, generally nonzero otherwise.
pub fn qfi_at_ep(params: &PtParams, psi0: &ComplexVector, theta: f64) -> Result<f64> {
    require(params, RegimeTag::ExceptionalPoint)?;
    Ok(qfi_expectation(&build(params)?, psi0, theta)?.qfi)
}

fn gamma0_and_beta(params: &PtParams, phi: f64, theta: f64) -> Result<(f64, f64, f64)> {
    require_quarter_turn(params)?;
    let regime = require(params, RegimeTag::Unbroken)?;
    let kappa = params.r / params.s;
    let gamma0 = regime.sqrt_nu() * theta + 0.5 * phi;
    let beta = PI - kappa.asin();
    Ok((kappa, gamma0, beta))
}

/// Error-propagation variance `p/q` of the `|0><0|` measurement for
/// `omega = pi/2` and a single repetition.
///
/// With `kappa = r/s`, `gamma0 = sqrt(nu0) theta + phi/2`, `beta = pi - asin(kappa)`,
/// `D = 1 + m^2 + 2 m kappa cos(2 gamma0)` and `S = sin(2 gamma0 + beta)`:
///
/// `p = D^2 (1 + m^2 + 2 m S) (1 + m^2 - 2 m S + 4 m kappa cos(2 gamma0))`,
/// `q = 16 m^2 nu0 (1 - kappa^2) [2 m kappa + (1 + m^2) cos(2 gamma0)]^2`.
pub fn variance_pq(params: &PtParams, m: f64, phi: f64, theta: f64) -> Result<f64> {
    let (kappa, gamma0, beta) = gamma0_and_beta(params, phi, theta)?;
    let nu0 = params.discriminant();
    let c = (2.0 * gamma0).cos();
    let sn = (2.0 * gamma0 + beta).sin();
    let mm = 1.0 + m * m;
    let d = mm + 2.0 * m * kappa * c;
    let p = d * d * (mm + 2.0 * m * sn) * (mm - 2.0 * m * sn + 4.0 * m * kappa * c);
    let slope = 2.0 * m * kappa + mm * c;
    let q = 16.0 * m * m * nu0 * (1.0 - kappa * kappa) * slope * slope;
    if slope.abs() < 1e-12 || m == 0.0 {
        return Err(Error::ZeroSignal { derivative: slope });
    }
    Ok(p / q)
}

/// Real constant `C` in `|f> = i C |g>` for `omega = pi/2`, `m = 1` and the
/// `|0><0|` measurement: `C = -2 nu0 / (s (cos(2 gamma0) + kappa))`.
pub fn optimal_condition_constant(params: &PtParams, phi: f64, theta: f64) -> Result<f64> {
    let (kappa, gamma0, _) = gamma0_and_beta(params, phi, theta)?;
    let den = params.s * ((2.0 * gamma0).cos() + kappa);
    if den.abs() < 1e-12 {
        return Err(Error::ZeroSignal { derivative: den });
    }
    Ok(-2.0 * params.discriminant() / den)
}

/// `<X>_theta` for `X = |0><0|` and the initial state `m = 1, phi = 0`:
/// `[1 - sin(2 theta sqrt(nu0) - alpha)] / [2 + 2 sin(alpha) cos(2 theta sqrt(nu0))]`.
pub fn sensor_expectation(params: &PtParams, theta: f64) -> Result<f64> {
    let regime = require(params, RegimeTag::Unbroken)?;
    let sin_alpha = params.kappa();
    let alpha = sin_alpha.asin();
    let x = 2.0 * theta * regime.sqrt_nu();
    Ok((1.0 - (x - alpha).sin()) / (2.0 + 2.0 * sin_alpha * x.cos()))
}

/// Ratios of the PT QFI to two Hermitian references of the same energy scale,
/// `S0 = F / (4 nu0)` and `S1 = F / (4 r^2)`.
pub fn hermitian_ratios(params: &PtParams, m: f64, phi: f64, theta: f64) -> Result<(f64, f64)> {
    require_quarter_turn(params)?;
    let kappa = params.r / params.s;
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::InvalidParams(format!(
            "ratios need 0 < r/s < 1, got {kappa}"
        )));
    }
    let f = qfi_closed_unbroken(params, m, phi, theta)?;
    Ok((
        f / (4.0 * params.discriminant()),
        f / (4.0 * params.r * params.r),
    ))
}

/// Evolves `psi0` and returns `<X>` with `X = |0><0|`; convenience for sensor sweeps.
pub fn ket0_population(params: &PtParams, psi0: &ComplexVector, theta: f64) -> Result<f64> {
    let st = evolve(&build(params)?, psi0, theta)?;
    Ok(st.normalized[0].norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inner;
    use crate::measurement::{check_condition, deviation_vectors, error_propagation};

    fn fig1_unbroken() -> PtParams {
        PtParams::new(0.25, 1.0, FRAC_PI_2).unwrap()
    }

    fn fig1_broken() -> PtParams {
        PtParams::new(1.0, 0.25, FRAC_PI_2).unwrap()
    }

    fn ket0_proj() -> ComplexMatrix {
        ComplexMatrix::projector(&ComplexVector::basis(2, 0))
    }

    #[test]
    fn build_examples() {
        let h = build(&PtParams::new(0.0, 1.0, 0.7).unwrap()).unwrap();
        assert!(
            h.max_abs_diff(&ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap())
                < 1e-16
        );
        let ep = build(&PtParams::new(2.0, 2.0, FRAC_PI_2).unwrap()).unwrap();
        assert!((ep[(0, 0)] - C64::new(0.0, 2.0)).norm() < 1e-15);
        assert!((ep[(1, 1)] - C64::new(0.0, -2.0)).norm() < 1e-15);
        assert!(!ep.is_hermitian(1e-12));
        assert!(build(&PtParams {
            r: 1.0,
            s: 0.0,
            omega: 0.0
        })
        .is_err());
        assert!(PtParams::new(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn classification() {
        let u = classify(&fig1_unbroken(), DEFAULT_EP_TOL);
        assert_eq!(u.tag, RegimeTag::Unbroken);
        assert!((u.nu - 0.9375).abs() < 1e-15);
        let b = classify(&fig1_broken(), DEFAULT_EP_TOL);
        assert_eq!(b.tag, RegimeTag::Broken);
        assert!((b.nu - 0.9375).abs() < 1e-15);
        let ep = classify(&PtParams::new(2.0, 2.0, FRAC_PI_2).unwrap(), DEFAULT_EP_TOL);
        assert_eq!(ep.tag, RegimeTag::ExceptionalPoint);
        assert_eq!(ep.nu, 0.0);
    }

    #[test]
    fn eigenvectors_and_overlaps() {
        let (vals, vecs) = eigensystem(&fig1_unbroken()).unwrap();
        assert!((inner(&vecs[0], &vecs[1]).unwrap() - C64::new(0.25, 0.0)).norm() < 1e-15);
        let h = build(&fig1_unbroken()).unwrap();
        for k in 0..2 {
            assert!((&h.apply(&vecs[k]) - &vecs[k].scale(vals[k])).norm() < 1e-12);
        }

        let p = fig1_broken();
        let (vals, vecs) = eigensystem(&p).unwrap();
        let overlap = inner(&vecs[0], &vecs[1]).unwrap();
        assert!((overlap.norm() - 1.0 / p.kappa().abs()).abs() < 1e-12);
        let h = build(&p).unwrap();
        for k in 0..2 {
            assert!((&h.apply(&vecs[k]) - &vecs[k].scale(vals[k])).norm() < 1e-12);
        }
        assert!(vals[0].im > 0.0);

        let (vals, vecs) = eigensystem(&PtParams::new(0.0, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(vals, [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
        assert!(inner(&vecs[0], &vecs[1]).unwrap().norm() < 1e-15);

        assert_eq!(
            eigensystem(&PtParams::new(2.0, 2.0, FRAC_PI_2).unwrap()),
            Err(Error::EpCoalescence)
        );
    }

    #[test]
    fn initial_state_bases() {
        let spec = InitialStateSpec::eigen(1.0, 0.0);
        let psi = initial_state(&fig1_unbroken(), &spec).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-14);
        let wrong = InitialStateSpec {
            basis: StateBasis::EigenBroken,
            ..spec.clone()
        };
        assert!(matches!(
            initial_state(&fig1_unbroken(), &wrong),
            Err(Error::RegimeMismatch { .. })
        ));
        let ep = PtParams::new(2.0, 2.0, FRAC_PI_2).unwrap();
        assert_eq!(initial_state(&ep, &spec), Err(Error::EpCoalescence));
        let with_fallback = InitialStateSpec {
            ep_fallback: Some(ComplexVector::basis(2, 0)),
            ..spec
        };
        assert_eq!(
            initial_state(&ep, &with_fallback).unwrap(),
            ComplexVector::basis(2, 0)
        );
    }

    #[test]
    fn normalization_coefficient_oscillates() {
        // K_theta ∝ 1 + m^2 + 2 m sin(alpha) cos(2 sqrt(nu0) theta + phi)
        let p = fig1_unbroken();
        let psi = initial_state(&p, &InitialStateSpec::eigen(1.0, 0.0)).unwrap();
        let h = build(&p).unwrap();
        let nu0 = p.discriminant();
        let shape = |t: f64| 2.0 + 0.5 * (2.0 * nu0.sqrt() * t).cos();
        let ratio0 = evolve(&h, &psi, 0.0).unwrap().k_theta / shape(0.0);
        for t in [0.3, 1.7, 4.0, 9.1] {
            let ratio = evolve(&h, &psi, t).unwrap().k_theta / shape(t);
            assert!((ratio - ratio0).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms_match_engine() {
        let p = fig1_unbroken();
        let h = build(&p).unwrap();
        for (m, phi) in [(1.0, 0.0), (0.7, 1.1), (-1.4, 2.5)] {
            let psi = initial_state(&p, &InitialStateSpec::eigen(m, phi)).unwrap();
            for t in linspace(0.0, 10.0, 41) {
                let engine = qfi_expectation(&h, &psi, t).unwrap().qfi;
                assert!((qfi_closed_unbroken(&p, m, phi, t).unwrap() - engine).abs() < 1e-8);
            }
        }
        let p = fig1_broken();
        let h = build(&p).unwrap();
        for (m, phi) in [(-1.0, 0.0), (0.5, 0.4), (-2.0, 3.0)] {
            let psi = initial_state(&p, &InitialStateSpec::eigen(m, phi)).unwrap();
            for t in linspace(0.0, 5.0, 41) {
                let engine = qfi_expectation(&h, &psi, t).unwrap().qfi;
                assert!((qfi_closed_broken(&p, m, phi, t).unwrap() - engine).abs() < 1e-8);
            }
        }
        assert!(qfi_closed_broken(&p, -1.0, 0.0, 500.0).unwrap() < 1e-300);
        assert_eq!(
            qfi_closed_unbroken(&fig1_unbroken(), 0.0, 0.0, 2.0).unwrap(),
            0.0
        );
        assert!(matches!(
            qfi_closed_unbroken(&p, 1.0, 0.0, 1.0),
            Err(Error::RegimeMismatch { .. })
        ));
    }

    #[test]
    fn broken_peak() {
        let p = fig1_broken();
        let (theta, value) = peak_broken(&p, -1.0, 0.0).unwrap();
        assert_eq!(theta, 0.0);
        assert!((value - 6.25).abs() < 1e-12);
        let (theta, value) = peak_broken(&p, -2.0, 0.0).unwrap();
        let nu1 = classify(&p, DEFAULT_EP_TOL).nu;
        assert!((theta - 4f64.ln() / (4.0 * nu1.sqrt())).abs() < 1e-15);
        assert!((value - 6.25).abs() < 1e-12);
        for dt in [-1e-3, 1e-3] {
            assert!(qfi_closed_broken(&p, -2.0, 0.0, theta + dt).unwrap() < value);
        }
    }

    #[test]
    fn channel_values() {
        for p in [fig1_unbroken(), fig1_broken()] {
            let c = channel_qfi(&p).unwrap();
            assert!((c.value - 6.25).abs() < 1e-12);
            assert!(!c.at_ep);
        }
        let ep = channel_qfi(&PtParams::new(2.0, 2.0, FRAC_PI_2).unwrap()).unwrap();
        assert_eq!(
            ep,
            ChannelQfi {
                value: 0.0,
                at_ep: true
            }
        );
        let near = channel_qfi(&PtParams::new(2.0, 2.0 + 1e-6, FRAC_PI_2).unwrap()).unwrap();
        assert!((near.value - 64.0).abs() < 1e-4);
    }

    #[test]
    fn ep_behaviour() {
        let p = PtParams::new(2.0, 2.0, FRAC_PI_2).unwrap();
        let f = qfi_at_ep(&p, &ComplexVector::basis(2, 0), 0.0).unwrap();
        assert!((f - 16.0).abs() < 1e-9);
        let v = coalesced_eigenvector(&p).unwrap();
        let expected = ComplexVector::new(vec![C64::new(1.0, 0.0), C64::new(0.0, -1.0)])
            .unwrap()
            .normalized()
            .unwrap();
        assert!((&v - &expected).norm() < 1e-15);
        for t in [0.0, 0.4, 2.0] {
            assert!(qfi_at_ep(&p, &v, t).unwrap() < 1e-9);
        }
        for t in linspace(0.0, 1.0, 51) {
            assert!(qfi_at_ep(&p, &ComplexVector::basis(2, 0), t)
                .unwrap()
                .is_finite());
        }
        assert!(qfi_at_ep(&fig1_unbroken(), &v, 0.0).is_err());
    }

    #[test]
    fn pq_matches_error_propagation() {
        for (r, s, m, phi) in [
            (0.25, 0.5, 1.0, 0.0),
            (0.25, 0.5, 1.2, 0.0),
            (0.3, 1.0, 0.7, 0.4),
            (-0.3, 1.0, 1.3, 1.0),
        ] {
            let p = PtParams::new(r, s, FRAC_PI_2).unwrap();
            let h = build(&p).unwrap();
            let psi = initial_state(&p, &InitialStateSpec::eigen(m, phi)).unwrap();
            for t in linspace(0.05, 10.0, 37) {
                let (Ok(pq), Ok(ep)) = (
                    variance_pq(&p, m, phi, t),
                    error_propagation(&h, &ket0_proj(), &psi, t, 1),
                ) else {
                    continue;
                };
                assert!(
                    (pq / ep - 1.0).abs() < 1e-6,
                    "r={r} s={s} m={m} phi={phi} t={t}: {pq} vs {ep}"
                );
            }
        }
        let p = PtParams::new(0.25, 0.5, 1.0).unwrap();
        assert!(variance_pq(&p, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn condition_constant_matches_least_squares() {
        for (r, s, phi) in [(0.25, 0.5, 0.0), (0.6, 1.0, 0.7)] {
            let p = PtParams::new(r, s, FRAC_PI_2).unwrap();
            let h = build(&p).unwrap();
            let psi = initial_state(&p, &InitialStateSpec::eigen(1.0, phi)).unwrap();
            for t in [0.3, 1.1, 2.5] {
                let (f, g) = deviation_vectors(&h, &ket0_proj(), &psi, t).unwrap();
                let report = check_condition(&f, &g, 1e-8).unwrap();
                assert!(report.satisfied);
                let c = optimal_condition_constant(&p, phi, t).unwrap();
                assert!((report.c_estimate.re - c).abs() < 1e-9 * c.abs().max(1.0));
            }
        }
    }

    #[test]
    fn sensor_matches_engine() {
        let p = PtParams::new(2.0, 3.0, FRAC_PI_2).unwrap();
        let psi = initial_state(&p, &InitialStateSpec::eigen(1.0, 0.0)).unwrap();
        assert!((sensor_expectation(&p, 0.0).unwrap() - 0.5).abs() < 1e-15);
        for t in linspace(0.0, 4.0, 41) {
            let engine = ket0_population(&p, &psi, t).unwrap();
            assert!((sensor_expectation(&p, t).unwrap() - engine).abs() < 1e-10);
        }
    }

    #[test]
    fn ratio_maxima() {
        let max_over = |p: &PtParams, pick: fn((f64, f64)) -> f64| {
            crate::search::grid_then_golden(
                |t| hermitian_ratios(p, 1.0, 0.0, t).map_or(f64::NAN, pick),
                0.0,
                10.0,
                2001,
                1e-12,
            )
            .1
        };
        let p = PtParams::new(0.6, 1.0, FRAC_PI_2).unwrap();
        assert!((max_over(&p, |r| r.0) - 4.0).abs() < 1e-6);
        let p = PtParams::new(0.2, 1.0, FRAC_PI_2).unwrap();
        assert!((max_over(&p, |r| r.1) - 36.0).abs() < 1e-4);
        let (s0, s1) = hermitian_ratios(&p, 1.0, 0.0, 0.77).unwrap();
        assert!((s0 * 4.0 * p.discriminant() - s1 * 4.0 * p.r * p.r).abs() < 1e-12);
    }
}
