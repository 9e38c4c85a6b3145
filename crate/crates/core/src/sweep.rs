//! Declarative parameter sweeps.
//!
//! A [`SweepConfig`] is the loose, all-optional form read from TOML files,
//! presets and command-line flags. [`SweepConfig::resolve`] validates it into a
//! [`SweepSpec`], and [`run_sweep`] evaluates the requested quantity on every
//! grid node. Points where the quantity is undefined (vanishing signal,
//! annihilated state, a closed form outside its regime) stay in the table as
//! gaps tagged with [`Error::code`].
//!
//! Complex numbers in TOML are written as `[re, im]` pairs.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bosonic::{self, BosonicParams};
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::linalg::{ComplexMatrix, ComplexVector, C64, MAX_DIM};
use crate::measurement::{
    check_condition, crb_gap, deviation_vectors, error_propagation, observable_mean, signal_slope,
};
use crate::pt::{self, InitialStateSpec, PtParams, StateBasis};
use crate::qfi::qfi_expectation;
use crate::search::linspace;

pub const CSV_GAP: &str = "NA";
pub const DEFAULT_STEPS: usize = 201;

/// Loosely typed sweep description; every field is optional so that presets,
/// files and flags can be layered with [`SweepConfig::merge`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub model: Option<String>,
    pub quantity: Option<String>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub omega: Option<f64>,
    pub m: Option<f64>,
    pub phi: Option<f64>,
    pub g: Option<f64>,
    pub gamma_a: Option<f64>,
    pub gamma_b: Option<f64>,
    pub omega0: Option<f64>,
    pub theta_min: Option<f64>,
    pub theta_max: Option<f64>,
    pub steps: Option<usize>,
    /// Name of a model parameter to sweep instead of theta.
    pub param: Option<String>,
    pub param_min: Option<f64>,
    pub param_max: Option<f64>,
    /// Fixed theta for parameter sweeps.
    pub theta: Option<f64>,
    pub basis: Option<String>,
    pub psi0: Option<Vec<C64>>,
    /// State used at the exceptional point when `basis = "eigen"`.
    pub ep_psi0: Option<Vec<C64>>,
    pub matrix: Option<Vec<Vec<C64>>>,
    pub measurement: Option<Vec<Vec<C64>>>,
    pub tol: Option<f64>,
    pub repetitions: Option<u32>,
}

macro_rules! layer {
    ($base:ident, $over:ident; $($field:ident),* $(,)?) => {
        SweepConfig { $($field: $over.$field.or($base.$field),)* }
    };
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::spec("config", e.message().to_string()))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: SweepConfig) -> SweepConfig {
        let base = self;
        layer!(base, over; model, quantity, r, s, omega, m, phi, g, gamma_a, gamma_b, omega0,
            theta_min, theta_max, steps, param, param_min, param_max, theta, basis, psi0,
            ep_psi0, matrix, measurement, tol, repetitions)
    }

    pub fn resolve(&self) -> Result<SweepSpec> {
        let filled = self.with_swept_placeholder()?;
        let this = filled.as_ref().unwrap_or(self);
        this.resolve_unfilled()
    }

    /// A swept parameter needs no fixed value of its own; the grid supplies it.
    fn with_swept_placeholder(&self) -> Result<Option<SweepConfig>> {
        let (Some(name), Some(start)) = (&self.param, self.param_min) else {
            return Ok(None);
        };
        let mut cfg = self.clone();
        let slot = match Param::parse(name)? {
            Param::R => &mut cfg.r,
            Param::S => &mut cfg.s,
            Param::Omega => &mut cfg.omega,
            Param::M => &mut cfg.m,
            Param::Phi => &mut cfg.phi,
            Param::G => &mut cfg.g,
            Param::GammaA => &mut cfg.gamma_a,
            Param::GammaB => &mut cfg.gamma_b,
            Param::Omega0 => &mut cfg.omega0,
        };
        if slot.is_some() {
            return Ok(None);
        }
        *slot = Some(start);
        Ok(Some(cfg))
    }

    fn resolve_unfilled(&self) -> Result<SweepSpec> {
        let model = self.resolve_model()?;
        let quantity = match &self.quantity {
            Some(q) => Quantity::parse(q)?,
            None => Quantity::Qfi,
        };
        quantity.check_model(&model)?;
        let grid = self.resolve_grid(&model)?;
        let initial = self.resolve_initial(&model)?;
        let measurement = match &self.measurement {
            Some(rows) => {
                let a = matrix_field("measurement", rows)?;
                if a.dim() != model.dim() {
                    return Err(Error::spec(
                        "measurement",
                        format!(
                            "dimension {} does not match the model ({})",
                            a.dim(),
                            model.dim()
                        ),
                    ));
                }
                Some(a)
            }
            None => None,
        };
        let tol = finite_field(
            "tol",
            self.tol
                .unwrap_or(crate::measurement::DEFAULT_CONDITION_TOL),
        )?;
        if tol <= 0.0 {
            return Err(Error::spec("tol", "must be positive"));
        }
        let repetitions = self.repetitions.unwrap_or(1);
        if repetitions == 0 {
            return Err(Error::spec("repetitions", "must be positive"));
        }
        Ok(SweepSpec {
            model,
            quantity,
            grid,
            initial,
            measurement,
            tol,
            repetitions,
        })
    }

    fn resolve_model(&self) -> Result<ModelSpec> {
        let name = self.model.as_deref().unwrap_or("pt");
        let stray = |fields: &[(&str, bool)], model: &str| -> Result<()> {
            match fields.iter().find(|(_, set)| *set) {
                Some((field, _)) => Err(Error::spec(
                    *field,
                    format!("not a parameter of the {model} model"),
                )),
                None => Ok(()),
            }
        };
        match name {
            "pt" => {
                stray(
                    &[
                        ("g", self.g.is_some()),
                        ("gamma_a", self.gamma_a.is_some()),
                        ("gamma_b", self.gamma_b.is_some()),
                        ("omega0", self.omega0.is_some()),
                        ("matrix", self.matrix.is_some()),
                    ],
                    name,
                )?;
                let r = finite_field(
                    "r",
                    self.r
                        .ok_or_else(|| Error::spec("r", "required for the pt model"))?,
                )?;
                let s = finite_field(
                    "s",
                    self.s
                        .ok_or_else(|| Error::spec("s", "required for the pt model"))?,
                )?;
                let omega = finite_field("omega", self.omega.unwrap_or(FRAC_PI_2))?;
                if s <= 0.0 {
                    return Err(Error::spec("s", "must be positive"));
                }
                Ok(ModelSpec::Pt(PtParams { r, s, omega }))
            }
            "bosonic" => {
                stray(
                    &[
                        ("r", self.r.is_some()),
                        ("s", self.s.is_some()),
                        ("omega", self.omega.is_some()),
                        ("matrix", self.matrix.is_some()),
                    ],
                    name,
                )?;
                let g = finite_field(
                    "g",
                    self.g
                        .ok_or_else(|| Error::spec("g", "required for the bosonic model"))?,
                )?;
                let gamma_a = finite_field("gamma_a", self.gamma_a.unwrap_or(0.0))?;
                let gamma_b = finite_field("gamma_b", self.gamma_b.unwrap_or(0.0))?;
                let omega0 = finite_field("omega0", self.omega0.unwrap_or(0.0))?;
                if gamma_a < 0.0 || gamma_b < 0.0 {
                    return Err(Error::spec(
                        "gamma_a/gamma_b",
                        "dissipation rates must be nonnegative",
                    ));
                }
                Ok(ModelSpec::Bosonic(BosonicParams {
                    omega0,
                    g,
                    gamma_a,
                    gamma_b,
                }))
            }
            "custom-matrix" => {
                let rows = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::spec("matrix", "required for the custom-matrix model"))?;
                Ok(ModelSpec::Custom(matrix_field("matrix", rows)?))
            }
            other => Err(Error::spec(
                "model",
                format!("unknown model `{other}` (expected pt, bosonic or custom-matrix)"),
            )),
        }
    }

    fn resolve_grid(&self, model: &ModelSpec) -> Result<Grid> {
        let steps = self.steps.unwrap_or(DEFAULT_STEPS);
        if steps < 2 {
            return Err(Error::spec("steps", "a grid needs at least 2 steps"));
        }
        let bounds = |lo_name: &str, lo: f64, hi_name: &str, hi: f64| -> Result<(f64, f64)> {
            let lo = finite_field(lo_name, lo)?;
            let hi = finite_field(hi_name, hi)?;
            if hi <= lo {
                return Err(Error::spec(
                    hi_name,
                    format!("must exceed {lo_name} ({hi} <= {lo})"),
                ));
            }
            Ok((lo, hi))
        };
        match &self.param {
            None => {
                let max = self
                    .theta_max
                    .ok_or_else(|| Error::spec("theta_max", "required for a theta grid"))?;
                let (min, max) =
                    bounds("theta_min", self.theta_min.unwrap_or(0.0), "theta_max", max)?;
                Ok(Grid::Theta { min, max, steps })
            }
            Some(name) => {
                let param = Param::parse(name)?;
                if !param.applies_to(model) {
                    return Err(Error::spec(
                        "param",
                        format!("`{name}` is not a parameter of this model"),
                    ));
                }
                let min = self
                    .param_min
                    .ok_or_else(|| Error::spec("param_min", "required for a parameter grid"))?;
                let max = self
                    .param_max
                    .ok_or_else(|| Error::spec("param_max", "required for a parameter grid"))?;
                let (min, max) = bounds("param_min", min, "param_max", max)?;
                let theta = finite_field("theta", self.theta.unwrap_or(0.0))?;
                Ok(Grid::Param {
                    param,
                    min,
                    max,
                    steps,
                    theta,
                })
            }
        }
    }

    fn resolve_initial(&self, model: &ModelSpec) -> Result<InitialStateSpec> {
        let m = finite_field("m", self.m.unwrap_or(1.0))?;
        let phi = finite_field("phi", self.phi.unwrap_or(0.0))?;
        let explicit = |field: &str, v: &Vec<C64>| -> Result<ComplexVector> {
            let v = ComplexVector::new(v.clone()).map_err(|e| Error::spec(field, e.to_string()))?;
            if v.dim() != model.dim() {
                return Err(Error::spec(
                    field,
                    format!(
                        "dimension {} does not match the model ({})",
                        v.dim(),
                        model.dim()
                    ),
                ));
            }
            v.normalized()
                .ok_or_else(|| Error::spec(field, "zero vector"))
        };
        let ep_fallback = self
            .ep_psi0
            .as_ref()
            .map(|v| explicit("ep_psi0", v))
            .transpose()?;
        let default_basis = if self.psi0.is_some() || !matches!(model, ModelSpec::Pt(_)) {
            "explicit"
        } else {
            "eigen"
        };
        let basis = match self.basis.as_deref().unwrap_or(default_basis) {
            "explicit" => {
                let state = match (&self.psi0, model) {
                    (Some(v), _) => explicit("psi0", v)?,
                    (None, ModelSpec::Bosonic(_)) => bosonic::initial_state(),
                    (None, _) => return Err(Error::spec("psi0", "required for an explicit initial state")),
                };
                StateBasis::Explicit(state)
            }
            eigen @ ("eigen" | "eigen-unbroken" | "eigen-broken") => {
                if !matches!(model, ModelSpec::Pt(_)) {
                    return Err(Error::spec("basis", "eigen-superpositions are only defined for the pt model"));
                }
                if self.psi0.is_some() {
                    return Err(Error::spec("psi0", "conflicts with an eigen basis"));
                }
                match eigen {
                    "eigen" => StateBasis::Eigen,
                    "eigen-unbroken" => StateBasis::EigenUnbroken,
                    _ => StateBasis::EigenBroken,
                }
            }
            other => {
                return Err(Error::spec(
                    "basis",
                    format!("unknown basis `{other}` (expected eigen, eigen-unbroken, eigen-broken or explicit)"),
                ))
            }
        };
        Ok(InitialStateSpec {
            m,
            phi,
            basis,
            ep_fallback,
        })
    }
}

fn finite_field(field: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::spec(field, "must be finite"))
    }
}

fn matrix_field(field: &str, rows: &[Vec<C64>]) -> Result<ComplexMatrix> {
    if rows.len() > MAX_DIM {
        return Err(Error::spec(
            field,
            format!("dimension {} exceeds {MAX_DIM}", rows.len()),
        ));
    }
    ComplexMatrix::from_rows(rows.to_vec()).map_err(|e| Error::spec(field, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum ModelSpec {
    Pt(PtParams),
    Bosonic(BosonicParams),
    Custom(ComplexMatrix),
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Custom(h) => h.dim(),
            _ => 2,
        }
    }

    pub fn hamiltonian(&self) -> Result<ComplexMatrix> {
        match self {
            ModelSpec::Pt(p) => pt::build(p),
            ModelSpec::Bosonic(p) => bosonic::effective_hamiltonian(p),
            ModelSpec::Custom(h) => Ok(h.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Qfi,
    ITheta,
    KTheta,
    ChannelQfi,
    Variance,
    CrbGap,
    Sensor,
    Ratios,
    ConditionResidual,
}

impl Quantity {
    pub const ALL: [Quantity; 9] = [
        Quantity::Qfi,
        Quantity::ITheta,
        Quantity::KTheta,
        Quantity::ChannelQfi,
        Quantity::Variance,
        Quantity::CrbGap,
        Quantity::Sensor,
        Quantity::Ratios,
        Quantity::ConditionResidual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Qfi => "qfi",
            Quantity::ITheta => "i_theta",
            Quantity::KTheta => "k_theta",
            Quantity::ChannelQfi => "channel_qfi",
            Quantity::Variance => "variance",
            Quantity::CrbGap => "crb_gap",
            Quantity::Sensor => "sensor",
            Quantity::Ratios => "ratios",
            Quantity::ConditionResidual => "condition_residual",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|q| q.as_str() == name)
            .ok_or_else(|| Error::spec("quantity", format!("unknown quantity `{name}`")))
    }

    fn check_model(self, model: &ModelSpec) -> Result<()> {
        let pt_only = matches!(self, Quantity::ChannelQfi | Quantity::Ratios);
        if pt_only && !matches!(model, ModelSpec::Pt(_)) {
            return Err(Error::spec(
                "quantity",
                format!("`{}` is only defined for the pt model", self.as_str()),
            ));
        }
        Ok(())
    }

    /// Output columns; the first one decides the row status.
    pub fn columns(self, model: &ModelSpec) -> Vec<&'static str> {
        match self {
            Quantity::Qfi => vec!["qfi"],
            Quantity::ITheta => vec!["i_theta", "k_theta", "qfi"],
            Quantity::KTheta => vec!["k_theta"],
            Quantity::ChannelQfi => vec!["channel_qfi", "at_ep"],
            Quantity::Variance if matches!(model, ModelSpec::Pt(_)) => {
                vec!["variance", "inv_qfi", "pq"]
            }
            Quantity::Variance => vec!["variance", "inv_qfi"],
            Quantity::CrbGap => vec!["crb_gap"],
            Quantity::Sensor => vec!["expectation", "slope"],
            Quantity::Ratios => vec!["s0", "s1"],
            Quantity::ConditionResidual => vec!["residual", "c_re", "c_im", "satisfied"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    R,
    S,
    Omega,
    M,
    Phi,
    G,
    GammaA,
    GammaB,
    Omega0,
}

impl Param {
    const ALL: [Param; 9] = [
        Param::R,
        Param::S,
        Param::Omega,
        Param::M,
        Param::Phi,
        Param::G,
        Param::GammaA,
        Param::GammaB,
        Param::Omega0,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Param::R => "r",
            Param::S => "s",
            Param::Omega => "omega",
            Param::M => "m",
            Param::Phi => "phi",
            Param::G => "g",
            Param::GammaA => "gamma_a",
            Param::GammaB => "gamma_b",
            Param::Omega0 => "omega0",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == name)
            .ok_or_else(|| Error::spec("param", format!("unknown parameter `{name}`")))
    }

    fn applies_to(self, model: &ModelSpec) -> bool {
        match model {
            ModelSpec::Pt(_) => matches!(
                self,
                Param::R | Param::S | Param::Omega | Param::M | Param::Phi
            ),
            ModelSpec::Bosonic(_) => matches!(
                self,
                Param::G | Param::GammaA | Param::GammaB | Param::Omega0
            ),
            ModelSpec::Custom(_) => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    Theta {
        min: f64,
        max: f64,
        steps: usize,
    },
    Param {
        param: Param,
        min: f64,
        max: f64,
        steps: usize,
        theta: f64,
    },
}

impl Grid {
    pub fn nodes(&self) -> Vec<f64> {
        match *self {
            Grid::Theta { min, max, steps }
            | Grid::Param {
                min, max, steps, ..
            } => linspace(min, max, steps),
        }
    }

    fn columns(&self) -> Vec<&'static str> {
        match self {
            Grid::Theta { .. } => vec!["theta"],
            Grid::Param { param, .. } => vec![param.as_str(), "theta"],
        }
    }
}

/// Fully validated sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: ModelSpec,
    pub quantity: Quantity,
    pub grid: Grid,
    pub initial: InitialStateSpec,
    /// Observable for measurement-based quantities; `|0><0|` when absent.
    pub measurement: Option<ComplexMatrix>,
    pub tol: f64,
    pub repetitions: u32,
}

impl SweepSpec {
    /// Model, initial state and theta at one grid node.
    pub fn point(&self, x: f64) -> (ModelSpec, InitialStateSpec, f64) {
        let mut model = self.model.clone();
        let mut initial = self.initial.clone();
        match self.grid {
            Grid::Theta { .. } => (model, initial, x),
            Grid::Param { param, theta, .. } => {
                match (&mut model, param) {
                    (ModelSpec::Pt(p), Param::R) => p.r = x,
                    (ModelSpec::Pt(p), Param::S) => p.s = x,
                    (ModelSpec::Pt(p), Param::Omega) => p.omega = x,
                    (ModelSpec::Bosonic(p), Param::G) => p.g = x,
                    (ModelSpec::Bosonic(p), Param::GammaA) => p.gamma_a = x,
                    (ModelSpec::Bosonic(p), Param::GammaB) => p.gamma_b = x,
                    (ModelSpec::Bosonic(p), Param::Omega0) => p.omega0 = x,
                    (_, Param::M) => initial.m = x,
                    (_, Param::Phi) => initial.phi = x,
                    _ => {}
                }
                (model, initial, theta)
            }
        }
    }

    fn observable(&self) -> ComplexMatrix {
        self.measurement
            .clone()
            .unwrap_or_else(|| ComplexMatrix::projector(&ComplexVector::basis(self.model.dim(), 0)))
    }
}

fn resolve_state(model: &ModelSpec, initial: &InitialStateSpec) -> Result<ComplexVector> {
    match model {
        ModelSpec::Pt(p) => pt::initial_state(p, initial),
        _ => match &initial.basis {
            StateBasis::Explicit(v) => Ok(v.clone()),
            _ => Err(Error::InvalidParams(
                "eigen basis requires the pt model".into(),
            )),
        },
    }
}

type Cell = std::result::Result<f64, &'static str>;

fn cell(r: Result<f64>) -> Cell {
    r.map_err(|e| e.code())
}

fn spread(r: Result<Vec<f64>>, width: usize) -> Vec<Cell> {
    match r {
        Ok(values) => values.into_iter().map(Ok).collect(),
        Err(e) => vec![Err(e.code()); width],
    }
}

fn evaluate(spec: &SweepSpec, x: f64) -> (f64, Vec<Cell>) {
    let (model, initial, theta) = spec.point(x);
    let width = spec.quantity.columns(&model).len();
    if spec.quantity == Quantity::ChannelQfi {
        let ModelSpec::Pt(p) = &model else {
            unreachable!("checked at resolve")
        };
        let cells = spread(
            pt::channel_qfi(p).map(|c| vec![c.value, f64::from(u8::from(c.at_ep))]),
            width,
        );
        return (theta, cells);
    }
    let prepared = model
        .hamiltonian()
        .and_then(|h| resolve_state(&model, &initial).map(|psi| (h, psi)));
    let (h, psi) = match prepared {
        Ok(v) => v,
        Err(e) => return (theta, vec![Err(e.code()); width]),
    };
    let a = spec.observable();
    let cells = match spec.quantity {
        Quantity::Qfi => vec![cell(qfi_expectation(&h, &psi, theta).map(|r| r.qfi))],
        Quantity::ITheta => spread(
            qfi_expectation(&h, &psi, theta).map(|r| vec![r.i_theta, r.k_theta, r.qfi]),
            width,
        ),
        Quantity::KTheta => vec![cell(evolve(&h, &psi, theta).map(|s| s.k_theta))],
        Quantity::ChannelQfi => unreachable!(),
        Quantity::Variance => {
            let mut cells = vec![
                cell(error_propagation(&h, &a, &psi, theta, spec.repetitions)),
                cell(qfi_expectation(&h, &psi, theta).and_then(|r| {
                    if r.qfi > 0.0 {
                        Ok(1.0 / (f64::from(spec.repetitions) * r.qfi))
                    } else {
                        Err(Error::ZeroSignal { derivative: 0.0 })
                    }
                })),
            ];
            if let ModelSpec::Pt(p) = &model {
                let pq = if spec.measurement.is_some() {
                    Err("CUSTOM_MEASUREMENT")
                } else if matches!(initial.basis, StateBasis::Explicit(_)) {
                    Err("EXPLICIT_STATE")
                } else {
                    cell(
                        pt::variance_pq(p, initial.m, initial.phi, theta)
                            .map(|v| v / f64::from(spec.repetitions)),
                    )
                };
                cells.push(pq);
            }
            cells
        }
        Quantity::CrbGap => vec![cell(crb_gap(&h, &a, &psi, theta))],
        Quantity::Sensor => vec![
            cell(observable_mean(&h, &a, &psi, theta)),
            cell(signal_slope(&h, &a, &psi, theta)),
        ],
        Quantity::Ratios => {
            let ModelSpec::Pt(p) = &model else {
                unreachable!("checked at resolve")
            };
            spread(
                pt::hermitian_ratios(p, initial.m, initial.phi, theta).map(|(s0, s1)| vec![s0, s1]),
                width,
            )
        }
        Quantity::ConditionResidual => spread(
            deviation_vectors(&h, &a, &psi, theta)
                .and_then(|(f, g)| check_condition(&f, &g, spec.tol))
                .map(|r| {
                    vec![
                        r.residual,
                        r.c_estimate.re,
                        r.c_estimate.im,
                        f64::from(u8::from(r.satisfied)),
                    ]
                }),
            width,
        ),
    };
    (theta, cells)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    /// One entry per column; `None` marks a gap.
    pub values: Vec<Option<f64>>,
    /// `ok`, or the error code of the first value column.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub spec: SweepSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

pub fn run_sweep(spec: &SweepSpec) -> SweepResult {
    let grid_columns = spec.grid.columns();
    let mut columns: Vec<String> = grid_columns.iter().map(|c| c.to_string()).collect();
    columns.extend(
        spec.quantity
            .columns(&spec.model)
            .iter()
            .map(|c| c.to_string()),
    );

    let rows = spec
        .grid
        .nodes()
        .par_iter()
        .map(|&x| {
            let (theta, cells) = evaluate(spec, x);
            let status = match cells.first() {
                Some(Err(code)) => (*code).to_string(),
                _ => "ok".to_string(),
            };
            let mut values: Vec<Option<f64>> = match spec.grid {
                Grid::Theta { .. } => vec![Some(theta)],
                Grid::Param { .. } => vec![Some(x), Some(theta)],
            };
            values.extend(cells.into_iter().map(|c| c.ok()));
            SweepRow { values, status }
        })
        .collect();

    SweepResult {
        columns,
        rows,
        metadata: SweepMetadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            spec: spec.clone(),
        },
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed,
/// scientific notation outside `[1e-5, 1e12)`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return CSV_GAP.into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push_str(",status\n");
        for row in &self.rows {
            for v in &row.values {
                out.push_str(&v.map_or_else(|| CSV_GAP.to_string(), format_sig));
                out.push(',');
            }
            out.push_str(&row.status);
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let records: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, v) in self.columns.iter().zip(&row.values) {
                    obj.insert(
                        name.clone(),
                        v.map_or(serde_json::Value::Null, serde_json::Value::from),
                    );
                }
                obj.insert("status".into(), row.status.clone().into());
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "metadata": {
                "tool": self.metadata.tool,
                "version": self.metadata.version,
                "columns": self.columns,
                "spec": self.metadata.spec,
            },
            "records": records,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("sweep results serialize");
        text.push('\n');
        text
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Non-gap values of one column.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let Some(i) = self.column(name) else {
            return Vec::new();
        };
        self.rows.iter().filter_map(|r| r.values[i]).collect()
    }

    /// Short human-readable summary for logs.
    pub fn summary(&self) -> String {
        let gaps = self.rows.iter().filter(|r| r.status != "ok").count();
        let mut s = String::new();
        let _ = write!(s, "{} rows, {} gaps", self.rows.len(), gaps);
        s
    }
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 16] = [
    "fig1a",
    "fig1a-broken",
    "fig1b",
    "fig1b-broken",
    "fig2a",
    "fig2b",
    "fig3a",
    "fig3b",
    "fig3c",
    "fig3d",
    "fig5",
    "fig6a",
    "fig6a-near-ep",
    "fig6b",
    "fig7a",
    "fig7b",
];

fn pt_theta(
    r: f64,
    s: f64,
    m: f64,
    phi: f64,
    quantity: &str,
    theta_max: f64,
    steps: usize,
) -> SweepConfig {
    SweepConfig {
        model: Some("pt".into()),
        quantity: Some(quantity.into()),
        r: Some(r),
        s: Some(s),
        omega: Some(FRAC_PI_2),
        m: Some(m),
        phi: Some(phi),
        theta_min: Some(0.0),
        theta_max: Some(theta_max),
        steps: Some(steps),
        ..SweepConfig::default()
    }
}

/// Named recipes for the reference curves of the PT model.
pub fn preset(name: &str) -> Option<SweepConfig> {
    let cfg = match name {
        "fig1a" => pt_theta(0.25, 1.0, 1.0, 0.0, "qfi", 14.0, 1401),
        "fig1a-broken" => pt_theta(1.0, 0.25, -1.0, 0.0, "qfi", 14.0, 1401),
        "fig1b" => pt_theta(0.25, 1.0, 1.0, 0.0, "i_theta", 14.0, 1401),
        "fig1b-broken" => pt_theta(1.0, 0.25, -1.0, 0.0, "i_theta", 14.0, 1401),
        "fig2a" | "fig2b" => SweepConfig {
            model: Some("pt".into()),
            quantity: Some(
                if name == "fig2a" {
                    "qfi"
                } else {
                    "channel_qfi"
                }
                .into(),
            ),
            r: Some(2.0),
            s: Some(2.0),
            omega: Some(FRAC_PI_2),
            m: Some(1.0),
            phi: Some(0.0),
            param: Some("s".into()),
            param_min: Some(1.5),
            param_max: Some(2.5),
            steps: Some(101),
            theta: Some(0.0),
            basis: Some("eigen".into()),
            ep_psi0: Some(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
            ..SweepConfig::default()
        },
        "fig3a" => pt_theta(0.25, 0.5, 1.0, 0.0, "variance", 12.0, 601),
        "fig3b" => pt_theta(0.25, 0.5, 1.1, 0.0, "variance", 12.0, 601),
        "fig3c" => pt_theta(0.25, 0.5, 1.2, 0.0, "variance", 12.0, 601),
        "fig3d" => pt_theta(0.25, 0.5, 1.3, 0.0, "variance", 12.0, 601),
        "fig5" => pt_theta(0.4, 1.0, 1.0, PI, "i_theta", 10.0, 1001),
        "fig6a" => pt_theta(2.0, 2.1, 1.0, 0.0, "sensor", 4.0, 401),
        "fig6a-near-ep" => pt_theta(2.0, 2.01, 1.0, 0.0, "sensor", 4.0, 401),
        "fig6b" => pt_theta(2.0, 2.1, 1.0, 0.0, "qfi", 4.0, 401),
        "fig7a" => pt_theta(0.6, 1.0, 1.0, 0.0, "ratios", 10.0, 1001),
        "fig7b" => pt_theta(0.2, 1.0, 1.0, 0.0, "ratios", 10.0, 1001),
        _ => return None,
    };
    Some(cfg)
}
