//! JSON experiment configuration: strict parsing (unknown keys are
//! rejected), documented defaults, and the fully resolved echo that every
//! run writes next to its outputs.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use std::path::Path;
use wprobe_core::correlators::{
    closed_form_pullback, mode_integral_correlator, single_mode_correlator, CorrelatorSpec,
    FieldState,
};
use wprobe_core::protocol::Route;
use wprobe_core::switching::ToothShape;
use wprobe_core::trajectories::Worldline;
use wprobe_core::{QuadConfig64, StationaryCorrelator64};

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RawConfig {
    pub detector: Option<DetectorSection>,
    pub field: Option<FieldSection>,
    pub state: Option<StateSection>,
    pub trajectory: Option<TrajectorySection>,
    pub comb: Option<CombSection>,
    pub protocol: Option<ProtocolSection>,
    pub sweep: Option<SweepSection>,
    pub scaling: Option<ScalingSection>,
    pub quadrature: Option<QuadratureSection>,
    pub regulator: Option<RegulatorSection>,
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorSection {
    pub gap: f64,
    pub lambda: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        DetectorSection {
            gap: 1.0,
            lambda: 0.01,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldSection {
    pub mass: f64,
    pub dim: usize,
}

impl Default for FieldSection {
    fn default() -> Self {
        FieldSection { mass: 0.0, dim: 3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSection {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
}

impl Default for StateSection {
    fn default() -> Self {
        StateSection {
            kind: "vacuum".into(),
            beta: None,
            omega: None,
            n: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrajectorySection {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        TrajectorySection {
            kind: "inertial".into(),
            a: None,
            v: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CombSection {
    pub shape: String,
    pub eta: f64,
    pub tau0: f64,
    pub zeta: f64,
    pub teeth: usize,
}

impl Default for CombSection {
    fn default() -> Self {
        CombSection {
            shape: "gaussian".into(),
            eta: 0.05,
            tau0: 0.0,
            zeta: 1.0,
            teeth: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolSection {
    pub zeta_grid: Vec<f64>,
    pub tau0: f64,
    pub k_even: usize,
    pub k_quarter: usize,
    pub route: String,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        ProtocolSection {
            zeta_grid: vec![0.5, 1.0, 2.0],
            tau0: 0.0,
            k_even: 1,
            k_quarter: 1,
            route: "measured".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub etas: Vec<f64>,
    pub extrapolation_order: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            etas: vec![0.2, 0.1, 0.05, 0.025],
            extrapolation_order: 2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingSection {
    pub dims: Vec<usize>,
    pub etas: Vec<f64>,
}

impl Default for ScalingSection {
    fn default() -> Self {
        ScalingSection {
            dims: vec![3],
            etas: vec![
                0.1,
                0.063095734448019331,
                0.039810717055349734,
                0.025118864315095801,
                0.015848931924611134,
                0.01,
            ],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureSection {
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        QuadratureSection {
            tol: 1e-9,
            max_depth: 12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegulatorSection {
    pub epsilon: f64,
}

impl Default for RegulatorSection {
    fn default() -> Self {
        RegulatorSection { epsilon: 1e-3 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: String,
    pub stem: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: "out".into(),
            stem: "run".into(),
        }
    }
}

/// The configuration with every default applied; echoed as JSON into the
/// output directory so a run can be reproduced from its artifacts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedConfig {
    pub detector: DetectorSection,
    pub field: FieldSection,
    pub state: StateSection,
    pub trajectory: TrajectorySection,
    pub comb: CombSection,
    pub protocol: ProtocolSection,
    pub sweep: SweepSection,
    pub scaling: ScalingSection,
    pub quadrature: QuadratureSection,
    pub regulator: RegulatorSection,
    pub output: OutputSection,
}

impl ResolvedConfig {
    pub fn from_raw(raw: RawConfig) -> Self {
        ResolvedConfig {
            detector: raw.detector.unwrap_or_default(),
            field: raw.field.unwrap_or_default(),
            state: raw.state.unwrap_or_default(),
            trajectory: raw.trajectory.unwrap_or_default(),
            comb: raw.comb.unwrap_or_default(),
            protocol: raw.protocol.unwrap_or_default(),
            sweep: raw.sweep.unwrap_or_default(),
            scaling: raw.scaling.unwrap_or_default(),
            quadrature: raw.quadrature.unwrap_or_default(),
            regulator: raw.regulator.unwrap_or_default(),
            output: raw.output.unwrap_or_default(),
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        // accept either a raw (partial) config or a resolved echo
        let raw: RawConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(ResolvedConfig::from_raw(raw))
    }

    pub fn tooth_shape(&self) -> anyhow::Result<ToothShape> {
        match self.comb.shape.as_str() {
            "gaussian" => Ok(ToothShape::Gaussian),
            "smooth_bump" => Ok(ToothShape::SmoothBump),
            other => bail!("comb.shape: unknown shape `{other}` (gaussian | smooth_bump)"),
        }
    }

    pub fn route(&self) -> anyhow::Result<Route> {
        match self.protocol.route.as_str() {
            "measured" => Ok(Route::Measured),
            "direct" => Ok(Route::Direct),
            other => bail!("protocol.route: unknown route `{other}` (measured | direct)"),
        }
    }

    pub fn worldline(&self) -> anyhow::Result<Worldline<f64>> {
        match self.trajectory.kind.as_str() {
            "inertial" => Ok(Worldline::inertial(
                self.trajectory.v.unwrap_or(0.0),
                0.0,
                self.field.dim,
            )?),
            "uniformly_accelerated" => Ok(Worldline::uniformly_accelerated(
                self.trajectory.a.unwrap_or(1.0),
                self.field.dim,
            )?),
            other => bail!(
                "trajectory.kind: unknown kind `{other}` (inertial | uniformly_accelerated)"
            ),
        }
    }

    /// Correlator selection: single-mode states use the toy kernel; massless
    /// three-dimensional vacuum/thermal states use the closed forms; other
    /// inertial vacua fall back to the spectral route.
    pub fn correlator(&self) -> anyhow::Result<StationaryCorrelator64> {
        let trajectory = self.worldline()?;
        let state = match self.state.kind.as_str() {
            "vacuum" => FieldState::Vacuum,
            "thermal" => FieldState::Thermal {
                beta: self
                    .state
                    .beta
                    .ok_or_else(|| anyhow::anyhow!("state.beta required for thermal states"))?,
            },
            "single_mode" => {
                let omega = self.state.omega.unwrap_or(1.0);
                let n = self.state.n.unwrap_or(0.0);
                return Ok(single_mode_correlator(omega, n)?);
            }
            other => bail!("state.kind: unknown state `{other}` (vacuum | thermal | single_mode)"),
        };
        let spec = CorrelatorSpec {
            mass: self.field.mass,
            dim: self.field.dim,
            state,
            trajectory,
            epsilon: self.regulator.epsilon,
        };
        if spec.mass == 0.0 && spec.dim == 3 {
            Ok(closed_form_pullback(&spec)?)
        } else {
            Ok(mode_integral_correlator(&spec)?)
        }
    }

    pub fn quad(&self) -> QuadConfig64 {
        QuadConfig64 {
            rel_tol: self.quadrature.tol,
            abs_tol: 1e-13,
            max_depth: self.quadrature.max_depth,
            max_panels: 40_000,
        }
    }
}
