//! Run configuration files. See `docs/config.md` for the grammar.

use std::path::Path;

use anyhow::{bail, Context, Result};
use korteweg_core::ek_solver::{SolverConfig, Sources, Temporal};
use korteweg_core::flux::{FluxKind, FluxSpec, Limiter};
use korteweg_core::hamiltonian::HamiltonianStepper;
use korteweg_core::newton::NewtonOptions;
use serde::{Deserialize, Serialize};

use crate::nondim::{liu_gollub_nondimensionalize, NondimInputs, VelocityScale};
use crate::scenario::{ktest, ktest_scenario, liu_gollub, liu_gollub_scenario, DtRule, Scenario};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub liu_gollub: Option<LiuGollubSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilitySection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    /// `ktest` or `liu_gollub`
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    /// Fixed time step; overrides `dt_factor`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// `δt = dt_factor · δx²` (ktest only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    /// `lf`, `mlf`, `rusanov`, `hll` or `econs`
    pub flux: String,
    /// `fe`, `be` or `rk2`
    pub temporal: String,
    /// `none` (first order), `unlimited` or `minmod`
    #[serde(default = "default_muscl")]
    pub muscl: String,
    #[serde(default)]
    pub enforce_w: bool,
    #[serde(default)]
    pub extra_viscosity: f64,
    /// `extended`, or `original` for the baseline in `(ρ, ρu)`
    #[serde(default = "default_formulation")]
    pub formulation: String,
    /// `fixed` or `entropy_cfl`
    #[serde(default = "default_dt_rule")]
    pub dt_rule: String,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_newton_max_iter")]
    pub newton_max_iter: usize,
    /// Record diagnostics every this many steps.
    #[serde(default = "default_every")]
    pub diagnostics_every: usize,
}

fn default_muscl() -> String {
    "none".into()
}
fn default_formulation() -> String {
    "extended".into()
}
fn default_dt_rule() -> String {
    "fixed".into()
}
fn default_newton_tol() -> f64 {
    1e-10
}
fn default_newton_max_iter() -> usize {
    30
}
fn default_every() -> usize {
    1
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            flux: "rusanov".into(),
            temporal: "fe".into(),
            muscl: default_muscl(),
            enforce_w: false,
            extra_viscosity: 0.0,
            formulation: default_formulation(),
            dt_rule: default_dt_rule(),
            newton_tol: default_newton_tol(),
            newton_max_iter: default_newton_max_iter(),
            diagnostics_every: default_every(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiuGollubSection {
    pub reynolds: f64,
    pub nu: f64,
    pub g: f64,
    pub theta_deg: f64,
    pub rho: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub inlet_freq: f64,
    pub length: f64,
    /// `nusselt` or `formula`
    pub velocity_scale: VelocityScale,
}

impl Default for LiuGollubSection {
    fn default() -> Self {
        let r = NondimInputs::reference();
        Self {
            reynolds: r.reynolds,
            nu: r.nu,
            g: r.g,
            theta_deg: r.theta.to_degrees(),
            rho: r.rho,
            sigma: r.sigma,
            lambda: r.lambda,
            inlet_freq: liu_gollub::INLET_FREQ,
            length: liu_gollub::LENGTH,
            velocity_scale: VelocityScale::Nusselt,
        }
    }
}

impl LiuGollubSection {
    pub fn inputs(&self) -> NondimInputs {
        NondimInputs {
            reynolds: self.reynolds,
            nu: self.nu,
            g: self.g,
            theta: self.theta_deg.to_radians(),
            rho: self.rho,
            sigma: self.sigma,
            lambda: self.lambda,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSection {
    /// `be`, `cn` or `avf`
    pub stepper: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilitySection {
    pub c_bar: f64,
    pub u_bar: f64,
    pub sigma_bar: f64,
    pub scheme: String,
    pub temporal: String,
    pub dx: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_xi: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_text(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn solver_section(&self) -> SolverSection {
        self.solver.clone().unwrap_or_default()
    }

    /// Builds the scenario; the caller supplies the source terms to the solver.
    pub fn build_scenario(&self) -> Result<Scenario> {
        let Some(s) = &self.scenario else { bail!("missing [scenario] section") };
        let mut scenario = match s.kind.as_str() {
            "ktest" => {
                let rule = match (s.dt, s.dt_factor) {
                    (Some(dt), _) => DtRule::Fixed(dt),
                    (None, Some(k)) => DtRule::Parabolic(k),
                    (None, None) => DtRule::Parabolic(ktest::DT_FACTOR),
                };
                ktest_scenario(s.dx.unwrap_or(ktest::DEFAULT_DX), rule)?
            }
            "liu_gollub" => {
                let lg = self.liu_gollub.clone().unwrap_or_default();
                let report = liu_gollub_nondimensionalize(&lg.inputs())?;
                let mut sc = liu_gollub_scenario(
                    report.set(lg.velocity_scale),
                    lg.inlet_freq,
                    lg.length,
                    s.dx.unwrap_or(liu_gollub::DEFAULT_DX),
                )?;
                if let Some(dt) = s.dt {
                    sc.dt = dt;
                }
                sc
            }
            other => bail!("unknown scenario kind `{other}`"),
        };
        if let Some(t) = s.end_time {
            scenario.end_time = t;
            scenario.snapshot_times.retain(|x| *x < t);
            scenario.snapshot_times.push(t);
        }
        if let Some(times) = &s.snapshot_times {
            scenario.snapshot_times = times.clone();
        }
        scenario.validate()?;
        Ok(scenario)
    }
}

impl SolverSection {
    pub fn solver_config(&self, sources: Sources) -> Result<SolverConfig> {
        let Some(kind) = FluxKind::parse(&self.flux) else { bail!("unknown flux `{}`", self.flux) };
        let Some(temporal) = Temporal::parse(&self.temporal) else { bail!("unknown temporal scheme `{}`", self.temporal) };
        let muscl = match self.muscl.as_str() {
            "none" => None,
            "unlimited" => Some(Limiter::None),
            "minmod" => Some(Limiter::Minmod),
            other => bail!("unknown MUSCL option `{other}`"),
        };
        let mut config = SolverConfig::new(FluxSpec::new(kind).with_extra_viscosity(self.extra_viscosity), temporal);
        config.muscl = muscl;
        config.enforce_w_relation = self.enforce_w;
        config.sources = sources;
        config.newton = NewtonOptions { tol: self.newton_tol, max_iter: self.newton_max_iter, ..NewtonOptions::default() };
        config.validate()?;
        if !matches!(self.formulation.as_str(), "extended" | "original") {
            bail!("unknown formulation `{}`", self.formulation);
        }
        if !matches!(self.dt_rule.as_str(), "fixed" | "entropy_cfl") {
            bail!("unknown dt rule `{}`", self.dt_rule);
        }
        if self.diagnostics_every == 0 {
            bail!("diagnostics_every must be at least 1");
        }
        Ok(config)
    }
}

pub fn parse_stepper(name: &str) -> Result<HamiltonianStepper> {
    match name {
        "be" => Ok(HamiltonianStepper::BackwardEuler),
        "cn" => Ok(HamiltonianStepper::CrankNicolson),
        "avf" => Ok(HamiltonianStepper::AverageVectorField),
        other => bail!("unknown Hamiltonian stepper `{other}`"),
    }
}
