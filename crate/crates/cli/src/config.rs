//! Scenario configuration: JSON schema, defaults and validation.

use std::path::Path;

use bc_core::disk_cavity::{DiskModeModel, DiskModelSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::preset::BoundarySpec;

/// A config file is either `{"scenarios": [...]}` or a bare array.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    Wrapped { scenarios: Vec<Value> },
    Bare(Vec<Value>),
}

#[derive(Debug, Clone)]
pub struct Config {
    pub scenarios: Vec<Scenario>,
    /// SHA-256 of the raw config bytes.
    pub input_hash: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct Scenario {
    pub id: String,
    #[serde(flatten)]
    pub body: ScenarioBody,
    /// SHA-256 of the scenario's canonical JSON.
    #[serde(skip)]
    pub input_hash: String,
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self.body {
            ScenarioBody::Compose(_) => "compose",
            ScenarioBody::Spectrum(_) => "spectrum",
            ScenarioBody::Trotter(_) => "trotter",
            ScenarioBody::Penalty(_) => "penalty",
            ScenarioBody::Disk(_) => "disk",
            ScenarioBody::Halfplane(_) => "halfplane",
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScenarioBody {
    Compose(ComposeSpec),
    Spectrum(SpectrumSpec),
    Trotter(TrotterSpec),
    Penalty(PenaltySpec),
    Disk(DiskSpec),
    Halfplane(HalfplaneSpec),
}

fn default_dim() -> usize {
    2
}
fn default_mass() -> f64 {
    bc_core::interval_cavity::DEFAULT_MASS
}
fn default_grid() -> usize {
    256
}
fn default_defect_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeSpec {
    pub u1: BoundarySpec,
    pub u2: BoundarySpec,
    #[serde(default = "default_dim")]
    pub dim: usize,
    /// Optional preset the composition must reproduce.
    #[serde(default)]
    pub expected: Option<BoundarySpec>,
    #[serde(default = "default_defect_tol")]
    pub defect_tol: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub random: Option<RandomSuite>,
    #[serde(default)]
    pub operator_check: Option<OperatorCheck>,
}

/// Randomized algebra suite over gapped unitaries.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSuite {
    pub count: usize,
    pub dims: Vec<usize>,
    #[serde(default = "default_k_scale")]
    pub k_scale: f64,
    #[serde(default = "default_defect_tol")]
    pub tol: f64,
}

fn default_k_scale() -> f64 {
    2.0
}

/// Lattice check of the composition law on the interval.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorCheck {
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_check_grid")]
    pub grid: usize,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "default_identity_tol")]
    pub identity_tol: f64,
    #[serde(default = "default_representation_tol")]
    pub representation_tol: f64,
}

fn default_pairs() -> usize {
    20
}
fn default_check_grid() -> usize {
    64
}
fn default_identity_tol() -> f64 {
    1e-12
}
fn default_representation_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSpec {
    pub u: BoundarySpec,
    #[serde(default = "default_grid", alias = "M")]
    pub grid: usize,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_zero_tol")]
    pub zero_tol: f64,
    /// Also solve on `2M` and check the error ratio.
    #[serde(default)]
    pub refine: bool,
    #[serde(default = "default_ratio_band")]
    pub ratio_band: f64,
}

fn default_count() -> usize {
    3
}
fn default_rel_tol() -> f64 {
    1e-3
}
fn default_zero_tol() -> f64 {
    1e-8
}
fn default_ratio_band() -> f64 {
    0.2
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterSpec {
    pub u1: BoundarySpec,
    pub u2: BoundarySpec,
    #[serde(default = "default_grid", alias = "M")]
    pub grid: usize,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "default_t")]
    pub t: f64,
    /// Averaging window; defaults to `2t`.
    #[serde(default, rename = "T")]
    pub window: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_n_values", rename = "N_values")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_center")]
    pub center: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_order")]
    pub order_target: f64,
    #[serde(default = "default_order_tol")]
    pub order_tol: f64,
    #[serde(default = "default_avg_ratio")]
    pub avg_ratio_max: f64,
    /// Optional ceiling on the pointwise error at the largest `N`.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn default_t() -> f64 {
    0.1
}
fn default_samples() -> usize {
    9
}
fn default_n_values() -> Vec<usize> {
    (3..=10).map(|p| 1usize << p).collect()
}
fn default_center() -> f64 {
    bc_core::trotter_engine::DEFAULT_CENTER
}
fn default_width() -> f64 {
    bc_core::trotter_engine::DEFAULT_WIDTH
}
fn default_order() -> f64 {
    1.0
}
fn default_order_tol() -> f64 {
    0.15
}
fn default_avg_ratio() -> f64 {
    0.6
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltySpec {
    #[serde(default = "default_partner")]
    pub partner: BoundarySpec,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_grid", alias = "M")]
    pub grid: usize,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_final_tol")]
    pub final_tol: f64,
    #[serde(default)]
    pub sweep: Option<PenaltySweep>,
}

fn default_partner() -> BoundarySpec {
    BoundarySpec::Preset("neumann".into())
}
fn default_lambdas() -> Vec<f64> {
    vec![1e2, 1e3, 1e4]
}
fn default_final_tol() -> f64 {
    1e-2
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltySweep {
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default, rename = "T")]
    pub window: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_n_values", rename = "N_values")]
    pub n_values: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    pub model1: DiskModelSpec,
    pub model2: DiskModelSpec,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_identity_tol")]
    pub compose_tol: f64,
    #[serde(default = "default_identity_tol")]
    pub lift_tol: f64,
    #[serde(default = "default_lift_samples")]
    pub lift_samples: usize,
    #[serde(default = "default_residual_grids")]
    pub residual_grids: [usize; 2],
    #[serde(default = "default_ratio_band")]
    pub ratio_band: f64,
    #[serde(default = "default_bessel_grid")]
    pub bessel_grid: usize,
    #[serde(default = "default_bessel_modes")]
    pub bessel_modes: Vec<u32>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_lift_samples() -> usize {
    32
}
fn default_residual_grids() -> [usize; 2] {
    [128, 256]
}
fn default_bessel_grid() -> usize {
    512
}
fn default_bessel_modes() -> Vec<u32> {
    vec![0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    /// `e^{-x²}`
    Gaussian,
    /// `x e^{-x²}`
    OddGaussian,
}

impl TestFunction {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Gaussian => (-x * x).exp(),
            Self::OddGaussian => x * (-x * x).exp(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HalfplaneSpec {
    #[serde(default = "default_function")]
    pub function: TestFunction,
    #[serde(default = "default_y_values")]
    pub y_values: Vec<f64>,
    #[serde(default = "default_support")]
    pub support: f64,
    #[serde(default = "default_limit_tol")]
    pub limit_tol: f64,
    /// Expected `log error / log y` slope; `null` skips the check.
    #[serde(default = "default_slope")]
    pub expected_slope: Option<f64>,
    #[serde(default = "default_slope_tol")]
    pub slope_tol: f64,
}

fn default_function() -> TestFunction {
    TestFunction::Gaussian
}
fn default_y_values() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3, 1e-4]
}
fn default_support() -> f64 {
    10.0
}
fn default_limit_tol() -> f64 {
    1e-4
}
fn default_slope() -> Option<f64> {
    Some(1.0)
}
fn default_slope_tol() -> f64 {
    0.1
}

pub fn parse_config(path: &Path) -> Result<Config, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_config_bytes(&bytes)
}

pub fn parse_config_bytes(bytes: &[u8]) -> Result<Config, CliError> {
    let file: ConfigFile = serde_json::from_slice(bytes)
        .map_err(|e| CliError::Parse(format!("malformed config: {e}")))?;
    let values = match file {
        ConfigFile::Wrapped { scenarios } | ConfigFile::Bare(scenarios) => scenarios,
    };
    let mut scenarios = Vec::with_capacity(values.len());
    for (i, value) in values.into_iter().enumerate() {
        let label = value
            .get("id")
            .and_then(Value::as_str)
            .map_or_else(|| format!("#{i}"), |s| format!("'{s}'"));
        let canonical = serde_json::to_vec(&value).expect("JSON values serialize");
        let mut scenario: Scenario = serde_json::from_value(value)
            .map_err(|e| CliError::Parse(format!("scenario {label}: {e}")))?;
        scenario.input_hash = sha256_hex(&canonical);
        validate(&scenario).map_err(|e| CliError::Parse(format!("scenario {label}: {e}")))?;
        scenarios.push(scenario);
    }
    let mut ids: Vec<&str> = scenarios.iter().map(|s| s.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::Parse(format!("duplicate scenario id '{}'", w[0])));
    }
    Ok(Config {
        scenarios,
        input_hash: sha256_hex(bytes),
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn positive(name: &str, x: f64) -> Result<(), String> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(format!("field {name} must be positive and finite, got {x}"))
    }
}

fn increasing(name: &str, n: &[usize]) -> Result<(), String> {
    if n.is_empty() || n[0] == 0 || n.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!(
            "field {name} must be a non-empty increasing list of positive integers"
        ));
    }
    Ok(())
}

/// Field-level checks beyond the JSON types; every preset is resolved once
/// so unknown names surface here.
fn validate(s: &Scenario) -> Result<(), String> {
    if s.id.is_empty() || s.id.contains(['/', '\\']) || s.id.starts_with('.') {
        return Err(format!("id '{}' is not usable as a file name", s.id));
    }
    match &s.body {
        ScenarioBody::Compose(c) => {
            if c.dim == 0 {
                return Err("field dim must be >= 1".into());
            }
            c.u1.resolve("u1", c.dim)?;
            c.u2.resolve("u2", c.dim)?;
            if let Some(e) = &c.expected {
                e.resolve("expected", c.dim)?;
            }
            positive("defect_tol", c.defect_tol)?;
            if let Some(r) = &c.random {
                if r.dims.contains(&0) {
                    return Err("field random.dims entries must be >= 1".into());
                }
                positive("random.k_scale", r.k_scale)?;
                positive("random.tol", r.tol)?;
            }
            if let Some(o) = &c.operator_check {
                positive("operator_check.mass", o.mass)?;
                positive("operator_check.identity_tol", o.identity_tol)?;
                positive("operator_check.representation_tol", o.representation_tol)?;
            }
        }
        ScenarioBody::Spectrum(c) => {
            c.u.resolve("u", 2)?;
            positive("mass", c.mass)?;
            positive("rel_tol", c.rel_tol)?;
            positive("zero_tol", c.zero_tol)?;
            if c.count == 0 {
                return Err("field count must be >= 1".into());
            }
        }
        ScenarioBody::Trotter(c) => {
            c.u1.resolve("u1", 2)?;
            c.u2.resolve("u2", 2)?;
            positive("mass", c.mass)?;
            positive("t", c.t)?;
            if let Some(w) = c.window {
                positive("T", w)?;
            }
            positive("width", c.width)?;
            increasing("N_values", &c.n_values)?;
            if let Some(tol) = c.tolerance {
                positive("tolerance", tol)?;
            }
        }
        ScenarioBody::Penalty(c) => {
            c.partner.resolve("partner", 2)?;
            positive("mass", c.mass)?;
            positive("final_tol", c.final_tol)?;
            if c.lambdas.is_empty() {
                return Err("field lambdas must not be empty".into());
            }
            for &l in &c.lambdas {
                positive("lambdas", l)?;
            }
            if let Some(sw) = &c.sweep {
                positive("sweep.t", sw.t)?;
                increasing("sweep.N_values", &sw.n_values)?;
            }
        }
        ScenarioBody::Disk(c) => {
            for (field, m) in [("model1", &c.model1), ("model2", &c.model2)] {
                DiskModeModel::<f64>::from_spec(m).map_err(|e| format!("field {field}: {e}"))?;
            }
            positive("compose_tol", c.compose_tol)?;
            positive("lift_tol", c.lift_tol)?;
            positive("rel_tol", c.rel_tol)?;
            if c.residual_grids[0] >= c.residual_grids[1] {
                return Err("field residual_grids must be increasing".into());
            }
        }
        ScenarioBody::Halfplane(c) => {
            positive("support", c.support)?;
            positive("limit_tol", c.limit_tol)?;
            for &y in &c.y_values {
                positive("y_values", y)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_compose_scenario() {
        let cfg =
            parse_config_bytes(br#"[{"id":"a","kind":"compose","u1":"neumann","u2":"neumann"}]"#)
                .unwrap();
        assert_eq!(cfg.scenarios.len(), 1);
        assert_eq!(cfg.scenarios[0].kind(), "compose");
        assert_eq!(cfg.input_hash.len(), 64);
    }

    #[test]
    fn missing_kind_is_a_parse_error() {
        let err = parse_config_bytes(br#"{"scenarios":[{"id":"a","u1":"neumann"}]}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn bad_preset_names_the_field() {
        let err =
            parse_config_bytes(br#"[{"id":"a","kind":"compose","u1":"robin:abc","u2":"neumann"}]"#)
                .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("u1") && msg.contains("robin:abc"), "{msg}");
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let err =
            parse_config_bytes(br#"[{"id":"a","kind":"halfplane"},{"id":"a","kind":"halfplane"}]"#)
                .unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn trotter_defaults() {
        let cfg =
            parse_config_bytes(br#"[{"id":"t","kind":"trotter","u1":"robin:0","u2":"robin:2"}]"#)
                .unwrap();
        let ScenarioBody::Trotter(t) = &cfg.scenarios[0].body else {
            panic!("wrong kind")
        };
        assert_eq!(t.n_values, vec![8, 16, 32, 64, 128, 256, 512, 1024]);
        assert_eq!(t.grid, 256);
        assert!(t.window.is_none());
    }
}
