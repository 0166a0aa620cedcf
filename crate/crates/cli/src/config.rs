//! The run configuration: one JSON document, overridden by command-line flags.

use std::path::{Path, PathBuf};

use csns_core::estimates::{CorpusSpec, DuhamelSmoothing, Law1, Law2, Law3, Law4};
use csns_core::experiments::LambdaScanConfig;
use csns_core::flows::SolverConfig;
use csns_core::profiles::ExtractionConfig;
use csns_core::spectral::{admissible_points, PeriodicGrid};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub period: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n: 32,
            period: 2.0 * std::f64::consts::PI,
        }
    }
}

/// A field built from a recipe. Velocity recipes are divergence-free.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Zero,
    /// Seeded random solenoidal field; the seed is the run seed plus `seed_offset`.
    Random {
        kmax: i64,
        #[serde(default = "default_slope")]
        slope: f64,
        rms: f64,
        #[serde(default)]
        seed_offset: u64,
    },
    /// Combination of the `|k| = 1` shell modes plus a diagonal term, unit `L^3`, times `amplitude`.
    Shell {
        weights: [f64; 6],
        diagonal: f64,
        amplitude: f64,
    },
    /// Band-limited Gaussian vortex of unit `L^3`, times `amplitude`.
    Vortex {
        center: [f64; 3],
        sigma: f64,
        amplitude: f64,
    },
    /// The steady state of the configured force (initial data only).
    Steady,
    /// A snapshot file written by this tool.
    Snapshot {
        path: PathBuf,
    },
}

fn default_slope() -> f64 {
    -1.0
}

/// One planted profile: the field and a linear scale-core schedule
/// `exponent + n * exponent_step`, `core_start + n * core_step`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedProfile {
    pub field: FieldSpec,
    #[serde(default)]
    pub exponent: i32,
    #[serde(default)]
    pub exponent_step: i32,
    #[serde(default)]
    pub core_start: [f64; 3],
    #[serde(default)]
    pub core_step: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantedFamily {
    /// Number of sequence indices `n`.
    pub count: usize,
    pub profiles: Vec<PlantedProfile>,
    /// Remainder added at every index.
    pub remainder: FieldSpec,
}

impl Default for PlantedFamily {
    /// Two shell profiles, the second contracted by 4 with cores on grid
    /// points of the default grid.
    fn default() -> Self {
        let cell = GridConfig::default().period / GridConfig::default().n as f64;
        let shell = |weights| FieldSpec::Shell {
            weights,
            diagonal: 0.3,
            amplitude: 1.0,
        };
        Self {
            count: 4,
            profiles: vec![
                PlantedProfile {
                    field: shell([1.0, 2.0, 1.0, 2.0, 1.0, 2.0]),
                    exponent: 0,
                    exponent_step: 0,
                    core_start: [0.0; 3],
                    core_step: [0.0; 3],
                },
                PlantedProfile {
                    field: shell([1.0; 6]),
                    exponent: 2,
                    exponent_step: 0,
                    core_start: [cell; 3],
                    core_step: [5.0 * cell; 3],
                },
            ],
            remainder: FieldSpec::Zero,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "suite", rename_all = "snake_case")]
pub enum Suite {
    HeatDecay {
        p: f64,
        times: Vec<f64>,
    },
    DuhamelSmoothing(DuhamelSmoothing),
    #[serde(rename = "product_law_1")]
    ProductLaw1(Law1),
    #[serde(rename = "product_law_2")]
    ProductLaw2(Law2),
    #[serde(rename = "product_law_3")]
    ProductLaw3(Law3),
    #[serde(rename = "product_law_4")]
    ProductLaw4(Law4),
}

impl Suite {
    pub fn id(&self) -> &'static str {
        match self {
            Suite::HeatDecay { .. } => "heat_decay",
            Suite::DuhamelSmoothing(_) => "duhamel_smoothing",
            Suite::ProductLaw1(_) => "product_law_1",
            Suite::ProductLaw2(_) => "product_law_2",
            Suite::ProductLaw3(_) => "product_law_3",
            Suite::ProductLaw4(_) => "product_law_4",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Size of the standard corpus seeded from the run seed; ignored when `corpus` is set.
    pub corpus_size: usize,
    pub corpus: Option<CorpusSpec>,
    pub resolutions: Vec<usize>,
    /// Largest accepted ratio between per-resolution constants.
    pub stability_limit: f64,
    pub suites: Vec<Suite>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            corpus_size: csns_core::estimates::MIN_CORPUS,
            corpus: None,
            resolutions: vec![16, 32, 48],
            stability_limit: 2.0,
            suites: vec![Suite::HeatDecay {
                p: 2.0,
                times: vec![0.01, 0.1, 0.5, 1.0],
            }],
        }
    }
}

impl VerifyConfig {
    pub fn corpus_spec(&self, seed: u64) -> CorpusSpec {
        match &self.corpus {
            Some(c) => c.clone(),
            None if self.corpus_size == 0 => CorpusSpec {
                seeds: Vec::new(),
                two_block: 0,
                ..CorpusSpec::default()
            },
            None => CorpusSpec::standard(seed, self.corpus_size),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyConfig {
    pub tol: f64,
}

impl Default for SteadyConfig {
    fn default() -> Self {
        Self { tol: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbConfig {
    /// Data of the Navier-Stokes run used as the time-dependent drift.
    pub drift: FieldSpec,
    /// Uniform pieces used when measuring `K`.
    pub k_pieces: usize,
}

impl Default for PerturbConfig {
    fn default() -> Self {
        Self {
            drift: FieldSpec::Zero,
            k_pieces: 4,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfilesConfig {
    pub family: PlantedFamily,
    pub extraction: ExtractionConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeConfig {
    pub family: PlantedFamily,
    /// Index of the profile with the identity scale-core sequence.
    pub j0: usize,
}

impl Default for DecomposeConfig {
    fn default() -> Self {
        let vortex = FieldSpec::Vortex {
            center: [std::f64::consts::PI; 3],
            sigma: 0.6,
            amplitude: 0.3,
        };
        Self {
            family: PlantedFamily {
                count: 4,
                profiles: vec![
                    PlantedProfile {
                        field: vortex.clone(),
                        exponent: 0,
                        exponent_step: 0,
                        core_start: [0.0; 3],
                        core_step: [0.0; 3],
                    },
                    PlantedProfile {
                        field: vortex,
                        exponent: 0,
                        exponent_step: 0,
                        core_start: [0.0; 3],
                        core_step: [0.4; 3],
                    },
                ],
                remainder: FieldSpec::Zero,
            },
            j0: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObservablesConfig {
    /// Time exponent of the running distance to the steady state.
    pub r: f64,
}

impl Default for ObservablesConfig {
    fn default() -> Self {
        Self { r: 4.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub solver: SolverConfig,
    /// Integrability of the critical norms.
    pub p: f64,
    pub seed: u64,
    /// Worker threads; 1 is the deterministic serial mode.
    pub threads: usize,
    /// Output directory. Not part of the digest.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub initial: FieldSpec,
    /// `Delta^{-1} f`, the potential of the force.
    pub force: FieldSpec,
    pub steady: SteadyConfig,
    pub perturb: PerturbConfig,
    pub verify: VerifyConfig,
    pub profiles: ProfilesConfig,
    pub lambda_scan: LambdaScanConfig,
    pub decompose: DecomposeConfig,
    pub observables: ObservablesConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            solver: SolverConfig::new(0.01, 1.0, csns_core::flows::Stepper::PicardDuhamel)
                .with_stride(10),
            p: 4.0,
            seed: 0,
            threads: 1,
            out: None,
            initial: FieldSpec::Random {
                kmax: 2,
                slope: -1.0,
                rms: 0.1,
                seed_offset: 0,
            },
            force: FieldSpec::Zero,
            steady: SteadyConfig::default(),
            perturb: PerturbConfig::default(),
            verify: VerifyConfig::default(),
            profiles: ProfilesConfig::default(),
            lambda_scan: LambdaScanConfig::default(),
            decompose: DecomposeConfig::default(),
            observables: ObservablesConfig::default(),
        }
    }
}

/// Flag values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub serial: bool,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("malformed config {}: {e}", path.display())))
    }

    /// Flags over config over defaults; `CSNS_OUT` beats `--out`.
    pub fn apply(&mut self, o: &Overrides, env_out: Option<PathBuf>) {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(t) = o.threads {
            self.threads = t;
        }
        if o.serial {
            self.threads = 1;
        }
        if let Some(out) = env_out.or_else(|| o.out.clone()) {
            self.out = Some(out);
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| PathBuf::from("csns-out"))
    }

    pub fn grid(&self) -> CliResult<PeriodicGrid> {
        PeriodicGrid::new(self.grid.n, self.grid.period)
            .map_err(|e| CliError::config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form (the output directory excluded).
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }

    /// Gates shared by every command.
    pub fn common_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if !admissible_points(self.grid.n) {
            bad.push(format!(
                "grid.n = {} is not an admissible size (2^a or 3*2^a, at least 16)",
                self.grid.n
            ));
        }
        if !(self.grid.period > 0.0 && self.grid.period.is_finite()) {
            bad.push(format!(
                "grid.period = {} must be positive",
                self.grid.period
            ));
        }
        if self.threads == 0 {
            bad.push("threads must be at least 1".into());
        }
        bad
    }

    pub fn solver_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        if let Err(e) = self.solver.validate() {
            bad.push(format!("solver: {e}"));
        }
        if !(self.p > 3.0 && self.p < 5.0) {
            bad.push(format!("p = {} outside (3, 5)", self.p));
        }
        bad
    }
}

pub fn field_violations(what: &str, spec: &FieldSpec, allow_steady: bool) -> Vec<String> {
    let mut bad = Vec::new();
    match spec {
        FieldSpec::Random { kmax, rms, .. } => {
            if *kmax < 1 {
                bad.push(format!("{what}: kmax = {kmax} must be at least 1"));
            }
            if !(*rms >= 0.0 && rms.is_finite()) {
                bad.push(format!(
                    "{what}: rms = {rms} must be finite and nonnegative"
                ));
            }
        }
        FieldSpec::Shell { amplitude, .. } | FieldSpec::Vortex { amplitude, .. } => {
            if !amplitude.is_finite() {
                bad.push(format!("{what}: amplitude must be finite"));
            }
        }
        FieldSpec::Steady if !allow_steady => {
            bad.push(format!(
                "{what}: the steady state is only available as initial data"
            ));
        }
        FieldSpec::Snapshot { path } if !path.exists() => {
            bad.push(format!(
                "{what}: snapshot {} does not exist",
                path.display()
            ));
        }
        _ => {}
    }
    bad
}
