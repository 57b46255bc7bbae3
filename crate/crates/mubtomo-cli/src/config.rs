//! Experiment configuration: a single JSON document that, together with an
//! optional `--seed` override, fully determines every output byte.

use crate::{CliError, CliResult};
use mubtomo::measurement::NoiseModel;
use mubtomo::mub::{dim8_family, family_for_dim, prime_family, MubFamily};
use mubtomo::optics::{beam_amplitudes, ApertureGeometry, BeamProfile};
use mubtomo::seed::{subseed, COUNT_STREAM};
use mubtomo::state::QuditVector;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Fixture amplitudes are rounded to three decimals, so anything further
/// from unit norm than this indicates a typo in an explicit list.
const NORM_WARN_TOL: f64 = 1e-3;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dim: usize,
    #[serde(default)]
    pub family_source: Option<FamilySource>,
    #[serde(default)]
    pub geometry: Option<GeometryConfig>,
    /// What the apparatus actually emits; defaults to a uniform beam.
    #[serde(default)]
    pub beam: Option<BeamConfig>,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    /// What the beam is supposed to be, for fidelity reports.
    #[serde(default)]
    pub expected_state: Option<StateSpec>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilySource {
    PrimeFormula,
    Dim8Tables,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub half_width_a: f64,
    pub spacing_d: f64,
    pub wavelength: f64,
    pub focal_f3: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BeamConfig {
    Uniform,
    Gaussian {
        waist: f64,
        #[serde(default)]
        center_offset: f64,
    },
    Fixture {
        name: String,
    },
    Explicit {
        amplitudes: Vec<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    None {
        mean_peak_rate: f64,
        integration_time: f64,
    },
    Poisson {
        #[serde(default)]
        seed: Option<u64>,
        mean_peak_rate: f64,
        integration_time: f64,
    },
}

/// Either a bundled state name (`"psi7"`) or an explicit amplitude list.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Fixture(String),
    Amplitudes(Vec<f64>),
}

pub fn load(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let config: ExperimentConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if config.dim == 0 {
        return Err(CliError::config("dim must be at least 1"));
    }
    Ok(config)
}

/// Builds a state from a spec, normalizing explicit lists and warning on
/// stderr when they are off by more than rounding error.
fn resolve_state(spec: &StateSpec, dim: usize, role: &str) -> CliResult<QuditVector> {
    match spec {
        StateSpec::Fixture(name) => {
            let fixture = mubtomo::fixtures::by_name(name).ok_or_else(|| {
                let names: Vec<&str> = mubtomo::fixtures::all().iter().map(|f| f.name).collect();
                CliError::config(format!(
                    "unknown bundled state {name:?} for {role}; available: {names:?}"
                ))
            })?;
            let state = fixture.state();
            if state.dim() != dim {
                return Err(CliError::config(format!(
                    "{role} {name:?} has dimension {}, config says {dim}",
                    state.dim()
                )));
            }
            Ok(state)
        }
        StateSpec::Amplitudes(list) => {
            if list.len() != dim {
                return Err(CliError::config(format!(
                    "{role} has {} amplitudes, config says dim {dim}",
                    list.len()
                )));
            }
            let norm = list.iter().map(|a| a * a).sum::<f64>().sqrt();
            let deviation = (norm - 1.0).abs();
            if deviation > NORM_WARN_TOL {
                eprintln!(
                    "warning: {role} norm deviates from 1 by {deviation:.2e}; renormalizing"
                );
            }
            QuditVector::from_real(list).map_err(CliError::from)
        }
    }
}

impl ExperimentConfig {
    pub fn geometry(&self) -> CliResult<ApertureGeometry> {
        match &self.geometry {
            Some(g) => ApertureGeometry::new(
                self.dim,
                g.half_width_a,
                g.spacing_d,
                g.wavelength,
                g.focal_f3,
            )
            .map_err(CliError::from),
            None => Ok(ApertureGeometry::standard(self.dim)),
        }
    }

    /// Family construction, with the CLI flag taking precedence over the
    /// config and an automatic choice (by dimension) as the fallback.
    pub fn family(&self, flag: Option<FamilySource>) -> CliResult<MubFamily> {
        build_family(self.dim, flag.or(self.family_source))
    }

    /// The state the simulated apparatus emits.
    pub fn beam_state(&self, geom: &ApertureGeometry) -> CliResult<QuditVector> {
        match self.beam.as_ref().unwrap_or(&BeamConfig::Uniform) {
            BeamConfig::Uniform => {
                beam_amplitudes(&BeamProfile::Uniform, geom).map_err(CliError::from)
            }
            BeamConfig::Gaussian {
                waist,
                center_offset,
            } => beam_amplitudes(
                &BeamProfile::Gaussian {
                    waist: *waist,
                    center_offset: *center_offset,
                },
                geom,
            )
            .map_err(CliError::from),
            BeamConfig::Fixture { name } => {
                resolve_state(&StateSpec::Fixture(name.clone()), self.dim, "beam state")
            }
            BeamConfig::Explicit { amplitudes } => resolve_state(
                &StateSpec::Amplitudes(amplitudes.clone()),
                self.dim,
                "beam state",
            ),
        }
    }

    pub fn expected_state(&self) -> CliResult<Option<QuditVector>> {
        match &self.expected_state {
            Some(spec) => Ok(Some(resolve_state(spec, self.dim, "expected state")?)),
            None => Ok(None),
        }
    }

    /// Acquisition parameters plus the concrete noise model. The master
    /// seed (flag > config > 0) is split through the counter scheme so the
    /// counting stream is independent of the bootstrap stream.
    pub fn acquisition(&self, seed_flag: Option<u64>) -> CliResult<Acquisition> {
        let noise = self.noise.as_ref().ok_or_else(|| {
            CliError::config("config needs a `noise` section (kind \"none\" or \"poisson\")")
        })?;
        Ok(match *noise {
            NoiseConfig::None {
                mean_peak_rate,
                integration_time,
            } => Acquisition {
                mean_peak_rate,
                integration_time,
                master_seed: seed_flag.unwrap_or(0),
                model: NoiseModel::None,
            },
            NoiseConfig::Poisson {
                seed,
                mean_peak_rate,
                integration_time,
            } => {
                let master_seed = seed_flag.or(seed).unwrap_or(0);
                Acquisition {
                    mean_peak_rate,
                    integration_time,
                    master_seed,
                    model: NoiseModel::Poisson {
                        seed: subseed(master_seed, COUNT_STREAM, 0),
                    },
                }
            }
        })
    }

    /// Master seed precedence: `--seed` flag, then the config's noise seed,
    /// then 0. Every random stream in a run derives from this one value.
    pub fn master_seed(&self, flag: Option<u64>) -> u64 {
        flag.or(match &self.noise {
            Some(NoiseConfig::Poisson { seed, .. }) => *seed,
            _ => None,
        })
        .unwrap_or(0)
    }

    /// Output directory precedence: `--out` flag, then config, then `.`.
    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

pub struct Acquisition {
    pub mean_peak_rate: f64,
    pub integration_time: f64,
    pub master_seed: u64,
    pub model: NoiseModel,
}

pub fn build_family(dim: usize, source: Option<FamilySource>) -> CliResult<MubFamily> {
    match source {
        Some(FamilySource::PrimeFormula) => prime_family(dim).map_err(CliError::from),
        Some(FamilySource::Dim8Tables) => {
            if dim != 8 {
                return Err(CliError::config(format!(
                    "the tabulated construction is for dimension 8, config says {dim}"
                )));
            }
            Ok(dim8_family())
        }
        None => family_for_dim(dim).map_err(|e| match e {
            mubtomo::Error::UnsupportedDimension(d) => CliError::config(format!(
                "no construction available for dimension {d}; supported: 2, odd primes, 8"
            )),
            other => CliError::from(other),
        }),
    }
}
