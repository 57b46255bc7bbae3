//! The five subcommands: family export, count simulation, reconstruction,
//! pattern sampling, and fidelity reports.

use crate::config::{build_family, ExperimentConfig, FamilySource};
use crate::{CliError, CliResult};
use mubtomo::export;
use mubtomo::measurement::{normalize_counts, simulate_counts, state_probabilities, CountTable};
use mubtomo::mub::{dim8_audit, vector_to_modulation, verify_family, MubFamily, Provenance};
use mubtomo::optics::{apply_phase, pattern, prepare_state, DetectorConfig};
use mubtomo::state::QuditVector;
use mubtomo::tomography::{fidelity, fidelity_with_errors, reconstruct};
use std::fs;
use std::path::{Path, PathBuf};

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::numerical(format!("cannot create {}: {e}", dir.display()))
    })?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::numerical(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

/// Builds, certifies, and exports a full basis family.
pub fn mub(dim: usize, source: Option<FamilySource>, out: &Path) -> CliResult<()> {
    let family = build_family(dim, source)?;
    let report = verify_family(&family, 1e-10);
    let mut certification = String::new();
    if matches!(family.provenance(), Provenance::TabulatedUnitaries) {
        certification.push_str(&dim8_audit(1e-12).to_string());
        certification.push('\n');
    }
    certification.push_str(&report.to_string());
    write_file(out, "family.json", &export::family_json(&family))?;
    write_file(out, "modulation.csv", &export::modulation_csv(&family)?)?;
    write_file(out, "certification.txt", &certification)?;
    println!(
        "dimension {dim}: {} bases, {} projectors; certification {} \
         (worst orthonormality {:.2e}, worst unbiasedness {:.2e})",
        family.bases().len(),
        family.projector_count(),
        if report.passed { "passed" } else { "FAILED" },
        report.max_orthonormality_deviation,
        report.max_unbiasedness_deviation
    );
    if !report.passed {
        return Err(CliError::certification(format!(
            "dimension-{dim} family failed certification at tolerance 1e-10"
        )));
    }
    Ok(())
}

/// Simulates one full tomography acquisition and writes the count files.
pub fn simulate(
    config: &ExperimentConfig,
    seed: Option<u64>,
    out: Option<&Path>,
    source: Option<FamilySource>,
) -> CliResult<()> {
    let geom = config.geometry()?;
    let family = config.family(source)?;
    let state = config.beam_state(&geom)?;
    let acquisition = config.acquisition(seed)?;
    let ideal = state_probabilities(&state, &family)?;
    let counts = simulate_counts(
        &ideal,
        acquisition.mean_peak_rate,
        acquisition.integration_time,
        acquisition.model,
    )?;
    let dir = config.output_dir(out);
    write_file(&dir, "ideal_probabilities.csv", &export::probability_csv(&ideal))?;
    write_file(&dir, "counts.csv", &export::counts_csv(&counts))?;
    write_file(&dir, "counts.json", &export::counts_json(&counts))?;
    let peak = counts.counts().iter().flatten().max().copied().unwrap_or(0);
    let total: u64 = counts.counts().iter().flatten().sum();
    println!(
        "simulated {} projections (master seed {}): peak count {peak}, total {total}",
        family.projector_count(),
        acquisition.master_seed
    );
    Ok(())
}

fn read_counts(path: &Path, config: &ExperimentConfig) -> CliResult<CountTable> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let counts = export::parse_counts_json(&text)?;
    if counts.dim() != config.dim {
        return Err(CliError::config(format!(
            "counts file {} is for dimension {}, config says {}",
            path.display(),
            counts.dim(),
            config.dim
        )));
    }
    Ok(counts)
}

fn fidelity_report(
    counts: &CountTable,
    family: &MubFamily,
    expected: &QuditVector,
    physical: &mubtomo::operator::DensityOperator,
    trials: usize,
    master_seed: u64,
) -> CliResult<(f64, mubtomo::tomography::FidelityEstimate)> {
    let value = fidelity(expected, physical)?;
    let bootstrap = fidelity_with_errors(counts, family, expected, trials, master_seed)?;
    println!(
        "fidelity {value:.5} vs expected state; bootstrap {:.5} +/- {:.5} over {} trials",
        bootstrap.value, bootstrap.sigma, bootstrap.n_trials
    );
    Ok((value, bootstrap))
}

/// Reconstructs the density operator from a counts file; reports fidelity
/// when the config names an expected state.
pub fn reconstruct_cmd(
    config: &ExperimentConfig,
    counts_path: &Path,
    trials: usize,
    seed: Option<u64>,
    out: Option<&Path>,
    source: Option<FamilySource>,
) -> CliResult<()> {
    let family = config.family(source)?;
    let counts = read_counts(counts_path, config)?;
    let table = normalize_counts(&counts)?;
    let result = reconstruct(&table, &family)?;
    let dir = config.output_dir(out);
    write_file(&dir, "reconstruction.json", &export::reconstruction_json(&result))?;
    println!(
        "reconstructed dimension-{} operator: purity {:.5}; {}",
        config.dim,
        result.physical.purity(),
        result.diagnostics
    );
    if let Some(expected) = config.expected_state()? {
        let (value, bootstrap) = fidelity_report(
            &counts,
            &family,
            &expected,
            &result.physical,
            trials,
            config.master_seed(seed),
        )?;
        write_file(&dir, "fidelity.json", &export::fidelity_json(value, Some(&bootstrap)))?;
    }
    Ok(())
}

/// Standalone fidelity report from a counts file; the config must name the
/// expected state.
pub fn fidelity_cmd(
    config: &ExperimentConfig,
    counts_path: &Path,
    trials: usize,
    seed: Option<u64>,
    out: Option<&Path>,
    source: Option<FamilySource>,
) -> CliResult<()> {
    let expected = config.expected_state()?.ok_or_else(|| {
        CliError::config("the fidelity command needs `expected_state` in the config")
    })?;
    let family = config.family(source)?;
    let counts = read_counts(counts_path, config)?;
    let table = normalize_counts(&counts)?;
    let result = reconstruct(&table, &family)?;
    let (value, bootstrap) = fidelity_report(
        &counts,
        &family,
        &expected,
        &result.physical,
        trials,
        config.master_seed(seed),
    )?;
    let dir = config.output_dir(out);
    write_file(&dir, "fidelity.json", &export::fidelity_json(value, Some(&bootstrap)))?;
    Ok(())
}

/// Samples the far-field pattern of the configured beam, optionally after
/// the amplitude+phase modulation that analyzes one basis vector.
#[allow(clippy::too_many_arguments)]
pub fn pattern_cmd(
    config: &ExperimentConfig,
    alpha: Option<usize>,
    m: usize,
    x_min: Option<f64>,
    x_max: Option<f64>,
    points: usize,
    out: Option<&Path>,
    source: Option<FamilySource>,
) -> CliResult<()> {
    let geom = config.geometry()?;
    let mut state = config.beam_state(&geom)?;
    let mut label = "unmodulated beam".to_string();
    if let Some(alpha) = alpha {
        let family = config.family(source)?;
        if alpha >= family.bases().len() {
            return Err(CliError::config(format!(
                "basis index {alpha} out of range; the family has bases 0..={}",
                family.bases().len() - 1
            )));
        }
        if m >= config.dim {
            return Err(CliError::config(format!(
                "vector index {m} out of range for dimension {}",
                config.dim
            )));
        }
        let analyzer = family.bases()[alpha].vector(m);
        let setting = vector_to_modulation(analyzer)?;
        state = apply_phase(
            &prepare_state(&state, setting.epsilons())?,
            setting.phases(),
            true,
        );
        label = format!("beam analyzed for basis {alpha}, vector {m}");
    }
    // Default span: out to the first zero of the single-slit envelope.
    let envelope_zero = geom.wavelength() * geom.focal_f3() / (2.0 * geom.half_width_a());
    let hi = x_max.unwrap_or(envelope_zero);
    let lo = x_min.unwrap_or(-hi);
    let curve = pattern(&state, lo, hi, points, &geom, &DetectorConfig::Point)?;
    let dir = config.output_dir(out);
    write_file(&dir, "pattern.csv", &export::pattern_csv(&curve))?;
    println!(
        "{points} samples of the {label} over [{:.3} mm, {:.3} mm]",
        lo * 1e3,
        hi * 1e3
    );
    Ok(())
}
