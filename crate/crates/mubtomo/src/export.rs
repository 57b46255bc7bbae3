//! Deterministic text serialization.
//!
//! Every writer here is hand-rolled so that identical inputs produce
//! byte-identical output: floats are always printed with 17 significant
//! digits in scientific notation (round-trip exact for `f64`), keys appear
//! in a fixed order, and there is no locale or hash-map iteration involved.
//! The only parser, [`parse_counts_json`], reads back the count files that
//! [`counts_json`] writes.

use crate::measurement::{CountTable, NoiseModel, ProbabilityTable};
use crate::mub::{vector_to_modulation, MubFamily, Provenance};
use crate::operator::DensityOperator;
use crate::optics::PatternPoint;
use crate::state::QuditVector;
use crate::tomography::{FidelityEstimate, ReconstructionResult};
use crate::{Error, Result, C64};
use std::fmt::Write as _;

/// Round-trip-exact float rendering: 17 significant digits, scientific.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Escapes a string for inclusion in a JSON document.
fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// `[re, im]` pair.
fn complex_json(c: C64) -> String {
    format!("[{},{}]", fmt_float(c.re), fmt_float(c.im))
}

/// `[[re,im], ...]` for one state vector.
fn vector_json(v: &QuditVector) -> String {
    let parts: Vec<String> = v.amplitudes().iter().map(|&c| complex_json(c)).collect();
    format!("[{}]", parts.join(","))
}

/// Row-major `[[[re,im], ...], ...]` for a density matrix.
fn matrix_json(rho: &DensityOperator) -> String {
    let dim = rho.dim();
    let rows: Vec<String> = (0..dim)
        .map(|i| {
            let cells: Vec<String> = (0..dim).map(|j| complex_json(rho.get(i, j))).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn provenance_name(p: Provenance) -> &'static str {
    match p {
        Provenance::PrimeFormula => "prime-formula",
        Provenance::TabulatedUnitaries => "tabulated-unitaries",
        Provenance::Explicit => "explicit",
    }
}

/// Full basis family: dimension, construction source, and every vector.
///
/// Basis index 0 is the computational basis; indices 1..=D are the
/// phase-modulated bases.
pub fn family_json(family: &MubFamily) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\n  \"dim\": {},\n  \"source\": \"{}\",\n  \"bases\": [\n",
        family.dim(),
        provenance_name(family.provenance())
    );
    let bases: Vec<String> = family
        .bases()
        .iter()
        .map(|basis| {
            let vectors: Vec<String> = basis.vectors().iter().map(vector_json).collect();
            format!(
                "    {{\"index\": {}, \"vectors\": [{}]}}",
                basis.index,
                vectors.join(",")
            )
        })
        .collect();
    out.push_str(&bases.join(",\n"));
    out.push_str("\n  ]\n}\n");
    out
}

/// Modulator settings for every projection vector in the family, one line
/// per slit: `basis,m,l,epsilon,phi_rad`.
pub fn modulation_csv(family: &MubFamily) -> Result<String> {
    let mut out = String::from("basis,m,l,epsilon,phi_rad\n");
    for (row, m, vector) in family.projectors() {
        let setting = vector_to_modulation(vector)?;
        for (slot, (&eps, &phi)) in setting
            .epsilons()
            .iter()
            .zip(setting.phases())
            .enumerate()
        {
            let _ = writeln!(
                out,
                "{row},{m},{l},{eps},{phi}",
                l = vector.label(slot),
                eps = fmt_float(eps),
                phi = fmt_float(phi)
            );
        }
    }
    Ok(out)
}

/// Ideal projection probabilities: `basis,m,probability`.
pub fn probability_csv(table: &ProbabilityTable) -> String {
    let mut out = String::from("basis,m,probability\n");
    for (row, values) in table.rows().iter().enumerate() {
        for (m, &p) in values.iter().enumerate() {
            let _ = writeln!(out, "{row},{m},{}", fmt_float(p));
        }
    }
    out
}

/// Detector counts: `basis,m,counts`.
pub fn counts_csv(counts: &CountTable) -> String {
    let mut out = String::from("basis,m,counts\n");
    for (row, values) in counts.counts().iter().enumerate() {
        for (m, &n) in values.iter().enumerate() {
            let _ = writeln!(out, "{row},{m},{n}");
        }
    }
    out
}

/// Detector counts plus acquisition metadata, readable by
/// [`parse_counts_json`].
pub fn counts_json(counts: &CountTable) -> String {
    let noise = match counts.noise() {
        NoiseModel::None => "{\"kind\": \"none\"}".to_string(),
        NoiseModel::Poisson { seed } => {
            format!("{{\"kind\": \"poisson\", \"seed\": {seed}}}")
        }
    };
    let rows: Vec<String> = counts
        .counts()
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|n| n.to_string()).collect();
            format!("    [{}]", cells.join(","))
        })
        .collect();
    format!(
        "{{\n  \"dim\": {},\n  \"mean_peak_rate\": {},\n  \"integration_time\": {},\n  \"noise\": {},\n  \"counts\": [\n{}\n  ]\n}}\n",
        counts.dim(),
        fmt_float(counts.mean_peak_rate()),
        fmt_float(counts.integration_time()),
        noise,
        rows.join(",\n")
    )
}

fn field<'a>(value: &'a serde_json::Value, name: &'static str) -> Result<&'a serde_json::Value> {
    value
        .get(name)
        .ok_or_else(|| Error::invalid("counts file", format!("missing field `{name}`")))
}

fn as_f64(value: &serde_json::Value, name: &'static str) -> Result<f64> {
    value
        .as_f64()
        .ok_or_else(|| Error::invalid("counts file", format!("field `{name}` is not a number")))
}

/// Reads a count table written by [`counts_json`].
pub fn parse_counts_json(text: &str) -> Result<CountTable> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::invalid("counts file", format!("not valid JSON: {e}")))?;
    let dim = field(&value, "dim")?
        .as_u64()
        .ok_or_else(|| Error::invalid("counts file", "field `dim` is not an integer"))?
        as usize;
    let mean_peak_rate = as_f64(field(&value, "mean_peak_rate")?, "mean_peak_rate")?;
    let integration_time = as_f64(field(&value, "integration_time")?, "integration_time")?;
    let noise_value = field(&value, "noise")?;
    let noise = match field(noise_value, "kind")?.as_str() {
        Some("none") => NoiseModel::None,
        Some("poisson") => {
            let seed = field(noise_value, "seed")?
                .as_u64()
                .ok_or_else(|| Error::invalid("counts file", "poisson noise needs a `seed`"))?;
            NoiseModel::Poisson { seed }
        }
        _ => {
            return Err(Error::invalid(
                "counts file",
                "noise kind must be \"none\" or \"poisson\"",
            ))
        }
    };
    let rows = field(&value, "counts")?
        .as_array()
        .ok_or_else(|| Error::invalid("counts file", "field `counts` is not an array"))?;
    let mut counts = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = row
            .as_array()
            .ok_or_else(|| Error::invalid("counts file", "count rows must be arrays"))?;
        let mut parsed = Vec::with_capacity(cells.len());
        for cell in cells {
            parsed.push(
                cell.as_u64()
                    .ok_or_else(|| Error::invalid("counts file", "counts must be non-negative integers"))?,
            );
        }
        counts.push(parsed);
    }
    let table = CountTable::new(counts, mean_peak_rate, integration_time, noise)?;
    if table.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: table.dim(),
        });
    }
    Ok(table)
}

/// Density matrix as `{dim, matrix}`.
pub fn density_json(rho: &DensityOperator) -> String {
    format!(
        "{{\n  \"dim\": {},\n  \"matrix\": {}\n}}\n",
        rho.dim(),
        matrix_json(rho)
    )
}

/// Full reconstruction output: raw and corrected matrices, spectrum,
/// forced-purity state, and the human-readable diagnostics line.
pub fn reconstruction_json(result: &ReconstructionResult) -> String {
    let eigenvalues: Vec<String> = result
        .physical
        .eigenvalues()
        .iter()
        .map(|&v| fmt_float(v))
        .collect();
    format!(
        "{{\n  \"dim\": {dim},\n  \"min_raw_eigenvalue\": {minev},\n  \"raw_matrix\": {raw},\n  \"physical_matrix\": {phys},\n  \"physical_eigenvalues\": [{evs}],\n  \"physical_purity\": {purity},\n  \"pure_state\": {pure},\n  \"diagnostics\": \"{diag}\"\n}}\n",
        dim = result.physical.dim(),
        minev = fmt_float(result.min_raw_eigenvalue),
        raw = matrix_json(&result.raw),
        phys = matrix_json(&result.physical),
        evs = eigenvalues.join(","),
        purity = fmt_float(result.physical.purity()),
        pure = vector_json(&result.pure_forced),
        diag = escape(&result.diagnostics)
    )
}

/// Fidelity against the expected state, with optional bootstrap error bar.
pub fn fidelity_json(value: f64, bootstrap: Option<&FidelityEstimate>) -> String {
    let bootstrap = match bootstrap {
        Some(est) => format!(
            "{{\"value\": {}, \"sigma\": {}, \"n_trials\": {}}}",
            fmt_float(est.value),
            fmt_float(est.sigma),
            est.n_trials
        ),
        None => "null".to_string(),
    };
    format!(
        "{{\n  \"fidelity\": {},\n  \"bootstrap\": {}\n}}\n",
        fmt_float(value),
        bootstrap
    )
}

/// Interference curve: `x_meters,relative_rate`.
pub fn pattern_csv(points: &[PatternPoint]) -> String {
    let mut out = String::from("x_meters,relative_rate\n");
    for p in points {
        let _ = writeln!(out, "{},{}", fmt_float(p.x), fmt_float(p.rate));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{simulate_counts, state_probabilities};
    use crate::mub::prime_family;
    use crate::tomography::reconstruct;

    #[test]
    fn counts_json_round_trips() {
        let family = prime_family(5).unwrap();
        let state = family.bases()[2].vectors()[1].clone();
        let ideal = state_probabilities(&state, &family).unwrap();
        let counts =
            simulate_counts(&ideal, 1e4, 1.0, NoiseModel::Poisson { seed: 7 }).unwrap();
        let text = counts_json(&counts);
        let back = parse_counts_json(&text).unwrap();
        assert_eq!(back.counts(), counts.counts());
        assert_eq!(back.dim(), counts.dim());
        assert_eq!(back.mean_peak_rate(), counts.mean_peak_rate());
        assert_eq!(back.integration_time(), counts.integration_time());
        assert_eq!(back.noise().seed(), Some(7));
        // Byte determinism: re-serializing the parsed table reproduces the file.
        assert_eq!(counts_json(&back), text);
    }

    #[test]
    fn parse_rejects_malformed_counts() {
        assert!(parse_counts_json("not json").is_err());
        assert!(parse_counts_json("{\"dim\": 3}").is_err());
        // Wrong shape: dim 3 needs 4 rows.
        let text = "{\"dim\": 3, \"mean_peak_rate\": 1e4, \"integration_time\": 1.0, \
                    \"noise\": {\"kind\": \"none\"}, \"counts\": [[1,2,3],[4,5,6]]}";
        assert!(parse_counts_json(text).is_err());
        // Declared dim disagrees with row length.
        let text = "{\"dim\": 4, \"mean_peak_rate\": 1e4, \"integration_time\": 1.0, \
                    \"noise\": {\"kind\": \"none\"}, \
                    \"counts\": [[1,2,3],[4,5,6],[7,8,9],[1,1,1]]}";
        assert!(parse_counts_json(text).is_err());
    }

    #[test]
    fn writers_emit_valid_json_and_expected_csv_shape() {
        let family = prime_family(3).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_str(&family_json(&family)).expect("family JSON parses");
        assert_eq!(parsed["dim"], 3);
        assert_eq!(parsed["bases"].as_array().unwrap().len(), 4);
        assert_eq!(parsed["source"], "prime-formula");
        // First basis is computational: slot 0 amplitude of vector 0 is 1.
        assert_eq!(
            parsed["bases"][0]["vectors"][0][0][0].as_f64().unwrap(),
            1.0
        );

        let modulation = modulation_csv(&family).unwrap();
        // Header + one line per (basis, m, slit) triple.
        assert_eq!(modulation.lines().count(), 1 + 4 * 3 * 3);
        assert!(modulation.starts_with("basis,m,l,epsilon,phi_rad\n"));

        let table = ProbabilityTable::uniform(3);
        let csv = probability_csv(&table);
        assert_eq!(csv.lines().count(), 1 + 4 * 3);
        let third = fmt_float(1.0 / 3.0);
        assert!(csv.contains(&third));

        let recon = reconstruct(&table, &family).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_str(&reconstruction_json(&recon)).expect("reconstruction parses");
        assert_eq!(parsed["dim"], 3);
        assert_eq!(parsed["physical_eigenvalues"].as_array().unwrap().len(), 3);
        let parsed: serde_json::Value =
            serde_json::from_str(&density_json(&recon.physical)).expect("density parses");
        assert_eq!(parsed["matrix"].as_array().unwrap().len(), 3);

        let parsed: serde_json::Value = serde_json::from_str(&fidelity_json(
            0.5,
            Some(&FidelityEstimate {
                value: 0.5,
                sigma: 0.01,
                n_trials: 100,
            }),
        ))
        .expect("fidelity parses");
        assert_eq!(parsed["bootstrap"]["n_trials"], 100);

        let points = [
            PatternPoint { x: -1e-3, rate: 0.5 },
            PatternPoint { x: 1e-3, rate: 0.25 },
        ];
        let csv = pattern_csv(&points);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("x_meters,relative_rate\n"));
    }

    #[test]
    fn float_format_is_round_trip_exact() {
        for &x in &[1.0 / 3.0, std::f64::consts::PI, 1e-300, -0.0, 6.442307692307e-3] {
            let s = fmt_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn escape_handles_quotes_and_newlines() {
        assert_eq!(escape("a\"b\\c\nd"), "a\\\"b\\\\c\\nd");
        let wrapped = format!("{{\"s\": \"{}\"}}", escape("line1\nline2\t\"x\""));
        let parsed: serde_json::Value = serde_json::from_str(&wrapped).unwrap();
        assert_eq!(parsed["s"], "line1\nline2\t\"x\"");
    }
}
