//! Measurement simulation: ideal probability tables, Poisson count
//! acquisition, count normalization, and the prime-dimension single-pattern
//! shortcut.
//!
//! A probability table has one row per family basis in family order and one
//! column per basis vector, `p[row][m] = Tr(rho * P_m)`. Counts are drawn
//! one Poisson sample per projector with mean `p * rate * time`, modeling an
//! acquisition that reconfigures the modulators per projector and counts for
//! a fixed time.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};

use crate::mub::{prime_vector, vector_to_modulation, MubFamily};
use crate::operator::DensityOperator;
use crate::optics::{apply_phase, envelope, count_rate, ApertureGeometry, DetectorConfig};
use crate::state::{slot_label, QuditVector};
use crate::{Error, Result};

/// `(D+1) x D` table of outcome probabilities, rows in family basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl ProbabilityTable {
    /// Validates shape (`dim + 1` rows of `dim` entries) and entry range;
    /// round-off within 1e-9 of `[0, 1]` is clamped in.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = match rows.first() {
            Some(r) => r.len(),
            None => return Err(Error::invalid("probability table", "no rows")),
        };
        if rows.len() != dim + 1 {
            return Err(Error::invalid(
                "probability table",
                format!("expected {} rows of {dim}, got {}", dim + 1, rows.len()),
            ));
        }
        let mut clean = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: dim,
                });
            }
            let mut out = Vec::with_capacity(dim);
            for p in row {
                if !(-1e-9..=1.0 + 1e-9).contains(&p) {
                    return Err(Error::invalid(
                        "probability table",
                        format!("entry {p} outside [0, 1]"),
                    ));
                }
                out.push(p.clamp(0.0, 1.0));
            }
            clean.push(out);
        }
        Ok(ProbabilityTable { dim, rows: clean })
    }

    /// Every entry `1/D`: the table of the maximally mixed state.
    pub fn uniform(dim: usize) -> Self {
        ProbabilityTable {
            dim,
            rows: vec![vec![1.0 / dim as f64; dim]; dim + 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn get(&self, row: usize, m: usize) -> f64 {
        self.rows[row][m]
    }

    /// Worst `|row sum - 1|` across rows.
    pub fn max_row_sum_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Photon-counting noise model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    /// Counts are the rounded means; no randomness.
    None,
    /// One Poisson draw per projector, reproducible from the seed.
    Poisson { seed: u64 },
}

impl NoiseModel {
    pub fn seed(&self) -> Option<u64> {
        match *self {
            NoiseModel::None => None,
            NoiseModel::Poisson { seed } => Some(seed),
        }
    }
}

/// Acquired counts with the acquisition parameters that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    dim: usize,
    counts: Vec<Vec<u64>>,
    mean_peak_rate: f64,
    integration_time: f64,
    noise: NoiseModel,
}

impl CountTable {
    /// Wraps an existing count grid, e.g. read back from disk.
    pub fn new(
        counts: Vec<Vec<u64>>,
        mean_peak_rate: f64,
        integration_time: f64,
        noise: NoiseModel,
    ) -> Result<Self> {
        let dim = match counts.first() {
            Some(r) => r.len(),
            None => return Err(Error::invalid("count table", "no rows")),
        };
        if counts.len() != dim + 1 || counts.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid(
                "count table",
                format!("expected {} rows of {dim}", dim + 1),
            ));
        }
        check_acquisition(mean_peak_rate, integration_time)?;
        Ok(CountTable {
            dim,
            counts,
            mean_peak_rate,
            integration_time,
            noise,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn mean_peak_rate(&self) -> f64 {
        self.mean_peak_rate
    }

    pub fn integration_time(&self) -> f64 {
        self.integration_time
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }
}

fn check_acquisition(mean_peak_rate: f64, integration_time: f64) -> Result<()> {
    for (name, v) in [
        ("mean_peak_rate", mean_peak_rate),
        ("integration_time", integration_time),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(
                "acquisition",
                format!("{name} must be positive and finite, got {v}"),
            ));
        }
    }
    Ok(())
}

/// Outcome probabilities of a pure state under every family basis.
pub fn state_probabilities(psi: &QuditVector, family: &MubFamily) -> Result<ProbabilityTable> {
    psi.check_unit()?;
    if psi.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: family.dim(),
        });
    }
    let rows = family
        .bases()
        .iter()
        .map(|basis| {
            basis
                .vectors()
                .iter()
                .map(|v| v.overlap_sq(psi).expect("dims checked"))
                .collect()
        })
        .collect();
    ProbabilityTable::new(rows)
}

/// Outcome probabilities of a density operator under every family basis.
pub fn density_probabilities(
    rho: &DensityOperator,
    family: &MubFamily,
) -> Result<ProbabilityTable> {
    if rho.dim() != family.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: family.dim(),
        });
    }
    let rows = family
        .bases()
        .iter()
        .map(|basis| {
            basis
                .vectors()
                .iter()
                .map(|v| rho.expectation(v).expect("dims checked"))
                .collect()
        })
        .collect();
    ProbabilityTable::new(rows)
}

/// Draws one count per projector with mean `p * rate * time`.
///
/// The generator is seeded from the noise model alone and consumed in
/// row-major table order, so identical inputs give identical tables.
pub fn simulate_counts(
    table: &ProbabilityTable,
    mean_peak_rate: f64,
    integration_time: f64,
    noise: NoiseModel,
) -> Result<CountTable> {
    check_acquisition(mean_peak_rate, integration_time)?;
    let scale = mean_peak_rate * integration_time;
    let counts = match noise {
        NoiseModel::None => table
            .rows()
            .iter()
            .map(|row| row.iter().map(|p| (p * scale).round() as u64).collect())
            .collect(),
        NoiseModel::Poisson { seed } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            table
                .rows()
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&p| {
                            let mean = p * scale;
                            if mean > 0.0 {
                                let dist =
                                    Poisson::new(mean).expect("positive finite mean");
                                dist.sample(&mut rng) as u64
                            } else {
                                0
                            }
                        })
                        .collect()
                })
                .collect()
        }
    };
    CountTable::new(counts, mean_peak_rate, integration_time, noise)
}

/// Per-basis normalization: each row of counts is a complete measurement,
/// so dividing by its total yields that basis's probability simplex.
pub fn normalize_counts(counts: &CountTable) -> Result<ProbabilityTable> {
    let rows = counts
        .counts()
        .iter()
        .enumerate()
        .map(|(row, r)| {
            let total: u64 = r.iter().sum();
            if total == 0 {
                return Err(Error::EmptyCountRow { row });
            }
            Ok(r.iter().map(|&c| c as f64 / total as f64).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    ProbabilityTable::new(rows)
}

/// All `D` outcome probabilities of phase basis `alpha` extracted from one
/// interference pattern (odd prime `D` only).
///
/// Models the shortcut acquisition: the state is phase-modulated with the
/// basis's `m = 0` phases (`theta_l = 2*pi*alpha*l^2/D`, amplitudes
/// untouched) and sent through the imaging system with its label inversion.
/// The far-field rate is then read at the `D` comb positions `x_m` where the
/// inter-slit phase equals `2*pi*m/D`, envelope-corrected, and normalized.
/// Because of the label inversion, the probability of basis index `m`
/// appears at position `x_{-m}`; this index map was fixed against the
/// direct-projection oracle. The result matches the corresponding
/// [`state_probabilities`] row to better than 1e-8.
pub fn single_pattern_probabilities(
    state: &QuditVector,
    alpha: usize,
    geom: &ApertureGeometry,
) -> Result<Vec<f64>> {
    let dim = geom.dim();
    if state.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: dim,
        });
    }
    state.check_unit()?;
    // Phase settings of the basis's m = 0 vector; ordering checks on alpha
    // happen inside the vector constructor.
    let setting = vector_to_modulation(&prime_vector(dim, alpha, 0)?)?;
    let modulated = apply_phase(state, setting.phases(), true);
    let mut raw = vec![0.0; dim];
    for (slot, value) in raw.iter_mut().enumerate() {
        let m = slot_label(dim, slot);
        // Inverted labeling: index m is read at the mirrored comb position.
        let x = geom.index_position(-m);
        let env = envelope(x, geom);
        *value = count_rate(&modulated, x, geom, &DetectorConfig::Point) / env;
    }
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::invalid(
            "single pattern",
            "pattern vanished at every comb position",
        ));
    }
    Ok(raw.into_iter().map(|v| v / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::{family_for_dim, prime_family};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    fn random_state(rng: &mut ChaCha12Rng, dim: usize) -> QuditVector {
        let amps: Vec<crate::C64> = (0..dim)
            .map(|_| crate::C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        QuditVector::normalized(amps).unwrap()
    }

    #[test]
    fn computational_state_is_unbiased_against_phase_bases() {
        let family = prime_family(5).unwrap();
        let psi = QuditVector::basis_state(5, 0).unwrap();
        let table = state_probabilities(&psi, &family).unwrap();
        assert_abs_diff_eq!(table.get(0, 0), 1.0, epsilon = 1e-12);
        for m in 1..5 {
            assert_abs_diff_eq!(table.get(0, m), 0.0, epsilon = 1e-12);
        }
        for row in 1..6 {
            for m in 0..5 {
                assert_abs_diff_eq!(table.get(row, m), 0.2, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mixed_state_table_is_uniform() {
        let family = family_for_dim(8).unwrap();
        let rho = DensityOperator::maximally_mixed(8);
        let table = density_probabilities(&rho, &family).unwrap();
        for row in 0..9 {
            for m in 0..8 {
                assert_abs_diff_eq!(table.get(row, m), 0.125, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rows_are_simplexes_for_random_states() {
        let family = prime_family(7).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..20 {
            let table = state_probabilities(&random_state(&mut rng, 7), &family).unwrap();
            assert!(table.max_row_sum_deviation() < 1e-12);
            assert!(table.rows().iter().flatten().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn noiseless_counts_are_rounded_means() {
        let table = ProbabilityTable::new(vec![
            vec![0.5, 0.5],
            vec![1.0, 0.0],
            vec![0.25, 0.75],
        ])
        .unwrap();
        let counts = simulate_counts(&table, 10_000.0, 1.0, NoiseModel::None).unwrap();
        assert_eq!(counts.counts()[0], vec![5_000, 5_000]);
        assert_eq!(counts.counts()[1], vec![10_000, 0]);
        assert_eq!(counts.counts()[2], vec![2_500, 7_500]);
    }

    #[test]
    fn zero_probability_never_counts() {
        let table = ProbabilityTable::new(vec![
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 0.0],
        ])
        .unwrap();
        for seed in 0..50 {
            let counts =
                simulate_counts(&table, 1e4, 1.0, NoiseModel::Poisson { seed }).unwrap();
            assert!(counts.counts().iter().all(|row| row[1] == 0));
        }
    }

    #[test]
    fn same_seed_reproduces_counts_exactly() {
        let family = prime_family(3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        let table = state_probabilities(&random_state(&mut rng, 3), &family).unwrap();
        let a = simulate_counts(&table, 1e4, 1.0, NoiseModel::Poisson { seed: 99 }).unwrap();
        let b = simulate_counts(&table, 1e4, 1.0, NoiseModel::Poisson { seed: 99 }).unwrap();
        let c = simulate_counts(&table, 1e4, 1.0, NoiseModel::Poisson { seed: 100 }).unwrap();
        assert_eq!(a.counts(), b.counts());
        assert_ne!(a.counts(), c.counts());
    }

    #[test]
    fn poisson_moments_match_over_many_seeds() {
        // Full-probability entry at rate 10^4 for 1 s: across 10^4 seeds the
        // sample mean must sit within 4 standard errors of 10^4 and the
        // sample std within 5% of 100.
        let table = ProbabilityTable::new(vec![
            vec![1.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 0.0],
        ])
        .unwrap();
        let n = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for seed in 0..n {
            let counts =
                simulate_counts(&table, 1e4, 1.0, NoiseModel::Poisson { seed }).unwrap();
            let c = counts.counts()[0][0] as f64;
            sum += c;
            sum_sq += c * c;
        }
        let mean = sum / n as f64;
        let var = (sum_sq - sum * sum / n as f64) / (n as f64 - 1.0);
        assert!((mean - 1e4).abs() < 4.0, "sample mean {mean}");
        let std = var.sqrt();
        assert!((std - 100.0).abs() < 5.0, "sample std {std}");
    }

    #[test]
    fn normalization_divides_by_row_totals() {
        let counts = CountTable::new(
            vec![vec![3, 1], vec![2, 2], vec![0, 4]],
            1e4,
            1.0,
            NoiseModel::None,
        )
        .unwrap();
        let table = normalize_counts(&counts).unwrap();
        assert_abs_diff_eq!(table.get(0, 0), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(table.get(0, 1), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(table.get(2, 0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn empty_rows_are_reported_by_position() {
        let counts = CountTable::new(
            vec![vec![3, 1], vec![0, 0], vec![1, 1]],
            1e4,
            1.0,
            NoiseModel::None,
        )
        .unwrap();
        match normalize_counts(&counts) {
            Err(Error::EmptyCountRow { row }) => assert_eq!(row, 1),
            other => panic!("expected empty-row error, got {other:?}"),
        }
    }

    #[test]
    fn noiseless_round_trip_recovers_probabilities() {
        let family = prime_family(7).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        let ideal = state_probabilities(&random_state(&mut rng, 7), &family).unwrap();
        let counts = simulate_counts(&ideal, 1e6, 1.0, NoiseModel::None).unwrap();
        let back = normalize_counts(&counts).unwrap();
        for row in 0..8 {
            for m in 0..7 {
                // Rounding to integer counts costs at most ~1/(rate*time).
                assert_abs_diff_eq!(back.get(row, m), ideal.get(row, m), epsilon = 2e-6);
            }
        }
    }

    #[test]
    fn shortcut_matches_projections_for_small_primes() {
        let mut rng = ChaCha12Rng::seed_from_u64(24);
        for dim in [3usize, 5] {
            let geom = ApertureGeometry::standard(dim);
            let family = prime_family(dim).unwrap();
            for _ in 0..10 {
                let psi = random_state(&mut rng, dim);
                let ideal = state_probabilities(&psi, &family).unwrap();
                for alpha in 1..=dim {
                    let probs = single_pattern_probabilities(&psi, alpha, &geom).unwrap();
                    for (m, &p) in probs.iter().enumerate() {
                        assert_abs_diff_eq!(p, ideal.get(alpha, m), epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn shortcut_rejects_non_prime_dims() {
        let geom = ApertureGeometry::standard(8);
        let psi = QuditVector::from_real(&[1.0; 8]).unwrap();
        assert!(matches!(
            single_pattern_probabilities(&psi, 1, &geom),
            Err(Error::NotOddPrime(8))
        ));
    }
}
