//! Linear reconstruction of density operators from MUB probabilities,
//! physicality correction, forced purity, and bootstrap error bars.
//!
//! The linear inverse rests on the family's overcompleteness: since the
//! `D(D+1)` projectors tile `D+1` complete bases,
//!
//! ```text
//! rho = sum_alpha sum_m p_m^(alpha) * P_m^(alpha) - I
//! ```
//!
//! reproduces any trace-1 Hermitian `rho` exactly when the probabilities are
//! exact. Noisy tables give a Hermitian trace-1 estimate that may have
//! negative eigenvalues; the correction stage clips them.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};

use crate::measurement::{normalize_counts, CountTable, ProbabilityTable};
use crate::mub::MubFamily;
use crate::operator::DensityOperator;
use crate::seed::{subseed, BOOTSTRAP_STREAM};
use crate::state::QuditVector;
use crate::{C64, Error, Result};

/// Eigenvalue separations below this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Unconstrained linear estimate from a probability table.
///
/// The output is Hermitian by construction and has trace 1 up to rounding
/// whenever the rows are simplexes; positivity is not guaranteed.
pub fn linear_reconstruct(
    table: &ProbabilityTable,
    family: &MubFamily,
) -> Result<DensityOperator> {
    let dim = family.dim();
    if table.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: table.dim(),
            right: dim,
        });
    }
    let mut elems = vec![C64::new(0.0, 0.0); dim * dim];
    for (row, m, v) in family.projectors() {
        let p = table.get(row, m);
        let a = v.amplitudes();
        for i in 0..dim {
            for j in 0..dim {
                elems[i * dim + j] += p * a[i] * a[j].conj();
            }
        }
    }
    for i in 0..dim {
        elems[i * dim + i] -= 1.0;
    }
    DensityOperator::raw_estimate(dim, elems)
}

/// Eigenvalue clipping: negative eigenvalues go to zero and the spectrum is
/// rescaled to unit sum. Idempotent; physical inputs pass through unchanged
/// up to the eigensolver's round-off.
pub fn force_physical(rho: &DensityOperator) -> Result<DensityOperator> {
    let (values, vectors) = rho.eigensystem();
    let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateSpectrum);
    }
    let rescaled: Vec<f64> = clipped.iter().map(|v| v / total).collect();
    Ok(DensityOperator::from_eigensystem(
        rho.dim(),
        &rescaled,
        &vectors,
        false,
    ))
}

/// Dominant eigenvector of a physical operator, with degeneracy diagnosis.
#[derive(Debug, Clone)]
pub struct ForcedPurity {
    /// The forced-purity state, phase-normalized so its largest-modulus
    /// coefficient is real positive.
    pub vector: QuditVector,
    /// Separation between the two largest eigenvalues.
    pub top_gap: f64,
    /// True when the top eigenvalue is degenerate within [`DEGENERACY_TOL`];
    /// the returned vector is then a deterministic tie-break, not unique.
    pub degenerate: bool,
}

/// Replaces a noisy estimate by its dominant eigenvector.
pub fn force_purity(rho: &DensityOperator) -> Result<ForcedPurity> {
    let dim = rho.dim();
    let (values, vectors) = rho.eigensystem();
    let top = vectors.last().expect("dim >= 1").clone();
    let top_gap = if dim >= 2 {
        values[dim - 1] - values[dim - 2]
    } else {
        f64::INFINITY
    };
    // Phase convention: rotate so the largest-modulus coefficient is real
    // positive; on exact modulus ties the lowest slot wins.
    let anchor = top
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.norm()
                .partial_cmp(&b.norm())
                .expect("finite moduli")
                .then(ib.cmp(ia))
        })
        .map(|(_, c)| *c)
        .expect("dim >= 1");
    let phase = C64::from_polar(1.0, -anchor.arg());
    let vector = QuditVector::normalized(top.into_iter().map(|c| c * phase).collect())?;
    Ok(ForcedPurity {
        vector,
        top_gap,
        degenerate: top_gap < DEGENERACY_TOL,
    })
}

/// Complete reconstruction output.
#[derive(Debug, Clone)]
pub struct ReconstructionResult {
    pub raw: DensityOperator,
    pub physical: DensityOperator,
    pub pure_forced: QuditVector,
    pub min_raw_eigenvalue: f64,
    pub diagnostics: String,
}

/// Runs the full chain: linear inverse, eigenvalue clipping, forced purity.
pub fn reconstruct(table: &ProbabilityTable, family: &MubFamily) -> Result<ReconstructionResult> {
    let raw = linear_reconstruct(table, family)?;
    let raw_eigenvalues = raw.eigenvalues();
    let min_raw_eigenvalue = raw_eigenvalues[0];
    let clipped_mass: f64 = raw_eigenvalues.iter().map(|v| (-v).max(0.0)).sum();
    let physical = force_physical(&raw)?;
    let purity_outcome = force_purity(&physical)?;
    let mut diagnostics = format!(
        "min raw eigenvalue {min_raw_eigenvalue:.6e}; clipped probability mass \
         {clipped_mass:.6e}; top eigenvalue gap {:.6e}",
        purity_outcome.top_gap
    );
    if purity_outcome.degenerate {
        diagnostics.push_str(
            "; warning: top eigenvalue degenerate within 1e-10, forced-purity \
             state chosen by deterministic tie-break",
        );
    }
    Ok(ReconstructionResult {
        raw,
        physical,
        pure_forced: purity_outcome.vector,
        min_raw_eigenvalue,
        diagnostics,
    })
}

/// Overlap `<psi| rho |psi>`, clamped to `[0, 1]`.
pub fn fidelity(psi: &QuditVector, rho: &DensityOperator) -> Result<f64> {
    psi.check_unit()?;
    Ok(rho.expectation(psi)?.clamp(0.0, 1.0))
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityOperator) -> f64 {
    rho.purity()
}

/// Bootstrap summary of a fidelity estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityEstimate {
    pub value: f64,
    pub sigma: f64,
    pub n_trials: usize,
}

/// Parametric bootstrap over the counting noise.
///
/// Each trial resamples every observed count as Poisson(observed), re-runs
/// normalization, the linear inverse, and the physicality correction, and
/// evaluates the fidelity against `expected`. Trial `t` uses an independent
/// generator seeded by `subseed(seed, BOOTSTRAP_STREAM, t)`, so results are
/// reproducible and order-independent.
pub fn fidelity_with_errors(
    counts: &CountTable,
    family: &MubFamily,
    expected: &QuditVector,
    n_trials: usize,
    seed: u64,
) -> Result<FidelityEstimate> {
    if n_trials < 100 {
        return Err(Error::invalid(
            "bootstrap",
            format!("need at least 100 trials for a stable sigma, got {n_trials}"),
        ));
    }
    expected.check_unit()?;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for trial in 0..n_trials {
        let mut rng = ChaCha12Rng::seed_from_u64(subseed(seed, BOOTSTRAP_STREAM, trial as u64));
        let resampled: Vec<Vec<u64>> = counts
            .counts()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| {
                        if c == 0 {
                            0
                        } else {
                            Poisson::new(c as f64)
                                .expect("positive mean")
                                .sample(&mut rng) as u64
                        }
                    })
                    .collect()
            })
            .collect();
        let resampled = CountTable::new(
            resampled,
            counts.mean_peak_rate(),
            counts.integration_time(),
            counts.noise(),
        )?;
        let table = normalize_counts(&resampled)?;
        let physical = force_physical(&linear_reconstruct(&table, family)?)?;
        let f = fidelity(expected, &physical)?;
        sum += f;
        sum_sq += f * f;
    }
    let n = n_trials as f64;
    let value = sum / n;
    let variance = ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0);
    Ok(FidelityEstimate {
        value,
        sigma: variance.sqrt(),
        n_trials,
    })
}
