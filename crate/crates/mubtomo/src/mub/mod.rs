//! Construction and certification of mutually unbiased basis (MUB) families.
//!
//! Two constructions are provided. For odd prime dimension `D`, the `D` phase
//! bases come from the quadratic-phase formula: the m-th vector of basis
//! `alpha` has coefficients
//!
//! ```text
//! c_l = (1/sqrt(D)) * exp(-i * phi),   phi = 2*pi*(alpha*l^2 + m*l)/D  (mod 2*pi)
//! ```
//!
//! with centered indices `l, m` running over `{-(D-1)/2, ..., (D-1)/2}` and
//! `alpha` over `1..=D`. Together with the computational (slit) basis this
//! yields the complete family of `D+1` bases. For `D = 8` the family comes
//! from nine embedded unitary tables selected by an exhaustive unbiasedness
//! audit (see [`dim8_audit`]).

mod tables;

pub use tables::{dim8_audit, dim8_family, Dim8Audit, TableReading};

use std::fmt;

use crate::state::QuditVector;
use crate::{C64, Error, Result};

/// Where a family's vectors came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Quadratic-phase formula for odd prime dimension.
    PrimeFormula,
    /// Embedded dimension-8 unitary tables.
    TabulatedUnitaries,
    /// Caller-supplied bases (e.g. the qubit Pauli family).
    Explicit,
}

/// One orthonormal basis inside a family.
#[derive(Debug, Clone)]
pub struct MubBasis {
    /// Family index: 0 is reserved for the computational basis, phase bases
    /// count from 1 in construction order.
    pub index: usize,
    vectors: Vec<QuditVector>,
}

impl MubBasis {
    /// Wraps `dim` unit vectors as a basis. Orthonormality is audited by
    /// [`verify_family`], not enforced here, so defective candidates can be
    /// represented and reported.
    pub fn new(index: usize, vectors: Vec<QuditVector>) -> Result<Self> {
        let dim = vectors.len();
        if dim == 0 {
            return Err(Error::invalid("basis", "no vectors"));
        }
        for v in &vectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: v.dim(),
                    right: dim,
                });
            }
            v.check_unit()?;
        }
        Ok(MubBasis { index, vectors })
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[QuditVector] {
        &self.vectors
    }

    pub fn vector(&self, m: usize) -> &QuditVector {
        &self.vectors[m]
    }
}

/// A complete tomographic measurement design: `D + 1` bases over dimension `D`.
#[derive(Debug, Clone)]
pub struct MubFamily {
    dim: usize,
    bases: Vec<MubBasis>,
    provenance: Provenance,
}

impl MubFamily {
    /// Assembles a family from `dim + 1` bases of matching dimension.
    /// Shape is enforced; the unbiasedness audit is [`verify_family`]'s job.
    pub fn from_bases(bases: Vec<MubBasis>, provenance: Provenance) -> Result<Self> {
        let dim = match bases.first() {
            Some(b) => b.dim(),
            None => return Err(Error::invalid("family", "no bases")),
        };
        if bases.len() != dim + 1 {
            return Err(Error::invalid(
                "family",
                format!("expected {} bases for dimension {dim}, got {}", dim + 1, bases.len()),
            ));
        }
        for b in &bases {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: b.dim(),
                    right: dim,
                });
            }
        }
        Ok(MubFamily {
            dim,
            bases,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bases(&self) -> &[MubBasis] {
        &self.bases
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Number of rank-1 projectors in the design: `D * (D + 1)`.
    pub fn projector_count(&self) -> usize {
        self.dim * (self.dim + 1)
    }

    /// Iterates `(row, m, vector)` over every projector in row-major family
    /// order. `row` is the basis position (also the probability-table row).
    pub fn projectors(&self) -> impl Iterator<Item = (usize, usize, &QuditVector)> {
        self.bases.iter().enumerate().flat_map(|(row, basis)| {
            basis
                .vectors
                .iter()
                .enumerate()
                .map(move |(m, v)| (row, m, v))
        })
    }
}

/// True if `d` is an odd prime.
pub fn is_odd_prime(d: usize) -> bool {
    if d < 3 || d.is_multiple_of(2) {
        return false;
    }
    let mut k = 3;
    while k * k <= d {
        if d.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

/// The m-th vector of phase basis `alpha` for odd prime dimension `dim`.
///
/// `m` is a centered index in `{-(D-1)/2, ..., (D-1)/2}`. The phase is
/// reduced modulo `dim` in integer arithmetic before scaling by `2*pi/dim`,
/// so each coefficient phase lands exactly on one of the `dim` grid values.
pub fn prime_vector(dim: usize, alpha: usize, m: i64) -> Result<QuditVector> {
    if !is_odd_prime(dim) {
        return Err(Error::NotOddPrime(dim));
    }
    if alpha < 1 || alpha > dim {
        return Err(Error::IndexOutOfRange {
            what: "basis index alpha",
            index: alpha as i64,
            dim,
        });
    }
    let half = (dim as i64 - 1) / 2;
    if m < -half || m > half {
        return Err(Error::IndexOutOfRange {
            what: "vector index m",
            index: m,
            dim,
        });
    }
    let d = dim as i64;
    let scale = 1.0 / (dim as f64).sqrt();
    let amplitudes = (-half..=half)
        .map(|l| {
            let r = (alpha as i64 * l * l + m * l).rem_euclid(d);
            let phi = 2.0 * std::f64::consts::PI * (r as f64) / (dim as f64);
            C64::from_polar(scale, -phi)
        })
        .collect();
    QuditVector::unit(amplitudes)
}

/// Complete `D + 1`-basis family for odd prime `dim`: computational basis at
/// index 0 followed by phase bases `alpha = 1..=D`.
pub fn prime_family(dim: usize) -> Result<MubFamily> {
    if !is_odd_prime(dim) {
        return Err(Error::NotOddPrime(dim));
    }
    let half = (dim as i64 - 1) / 2;
    let computational = MubBasis::new(
        0,
        (0..dim)
            .map(|slot| QuditVector::basis_state(dim, slot))
            .collect::<Result<_>>()?,
    )?;
    let mut bases = vec![computational];
    for alpha in 1..=dim {
        let vectors = (-half..=half)
            .map(|m| prime_vector(dim, alpha, m))
            .collect::<Result<_>>()?;
        bases.push(MubBasis::new(alpha, vectors)?);
    }
    MubFamily::from_bases(bases, Provenance::PrimeFormula)
}

/// The three-basis qubit family: computational plus the two conjugate bases
/// `(|0> +- |1>)/sqrt(2)` and `(|0> +- i|1>)/sqrt(2)`.
pub fn qubit_family() -> MubFamily {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| C64::new(re, im);
    let vec2 = |a: C64, b: C64| QuditVector::unit(vec![a, b]).expect("unit by construction");
    let bases = vec![
        MubBasis::new(
            0,
            vec![
                QuditVector::basis_state(2, 0).expect("valid slot"),
                QuditVector::basis_state(2, 1).expect("valid slot"),
            ],
        )
        .expect("well-formed basis"),
        MubBasis::new(
            1,
            vec![
                vec2(c(h, 0.0), c(h, 0.0)),
                vec2(c(h, 0.0), c(-h, 0.0)),
            ],
        )
        .expect("well-formed basis"),
        MubBasis::new(
            2,
            vec![
                vec2(c(h, 0.0), c(0.0, h)),
                vec2(c(h, 0.0), c(0.0, -h)),
            ],
        )
        .expect("well-formed basis"),
    ];
    MubFamily::from_bases(bases, Provenance::Explicit).expect("three bases of dimension 2")
}

/// Family for any supported dimension: odd primes via the phase formula,
/// 8 via the embedded tables, 2 via the qubit family.
pub fn family_for_dim(dim: usize) -> Result<MubFamily> {
    if is_odd_prime(dim) {
        prime_family(dim)
    } else if dim == 8 {
        Ok(dim8_family())
    } else if dim == 2 {
        Ok(qubit_family())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// Orthonormality audit of one basis: worst `|<v_i|v_j> - delta_ij|`.
fn orthonormality_deviation(basis: &MubBasis) -> f64 {
    let mut worst = 0.0_f64;
    for (i, u) in basis.vectors().iter().enumerate() {
        for (j, v) in basis.vectors().iter().enumerate() {
            let ip = u.inner(v).expect("same dimension within a basis");
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((ip - target).norm());
        }
    }
    worst
}

/// Worst `| |<u|v>|^2 - 1/D |` between two bases.
fn unbiasedness_deviation(a: &MubBasis, b: &MubBasis) -> f64 {
    let dim = a.dim() as f64;
    let mut worst = 0.0_f64;
    for u in a.vectors() {
        for v in b.vectors() {
            let ov = u.overlap_sq(v).expect("same dimension within a family");
            worst = worst.max((ov - 1.0 / dim).abs());
        }
    }
    worst
}

/// Per-basis orthonormality result inside a [`CertificationReport`].
#[derive(Debug, Clone)]
pub struct BasisCheck {
    pub index: usize,
    pub deviation: f64,
    pub passed: bool,
}

/// Cross-basis unbiasedness result inside a [`CertificationReport`].
#[derive(Debug, Clone)]
pub struct PairCheck {
    pub index_a: usize,
    pub index_b: usize,
    pub deviation: f64,
    pub passed: bool,
}

/// Outcome of the exhaustive family audit. Never errors: defects are
/// reported, not thrown.
#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub dim: usize,
    pub tol: f64,
    pub bases: Vec<BasisCheck>,
    pub pairs: Vec<PairCheck>,
    pub max_orthonormality_deviation: f64,
    pub max_unbiasedness_deviation: f64,
    pub projector_count: usize,
    pub passed: bool,
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "certification: dim {} family, {} projectors, tolerance {:.1e}",
            self.dim, self.projector_count, self.tol
        )?;
        for b in &self.bases {
            writeln!(
                f,
                "  basis {:>2}: orthonormality deviation {:.3e}  [{}]",
                b.index,
                b.deviation,
                if b.passed { "pass" } else { "FAIL" }
            )?;
        }
        for p in &self.pairs {
            writeln!(
                f,
                "  pair ({:>2},{:>2}): |overlap^2 - 1/{}| max {:.3e}  [{}]",
                p.index_a,
                p.index_b,
                self.dim,
                p.deviation,
                if p.passed { "pass" } else { "FAIL" }
            )?;
        }
        writeln!(
            f,
            "  worst orthonormality {:.3e}, worst unbiasedness {:.3e}",
            self.max_orthonormality_deviation, self.max_unbiasedness_deviation
        )?;
        write!(f, "  overall: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Audits every basis and every cross-basis pair of `family` at tolerance
/// `tol`, reporting the worst deviations and pass/fail per pair.
pub fn verify_family(family: &MubFamily, tol: f64) -> CertificationReport {
    let bases: Vec<BasisCheck> = family
        .bases()
        .iter()
        .map(|b| {
            let deviation = orthonormality_deviation(b);
            BasisCheck {
                index: b.index,
                deviation,
                passed: deviation < tol,
            }
        })
        .collect();
    let mut pairs = Vec::new();
    for (i, a) in family.bases().iter().enumerate() {
        for b in family.bases().iter().skip(i + 1) {
            let deviation = unbiasedness_deviation(a, b);
            pairs.push(PairCheck {
                index_a: a.index,
                index_b: b.index,
                deviation,
                passed: deviation < tol,
            });
        }
    }
    let max_orthonormality_deviation = bases.iter().map(|b| b.deviation).fold(0.0, f64::max);
    let max_unbiasedness_deviation = pairs.iter().map(|p| p.deviation).fold(0.0, f64::max);
    let passed = bases.iter().all(|b| b.passed) && pairs.iter().all(|p| p.passed);
    CertificationReport {
        dim: family.dim(),
        tol,
        bases,
        pairs,
        max_orthonormality_deviation,
        max_unbiasedness_deviation,
        projector_count: family.projector_count(),
        passed,
    }
}

/// Amplitude/phase split of a basis vector, ready to program into the two
/// modulator stages: `c_l = epsilon_l * exp(-i * phi_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSetting {
    epsilons: Vec<f64>,
    phases: Vec<f64>,
}

impl ModulationSetting {
    /// Validates `sum(epsilon^2) = 1` within 1e-12 and wraps phases into
    /// `[0, 2*pi)`.
    pub fn new(epsilons: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if epsilons.len() != phases.len() {
            return Err(Error::DimensionMismatch {
                left: epsilons.len(),
                right: phases.len(),
            });
        }
        if epsilons.iter().any(|&e| !(e >= 0.0)) {
            return Err(Error::invalid("modulation", "negative or NaN epsilon"));
        }
        let total: f64 = epsilons.iter().map(|e| e * e).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "modulation",
                format!("epsilon^2 sum deviates from 1 by {:.3e}", (total - 1.0).abs()),
            ));
        }
        let tau = 2.0 * std::f64::consts::PI;
        let phases = phases.into_iter().map(|p| p.rem_euclid(tau)).collect();
        Ok(ModulationSetting { epsilons, phases })
    }

    pub fn dim(&self) -> usize {
        self.epsilons.len()
    }

    /// Amplitude transmissions, slot order.
    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    /// Phases in `[0, 2*pi)`, slot order.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Rebuilds the vector `epsilon_l * exp(-i * phi_l)` this setting encodes.
    pub fn to_vector(&self) -> Result<QuditVector> {
        QuditVector::unit(
            self.epsilons
                .iter()
                .zip(&self.phases)
                .map(|(&e, &p)| C64::from_polar(e, -p))
                .collect(),
        )
    }
}

/// Splits a unit vector into modulator settings: `epsilon_l = |c_l|`,
/// `phi_l = -arg(c_l) mod 2*pi`. Programming the analyzer with these values
/// makes the on-axis count rate proportional to `|<v|state>|^2`.
pub fn vector_to_modulation(v: &QuditVector) -> Result<ModulationSetting> {
    v.check_unit()?;
    let epsilons = v.amplitudes().iter().map(|c| c.norm()).collect();
    let phases = v
        .amplitudes()
        .iter()
        .map(|c| if c.norm() == 0.0 { 0.0 } else { -c.arg() })
        .collect();
    ModulationSetting::new(epsilons, phases)
}

/// Three-qubit bit-string label of a dimension-8 slit, from its half-integer
/// centered index: -7/2 -> "000" counting up to 7/2 -> "111".
pub fn qubit_label(label: f64) -> Result<&'static str> {
    const LABELS: [&str; 8] = ["000", "001", "010", "011", "100", "101", "110", "111"];
    let doubled = 2.0 * label;
    if doubled.fract() != 0.0 {
        return Err(Error::IndexOutOfRange {
            what: "half-integer slit label",
            index: label as i64,
            dim: 8,
        });
    }
    let slot = (doubled as i64 + 7) / 2;
    if !(-7..=7).contains(&(doubled as i64)) || (doubled as i64 + 7) % 2 != 0 {
        return Err(Error::IndexOutOfRange {
            what: "half-integer slit label",
            index: doubled as i64,
            dim: 8,
        });
    }
    Ok(LABELS[slot as usize])
}
