//! Embedded dimension-8 unitary tables and the audit selecting the
//! certified nine-basis family.
//!
//! The nine matrices are stored as exact symbolic entries: a token from
//! `{0, 1, -1, i, -i}` times a per-table scale from `{1/sqrt(8), 1/2,
//! 1/sqrt(2)}`. They are converted to floating complex at load, so every
//! coefficient is exact to one rounding of the scale constant.
//!
//! The source tables do not state whether basis vectors are matrix rows or
//! columns, and they offer ten candidates (the identity plus nine tables)
//! for a nine-member family. [`dim8_audit`] settles both questions
//! empirically: it scans every nine-candidate subset under both readings and
//! reports which combination is mutually unbiased. The unique certifying
//! combination is the nine tables read as columns, with the identity basis
//! excluded; [`dim8_family`] returns exactly that family.

use std::fmt;

use super::{MubBasis, MubFamily, Provenance};
use crate::state::QuditVector;
use crate::{C64, Error, Result};

/// Token rows of the nine tables, index 1..=9.
const TABLE_ROWS: [[&str; 8]; 9] = [
    [
        "1 -i -1 i -1 i 1 -i",
        "-i 1 i -1 i -1 -i 1",
        "-i 1 -i 1 i -1 i -1",
        "1 -i 1 -i -1 i -1 i",
        "1 -i -1 i 1 -i -1 i",
        "-i 1 i -1 -i 1 i -1",
        "-i 1 -i 1 -i 1 -i 1",
        "1 -i 1 -i 1 -i 1 -i",
    ],
    [
        "1 -1 -1 1 -i i i -i",
        "1 1 -1 -1 -i -i i i",
        "-1 1 -1 1 i -i i -i",
        "1 1 1 1 -i -i -i -i",
        "-i i i -i 1 -1 -1 1",
        "-i -i i i 1 1 -1 -1",
        "i -i i -i -1 1 -1 1",
        "-i -i -i -i 1 1 1 1",
    ],
    [
        "1 0 -1 0 0 0 0 0",
        "0 i 0 -i 0 0 0 0",
        "0 1 0 1 0 0 0 0",
        "i 0 i 0 0 0 0 0",
        "0 0 0 0 1 0 -1 0",
        "0 0 0 0 0 i 0 -i",
        "0 0 0 0 0 1 0 1",
        "0 0 0 0 i 0 i 0",
    ],
    [
        "1 -1 0 0 -1 -1 0 0",
        "-1 1 0 0 -1 -1 0 0",
        "0 0 1 -1 0 0 -1 -1",
        "0 0 -1 1 0 0 -1 -1",
        "1 1 0 0 -1 1 0 0",
        "1 1 0 0 1 -1 0 0",
        "0 0 1 1 0 0 -1 1",
        "0 0 1 1 0 0 1 -1",
    ],
    [
        "1 -i -i -1 -1 -i i -1",
        "-i 1 -1 -i -i -1 -1 i",
        "-i -1 1 -i i -1 -1 -i",
        "-1 -i -i 1 -1 i -i -1",
        "-i 1 -1 -i i 1 1 -i",
        "1 -i -i -1 1 i -i 1",
        "-1 -i -i 1 1 -i i 1",
        "-i -1 1 -i -i 1 1 i",
    ],
    [
        "1 0 -1 0 -1 0 1 0",
        "0 i 0 -i 0 -i 0 i",
        "1 0 1 0 -1 0 -1 0",
        "0 i 0 i 0 -i 0 -i",
        "0 1 0 -1 0 1 0 -1",
        "i 0 -i 0 i 0 -i 0",
        "0 1 0 1 0 1 0 1",
        "i 0 i 0 i 0 i 0",
    ],
    [
        "1 -i 0 0 -1 i 0 0",
        "-i 1 0 0 i -1 0 0",
        "0 0 1 -i 0 0 -1 i",
        "0 0 -i 1 0 0 i -1",
        "0 0 i 1 0 0 i 1",
        "0 0 1 i 0 0 1 i",
        "i 1 0 0 i 1 0 0",
        "1 i 0 0 1 i 0 0",
    ],
    [
        "1 -1 -1 1 -1 1 -1 1",
        "1 1 -1 -1 -1 -1 -1 -1",
        "-1 1 1 -1 -1 1 -1 1",
        "-1 -1 1 1 -1 -1 -1 -1",
        "1 -1 1 -1 -1 1 1 -1",
        "1 1 1 1 -1 -1 1 1",
        "1 -1 1 -1 1 -1 -1 1",
        "1 1 1 1 1 1 -1 -1",
    ],
    [
        "1 0 -i 0 -1 0 i 0",
        "0 1 0 -i 0 -1 0 i",
        "-i 0 1 0 i 0 -1 0",
        "0 -i 0 1 0 i 0 -1",
        "-i 0 1 0 -i 0 1 0",
        "0 -i 0 1 0 -i 0 1",
        "1 0 -i 0 1 0 -i 0",
        "0 1 0 -i 0 1 0 -i",
    ],
];

/// Per-table scale: tables 1, 2, 5, 8 use 1/sqrt(8); table 3 uses 1/sqrt(2);
/// tables 4, 6, 7, 9 use 1/2.
fn table_scale(alpha: usize) -> f64 {
    match alpha {
        1 | 2 | 5 | 8 => 1.0 / 8.0_f64.sqrt(),
        3 => std::f64::consts::FRAC_1_SQRT_2,
        4 | 6 | 7 | 9 => 0.5,
        _ => unreachable!("table index {alpha} outside 1..=9"),
    }
}

fn parse_token(tok: &str) -> C64 {
    match tok {
        "0" => C64::new(0.0, 0.0),
        "1" => C64::new(1.0, 0.0),
        "-1" => C64::new(-1.0, 0.0),
        "i" => C64::new(0.0, 1.0),
        "-i" => C64::new(0.0, -1.0),
        other => unreachable!("bad table token {other:?}"),
    }
}

/// One embedded unitary, row-major, 64 entries. `alpha` in 1..=9.
pub fn dim8_unitary(alpha: usize) -> Result<Vec<C64>> {
    if !(1..=9).contains(&alpha) {
        return Err(Error::IndexOutOfRange {
            what: "table index",
            index: alpha as i64,
            dim: 8,
        });
    }
    let scale = table_scale(alpha);
    let mut elems = Vec::with_capacity(64);
    for row in &TABLE_ROWS[alpha - 1] {
        for tok in row.split_whitespace() {
            elems.push(parse_token(tok) * scale);
        }
    }
    debug_assert_eq!(elems.len(), 64);
    Ok(elems)
}

/// How a table is turned into eight basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableReading {
    /// Vector `m` is the m-th column.
    Columns,
    /// Vector `m` is the complex conjugate of the m-th row.
    ConjugateRows,
}

impl fmt::Display for TableReading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableReading::Columns => write!(f, "columns"),
            TableReading::ConjugateRows => write!(f, "conjugate rows"),
        }
    }
}

/// Candidate basis `id`: 0 is the identity (slit) basis, 1..=9 the tables.
fn candidate_basis(id: usize, reading: TableReading) -> MubBasis {
    if id == 0 {
        let vectors = (0..8)
            .map(|slot| QuditVector::basis_state(8, slot).expect("valid slot"))
            .collect();
        return MubBasis::new(0, vectors).expect("identity basis is well-formed");
    }
    let elems = dim8_unitary(id).expect("id validated by caller");
    let vectors = (0..8)
        .map(|m| {
            let amps = (0..8)
                .map(|i| match reading {
                    TableReading::Columns => elems[i * 8 + m],
                    TableReading::ConjugateRows => elems[m * 8 + i].conj(),
                })
                .collect();
            QuditVector::unit(amps).expect("table vectors are unit norm")
        })
        .collect();
    MubBasis::new(id, vectors).expect("table basis is well-formed")
}

/// Result of checking one nine-candidate subset under one reading.
#[derive(Debug, Clone)]
pub struct SubsetCheck {
    pub reading: TableReading,
    /// Candidate id left out of this subset (0 = identity, 1..=9 = tables).
    pub dropped: usize,
    /// Candidate pair with the worst unbiasedness deviation.
    pub worst_pair: (usize, usize),
    pub worst_deviation: f64,
    pub passed: bool,
}

/// Full data-integrity audit of the embedded tables.
#[derive(Debug, Clone)]
pub struct Dim8Audit {
    pub tol: f64,
    /// `(alpha, max |U^dagger U - I|)` for each table.
    pub unitarity: Vec<(usize, f64)>,
    /// Every nine-candidate subset under both readings.
    pub subsets: Vec<SubsetCheck>,
    /// The certifying combination, if exactly the expected one exists.
    pub selected: Option<(TableReading, Vec<usize>)>,
}

impl Dim8Audit {
    pub fn passed(&self) -> bool {
        self.selected.is_some() && self.unitarity.iter().all(|&(_, dev)| dev < self.tol)
    }
}

impl fmt::Display for Dim8Audit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dimension-8 table audit, tolerance {:.1e}", self.tol)?;
        for &(alpha, dev) in &self.unitarity {
            writeln!(f, "  table {alpha}: unitarity deviation {dev:.3e}")?;
        }
        for s in &self.subsets {
            writeln!(
                f,
                "  {} / drop {}: worst pair ({},{}) deviation {:.3e}  [{}]",
                s.reading,
                s.dropped,
                s.worst_pair.0,
                s.worst_pair.1,
                s.worst_deviation,
                if s.passed { "pass" } else { "fail" }
            )?;
        }
        match &self.selected {
            Some((reading, ids)) => {
                write!(f, "  selected: {reading} reading, candidates {ids:?}")
            }
            None => write!(f, "  selected: none (no subset certified)"),
        }
    }
}

/// Scans every nine-candidate subset of {identity, tables 1..=9} under both
/// readings and reports which combinations are mutually unbiased at `tol`.
pub fn dim8_audit(tol: f64) -> Dim8Audit {
    let unitarity = (1..=9)
        .map(|alpha| {
            let basis = candidate_basis(alpha, TableReading::Columns);
            (alpha, super::orthonormality_deviation(&basis))
        })
        .collect();

    let mut subsets = Vec::new();
    let mut certified: Vec<(TableReading, Vec<usize>)> = Vec::new();
    for reading in [TableReading::Columns, TableReading::ConjugateRows] {
        let candidates: Vec<MubBasis> =
            (0..=9).map(|id| candidate_basis(id, reading)).collect();
        for dropped in 0..=9 {
            let ids: Vec<usize> = (0..=9).filter(|&id| id != dropped).collect();
            let mut worst_pair = (ids[0], ids[1]);
            let mut worst_deviation = 0.0_f64;
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    let dev =
                        super::unbiasedness_deviation(&candidates[a], &candidates[b]);
                    if dev > worst_deviation {
                        worst_deviation = dev;
                        worst_pair = (a, b);
                    }
                }
            }
            let passed = worst_deviation < tol;
            if passed {
                certified.push((reading, ids.clone()));
            }
            subsets.push(SubsetCheck {
                reading,
                dropped,
                worst_pair,
                worst_deviation,
                passed,
            });
        }
    }
    // Adopt the certifying combination only if it is unique.
    let selected = if certified.len() == 1 {
        certified.pop()
    } else {
        None
    };
    Dim8Audit {
        tol,
        unitarity,
        subsets,
        selected,
    }
}

/// The certified nine-basis dimension-8 family.
///
/// Panics if the embedded tables fail their own audit; that would mean the
/// compiled-in data is corrupt, not that a runtime input was bad.
pub fn dim8_family() -> MubFamily {
    let audit = dim8_audit(1e-12);
    let (reading, ids) = match (&audit.selected, audit.passed()) {
        (Some(sel), true) => sel.clone(),
        _ => {
            let offender = audit
                .subsets
                .iter()
                .min_by(|a, b| a.worst_deviation.total_cmp(&b.worst_deviation))
                .expect("audit always checks subsets");
            panic!(
                "embedded dimension-8 tables failed their audit; best subset \
                 ({} / drop {}) still fails at pair ({},{}) with deviation {:.3e}",
                offender.reading,
                offender.dropped,
                offender.worst_pair.0,
                offender.worst_pair.1,
                offender.worst_deviation
            );
        }
    };
    let bases = ids
        .iter()
        .map(|&id| candidate_basis(id, reading))
        .collect();
    MubFamily::from_bases(bases, Provenance::TabulatedUnitaries)
        .expect("nine bases of dimension 8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mub::verify_family;
    use approx::assert_abs_diff_eq;

    #[test]
    fn first_table_corner_entry() {
        let u1 = dim8_unitary(1).unwrap();
        assert_abs_diff_eq!(u1[0].re, 1.0 / 8.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(u1[0].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn third_table_amplitude_classes() {
        // Table 3 entries are only 0 or modulus 1/sqrt(2).
        let u3 = dim8_unitary(3).unwrap();
        for c in u3 {
            let n = c.norm();
            assert!(
                n == 0.0 || (n - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15,
                "unexpected modulus {n}"
            );
        }
    }

    #[test]
    fn all_tables_are_unitary() {
        let audit = dim8_audit(1e-12);
        for (alpha, dev) in audit.unitarity {
            assert!(dev < 1e-12, "table {alpha}: deviation {dev:.3e}");
        }
    }

    #[test]
    fn audit_selects_columns_of_all_nine_tables() {
        let audit = dim8_audit(1e-12);
        let (reading, ids) = audit.selected.as_ref().expect("a subset must certify");
        assert_eq!(*reading, TableReading::Columns);
        assert_eq!(*ids, (1..=9).collect::<Vec<_>>());
        // The identity basis cannot join: tables with zero entries have
        // computational overlaps of 0 or 1/2, never 1/8.
        for s in &audit.subsets {
            if s.dropped != 0 || s.reading != TableReading::Columns {
                assert!(!s.passed, "unexpected certification: {s:?}");
            }
        }
    }

    #[test]
    fn family_certifies_at_table_precision() {
        let family = dim8_family();
        assert_eq!(family.bases().len(), 9);
        assert_eq!(family.projector_count(), 72);
        let report = verify_family(&family, 1e-12);
        assert!(report.passed, "{report}");
    }
}
