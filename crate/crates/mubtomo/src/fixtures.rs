//! Bundled reference states.
//!
//! These amplitude lists are published experimental estimates rounded to
//! three decimals, so their norms miss 1 by about 1e-3. Loading tolerates a
//! norm deviation up to 2e-3 and renormalizes.

use crate::state::QuditVector;

/// Maximum tolerated deviation of a fixture's amplitude-list norm from 1.
pub const NORM_TOLERANCE: f64 = 2e-3;

/// A named reference state with its published real amplitudes.
#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub amplitudes: &'static [f64],
}

/// Seven-slit state prepared through a Gaussian beam profile.
pub const PSI7: Fixture = Fixture {
    name: "psi7",
    amplitudes: &[0.256, 0.362, 0.443, 0.473, 0.439, 0.352, 0.254],
};

/// Eight-slit state with a bell-shaped profile.
pub const PSI8A: Fixture = Fixture {
    name: "psi8a",
    amplitudes: &[0.217, 0.308, 0.399, 0.456, 0.453, 0.393, 0.297, 0.202],
};

/// Eight-slit state close to the uniform superposition.
pub const PSI8B: Fixture = Fixture {
    name: "psi8b",
    amplitudes: &[0.343, 0.350, 0.355, 0.358, 0.359, 0.357, 0.354, 0.348],
};

/// All bundled fixtures.
pub fn all() -> [&'static Fixture; 3] {
    [&PSI7, &PSI8A, &PSI8B]
}

/// Fixture lookup by name.
pub fn by_name(name: &str) -> Option<&'static Fixture> {
    all().into_iter().find(|f| f.name == name)
}

impl Fixture {
    /// Deviation of the published amplitude list's norm from 1.
    pub fn norm_deviation(&self) -> f64 {
        let norm: f64 = self
            .amplitudes
            .iter()
            .map(|a| a * a)
            .sum::<f64>()
            .sqrt();
        (norm - 1.0).abs()
    }

    /// The normalized state. Panics if the compiled-in list is further than
    /// [`NORM_TOLERANCE`] from unit norm, which would mean corrupt data.
    pub fn state(&self) -> QuditVector {
        let dev = self.norm_deviation();
        assert!(
            dev <= NORM_TOLERANCE,
            "fixture {} norm deviates from 1 by {dev:.3e}",
            self.name
        );
        QuditVector::from_real(self.amplitudes).expect("fixture amplitudes are nonzero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fixtures_load_within_tolerance() {
        for f in all() {
            let dev = f.norm_deviation();
            assert!(dev <= NORM_TOLERANCE, "{}: {dev:.3e}", f.name);
            assert_abs_diff_eq!(f.state().norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(by_name("psi8a").unwrap().amplitudes.len(), 8);
        assert!(by_name("psi9").is_none());
    }

    #[test]
    fn cross_state_overlap_is_stable() {
        // The two eight-slit fixtures are distinct but strongly overlapping.
        let ov = PSI8A.state().overlap_sq(&PSI8B.state()).unwrap();
        assert_abs_diff_eq!(ov, 0.9369835091491311, epsilon = 1e-12);
    }
}
