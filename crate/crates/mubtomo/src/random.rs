//! Random states for round-trip and ensemble tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::operator::DensityOperator;
use crate::state::QuditVector;
use crate::C64;

fn standard_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-like random pure state: complex standard-normal amplitudes,
/// normalized.
pub fn random_pure<R: Rng>(dim: usize, rng: &mut R) -> QuditVector {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| standard_complex(rng)).collect();
        // A zero draw has probability zero; loop anyway for correctness.
        if let Ok(v) = QuditVector::normalized(amps) {
            return v;
        }
    }
}

/// Random full-rank mixed state: `A A^dagger / Tr(A A^dagger)` with
/// standard-normal complex `A`.
pub fn random_density<R: Rng>(dim: usize, rng: &mut R) -> DensityOperator {
    let a: Vec<C64> = (0..dim * dim).map(|_| standard_complex(rng)).collect();
    let mut elems = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut s = C64::new(0.0, 0.0);
            for k in 0..dim {
                s += a[i * dim + k] * a[j * dim + k].conj();
            }
            elems[i * dim + j] = s;
        }
    }
    let trace: f64 = (0..dim).map(|i| elems[i * dim + i].re).sum();
    for e in &mut elems {
        *e /= trace;
    }
    DensityOperator::physical(dim, elems).expect("Gram matrices are Hermitian with unit trace")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn pure_states_are_unit_norm_and_seeded() {
        let mut a = ChaCha12Rng::seed_from_u64(5);
        let mut b = ChaCha12Rng::seed_from_u64(5);
        let va = random_pure(7, &mut a);
        let vb = random_pure(7, &mut b);
        assert_eq!(va, vb);
        assert_abs_diff_eq!(va.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn densities_are_positive_with_unit_trace() {
        let mut rng = ChaCha12Rng::seed_from_u64(6);
        for dim in [2, 3, 8] {
            let rho = random_density(dim, &mut rng);
            assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
            assert!(rho.min_eigenvalue() > -1e-12);
            assert!(rho.purity() < 1.0);
        }
    }
}
