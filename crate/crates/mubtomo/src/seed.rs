//! Deterministic sub-seed derivation.
//!
//! Every random quantity in the crate flows from one master seed. Distinct
//! consumers get independent generators by hashing `(master, stream,
//! counter)` through two SplitMix64 steps: `stream` separates purposes
//! (count acquisition, bootstrap trials, ...), `counter` enumerates draws
//! within a purpose. The derivation is pure, so any sub-seed can be
//! recomputed from the master seed alone.

/// Stream tag for count-acquisition generators.
pub const COUNT_STREAM: u64 = 1;

/// Stream tag for bootstrap-trial generators.
pub const BOOTSTRAP_STREAM: u64 = 2;

/// One SplitMix64 output step.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Sub-seed for (`stream`, `counter`) under `master`.
pub fn subseed(master: u64, stream: u64, counter: u64) -> u64 {
    splitmix64(splitmix64(master ^ stream.wrapping_mul(0xa076_1d64_78bd_642f)) ^ counter)
}
