//! Deterministic workloads shared by the benchmarks.

use ltbe_core::random::{random_spec, random_system, random_system_named, StackShape};
use ltbe_core::{SemiringKind, SpecSystem, System};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A system with `n` states and a specification with `m` states.
pub fn behaviour_workload(kind: SemiringKind, shape: StackShape, n: usize, m: usize, seed: u64) -> (System, SpecSystem) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sys = random_system(&mut rng, kind, shape, n);
    let spec = random_spec(&mut rng, shape, m);
    (sys, spec)
}

/// Two independent systems of the same shape with `n` states each.
pub fn pair_workload(kind: SemiringKind, shape: StackShape, n: usize, seed: u64) -> (System, System) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_system(&mut rng, kind, shape, n);
    let b = random_system_named(&mut rng, kind, shape, "d", n);
    (a, b)
}
