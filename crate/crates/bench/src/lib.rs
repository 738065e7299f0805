//! Fixed workloads shared by the solver benchmarks.

use hdpl_core::kripke::PointedModel;
use hdpl_core::random::{random_pair, small_signature};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded random pairs with at most `max_states` states per side.
pub fn random_pairs(seed: u64, count: usize, max_states: usize) -> Vec<(PointedModel, PointedModel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = small_signature();
    (0..count).map(|_| random_pair(&mut rng, &sig, max_states)).collect()
}

/// Pointed model at state 0 of a fixture.
pub fn at_root(m: &hdpl_core::kripke::KripkeModel) -> PointedModel {
    PointedModel::new(m.clone(), 0).expect("fixture has a state 0")
}
