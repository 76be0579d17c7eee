//! Seeded random generators for measures, channels, joints, and cost tensors.
//!
//! These back the sampled-supremum operations and the randomized acceptance
//! checks. All randomness in the crate flows through explicit `ChaCha8Rng`
//! seeds so every run is reproducible bit for bit.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::joint::JointMeasure;
use crate::measure::{Channel, Measure};
use crate::space::Space;

/// A uniformly distributed point of the probability simplex (Dirichlet(1)
/// via normalized exponentials).
pub fn simplex_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| -f64::ln(rng.gen_range(1e-12..1.0))).collect();
    let total: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= total;
    }
    w
}

pub fn random_measure(rng: &mut ChaCha8Rng, space: &Arc<Space>) -> Measure {
    Measure::new(space.clone(), simplex_weights(rng, space.len()))
        .expect("simplex weights are valid")
}

pub fn random_channel(rng: &mut ChaCha8Rng, from: &Arc<Space>, to: &Arc<Space>) -> Channel {
    let rows = (0..from.len()).map(|_| simplex_weights(rng, to.len())).collect();
    Channel::new(from.clone(), to.clone(), rows).expect("simplex rows are valid")
}

pub fn random_joint(rng: &mut ChaCha8Rng, factors: &[Arc<Space>]) -> JointMeasure {
    let total: usize = factors.iter().map(|s| s.len()).product();
    JointMeasure::new(factors.to_vec(), simplex_weights(rng, total))
        .expect("simplex mass is valid")
}

/// A joint with the given state marginal: prior times independent random
/// channels, so pairs drawn with the same prior share their state marginal.
pub fn random_joint_with_prior(
    rng: &mut ChaCha8Rng,
    prior: &Measure,
    measurement_spaces: &[Arc<Space>],
) -> JointMeasure {
    let channels: Vec<Channel> = measurement_spaces
        .iter()
        .map(|sp| random_channel(rng, prior.space(), sp))
        .collect();
    let refs: Vec<&Channel> = channels.iter().collect();
    crate::joint::join(prior, &refs).expect("joined random channels are valid")
}

/// Uniform cost entries in `[-bound, bound]`.
pub fn random_cost(rng: &mut ChaCha8Rng, len: usize, bound: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-bound..=bound)).collect()
}

/// A fresh 1-D space of size `n` with integer coordinates.
pub fn indexed_space(prefix: &str, n: usize) -> Arc<Space> {
    let pts: Vec<f64> = (0..n).map(|i| i as f64).collect();
    Space::line(prefix, &pts).expect("indexed space is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn simplex_weights_normalize() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=9 {
            let w = simplex_weights(&mut rng, n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(w.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let s = indexed_space("a", 4);
        let a = random_measure(&mut ChaCha8Rng::seed_from_u64(9), &s);
        let b = random_measure(&mut ChaCha8Rng::seed_from_u64(9), &s);
        assert_eq!(a.mass(), b.mass());
    }
}
