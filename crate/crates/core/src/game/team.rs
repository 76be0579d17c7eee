//! Team optima: exhaustive search over deterministic profiles and
//! person-by-person coordinate descent.

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::{
    best_response, decode_policy, expected_cost_deterministic, Certificate, Game, GameKind,
    JointMeasure, Policy, ValueReport,
};

const BRUTE_FORCE_CAP: f64 = 1e7;

fn profile_counts(game: &Game, joint: &JointMeasure) -> Vec<usize> {
    (0..game.players())
        .map(|p| {
            let ny = joint.factor(p + 1).len();
            let nu = game.action_space(p).len();
            nu.pow(ny as u32)
        })
        .collect()
}

/// Global team optimum by enumerating every deterministic policy profile.
///
/// Deterministic profiles attain the optimum because the expected cost is
/// multilinear in behavioral weights. Capped at 10^7 profiles; larger
/// instances should use `team_pbp_descent`.
pub fn team_value_bruteforce(game: &Game, joint: &JointMeasure) -> Result<ValueReport> {
    if game.kind() != GameKind::Team {
        return Err(Error::InvalidInput("team_value_bruteforce requires a team game".into()));
    }
    game.check_joint(joint)?;
    let n = game.players();
    let total: f64 = (0..n)
        .map(|p| {
            let ny = joint.factor(p + 1).len() as f64;
            (game.action_space(p).len() as f64).powf(ny)
        })
        .product();
    if total > BRUTE_FORCE_CAP {
        return Err(Error::Capacity(format!(
            "{total:.3e} deterministic profiles (cap {BRUTE_FORCE_CAP:.0e}); use team_pbp_descent"
        )));
    }
    let counts = profile_counts(game, joint);
    let ny: Vec<usize> = (0..n).map(|p| joint.factor(p + 1).len()).collect();
    let nu: Vec<usize> = (0..n).map(|p| game.action_space(p).len()).collect();

    let mut best_value = f64::INFINITY;
    let mut best_profile: Vec<Vec<usize>> = Vec::new();
    let total_profiles: usize = counts.iter().product();
    // Lexicographic enumeration (player 0 most significant); strict
    // improvement keeps the lowest profile among ties.
    for flat in 0..total_profiles {
        let mut rem = flat;
        let mut profile: Vec<Vec<usize>> = vec![Vec::new(); n];
        for p in (0..n).rev() {
            profile[p] = decode_policy(rem % counts[p], ny[p], nu[p]);
            rem /= counts[p];
        }
        let refs: Vec<&[usize]> = profile.iter().map(|v| v.as_slice()).collect();
        let value = expected_cost_deterministic(game, joint, &refs, 0);
        if value < best_value {
            best_value = value;
            best_profile = profile;
        }
    }

    let policies = best_profile
        .into_iter()
        .enumerate()
        .map(|(p, actions)| Policy::deterministic(p, actions))
        .collect();
    Ok(ValueReport {
        value: best_value,
        policies,
        certificate: Certificate::TeamSearch { exhaustive: true, restarts: 0 },
    })
}

fn descend_from(
    game: &Game,
    joint: &JointMeasure,
    mut profile: Vec<Policy>,
    max_rounds: usize,
) -> Result<(f64, Vec<Policy>)> {
    let n = game.players();
    for _ in 0..max_rounds {
        let mut changed = false;
        for p in 0..n {
            let others: Vec<Policy> = profile
                .iter()
                .filter(|pol| pol.player() != p)
                .cloned()
                .collect();
            let br = best_response(game, joint, p, &others)?;
            if br != profile[p] {
                profile[p] = br;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let refs: Vec<&[usize]> = profile
        .iter()
        .map(|p| match p {
            Policy::Deterministic { actions, .. } => actions.as_slice(),
            _ => unreachable!("descent profiles are deterministic"),
        })
        .collect();
    Ok((expected_cost_deterministic(game, joint, &refs, 0), profile))
}

fn profile_key(policies: &[Policy]) -> Vec<usize> {
    policies
        .iter()
        .flat_map(|p| match p {
            Policy::Deterministic { actions, .. } => actions.clone(),
            _ => unreachable!(),
        })
        .collect()
}

/// Person-by-person descent: from `restarts` random deterministic profiles,
/// iterate single-player best responses to a fixed point and keep the best.
///
/// The result is person-by-person optimal, hence an upper bound on the team
/// optimum: `value >= team_value_bruteforce(..).value`. Restarts run in
/// parallel; the reduction (min by value, then lexicographic profile) is
/// deterministic for a fixed seed regardless of thread schedule.
pub fn team_pbp_descent(
    game: &Game,
    joint: &JointMeasure,
    restarts: usize,
    seed: u64,
) -> Result<ValueReport> {
    if game.kind() != GameKind::Team {
        return Err(Error::InvalidInput("team_pbp_descent requires a team game".into()));
    }
    game.check_joint(joint)?;
    if restarts == 0 {
        return Err(Error::InvalidInput("team_pbp_descent needs at least one restart".into()));
    }
    let n = game.players();
    let ny: Vec<usize> = (0..n).map(|p| joint.factor(p + 1).len()).collect();
    let nu: Vec<usize> = (0..n).map(|p| game.action_space(p).len()).collect();

    let runs: Vec<(f64, Vec<Policy>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                seed.wrapping_add((r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            let start: Vec<Policy> = (0..n)
                .map(|p| {
                    let actions = (0..ny[p]).map(|_| rng.gen_range(0..nu[p])).collect();
                    Policy::deterministic(p, actions)
                })
                .collect();
            descend_from(game, joint, start, 200)
        })
        .collect::<Result<_>>()?;

    let (value, policies) = runs
        .into_iter()
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| profile_key(&a.1).cmp(&profile_key(&b.1)))
        })
        .expect("at least one restart");

    Ok(ValueReport {
        value,
        policies,
        certificate: Certificate::TeamSearch { exhaustive: false, restarts },
    })
}
