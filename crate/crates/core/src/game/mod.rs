//! Game representation and value computation.
//!
//! Players are indexed from 0; player `i`'s measurement is factor `i + 1` of
//! the information structure (factor 0 is the state). In zero-sum games
//! player 0 is the minimizer and player 1 the maximizer, and only player 0's
//! cost tensor is stored explicitly (player 1's is its negation).
//!
//! Deterministic profiles suffice for team optima: the expected cost is
//! multilinear in the behavioral weights of each player, so its minimum over
//! the product of row-stochastic polytopes is attained at a vertex, which is
//! a deterministic profile. The exhaustive search and the person-by-person
//! descent therefore only ever visit deterministic profiles.

mod team;
mod zerosum;

pub use team::{team_pbp_descent, team_value_bruteforce};
pub use zerosum::{zerosum_value, zerosum_value_oracle};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::joint::{for_each_cell, strides, JointMeasure};
use crate::measure::Channel;
use crate::space::{same_space, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    ZeroSum,
    Team,
    General,
}

/// A single-stage game: state space, per-player action grids, and one bounded
/// cost tensor per player indexed by (state, action_0, ..., action_{n-1}).
#[derive(Debug, Clone)]
pub struct Game {
    state: Arc<Space>,
    actions: Vec<Arc<Space>>,
    costs: Vec<Vec<f64>>,
    kind: GameKind,
}

impl Game {
    pub fn new(
        state: Arc<Space>,
        actions: Vec<Arc<Space>>,
        costs: Vec<Vec<f64>>,
        kind: GameKind,
    ) -> Result<Game> {
        if actions.is_empty() {
            return Err(Error::InvalidInput("game needs at least one player".into()));
        }
        if costs.len() != actions.len() {
            return Err(Error::Dimension(format!(
                "{} cost tensors for {} players",
                costs.len(),
                actions.len()
            )));
        }
        let size: usize = state.len() * actions.iter().map(|a| a.len()).product::<usize>();
        for (p, c) in costs.iter().enumerate() {
            if c.len() != size {
                return Err(Error::Dimension(format!(
                    "player {p} cost tensor has {} entries, expected {size}",
                    c.len()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("player {p} cost tensor has a non-finite entry")));
            }
        }
        match kind {
            GameKind::ZeroSum => {
                if actions.len() != 2 {
                    return Err(Error::InvalidInput("zero-sum games have exactly two players".into()));
                }
                for (a, b) in costs[0].iter().zip(&costs[1]) {
                    if (a + b).abs() > 1e-12 {
                        return Err(Error::InvalidInput(
                            "zero-sum game costs do not sum to zero entrywise".into(),
                        ));
                    }
                }
            }
            GameKind::Team => {
                for (p, c) in costs.iter().enumerate().skip(1) {
                    for (a, b) in costs[0].iter().zip(c) {
                        if (a - b).abs() > 1e-12 {
                            return Err(Error::InvalidInput(format!(
                                "team game: player {p} cost differs from player 0"
                            )));
                        }
                    }
                }
            }
            GameKind::General => {}
        }
        Ok(Game { state, actions, costs, kind })
    }

    /// Build a zero-sum game from the minimizer's cost; the maximizer's
    /// tensor is the exact negation.
    pub fn zero_sum(
        state: Arc<Space>,
        minimizer_actions: Arc<Space>,
        maximizer_actions: Arc<Space>,
        cost: Vec<f64>,
    ) -> Result<Game> {
        let neg: Vec<f64> = cost.iter().map(|v| -v).collect();
        Game::new(
            state,
            vec![minimizer_actions, maximizer_actions],
            vec![cost, neg],
            GameKind::ZeroSum,
        )
    }

    /// Build a team game from the shared cost tensor.
    pub fn team(state: Arc<Space>, actions: Vec<Arc<Space>>, cost: Vec<f64>) -> Result<Game> {
        let n = actions.len();
        Game::new(state, actions, vec![cost; n], GameKind::Team)
    }

    /// Evaluate a cost formula over the coordinate grids. The closure gets the
    /// state's first coordinate and each player's first action coordinate.
    pub fn cost_from_fn(
        state: &Arc<Space>,
        actions: &[Arc<Space>],
        f: impl Fn(f64, &[f64]) -> f64,
    ) -> Vec<f64> {
        let shape: Vec<usize> =
            std::iter::once(state.len()).chain(actions.iter().map(|a| a.len())).collect();
        let mut out = Vec::with_capacity(shape.iter().product());
        for_each_cell(&shape, |_, idx| {
            let x = state.scalar(idx[0]);
            let us: Vec<f64> = idx[1..]
                .iter()
                .enumerate()
                .map(|(p, &u)| actions[p].scalar(u))
                .collect();
            out.push(f(x, &us));
        });
        out
    }

    pub fn players(&self) -> usize {
        self.actions.len()
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn state_space(&self) -> &Arc<Space> {
        &self.state
    }

    pub fn action_space(&self, player: usize) -> &Arc<Space> {
        &self.actions[player]
    }

    pub fn action_spaces(&self) -> &[Arc<Space>] {
        &self.actions
    }

    pub fn cost_tensor(&self, player: usize) -> &[f64] {
        &self.costs[player]
    }

    fn cost_shape(&self) -> Vec<usize> {
        std::iter::once(self.state.len())
            .chain(self.actions.iter().map(|a| a.len()))
            .collect()
    }

    /// Cost entry for player `player` at state `x` and action profile `us`.
    pub fn cost(&self, player: usize, x: usize, us: &[usize]) -> f64 {
        let shape = self.cost_shape();
        let st = strides(&shape);
        let mut flat = x * st[0];
        for (p, &u) in us.iter().enumerate() {
            flat += u * st[p + 1];
        }
        self.costs[player][flat]
    }

    /// Sup-norm of player `player`'s cost tensor.
    pub fn cost_bound_for(&self, player: usize) -> f64 {
        self.costs[player].iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest sup-norm across players.
    pub fn cost_bound(&self) -> f64 {
        (0..self.players()).map(|p| self.cost_bound_for(p)).fold(0.0, f64::max)
    }

    /// Check that an information structure matches this game's player count
    /// and state space.
    pub fn check_joint(&self, joint: &JointMeasure) -> Result<()> {
        if joint.rank() != self.players() + 1 {
            return Err(Error::Dimension(format!(
                "information structure has {} factors for a {}-player game",
                joint.rank(),
                self.players()
            )));
        }
        if !same_space(joint.factor(0), &self.state) {
            return Err(Error::SpaceMismatch(
                "information structure state factor does not match the game".into(),
            ));
        }
        Ok(())
    }
}

/// A policy for one player: either a deterministic action per measurement
/// point or a behavioral (row-stochastic) kernel from measurements to actions.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    Deterministic { player: usize, actions: Vec<usize> },
    Behavioral { player: usize, channel: Channel },
}

impl Policy {
    pub fn deterministic(player: usize, actions: Vec<usize>) -> Policy {
        Policy::Deterministic { player, actions }
    }

    pub fn behavioral(player: usize, channel: Channel) -> Policy {
        Policy::Behavioral { player, channel }
    }

    pub fn player(&self) -> usize {
        match self {
            Policy::Deterministic { player, .. } => *player,
            Policy::Behavioral { player, .. } => *player,
        }
    }

    /// Probability of playing action `u` at measurement point `y`.
    pub fn prob(&self, y: usize, u: usize) -> f64 {
        match self {
            Policy::Deterministic { actions, .. } => {
                if actions[y] == u {
                    1.0
                } else {
                    0.0
                }
            }
            Policy::Behavioral { channel, .. } => channel.prob(y, u),
        }
    }

    /// The deterministic action at `y`, when this policy is deterministic.
    pub fn action(&self, y: usize) -> Option<usize> {
        match self {
            Policy::Deterministic { actions, .. } => Some(actions[y]),
            Policy::Behavioral { .. } => None,
        }
    }

    fn check(&self, game: &Game, joint: &JointMeasure) -> Result<()> {
        let p = self.player();
        if p >= game.players() {
            return Err(Error::Dimension(format!("policy for player {p} of a {}-player game", game.players())));
        }
        let ny = joint.factor(p + 1).len();
        let nu = game.action_space(p).len();
        match self {
            Policy::Deterministic { actions, .. } => {
                if actions.len() != ny {
                    return Err(Error::Dimension(format!(
                        "player {p} policy covers {} measurement points, expected {ny}",
                        actions.len()
                    )));
                }
                if actions.iter().any(|&a| a >= nu) {
                    return Err(Error::Dimension(format!("player {p} policy uses an out-of-range action")));
                }
            }
            Policy::Behavioral { channel, .. } => {
                if !same_space(channel.from_space(), joint.factor(p + 1))
                    || !same_space(channel.to_space(), game.action_space(p))
                {
                    return Err(Error::SpaceMismatch(format!(
                        "player {p} behavioral policy spaces do not match the game"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of a zero-sum or team value computation.
#[derive(Debug, Clone)]
pub struct ValueReport {
    pub value: f64,
    pub policies: Vec<Policy>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone)]
pub enum Certificate {
    /// The minimizer LP and the mirrored maximizer LP agreed.
    ZeroSumDuality { minimax: f64, maximin: f64 },
    /// How a team optimum was produced.
    TeamSearch { exhaustive: bool, restarts: usize },
}

impl Certificate {
    pub fn duality_gap(&self) -> Option<f64> {
        match self {
            Certificate::ZeroSumDuality { minimax, maximin } => Some((minimax - maximin).abs()),
            _ => None,
        }
    }
}

fn check_profile(game: &Game, joint: &JointMeasure, policies: &[Policy]) -> Result<()> {
    game.check_joint(joint)?;
    if policies.len() != game.players() {
        return Err(Error::Dimension(format!(
            "{} policies for {} players",
            policies.len(),
            game.players()
        )));
    }
    for (p, pol) in policies.iter().enumerate() {
        if pol.player() != p {
            return Err(Error::InvalidInput(format!(
                "policy at position {p} is for player {}",
                pol.player()
            )));
        }
        pol.check(game, joint)?;
    }
    Ok(())
}

/// Expected cost of player `player` under an information structure and a
/// full policy profile.
pub fn expected_cost(
    game: &Game,
    joint: &JointMeasure,
    policies: &[Policy],
    player: usize,
) -> Result<f64> {
    check_profile(game, joint, policies)?;
    if player >= game.players() {
        return Err(Error::Dimension(format!("player {player} out of range")));
    }
    let action_shape: Vec<usize> = game.action_spaces().iter().map(|a| a.len()).collect();
    let all_deterministic = policies.iter().all(|p| matches!(p, Policy::Deterministic { .. }));
    let total = if all_deterministic {
        let acts: Vec<&[usize]> = policies
            .iter()
            .map(|p| match p {
                Policy::Deterministic { actions, .. } => actions.as_slice(),
                _ => unreachable!(),
            })
            .collect();
        expected_cost_deterministic(game, joint, &acts, player)
    } else {
        let mut us = vec![0usize; game.players()];
        joint.expect(|cell| {
            let x = cell[0];
            let mut acc = 0.0;
            for_each_cell(&action_shape, |_, action_idx| {
                let mut w = 1.0;
                for (p, pol) in policies.iter().enumerate() {
                    w *= pol.prob(cell[p + 1], action_idx[p]);
                    if w == 0.0 {
                        return;
                    }
                }
                us.copy_from_slice(action_idx);
                acc += w * game.cost(player, x, &us);
            });
            acc
        })
    };
    Ok(total)
}

/// Fast path for deterministic profiles; used by the exhaustive team search.
pub(crate) fn expected_cost_deterministic(
    game: &Game,
    joint: &JointMeasure,
    actions: &[&[usize]],
    player: usize,
) -> f64 {
    let shape = game.cost_shape();
    let st = strides(&shape);
    let cost = &game.costs[player];
    let mut us = vec![0usize; actions.len()];
    joint.expect(|cell| {
        let mut flat = cell[0] * st[0];
        for (p, a) in actions.iter().enumerate() {
            us[p] = a[cell[p + 1]];
            flat += us[p] * st[p + 1];
        }
        cost[flat]
    })
}

/// Deterministic best response of `player` against the other players' fixed
/// policies: at every measurement point with positive marginal mass, the
/// action minimizing the conditional expected cost, ties broken by the lowest
/// action index. Zero-mass measurement points get action 0.
pub fn best_response(
    game: &Game,
    joint: &JointMeasure,
    player: usize,
    others: &[Policy],
) -> Result<Policy> {
    game.check_joint(joint)?;
    if player >= game.players() {
        return Err(Error::Dimension(format!("player {player} out of range")));
    }
    if others.len() != game.players() - 1 {
        return Err(Error::Dimension(format!(
            "{} other policies for a {}-player game",
            others.len(),
            game.players()
        )));
    }
    let mut by_player: Vec<Option<&Policy>> = vec![None; game.players()];
    for pol in others {
        let p = pol.player();
        if p == player || p >= game.players() {
            return Err(Error::InvalidInput(format!("unexpected policy for player {p}")));
        }
        pol.check(game, joint)?;
        if by_player[p].replace(pol).is_some() {
            return Err(Error::InvalidInput(format!("duplicate policy for player {p}")));
        }
    }

    let ny = joint.factor(player + 1).len();
    let nu = game.action_space(player).len();
    // score[y][u] = sum over cells with y_player = y of mass * prod others * cost
    let mut score = vec![vec![0.0_f64; nu]; ny];
    let mut mass_at = vec![0.0_f64; ny];

    let other_action_shape: Vec<usize> = (0..game.players())
        .filter(|&p| p != player)
        .map(|p| game.action_space(p).len())
        .collect();
    let other_players: Vec<usize> = (0..game.players()).filter(|&p| p != player).collect();

    let shape = game.cost_shape();
    let st = strides(&shape);
    let cost = &game.costs[player];

    crate::joint::for_each_cell(&joint.shape(), |flat, cell| {
        let m = joint.mass()[flat];
        if m == 0.0 {
            return;
        }
        let y = cell[player + 1];
        mass_at[y] += m;
        for_each_cell(&other_action_shape, |_, oa| {
            let mut w = m;
            for (k, &p) in other_players.iter().enumerate() {
                let pol = by_player[p].expect("validated above");
                w *= pol.prob(cell[p + 1], oa[k]);
                if w == 0.0 {
                    return;
                }
            }
            let mut base = cell[0] * st[0];
            for (k, &p) in other_players.iter().enumerate() {
                base += oa[k] * st[p + 1];
            }
            for (u, s) in score[y].iter_mut().enumerate() {
                *s += w * cost[base + u * st[player + 1]];
            }
        });
    });

    let actions: Vec<usize> = (0..ny)
        .map(|y| {
            if mass_at[y] <= 0.0 {
                return 0;
            }
            let mut best = 0usize;
            for u in 1..nu {
                if score[y][u] < score[y][best] {
                    best = u;
                }
            }
            best
        })
        .collect();
    Ok(Policy::deterministic(player, actions))
}

/// Result of round-robin best-response iteration.
#[derive(Debug, Clone)]
pub struct BrOutcome {
    pub policies: Vec<Policy>,
    pub converged: bool,
    /// Expected cost of each player at the final profile.
    pub values: Vec<f64>,
    pub rounds: usize,
}

/// Iterate round-robin best responses from an initial profile until it is a
/// fixed point or `max_rounds` is hit. A converged profile is a pure Nash
/// equilibrium: convergence is declared only after a full pass in which no
/// player changed their policy.
pub fn br_iteration(
    game: &Game,
    joint: &JointMeasure,
    initial: &[Policy],
    max_rounds: usize,
) -> Result<BrOutcome> {
    check_profile(game, joint, initial)?;
    let n = game.players();
    let mut profile: Vec<Policy> = initial.to_vec();
    let mut converged = false;
    let mut rounds = 0;
    while rounds < max_rounds {
        rounds += 1;
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
            converged = true;
            break;
        }
    }
    let values: Vec<f64> = (0..n)
        .map(|p| expected_cost(game, joint, &profile, p))
        .collect::<Result<_>>()?;
    Ok(BrOutcome { policies: profile, converged, values, rounds })
}

/// Enumerate every deterministic policy vector for a player with `ny`
/// measurement points and `nu` actions; `index` selects one in base-`nu`
/// lexicographic order (point 0 is the most significant digit).
pub(crate) fn decode_policy(index: usize, ny: usize, nu: usize) -> Vec<usize> {
    let mut rem = index;
    let mut out = vec![0usize; ny];
    for slot in (0..ny).rev() {
        out[slot] = rem % nu;
        rem /= nu;
    }
    out
}

/// Optimal cost of a single decision maker observing `channel`, choosing from
/// `cost[x][u]`: per measurement point, the action minimizing the posterior
/// expected cost.
pub fn single_player_value(
    prior: &crate::measure::Measure,
    channel: &Channel,
    cost: &[Vec<f64>],
) -> Result<f64> {
    if !same_space(prior.space(), channel.from_space()) {
        return Err(Error::SpaceMismatch("single_player_value: prior vs channel source".into()));
    }
    let nx = prior.len();
    if cost.len() != nx {
        return Err(Error::Dimension(format!("cost has {} state rows, expected {nx}", cost.len())));
    }
    let nu = cost[0].len();
    if cost.iter().any(|r| r.len() != nu) {
        return Err(Error::Dimension("ragged single-player cost table".into()));
    }
    let ny = channel.to_space().len();
    let mut total = 0.0;
    for y in 0..ny {
        // Unnormalized posterior weights at y; the normalizer cancels.
        let mut best = f64::INFINITY;
        for u in 0..nu {
            let mut c = 0.0;
            for x in 0..nx {
                c += prior.at(x) * channel.prob(x, y) * cost[x][u];
            }
            if c < best {
                best = c;
            }
        }
        if best.is_finite() {
            total += best;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::join;
    use crate::measure::Measure;
    use crate::sample::indexed_space;

    fn binary(prefix: &str) -> Arc<Space> {
        Space::line(prefix, &[0.0, 1.0]).unwrap()
    }

    /// Uniform binary state, both players observe it through the given
    /// channels.
    fn two_player_joint(q1: &Channel, q2: &Channel) -> JointMeasure {
        let prior = Measure::uniform(q1.from_space().clone());
        join(&prior, &[q1, q2]).unwrap()
    }

    fn mismatch_game() -> Game {
        // c = 1{u1 != x}, player 2 is a dummy with one action
        let x = binary("x");
        let u1 = binary("u1");
        let u2 = Space::singleton("u2", 0.0);
        let cost = Game::cost_from_fn(&x, &[u1.clone(), u2.clone()], |xv, us| {
            if (us[0] - xv).abs() > 1e-9 {
                1.0
            } else {
                0.0
            }
        });
        Game::new(x, vec![u1, u2], vec![cost.clone(), cost], GameKind::General).unwrap()
    }

    #[test]
    fn expected_cost_constant_tensor() {
        let x = binary("x");
        let y1 = binary("y1");
        let y2 = binary("y2");
        let q1 = Channel::uninformative(x.clone(), y1);
        let q2 = Channel::uninformative(x.clone(), y2);
        let joint = two_player_joint(&q1, &q2);
        let u = binary("u");
        let k = 2.5;
        let size = 2 * 2 * 2;
        let game = Game::new(
            x,
            vec![u.clone(), u],
            vec![vec![k; size], vec![k; size]],
            GameKind::General,
        )
        .unwrap();
        let pols = vec![Policy::deterministic(0, vec![0, 1]), Policy::deterministic(1, vec![1, 0])];
        let v = expected_cost(&game, &joint, &pols, 0).unwrap();
        assert!((v - k).abs() < 1e-12);
    }

    #[test]
    fn expected_cost_perfect_and_blind() {
        let game = mismatch_game();
        let x = game.state_space().clone();
        // perfectly informative joint, policy u1 = y1
        let q1 = Channel::identity(x.clone());
        let q2 = Channel::uninformative(x.clone(), Space::singleton("y2", 0.0));
        let joint = two_player_joint(&q1, &q2);
        let pols = vec![Policy::deterministic(0, vec![0, 1]), Policy::deterministic(1, vec![0])];
        let v = expected_cost(&game, &joint, &pols, 0).unwrap();
        assert!(v.abs() < 1e-12);

        // uninformative joint: any deterministic policy pays 0.5
        let q1 = Channel::uninformative(x.clone(), binary("y1"));
        let joint = two_player_joint(&q1, &q2);
        let pols = vec![Policy::deterministic(0, vec![1, 1]), Policy::deterministic(1, vec![0])];
        let v = expected_cost(&game, &joint, &pols, 0).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn behavioral_matches_onehot_deterministic() {
        let game = mismatch_game();
        let x = game.state_space().clone();
        let q1 = Channel::new(
            x.clone(),
            binary("y1"),
            vec![vec![0.8, 0.2], vec![0.25, 0.75]],
        )
        .unwrap();
        let q2 = Channel::uninformative(x, Space::singleton("y2", 0.0));
        let joint = two_player_joint(&q1, &q2);
        let det = vec![Policy::deterministic(0, vec![0, 1]), Policy::deterministic(1, vec![0])];
        let ch = Channel::new(
            joint.factor(1).clone(),
            game.action_space(0).clone(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let beh = vec![Policy::behavioral(0, ch), Policy::deterministic(1, vec![0])];
        let a = expected_cost(&game, &joint, &det, 0).unwrap();
        let b = expected_cost(&game, &joint, &beh, 0).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn best_response_quadratic_picks_conditional_mean() {
        // state uniform on {-1, 0, 1}, fully observed; action grid contains
        // each state point, quadratic tracking cost
        let x = Space::line("x", &[-1.0, 0.0, 1.0]).unwrap();
        let u1 = Space::line("u1", &[-1.0, 0.0, 1.0]).unwrap();
        let u2 = Space::singleton("u2", 0.0);
        let cost = Game::cost_from_fn(&x, &[u1.clone(), u2.clone()], |xv, us| {
            (xv - us[0]) * (xv - us[0])
        });
        let game = Game::new(x.clone(), vec![u1, u2], vec![cost.clone(), cost], GameKind::General).unwrap();
        let q1 = Channel::identity(x.clone());
        let q2 = Channel::uninformative(x.clone(), Space::singleton("y2", 0.0));
        let prior = Measure::uniform(x);
        let joint = join(&prior, &[&q1, &q2]).unwrap();
        let br = best_response(&game, &joint, 0, &[Policy::deterministic(1, vec![0])]).unwrap();
        assert_eq!(br, Policy::deterministic(0, vec![0, 1, 2]));
    }

    #[test]
    fn best_response_indicator_cost_examples() {
        // Player 1 plays u1 = x through an identity channel; player 2 is
        // blind and pays u2^2 when u1 = 0, (u2-1)^2 otherwise.
        let x = binary("x");
        let u1 = binary("u1");
        let u2 = Space::line("u2", &[0.0, 0.5, 1.0]).unwrap();
        let cost2 = Game::cost_from_fn(&x, &[u1.clone(), u2.clone()], |_x, us| {
            if us[0] == 0.0 {
                us[1] * us[1]
            } else {
                (us[1] - 1.0) * (us[1] - 1.0)
            }
        });
        let zero = vec![0.0; cost2.len()];
        let game = Game::new(
            x.clone(),
            vec![u1, u2.clone()],
            vec![zero, cost2],
            GameKind::General,
        )
        .unwrap();
        let q1 = Channel::identity(x.clone());
        let q2 = Channel::uninformative(x.clone(), Space::singleton("y2", 0.0));

        // P(u1 = 0) = 1/2: best reply is u2 = 1/2 at conditional cost 1/4.
        let prior = Measure::uniform(x.clone());
        let joint = join(&prior, &[&q1, &q2]).unwrap();
        let p1 = Policy::deterministic(0, vec![0, 1]);
        let br = best_response(&game, &joint, 1, &[p1.clone()]).unwrap();
        assert_eq!(br.action(0), Some(1)); // grid point 0.5
        let cost = expected_cost(&game, &joint, &[p1, br], 1).unwrap();
        assert!((cost - 0.25).abs() < 1e-12);

        // P(u1 = 0) = 0: best reply is u2 = 1 at cost 0.
        let prior = Measure::point_mass(game.state_space().clone(), 1).unwrap();
        let joint = join(&prior, &[&q1, &q2]).unwrap();
        let p1 = Policy::deterministic(0, vec![0, 1]);
        let br = best_response(&game, &joint, 1, &[p1.clone()]).unwrap();
        assert_eq!(br.action(0), Some(2)); // grid point 1.0
        let cost = expected_cost(&game, &joint, &[p1, br], 1).unwrap();
        assert!(cost.abs() < 1e-12);
    }

    #[test]
    fn br_iteration_team_converges_and_pennies_cycles() {
        // team-kind game: common matching cost, both fully informed
        let x = binary("x");
        let u = binary("u");
        let cost = Game::cost_from_fn(&x, &[u.clone(), u.clone()], |xv, us| {
            let mut c = 0.0;
            if (us[0] - xv).abs() > 1e-9 {
                c += 1.0;
            }
            if (us[1] - xv).abs() > 1e-9 {
                c += 1.0;
            }
            c
        });
        let game = Game::team(x.clone(), vec![u.clone(), u.clone()], cost).unwrap();
        let q = Channel::identity(x.clone());
        let joint = join(&Measure::uniform(x.clone()), &[&q, &q]).unwrap();
        let init = vec![Policy::deterministic(0, vec![0, 0]), Policy::deterministic(1, vec![1, 1])];
        let out = br_iteration(&game, &joint, &init, 20).unwrap();
        assert!(out.converged);
        assert!(out.values[0].abs() < 1e-12);

        // matching pennies: no pure equilibrium, iteration must not converge
        let s = Space::singleton("x", 0.0);
        let y = Space::singleton("y", 0.0);
        let cost = Game::cost_from_fn(&s, &[u.clone(), u.clone()], |_x, us| {
            if (us[0] - us[1]).abs() < 1e-9 {
                1.0
            } else {
                -1.0
            }
        });
        let game = Game::zero_sum(s.clone(), u.clone(), u, cost).unwrap();
        let q1 = Channel::uninformative(s.clone(), y.clone());
        let q2 = Channel::uninformative(s.clone(), y);
        let joint = join(&Measure::uniform(s), &[&q1, &q2]).unwrap();
        let init = vec![Policy::deterministic(0, vec![0]), Policy::deterministic(1, vec![0])];
        let out = br_iteration(&game, &joint, &init, 25).unwrap();
        assert!(!out.converged);
        assert_eq!(out.rounds, 25);
    }

    #[test]
    fn decode_policy_is_lexicographic() {
        assert_eq!(decode_policy(0, 2, 3), vec![0, 0]);
        assert_eq!(decode_policy(1, 2, 3), vec![0, 1]);
        assert_eq!(decode_policy(3, 2, 3), vec![1, 0]);
        assert_eq!(decode_policy(8, 2, 3), vec![2, 2]);
    }

    #[test]
    fn single_player_value_hand_case() {
        // uniform binary prior, cost 2*1{u != x} - 1
        let x = binary("x");
        let prior = Measure::uniform(x.clone());
        let cost = vec![vec![-1.0, 1.0], vec![1.0, -1.0]];
        let id = Channel::identity(x.clone());
        let blind = Channel::uninformative(x.clone(), Space::singleton("y", 0.0));
        assert!((single_player_value(&prior, &id, &cost).unwrap() + 1.0).abs() < 1e-12);
        assert!(single_player_value(&prior, &blind, &cost).unwrap().abs() < 1e-12);
    }

    #[test]
    fn game_kind_validation() {
        let x = indexed_space("x", 2);
        let u = indexed_space("u", 2);
        let c1 = vec![1.0; 8];
        let c2 = vec![-1.0; 8];
        assert!(Game::new(x.clone(), vec![u.clone(), u.clone()], vec![c1.clone(), c1.clone()], GameKind::ZeroSum).is_err());
        assert!(Game::new(x.clone(), vec![u.clone(), u.clone()], vec![c1.clone(), c2.clone()], GameKind::ZeroSum).is_ok());
        assert!(Game::new(x.clone(), vec![u.clone(), u.clone()], vec![c1.clone(), c2], GameKind::Team).is_err());
        assert!(Game::new(x, vec![u.clone(), u], vec![c1.clone(), c1], GameKind::Team).is_ok());
    }
}
