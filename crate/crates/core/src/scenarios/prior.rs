//! Prior-convergence sequences: point-mass priors sliding to zero under
//! fixed channels.
//!
//! The prior at index m is the point mass at the grid point nearest 1/m,
//! which converges weakly (in Wasserstein-1) to the point mass at 0 while
//! staying at total variation 2 from it as long as 1/m rounds away from
//! zero. Two channel families distinguish the continuous and discontinuous
//! regimes:
//!
//! - `Smoothed`: Gaussian-smeared rows for the minimizer. Row-to-row total
//!   variation is Lipschitz in the state coordinate, and the value of any
//!   game whose cost is Lipschitz in the state then moves at most
//!   `C * W1(prior_m, prior_limit)` with
//!   `C = cost_bound * channel_modulus + cost_modulus`.
//! - `Identity`: the minimizer sees the state exactly. Adjacent rows sit at
//!   total variation 2, the Lipschitz modulus diverges, and a game whose
//!   stakes are concentrated on the limit state keeps a constant value gap
//!   while the priors converge weakly.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::Game;
use crate::measure::{Channel, Measure};
use crate::space::Space;

use super::gaussian::gaussian_channel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorChannelKind {
    /// Gaussian-smoothed minimizer channel: total-variation continuous.
    Smoothed,
    /// Identity minimizer channel: not total-variation continuous.
    Identity,
}

/// Fixed channels plus the moving prior of the sequence.
#[derive(Debug, Clone)]
pub struct PriorSequence {
    pub state: Arc<Space>,
    pub channels: Vec<Channel>,
    pub limit_prior: Measure,
}

fn state_grid(grid_x: usize) -> Result<Arc<Space>> {
    Space::uniform_grid("x", 0.0, 1.0, grid_x)
}

fn nearest_grid_point(space: &Arc<Space>, v: f64) -> usize {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for i in 0..space.len() {
        let d = (space.scalar(i) - v).abs();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// The fixed channel pair of the scenario. The maximizer is blind in both
/// regimes except for `Identity`, where both players observe the state.
pub fn prior_channels(kind: PriorChannelKind, grid_x: usize, sigma: f64) -> Result<PriorSequence> {
    if grid_x < 3 {
        return Err(Error::InvalidInput("prior scenario needs at least 3 grid points".into()));
    }
    let state = state_grid(grid_x)?;
    let channels = match kind {
        PriorChannelKind::Smoothed => {
            if sigma <= 0.0 {
                return Err(Error::InvalidInput("smoothing width must be positive".into()));
            }
            let y1 = Space::uniform_grid("y1", 0.0, 1.0, grid_x)?;
            let q1 = gaussian_channel(&state, &y1, sigma * sigma)?;
            let q2 = Channel::uninformative(state.clone(), Space::singleton("y2", 0.0));
            vec![q1, q2]
        }
        PriorChannelKind::Identity => {
            let y1 = Space::uniform_grid("y1", 0.0, 1.0, grid_x)?;
            let y2 = Space::uniform_grid("y2", 0.0, 1.0, grid_x)?;
            let id = |to: &Arc<Space>| {
                let rows = (0..grid_x)
                    .map(|i| {
                        let mut r = vec![0.0; grid_x];
                        r[i] = 1.0;
                        r
                    })
                    .collect();
                Channel::new(state.clone(), to.clone(), rows)
            };
            vec![id(&y1)?, id(&y2)?]
        }
    };
    let limit_prior = Measure::point_mass(state.clone(), nearest_grid_point(&state, 0.0))?;
    Ok(PriorSequence { state, channels, limit_prior })
}

/// The prior at index m: point mass at the grid point nearest 1/m.
pub fn prior_at(seq: &PriorSequence, m: u32) -> Result<Measure> {
    if m == 0 {
        return Err(Error::InvalidInput("prior sequence starts at m = 1".into()));
    }
    Measure::point_mass(
        seq.state.clone(),
        nearest_grid_point(&seq.state, 1.0 / m as f64),
    )
}

/// Largest pairwise total-variation slope of a channel's rows over the state
/// embedding: `max_{x != x'} tv(row_x, row_x') / |x - x'|`.
pub fn channel_tv_modulus(channel: &Channel) -> f64 {
    let n = channel.from_space().len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = channel.from_space().distance(i, j);
            if d == 0.0 {
                continue;
            }
            let tv: f64 = channel
                .row(i)
                .iter()
                .zip(channel.row(j))
                .map(|(a, b)| (a - b).abs())
                .sum();
            worst = worst.max(tv / d);
        }
    }
    worst
}

/// Largest state-slope of a game's cost over fixed action profiles:
/// `max_{x != x', actions} |c(x, u) - c(x', u)| / |x - x'|`.
pub fn cost_state_modulus(game: &Game) -> f64 {
    let nx = game.state_space().len();
    let action_shape: Vec<usize> = game.action_spaces().iter().map(|a| a.len()).collect();
    let mut worst = 0.0_f64;
    crate::joint::for_each_cell(&action_shape, |_, us| {
        for i in 0..nx {
            for j in (i + 1)..nx {
                let d = game.state_space().distance(i, j);
                if d == 0.0 {
                    continue;
                }
                for p in 0..game.players() {
                    let gap = (game.cost(p, i, us) - game.cost(p, j, us)).abs();
                    worst = worst.max(gap / d);
                }
            }
        }
    });
    worst
}

/// The constant `C` in the prior-continuity bound
/// `|value(prior_m) - value(limit)| <= C * W1(prior_m, limit)`:
/// the cost bound times the summed channel moduli, plus the cost's own state
/// modulus. Both factors are computed exactly over the finite grids.
pub fn prior_gap_constant(seq: &PriorSequence, game: &Game) -> f64 {
    let channel_part: f64 = seq.channels.iter().map(channel_tv_modulus).sum();
    game.cost_bound() * channel_part + cost_state_modulus(game)
}
