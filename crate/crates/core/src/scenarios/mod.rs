//! Generators for the convergence scenarios, the experiment runner, and its
//! CSV contract.
//!
//! Every scenario produces a sequence of information structures together
//! with its analytic limit on a common embedded grid; the runner computes,
//! per index, the total variation and Wasserstein-1 distances to the limit
//! and the requested game value(s), and emits one final row for the limit
//! itself. Rows are computed in parallel but always emitted in index order,
//! so a fixed seed yields byte-identical CSV.

pub mod counterexample;
pub mod gaussian;
pub mod prior;
pub mod quantizer;

pub use counterexample::{
    counterexample_limit_bins, gen_counterexample_sequence, run_counterexample,
    CounterexampleRow, QuantizerBins,
};
pub use gaussian::{gaussian_limit, gen_gaussian_sequence};
pub use prior::{
    channel_tv_modulus, cost_state_modulus, prior_at, prior_channels, prior_gap_constant,
    PriorChannelKind, PriorSequence,
};
pub use quantizer::{gen_quantizer_refinement, quantizer_limit};

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{
    br_iteration, team_pbp_descent, team_value_bruteforce, zerosum_value, Game, GameKind, Policy,
};
use crate::joint::{join, JointMeasure};
use crate::sample;
use crate::space::Space;
use crate::transport::joint_wasserstein1;

/// A convergence scenario: which sequence to generate and with what knobs.
#[derive(Debug, Clone)]
pub enum SequenceSpec {
    GaussianGarbling { grid_x: usize, grid_y: usize, indices: Vec<u32> },
    QuantizerRefinement { grid_x: usize, indices: Vec<u32> },
    CounterexampleQuantizer { indices: Vec<u32> },
    PriorShift { kind: PriorChannelKind, grid_x: usize, sigma: f64, indices: Vec<u32> },
    /// Explicit chain: each step garbles `factor` by a seeded random kernel.
    /// The limit of a finite chain is its final element.
    GarblingChain { sizes: (usize, usize, usize), factor: usize, length: u32, seed: u64 },
}

impl SequenceSpec {
    pub fn indices(&self) -> Vec<u32> {
        match self {
            SequenceSpec::GaussianGarbling { indices, .. }
            | SequenceSpec::QuantizerRefinement { indices, .. }
            | SequenceSpec::CounterexampleQuantizer { indices }
            | SequenceSpec::PriorShift { indices, .. } => indices.clone(),
            SequenceSpec::GarblingChain { length, .. } => (1..=*length).collect(),
        }
    }

    /// The generated sequence, in index order, plus the analytic limit.
    /// The counterexample is interval-exact and has no common finite grid;
    /// it is handled by `run_counterexample` instead.
    pub fn structures(&self) -> Result<(Vec<(u32, JointMeasure)>, JointMeasure)> {
        match self {
            SequenceSpec::GaussianGarbling { grid_x, grid_y, indices } => {
                let seq = indices
                    .iter()
                    .map(|&m| Ok((m, gen_gaussian_sequence(*grid_x, *grid_y, m)?)))
                    .collect::<Result<_>>()?;
                Ok((seq, gaussian_limit(*grid_x, *grid_y)?))
            }
            SequenceSpec::QuantizerRefinement { grid_x, indices } => {
                let seq = indices
                    .iter()
                    .map(|&m| Ok((m, gen_quantizer_refinement(m, *grid_x)?)))
                    .collect::<Result<_>>()?;
                Ok((seq, quantizer_limit(*grid_x)?))
            }
            SequenceSpec::CounterexampleQuantizer { .. } => Err(Error::InvalidInput(
                "the counterexample is interval-exact; use run_counterexample".into(),
            )),
            SequenceSpec::PriorShift { kind, grid_x, sigma, indices } => {
                let base = prior_channels(*kind, *grid_x, *sigma)?;
                let refs: Vec<&crate::measure::Channel> = base.channels.iter().collect();
                let seq = indices
                    .iter()
                    .map(|&m| Ok((m, join(&prior_at(&base, m)?, &refs)?)))
                    .collect::<Result<_>>()?;
                let limit = join(&base.limit_prior, &refs)?;
                Ok((seq, limit))
            }
            SequenceSpec::GarblingChain { sizes, factor, length, seed } => {
                use rand::SeedableRng;
                let (nx, ny1, ny2) = *sizes;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                let x = sample::indexed_space("x", nx);
                let y1 = sample::indexed_space("y1", ny1);
                let y2 = sample::indexed_space("y2", ny2);
                let prior = crate::measure::Measure::uniform(x.clone());
                let mut current =
                    sample::random_joint_with_prior(&mut rng, &prior, &[y1.clone(), y2.clone()]);
                let mut seq = Vec::with_capacity(*length as usize);
                for m in 1..=*length {
                    seq.push((m, current.clone()));
                    let space = current.factor(*factor).clone();
                    let kernel = sample::random_channel(&mut rng, &space, &space);
                    current = current.garble(*factor, &kernel)?;
                }
                // The final garbled structure is the chain's limit.
                Ok((seq, current))
            }
        }
    }
}

/// Which value the experiment tracks per index.
#[derive(Debug, Clone)]
pub enum ValueKind {
    ZeroSum,
    Team { restarts: usize, seed: u64 },
    /// Per-player values at the profile reached by best-response iteration
    /// from the all-zeros deterministic profile; `tracked` selects the player
    /// whose gap fills the value_gap column.
    PerPlayer { tracked: usize, max_rounds: usize },
}

/// One row of a convergence experiment.
#[derive(Debug, Clone)]
pub struct ExperimentRow {
    /// None marks the limit row.
    pub index: Option<u32>,
    pub tv_to_limit: f64,
    pub w1_to_limit: f64,
    pub values: Vec<f64>,
    pub value_gap: f64,
}

fn values_for(game: &Game, joint: &JointMeasure, kind: &ValueKind) -> Result<Vec<f64>> {
    match kind {
        ValueKind::ZeroSum => Ok(vec![zerosum_value(game, joint)?.value]),
        ValueKind::Team { restarts, seed } => match team_value_bruteforce(game, joint) {
            Ok(report) => Ok(vec![report.value]),
            Err(Error::Capacity(_)) => {
                Ok(vec![team_pbp_descent(game, joint, *restarts, *seed)?.value])
            }
            Err(e) => Err(e),
        },
        ValueKind::PerPlayer { max_rounds, .. } => {
            let initial: Vec<Policy> = (0..game.players())
                .map(|p| Policy::deterministic(p, vec![0; joint.factor(p + 1).len()]))
                .collect();
            let out = br_iteration(game, joint, &initial, *max_rounds)?;
            Ok(out.values)
        }
    }
}

fn gap_for(kind: &ValueKind, values: &[f64], limit_values: &[f64]) -> f64 {
    let tracked = match kind {
        ValueKind::PerPlayer { tracked, .. } => (*tracked).min(values.len() - 1),
        _ => 0,
    };
    (values[tracked] - limit_values[tracked]).abs()
}

/// Run a convergence experiment: distances to the limit and values per
/// index, then the limit row. The counterexample scenario ignores `game`
/// and `kind` (its game and equilibrium play are closed-form).
pub fn run_convergence_experiment(
    spec: &SequenceSpec,
    game: Option<&Game>,
    kind: &ValueKind,
) -> Result<Vec<ExperimentRow>> {
    if let SequenceSpec::CounterexampleQuantizer { indices } = spec {
        let rows = run_counterexample(indices)?;
        return Ok(rows
            .into_iter()
            .map(|r| ExperimentRow {
                index: r.index,
                tv_to_limit: r.tv_to_limit,
                w1_to_limit: r.w1_to_limit,
                values: vec![r.p1_value, r.p2_value],
                value_gap: r.p2_gap,
            })
            .collect());
    }
    let game = game.ok_or_else(|| {
        Error::InvalidInput("this scenario needs a game to evaluate values".into())
    })?;
    let (seq, limit) = spec.structures()?;
    let limit_values = values_for(game, &limit, kind)?;
    let mut rows: Vec<ExperimentRow> = seq
        .par_iter()
        .map(|(m, joint)| {
            let tv = joint.tv_distance(&limit)?;
            let w1 = joint_wasserstein1(joint, &limit)?;
            let values = values_for(game, joint, kind)?;
            let value_gap = gap_for(kind, &values, &limit_values);
            Ok(ExperimentRow {
                index: Some(*m),
                tv_to_limit: tv,
                w1_to_limit: w1,
                values,
                value_gap,
            })
        })
        .collect::<Result<_>>()?;
    rows.push(ExperimentRow {
        index: None,
        tv_to_limit: 0.0,
        w1_to_limit: 0.0,
        values: limit_values,
        value_gap: 0.0,
    });
    Ok(rows)
}

/// Format with 12 significant digits, plain decimal where reasonable.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs();
    if (1e-4..1e13).contains(&mag) {
        let exponent = mag.log10().floor() as i32;
        let decimals = (11 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

/// Render experiment rows to the CSV contract:
/// `m,tv_to_limit,w1_to_limit,value[,value_p2,...],value_gap` with the final
/// row labeled `limit`.
pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = String::new();
    let nvals = rows.first().map(|r| r.values.len()).unwrap_or(1);
    out.push_str("m,tv_to_limit,w1_to_limit,value");
    for p in 1..nvals {
        out.push_str(&format!(",value_p{}", p + 1));
    }
    out.push_str(",value_gap\n");
    for row in rows {
        match row.index {
            Some(m) => out.push_str(&m.to_string()),
            None => out.push_str("limit"),
        }
        out.push(',');
        out.push_str(&fmt_sig(row.tv_to_limit));
        out.push(',');
        out.push_str(&fmt_sig(row.w1_to_limit));
        for v in &row.values {
            out.push(',');
            out.push_str(&fmt_sig(*v));
        }
        out.push(',');
        out.push_str(&fmt_sig(row.value_gap));
        out.push('\n');
    }
    out
}

/// Clone a state grid into an action grid with fresh labels.
fn action_grid(prefix: &str, state: &Arc<Space>) -> Result<Arc<Space>> {
    let pts: Vec<f64> = state.coords().iter().map(|c| c[0]).collect();
    Space::line(prefix, &pts)
}

/// Built-in games over a given state space, used by the experiment runner
/// and the CLI. `kind` must be ZeroSum or Team; general games come from
/// game files.
pub fn builtin_game(name: &str, state: &Arc<Space>, kind: GameKind) -> Result<Game> {
    let make = |actions: Vec<Arc<Space>>, cost: Vec<f64>| -> Result<Game> {
        match kind {
            GameKind::ZeroSum => {
                if actions.len() != 2 {
                    return Err(Error::InvalidInput("zero-sum builtins need two players".into()));
                }
                Game::zero_sum(state.clone(), actions[0].clone(), actions[1].clone(), cost)
            }
            GameKind::Team => Game::team(state.clone(), actions, cost),
            GameKind::General => {
                Err(Error::InvalidInput("builtin games are zero-sum or team".into()))
            }
        }
    };
    match name {
        // The maximizer guesses the state; the minimizer is a dummy.
        "guessing" => {
            let u1 = Space::singleton("u1", 0.0);
            let u2 = action_grid("u2", state)?;
            let cost = Game::cost_from_fn(state, &[u1.clone(), u2.clone()], |x, us| {
                if (us[1] - x).abs() < 1e-12 {
                    1.0
                } else {
                    0.0
                }
            });
            make(vec![u1, u2], cost)
        }
        // The minimizer matches the state exactly; the other side is a dummy.
        "state-matching" => {
            let u1 = action_grid("u1", state)?;
            let u2 = Space::singleton("u2", 0.0);
            let cost = Game::cost_from_fn(state, &[u1.clone(), u2.clone()], |x, us| {
                if (us[0] - x).abs() < 1e-12 {
                    0.0
                } else {
                    1.0
                }
            });
            make(vec![u1, u2], cost)
        }
        // Quadratic tracking of the state on its own grid.
        "tracking" => {
            let u1 = action_grid("u1", state)?;
            let u2 = Space::singleton("u2", 0.0);
            let cost = Game::cost_from_fn(state, &[u1.clone(), u2.clone()], |x, us| {
                (x - us[0]) * (x - us[0])
            });
            make(vec![u1, u2], cost)
        }
        // A matching battle whose stakes exist only at state zero: the value
        // jumps from 0 to 1/2 when the prior lands on that state.
        "zero-state-pennies" => {
            let u = Space::line("u1", &[0.0, 1.0])?;
            let u2 = Space::line("u2", &[0.0, 1.0])?;
            let cost = Game::cost_from_fn(state, &[u.clone(), u2.clone()], |x, us| {
                if x == 0.0 && (us[0] - us[1]).abs() < 1e-12 {
                    1.0
                } else {
                    0.0
                }
            });
            make(vec![u, u2], cost)
        }
        other => Err(Error::InvalidInput(format!("unknown builtin game '{other}'"))),
    }
}

/// Scenario names understood by `named_scenario` (and the CLI).
pub fn scenario_names() -> &'static [&'static str] {
    &[
        "counterexample-nonzerosum",
        "gaussian-garbling",
        "quantizer-refinement",
        "prior-shift-smoothed",
        "prior-shift-identity",
        "garbling-chain",
    ]
}

/// Tuning knobs shared by the named scenarios.
#[derive(Debug, Clone)]
pub struct ScenarioParams {
    pub m_range: Option<(u32, u32)>,
    pub grid_x: Option<usize>,
    pub grid_y: Option<usize>,
    pub sigma: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        ScenarioParams {
            m_range: None,
            grid_x: None,
            grid_y: None,
            sigma: 0.25,
            seed: crate::DEFAULT_SEED,
            restarts: 16,
        }
    }
}

/// A ready-to-run scenario: spec, default game, and value kind.
#[derive(Debug)]
pub struct NamedScenario {
    pub spec: SequenceSpec,
    pub game: Option<Game>,
    pub kind: ValueKind,
}

fn range_vec(range: (u32, u32)) -> Vec<u32> {
    (range.0..=range.1).collect()
}

/// Resolve a scenario name plus parameters into a runnable configuration
/// with its default game.
pub fn named_scenario(name: &str, params: &ScenarioParams) -> Result<NamedScenario> {
    match name {
        "counterexample-nonzerosum" => {
            let indices = range_vec(params.m_range.unwrap_or((1, 12)));
            Ok(NamedScenario {
                spec: SequenceSpec::CounterexampleQuantizer { indices },
                game: None,
                kind: ValueKind::PerPlayer { tracked: 1, max_rounds: 8 },
            })
        }
        "gaussian-garbling" => {
            let grid_x = params.grid_x.unwrap_or(4);
            let grid_y = params.grid_y.unwrap_or(9);
            let indices = range_vec(params.m_range.unwrap_or((1, 8)));
            let spec = SequenceSpec::GaussianGarbling { grid_x, grid_y, indices };
            let state = Space::uniform_grid("x", 0.0, 1.0, grid_x)?;
            let game = builtin_game("guessing", &state, GameKind::ZeroSum)?;
            Ok(NamedScenario { spec, game: Some(game), kind: ValueKind::ZeroSum })
        }
        "quantizer-refinement" => {
            let grid_x = params.grid_x.unwrap_or(16);
            let levels = (grid_x as f64).log2() as u32;
            let indices = range_vec(params.m_range.unwrap_or((1, levels)));
            let spec = SequenceSpec::QuantizerRefinement { grid_x, indices };
            let pts: Vec<f64> = (0..grid_x).map(|k| (k as f64 + 0.5) / grid_x as f64).collect();
            let state = Space::line("x", &pts)?;
            let game = builtin_game("tracking", &state, GameKind::ZeroSum)?;
            Ok(NamedScenario { spec, game: Some(game), kind: ValueKind::ZeroSum })
        }
        "prior-shift-smoothed" => {
            let grid_x = params.grid_x.unwrap_or(17);
            let indices = range_vec(params.m_range.unwrap_or((1, 12)));
            let spec = SequenceSpec::PriorShift {
                kind: PriorChannelKind::Smoothed,
                grid_x,
                sigma: params.sigma,
                indices,
            };
            let state = Space::uniform_grid("x", 0.0, 1.0, grid_x)?;
            let game = builtin_game("tracking", &state, GameKind::ZeroSum)?;
            Ok(NamedScenario { spec, game: Some(game), kind: ValueKind::ZeroSum })
        }
        "prior-shift-identity" => {
            let grid_x = params.grid_x.unwrap_or(17);
            let indices = range_vec(params.m_range.unwrap_or((1, 12)));
            let spec = SequenceSpec::PriorShift {
                kind: PriorChannelKind::Identity,
                grid_x,
                sigma: 0.0,
                indices,
            };
            let state = Space::uniform_grid("x", 0.0, 1.0, grid_x)?;
            let game = builtin_game("zero-state-pennies", &state, GameKind::ZeroSum)?;
            Ok(NamedScenario { spec, game: Some(game), kind: ValueKind::ZeroSum })
        }
        "garbling-chain" => {
            let length = params.m_range.map(|(a, b)| b - a + 1).unwrap_or(6);
            let spec = SequenceSpec::GarblingChain {
                sizes: (2, 2, 2),
                factor: 2,
                length,
                seed: params.seed,
            };
            let state = sample::indexed_space("x", 2);
            let game = builtin_game("guessing", &state, GameKind::ZeroSum)?;
            Ok(NamedScenario { spec, game: Some(game), kind: ValueKind::ZeroSum })
        }
        other => Err(Error::InvalidInput(format!(
            "unknown scenario '{other}'; available: {}",
            scenario_names().join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence_has_constant_rows() {
        // every index of m_range {1,1,1} rounds to the same prior, so all
        // distance and value columns repeat
        let spec = SequenceSpec::PriorShift {
            kind: PriorChannelKind::Identity,
            grid_x: 3,
            sigma: 0.0,
            indices: vec![1, 1, 1],
        };
        let state = Space::uniform_grid("x", 0.0, 1.0, 3).unwrap();
        let game = builtin_game("zero-state-pennies", &state, GameKind::ZeroSum).unwrap();
        let rows = run_convergence_experiment(&spec, Some(&game), &ValueKind::ZeroSum).unwrap();
        for w in rows.windows(2) {
            if w[1].index.is_some() {
                assert_eq!(w[0].tv_to_limit, w[1].tv_to_limit);
                assert!((w[0].values[0] - w[1].values[0]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn counterexample_runner_rows() {
        let spec = SequenceSpec::CounterexampleQuantizer { indices: vec![1, 2, 3] };
        let rows = run_convergence_experiment(&spec, None, &ValueKind::ZeroSum).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows[..3] {
            assert_eq!(row.values[1], 0.0);
            assert!((row.value_gap - 0.25).abs() < 1e-15);
        }
        let limit = rows.last().unwrap();
        assert!((limit.values[1] - 0.25).abs() < 1e-15);
        assert_eq!(limit.value_gap, 0.0);
    }

    #[test]
    fn csv_shape_and_limit_label() {
        let spec = SequenceSpec::CounterexampleQuantizer { indices: vec![1, 2] };
        let rows = run_convergence_experiment(&spec, None, &ValueKind::ZeroSum).unwrap();
        let csv = rows_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "m,tv_to_limit,w1_to_limit,value,value_p2,value_gap"
        );
        assert!(csv.lines().last().unwrap().starts_with("limit,"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn fmt_sig_examples() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.25), "0.250000000000");
        assert_eq!(fmt_sig(2.0), "2.00000000000");
        assert_eq!(fmt_sig(-0.25), "-0.250000000000");
        assert!(fmt_sig(3.75e-13).contains('e'));
    }

    #[test]
    fn unknown_scenario_lists_options() {
        let err = named_scenario("nope", &ScenarioParams::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("counterexample-nonzerosum"));
        assert!(msg.contains("quantizer-refinement"));
    }

    #[test]
    fn garbling_chain_values_fall() {
        let params = ScenarioParams::default();
        let sc = named_scenario("garbling-chain", &params).unwrap();
        let rows = run_convergence_experiment(&sc.spec, sc.game.as_ref(), &sc.kind).unwrap();
        for w in rows.windows(2) {
            assert!(
                w[1].values[0] <= w[0].values[0] + 1e-7,
                "value rose along a maximizer-garbling chain"
            );
        }
    }
}
