//! Zero-sum game values over behavioral strategies.
//!
//! With one information set per measurement point, behavioral and mixed
//! strategies span the same expected costs, so the value is computed by two
//! epigraph linear programs that stay polynomial in the measurement counts.
//! The exponential normal-form enumeration is kept as an independent oracle.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpStatus};
use crate::measure::Channel;

use super::{
    decode_policy, expected_cost_deterministic, Certificate, Game, GameKind, JointMeasure, Policy,
    ValueReport,
};

/// Agreement tolerance between the minimizer and maximizer programs.
const DUALITY_TOL: f64 = 1e-7;

/// Expected-cost table W[y1][y2][u1][u2] = sum_x mu(x,y1,y2) c(x,u1,u2),
/// flattened in that order.
struct CostTable {
    w: Vec<f64>,
    ny1: usize,
    ny2: usize,
    nu1: usize,
    nu2: usize,
}

impl CostTable {
    fn build(game: &Game, joint: &JointMeasure) -> CostTable {
        let ny1 = joint.factor(1).len();
        let ny2 = joint.factor(2).len();
        let nu1 = game.action_space(0).len();
        let nu2 = game.action_space(1).len();
        let nx = game.state_space().len();
        let mut w = vec![0.0; ny1 * ny2 * nu1 * nu2];
        for y1 in 0..ny1 {
            for y2 in 0..ny2 {
                // mass over x at (y1, y2)
                let mut mx = vec![0.0; nx];
                for (x, m) in mx.iter_mut().enumerate() {
                    *m = joint.at(&[x, y1, y2]);
                }
                for u1 in 0..nu1 {
                    for u2 in 0..nu2 {
                        let mut acc = 0.0;
                        for (x, &m) in mx.iter().enumerate() {
                            if m != 0.0 {
                                acc += m * game.cost(0, x, &[u1, u2]);
                            }
                        }
                        w[((y1 * ny2 + y2) * nu1 + u1) * nu2 + u2] = acc;
                    }
                }
            }
        }
        CostTable { w, ny1, ny2, nu1, nu2 }
    }

    fn at(&self, y1: usize, y2: usize, u1: usize, u2: usize) -> f64 {
        self.w[((y1 * self.ny2 + y2) * self.nu1 + u1) * self.nu2 + u2]
    }
}

fn policy_from_rows(
    player: usize,
    rows: Vec<Vec<f64>>,
    from: &std::sync::Arc<crate::space::Space>,
    to: &std::sync::Arc<crate::space::Space>,
) -> Result<Policy> {
    let cleaned: Vec<Vec<f64>> = rows
        .into_iter()
        .map(|mut r| {
            for v in r.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            let s: f64 = r.iter().sum();
            if s > 0.0 {
                for v in r.iter_mut() {
                    *v /= s;
                }
            } else {
                r[0] = 1.0;
            }
            r
        })
        .collect();
    Ok(Policy::behavioral(player, Channel::new(from.clone(), to.clone(), cleaned)?))
}

/// Equilibrium value of a zero-sum game under an information structure.
///
/// Solves the minimizer's epigraph program (variables: the minimizer's
/// behavioral weights and one threshold per maximizer measurement point) and
/// the mirrored maximizer program, checks that the two values agree within
/// 1e-7, and returns both behavioral equilibrium policies.
pub fn zerosum_value(game: &Game, joint: &JointMeasure) -> Result<ValueReport> {
    if game.kind() != GameKind::ZeroSum {
        return Err(Error::InvalidInput("zerosum_value requires a zero-sum game".into()));
    }
    game.check_joint(joint)?;
    let table = CostTable::build(game, joint);
    let (ny1, ny2, nu1, nu2) = (table.ny1, table.ny2, table.nu1, table.nu2);

    // Minimizer program: vars gamma(y1,u1) then t(y2) free.
    // min sum_y2 t(y2)
    //   s.t. for all (y2,u2): sum_{y1,u1} W gamma - t(y2) <= 0
    //        for all y1: sum_u1 gamma(y1,u1) = 1
    let ng = ny1 * nu1;
    let minimax;
    let policy0;
    {
        let mut obj = vec![0.0; ng + ny2];
        for v in obj.iter_mut().skip(ng) {
            *v = 1.0;
        }
        let mut lp = LinearProgram::new(obj);
        for j in 0..ny2 {
            lp.free_var(ng + j);
        }
        for y2 in 0..ny2 {
            for u2 in 0..nu2 {
                let mut row = vec![0.0; ng + ny2];
                for y1 in 0..ny1 {
                    for u1 in 0..nu1 {
                        row[y1 * nu1 + u1] = table.at(y1, y2, u1, u2);
                    }
                }
                row[ng + y2] = -1.0;
                lp.le(row, 0.0);
            }
        }
        for y1 in 0..ny1 {
            let mut row = vec![0.0; ng + ny2];
            for u1 in 0..nu1 {
                row[y1 * nu1 + u1] = 1.0;
            }
            lp.eq(row, 1.0);
        }
        let sol = crate::lp::solve(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::SolverFailure(format!(
                "minimizer program reported {:?}",
                sol.status
            )));
        }
        minimax = sol.objective;
        let rows: Vec<Vec<f64>> = (0..ny1)
            .map(|y1| (0..nu1).map(|u1| sol.primal[y1 * nu1 + u1]).collect())
            .collect();
        policy0 = policy_from_rows(0, rows, joint.factor(1), game.action_space(0))?;
    }

    // Maximizer program: vars sigma(y2,u2) then s(y1) free.
    // max sum_y1 s(y1)  <=>  min -sum s
    //   s.t. for all (y1,u1): sum_{y2,u2} W sigma - s(y1) >= 0
    //        for all y2: sum_u2 sigma(y2,u2) = 1
    let ns = ny2 * nu2;
    let maximin;
    let policy1;
    {
        let mut obj = vec![0.0; ns + ny1];
        for v in obj.iter_mut().skip(ns) {
            *v = -1.0;
        }
        let mut lp = LinearProgram::new(obj);
        for j in 0..ny1 {
            lp.free_var(ns + j);
        }
        for y1 in 0..ny1 {
            for u1 in 0..nu1 {
                let mut row = vec![0.0; ns + ny1];
                for y2 in 0..ny2 {
                    for u2 in 0..nu2 {
                        row[y2 * nu2 + u2] = table.at(y1, y2, u1, u2);
                    }
                }
                row[ns + y1] = -1.0;
                lp.ge(row, 0.0);
            }
        }
        for y2 in 0..ny2 {
            let mut row = vec![0.0; ns + ny1];
            for u2 in 0..nu2 {
                row[y2 * nu2 + u2] = 1.0;
            }
            lp.eq(row, 1.0);
        }
        let sol = crate::lp::solve(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::SolverFailure(format!(
                "maximizer program reported {:?}",
                sol.status
            )));
        }
        maximin = -sol.objective;
        let rows: Vec<Vec<f64>> = (0..ny2)
            .map(|y2| (0..nu2).map(|u2| sol.primal[y2 * nu2 + u2]).collect())
            .collect();
        policy1 = policy_from_rows(1, rows, joint.factor(2), game.action_space(1))?;
    }

    if (minimax - maximin).abs() > DUALITY_TOL {
        return Err(Error::Internal(format!(
            "minimax {minimax} and maximin {maximin} differ beyond {DUALITY_TOL}"
        )));
    }

    Ok(ValueReport {
        value: minimax,
        policies: vec![policy0, policy1],
        certificate: Certificate::ZeroSumDuality { minimax, maximin },
    })
}

/// Brute-force oracle: enumerate every deterministic policy of both players,
/// form the normal-form payoff table, and solve that matrix game by LP.
///
/// Capped at 10^6 payoff entries.
pub fn zerosum_value_oracle(game: &Game, joint: &JointMeasure) -> Result<f64> {
    if game.kind() != GameKind::ZeroSum {
        return Err(Error::InvalidInput("zerosum_value_oracle requires a zero-sum game".into()));
    }
    game.check_joint(joint)?;
    let ny1 = joint.factor(1).len();
    let ny2 = joint.factor(2).len();
    let nu1 = game.action_space(0).len();
    let nu2 = game.action_space(1).len();
    let count1 = (nu1 as f64).powi(ny1 as i32);
    let count2 = (nu2 as f64).powi(ny2 as i32);
    if count1 * count2 > 1e6 {
        return Err(Error::Capacity(format!(
            "normal form would have {:.3e} entries (cap 1e6)",
            count1 * count2
        )));
    }
    let count1 = count1 as usize;
    let count2 = count2 as usize;

    let policies1: Vec<Vec<usize>> = (0..count1).map(|i| decode_policy(i, ny1, nu1)).collect();
    let policies2: Vec<Vec<usize>> = (0..count2).map(|j| decode_policy(j, ny2, nu2)).collect();

    let mut payoff = vec![0.0; count1 * count2];
    for (i, a) in policies1.iter().enumerate() {
        for (j, b) in policies2.iter().enumerate() {
            payoff[i * count2 + j] =
                expected_cost_deterministic(game, joint, &[a.as_slice(), b.as_slice()], 0);
        }
    }

    // Matrix game for the row player (minimizer): min t s.t. for every
    // column j: sum_i payoff[i][j] p_i <= t, p on the simplex.
    let mut obj = vec![0.0; count1 + 1];
    obj[count1] = 1.0;
    let mut lp = LinearProgram::new(obj);
    lp.free_var(count1);
    for j in 0..count2 {
        let mut row = vec![0.0; count1 + 1];
        for i in 0..count1 {
            row[i] = payoff[i * count2 + j];
        }
        row[count1] = -1.0;
        lp.le(row, 0.0);
    }
    let mut simplex_row = vec![1.0; count1 + 1];
    simplex_row[count1] = 0.0;
    lp.eq(simplex_row, 1.0);
    let sol = crate::lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(format!("oracle matrix game reported {:?}", sol.status)));
    }
    Ok(sol.objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::join;
    use crate::measure::Measure;
    use crate::sample;
    use crate::space::Space;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn matching_pennies() -> (Game, JointMeasure) {
        let x = Space::singleton("x", 0.0);
        let y = Space::singleton("y", 0.0);
        let u = Space::line("u", &[0.0, 1.0]).unwrap();
        let cost = Game::cost_from_fn(&x, &[u.clone(), u.clone()], |_x, us| {
            if (us[0] - us[1]).abs() < 1e-9 {
                1.0
            } else {
                -1.0
            }
        });
        let game = Game::zero_sum(x.clone(), u.clone(), u, cost).unwrap();
        let q1 = Channel::uninformative(x.clone(), y.clone());
        let q2 = Channel::uninformative(x.clone(), y);
        let joint = join(&Measure::uniform(x), &[&q1, &q2]).unwrap();
        (game, joint)
    }

    /// Uniform binary state; the minimizer is a dummy and the maximizer earns
    /// 1 for guessing the state.
    fn guessing_game(maximizer_channel: Channel) -> (Game, JointMeasure) {
        let x = Space::line("x", &[0.0, 1.0]).unwrap();
        let u1 = Space::singleton("u1", 0.0);
        let u2 = Space::line("u2", &[0.0, 1.0]).unwrap();
        let cost = Game::cost_from_fn(&x, &[u1.clone(), u2.clone()], |xv, us| {
            if (us[1] - xv).abs() < 1e-9 {
                1.0
            } else {
                0.0
            }
        });
        let game = Game::zero_sum(x.clone(), u1, u2, cost).unwrap();
        let q1 = Channel::uninformative(x.clone(), Space::singleton("y1", 0.0));
        let joint = join(&Measure::uniform(x), &[&q1, &maximizer_channel]).unwrap();
        (game, joint)
    }

    #[test]
    fn matching_pennies_value_zero_and_mixed() {
        let (game, joint) = matching_pennies();
        let report = zerosum_value(&game, &joint).unwrap();
        assert!(report.value.abs() < 1e-9);
        assert!(report.certificate.duality_gap().unwrap() < 1e-7);
        for pol in &report.policies {
            match pol {
                Policy::Behavioral { channel, .. } => {
                    assert!((channel.prob(0, 0) - 0.5).abs() < 1e-7);
                }
                _ => panic!("expected behavioral policy"),
            }
        }
        assert!((zerosum_value_oracle(&game, &joint).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn guessing_game_informed_and_blind() {
        let x = Space::line("x", &[0.0, 1.0]).unwrap();
        let (game, joint) = guessing_game(Channel::identity(x.clone()));
        let report = zerosum_value(&game, &joint).unwrap();
        assert!((report.value - 1.0).abs() < 1e-9);
        assert!((zerosum_value_oracle(&game, &joint).unwrap() - 1.0).abs() < 1e-9);

        let blind = Channel::uninformative(x, Space::singleton("y2", 0.0));
        let (game, joint) = guessing_game(blind);
        let report = zerosum_value(&game, &joint).unwrap();
        assert!((report.value - 0.5).abs() < 1e-9);
    }

    #[test]
    fn oracle_agrees_on_random_binary_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x = sample::indexed_space("x", 2);
        let y1 = sample::indexed_space("y1", 2);
        let y2 = sample::indexed_space("y2", 2);
        let u = sample::indexed_space("u", 2);
        for _ in 0..5 {
            let joint = sample::random_joint(&mut rng, &[x.clone(), y1.clone(), y2.clone()]);
            let cost = sample::random_cost(&mut rng, 2 * 2 * 2, 1.0);
            let game = Game::zero_sum(x.clone(), u.clone(), u.clone(), cost).unwrap();
            let lp_value = zerosum_value(&game, &joint).unwrap().value;
            let oracle = zerosum_value_oracle(&game, &joint).unwrap();
            assert!(
                (lp_value - oracle).abs() < 1e-7,
                "lp {lp_value} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn oracle_capacity_cap() {
        let x = sample::indexed_space("x", 2);
        let y1 = sample::indexed_space("y1", 12);
        let y2 = sample::indexed_space("y2", 12);
        let u = sample::indexed_space("u", 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let joint = sample::random_joint(&mut rng, &[x.clone(), y1, y2]);
        let cost = sample::random_cost(&mut rng, 2 * 4 * 4, 1.0);
        let game = Game::zero_sum(x, u.clone(), u, cost).unwrap();
        assert!(matches!(
            zerosum_value_oracle(&game, &joint),
            Err(Error::Capacity(_))
        ));
    }
}
