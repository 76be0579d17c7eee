//! Wasserstein-1 distances on metrized finite spaces.
//!
//! The distance is the optimal-transport linear program with the Euclidean
//! ground cost between coordinate tuples. Because the ground cost is a metric,
//! Wasserstein-1 depends only on the signed difference of the two measures:
//! mass common to both sides never has to move. The solver therefore ships
//! only the positive part of `p - q` to the negative part, which keeps the
//! transport programs desk-sized even for joints with hundreds of cells. A
//! full-support formulation (no reduction) lives in the tests as an
//! independent oracle.

use crate::error::{Error, Result};
use crate::joint::{for_each_cell, JointMeasure};
use crate::lp::{self, LinearProgram, LpStatus};
use crate::measure::Measure;

/// Minimal transport cost between nonnegative vectors `supply` and `demand`
/// (equal totals) with cost matrix `cost[s][d]`.
fn transport_value(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Result<f64> {
    let ns = supply.len();
    let nd = demand.len();
    if ns == 0 || nd == 0 {
        return Ok(0.0);
    }
    let mut objective = Vec::with_capacity(ns * nd);
    for row in cost {
        objective.extend_from_slice(row);
    }
    let mut prog = LinearProgram::new(objective);
    for (s, &amount) in supply.iter().enumerate() {
        let mut row = vec![0.0; ns * nd];
        for d in 0..nd {
            row[s * nd + d] = 1.0;
        }
        prog.eq(row, amount);
    }
    for (d, &amount) in demand.iter().enumerate() {
        let mut row = vec![0.0; ns * nd];
        for s in 0..ns {
            row[s * nd + d] = 1.0;
        }
        prog.eq(row, amount);
    }
    let sol = lp::solve(&prog)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective.max(0.0)),
        other => Err(Error::Internal(format!(
            "transport program reported {other:?} for valid measures"
        ))),
    }
}

/// Split a signed difference into (positive support, negative support) with
/// indices and amounts, balancing the totals exactly.
fn split_difference(diff: &[f64]) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for (i, &d) in diff.iter().enumerate() {
        if d > 0.0 {
            pos.push((i, d));
        } else if d < 0.0 {
            neg.push((i, -d));
        }
    }
    // Equal-total invariant can drift by float dust; rescale the smaller side.
    let sp: f64 = pos.iter().map(|v| v.1).sum();
    let sn: f64 = neg.iter().map(|v| v.1).sum();
    if sp > 0.0 && sn > 0.0 && sp != sn {
        let f = sp / sn;
        for v in neg.iter_mut() {
            v.1 *= f;
        }
    }
    (pos, neg)
}

/// Wasserstein-1 distance between two measures on the same metrized space.
pub fn wasserstein1(p: &Measure, q: &Measure) -> Result<f64> {
    if !crate::space::same_space(p.space(), q.space()) {
        return Err(Error::SpaceMismatch("wasserstein1 of measures on different spaces".into()));
    }
    let diff: Vec<f64> = p.mass().iter().zip(q.mass()).map(|(a, b)| a - b).collect();
    let (pos, neg) = split_difference(&diff);
    if pos.is_empty() || neg.is_empty() {
        return Ok(0.0);
    }
    let space = p.space();
    let cost: Vec<Vec<f64>> = pos
        .iter()
        .map(|&(s, _)| neg.iter().map(|&(d, _)| space.distance(s, d)).collect())
        .collect();
    let supply: Vec<f64> = pos.iter().map(|v| v.1).collect();
    let demand: Vec<f64> = neg.iter().map(|v| v.1).collect();
    transport_value(&supply, &demand, &cost)
}

/// Ground distance between two cells of a product space: the sum over factors
/// of the per-factor Euclidean distance.
fn product_distance(joint: &JointMeasure, a: &[usize], b: &[usize]) -> f64 {
    joint
        .factors()
        .iter()
        .enumerate()
        .map(|(f, s)| s.distance(a[f], b[f]))
        .sum()
}

/// Wasserstein-1 distance between two joints over the same factor spaces,
/// with the sum (L1) product metric on concatenated coordinates.
pub fn joint_wasserstein1(p: &JointMeasure, q: &JointMeasure) -> Result<f64> {
    if !p.same_factors(q) {
        return Err(Error::SpaceMismatch("joint_wasserstein1 over different factor spaces".into()));
    }
    let diff: Vec<f64> = p.mass().iter().zip(q.mass()).map(|(a, b)| a - b).collect();
    let (pos, neg) = split_difference(&diff);
    if pos.is_empty() || neg.is_empty() {
        return Ok(0.0);
    }
    // Recover the multi-index of every support cell once.
    let shape = p.shape();
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); diff.len()];
    for_each_cell(&shape, |flat, idx| {
        if diff[flat] != 0.0 {
            cells[flat] = idx.to_vec();
        }
    });
    let cost: Vec<Vec<f64>> = pos
        .iter()
        .map(|&(s, _)| {
            neg.iter()
                .map(|&(d, _)| product_distance(p, &cells[s], &cells[d]))
                .collect()
        })
        .collect();
    let supply: Vec<f64> = pos.iter().map(|v| v.1).collect();
    let demand: Vec<f64> = neg.iter().map(|v| v.1).collect();
    transport_value(&supply, &demand, &cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::join;
    use crate::measure::Channel;
    use crate::space::Space;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Full-support transport oracle: every pair of points is a lane and the
    /// marginals are the raw measures, with no common-mass reduction.
    fn w1_full(p: &Measure, q: &Measure) -> f64 {
        let n = p.len();
        let space = p.space();
        let mut objective = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                objective.push(space.distance(i, j));
            }
        }
        let mut prog = LinearProgram::new(objective);
        for i in 0..n {
            let mut row = vec![0.0; n * n];
            for j in 0..n {
                row[i * n + j] = 1.0;
            }
            prog.eq(row, p.at(i));
        }
        for j in 0..n {
            let mut row = vec![0.0; n * n];
            for i in 0..n {
                row[i * n + j] = 1.0;
            }
            prog.eq(row, q.at(j));
        }
        let sol = lp::solve(&prog).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        sol.objective
    }

    #[test]
    fn two_point_masses() {
        let s = Space::line("p", &[-1.5, 2.0]).unwrap();
        let a = Measure::point_mass(s.clone(), 0).unwrap();
        let b = Measure::point_mass(s, 1).unwrap();
        assert!((wasserstein1(&a, &b).unwrap() - 3.5).abs() < 1e-9);
        assert!(wasserstein1(&a, &a).unwrap() == 0.0);
    }

    #[test]
    fn uniform_vs_point_mass() {
        let s = Space::line("p", &[0.0, 1.0]).unwrap();
        let u = Measure::uniform(s.clone());
        let d = Measure::point_mass(s, 0).unwrap();
        assert!((wasserstein1(&u, &d).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn reduction_matches_full_transport() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let n = rng.gen_range(2..=6);
            let pts: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let s = Space::line(&format!("t{trial}"), &pts).unwrap();
            let draw = |rng: &mut ChaCha8Rng| {
                let mut w: Vec<f64> = (0..n).map(|_| -f64::ln(rng.gen_range(1e-9..1.0))).collect();
                let t: f64 = w.iter().sum();
                for v in w.iter_mut() {
                    *v /= t;
                }
                w
            };
            let p = Measure::new(s.clone(), draw(&mut rng)).unwrap();
            let q = Measure::new(s.clone(), draw(&mut rng)).unwrap();
            let fast = wasserstein1(&p, &q).unwrap();
            let full = w1_full(&p, &q);
            assert!(
                (fast - full).abs() < 1e-8,
                "reduced {fast} vs full {full} on trial {trial}"
            );
        }
    }

    #[test]
    fn w1_is_symmetric_and_bounded_by_tv() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let n = rng.gen_range(2..=6);
            let pts: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect();
            let s = Space::line(&format!("s{trial}"), &pts).unwrap();
            let draw = |rng: &mut ChaCha8Rng| {
                let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0) + 1e-12).collect();
                let t: f64 = w.iter().sum();
                for v in w.iter_mut() {
                    *v /= t;
                }
                w
            };
            let p = Measure::new(s.clone(), draw(&mut rng)).unwrap();
            let q = Measure::new(s.clone(), draw(&mut rng)).unwrap();
            let ab = wasserstein1(&p, &q).unwrap();
            let ba = wasserstein1(&q, &p).unwrap();
            assert!((ab - ba).abs() < 1e-9);
            let tv = p.tv_distance(&q).unwrap();
            let diam = s.diameter();
            assert!(ab <= diam / 2.0 * tv + 1e-9);
            assert!(ab >= 0.0);
        }
    }

    #[test]
    fn joint_single_coordinate_shift() {
        // product of point masses at (0,0) vs (0, 1/n)
        let x = Space::line("x", &[0.0]).unwrap();
        let n = 8.0;
        let y = Space::line("y", &[0.0, 1.0 / n]).unwrap();
        let p = JointMeasure::new(vec![x.clone(), y.clone()], vec![1.0, 0.0]).unwrap();
        let q = JointMeasure::new(vec![x, y], vec![0.0, 1.0]).unwrap();
        assert!((joint_wasserstein1(&p, &q).unwrap() - 1.0 / n).abs() < 1e-12);
        assert!(joint_wasserstein1(&p, &p).unwrap() == 0.0);
    }

    #[test]
    fn joint_w1_bounded_by_tv_times_diameter() {
        let x = Space::line("x", &[0.0, 1.0]).unwrap();
        let y = Space::line("y", &[0.0, 0.5, 1.0]).unwrap();
        let prior = Measure::new(x.clone(), vec![0.3, 0.7]).unwrap();
        let q1 = Channel::new(
            x.clone(),
            y.clone(),
            vec![vec![0.6, 0.3, 0.1], vec![0.1, 0.2, 0.7]],
        )
        .unwrap();
        let q2 = Channel::new(
            x.clone(),
            y,
            vec![vec![0.2, 0.5, 0.3], vec![0.4, 0.4, 0.2]],
        )
        .unwrap();
        let a = join(&prior, &[&q1]).unwrap();
        let b = join(&prior, &[&q2]).unwrap();
        let w = joint_wasserstein1(&a, &b).unwrap();
        let tv = a.tv_distance(&b).unwrap();
        let diam: f64 = a.factors().iter().map(|s| s.diameter()).sum();
        assert!(w <= diam / 2.0 * tv + 1e-9);
    }
}
