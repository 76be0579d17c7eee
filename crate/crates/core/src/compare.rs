//! Comparison of information structures.
//!
//! All comparisons reduce to linear programs over row-stochastic kernels with
//! L1 slack variables: one-sided garbling deficiencies, the two-sided kernel
//! value-distance for zero-sum games, and the Le Cam deficiency between
//! channels. Sampled suprema over random bounded games provide the matching
//! lower bounds.
//!
//! Factor conventions follow the rest of the crate: factor 0 of a joint is
//! the state, factor 1 the minimizer's measurement, factor 2 the maximizer's.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{single_player_value, zerosum_value, Game};
use crate::joint::{for_each_cell, strides, JointMeasure};
use crate::lp::{LinearProgram, LpStatus};
use crate::measure::{Channel, Measure};
use crate::sample;
use crate::space::{same_space, Space};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Outcome of a kernel-optimization distance: the achieved total variation
/// and the minimizing kernel(s), tagged by the garbled factor(s).
#[derive(Debug, Clone)]
pub struct GarblingCertificate {
    pub deficiency: f64,
    pub kernels: Vec<Channel>,
    /// Factor indices that were garbled, parallel to `kernels`.
    pub side: Vec<usize>,
}

fn check_pair(a: &JointMeasure, b: &JointMeasure) -> Result<()> {
    if !a.same_factors(b) {
        return Err(Error::SpaceMismatch(
            "information structures live on different factor spaces".into(),
        ));
    }
    Ok(())
}

fn kernel_rows(primal: &[f64], offset: usize, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|y| {
            let mut row: Vec<f64> =
                (0..n).map(|t| primal[offset + y * n + t].max(0.0)).collect();
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                for v in row.iter_mut() {
                    *v /= s;
                }
            } else {
                row[y] = 1.0;
            }
            row
        })
        .collect()
}

/// Minimize `tv(garble(source, factor, kernel), target)` over row-stochastic
/// kernels on the factor's own space.
///
/// The optimum is the one-sided garbling deficiency of `source` with respect
/// to `target` at that player; it is zero exactly when the target is a
/// garbling of the source on that side.
pub fn garbling_deficiency(
    source: &JointMeasure,
    target: &JointMeasure,
    factor: usize,
) -> Result<GarblingCertificate> {
    check_pair(source, target)?;
    if factor == 0 || factor >= source.rank() {
        return Err(Error::InvalidInput(format!(
            "garbled factor must be in 1..{}, got {factor}",
            source.rank()
        )));
    }
    let n = source.factor(factor).len();
    let shape = source.shape();
    let cells: usize = shape.iter().product();
    let nk = n * n;
    // Variables: kernel (n x n row-major), then one slack per cell.
    let mut obj = vec![0.0; nk + cells];
    for v in obj.iter_mut().skip(nk) {
        *v = 1.0;
    }
    let mut lp = LinearProgram::new(obj);

    let st = strides(&shape);
    for_each_cell(&shape, |flat, idx| {
        // garbled(cell) = sum_y kernel[y][t] * source[cell with factor -> y]
        let t = idx[factor];
        let base = flat - t * st[factor];
        let mut row = vec![0.0; nk + cells];
        for y in 0..n {
            let m = source.mass()[base + y * st[factor]];
            if m != 0.0 {
                row[y * n + t] = m;
            }
        }
        let tgt = target.mass()[flat];
        let mut neg = row.clone();
        row[nk + flat] = -1.0;
        lp.le(row, tgt);
        for v in neg.iter_mut() {
            *v = -*v;
        }
        neg[nk + flat] = -1.0;
        lp.le(neg, -tgt);
    });
    for y in 0..n {
        let mut row = vec![0.0; nk + cells];
        for t in 0..n {
            row[y * n + t] = 1.0;
        }
        lp.eq(row, 1.0);
    }
    let sol = crate::lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(format!(
            "garbling deficiency program reported {:?}",
            sol.status
        )));
    }
    let kernel = Channel::new(
        source.factor(factor).clone(),
        source.factor(factor).clone(),
        kernel_rows(&sol.primal, 0, n),
    )?;
    Ok(GarblingCertificate {
        deficiency: sol.objective.max(0.0),
        kernels: vec![kernel],
        side: vec![factor],
    })
}

/// Minimize `tv(garble(a, fa, ka), garble(b, fb, kb))` jointly over both
/// row-stochastic kernels. Building block for the value-distance and for
/// garbling-sequence certificates.
fn kernel_pair_tv(
    a: &JointMeasure,
    fa: usize,
    b: &JointMeasure,
    fb: usize,
) -> Result<(f64, Channel, Channel)> {
    check_pair(a, b)?;
    let rank = a.rank();
    if fa == 0 || fa >= rank || fb == 0 || fb >= rank {
        return Err(Error::InvalidInput("kernel factors out of range".into()));
    }
    let na = a.factor(fa).len();
    let nb = b.factor(fb).len();
    let shape = a.shape();
    let cells: usize = shape.iter().product();
    let nka = na * na;
    let nkb = nb * nb;
    // Variables: kernel A, kernel B, slacks.
    let mut obj = vec![0.0; nka + nkb + cells];
    for v in obj.iter_mut().skip(nka + nkb) {
        *v = 1.0;
    }
    let mut lp = LinearProgram::new(obj);
    let st = strides(&shape);
    for_each_cell(&shape, |flat, idx| {
        let mut row = vec![0.0; nka + nkb + cells];
        // + garble(a, fa, ka)(cell)
        let ta = idx[fa];
        let base_a = flat - ta * st[fa];
        for y in 0..na {
            let m = a.mass()[base_a + y * st[fa]];
            if m != 0.0 {
                row[y * na + ta] += m;
            }
        }
        // - garble(b, fb, kb)(cell)
        let tb = idx[fb];
        let base_b = flat - tb * st[fb];
        for y in 0..nb {
            let m = b.mass()[base_b + y * st[fb]];
            if m != 0.0 {
                row[nka + y * nb + tb] -= m;
            }
        }
        let mut neg: Vec<f64> = row.iter().map(|v| -v).collect();
        row[nka + nkb + flat] = -1.0;
        lp.le(row, 0.0);
        neg[nka + nkb + flat] = -1.0;
        lp.le(neg, 0.0);
    });
    for y in 0..na {
        let mut row = vec![0.0; nka + nkb + cells];
        for t in 0..na {
            row[y * na + t] = 1.0;
        }
        lp.eq(row, 1.0);
    }
    for y in 0..nb {
        let mut row = vec![0.0; nka + nkb + cells];
        for t in 0..nb {
            row[nka + y * nb + t] = 1.0;
        }
        lp.eq(row, 1.0);
    }
    let sol = crate::lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(format!(
            "kernel pair program reported {:?}",
            sol.status
        )));
    }
    let ka = Channel::new(
        a.factor(fa).clone(),
        a.factor(fa).clone(),
        kernel_rows(&sol.primal, 0, na),
    )?;
    let kb = Channel::new(
        b.factor(fb).clone(),
        b.factor(fb).clone(),
        kernel_rows(&sol.primal, nka, nb),
    )?;
    Ok((sol.objective.max(0.0), ka, kb))
}

/// Kernel characterization of the zero-sum value-distance between two
/// two-player information structures on common spaces:
/// the larger of `min tv(k1*mu, nu*k2)` and `min tv(mu*k2, k1*nu)`,
/// where `k1*` garbles the minimizer and `*k2` the maximizer.
///
/// Symmetric, nonnegative, zero on identical arguments, and never larger
/// than the plain total variation (identity kernels are feasible). Every
/// bounded game's value difference is a lower bound, which the sampled
/// checks exercise.
pub fn value_distance(mu: &JointMeasure, nu: &JointMeasure) -> Result<f64> {
    check_pair(mu, nu)?;
    if mu.rank() != 3 {
        return Err(Error::Dimension("value_distance needs (state, y1, y2) structures".into()));
    }
    let (term_a, _, _) = kernel_pair_tv(mu, 1, nu, 2)?;
    let (term_b, _, _) = kernel_pair_tv(mu, 2, nu, 1)?;
    Ok(term_a.max(term_b))
}

/// Sampled lower bound for the value-distance: the largest zero-sum value
/// difference over `trials` random games with costs uniform in [-1, 1] and
/// action grids of two or three points.
pub fn sampled_value_gap(
    mu: &JointMeasure,
    nu: &JointMeasure,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    check_pair(mu, nu)?;
    if mu.rank() != 3 {
        return Err(Error::Dimension("sampled_value_gap needs (state, y1, y2) structures".into()));
    }
    let state = mu.factor(0).clone();
    let nx = state.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let nu1 = rng.gen_range(2..=3usize);
        let nu2 = rng.gen_range(2..=3usize);
        let u1 = sample::indexed_space("u1", nu1);
        let u2 = sample::indexed_space("u2", nu2);
        let cost = sample::random_cost(&mut rng, nx * nu1 * nu2, 1.0);
        let game = Game::zero_sum(state.clone(), u1, u2, cost)?;
        let va = zerosum_value(&game, mu)?.value;
        let vb = zerosum_value(&game, nu)?.value;
        worst = worst.max((va - vb).abs());
    }
    Ok(worst)
}

/// Le Cam deficiency of channel `q_mu` with respect to `q_nu` over a common
/// source space: the smallest worst-case-over-states total variation error
/// when simulating `q_nu` by garbling `q_mu`.
pub fn lecam_deficiency(
    source: &Arc<Space>,
    q_mu: &Channel,
    q_nu: &Channel,
) -> Result<GarblingCertificate> {
    if !same_space(q_mu.from_space(), source) || !same_space(q_nu.from_space(), source) {
        return Err(Error::SpaceMismatch("channels must share the source space".into()));
    }
    let nx = source.len();
    let nm = q_mu.to_space().len();
    let nn = q_nu.to_space().len();
    let nk = nm * nn;
    let ns = nx * nn;
    // Variables: kernel (nm x nn), slack s[x][y], epigraph t.
    let nvars = nk + ns + 1;
    let mut obj = vec![0.0; nvars];
    obj[nvars - 1] = 1.0;
    let mut lp = LinearProgram::new(obj);
    for x in 0..nx {
        for y in 0..nn {
            // sum_y' kernel[y'][y] q_mu(y'|x) - q_nu(y|x) within +- s[x][y]
            let mut row = vec![0.0; nvars];
            for yp in 0..nm {
                let w = q_mu.prob(x, yp);
                if w != 0.0 {
                    row[yp * nn + y] = w;
                }
            }
            let mut neg: Vec<f64> = row.iter().map(|v| -v).collect();
            let rhs = q_nu.prob(x, y);
            row[nk + x * nn + y] = -1.0;
            lp.le(row, rhs);
            neg[nk + x * nn + y] = -1.0;
            lp.le(neg, -rhs);
        }
        // sum_y s[x][y] <= t
        let mut row = vec![0.0; nvars];
        for y in 0..nn {
            row[nk + x * nn + y] = 1.0;
        }
        row[nvars - 1] = -1.0;
        lp.le(row, 0.0);
    }
    for yp in 0..nm {
        let mut row = vec![0.0; nvars];
        for y in 0..nn {
            row[yp * nn + y] = 1.0;
        }
        lp.eq(row, 1.0);
    }
    let sol = crate::lp::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(format!(
            "Le Cam deficiency program reported {:?}",
            sol.status
        )));
    }
    let rows: Vec<Vec<f64>> = (0..nm)
        .map(|yp| {
            let mut row: Vec<f64> =
                (0..nn).map(|y| sol.primal[yp * nn + y].max(0.0)).collect();
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                for v in row.iter_mut() {
                    *v /= s;
                }
            } else {
                row[0] = 1.0;
            }
            row
        })
        .collect();
    let kernel = Channel::new(q_mu.to_space().clone(), q_nu.to_space().clone(), rows)?;
    Ok(GarblingCertificate {
        deficiency: sol.objective.max(0.0),
        kernels: vec![kernel],
        side: vec![1],
    })
}

/// Symmetrized Le Cam distance: the larger of the two one-sided deficiencies.
pub fn lecam_distance(source: &Arc<Space>, q_mu: &Channel, q_nu: &Channel) -> Result<f64> {
    let ab = lecam_deficiency(source, q_mu, q_nu)?.deficiency;
    let ba = lecam_deficiency(source, q_nu, q_mu)?.deficiency;
    Ok(ab.max(ba))
}

/// Sampled single-player value distance: the largest optimal-cost difference
/// between `(prior, q_mu)` and `(prior, q_nu)` over random games with costs
/// uniform in [-1, 1]. Never exceeds the Le Cam distance.
pub fn sampled_single_player_gap(
    prior: &Measure,
    q_mu: &Channel,
    q_nu: &Channel,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if !same_space(prior.space(), q_mu.from_space())
        || !same_space(prior.space(), q_nu.from_space())
    {
        return Err(Error::SpaceMismatch("prior and channels must share the source space".into()));
    }
    let nx = prior.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let nu = rng.gen_range(2..=3usize);
        let cost: Vec<Vec<f64>> = (0..nx)
            .map(|_| (0..nu).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .collect();
        let va = single_player_value(prior, q_mu, &cost)?;
        let vb = single_player_value(prior, q_nu, &cost)?;
        worst = worst.max((va - vb).abs());
    }
    Ok(worst)
}

/// Classification of a sequence of information structures by the kernel
/// equations of garbling sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// The maximizer's information degrades step by step (equivalently the
    /// minimizer's improves): each consecutive pair admits kernels with
    /// `garble(next, 1, k1) = garble(prev, 2, k2)`. Zero-sum values are
    /// nonincreasing along such a sequence.
    MaximizerGarbling,
    /// The minimizer's information degrades step by step: kernels with
    /// `garble(next, 2, k2) = garble(prev, 1, k1)` exist. Zero-sum values are
    /// nondecreasing.
    MinimizerGarbling,
    /// Neither kernel equation is feasible at the given tolerance on every
    /// step.
    Unclassified,
}

impl std::fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SequenceKind::MaximizerGarbling => write!(f, "maximizer-garbling"),
            SequenceKind::MinimizerGarbling => write!(f, "minimizer-garbling"),
            SequenceKind::Unclassified => write!(f, "none"),
        }
    }
}

/// Per-step feasibility values for both garbling directions.
#[derive(Debug, Clone)]
pub struct SequenceStepReport {
    pub maximizer_residual: Vec<f64>,
    pub minimizer_residual: Vec<f64>,
    pub kind: SequenceKind,
}

/// Classify a sequence of two-player information structures (fixed prior) as
/// maximizer-garbling, minimizer-garbling, or neither, by solving the
/// per-step kernel feasibility programs. When both directions hold (for
/// example a constant sequence) the maximizer tag takes precedence.
pub fn classify_sequence(seq: &[JointMeasure], tolerance: f64) -> Result<SequenceStepReport> {
    if seq.len() < 2 {
        return Err(Error::InvalidInput("classify_sequence needs at least two structures".into()));
    }
    for j in seq.iter().skip(1) {
        check_pair(&seq[0], j)?;
    }
    if seq[0].rank() != 3 {
        return Err(Error::Dimension("classify_sequence needs (state, y1, y2) structures".into()));
    }
    let prior0 = seq[0].marginal_measure(0)?;
    for (i, j) in seq.iter().enumerate().skip(1) {
        let p = j.marginal_measure(0)?;
        if prior0.tv_distance(&p)? > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "structure {i} has a different state marginal; garbling sequences fix the prior"
            )));
        }
    }

    let steps: Vec<(f64, f64)> = (0..seq.len() - 1)
        .into_par_iter()
        .map(|j| {
            let prev = &seq[j];
            let next = &seq[j + 1];
            // maximizer: garble(next, 1) matches garble(prev, 2)
            let (max_res, _, _) = kernel_pair_tv(next, 1, prev, 2)?;
            // minimizer: garble(next, 2) matches garble(prev, 1)
            let (min_res, _, _) = kernel_pair_tv(next, 2, prev, 1)?;
            Ok((max_res, min_res))
        })
        .collect::<Result<_>>()?;

    let maximizer_residual: Vec<f64> = steps.iter().map(|s| s.0).collect();
    let minimizer_residual: Vec<f64> = steps.iter().map(|s| s.1).collect();
    let kind = if maximizer_residual.iter().all(|&r| r <= tolerance) {
        SequenceKind::MaximizerGarbling
    } else if minimizer_residual.iter().all(|&r| r <= tolerance) {
        SequenceKind::MinimizerGarbling
    } else {
        SequenceKind::Unclassified
    };
    Ok(SequenceStepReport { maximizer_residual, minimizer_residual, kind })
}
