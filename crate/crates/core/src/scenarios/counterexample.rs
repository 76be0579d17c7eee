//! The non-zero-sum counterexample: a three-bin quantizer whose boundary
//! drift makes one player's value jump in the limit.
//!
//! State uniform on [-1, 1]; player 1 observes a three-bin quantizer with
//! thresholds -1/2 - 1/(8m) and 1/2 + 1/(4m); player 2 observes nothing.
//! Player 1 pays (x - u1)^2 - u2^2 and plays the conditional mean of his bin.
//! Player 2 pays u2^2 when u1 = 0 and (u2 - 1)^2 otherwise, so her best reply
//! to P(u1 = 0) = p is u2 = 1 - p at cost p(1 - p).
//!
//! Everything here is closed-form interval arithmetic, not a grid: player
//! 2's cost is discontinuous in the event u1 = 0 and grid noise would smear
//! the indicator. At every finite m the middle-bin mean is 1/(16m), never 0,
//! so p = 0, u2 = 1, and player 2's cost is 0; at the limit the middle bin is
//! symmetric, p = 1/2, u2 = 1/2, and her cost is 1/4. Total variation of the
//! joint still goes to 0 like 3/(8m): only boundary mass moves between the
//! three fixed measurement labels.

use crate::error::{Error, Result};
use crate::joint::JointMeasure;
use crate::space::Space;

/// A three-bin quantizer of [-1, 1], uniform prior, in exact interval form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerBins {
    /// Increasing edges [-1, e1, e2, 1].
    pub edges: [f64; 4],
}

impl QuantizerBins {
    /// Bin probability masses under the uniform prior on [-1, 1]
    /// (length / 2).
    pub fn masses(&self) -> [f64; 3] {
        [
            (self.edges[1] - self.edges[0]) / 2.0,
            (self.edges[2] - self.edges[1]) / 2.0,
            (self.edges[3] - self.edges[2]) / 2.0,
        ]
    }

    /// Conditional means: interval midpoints.
    pub fn means(&self) -> [f64; 3] {
        [
            (self.edges[0] + self.edges[1]) / 2.0,
            (self.edges[1] + self.edges[2]) / 2.0,
            (self.edges[2] + self.edges[3]) / 2.0,
        ]
    }

    /// E[(x - E[x|bin])^2]: mass-weighted uniform-interval variances,
    /// which is sum of length^3 / 24.
    pub fn expected_conditional_variance(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            let len = self.edges[i + 1] - self.edges[i];
            acc += len * len * len / 24.0;
        }
        acc
    }

    /// Probability that player 1's conditional-mean policy plays exactly 0.
    pub fn prob_action_zero(&self) -> f64 {
        let masses = self.masses();
        self.means()
            .iter()
            .zip(masses)
            .filter(|(mean, _)| **mean == 0.0)
            .map(|(_, mass)| mass)
            .sum()
    }
}

/// The quantizer at index m >= 1: thresholds -1/2 - 1/(8m) and 1/2 + 1/(4m).
pub fn gen_counterexample_sequence(m: u32) -> Result<QuantizerBins> {
    if m == 0 {
        return Err(Error::InvalidInput("counterexample index starts at m = 1".into()));
    }
    let m = m as f64;
    Ok(QuantizerBins {
        edges: [-1.0, -0.5 - 1.0 / (8.0 * m), 0.5 + 1.0 / (4.0 * m), 1.0],
    })
}

/// The limit quantizer: bins [-1, -1/2), [-1/2, 1/2], (1/2, 1].
pub fn counterexample_limit_bins() -> QuantizerBins {
    QuantizerBins { edges: [-1.0, -0.5, 0.5, 1.0] }
}

/// One row of the counterexample table. Distances are closed-form: the two
/// quantizers disagree on the boundary strips, whose mass under the uniform
/// prior is 3/(16m); total variation doubles it and Wasserstein-1 moves it
/// one measurement label over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleRow {
    /// None marks the limit row.
    pub index: Option<u32>,
    pub tv_to_limit: f64,
    pub w1_to_limit: f64,
    /// Player 1's expected cost at the equilibrium profile.
    pub p1_value: f64,
    /// Player 2's expected cost.
    pub p2_value: f64,
    /// Player 2's best reply u2 = 1 - P(u1 = 0).
    pub p2_action: f64,
    /// |p2_value - limit p2_value|.
    pub p2_gap: f64,
}

fn row_for(bins: &QuantizerBins, index: Option<u32>, limit: &QuantizerBins) -> CounterexampleRow {
    let p = bins.prob_action_zero();
    let p2_action = 1.0 - p;
    let p2_value = p * (1.0 - p);
    let p1_value = bins.expected_conditional_variance() - p2_action * p2_action;
    let limit_p2 = {
        let lp = limit.prob_action_zero();
        lp * (1.0 - lp)
    };
    // Disagreement strips between the two quantizers.
    let disagree_mass = ((bins.edges[1] - limit.edges[1]).abs()
        + (bins.edges[2] - limit.edges[2]).abs())
        / 2.0;
    CounterexampleRow {
        index,
        tv_to_limit: 2.0 * disagree_mass,
        w1_to_limit: disagree_mass,
        p1_value,
        p2_value,
        p2_action,
        p2_gap: (p2_value - limit_p2).abs(),
    }
}

/// Per-index rows for the counterexample plus the limit row.
pub fn run_counterexample(indices: &[u32]) -> Result<Vec<CounterexampleRow>> {
    let limit = counterexample_limit_bins();
    let mut rows = Vec::with_capacity(indices.len() + 1);
    for &m in indices {
        let bins = gen_counterexample_sequence(m)?;
        rows.push(row_for(&bins, Some(m), &limit));
    }
    rows.push(row_for(&limit, None, &limit));
    Ok(rows)
}

/// Finite embedding of the index-m joint against the limit joint: the state
/// is split along the union of both quantizers' bin edges (five cells, each
/// carrying its midpoint coordinate), measurements keep the three labels at
/// coordinates 1, 2, 3. Useful for exercising the transport and TV paths on
/// this scenario.
pub fn discretized_pair(m: u32) -> Result<(JointMeasure, JointMeasure)> {
    let bins = gen_counterexample_sequence(m)?;
    let limit = counterexample_limit_bins();
    let mut edges: Vec<f64> = bins.edges.iter().chain(limit.edges.iter()).copied().collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let cells = edges.len() - 1;
    let mids: Vec<f64> = (0..cells).map(|i| (edges[i] + edges[i + 1]) / 2.0).collect();
    let x = Space::line("x", &mids)?;
    let y1 = Space::line("y", &[1.0, 2.0, 3.0])?;
    let y2 = Space::singleton("y2", 0.0);

    let build = |quant: &QuantizerBins| -> Result<JointMeasure> {
        let mut mass = vec![0.0; cells * 3];
        for i in 0..cells {
            let mid = mids[i];
            let len = edges[i + 1] - edges[i];
            let bin = if mid < quant.edges[1] {
                0
            } else if mid <= quant.edges[2] {
                1
            } else {
                2
            };
            mass[i * 3 + bin] = len / 2.0;
        }
        // Absorb the float defect of summed lengths.
        let total: f64 = mass.iter().sum();
        for v in mass.iter_mut() {
            *v /= total;
        }
        JointMeasure::new(vec![x.clone(), y1.clone(), y2.clone()], mass)
    };
    Ok((build(&bins)?, build(&limit)?))
}
