use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{same_space, Space};

/// Tolerance for mass/row normalization checks.
pub const NORM_TOL: f64 = 1e-12;

fn check_weights(w: &[f64], what: &str) -> Result<()> {
    for (i, &v) in w.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidMeasure(format!("{what}: non-finite weight at {i}")));
        }
        if v < 0.0 {
            return Err(Error::InvalidMeasure(format!("{what}: negative weight {v} at {i}")));
        }
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidMeasure(format!("{what}: weights sum to {s}, expected 1")));
    }
    Ok(())
}

/// A probability measure on a finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    space: Arc<Space>,
    mass: Vec<f64>,
}

impl Measure {
    pub fn new(space: Arc<Space>, mass: Vec<f64>) -> Result<Measure> {
        if mass.len() != space.len() {
            return Err(Error::Dimension(format!(
                "measure has {} weights on a {}-point space",
                mass.len(),
                space.len()
            )));
        }
        check_weights(&mass, "measure")?;
        Ok(Measure { space, mass })
    }

    pub fn uniform(space: Arc<Space>) -> Measure {
        let n = space.len();
        Measure { mass: vec![1.0 / n as f64; n], space }
    }

    pub fn point_mass(space: Arc<Space>, at: usize) -> Result<Measure> {
        if at >= space.len() {
            return Err(Error::Dimension(format!("point {at} outside space of size {}", space.len())));
        }
        let mut mass = vec![0.0; space.len()];
        mass[at] = 1.0;
        Ok(Measure { space, mass })
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn at(&self, i: usize) -> f64 {
        self.mass[i]
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Total variation distance, paper convention: sum of absolute
    /// differences, maximum value 2.
    pub fn tv_distance(&self, other: &Measure) -> Result<f64> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch("tv_distance of measures on different spaces".into()));
        }
        Ok(self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (a - b).abs())
            .sum())
    }

    /// Expectation of a per-point function.
    pub fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.mass.iter().enumerate().map(|(i, &m)| m * f(i)).sum()
    }
}

/// A row-stochastic kernel between two finite spaces: one probability row per
/// source point.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    from: Arc<Space>,
    to: Arc<Space>,
    rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(from: Arc<Space>, to: Arc<Space>, rows: Vec<Vec<f64>>) -> Result<Channel> {
        if rows.len() != from.len() {
            return Err(Error::Dimension(format!(
                "channel has {} rows for a {}-point source",
                rows.len(),
                from.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != to.len() {
                return Err(Error::Dimension(format!(
                    "channel row {} has {} entries for a {}-point target",
                    i,
                    row.len(),
                    to.len()
                )));
            }
            check_weights(row, &format!("channel row {i}"))?;
        }
        Ok(Channel { from, to, rows })
    }

    /// The identity kernel on a space.
    pub fn identity(space: Arc<Space>) -> Channel {
        let n = space.len();
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0.0; n];
                r[i] = 1.0;
                r
            })
            .collect();
        Channel { from: space.clone(), to: space, rows }
    }

    /// The kernel whose every row equals `output`: the target becomes
    /// independent of the source.
    pub fn constant(from: Arc<Space>, output: Measure) -> Channel {
        let rows = vec![output.mass().to_vec(); from.len()];
        Channel { from, to: output.space().clone(), rows }
    }

    /// Every row uniform on the target.
    pub fn uninformative(from: Arc<Space>, to: Arc<Space>) -> Channel {
        let n = to.len();
        let rows = vec![vec![1.0 / n as f64; n]; from.len()];
        Channel { from, to, rows }
    }

    pub fn from_space(&self) -> &Arc<Space> {
        &self.from
    }

    pub fn to_space(&self) -> &Arc<Space> {
        &self.to
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.rows[from][to]
    }

    /// Kernel composition: first `self`, then `next`.
    pub fn compose(&self, next: &Channel) -> Result<Channel> {
        if !same_space(&self.to, &next.from) {
            return Err(Error::SpaceMismatch("composing kernels over mismatched middle space".into()));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = vec![0.0; next.to.len()];
                for (mid, &w) in r.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    for (k, &v) in next.rows[mid].iter().enumerate() {
                        out[k] += w * v;
                    }
                }
                out
            })
            .collect();
        Channel::new(self.from.clone(), next.to.clone(), rows)
    }

    /// Push a measure through the kernel: the output distribution.
    pub fn push(&self, input: &Measure) -> Result<Measure> {
        if !same_space(&self.from, input.space()) {
            return Err(Error::SpaceMismatch("pushing a measure through a kernel with a different source".into()));
        }
        let mut out = vec![0.0; self.to.len()];
        for (i, &m) in input.mass().iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (k, &v) in self.rows[i].iter().enumerate() {
                out[k] += m * v;
            }
        }
        // Renormalize away last-bit float drift so downstream validation holds.
        let s: f64 = out.iter().sum();
        if s > 0.0 {
            for v in out.iter_mut() {
                *v /= s;
            }
        }
        Measure::new(self.to.clone(), out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary() -> Arc<Space> {
        Space::line("b", &[0.0, 1.0]).unwrap()
    }

    #[test]
    fn measure_must_normalize() {
        let s = binary();
        assert!(Measure::new(s.clone(), vec![0.5, 0.4]).is_err());
        assert!(Measure::new(s.clone(), vec![-0.1, 1.1]).is_err());
        assert!(Measure::new(s, vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn tv_examples() {
        let s = binary();
        let p = Measure::new(s.clone(), vec![0.5, 0.5]).unwrap();
        let q = Measure::new(s.clone(), vec![1.0, 0.0]).unwrap();
        assert_eq!(p.tv_distance(&p).unwrap(), 0.0);
        assert!((p.tv_distance(&q).unwrap() - 1.0).abs() < 1e-15);
        let a = Measure::point_mass(s.clone(), 0).unwrap();
        let b = Measure::point_mass(s, 1).unwrap();
        assert_eq!(a.tv_distance(&b).unwrap(), 2.0);
    }

    #[test]
    fn channel_rows_must_be_stochastic() {
        let s = binary();
        assert!(Channel::new(s.clone(), s.clone(), vec![vec![0.9, 0.2], vec![0.5, 0.5]]).is_err());
        assert!(Channel::new(s.clone(), s.clone(), vec![vec![0.9, 0.1], vec![0.5, 0.5]]).is_ok());
    }

    #[test]
    fn compose_matches_hand_product() {
        let s = binary();
        let a = Channel::new(s.clone(), s.clone(), vec![vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
        let b = Channel::new(s.clone(), s.clone(), vec![vec![0.6, 0.4], vec![0.1, 0.9]]).unwrap();
        let c = a.compose(&b).unwrap();
        // row 0: 0.8*(0.6,0.4) + 0.2*(0.1,0.9) = (0.50, 0.50)
        assert!((c.prob(0, 0) - 0.50).abs() < 1e-15);
        assert!((c.prob(0, 1) - 0.50).abs() < 1e-15);
        // row 1: 0.3*(0.6,0.4) + 0.7*(0.1,0.9) = (0.25, 0.75)
        assert!((c.prob(1, 0) - 0.25).abs() < 1e-15);
        assert!((c.prob(1, 1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn identity_push_is_identity() {
        let s = binary();
        let p = Measure::new(s.clone(), vec![0.25, 0.75]).unwrap();
        let out = Channel::identity(s).push(&p).unwrap();
        assert_eq!(out.mass(), p.mass());
    }
}
