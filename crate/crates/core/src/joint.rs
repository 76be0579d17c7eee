use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::{Channel, Measure, NORM_TOL};
use crate::space::{same_space, Space};

/// Row-major strides for a tensor shape.
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

/// Iterate all multi-indices of a shape in row-major order, calling `f` with
/// (flat index, multi-index).
pub(crate) fn for_each_cell(shape: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = shape.iter().product();
    let mut idx = vec![0usize; shape.len()];
    for flat in 0..total {
        f(flat, &idx);
        for d in (0..shape.len()).rev() {
            idx[d] += 1;
            if idx[d] < shape[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// How `disintegrate` treats conditioning points with zero marginal mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullRows {
    /// Zero-mass conditioning points are an error.
    Fail,
    /// Zero-mass conditioning points get a uniform default row.
    Uniform,
}

/// A probability tensor over a product of finite metric spaces.
///
/// Convention: factor 0 is the state space, factor i >= 1 is player i's
/// measurement space. The tensor is stored flat in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMeasure {
    factors: Vec<Arc<Space>>,
    mass: Vec<f64>,
}

impl JointMeasure {
    pub fn new(factors: Vec<Arc<Space>>, mass: Vec<f64>) -> Result<JointMeasure> {
        if factors.is_empty() {
            return Err(Error::Dimension("joint measure needs at least one factor".into()));
        }
        let total: usize = factors.iter().map(|s| s.len()).product();
        if mass.len() != total {
            return Err(Error::Dimension(format!(
                "joint mass has {} entries for shape of size {}",
                mass.len(),
                total
            )));
        }
        let mut sum = 0.0;
        for (i, &v) in mass.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidMeasure(format!("joint: non-finite mass at cell {i}")));
            }
            if v < 0.0 {
                return Err(Error::InvalidMeasure(format!("joint: negative mass {v} at cell {i}")));
            }
            sum += v;
        }
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidMeasure(format!("joint mass sums to {sum}, expected 1")));
        }
        Ok(JointMeasure { factors, mass })
    }

    pub fn factors(&self) -> &[Arc<Space>] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Arc<Space> {
        &self.factors[i]
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(|s| s.len()).collect()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let st = strides(&self.shape());
        idx.iter().zip(&st).map(|(i, s)| i * s).sum()
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.mass[self.flat_index(idx)]
    }

    /// True when both joints share factor spaces pointwise.
    pub fn same_factors(&self, other: &JointMeasure) -> bool {
        self.factors.len() == other.factors.len()
            && self
                .factors
                .iter()
                .zip(&other.factors)
                .all(|(a, b)| same_space(a, b))
    }

    /// Total variation distance, paper convention (maximum value 2).
    pub fn tv_distance(&self, other: &JointMeasure) -> Result<f64> {
        if !self.same_factors(other) {
            return Err(Error::SpaceMismatch("tv_distance of joints on different factor spaces".into()));
        }
        Ok(self
            .mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (a - b).abs())
            .sum())
    }

    /// Sum the tensor down to the given factors, in the order given.
    ///
    /// Indices must be distinct and in range; the result is a joint over the
    /// kept factors with the same total mass.
    pub fn marginal(&self, keep: &[usize]) -> Result<JointMeasure> {
        if keep.is_empty() {
            return Err(Error::InvalidInput("marginal needs a non-empty factor set".into()));
        }
        let rank = self.rank();
        let mut seen = vec![false; rank];
        for &k in keep {
            if k >= rank {
                return Err(Error::InvalidInput(format!("marginal factor {k} out of range (rank {rank})")));
            }
            if seen[k] {
                return Err(Error::InvalidInput(format!("marginal factor {k} repeated")));
            }
            seen[k] = true;
        }
        let out_factors: Vec<Arc<Space>> = keep.iter().map(|&k| self.factors[k].clone()).collect();
        let out_shape: Vec<usize> = out_factors.iter().map(|s| s.len()).collect();
        let out_strides = strides(&out_shape);
        let mut out = vec![0.0; out_shape.iter().product()];
        for_each_cell(&self.shape(), |flat, idx| {
            let m = self.mass[flat];
            if m == 0.0 {
                return;
            }
            let o: usize = keep
                .iter()
                .zip(&out_strides)
                .map(|(&k, s)| idx[k] * s)
                .sum();
            out[o] += m;
        });
        JointMeasure::new(out_factors, out)
    }

    /// Single-factor marginal as a plain measure.
    pub fn marginal_measure(&self, factor: usize) -> Result<Measure> {
        let j = self.marginal(&[factor])?;
        Measure::new(j.factors[0].clone(), j.mass)
    }

    /// Recover the conditional kernel of `target` given `given`.
    ///
    /// Joining the `given` marginal with the result reproduces the
    /// (given, target) bivariate marginal. `null_rows` decides what happens at
    /// conditioning points of zero mass.
    pub fn disintegrate(&self, given: usize, target: usize, null_rows: NullRows) -> Result<Channel> {
        if given == target {
            return Err(Error::InvalidInput("disintegrate needs distinct factors".into()));
        }
        let bi = self.marginal(&[given, target])?;
        let ng = self.factors[given].len();
        let nt = self.factors[target].len();
        let mut rows = Vec::with_capacity(ng);
        for g in 0..ng {
            let slice: Vec<f64> = (0..nt).map(|t| bi.mass[g * nt + t]).collect();
            let s: f64 = slice.iter().sum();
            if s <= 0.0 {
                match null_rows {
                    NullRows::Fail => {
                        return Err(Error::DegenerateConditioning(format!(
                            "factor {given} has zero mass at point {g} and no default row was requested"
                        )))
                    }
                    NullRows::Uniform => rows.push(vec![1.0 / nt as f64; nt]),
                }
            } else {
                rows.push(slice.into_iter().map(|v| v / s).collect());
            }
        }
        Channel::new(self.factors[given].clone(), self.factors[target].clone(), rows)
    }

    /// Replace player factor `player` (>= 1) by pushing it through `kernel`.
    ///
    /// The marginal over all other factors is preserved exactly.
    pub fn garble(&self, player: usize, kernel: &Channel) -> Result<JointMeasure> {
        if player == 0 || player >= self.rank() {
            return Err(Error::InvalidInput(format!(
                "garble player factor must be in 1..{}, got {player}",
                self.rank()
            )));
        }
        if !same_space(kernel.from_space(), &self.factors[player]) {
            return Err(Error::SpaceMismatch(format!(
                "garbling kernel source does not match factor {player}"
            )));
        }
        let mut out_factors = self.factors.clone();
        out_factors[player] = kernel.to_space().clone();
        let out_shape: Vec<usize> = out_factors.iter().map(|s| s.len()).collect();
        let out_strides = strides(&out_shape);
        let in_shape = self.shape();
        let mut out = vec![0.0; out_shape.iter().product()];
        for_each_cell(&in_shape, |flat, idx| {
            let m = self.mass[flat];
            if m == 0.0 {
                return;
            }
            let base: usize = idx
                .iter()
                .enumerate()
                .filter(|(d, _)| *d != player)
                .map(|(d, &i)| i * out_strides[d])
                .sum();
            let row = kernel.row(idx[player]);
            for (b, &w) in row.iter().enumerate() {
                if w != 0.0 {
                    out[base + b * out_strides[player]] += m * w;
                }
            }
        });
        JointMeasure::new(out_factors, out)
    }

    /// Expectation of a per-cell function.
    pub fn expect(&self, mut f: impl FnMut(&[usize]) -> f64) -> f64 {
        let mut acc = 0.0;
        for_each_cell(&self.shape(), |flat, idx| {
            let m = self.mass[flat];
            if m != 0.0 {
                acc += m * f(idx);
            }
        });
        acc
    }
}

/// Join a prior with one independent channel per player:
/// mass(x, y1, ..., yn) = prior(x) * prod_i Q_i(y_i | x).
///
/// The state marginal of the result equals the prior exactly.
pub fn join(prior: &Measure, channels: &[&Channel]) -> Result<JointMeasure> {
    for (i, ch) in channels.iter().enumerate() {
        if !same_space(ch.from_space(), prior.space()) {
            return Err(Error::SpaceMismatch(format!(
                "channel {i} source does not match the prior's space"
            )));
        }
    }
    let mut factors: Vec<Arc<Space>> = vec![prior.space().clone()];
    factors.extend(channels.iter().map(|c| c.to_space().clone()));
    let shape: Vec<usize> = factors.iter().map(|s| s.len()).collect();
    let mut mass = vec![0.0; shape.iter().product()];
    let st = strides(&shape);
    let nx = prior.len();
    for x in 0..nx {
        let px = prior.at(x);
        if px == 0.0 {
            continue;
        }
        // Recursive product over channels, iteratively via odometer.
        let sub_shape = &shape[1..];
        for_each_cell(sub_shape, |_, ys| {
            let mut w = px;
            for (i, &y) in ys.iter().enumerate() {
                w *= channels[i].prob(x, y);
                if w == 0.0 {
                    return;
                }
            }
            let flat: usize = x * st[0] + ys.iter().zip(&st[1..]).map(|(y, s)| y * s).sum::<usize>();
            mass[flat] += w;
        });
    }
    // Rescale the defect of float products onto the whole tensor so the
    // normalization invariant holds bit-tight.
    let total: f64 = mass.iter().sum();
    if (total - 1.0).abs() > NORM_TOL && total > 0.0 {
        for v in mass.iter_mut() {
            *v /= total;
        }
    }
    JointMeasure::new(factors, mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Space;

    fn binary(prefix: &str) -> Arc<Space> {
        Space::line(prefix, &[0.0, 1.0]).unwrap()
    }

    fn demo_joint() -> JointMeasure {
        // prior (0.25, 0.75), channel rows (0.9, 0.1) / (0.2, 0.8)
        let x = binary("x");
        let y = binary("y");
        let prior = Measure::new(x.clone(), vec![0.25, 0.75]).unwrap();
        let q = Channel::new(x, y, vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap();
        join(&prior, &[&q]).unwrap()
    }

    #[test]
    fn join_identity_channel() {
        let x = binary("x");
        let prior = Measure::new(x.clone(), vec![0.5, 0.5]).unwrap();
        let q = Channel::identity(x);
        let j = join(&prior, &[&q]).unwrap();
        assert_eq!(j.at(&[0, 0]), 0.5);
        assert_eq!(j.at(&[1, 1]), 0.5);
        assert_eq!(j.at(&[0, 1]), 0.0);
        assert_eq!(j.at(&[1, 0]), 0.0);
    }

    #[test]
    fn join_uninformative_channel() {
        let x = binary("x");
        let y = binary("y");
        let prior = Measure::new(x.clone(), vec![0.5, 0.5]).unwrap();
        let q = Channel::new(x, y, vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let j = join(&prior, &[&q]).unwrap();
        for v in j.mass() {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn join_hand_computed() {
        let j = demo_joint();
        let want = [0.225, 0.025, 0.15, 0.6];
        for (a, b) in j.mass().iter().zip(&want) {
            assert!((a - b).abs() < 1e-15);
        }
        // state marginal equals the prior exactly
        let mx = j.marginal_measure(0).unwrap();
        assert!((mx.at(0) - 0.25).abs() < 1e-15);
        assert!((mx.at(1) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn marginal_examples() {
        let j = demo_joint();
        // keep factor 1: column sums
        let m1 = j.marginal(&[1]).unwrap();
        assert!((m1.mass()[0] - 0.375).abs() < 1e-15);
        assert!((m1.mass()[1] - 0.625).abs() < 1e-15);
        // keep all factors: identity
        let all = j.marginal(&[0, 1]).unwrap();
        assert_eq!(all.mass(), j.mass());
        // empty or invalid sets
        assert!(j.marginal(&[]).is_err());
        assert!(j.marginal(&[2]).is_err());
        assert!(j.marginal(&[0, 0]).is_err());
    }

    #[test]
    fn disintegrate_recovers_channel() {
        let j = demo_joint();
        let q = j.disintegrate(0, 1, NullRows::Fail).unwrap();
        assert!((q.prob(0, 0) - 0.9).abs() < 1e-12);
        assert!((q.prob(0, 1) - 0.1).abs() < 1e-12);
        assert!((q.prob(1, 0) - 0.2).abs() < 1e-12);
        assert!((q.prob(1, 1) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn disintegrate_independent_product_gives_constant_rows() {
        let x = binary("x");
        let y = binary("y");
        let prior = Measure::new(x.clone(), vec![0.5, 0.5]).unwrap();
        let q = Channel::new(x, y, vec![vec![0.3, 0.7], vec![0.3, 0.7]]).unwrap();
        let j = join(&prior, &[&q]).unwrap();
        let d = j.disintegrate(0, 1, NullRows::Fail).unwrap();
        for r in d.rows() {
            assert!((r[0] - 0.3).abs() < 1e-12);
            assert!((r[1] - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn disintegrate_null_row_policy() {
        let x = binary("x");
        let y = binary("y");
        let prior = Measure::point_mass(x.clone(), 0).unwrap();
        let q = Channel::new(x, y, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let j = join(&prior, &[&q]).unwrap();
        assert!(matches!(
            j.disintegrate(0, 1, NullRows::Fail),
            Err(Error::DegenerateConditioning(_))
        ));
        let d = j.disintegrate(0, 1, NullRows::Uniform).unwrap();
        assert_eq!(d.row(1), &[0.5, 0.5]);
    }

    #[test]
    fn garble_identity_and_total() {
        let j = demo_joint();
        let y = j.factor(1).clone();
        let id = Channel::identity(y.clone());
        let g = j.garble(1, &id).unwrap();
        assert_eq!(g.mass(), j.mass());

        let q = Measure::new(y.clone(), vec![0.4, 0.6]).unwrap();
        let total = Channel::constant(y, q);
        let g = j.garble(1, &total).unwrap();
        // factor 1 independent with marginal q, state marginal preserved
        let my = g.marginal_measure(1).unwrap();
        assert!((my.at(0) - 0.4).abs() < 1e-12);
        assert!((my.at(1) - 0.6).abs() < 1e-12);
        let mx = g.marginal_measure(0).unwrap();
        assert!((mx.at(0) - 0.25).abs() < 1e-15);
        for xi in 0..2 {
            for yi in 0..2 {
                let px = mx.at(xi);
                assert!((g.at(&[xi, yi]) - px * my.at(yi)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn garble_hand_computed() {
        // fully informative binary joint, uniform prior
        let x = binary("x");
        let y = binary("y");
        let prior = Measure::new(x.clone(), vec![0.5, 0.5]).unwrap();
        let q = Channel::new(x, y.clone(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let j = join(&prior, &[&q]).unwrap();
        let k = Channel::new(y.clone(), y, vec![vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
        let g = j.garble(1, &k).unwrap();
        let want = [0.4, 0.1, 0.15, 0.35];
        for (a, b) in g.mass().iter().zip(&want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn garble_rejects_state_factor_and_mismatched_kernel() {
        let j = demo_joint();
        let id_x = Channel::identity(j.factor(0).clone());
        assert!(j.garble(0, &id_x).is_err());
        let other = Space::line("z", &[0.0, 1.0, 2.0]).unwrap();
        let k = Channel::uninformative(other, binary("y"));
        assert!(j.garble(1, &k).is_err());
    }
}
