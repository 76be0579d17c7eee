//! Uniform quantizer refinement: weak convergence without total variation
//! convergence.
//!
//! The state grid holds the midpoints of the finest dyadic partition of
//! [0, 1]. At index m player 1 observes which of 2^m uniform bins the state
//! falls in, encoded as the bin's midpoint coordinate, so refinement moves
//! the support of the measurement inside one common embedded space. Player 2
//! observes nothing. The limit is the fully informative channel y1 = x.
//!
//! Below the grid resolution no bin midpoint coincides with a state point,
//! so the joint sits on disjoint support from the limit and total variation
//! stays at 2, while the transported mass never travels farther than half a
//! bin, so Wasserstein-1 falls like 2^-m.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::joint::JointMeasure;
use crate::space::Space;

fn log2_exact(n: usize) -> Option<u32> {
    if n.is_power_of_two() {
        Some(n.trailing_zeros())
    } else {
        None
    }
}

fn state_points(grid_x: usize) -> Vec<f64> {
    (0..grid_x).map(|k| (k as f64 + 0.5) / grid_x as f64).collect()
}

/// All dyadic bin midpoints (i + 1/2) / 2^j for levels j = 0..=L, ascending.
fn measurement_points(levels: u32) -> Vec<f64> {
    let mut pts = Vec::new();
    for j in 0..=levels {
        let bins = 1usize << j;
        for i in 0..bins {
            pts.push((i as f64 + 0.5) / bins as f64);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

fn spaces(grid_x: usize) -> Result<(Arc<Space>, Arc<Space>, Arc<Space>)> {
    let levels = log2_exact(grid_x)
        .ok_or_else(|| Error::InvalidInput(format!("grid_x must be a power of two, got {grid_x}")))?;
    let x = Space::line("x", &state_points(grid_x))?;
    let y1 = Space::line("y", &measurement_points(levels))?;
    let y2 = Space::singleton("y2", 0.0);
    Ok((x, y1, y2))
}

fn build(grid_x: usize, bins: usize) -> Result<JointMeasure> {
    let (x, y1, y2) = spaces(grid_x)?;
    let mut mass = vec![0.0; x.len() * y1.len()];
    for k in 0..x.len() {
        let xv = x.scalar(k);
        let bin = ((xv * bins as f64) as usize).min(bins - 1);
        let mid = (bin as f64 + 0.5) / bins as f64;
        // Dyadic midpoints are exact in binary floating point.
        let yi = y1
            .coords()
            .iter()
            .position(|c| c[0] == mid)
            .expect("bin midpoint is in the measurement grid");
        mass[k * y1.len() + yi] = 1.0 / grid_x as f64;
    }
    let total: f64 = mass.iter().sum();
    for v in mass.iter_mut() {
        *v /= total;
    }
    JointMeasure::new(vec![x, y1, y2], mass)
}

/// The structure at index m: 2^m uniform bins, 2^m <= grid_x.
pub fn gen_quantizer_refinement(m: u32, grid_x: usize) -> Result<JointMeasure> {
    let levels = log2_exact(grid_x)
        .ok_or_else(|| Error::InvalidInput(format!("grid_x must be a power of two, got {grid_x}")))?;
    if m > levels {
        return Err(Error::InvalidInput(format!(
            "2^{m} bins exceed the {grid_x}-point state grid"
        )));
    }
    build(grid_x, 1usize << m)
}

/// The fully informative limit: y1 = x.
pub fn quantizer_limit(grid_x: usize) -> Result<JointMeasure> {
    build(grid_x, grid_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::joint_wasserstein1;

    #[test]
    fn finest_index_equals_limit() {
        let j = gen_quantizer_refinement(3, 8).unwrap();
        let lim = quantizer_limit(8).unwrap();
        assert_eq!(j.mass(), lim.mass());
    }

    #[test]
    fn w1_within_bin_width_and_tv_stuck_at_two() {
        let grid_x = 16;
        let lim = quantizer_limit(grid_x).unwrap();
        let mut last_w1 = f64::INFINITY;
        for m in 1..=4u32 {
            let j = gen_quantizer_refinement(m, grid_x).unwrap();
            let w1 = joint_wasserstein1(&j, &lim).unwrap();
            assert!(
                w1 <= (0.5f64).powi(m as i32) + 1e-12,
                "w1 {w1} above bin width at m = {m}"
            );
            assert!(w1 < last_w1);
            last_w1 = w1;
            let tv = j.tv_distance(&lim).unwrap();
            if m < 4 {
                // below the grid resolution every state point sits in a bin
                // whose midpoint is not a state point
                assert!((tv - 2.0).abs() < 1e-12, "tv {tv} at m = {m}");
            } else {
                assert_eq!(tv, 0.0);
            }
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(gen_quantizer_refinement(2, 12).is_err());
        assert!(gen_quantizer_refinement(5, 16).is_err());
    }
}
