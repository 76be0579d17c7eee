//! Gaussian-noise measurement sequences over a common embedded grid.
//!
//! State uniform on a grid in [0, 1]; each player's measurement grid spans
//! [-4, 5], which covers four unit standard deviations on both sides of the
//! state range and is symmetric about its midpoint 1/2. Channel rows are
//! renormalized Gaussian densities sampled at the grid points: the minimizer
//! at variance 1 + 1/m (improving in m), the maximizer at 1 - 1/(m+1)
//! (degrading in m). Both variances tend to 1, which defines the limit
//! structure, and every step degrades the maximizer's side relative to the
//! minimizer's, so the sequence classifies as maximizer-garbling and zero-sum
//! values fall along it. Truncation and renormalization are the reason the
//! discretized garbling certificates carry a loosened 1e-3 tolerance.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::joint::{join, JointMeasure};
use crate::measure::{Channel, Measure};
use crate::space::Space;

pub const Y_WINDOW: (f64, f64) = (-4.0, 5.0);

fn state_grid(grid_x: usize) -> Result<Arc<Space>> {
    Space::uniform_grid("x", 0.0, 1.0, grid_x)
}

fn measurement_grid(prefix: &str, grid_y: usize) -> Result<Arc<Space>> {
    Space::uniform_grid(prefix, Y_WINDOW.0, Y_WINDOW.1, grid_y)
}

/// Renormalized Gaussian rows with mean at each source point.
pub fn gaussian_channel(
    from: &Arc<Space>,
    to: &Arc<Space>,
    variance: f64,
) -> Result<Channel> {
    if variance <= 0.0 {
        return Err(Error::InvalidInput(format!("variance must be positive, got {variance}")));
    }
    let rows = (0..from.len())
        .map(|i| {
            let mean = from.scalar(i);
            let mut row: Vec<f64> = (0..to.len())
                .map(|k| {
                    let d = to.scalar(k) - mean;
                    (-d * d / (2.0 * variance)).exp()
                })
                .collect();
            let s: f64 = row.iter().sum();
            for v in row.iter_mut() {
                *v /= s;
            }
            row
        })
        .collect();
    Channel::new(from.clone(), to.clone(), rows)
}

fn build(grid_x: usize, grid_y: usize, v1: f64, v2: f64) -> Result<JointMeasure> {
    if grid_x < 2 || grid_y < 2 {
        return Err(Error::InvalidInput("gaussian scenario needs grid sizes >= 2".into()));
    }
    let x = state_grid(grid_x)?;
    let y1 = measurement_grid("y1", grid_y)?;
    let y2 = measurement_grid("y2", grid_y)?;
    let q1 = gaussian_channel(&x, &y1, v1)?;
    let q2 = gaussian_channel(&x, &y2, v2)?;
    join(&Measure::uniform(x), &[&q1, &q2])
}

/// The structure at index m >= 1: minimizer variance 1 + 1/m, maximizer
/// variance 1 - 1/(m+1).
pub fn gen_gaussian_sequence(grid_x: usize, grid_y: usize, m: u32) -> Result<JointMeasure> {
    if m == 0 {
        return Err(Error::InvalidInput("gaussian sequence starts at m = 1".into()));
    }
    let mf = m as f64;
    build(grid_x, grid_y, 1.0 + 1.0 / mf, 1.0 - 1.0 / (mf + 1.0))
}

/// The limit structure: both variances exactly 1.
pub fn gaussian_limit(grid_x: usize, grid_y: usize) -> Result<JointMeasure> {
    build(grid_x, grid_y, 1.0, 1.0)
}
