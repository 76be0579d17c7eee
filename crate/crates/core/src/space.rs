use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite point set with labels and an embedding into real coordinates.
///
/// The embedding gives every space two usable notions of closeness: total
/// variation (which ignores coordinates) and Wasserstein-1 (which uses the
/// Euclidean distance between coordinate tuples).
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    labels: Vec<String>,
    coords: Vec<Vec<f64>>,
}

impl Space {
    /// Build a space from labels and per-point coordinate tuples.
    ///
    /// Labels must be distinct and non-empty; coordinate tuples must all have
    /// the same dimension d >= 1 and finite entries.
    pub fn new(labels: Vec<String>, coords: Vec<Vec<f64>>) -> Result<Arc<Space>> {
        if labels.is_empty() {
            return Err(Error::InvalidInput("space must have at least one point".into()));
        }
        if labels.len() != coords.len() {
            return Err(Error::Dimension(format!(
                "{} labels but {} coordinate tuples",
                labels.len(),
                coords.len()
            )));
        }
        let dim = coords[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("coordinate dimension must be >= 1".into()));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(Error::Dimension(format!(
                    "point {} has coordinate dimension {} != {}",
                    i,
                    c.len(),
                    dim
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("point {} has a non-finite coordinate", i)));
            }
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::InvalidInput("space labels must be distinct".into()));
        }
        Ok(Arc::new(Space { labels, coords }))
    }

    /// A 1-D space whose points sit at the given coordinates. Labels are
    /// `<prefix>0, <prefix>1, ...`.
    pub fn line(prefix: &str, points: &[f64]) -> Result<Arc<Space>> {
        let labels = (0..points.len()).map(|i| format!("{prefix}{i}")).collect();
        let coords = points.iter().map(|&x| vec![x]).collect();
        Space::new(labels, coords)
    }

    /// A uniform grid of `n` points spanning `[a, b]` inclusive (n >= 2),
    /// or the single midpoint when n == 1.
    pub fn uniform_grid(prefix: &str, a: f64, b: f64, n: usize) -> Result<Arc<Space>> {
        if n == 0 {
            return Err(Error::InvalidInput("grid needs at least one point".into()));
        }
        let pts: Vec<f64> = if n == 1 {
            vec![0.5 * (a + b)]
        } else {
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        };
        Space::line(prefix, &pts)
    }

    /// A one-point space (used for players with trivial measurements).
    pub fn singleton(label: &str, coord: f64) -> Arc<Space> {
        Space::new(vec![label.to_string()], vec![vec![coord]]).expect("singleton is always valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.coords[0].len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    /// First coordinate of point `i`; the usual accessor for 1-D grids.
    pub fn scalar(&self, i: usize) -> f64 {
        self.coords[i][0]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Euclidean distance between points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.coords[i]
            .iter()
            .zip(&self.coords[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                d = d.max(self.distance(i, j));
            }
        }
        d
    }
}

/// Two space handles refer to the same space if they are pointer-identical or
/// structurally equal.
pub fn same_space(a: &Arc<Space>, b: &Arc<Space>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_labels() {
        let err = Space::new(
            vec!["a".into(), "a".into()],
            vec![vec![0.0], vec![1.0]],
        );
        assert!(err.is_err());
    }

    #[test]
    fn rejects_ragged_coords() {
        let err = Space::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0], vec![1.0, 2.0]],
        );
        assert!(err.is_err());
    }

    #[test]
    fn distance_is_metric_on_random_grids() {
        let s = Space::line("p", &[0.0, 0.25, 1.0, -2.0]).unwrap();
        let n = s.len();
        for i in 0..n {
            assert_eq!(s.distance(i, i), 0.0);
            for j in 0..n {
                assert!((s.distance(i, j) - s.distance(j, i)).abs() < 1e-15);
                if i != j {
                    assert!(s.distance(i, j) > 0.0);
                }
                for k in 0..n {
                    assert!(s.distance(i, k) <= s.distance(i, j) + s.distance(j, k) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn grid_endpoints() {
        let g = Space::uniform_grid("x", 0.0, 1.0, 5).unwrap();
        assert_eq!(g.scalar(0), 0.0);
        assert_eq!(g.scalar(4), 1.0);
        assert_eq!(g.len(), 5);
    }
}
