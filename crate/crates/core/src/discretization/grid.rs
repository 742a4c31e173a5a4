use serde::{Deserialize, Serialize};

use crate::error::{GapError, Result};

pub const MIN_NODES: usize = 16;

/// Uniform mesh `r_i = i h`, `i = 1..=n`, with `h = r_max / (n + 1)`.
///
/// Dirichlet conditions hold at `r = 0` and `r = r_max`, so neither endpoint is
/// a node and every node is strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r_max: f64,
    n: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(GapError::InvalidGrid(format!("radius must be positive, got {r_max}")));
        }
        if n < MIN_NODES {
            return Err(GapError::InvalidGrid(format!(
                "grid too coarse: {n} interior nodes, need at least {MIN_NODES}"
            )));
        }
        Ok(Self { r_max, n })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn h(&self) -> f64 {
        self.r_max / (self.n + 1) as f64
    }

    /// Node `r_{i+1}` for 0-based `i`.
    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h()
    }

    /// Midpoint between node `i` and node `i + 1` (or `r_max` for the last).
    pub fn half_node(&self, i: usize) -> f64 {
        (i as f64 + 1.5) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    pub fn half_nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.half_node(i)).collect()
    }

    /// Same radius, half the mesh width.
    pub fn refined(&self) -> Self {
        Self {
            r_max: self.r_max,
            n: 2 * self.n + 1,
        }
    }

    pub(crate) fn cache_key(&self) -> (u64, usize) {
        (self.r_max.to_bits(), self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_positive_and_increasing() {
        let g = RadialGrid::new(10.0, 19).unwrap();
        assert_eq!(g.h(), 0.5);
        let nodes = g.nodes();
        assert_eq!(nodes[0], 0.5);
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*nodes.last().unwrap(), 9.5);
        assert_eq!(g.half_node(0), 0.75);
    }

    #[test]
    fn refinement_halves_h() {
        let g = RadialGrid::new(8.0, 31).unwrap();
        assert!((g.refined().h() - g.h() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid() {
        assert!(RadialGrid::new(0.0, 100).is_err());
        assert!(RadialGrid::new(f64::NAN, 100).is_err());
        assert!(RadialGrid::new(10.0, 15).is_err());
    }
}
