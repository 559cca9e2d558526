//! Uniform rapidity grids and the mass-shell momentum map.

use serde::Serialize;

use crate::{Error, Result};

/// A uniform rapidity grid with mass μ.
///
/// Each node θ_k carries the quadrature weight Δθ, and the discrete delta
/// function at a node is δ_jk/Δθ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RapidityGrid {
    theta_min: f64,
    theta_max: f64,
    n_points: usize,
    mass: f64,
}

impl RapidityGrid {
    /// Grid with `n_points ≥ 2` nodes from `theta_min` to `theta_max` inclusive.
    pub fn new(theta_min: f64, theta_max: f64, n_points: usize, mass: f64) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 points, got {n_points}")));
        }
        if !(theta_max > theta_min) {
            return Err(Error::InvalidParameter(format!("grid bounds must increase: [{theta_min}, {theta_max}]")));
        }
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { theta_min, theta_max, n_points, mass })
    }

    /// Grid starting at `theta_min` with the given spacing.
    pub fn with_spacing(theta_min: f64, spacing: f64, n_points: usize, mass: f64) -> Result<Self> {
        Self::new(theta_min, theta_min + spacing * (n_points as f64 - 1.0), n_points, mass)
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.n_points
    }

    /// Always false: grids have at least two nodes.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// First node.
    pub fn theta_min(&self) -> f64 {
        self.theta_min
    }

    /// Last node.
    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    /// Mass μ.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Node spacing Δθ, also the quadrature weight of each node.
    pub fn spacing(&self) -> f64 {
        (self.theta_max - self.theta_min) / (self.n_points as f64 - 1.0)
    }

    /// Rapidity of node `k`.
    pub fn node(&self, k: usize) -> f64 {
        self.theta_min + self.spacing() * k as f64
    }

    /// All nodes in increasing order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.node(k)).collect()
    }

    /// On-shell momentum p(θ_k) = μ(cosh θ_k, sinh θ_k).
    pub fn momentum(&self, k: usize) -> [f64; 2] {
        let t = self.node(k);
        [self.mass * t.cosh(), self.mass * t.sinh()]
    }

    /// Index of the node closest to `theta`, if it lies within half a spacing.
    pub fn nearest_node(&self, theta: f64) -> Option<usize> {
        let x = (theta - self.theta_min) / self.spacing();
        let k = x.round();
        if k < 0.0 || k > (self.n_points - 1) as f64 || (x - k).abs() > 0.5 {
            None
        } else {
            Some(k as usize)
        }
    }

    /// Identifier used as domain metadata for operators.
    pub fn id(&self) -> String {
        format!("grid[{},{};{};mu={}]", self.theta_min, self.theta_max, self.n_points, self.mass)
    }
}

/// Minkowski product p·x = p⁰x⁰ − p¹x¹.
#[inline]
pub fn minkowski(p: [f64; 2], x: [f64; 2]) -> f64 {
    p[0] * x[0] - p[1] * x[1]
}
