//! Uniform spatial grid on the unit interval.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("grid must have at least 4 cells, got {0}")]
    TooCoarse(usize),
}

/// `n` cells, `n + 1` nodes `x_k = k / n` covering [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self, GridError> {
        if n < 4 {
            return Err(GridError::TooCoarse(n));
        }
        let nodes = (0..=n).map(|k| k as f64 / n as f64).collect();
        Ok(Self {
            n,
            h: 1.0 / n as f64,
            nodes,
        })
    }

    pub fn cells(&self) -> usize {
        self.n
    }

    /// Number of nodes (`cells + 1`).
    pub fn node_count(&self) -> usize {
        self.n + 1
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }
}
